// Copyright 2026 The dedvpe Authors.
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "dedvpe/lp_simplex.h"

#include <cmath>
#include <optional>
#include <random>
#include <vector>

#include <Eigen/Dense>
#include <gtest/gtest.h>

#include "oracles.h"

namespace dedvpe {
namespace {

// Minimum over all vertices of the box-and-row polytope. Every constraint
// set of size n is tried; returns nullopt when no vertex is feasible.
std::optional<double> VertexOracle(const SparseLp& lp) {
  const int n = lp.num_columns();
  const int m = lp.num_rows();
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(m, n);
  for (const LpTriplet& e : lp.triplets()) a(e.row, e.col) = e.value;

  // Candidate hyperplanes: (normal, rhs).
  std::vector<std::pair<Eigen::VectorXd, double>> planes;
  for (int j = 0; j < n; ++j) {
    Eigen::VectorXd u = Eigen::VectorXd::Unit(n, j);
    if (std::isfinite(lp.col_lower()[j])) planes.emplace_back(u, lp.col_lower()[j]);
    if (std::isfinite(lp.col_upper()[j])) planes.emplace_back(u, lp.col_upper()[j]);
  }
  for (int i = 0; i < m; ++i) {
    Eigen::VectorXd row = a.row(i).transpose();
    if (std::isfinite(lp.row_lower()[i])) planes.emplace_back(row, lp.row_lower()[i]);
    if (std::isfinite(lp.row_upper()[i])) planes.emplace_back(row, lp.row_upper()[i]);
  }
  const int k = static_cast<int>(planes.size());
  std::optional<double> best;
  std::vector<int> pick(n);
  for (int i = 0; i < n; ++i) pick[i] = i;
  while (true) {
    Eigen::MatrixXd s(n, n);
    Eigen::VectorXd rhs(n);
    for (int r = 0; r < n; ++r) {
      s.row(r) = planes[pick[r]].first.transpose();
      rhs[r] = planes[pick[r]].second;
    }
    Eigen::FullPivLU<Eigen::MatrixXd> lu(s);
    if (lu.rank() == n) {
      Eigen::VectorXd x = lu.solve(rhs);
      std::vector<double> xv(x.data(), x.data() + n);
      if (lp.MaxViolation(xv) < 1e-9) {
        const double obj = lp.Objective(xv);
        if (!best || obj < *best) best = obj;
      }
    }
    int i = n - 1;
    while (i >= 0 && pick[i] == k - n + i) --i;
    if (i < 0) break;
    ++pick[i];
    for (int r = i + 1; r < n; ++r) pick[r] = pick[r - 1] + 1;
  }
  return best;
}

using testing::RandomLp;

TEST(SimplexTest, SmallMaximization) {
  // max 3x + 2y, x + y <= 4, x + 3y <= 8, x <= 3  ->  (3, 1), value 11.
  SparseLp lp;
  const int x = lp.AddColumn(0, 3, -3, false, "x");
  const int y = lp.AddColumn(0, kInfinity, -2, false, "y");
  const int r0 = lp.AddRow(-kInfinity, 4, "c0");
  const int r1 = lp.AddRow(-kInfinity, 8, "c1");
  lp.AddCoefficient(r0, x, 1);
  lp.AddCoefficient(r0, y, 1);
  lp.AddCoefficient(r1, x, 1);
  lp.AddCoefficient(r1, y, 3);
  const LpSolution sol = solve_lp(lp);
  ASSERT_EQ(sol.status, LpStatus::kOptimal);
  EXPECT_NEAR(sol.objective, -11.0, 1e-9);
  EXPECT_NEAR(sol.primal[0], 3.0, 1e-9);
  EXPECT_NEAR(sol.primal[1], 1.0, 1e-9);
  EXPECT_NEAR(sol.dual_objective, sol.objective, 1e-7);
  EXPECT_NEAR(sol.row_duals[r0], -2.0, 1e-9);
}

TEST(SimplexTest, DetectsInfeasible) {
  SparseLp lp;
  const int x = lp.AddColumn(0, 1, 1, false, "x");
  const int y = lp.AddColumn(0, 1, 1, false, "y");
  const int r = lp.AddRow(3, kInfinity, "c");
  lp.AddCoefficient(r, x, 1);
  lp.AddCoefficient(r, y, 1);
  EXPECT_EQ(solve_lp(lp).status, LpStatus::kInfeasible);
}

TEST(SimplexTest, DetectsUnbounded) {
  SparseLp lp;
  const int x = lp.AddColumn(0, kInfinity, -1, false, "x");
  const int y = lp.AddColumn(0, kInfinity, 0, false, "y");
  const int r = lp.AddRow(-kInfinity, 1, "c");
  lp.AddCoefficient(r, x, 1);
  lp.AddCoefficient(r, y, -1);
  EXPECT_EQ(solve_lp(lp).status, LpStatus::kUnbounded);
}

TEST(SimplexTest, FreeVariablesAndEqualities) {
  // min x + y with x - y = 1, x + y >= 3, x, y free.
  SparseLp lp;
  const int x = lp.AddColumn(-kInfinity, kInfinity, 1, false, "x");
  const int y = lp.AddColumn(-kInfinity, kInfinity, 1, false, "y");
  const int e = lp.AddRow(1, 1, "e");
  const int g = lp.AddRow(3, kInfinity, "g");
  lp.AddCoefficient(e, x, 1);
  lp.AddCoefficient(e, y, -1);
  lp.AddCoefficient(g, x, 1);
  lp.AddCoefficient(g, y, 1);
  const LpSolution sol = solve_lp(lp);
  ASSERT_EQ(sol.status, LpStatus::kOptimal);
  EXPECT_NEAR(sol.objective, 3.0, 1e-9);
  EXPECT_NEAR(sol.primal[x], 2.0, 1e-9);
}

TEST(SimplexTest, ObjectiveOffsetIsReported) {
  SparseLp lp;
  lp.AddColumn(1, 2, 1, false, "x");
  lp.SetObjectiveOffset(10);
  const LpSolution sol = solve_lp(lp);
  ASSERT_EQ(sol.status, LpStatus::kOptimal);
  EXPECT_DOUBLE_EQ(sol.objective, 11.0);
  EXPECT_NEAR(sol.dual_objective, 11.0, 1e-12);
}

TEST(SimplexTest, MatchesVertexEnumeration) {
  std::mt19937 rng(20260415);
  int feasible = 0;
  for (int trial = 0; trial < 300; ++trial) {
    const int rows = 1 + trial % 4;
    const int cols = 2 + trial % 3;
    const SparseLp lp = RandomLp(rng, rows, cols);
    const std::optional<double> oracle = VertexOracle(lp);
    for (bool scale : {true, false}) {
      SimplexOptions opts;
      opts.scale = scale;
      const LpSolution sol = solve_lp(lp, nullptr, opts);
      if (!oracle) {
        EXPECT_EQ(sol.status, LpStatus::kInfeasible) << "trial " << trial;
        continue;
      }
      ASSERT_EQ(sol.status, LpStatus::kOptimal) << "trial " << trial;
      EXPECT_NEAR(sol.objective, *oracle, 1e-6 * (1 + std::abs(*oracle)))
          << "trial " << trial;
      EXPECT_LE(lp.MaxViolation(sol.primal), 1e-7) << "trial " << trial;
      EXPECT_NEAR(sol.dual_objective, sol.objective,
                  1e-6 * (1 + std::abs(*oracle)))
          << "trial " << trial;
    }
    if (oracle) ++feasible;
  }
  EXPECT_GT(feasible, 60);
}

TEST(SimplexTest, WarmStartAfterBoundChangeAgreesWithCold) {
  std::mt19937 rng(7);
  const testing::WarmColdSummary s = testing::WarmColdTrials(rng, 500);
  EXPECT_EQ(s.status_mismatches, 0);
  EXPECT_EQ(s.trials, 500);
  EXPECT_GT(s.compared, 300);
  EXPECT_LE(s.max_difference, 1e-7);
}

TEST(SimplexTest, SolverReusesBasisAcrossBoundChanges) {
  SparseLp lp;
  for (int j = 0; j < 5; ++j) lp.AddColumn(0, 10, -(j + 1), false, "x");
  const int r = lp.AddRow(-kInfinity, 12, "cap");
  for (int j = 0; j < 5; ++j) lp.AddCoefficient(r, j, 1);
  SimplexSolver solver(lp);
  LpSolution sol = solver.Solve();
  ASSERT_EQ(sol.status, LpStatus::kOptimal);
  EXPECT_NEAR(sol.objective, -(10 * 5 + 2 * 4), 1e-9);
  solver.SetColumnBounds(4, 0, 3);
  sol = solver.Solve();
  ASSERT_EQ(sol.status, LpStatus::kOptimal);
  EXPECT_NEAR(sol.objective, -(3 * 5 + 9 * 4), 1e-9);
  EXPECT_DOUBLE_EQ(solver.column_upper(4), 3.0);
}

TEST(SimplexTest, RejectsMismatchedBasis) {
  SparseLp lp;
  lp.AddColumn(0, 1, 1, false, "x");
  SimplexSolver solver(lp);
  LpBasis bad;
  bad.basic = {0, 1};
  bad.status.assign(3, VarStatus::kBasic);
  EXPECT_THROW(solver.LoadBasis(bad), std::invalid_argument);
}

}  // namespace
}  // namespace dedvpe
