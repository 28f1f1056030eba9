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

#include "dedvpe/nlp_ipm.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include <gtest/gtest.h>

#include "dedvpe/cost.h"
#include "dedvpe/errors.h"
#include "dedvpe/feasibility.h"
#include "oracles.h"
#include "test_instances.h"

namespace dedvpe {
namespace {

using testing::RandomSmallInstance;

using testing::WithLossAndReserve;

TEST(NlpProblemTest, RowCountsFollowTheLayout) {
  std::mt19937 rng(1);
  Instance inst = WithLossAndReserve(rng, 3, 4);
  const int n = 3, t = 4;
  NlpProblem plain = build_nlp(inst, false, false);
  EXPECT_EQ(plain.num_equalities(), 2 * n * t + t);
  EXPECT_EQ(plain.num_inequalities(), n * (t - 1));
  NlpProblem full = build_nlp(inst, true, true);
  EXPECT_EQ(full.num_equalities(), 2 * n * t + t);
  EXPECT_EQ(full.num_inequalities(), n * (t - 1) + n * t + t);
  EXPECT_EQ(full.num_variables(), 5 * n * t + n * (t - 1) + n * t + t);
}

TEST(NlpProblemTest, FixedUnitHasNoOutputVariable) {
  Instance inst = testing::LoadFixture("ded10.txt");
  NlpProblem prob = build_nlp(inst, true, false);
  EXPECT_EQ(prob.P(9, 0), -1);
  EXPECT_EQ(prob.RampSlack(9, 3), -1);
  Eigen::VectorXd x = Eigen::VectorXd::Zero(prob.num_variables());
  EXPECT_EQ(prob.Output(x, 9, 5), 55.0);
}

TEST(NlpProblemTest, MissingDataIsAConfigError) {
  std::mt19937 rng(2);
  Instance inst = RandomSmallInstance(rng, 2, 2, 2);
  EXPECT_THROW(build_nlp(inst, true, false), ConfigError);
  EXPECT_THROW(build_nlp(inst, false, true), ConfigError);
}

TEST(NlpProblemTest, DerivativesMatchFiniteDifferences) {
  std::mt19937 rng(3);
  Instance inst = WithLossAndReserve(rng, 3, 3);
  NlpProblem prob = build_nlp(inst, true, true);
  Eigen::VectorXd x, y;
  testing::RandomPoint(prob, rng, &x, &y);
  const Eigen::MatrixXd hess = Eigen::MatrixXd(prob.LagrangianHessian(x, y, 1.0));
  EXPECT_TRUE(hess.isApprox(hess.transpose()));
  EXPECT_EQ(prob.Jacobian(x).rows(), prob.num_constraints());
  EXPECT_EQ(prob.Jacobian(x).cols(), prob.num_variables());
  const testing::DerivativeErrors err = testing::CheckDerivatives(prob, rng, 1000);
  EXPECT_EQ(err.points, 1000);
  EXPECT_LE(err.gradient, 1e-6);
  EXPECT_LE(err.jacobian, 1e-6);
  EXPECT_LE(err.hessian, 1e-6);
}

TEST(InitializeTest, StartSatisfiesSplitAndSineRows) {
  Instance inst = testing::LoadFixture("ded5.txt");
  NlpProblem prob = build_nlp(inst, true, false);
  std::mt19937 rng(4);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  Schedule start(inst.num_units(), inst.num_periods());
  for (int t = 0; t < inst.num_periods(); ++t) {
    for (int i = 0; i < inst.num_units(); ++i) {
      // Includes points on and beyond the limits.
      const UnitParams& p = inst.units[i];
      start(i, t) = p.p_min - 5.0 + (p.range() + 10.0) * u(rng);
    }
  }
  const double floor = 1e-3;
  Eigen::VectorXd x = initialize(prob, start, floor);
  Eigen::VectorXd c;
  prob.Constraints(x, &c);
  for (int t = 0; t < inst.num_periods(); ++t) {
    for (int i = 0; i < inst.num_units(); ++i) {
      EXPECT_NEAR(c[prob.split_row(i, t)], 0.0, 1e-12);
      EXPECT_NEAR(c[prob.sine_row(i, t)], 0.0, 1e-12);
      EXPECT_GE(x[prob.U(i, t)], floor);
      EXPECT_GE(x[prob.V(i, t)], floor);
      const int j = prob.P(i, t);
      EXPECT_GE(x[j] - prob.lower()[j], floor - 1e-12);
      EXPECT_GE(prob.upper()[j] - x[j], floor - 1e-12);
    }
  }
}

TEST(SolveNlpTest, MatchesGridSearchOnTwoUnitInstances) {
  std::mt19937 rng(5);
  const double step = 1e-3;
  int solved = 0;
  for (int trial = 0; trial < 20; ++trial) {
    Instance inst = RandomSmallInstance(rng, 2, 2, 3);
    for (UnitParams& u : inst.units) {
      u.ramp_up = u.ramp_down = u.range();  // periods decouple
    }
    Schedule start(2, 2);
    double grid_total = 0.0;
    const double lipschitz = testing::CostLipschitz(inst);
    for (int t = 0; t < 2; ++t) {
      testing::GridOptimum g = testing::GridSearch(inst, t, step);
      grid_total += g.cost;
      start(0, t) = g.p1;
      start(1, t) = inst.demand[t] - g.p1;
    }
    NlpProblem prob = build_nlp(inst, false, false);
    IpmResult res = solve_nlp(prob, start);
    ASSERT_EQ(res.status, IpmStatus::kLocalOptimum) << "trial " << trial;
    const double exact = total_cost(inst, res.schedule);
    // The grid point is within step/2 of the continuous optimum along the
    // balance line, and both units move by that amount.
    EXPECT_LE(exact, grid_total + 1e-6) << "trial " << trial;
    EXPECT_GE(exact, grid_total - lipschitz * step) << "trial " << trial;
    for (int t = 0; t < 2; ++t) {
      EXPECT_NEAR(res.schedule(0, t), start(0, t), 2 * step);
    }
    ++solved;
  }
  EXPECT_EQ(solved, 20);
}

TEST(SolveNlpTest, OptimaAreSTightAndFeasible) {
  Instance inst = testing::LoadFixture("ded5.txt");
  for (bool loss : {false, true}) {
    NlpProblem prob = build_nlp(inst, loss, false);
    Schedule start(inst.num_units(), inst.num_periods());
    for (int t = 0; t < inst.num_periods(); ++t) {
      double cap = 0.0;
      for (const UnitParams& u : inst.units) cap += u.p_max;
      for (int i = 0; i < inst.num_units(); ++i) {
        start(i, t) = inst.units[i].p_max * inst.demand[t] / cap;
      }
    }
    IpmResult res = solve_nlp(prob, start);
    ASSERT_EQ(res.status, IpmStatus::kLocalOptimum);
    for (int t = 0; t < inst.num_periods(); ++t) {
      for (int i = 0; i < inst.num_units(); ++i) {
        const UnitParams& u = inst.units[i];
        const double sine =
            std::sin(u.f * (res.schedule(i, t) - u.p_min));
        EXPECT_LE(std::abs(res.s(i, t) - std::abs(sine)), 1e-6);
      }
    }
    Instance audited = inst;
    if (!loss) audited.b_matrix.reset();
    AuditReport report = audit(audited, res.schedule);
    EXPECT_TRUE(report.pass);
    EXPECT_LE(report.max_balance_violation, 1e-5);
    EXPECT_NEAR(res.objective, total_cost(inst, res.schedule),
                1e-6 * res.objective);
  }
}

TEST(SolveNlpTest, ConvexStartAtOptimumStopsQuickly) {
  // e = 0 and wide ramps: a quadratic program whose optimum equalizes
  // marginal costs.
  Instance inst;
  for (int i = 0; i < 3; ++i) {
    UnitParams u;
    u.alpha = 10;
    u.beta = 2.0 + 0.1 * i;
    u.gamma = 0.01 + 0.005 * i;
    u.p_min = 10;
    u.p_max = 200;
    u.ramp_up = u.ramp_down = 500;
    inst.units.push_back(u);
  }
  inst.demand = {300.0};
  // beta_i + 2 gamma_i P_i = lambda, sum P_i = D.
  double inv = 0.0, ratio = 0.0;
  for (const UnitParams& u : inst.units) {
    inv += 1.0 / (2 * u.gamma);
    ratio += u.beta / (2 * u.gamma);
  }
  const double lambda = (300.0 + ratio) / inv;
  Schedule opt(3, 1);
  for (int i = 0; i < 3; ++i) {
    opt(i, 0) = (lambda - inst.units[i].beta) / (2 * inst.units[i].gamma);
  }
  NlpProblem prob = build_nlp(inst, false, false);
  IpmConfig cfg;
  cfg.initial_mu = 1e-10;
  IpmResult res = solve_nlp(prob, opt, cfg);
  ASSERT_EQ(res.status, IpmStatus::kLocalOptimum);
  EXPECT_LE(res.iterations, 3);
  for (int i = 0; i < 3; ++i) EXPECT_NEAR(res.schedule(i, 0), opt(i, 0), 1e-6);
  EXPECT_NEAR(res.y[prob.balance_row(0)], lambda, 1e-6);
}

TEST(SolveNlpTest, MonotoneBarrierNeverIncreases) {
  Instance inst = testing::LoadFixture("ded5.txt");
  NlpProblem prob = build_nlp(inst, true, false);
  Schedule start(inst.num_units(), inst.num_periods());
  for (int t = 0; t < inst.num_periods(); ++t) {
    for (int i = 0; i < inst.num_units(); ++i) {
      start(i, t) = 0.5 * (inst.units[i].p_min + inst.units[i].p_max);
    }
  }
  std::vector<double> mus;
  IpmConfig cfg;
  cfg.callback = [&](int, double, double, double, double mu) {
    mus.push_back(mu);
  };
  IpmResult res = solve_nlp(prob, start, cfg);
  EXPECT_EQ(res.status, IpmStatus::kLocalOptimum);
  ASSERT_FALSE(mus.empty());
  for (size_t k = 1; k < mus.size(); ++k) EXPECT_LE(mus[k], mus[k - 1]);
}

TEST(SolveNlpTest, RejectsBadConfig) {
  Instance inst = testing::LoadFixture("ded5.txt");
  NlpProblem prob = build_nlp(inst, false, false);
  Schedule start(inst.num_units(), inst.num_periods());
  IpmConfig cfg;
  cfg.mu_factor = 1.5;
  EXPECT_THROW(solve_nlp(prob, start, cfg), ConfigError);
}

}  // namespace
}  // namespace dedvpe
