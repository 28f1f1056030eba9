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

#include "dedvpe/branch_and_bound.h"

#include <cmath>
#include <optional>
#include <random>
#include <vector>

#include <gtest/gtest.h>

#include "dedvpe/cost.h"
#include "dedvpe/feasibility.h"
#include "oracles.h"
#include "test_instances.h"

namespace dedvpe {
namespace {

using testing::EnumerationOracle;

TEST(BranchAndBoundTest, SingleSegmentModelSolvesAtRoot) {
  Instance inst;
  for (double pmin : {10.0, 20.0}) {
    UnitParams u;
    u.alpha = 5;
    u.beta = 2;
    u.gamma = 0.01;
    u.p_min = pmin;
    u.p_max = pmin + 50;
    u.ramp_up = u.ramp_down = 100;
    inst.units.push_back(u);
  }
  inst.demand = {50, 80};
  const MilpModel model = build_milp(inst, 4, false);
  const BnbResult r = solve_milp(model);
  ASSERT_TRUE(r.incumbent.has_value());
  EXPECT_EQ(r.nodes, 1);
  EXPECT_EQ(r.status, BnbStatus::kProvenOptimal);
  EXPECT_DOUBLE_EQ(r.gap, 0.0);
}

TEST(BranchAndBoundTest, MatchesEnumerationOnRandomTinyModels) {
  std::mt19937 rng(99);
  int solved = 0;
  for (int trial = 0; trial < 20; ++trial) {
    const Instance inst = testing::RandomSmallInstance(rng, 2, 2, 3);
    const MilpModel model = build_milp(inst, 1, false);
    const std::optional<double> oracle = EnumerationOracle(model);
    for (BranchingRule rule : {BranchingRule::kSegmentSplit, BranchingRule::kMostFractional}) {
      BnbConfig cfg;
      cfg.rel_gap = 0.0;
      cfg.branching = rule;
      const BnbResult r = solve_milp(model, cfg);
      if (!oracle) {
        EXPECT_EQ(r.status, BnbStatus::kInfeasible) << "trial " << trial;
        continue;
      }
      ASSERT_EQ(r.status, BnbStatus::kProvenOptimal) << "trial " << trial;
      EXPECT_NEAR(r.incumbent_objective, *oracle, 1e-7 * std::abs(*oracle))
          << "trial " << trial;
      EXPECT_LE(model.lp.MaxViolation(r.incumbent_solution), 1e-6);
      EXPECT_LE(model.lp.MaxIntegrality(r.incumbent_solution), cfg.integrality_tol);
    }
    if (oracle) ++solved;
  }
  EXPECT_GE(solved, 15);
}

TEST(BranchAndBoundTest, HeuristicKeepsIntegralRelaxation) {
  std::mt19937 rng(3);
  const Instance inst = testing::RandomSmallInstance(rng, 2, 3, 2);
  const MilpModel model = build_milp(inst, 1, false);
  BnbConfig cfg;
  cfg.rel_gap = 0.0;
  const BnbResult r = solve_milp(model, cfg);
  ASSERT_TRUE(r.incumbent.has_value());
  const std::optional<Schedule> s = primal_heuristic_round(model, r.incumbent_solution);
  ASSERT_TRUE(s.has_value());
  EXPECT_LE((s->outputs - r.incumbent->outputs).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(BranchAndBoundTest, HeuristicGivesUpWhenDemandIsOutOfReach) {
  Instance inst;
  UnitParams u;
  u.beta = 1;
  u.e = 10;
  u.f = 0.1;
  u.p_min = 10;
  u.p_max = 50;
  u.ramp_up = u.ramp_down = 100;
  inst.units = {u, u};
  inst.demand = {120};
  const MilpModel model = build_milp(inst, 2, false);
  std::vector<double> x(model.lp.num_columns(), 0.0);
  EXPECT_FALSE(primal_heuristic_round(model, x).has_value());
  EXPECT_EQ(solve_milp(model).status, BnbStatus::kInfeasible);
}

TEST(BranchAndBoundTest, RootIncumbentSandwichesBound) {
  const Instance inst = testing::LoadFixture("ded5.txt");
  const MilpModel model = build_milp(inst, 4, false);
  BnbConfig cfg;
  cfg.node_limit = 1;
  const BnbResult r = solve_milp(model, cfg);
  ASSERT_TRUE(r.incumbent.has_value());
  EXPECT_GE(r.incumbent_objective, r.root_bound);
  EXPECT_GE(r.incumbent_objective, r.best_bound);
  Instance lossless = inst;
  lossless.b_matrix.reset();
  const AuditReport audit_report = audit(lossless, *r.incumbent);
  EXPECT_TRUE(audit_report.pass);
  EXPECT_NEAR(total_pwl_cost(inst, model.tables, *r.incumbent),
              r.incumbent_objective, 1e-6 * r.incumbent_objective);
}

TEST(BranchAndBoundTest, DeterministicAndMonotone) {
  std::mt19937 rng(11);
  const Instance inst = testing::RandomSmallInstance(rng, 3, 4, 3);
  const MilpModel model = build_milp(inst, 2, false);
  std::vector<double> bounds;
  BnbConfig cfg;
  cfg.rel_gap = 0.0;
  cfg.node_limit = 400;
  cfg.progress_interval_seconds = 0.0;
  cfg.progress = [&](const BnbProgress& p) { bounds.push_back(p.best_bound); };
  const BnbResult a = solve_milp(model, cfg);
  const std::vector<double> first_run = bounds;
  const BnbResult b = solve_milp(model, cfg);
  bounds = first_run;
  EXPECT_EQ(a.nodes, b.nodes);
  EXPECT_EQ(a.incumbent_objective, b.incumbent_objective);
  EXPECT_EQ(a.incumbent_solution, b.incumbent_solution);
  for (size_t k = 1; k < bounds.size(); ++k) EXPECT_GE(bounds[k], bounds[k - 1]);
}

TEST(BranchAndBoundTest, ParallelWorkersMeetGapContract) {
  std::mt19937 rng(5);
  BnbConfig serial;
  serial.rel_gap = 0.0;
  Instance inst;
  BnbResult exact;
  do {
    inst = testing::RandomSmallInstance(rng, 3, 3, 3);
    exact = solve_milp(build_milp(inst, 2, false), serial);
  } while (!exact.incumbent.has_value());
  const MilpModel model = build_milp(inst, 2, false);
  BnbConfig parallel = serial;
  parallel.threads = 3;
  const BnbResult r = solve_milp(model, parallel);
  EXPECT_EQ(r.status, BnbStatus::kProvenOptimal);
  EXPECT_NEAR(r.incumbent_objective, exact.incumbent_objective,
              1e-7 * exact.incumbent_objective);
}

TEST(BranchAndBoundTest, RejectsNegativeGap) {
  const Instance inst = testing::LoadFixture("ded5.txt");
  const MilpModel model = build_milp(inst, 1, false);
  BnbConfig cfg;
  cfg.rel_gap = -1;
  EXPECT_THROW(solve_milp(model, cfg), std::invalid_argument);
}

}  // namespace
}  // namespace dedvpe
