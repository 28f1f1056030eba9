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

#include "dedvpe/hybrid.h"

#include <cmath>

#include <gtest/gtest.h>

#include "test_instances.h"

namespace dedvpe {
namespace {

// Three quadratic units, no valve term, ramps and limits slack at the
// optimum.
Instance ConvexInstance() {
  Instance inst;
  const double beta[] = {2.0, 1.8, 2.1};
  const double gamma[] = {0.004, 0.006, 0.003};
  for (int i = 0; i < 3; ++i) {
    UnitParams u;
    u.alpha = 20;
    u.beta = beta[i];
    u.gamma = gamma[i];
    u.p_min = 10;
    u.p_max = 300;
    u.ramp_up = u.ramp_down = 290;
    inst.units.push_back(u);
  }
  inst.demand = {250.0, 400.0};
  return inst;
}

// Equality-constrained QP per period: [2G 1; 1^T 0] [P; -lambda] = [-b; D].
Schedule QpOptimum(const Instance& inst) {
  const int n = inst.num_units();
  Schedule opt(n, inst.num_periods());
  for (int t = 0; t < inst.num_periods(); ++t) {
    Eigen::MatrixXd k = Eigen::MatrixXd::Zero(n + 1, n + 1);
    Eigen::VectorXd rhs(n + 1);
    for (int i = 0; i < n; ++i) {
      k(i, i) = 2 * inst.units[i].gamma;
      k(i, n) = k(n, i) = 1.0;
      rhs[i] = -inst.units[i].beta;
    }
    rhs[n] = inst.demand[t];
    const Eigen::VectorXd sol = k.fullPivLu().solve(rhs);
    for (int i = 0; i < n; ++i) opt(i, t) = sol[i];
  }
  return opt;
}

TEST(ChangeStatisticsTest, BucketsAreContiguous) {
  Schedule a(1, 6), b(1, 6);
  const double deltas[] = {0.0, 5e-5, 2.0, 3.0, 9.5, 20.0};
  for (int t = 0; t < 6; ++t) b(0, t) = a(0, t) + deltas[t];
  ChangeStatistics s = change_statistics(a, b, {3.0, 6.0, 9.0, 12.0});
  EXPECT_EQ(s.total, 6);
  EXPECT_EQ(s.unchanged, 2);
  EXPECT_DOUBLE_EQ(s.unchanged_fraction(), 2.0 / 6.0);
  EXPECT_EQ(s.counts, (std::vector<int>{2, 0, 0, 1, 1}));
  EXPECT_DOUBLE_EQ(s.max_change, 20.0);
}

TEST(ColdStartTest, ProportionalStartMeetsDemand) {
  Instance inst = testing::LoadFixture("ded10.txt");
  Schedule s = cold_start(inst, ColdStart::kProportional);
  for (int t = 0; t < inst.num_periods(); ++t) {
    EXPECT_NEAR(s.outputs.col(t).sum(), inst.demand[t], 1e-9);
  }
  Schedule flat = cold_start(inst, ColdStart::kFlatMidpoint);
  EXPECT_DOUBLE_EQ(flat(0, 0), 0.5 * (inst.units[0].p_min + inst.units[0].p_max));
}

TEST(SolveHybridTest, ConvexInstanceReachesQpOptimum) {
  Instance inst = ConvexInstance();
  HybridConfig cfg;
  cfg.bnb.rel_gap = 0.0;
  HybridReport report = solve_hybrid(inst, cfg);
  ASSERT_EQ(report.status, HybridStatus::kOptimal);
  const Schedule opt = QpOptimum(inst);
  for (int t = 0; t < inst.num_periods(); ++t) {
    for (int i = 0; i < inst.num_units(); ++i) {
      EXPECT_NEAR((*report.schedule)(i, t), opt(i, t), 1e-3);
    }
  }
  EXPECT_TRUE(report.audit.pass);
  EXPECT_LE(report.cost, report.step1_cost + 1e-9);
}

TEST(SolveHybridTest, PinnedInstanceHasOneAnswer) {
  Instance inst = ConvexInstance();
  double low = 0.0;
  for (const UnitParams& u : inst.units) low += u.p_min;
  inst.demand = {low, low};
  for (ColdStart start : {ColdStart::kFlatMidpoint, ColdStart::kProportional}) {
    IpmResult r = solve_single_ipm(inst, false, false, {}, start);
    ASSERT_EQ(r.status, IpmStatus::kLocalOptimum);
    for (int t = 0; t < 2; ++t) {
      for (int i = 0; i < 3; ++i) {
        EXPECT_NEAR(r.schedule(i, t), inst.units[i].p_min, 1e-6);
      }
    }
  }
}

TEST(SolveHybridTest, UnreachableDemandIsInfeasible) {
  Instance inst = ConvexInstance();
  inst.demand = {1000.0, 400.0};
  HybridReport report = solve_hybrid(inst);
  EXPECT_EQ(report.status, HybridStatus::kInfeasible);
  EXPECT_FALSE(report.schedule.has_value());
}

TEST(SolveHybridTest, FailedRefinementFallsBackToStepOne) {
  Instance inst = testing::LoadFixture("ded5.txt");
  HybridConfig cfg;
  cfg.include_loss = false;
  cfg.bnb.rel_gap = 0.1;
  cfg.ipm.max_iterations = 0;
  HybridReport report = solve_hybrid(inst, cfg);
  ASSERT_EQ(report.status, HybridStatus::kFallback);
  ASSERT_TRUE(report.step2.has_value());
  EXPECT_EQ(report.step2->status, IpmStatus::kMaxIterations);
  EXPECT_TRUE(report.schedule->outputs.isApprox(report.step1.incumbent->outputs));
  EXPECT_TRUE(report.audit.pass);
  EXPECT_EQ(report.changes.unchanged, report.changes.total);
}

TEST(SolveHybridTest, WithLossBeatsSingleStepAndIsAFixedPoint) {
  Instance inst = testing::LoadFixture("ded5.txt");
  HybridConfig cfg;
  cfg.bnb.rel_gap = 0.06;  // root incumbent
  HybridReport report = solve_hybrid(inst, cfg);
  ASSERT_EQ(report.status, HybridStatus::kOptimal);
  EXPECT_TRUE(report.audit.pass);
  EXPECT_LE(report.audit.max_balance_violation, 1e-5);
  for (ColdStart start : {ColdStart::kFlatMidpoint, ColdStart::kProportional}) {
    IpmResult single = solve_single_ipm(inst, true, false, {}, start);
    ASSERT_EQ(single.status, IpmStatus::kLocalOptimum);
    EXPECT_LE(report.cost, total_cost(inst, single.schedule))
        << ToString(start);
  }
  NlpProblem prob = build_nlp(inst, true, false);
  IpmResult again = solve_nlp(prob, *report.schedule);
  ASSERT_EQ(again.status, IpmStatus::kLocalOptimum);
  EXPECT_NEAR(total_cost(inst, again.schedule), report.cost,
              1e-6 * report.cost);
}

}  // namespace
}  // namespace dedvpe
