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

// Two-step dispatch: branch and bound on the piecewise-linear MILP, then
// the interior-point method on the smooth model started from the MILP
// schedule. Also the single-step interior-point baselines.

#ifndef DEDVPE_HYBRID_H_
#define DEDVPE_HYBRID_H_

#include <optional>
#include <string>
#include <vector>

#include "dedvpe/branch_and_bound.h"
#include "dedvpe/cost.h"
#include "dedvpe/feasibility.h"
#include "dedvpe/model.h"
#include "dedvpe/nlp_ipm.h"

namespace dedvpe {

// Histogram of |P_b(i,t) - P_a(i,t)|. Changes up to same_tol count as
// unchanged; the rest fall into (0, e_1], (e_1, e_2], ..., and a final
// bucket above the last edge.
struct ChangeStatistics {
  int total = 0;
  int unchanged = 0;
  double max_change = 0.0;
  std::vector<double> edges;
  std::vector<int> counts;  // edges.size() + 1 entries

  double unchanged_fraction() const {
    return total > 0 ? static_cast<double>(unchanged) / total : 1.0;
  }
};

ChangeStatistics change_statistics(const Schedule& before,
                                   const Schedule& after,
                                   const std::vector<double>& edges,
                                   double same_tol = 1e-4);

struct HybridConfig {
  int segments = 4;  // M
  bool include_loss = true;   // ignored when the instance has no B-matrix
  bool reserve = false;       // needs reserve data
  BreakpointPlacement placement = BreakpointPlacement::kSineAligned;
  BnbConfig bnb;
  IpmConfig ipm;
  std::vector<double> change_edges = {3.0, 6.0, 9.0, 12.0};
};

enum class HybridStatus {
  kOptimal,     // step 2 reached a local optimum that passes the audit
  kFallback,    // step 2 failed; the step-1 schedule is returned
  kInfeasible,  // step 1 found no schedule
};
std::string ToString(HybridStatus status);

struct HybridReport {
  HybridStatus status = HybridStatus::kInfeasible;
  BnbResult step1;
  std::optional<IpmResult> step2;
  std::optional<Schedule> schedule;  // final
  double step1_cost = 0.0;  // exact cost of the step-1 schedule
  double cost = 0.0;        // exact cost of the final schedule
  double step1_seconds = 0.0;
  double step2_seconds = 0.0;
  double total_seconds = 0.0;
  ChangeStatistics changes;
  AuditReport audit;
};

// The instance as audited for a run: B-matrix dropped when loss is off,
// reserve checked only when requested.
Instance audited_instance(const Instance& instance, bool include_loss,
                          bool reserve);

HybridReport solve_hybrid(const Instance& instance,
                          const HybridConfig& config = {});

// Step 2 alone, from a finished step 1 (which depends only on segments,
// reserve, placement and the B&B settings, so one step 1 can serve runs
// with and without loss).
HybridReport refine_hybrid(const Instance& instance, const BnbResult& step1,
                           double step1_seconds, const HybridConfig& config);

enum class ColdStart { kFlatMidpoint, kProportional };
std::string ToString(ColdStart start);

// flat midpoint: P = (p_min + p_max) / 2. proportional: every unit takes
// the same share of its range, chosen so that outputs sum to demand.
Schedule cold_start(const Instance& instance, ColdStart start);

IpmResult solve_single_ipm(const Instance& instance, bool include_loss,
                           bool reserve, const IpmConfig& config,
                           ColdStart start);

}  // namespace dedvpe

#endif  // DEDVPE_HYBRID_H_
