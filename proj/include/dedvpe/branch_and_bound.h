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

// LP-based branch and bound over the segment selectors of a MilpModel.
//
// Nodes fix selector columns to 0 or 1 and re-solve the relaxation with
// the dual simplex from the parent's basis. Selection is best bound, with
// a depth-first plunge until the first incumbent. Branching picks the
// most fractional selector.
//
// Incumbents come from integral node relaxations and from a heuristic
// that rounds a relaxation to a schedule, fixes the resulting segments,
// solves the remaining LP, and then walks segments across breakpoints
// where the LP pushes against them.
//
// achieved gap = (incumbent - best bound) / max(|incumbent|, 1).

#ifndef DEDVPE_BRANCH_AND_BOUND_H_
#define DEDVPE_BRANCH_AND_BOUND_H_

#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "dedvpe/lp_simplex.h"
#include "dedvpe/milp_builder.h"
#include "dedvpe/model.h"

namespace dedvpe {

enum class BnbStatus { kGapReached, kProvenOptimal, kLimit, kInfeasible };
std::string ToString(BnbStatus status);

// Both rules pick the most fractional selector. kMostFractional fixes it
// to 0 or 1. kSegmentSplit splits the segments of its (unit, period) at
// the selector-weighted mean index and forbids one side in each child.
enum class BranchingRule { kMostFractional, kSegmentSplit };
enum class NodeSelection { kBestBoundPlunge, kBestBound, kDepthFirst };

struct BnbProgress {
  long long nodes = 0;
  long long open_nodes = 0;
  double best_bound = 0.0;
  double incumbent = 0.0;  // kInfinity before the first incumbent
  double gap = 0.0;
  double elapsed_seconds = 0.0;
};

struct BnbConfig {
  double rel_gap = 0.003;
  double abs_gap = 0.0;
  long long node_limit = 0;     // 0: none
  double time_limit_seconds = 0.0;  // 0: none
  BranchingRule branching = BranchingRule::kSegmentSplit;
  NodeSelection node_selection = NodeSelection::kBestBoundPlunge;
  double integrality_tol = 1e-6;
  // 1 is deterministic. More workers share the queue and the incumbent.
  int threads = 1;
  bool heuristics = true;
  // Run the rounding heuristic every this many nodes (root always).
  int heuristic_frequency = 100;
  SimplexOptions lp;
  std::function<void(const BnbProgress&)> progress;
  double progress_interval_seconds = 1.0;
};

struct BnbResult {
  BnbStatus status = BnbStatus::kInfeasible;
  std::optional<Schedule> incumbent;
  std::vector<double> incumbent_solution;  // full column vector
  double incumbent_objective = kInfinity;
  double best_bound = -kInfinity;
  double root_bound = -kInfinity;
  double gap = kInfinity;
  long long nodes = 0;
  long long lp_iterations = 0;
  double seconds = 0.0;
};

// Throws std::invalid_argument on a bad configuration.
BnbResult solve_milp(const MilpModel& model, const BnbConfig& config = {});

// Rounds a relaxation: each (i,t) takes the segment with the largest
// selector, its output is clamped into that segment (intersected with the
// ramp window from the previous period), and each period's balance is then
// repaired greedily, cheapest slope first. Returns nothing when the repair
// cannot meet demand within limits and ramps.
std::optional<Schedule> primal_heuristic_round(const MilpModel& model,
                                               std::span<const double> x);

}  // namespace dedvpe

#endif  // DEDVPE_BRANCH_AND_BOUND_H_
