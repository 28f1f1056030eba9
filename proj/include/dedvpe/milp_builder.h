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

// Piecewise-linear MILP of the loss-free dispatch problem.
//
// For every unit i and period t with L_i >= 1 segments:
//
//   P(i,t)   = sum_l S(l,i,t)                      row LNK(i,t)
//   S(l,i,t) >= a_{l-1} Z(l,i,t)                   row SLO(l,i,t)
//   S(l,i,t) <= a_l Z(l,i,t)                       row SUP(l,i,t)
//   sum_l Z(l,i,t) = 1,  Z binary                  row CVX(i,t)
//
// with cost sum_l k_l S(l,i,t) + b_l Z(l,i,t). Coupling rows:
//
//   sum_i P(i,t) = D_t                             row BAL(t)
//   -DR_i <= P(i,t) - P(i,t-1) <= UR_i             row RMP(i,t), t >= 2
//   p0-DR_i <= P(i,1) <= p0+UR_i                   row RMP(i,1), if p0 given
//   R(i,t) + P(i,t) <= p_max,  0 <= R <= tau*UR    row RSV(i,t), reserve only
//   sum_i R(i,t) >= R_t                            row RRQ(t), reserve only
//
// Generation limits are the bounds of P(i,t). A unit with p_min == p_max
// contributes only a fixed P column and a constant to the objective offset.
//
// Columns are laid out period-major: for t, for i: P(i,t), S(1..L,i,t),
// Z(1..L,i,t), then R(i,t) when reserve is on. Names are 1-based.
//
// Sizes (F = units with L_i = 0, K = units with an initial output):
//   columns  = T * sum_i (1 + 2 L_i)            [+ N T with reserve]
//   rows     = T * sum_{L_i>0} (2 + 2 L_i) + T + N (T - 1) + K
//                                               [+ N T + T with reserve]
//   binaries = T * sum_i L_i

#ifndef DEDVPE_MILP_BUILDER_H_
#define DEDVPE_MILP_BUILDER_H_

#include <span>
#include <vector>

#include "dedvpe/cost.h"
#include "dedvpe/model.h"
#include "dedvpe/sparse_lp.h"

namespace dedvpe {

enum class ColumnKind { kOutput, kSegment, kSelector, kReserve };

struct ColumnRef {
  ColumnKind kind;
  int unit;
  int period;
  int segment;  // 0-based; -1 for kOutput / kReserve
};

struct MilpModel {
  SparseLp lp;
  Instance instance;                 // copy of the data the model was built from
  std::vector<SegmentTable> tables;  // one per unit
  int num_units = 0;
  int num_periods = 0;
  std::vector<ColumnRef> column_refs;  // one per column
  // Indexed by t * num_units + i.
  std::vector<int> output_col;
  std::vector<int> first_segment_col;   // -1 for fixed units
  std::vector<int> first_selector_col;  // -1 for fixed units
  std::vector<int> convexity_row;       // -1 for fixed units
  std::vector<int> reserve_col;         // empty without reserve

  int cell(int unit, int period) const { return period * num_units + unit; }
  int OutputColumn(int unit, int period) const {
    return output_col[cell(unit, period)];
  }
  int SegmentColumn(int unit, int period, int l) const {
    return first_segment_col[cell(unit, period)] + l;
  }
  int SelectorColumn(int unit, int period, int l) const {
    return first_selector_col[cell(unit, period)] + l;
  }
  int num_segments(int unit) const { return tables[unit].num_segments(); }
};

struct MilpSize {
  int columns = 0;
  int rows = 0;
  int binaries = 0;
};

// Closed-form size of build_milp's output.
MilpSize milp_size(const Instance& instance, int segments_per_half_period,
                   bool reserve);

// Loss is never modelled here. Throws BuildError on an invalid instance or
// contradictory static bounds.
MilpModel build_milp(
    const Instance& instance, int segments_per_half_period, bool reserve,
    BreakpointPlacement placement = BreakpointPlacement::kSineAligned);

// Reads P(i,t) from a solution vector. Throws DecodeError when a selector
// is fractional beyond `integrality_tol`, a convexity row is violated, or
// P(i,t) differs from the sum of its segment outputs by more than 1e-7.
Schedule decode(const MilpModel& model, std::span<const double> solution,
                double integrality_tol = 1e-6);

// Full column vector for a schedule: each output is placed in the segment
// containing it. Reserve columns get min(p_max - P, tau*UR).
std::vector<double> encode(const MilpModel& model, const Instance& instance,
                           const Schedule& schedule);

}  // namespace dedvpe

#endif  // DEDVPE_MILP_BUILDER_H_
