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

// Valve-point fuel cost and its piecewise-linear chord approximation.

#ifndef DEDVPE_COST_H_
#define DEDVPE_COST_H_

#include <vector>

#include "dedvpe/model.h"

namespace dedvpe {

// Outputs this far outside [p_min, p_max] are still accepted and evaluated
// as is; anything further raises DomainError.
inline constexpr double kOutputTolerance = 1e-6;

// alpha + beta*p + gamma*p^2 + e*|sin(f*(p - p_min))|.
double unit_cost(const UnitParams& unit, double p);

// The two smooth pieces of the cost curve, each with first and second
// derivative in p. The valve term is e * |sine_value|.
struct CostParts {
  double quad_value;
  double quad_d1;
  double quad_d2;
  double sine_value;  // sin(f*(p - p_min))
  double sine_d1;
  double sine_d2;
};
CostParts unit_cost_smooth_parts(const UnitParams& unit, double p);

// Chord interpolant of unit_cost over breakpoints
// a_0 = p_min < a_1 < ... < a_L = p_max. Segment l (1-based, as in the
// tables the MILP is built from) spans [a_{l-1}, a_l] and costs
// slope[l-1]*p + intercept[l-1] there.
//
// A unit with p_min == p_max has L = 0: one breakpoint and no segments.
struct SegmentTable {
  int segments_per_half_period = 0;  // M
  std::vector<double> breakpoints;   // L + 1 entries
  std::vector<double> slopes;        // L entries
  std::vector<double> intercepts;    // L entries
  double fixed_cost = 0.0;           // c(p_min), meaningful when L == 0

  int num_segments() const { return static_cast<int>(slopes.size()); }
  // 0-based segment containing p; ties at interior breakpoints go to the
  // lower segment. Clamps outside the range.
  int SegmentOf(double p) const;
  double Evaluate(double p) const;
};

// L = ceil(M * f * (p_max - p_min) / pi), at least 1 for a non-fixed unit.
int segment_count(const UnitParams& unit, int segments_per_half_period);

// kSineAligned cuts every half period of the sine, [k*pi/f, (k+1)*pi/f]
// above p_min, into M equal pieces; the last segment ends at p_max and may
// be shorter. Breakpoints then include every zero of the sine, where the
// valve-point cusps sit. kUniform spreads the same L segments evenly over
// [p_min, p_max].
enum class BreakpointPlacement { kSineAligned, kUniform };

SegmentTable build_segments(
    const UnitParams& unit, int segments_per_half_period,
    BreakpointPlacement placement = BreakpointPlacement::kSineAligned);

// max |PWL(p) - c(p)| over a grid of 10*L + 1 uniformly spaced points.
double pwl_max_error(const UnitParams& unit, const SegmentTable& table);

// Sum over units and periods of unit_cost. Throws DomainError listing every
// (unit, period) whose output is out of range (1-based in the message).
double total_cost(const Instance& instance, const Schedule& schedule);

// Same sum over the chord interpolants.
double total_pwl_cost(const Instance& instance,
                      const std::vector<SegmentTable>& tables,
                      const Schedule& schedule);

}  // namespace dedvpe

#endif  // DEDVPE_COST_H_
