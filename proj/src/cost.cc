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

#include "dedvpe/cost.h"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>
#include <stdexcept>

#include "dedvpe/errors.h"

namespace dedvpe {
namespace {

void CheckRange(const UnitParams& unit, double p) {
  if (!(p >= unit.p_min - kOutputTolerance &&
        p <= unit.p_max + kOutputTolerance)) {
    std::ostringstream msg;
    msg << "output " << p << " outside [" << unit.p_min << ", " << unit.p_max
        << "]";
    throw DomainError(msg.str());
  }
}

double UncheckedCost(const UnitParams& u, double p) {
  return u.alpha + u.beta * p + u.gamma * p * p +
         u.e * std::abs(std::sin(u.f * (p - u.p_min)));
}

}  // namespace

double unit_cost(const UnitParams& unit, double p) {
  CheckRange(unit, p);
  return UncheckedCost(unit, p);
}

CostParts unit_cost_smooth_parts(const UnitParams& unit, double p) {
  CheckRange(unit, p);
  const double angle = unit.f * (p - unit.p_min);
  const double s = std::sin(angle);
  const double c = std::cos(angle);
  CostParts parts;
  parts.quad_value = unit.alpha + unit.beta * p + unit.gamma * p * p;
  parts.quad_d1 = unit.beta + 2.0 * unit.gamma * p;
  parts.quad_d2 = 2.0 * unit.gamma;
  parts.sine_value = s;
  parts.sine_d1 = unit.f * c;
  parts.sine_d2 = -unit.f * unit.f * s;
  return parts;
}

int SegmentTable::SegmentOf(double p) const {
  const int segments = num_segments();
  if (segments == 0) return -1;
  // First breakpoint >= p, among a_1..a_{L-1}.
  auto it = std::lower_bound(breakpoints.begin() + 1, breakpoints.end() - 1, p);
  return static_cast<int>(it - (breakpoints.begin() + 1));
}

double SegmentTable::Evaluate(double p) const {
  if (num_segments() == 0) return fixed_cost;
  const int l = SegmentOf(p);
  return slopes[l] * p + intercepts[l];
}

int segment_count(const UnitParams& unit, int segments_per_half_period) {
  if (segments_per_half_period < 1) {
    throw std::invalid_argument("segments per half-period must be >= 1");
  }
  if (unit.fixed()) return 0;
  const double x = segments_per_half_period * unit.f * unit.range() /
                   std::numbers::pi;
  // Values that are integral up to rounding (a range spanning whole
  // half-periods) must not pick up an extra segment.
  const double count = std::ceil(x - 1e-9 * std::max(1.0, x));
  return std::max(1, static_cast<int>(count));
}

SegmentTable build_segments(const UnitParams& unit,
                            int segments_per_half_period,
                            BreakpointPlacement placement) {
  SegmentTable table;
  table.segments_per_half_period = segments_per_half_period;
  const int segments = segment_count(unit, segments_per_half_period);
  if (segments == 0) {
    table.breakpoints = {unit.p_min};
    table.fixed_cost = UncheckedCost(unit, unit.p_min);
    return table;
  }
  if (unit.p_min > unit.p_max) {
    throw DomainError("build_segments: p_min > p_max");
  }
  table.breakpoints.resize(segments + 1);
  double width = unit.range() / segments;
  if (placement == BreakpointPlacement::kSineAligned && unit.f > 0.0) {
    width = std::numbers::pi / (segments_per_half_period * unit.f);
  }
  for (int l = 0; l < segments; ++l) {
    table.breakpoints[l] = unit.p_min + l * width;
  }
  table.breakpoints[segments] = unit.p_max;

  table.slopes.resize(segments);
  table.intercepts.resize(segments);
  double prev_cost = UncheckedCost(unit, table.breakpoints[0]);
  for (int l = 1; l <= segments; ++l) {
    const double lo = table.breakpoints[l - 1];
    const double hi = table.breakpoints[l];
    const double cost = UncheckedCost(unit, hi);
    const double slope = (cost - prev_cost) / (hi - lo);
    table.slopes[l - 1] = slope;
    table.intercepts[l - 1] = prev_cost - slope * lo;
    prev_cost = cost;
  }
  table.fixed_cost = UncheckedCost(unit, unit.p_min);
  return table;
}

double pwl_max_error(const UnitParams& unit, const SegmentTable& table) {
  const int segments = table.num_segments();
  if (segments == 0) return 0.0;
  const int points = 10 * segments;
  double worst = 0.0;
  for (int k = 0; k <= points; ++k) {
    const double p =
        k == points ? unit.p_max : unit.p_min + unit.range() * k / points;
    worst = std::max(worst, std::abs(table.Evaluate(p) - UncheckedCost(unit, p)));
  }
  return worst;
}

double total_cost(const Instance& instance, const Schedule& schedule) {
  check_dimensions(instance, schedule);
  double sum = 0.0;
  std::ostringstream bad;
  int bad_count = 0;
  for (int t = 0; t < schedule.num_periods(); ++t) {
    for (int i = 0; i < schedule.num_units(); ++i) {
      const UnitParams& u = instance.units[i];
      const double p = schedule(i, t);
      if (!(p >= u.p_min - kOutputTolerance &&
            p <= u.p_max + kOutputTolerance)) {
        bad << (bad_count++ ? ", " : "") << "(" << i + 1 << "," << t + 1
            << ")";
        continue;
      }
      sum += UncheckedCost(u, p);
    }
  }
  if (bad_count > 0) {
    throw DomainError("outputs out of range at (unit,period): " + bad.str());
  }
  return sum;
}

double total_pwl_cost(const Instance& instance,
                      const std::vector<SegmentTable>& tables,
                      const Schedule& schedule) {
  check_dimensions(instance, schedule);
  double sum = 0.0;
  for (int t = 0; t < schedule.num_periods(); ++t) {
    for (int i = 0; i < schedule.num_units(); ++i) {
      sum += tables[i].Evaluate(schedule(i, t));
    }
  }
  return sum;
}

}  // namespace dedvpe
