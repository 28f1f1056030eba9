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

#include "dedvpe/model.h"

#include <cmath>
#include <sstream>

#include "dedvpe/errors.h"

namespace dedvpe {
namespace {

constexpr double kSymmetryTol = 1e-12;

std::string UnitLabel(int i) { return "unit " + std::to_string(i + 1); }

void CheckUnit(const UnitParams& u, int i, std::vector<std::string>& out) {
  const std::string who = UnitLabel(i);
  const struct {
    const char* name;
    double value;
  } nonneg[] = {{"alpha", u.alpha}, {"beta", u.beta},       {"gamma", u.gamma},
                {"e", u.e},         {"f", u.f},             {"ramp_up", u.ramp_up},
                {"ramp_down", u.ramp_down}};
  for (const auto& field : nonneg) {
    if (!std::isfinite(field.value)) {
      out.push_back(who + ": " + field.name + " is not finite");
    } else if (field.value < 0.0) {
      out.push_back(who + ": " + field.name + " must be >= 0");
    }
  }
  if (!std::isfinite(u.p_min) || !std::isfinite(u.p_max)) {
    out.push_back(who + ": p_min/p_max must be finite");
  } else if (u.p_min > u.p_max) {
    out.push_back(who + ": p_min > p_max");
  }
  if (u.initial_output) {
    const double p0 = *u.initial_output;
    if (!std::isfinite(p0) || p0 < u.p_min || p0 > u.p_max) {
      out.push_back(who + ": initial_output outside [p_min, p_max]");
    }
  }
}

}  // namespace

std::vector<std::string> validate(const Instance& instance) {
  std::vector<std::string> out;
  const int n = instance.num_units();
  const int periods = instance.num_periods();
  if (n < 1) out.push_back("units: at least one unit is required");
  if (periods < 1) out.push_back("demand: at least one period is required");
  for (int i = 0; i < n; ++i) CheckUnit(instance.units[i], i, out);
  for (int t = 0; t < periods; ++t) {
    const double d = instance.demand[t];
    if (!std::isfinite(d) || d <= 0.0) {
      out.push_back("demand: period " + std::to_string(t + 1) +
                    " must be > 0");
    }
  }
  if (instance.b_matrix) {
    const Eigen::MatrixXd& b = *instance.b_matrix;
    if (b.rows() != n || b.cols() != n) {
      std::ostringstream msg;
      msg << "b_matrix: expected " << n << "x" << n << ", got " << b.rows()
          << "x" << b.cols();
      out.push_back(msg.str());
    } else {
      for (int i = 0; i < n; ++i) {
        for (int j = i + 1; j < n; ++j) {
          if (!(std::abs(b(i, j) - b(j, i)) <= kSymmetryTol)) {
            out.push_back("b_matrix: entry (" + std::to_string(i + 1) + "," +
                          std::to_string(j + 1) + ") differs from (" +
                          std::to_string(j + 1) + "," + std::to_string(i + 1) +
                          ")");
          }
        }
      }
      if (!b.allFinite()) out.push_back("b_matrix: non-finite entry");
    }
  }
  if (instance.reserve_req &&
      static_cast<int>(instance.reserve_req->size()) != periods) {
    out.push_back("reserve: expected one requirement per period");
  }
  if (instance.reserve_enabled) {
    if (!instance.reserve_req) {
      out.push_back("reserve: enabled but no requirements given");
    }
    if (!(instance.tau > 0.0)) {
      out.push_back("reserve: tau must be > 0 when reserve is enabled");
    }
  }
  return out;
}

bool feasible_region_nonempty(const Instance& instance) {
  double sum_min = 0.0;
  double sum_max = 0.0;
  for (const UnitParams& u : instance.units) {
    sum_min += u.p_min;
    sum_max += u.p_max;
  }
  for (double d : instance.demand) {
    if (d < sum_min || d > sum_max) return false;
  }
  return true;
}

void check_dimensions(const Instance& instance, const Schedule& schedule) {
  if (schedule.num_units() != instance.num_units() ||
      schedule.num_periods() != instance.num_periods()) {
    std::ostringstream msg;
    msg << "schedule is " << schedule.num_units() << "x"
        << schedule.num_periods() << " but instance has "
        << instance.num_units() << " units and " << instance.num_periods()
        << " periods";
    throw DomainError(msg.str());
  }
}

}  // namespace dedvpe
