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

#include "dedvpe/feasibility.h"

#include <algorithm>
#include <cmath>

#include "dedvpe/errors.h"

namespace dedvpe {

double transmission_loss(const Instance& instance,
                         const Eigen::Ref<const Eigen::VectorXd>& outputs) {
  if (!instance.b_matrix) {
    throw ConfigError("transmission loss requested but no B-matrix given");
  }
  const Eigen::MatrixXd& b = *instance.b_matrix;
  const int n = static_cast<int>(outputs.size());
  double loss = 0.0;
  for (int i = 0; i < n; ++i) {
    double row = 0.0;
    for (int j = 0; j < n; ++j) row += b(i, j) * outputs[j];
    loss += outputs[i] * row;
  }
  return loss;
}

std::vector<double> period_losses(const Instance& instance,
                                  const Schedule& schedule) {
  check_dimensions(instance, schedule);
  std::vector<double> loss(schedule.num_periods(), 0.0);
  if (!instance.b_matrix) return loss;
  for (int t = 0; t < schedule.num_periods(); ++t) {
    loss[t] = transmission_loss(instance, schedule.outputs.col(t));
  }
  return loss;
}

std::vector<double> balance_violation(const Instance& instance,
                                      const Schedule& schedule) {
  const std::vector<double> loss = period_losses(instance, schedule);
  std::vector<double> out(schedule.num_periods());
  for (int t = 0; t < schedule.num_periods(); ++t) {
    double generation = 0.0;
    for (int i = 0; i < schedule.num_units(); ++i) generation += schedule(i, t);
    out[t] = std::abs(generation - instance.demand[t] - loss[t]);
  }
  return out;
}

double reserve_capability(const UnitParams& unit, double p, double tau) {
  return std::max(0.0, std::min(unit.p_max - p, tau * unit.ramp_up));
}

AuditReport audit(const Instance& instance, const Schedule& schedule,
                  const Tolerances& tol) {
  check_dimensions(instance, schedule);
  const int n = instance.num_units();
  const int periods = instance.num_periods();
  AuditReport report;
  report.loss = period_losses(instance, schedule);
  report.balance_violation.resize(periods);
  report.reserve_shortfall.assign(periods, 0.0);

  for (int t = 0; t < periods; ++t) {
    double generation = 0.0;
    for (int i = 0; i < n; ++i) generation += schedule(i, t);
    report.balance_violation[t] =
        std::abs(generation - instance.demand[t] - report.loss[t]);
    report.max_balance_violation =
        std::max(report.max_balance_violation, report.balance_violation[t]);
  }

  for (int t = 0; t < periods; ++t) {
    for (int i = 0; i < n; ++i) {
      const UnitParams& u = instance.units[i];
      const double p = schedule(i, t);
      if (p > u.p_max) {
        report.bound_violations.push_back({i, t, p - u.p_max});
      } else if (p < u.p_min) {
        report.bound_violations.push_back({i, t, p - u.p_min});
      }

      std::optional<double> prev;
      if (t > 0) {
        prev = schedule(i, t - 1);
      } else if (u.initial_output) {
        prev = u.initial_output;
      }
      if (prev) {
        const double step = p - *prev;
        if (step > u.ramp_up) {
          report.ramp_violations.push_back({i, t, step - u.ramp_up});
        } else if (-step > u.ramp_down) {
          report.ramp_violations.push_back({i, t, step + u.ramp_down});
        }
      }
    }
  }
  for (const LimitViolation& v : report.bound_violations) {
    report.max_bound_violation =
        std::max(report.max_bound_violation, std::abs(v.amount));
  }
  for (const LimitViolation& v : report.ramp_violations) {
    report.max_ramp_violation =
        std::max(report.max_ramp_violation, std::abs(v.amount));
  }

  if (instance.reserve_enabled && instance.reserve_req) {
    for (int t = 0; t < periods; ++t) {
      double available = 0.0;
      for (int i = 0; i < n; ++i) {
        available +=
            reserve_capability(instance.units[i], schedule(i, t), instance.tau);
      }
      const double shortfall =
          std::max(0.0, (*instance.reserve_req)[t] - available);
      report.reserve_shortfall[t] = shortfall;
      report.max_reserve_shortfall =
          std::max(report.max_reserve_shortfall, shortfall);
    }
  }

  report.pass = report.max_balance_violation <= tol.balance &&
                report.max_bound_violation <= tol.bounds &&
                report.max_ramp_violation <= tol.ramps &&
                report.max_reserve_shortfall <= tol.reserve;
  return report;
}

}  // namespace dedvpe
