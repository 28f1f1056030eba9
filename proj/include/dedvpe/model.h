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

// Problem data for dynamic economic dispatch with valve-point loading.
//
// Indices are 0-based in code. Files and reports print them 1-based, the
// way dispatch tables are usually written.

#ifndef DEDVPE_MODEL_H_
#define DEDVPE_MODEL_H_

#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace dedvpe {

// Cost curve, limits and ramp rates of one thermal unit. Cost in $ per
// period for output p in MW:
//   alpha + beta*p + gamma*p^2 + e*|sin(f*(p - p_min))|
struct UnitParams {
  double alpha = 0.0;
  double beta = 0.0;
  double gamma = 0.0;
  double e = 0.0;  // valve-point amplitude, $
  double f = 0.0;  // valve-point frequency, rad/MW
  double p_min = 0.0;
  double p_max = 0.0;
  double ramp_up = 0.0;
  // Magnitude of the permitted per-period decrease (stored >= 0).
  double ramp_down = 0.0;
  // Output before the first period. When absent no ramp limit applies to
  // the first period.
  std::optional<double> initial_output;

  double range() const { return p_max - p_min; }
  bool fixed() const { return p_max == p_min; }
};

struct Instance {
  std::vector<UnitParams> units;
  std::vector<double> demand;  // MW, one entry per period
  std::optional<Eigen::MatrixXd> b_matrix;  // symmetric, 1/MW
  std::optional<std::vector<double>> reserve_req;  // MW, one per period
  double tau = 0.0;  // reserve delivery time as a fraction of a period
  bool reserve_enabled = false;

  int num_units() const { return static_cast<int>(units.size()); }
  int num_periods() const { return static_cast<int>(demand.size()); }
  bool has_loss() const { return b_matrix.has_value(); }
};

// Generator outputs P(i,t): rows are units, columns are periods. Losses,
// balance residuals and cost are derived on demand (see cost.h and
// feasibility.h) so a schedule never carries stale numbers.
struct Schedule {
  Eigen::MatrixXd outputs;

  Schedule() = default;
  explicit Schedule(Eigen::MatrixXd p) : outputs(std::move(p)) {}
  Schedule(int num_units, int num_periods)
      : outputs(Eigen::MatrixXd::Zero(num_units, num_periods)) {}

  int num_units() const { return static_cast<int>(outputs.rows()); }
  int num_periods() const { return static_cast<int>(outputs.cols()); }
  double operator()(int unit, int period) const {
    return outputs(unit, period);
  }
  double& operator()(int unit, int period) { return outputs(unit, period); }
};

// Every violated invariant, one human-readable entry each. Empty means
// the instance is well formed.
std::vector<std::string> validate(const Instance& instance);

// Cheap necessary condition: sum of p_min <= D_t <= sum of p_max for every
// period. Ignores loss and ramps.
bool feasible_region_nonempty(const Instance& instance);

// Throws DomainError when the schedule's shape does not match.
void check_dimensions(const Instance& instance, const Schedule& schedule);

}  // namespace dedvpe

#endif  // DEDVPE_MODEL_H_
