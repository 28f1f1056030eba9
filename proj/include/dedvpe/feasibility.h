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

// Schedule auditing: B-matrix losses, power-balance residuals, limits,
// ramps and spinning reserve.

#ifndef DEDVPE_FEASIBILITY_H_
#define DEDVPE_FEASIBILITY_H_

#include <vector>

#include <Eigen/Dense>

#include "dedvpe/model.h"

namespace dedvpe {

struct Tolerances {
  double balance = 1e-5;  // MW
  double bounds = 1e-6;   // MW
  double ramps = 1e-6;    // MW
  double reserve = 1e-6;  // MW

  static Tolerances Uniform(double tol) { return {tol, tol, tol, tol}; }
};

// Signed excess in MW: positive above an upper limit (p_max, ramp-up),
// negative below a lower limit (p_min, ramp-down). Indices are 0-based.
struct LimitViolation {
  int unit;
  int period;
  double amount;
};

struct AuditReport {
  std::vector<double> loss;               // per period, MW
  std::vector<double> balance_violation;  // per period |sum P - D - loss|
  std::vector<LimitViolation> bound_violations;
  std::vector<LimitViolation> ramp_violations;
  std::vector<double> reserve_shortfall;  // per period, 0 when disabled
  double max_balance_violation = 0.0;
  double max_bound_violation = 0.0;
  double max_ramp_violation = 0.0;
  double max_reserve_shortfall = 0.0;
  bool pass = false;
};

// sum_i sum_j P_i B_ij P_j for one period. Throws ConfigError when the
// instance has no B-matrix.
double transmission_loss(const Instance& instance,
                         const Eigen::Ref<const Eigen::VectorXd>& outputs);

// Per-period loss; all zeros when the instance has no B-matrix.
std::vector<double> period_losses(const Instance& instance,
                                  const Schedule& schedule);

// |sum_i P(i,t) - D_t - loss_t| for every period (loss 0 without B).
std::vector<double> balance_violation(const Instance& instance,
                                      const Schedule& schedule);

// Full check. Limit and ramp lists hold every strictly positive violation;
// `pass` compares the maxima against `tol`. Reserve is checked only when
// instance.reserve_enabled.
AuditReport audit(const Instance& instance, const Schedule& schedule,
                  const Tolerances& tol = {});

// Reserve a unit can offer at output p: min(p_max - p, tau * UR), >= 0.
double reserve_capability(const UnitParams& unit, double p, double tau);

}  // namespace dedvpe

#endif  // DEDVPE_FEASIBILITY_H_
