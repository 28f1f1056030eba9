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

// Smooth reformulation of the valve-point dispatch problem and a
// primal-dual interior-point solver for it.
//
// The nonsmooth term e*|sin(f(P - p_min))| is replaced by e*s with
//
//   s - u - v = 0,   sin(f(P - p_min)) + u - v = 0,   u, v >= 0,
//
// which forces s = |sin| at any minimizer when e > 0.
//
// Variables, per period t and unit i (period-major): P(i,t), s, u, v, and
// SR(i,t) with reserve. A unit with p_min == p_max has no P variable; its
// output is a constant. Inequalities become bounded slack variables:
//
//   w(i,t) = P(i,t) - P(i,t-1),        -DR <= w <= UR        (t >= 2)
//   q(i,t) = SR(i,t) + P(i,t),          q <= p_max            (reserve)
//   r(t)   = sum_i SR(i,t),             r >= R_t              (reserve)
//
// and the initial-output ramp window is folded into the bounds of P(i,1).
//
// Constraint rows c(x) = 0, in order:
//   balance  D_t + loss_t - sum_i P(i,t)           T rows
//   split    s - u - v                             N T rows
//   sine     sin(f(P - p_min)) + u - v             N T rows
//   ramp     P(i,t) - P(i,t-1) - w(i,t)            one per non-fixed unit, t >= 2
//   reserve  SR + P - q  (N T rows), sum SR - r  (T rows)
//
// The first 2 N T + T rows are the equalities of the model; the rest carry
// the inequality constraints through their slacks.

#ifndef DEDVPE_NLP_IPM_H_
#define DEDVPE_NLP_IPM_H_

#include <functional>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include "dedvpe/model.h"

namespace dedvpe {

class NlpProblem {
 public:
  // Throws ConfigError when include_loss is set and the instance has no
  // B-matrix, or reserve is set without reserve data.
  NlpProblem(const Instance& instance, bool include_loss, bool reserve);

  int num_variables() const { return static_cast<int>(lower_.size()); }
  int num_constraints() const { return num_rows_; }
  // Rows of the model's equalities: 2 N T + T.
  int num_equalities() const { return num_equalities_; }
  int num_inequalities() const { return num_rows_ - num_equalities_; }

  const Eigen::VectorXd& lower() const { return lower_; }
  const Eigen::VectorXd& upper() const { return upper_; }
  const Instance& instance() const { return instance_; }
  bool include_loss() const { return include_loss_; }
  bool reserve() const { return reserve_; }

  // Variable indices; -1 where the variable does not exist.
  int P(int unit, int period) const { return p_[Cell(unit, period)]; }
  int S(int unit, int period) const { return s_[Cell(unit, period)]; }
  int U(int unit, int period) const { return s_[Cell(unit, period)] + 1; }
  int V(int unit, int period) const { return s_[Cell(unit, period)] + 2; }
  int SR(int unit, int period) const {
    return reserve_ ? sr_[Cell(unit, period)] : -1;
  }
  int RampSlack(int unit, int period) const { return w_[Cell(unit, period)]; }
  int balance_row(int period) const { return period; }
  int split_row(int unit, int period) const;
  int sine_row(int unit, int period) const { return split_row(unit, period) + 1; }

  double Objective(const Eigen::VectorXd& x) const;
  void Gradient(const Eigen::VectorXd& x, Eigen::VectorXd* g) const;
  void Constraints(const Eigen::VectorXd& x, Eigen::VectorXd* c) const;
  // m x n.
  Eigen::SparseMatrix<double> Jacobian(const Eigen::VectorXd& x) const;
  // Full symmetric n x n Hessian of obj_factor * f + y^T c.
  Eigen::SparseMatrix<double> LagrangianHessian(const Eigen::VectorXd& x,
                                                const Eigen::VectorXd& y,
                                                double obj_factor) const;

  // Output of unit i in period t, constant for fixed units.
  double Output(const Eigen::VectorXd& x, int unit, int period) const;
  Schedule ToSchedule(const Eigen::VectorXd& x) const;

 private:
  int Cell(int unit, int period) const { return period * n_ + unit; }

  Instance instance_;
  bool include_loss_;
  bool reserve_;
  int n_;
  int t_;
  int num_rows_ = 0;
  int num_equalities_ = 0;
  Eigen::VectorXd lower_;
  Eigen::VectorXd upper_;
  std::vector<int> p_, s_, sr_, w_, q_;
  std::vector<int> r_;
  std::vector<int> ramp_row_;     // per cell, -1 when absent
  std::vector<int> reserve_row_;  // per cell (SR + P - q)
  std::vector<int> requirement_row_;  // per period
};

NlpProblem build_nlp(const Instance& instance, bool include_loss, bool reserve);

enum class BarrierStrategy { kMonotone, kAdaptive };

struct IpmConfig {
  BarrierStrategy strategy = BarrierStrategy::kMonotone;
  double initial_mu = 0.1;
  double mu_factor = 0.2;  // monotone: mu <- max(tol/10, min(0.2 mu, mu^1.5))
  double tol = 1e-8;       // scaled KKT error
  double compl_tol = 1e-8;
  int max_iterations = 3000;
  double fraction_to_boundary = 0.995;
  double slack_floor = 1e-3;
  std::function<void(int iter, double objective, double primal_inf,
                     double dual_inf, double mu)>
      callback;
};

enum class IpmStatus { kLocalOptimum, kMaxIterations, kRestorationFailure };
std::string ToString(IpmStatus status);

struct IpmResult {
  IpmStatus status = IpmStatus::kRestorationFailure;
  Schedule schedule;
  Eigen::MatrixXd s, u, v;  // N x T
  Eigen::VectorXd x;        // full primal vector
  Eigen::VectorXd y;        // constraint multipliers
  Eigen::VectorXd z_lower, z_upper;
  double objective = 0.0;   // model objective (cost with s for |sin|)
  double primal_infeasibility = 0.0;  // max |c(x)|
  double dual_infeasibility = 0.0;    // scaled, as used for termination
  double complementarity = 0.0;
  double mu = 0.0;
  int iterations = 0;
};

// Interior starting point from a schedule: outputs clipped at least
// slack_floor inside their bounds, u and v split from the sign of
// sin(f(P - p_min)), s = u + v, slacks from their defining rows.
Eigen::VectorXd initialize(const NlpProblem& problem, const Schedule& start,
                           double slack_floor);

IpmResult solve_nlp(const NlpProblem& problem, const Schedule& start,
                    const IpmConfig& config = {});

}  // namespace dedvpe

#endif  // DEDVPE_NLP_IPM_H_
