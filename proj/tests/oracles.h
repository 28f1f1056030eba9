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

// Independent reference computations shared by the unit tests and the
// acceptance binary. None of them calls the code path it checks.

#ifndef DEDVPE_TESTS_ORACLES_H_
#define DEDVPE_TESTS_ORACLES_H_

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "dedvpe/cost.h"
#include "dedvpe/lp_simplex.h"
#include "dedvpe/milp_builder.h"
#include "dedvpe/nlp_ipm.h"
#include "test_instances.h"

namespace dedvpe::testing {

// Minimum over all 2^B selector vectors of the LP with selectors fixed.
inline std::optional<double> EnumerationOracle(const MilpModel& model) {
  std::vector<int> binaries;
  for (int j = 0; j < model.lp.num_columns(); ++j) {
    if (model.lp.integer()[j]) binaries.push_back(j);
  }
  if (binaries.size() > 16) throw std::invalid_argument("too many binaries");
  std::optional<double> best;
  SparseLp lp = model.lp;
  for (unsigned mask = 0; mask < (1u << binaries.size()); ++mask) {
    for (size_t k = 0; k < binaries.size(); ++k) {
      const double v = (mask >> k) & 1u;
      lp.SetColumnBounds(binaries[k], v, v);
    }
    const LpSolution sol = solve_lp(lp);
    if (sol.status == LpStatus::kOptimal && (!best || sol.objective < *best)) {
      best = sol.objective;
    }
  }
  return best;
}

// Bounded LP with small integer data and a mix of row types.
inline SparseLp RandomLp(std::mt19937& rng, int rows, int cols) {
  std::uniform_real_distribution<double> coef(-5.0, 5.0);
  std::uniform_real_distribution<double> width(0.0, 6.0);
  std::uniform_int_distribution<int> kind(0, 5);
  SparseLp lp;
  for (int j = 0; j < cols; ++j) {
    const double lo = std::round(coef(rng));
    lp.AddColumn(lo, lo + std::round(width(rng)), std::round(coef(rng)), false,
                 "x" + std::to_string(j));
  }
  for (int i = 0; i < rows; ++i) {
    const double lo = std::round(coef(rng) * 2.0);
    double hi = lo + std::round(width(rng));
    double low = lo;
    switch (kind(rng)) {
      case 0:
        low = -kInfinity;
        break;
      case 1:
        hi = kInfinity;
        break;
      case 2:
        hi = lo;
        break;
      default:
        break;
    }
    const int r = lp.AddRow(low, hi, "r" + std::to_string(i));
    for (int j = 0; j < cols; ++j) {
      if (kind(rng) < 4) {
        const double v = std::round(coef(rng));
        if (v != 0.0) lp.AddCoefficient(r, j, v);
      }
    }
  }
  return lp;
}

struct WarmColdSummary {
  int trials = 0;           // LPs with an optimal root
  int compared = 0;         // child optimal in both solves
  int status_mismatches = 0;
  double max_difference = 0.0;  // |warm - cold| / (1 + |cold|)
};

// Draws random LPs until `trials` of them have an optimal root, tightens
// one column bound of each and compares the warm re-solve with a cold
// solve of the modified LP.
inline WarmColdSummary WarmColdTrials(std::mt19937& rng, int trials) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  WarmColdSummary out;
  for (int attempt = 0; out.trials < trials; ++attempt) {
    if (attempt > 100 * trials) throw std::runtime_error("too few optimal LPs");
    SparseLp lp = RandomLp(rng, 4, 6);
    const LpSolution root = solve_lp(lp);
    if (root.status != LpStatus::kOptimal) continue;
    const int trial = out.trials++;
    const int col = trial % lp.num_columns();
    const double lo = lp.col_lower()[col];
    const double hi = lp.col_upper()[col];
    const double cut = lo + std::floor(u(rng) * (hi - lo + 1));
    const double new_lo = trial % 2 ? cut : lo;
    const double new_hi = trial % 2 ? hi : cut;
    const LpSolution warm =
        reoptimize_after_bound_change(lp, root.basis, col, new_lo, new_hi);
    lp.SetColumnBounds(col, new_lo, new_hi);
    const LpSolution cold = solve_lp(lp);
    if (warm.status != cold.status) {
      ++out.status_mismatches;
      continue;
    }
    if (cold.status == LpStatus::kOptimal) {
      ++out.compared;
      out.max_difference =
          std::max(out.max_difference, std::abs(warm.objective - cold.objective) /
                                           (1 + std::abs(cold.objective)));
    }
  }
  return out;
}

// Random instance with a B-matrix and a small reserve requirement.
inline Instance WithLossAndReserve(std::mt19937& rng, int units, int periods) {
  Instance inst = RandomSmallInstance(rng, units, periods, 3);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  Eigen::MatrixXd b(units, units);
  for (int i = 0; i < units; ++i) {
    for (int j = 0; j <= i; ++j) {
      b(i, j) = b(j, i) = (i == j ? 2e-5 : 0.0) + 1e-5 * u(rng);
    }
  }
  inst.b_matrix = b;
  inst.reserve_req = std::vector<double>(periods, 5.0);
  inst.tau = 0.5;
  inst.reserve_enabled = true;
  return inst;
}

// Uniform point inside the variable box (finite stand-ins for infinite
// bounds) with random multipliers.
inline void RandomPoint(const NlpProblem& prob, std::mt19937& rng,
                        Eigen::VectorXd* x, Eigen::VectorXd* y) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  x->resize(prob.num_variables());
  for (int j = 0; j < prob.num_variables(); ++j) {
    double lo = prob.lower()[j];
    double hi = prob.upper()[j];
    if (!std::isfinite(lo)) lo = std::isfinite(hi) ? hi - 50.0 : -5.0;
    if (!std::isfinite(hi)) hi = lo + 50.0;
    (*x)[j] = lo + (hi - lo) * u(rng);
  }
  y->resize(prob.num_constraints());
  for (int r = 0; r < prob.num_constraints(); ++r) {
    (*y)[r] = 200.0 * (u(rng) - 0.5);
  }
}

inline double RelativeError(double analytic, double numeric) {
  return std::abs(analytic - numeric) /
         std::max({1.0, std::abs(analytic), std::abs(numeric)});
}

struct DerivativeErrors {
  double gradient = 0.0;
  double jacobian = 0.0;
  double hessian = 0.0;
  int points = 0;

  double max() const { return std::max({gradient, jacobian, hessian}); }
};

// Central differences (step h) of the objective, the constraints and the
// Lagrangian gradient at `points` random points.
inline DerivativeErrors CheckDerivatives(const NlpProblem& prob,
                                         std::mt19937& rng, int points,
                                         double h = 1e-5) {
  const int n = prob.num_variables();
  DerivativeErrors err;
  for (int trial = 0; trial < points; ++trial) {
    Eigen::VectorXd x, y;
    RandomPoint(prob, rng, &x, &y);
    const double obj_factor = 0.5 + std::uniform_real_distribution<>(0, 1)(rng);
    Eigen::VectorXd g;
    prob.Gradient(x, &g);
    const Eigen::MatrixXd jac = Eigen::MatrixXd(prob.Jacobian(x));
    const Eigen::MatrixXd hess =
        Eigen::MatrixXd(prob.LagrangianHessian(x, y, obj_factor));
    for (int j = 0; j < n; ++j) {
      Eigen::VectorXd xp = x, xm = x;
      xp[j] += h;
      xm[j] -= h;
      err.gradient = std::max(
          err.gradient,
          RelativeError(g[j], (prob.Objective(xp) - prob.Objective(xm)) / (2 * h)));
      Eigen::VectorXd cp, cm;
      prob.Constraints(xp, &cp);
      prob.Constraints(xm, &cm);
      const Eigen::VectorXd fd_c = (cp - cm) / (2 * h);
      for (int r = 0; r < fd_c.size(); ++r) {
        err.jacobian = std::max(err.jacobian, RelativeError(jac(r, j), fd_c[r]));
      }
      Eigen::VectorXd gp, gm;
      prob.Gradient(xp, &gp);
      prob.Gradient(xm, &gm);
      const Eigen::VectorXd lp =
          obj_factor * gp + Eigen::MatrixXd(prob.Jacobian(xp)).transpose() * y;
      const Eigen::VectorXd lm =
          obj_factor * gm + Eigen::MatrixXd(prob.Jacobian(xm)).transpose() * y;
      const Eigen::VectorXd fd_h = (lp - lm) / (2 * h);
      for (int k = 0; k < n; ++k) {
        err.hessian = std::max(err.hessian, RelativeError(hess(k, j), fd_h[k]));
      }
    }
    ++err.points;
  }
  return err;
}

// Smallest cost of one period of a 2-unit instance over a grid on unit 1's
// output, unit 2 covering the rest of the demand. Ramps are ignored.
struct GridOptimum {
  double cost = std::numeric_limits<double>::infinity();
  double p1 = 0.0;
};

inline GridOptimum GridSearch(const Instance& inst, int period, double step) {
  const UnitParams& a = inst.units[0];
  const UnitParams& b = inst.units[1];
  const double demand = inst.demand[period];
  GridOptimum best;
  const double lo = std::max(a.p_min, demand - b.p_max);
  const double hi = std::min(a.p_max, demand - b.p_min);
  const long steps = static_cast<long>(std::floor((hi - lo) / step));
  for (long k = 0; k <= steps + 1; ++k) {
    const double p1 = std::min(hi, lo + k * step);
    const double cost = unit_cost(a, p1) + unit_cost(b, demand - p1);
    if (cost < best.cost) best = {cost, p1};
  }
  return best;
}

// Bound on how much the 2-unit cost can change when unit 1 moves by d and
// unit 2 by -d: d times the sum of the two units' maximal slopes.
inline double CostLipschitz(const Instance& inst) {
  double sum = 0.0;
  for (const UnitParams& u : inst.units) {
    sum += u.beta + 2 * u.gamma * u.p_max + u.e * u.f;
  }
  return sum;
}

}  // namespace dedvpe::testing

#endif  // DEDVPE_TESTS_ORACLES_H_
