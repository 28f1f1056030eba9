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

#include "dedvpe/nlp_ipm.h"

#include <algorithm>
#include <cmath>
#include <limits>

#include <Eigen/SparseCholesky>

#include "dedvpe/errors.h"

namespace dedvpe {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

using Triplet = Eigen::Triplet<double>;
using SpMat = Eigen::SparseMatrix<double>;

}  // namespace

NlpProblem::NlpProblem(const Instance& instance, bool include_loss,
                       bool reserve)
    : instance_(instance),
      include_loss_(include_loss),
      reserve_(reserve),
      n_(instance.num_units()),
      t_(instance.num_periods()) {
  if (include_loss && !instance.has_loss()) {
    throw ConfigError("loss requested but the instance has no B-matrix");
  }
  if (reserve && !instance.reserve_req.has_value()) {
    throw ConfigError("reserve requested but the instance has no reserve data");
  }
  const int cells = n_ * t_;
  p_.assign(cells, -1);
  s_.assign(cells, -1);
  sr_.assign(cells, -1);
  w_.assign(cells, -1);
  q_.assign(cells, -1);
  r_.assign(t_, -1);
  ramp_row_.assign(cells, -1);
  reserve_row_.assign(cells, -1);
  requirement_row_.assign(t_, -1);

  std::vector<double> lo, hi;
  auto add = [&](double l, double h) {
    lo.push_back(l);
    hi.push_back(h);
    return static_cast<int>(lo.size()) - 1;
  };
  for (int t = 0; t < t_; ++t) {
    for (int i = 0; i < n_; ++i) {
      const UnitParams& u = instance.units[i];
      const int c = Cell(i, t);
      if (!u.fixed()) {
        double l = u.p_min;
        double h = u.p_max;
        if (t == 0 && u.initial_output.has_value()) {
          l = std::max(l, *u.initial_output - u.ramp_down);
          h = std::min(h, *u.initial_output + u.ramp_up);
          if (l > h) {
            throw BuildError("unit " + std::to_string(i + 1) +
                             ": initial ramp window misses [p_min, p_max]");
          }
        }
        p_[c] = add(l, h);
      }
      s_[c] = add(-kInf, kInf);
      add(0.0, kInf);
      add(0.0, kInf);
      if (reserve_) sr_[c] = add(0.0, instance.tau * u.ramp_up);
    }
  }
  for (int t = 1; t < t_; ++t) {
    for (int i = 0; i < n_; ++i) {
      const UnitParams& u = instance.units[i];
      if (u.fixed()) continue;
      w_[Cell(i, t)] = add(-u.ramp_down, u.ramp_up);
    }
  }
  if (reserve_) {
    for (int t = 0; t < t_; ++t) {
      for (int i = 0; i < n_; ++i) {
        q_[Cell(i, t)] = add(-kInf, instance.units[i].p_max);
      }
    }
    for (int t = 0; t < t_; ++t) {
      r_[t] = add((*instance.reserve_req)[t], kInf);
    }
  }
  lower_ = Eigen::Map<Eigen::VectorXd>(lo.data(), lo.size());
  upper_ = Eigen::Map<Eigen::VectorXd>(hi.data(), hi.size());

  int row = t_ + 2 * cells;
  num_equalities_ = row;
  for (int t = 1; t < t_; ++t) {
    for (int i = 0; i < n_; ++i) {
      if (w_[Cell(i, t)] >= 0) ramp_row_[Cell(i, t)] = row++;
    }
  }
  if (reserve_) {
    for (int c = 0; c < cells; ++c) reserve_row_[c] = row++;
    for (int t = 0; t < t_; ++t) requirement_row_[t] = row++;
  }
  num_rows_ = row;
}

NlpProblem build_nlp(const Instance& instance, bool include_loss,
                     bool reserve) {
  return NlpProblem(instance, include_loss, reserve);
}

int NlpProblem::split_row(int unit, int period) const {
  return t_ + 2 * Cell(unit, period);
}

double NlpProblem::Output(const Eigen::VectorXd& x, int unit,
                          int period) const {
  const int j = p_[Cell(unit, period)];
  return j >= 0 ? x[j] : instance_.units[unit].p_min;
}

Schedule NlpProblem::ToSchedule(const Eigen::VectorXd& x) const {
  Schedule sched(n_, t_);
  for (int t = 0; t < t_; ++t) {
    for (int i = 0; i < n_; ++i) sched(i, t) = Output(x, i, t);
  }
  return sched;
}

double NlpProblem::Objective(const Eigen::VectorXd& x) const {
  double total = 0.0;
  for (int t = 0; t < t_; ++t) {
    for (int i = 0; i < n_; ++i) {
      const UnitParams& u = instance_.units[i];
      const double p = Output(x, i, t);
      total += u.alpha + u.beta * p + u.gamma * p * p + u.e * x[S(i, t)];
    }
  }
  return total;
}

void NlpProblem::Gradient(const Eigen::VectorXd& x, Eigen::VectorXd* g) const {
  g->setZero(num_variables());
  for (int t = 0; t < t_; ++t) {
    for (int i = 0; i < n_; ++i) {
      const UnitParams& u = instance_.units[i];
      const int j = P(i, t);
      if (j >= 0) (*g)[j] = u.beta + 2.0 * u.gamma * x[j];
      (*g)[S(i, t)] = u.e;
    }
  }
}

void NlpProblem::Constraints(const Eigen::VectorXd& x,
                             Eigen::VectorXd* c) const {
  c->setZero(num_rows_);
  Eigen::VectorXd p(n_);
  for (int t = 0; t < t_; ++t) {
    for (int i = 0; i < n_; ++i) p[i] = Output(x, i, t);
    double balance = instance_.demand[t] - p.sum();
    if (include_loss_) balance += p.dot(*instance_.b_matrix * p);
    (*c)[balance_row(t)] = balance;
    for (int i = 0; i < n_; ++i) {
      const UnitParams& u = instance_.units[i];
      const int split = split_row(i, t);
      (*c)[split] = x[S(i, t)] - x[U(i, t)] - x[V(i, t)];
      (*c)[split + 1] =
          std::sin(u.f * (p[i] - u.p_min)) + x[U(i, t)] - x[V(i, t)];
      const int c_idx = Cell(i, t);
      if (ramp_row_[c_idx] >= 0) {
        (*c)[ramp_row_[c_idx]] =
            x[P(i, t)] - x[P(i, t - 1)] - x[w_[c_idx]];
      }
      if (reserve_) {
        (*c)[reserve_row_[c_idx]] = x[sr_[c_idx]] + p[i] - x[q_[c_idx]];
      }
    }
    if (reserve_) {
      double sum = 0.0;
      for (int i = 0; i < n_; ++i) sum += x[SR(i, t)];
      (*c)[requirement_row_[t]] = sum - x[r_[t]];
    }
  }
}

SpMat NlpProblem::Jacobian(const Eigen::VectorXd& x) const {
  std::vector<Triplet> trip;
  trip.reserve(static_cast<size_t>(n_) * t_ * 12);
  Eigen::VectorXd p(n_);
  for (int t = 0; t < t_; ++t) {
    for (int i = 0; i < n_; ++i) p[i] = Output(x, i, t);
    Eigen::VectorXd bp;
    if (include_loss_) bp = *instance_.b_matrix * p;
    for (int i = 0; i < n_; ++i) {
      const UnitParams& u = instance_.units[i];
      const int j = P(i, t);
      const int c_idx = Cell(i, t);
      if (j >= 0) {
        double d = -1.0;
        if (include_loss_) d += 2.0 * bp[i];
        trip.emplace_back(balance_row(t), j, d);
      }
      const int split = split_row(i, t);
      trip.emplace_back(split, S(i, t), 1.0);
      trip.emplace_back(split, U(i, t), -1.0);
      trip.emplace_back(split, V(i, t), -1.0);
      if (j >= 0) {
        trip.emplace_back(split + 1, j,
                          u.f * std::cos(u.f * (p[i] - u.p_min)));
      }
      trip.emplace_back(split + 1, U(i, t), 1.0);
      trip.emplace_back(split + 1, V(i, t), -1.0);
      if (ramp_row_[c_idx] >= 0) {
        trip.emplace_back(ramp_row_[c_idx], j, 1.0);
        trip.emplace_back(ramp_row_[c_idx], P(i, t - 1), -1.0);
        trip.emplace_back(ramp_row_[c_idx], w_[c_idx], -1.0);
      }
      if (reserve_) {
        trip.emplace_back(reserve_row_[c_idx], sr_[c_idx], 1.0);
        if (j >= 0) trip.emplace_back(reserve_row_[c_idx], j, 1.0);
        trip.emplace_back(reserve_row_[c_idx], q_[c_idx], -1.0);
        trip.emplace_back(requirement_row_[t], sr_[c_idx], 1.0);
      }
    }
    if (reserve_) trip.emplace_back(requirement_row_[t], r_[t], -1.0);
  }
  SpMat jac(num_rows_, num_variables());
  jac.setFromTriplets(trip.begin(), trip.end());
  return jac;
}

SpMat NlpProblem::LagrangianHessian(const Eigen::VectorXd& x,
                                    const Eigen::VectorXd& y,
                                    double obj_factor) const {
  std::vector<Triplet> trip;
  for (int t = 0; t < t_; ++t) {
    for (int i = 0; i < n_; ++i) {
      const UnitParams& u = instance_.units[i];
      const int j = P(i, t);
      if (j < 0) continue;
      const double arg = u.f * (x[j] - u.p_min);
      const double h = obj_factor * 2.0 * u.gamma -
                       y[sine_row(i, t)] * u.f * u.f * std::sin(arg);
      trip.emplace_back(j, j, h);
      if (include_loss_) {
        const double yb = y[balance_row(t)];
        for (int k = 0; k < n_; ++k) {
          const int jk = P(k, t);
          if (jk < 0) continue;
          trip.emplace_back(j, jk, 2.0 * yb * (*instance_.b_matrix)(i, k));
        }
      }
    }
  }
  SpMat hess(num_variables(), num_variables());
  hess.setFromTriplets(trip.begin(), trip.end());
  return hess;
}

std::string ToString(IpmStatus status) {
  switch (status) {
    case IpmStatus::kLocalOptimum:
      return "local-optimum";
    case IpmStatus::kMaxIterations:
      return "max-iterations";
    case IpmStatus::kRestorationFailure:
      return "restoration-failure";
  }
  return "unknown";
}

Eigen::VectorXd initialize(const NlpProblem& problem, const Schedule& start,
                           double slack_floor) {
  const Instance& inst = problem.instance();
  check_dimensions(inst, start);
  const int n = inst.num_units();
  const int periods = inst.num_periods();
  const Eigen::VectorXd& lo = problem.lower();
  const Eigen::VectorXd& hi = problem.upper();
  auto inward = [&](int j, double value) {
    const double room = std::min(slack_floor, 0.5 * (hi[j] - lo[j]));
    return std::clamp(value, lo[j] + room, hi[j] - room);
  };

  Eigen::VectorXd x = Eigen::VectorXd::Zero(problem.num_variables());
  for (int t = 0; t < periods; ++t) {
    for (int i = 0; i < n; ++i) {
      const int j = problem.P(i, t);
      if (j >= 0) x[j] = inward(j, start(i, t));
    }
  }
  for (int t = 0; t < periods; ++t) {
    double reserve_sum = 0.0;
    for (int i = 0; i < n; ++i) {
      const UnitParams& u = inst.units[i];
      const double p = problem.Output(x, i, t);
      const double sine = std::sin(u.f * (p - u.p_min));
      double uu, vv;
      if (sine >= 0.0) {
        vv = sine + slack_floor;
        uu = slack_floor;
      } else {
        uu = -sine + slack_floor;
        vv = slack_floor;
      }
      x[problem.U(i, t)] = uu;
      x[problem.V(i, t)] = vv;
      x[problem.S(i, t)] = uu + vv;
      if (t > 0 && problem.RampSlack(i, t) >= 0) {
        const int w = problem.RampSlack(i, t);
        x[w] = inward(w, x[problem.P(i, t)] - x[problem.P(i, t - 1)]);
      }
      if (problem.reserve()) {
        const int sr = problem.SR(i, t);
        x[sr] = inward(sr, std::min(u.p_max - p, hi[sr]) - slack_floor);
        reserve_sum += x[sr];
      }
    }
    if (problem.reserve()) {
      const int first_q = problem.num_variables() - periods - n * periods;
      for (int i = 0; i < n; ++i) {
        const int q = first_q + t * n + i;
        x[q] = inward(q, x[problem.SR(i, t)] + problem.Output(x, i, t));
      }
      const int r = problem.num_variables() - periods + t;
      x[r] = inward(r, reserve_sum);
    }
  }
  return x;
}

namespace {

// Primal-dual barrier iteration in the style of line-search filter codes,
// with an l1 merit function in place of the filter.
class Ipm {
 public:
  Ipm(const NlpProblem& problem, const IpmConfig& config)
      : prob_(problem), cfg_(config) {}

  IpmResult Run(const Schedule& start);

 private:
  struct Eval {
    Eigen::VectorXd g;  // scaled objective gradient
    Eigen::VectorXd c;
    SpMat jac;          // m x nf, free columns only
    double f = 0.0;     // scaled objective
  };

  void Setup();
  void Evaluate(const Eigen::VectorXd& x, Eval* ev, bool with_jac) const;
  SpMat Restrict(const SpMat& jac) const;
  // max(|dual|/s_d, |c|, |compl - mu|/s_c)
  double KktError(const Eval& ev, double mu, double* primal, double* dual,
                  double* compl_err) const;
  Eigen::VectorXd DualResidual(const Eval& ev) const;
  double Barrier(const Eigen::VectorXd& x) const;
  double Merit(const Eigen::VectorXd& x, const Eval& ev, double mu) const;
  bool Factor(const SpMat& w, const Eigen::VectorXd& sigma, const SpMat& jac);
  Eigen::VectorXd Solve(const Eigen::VectorXd& rhs) const;
  void LeastSquaresMultipliers(const Eval& ev);

  const NlpProblem& prob_;
  const IpmConfig& cfg_;
  int n_ = 0;
  int m_ = 0;
  int nf_ = 0;
  std::vector<int> free_;    // free variable -> problem index
  std::vector<int> to_free_;  // problem index -> free index or -1
  std::vector<char> has_lo_, has_hi_;
  Eigen::VectorXd lo_, hi_;
  double obj_scale_ = 1.0;

  Eigen::VectorXd x_;    // full
  Eigen::VectorXd y_;    // m
  Eigen::VectorXd zl_;   // nf, zero where no bound
  Eigen::VectorXd zu_;

  SpMat kkt_;
  Eigen::SimplicialLDLT<SpMat, Eigen::Lower, Eigen::AMDOrdering<int>> ldlt_;
  double delta_w_last_ = 0.0;
  double delta_c_ = 1e-9;
};

void Ipm::Setup() {
  n_ = prob_.num_variables();
  m_ = prob_.num_constraints();
  to_free_.assign(n_, -1);
  free_.clear();
  for (int j = 0; j < n_; ++j) {
    if (prob_.upper()[j] - prob_.lower()[j] > 1e-10) {
      to_free_[j] = static_cast<int>(free_.size());
      free_.push_back(j);
    }
  }
  nf_ = static_cast<int>(free_.size());
  lo_.resize(nf_);
  hi_.resize(nf_);
  has_lo_.assign(nf_, 0);
  has_hi_.assign(nf_, 0);
  for (int k = 0; k < nf_; ++k) {
    lo_[k] = prob_.lower()[free_[k]];
    hi_[k] = prob_.upper()[free_[k]];
    has_lo_[k] = std::isfinite(lo_[k]);
    has_hi_[k] = std::isfinite(hi_[k]);
  }
}

SpMat Ipm::Restrict(const SpMat& jac) const {
  std::vector<Triplet> trip;
  trip.reserve(jac.nonZeros());
  for (int col = 0; col < jac.outerSize(); ++col) {
    const int k = to_free_[col];
    if (k < 0) continue;
    for (SpMat::InnerIterator it(jac, col); it; ++it) {
      trip.emplace_back(static_cast<int>(it.row()), k, it.value());
    }
  }
  SpMat out(jac.rows(), nf_);
  out.setFromTriplets(trip.begin(), trip.end());
  return out;
}

void Ipm::Evaluate(const Eigen::VectorXd& x, Eval* ev, bool with_jac) const {
  ev->f = obj_scale_ * prob_.Objective(x);
  Eigen::VectorXd g;
  prob_.Gradient(x, &g);
  ev->g.resize(nf_);
  for (int k = 0; k < nf_; ++k) ev->g[k] = obj_scale_ * g[free_[k]];
  prob_.Constraints(x, &ev->c);
  if (with_jac) ev->jac = Restrict(prob_.Jacobian(x));
}

Eigen::VectorXd Ipm::DualResidual(const Eval& ev) const {
  Eigen::VectorXd r = ev.g + ev.jac.transpose() * y_;
  return r - zl_ + zu_;
}

double Ipm::KktError(const Eval& ev, double mu, double* primal, double* dual,
                     double* compl_err) const {
  constexpr double kSMax = 100.0;
  double zsum = zl_.lpNorm<1>() + zu_.lpNorm<1>();
  int nb = 0;
  for (int k = 0; k < nf_; ++k) nb += has_lo_[k] + has_hi_[k];
  const double s_d =
      std::max(kSMax, (y_.lpNorm<1>() + zsum) / std::max(1, m_ + nb)) / kSMax;
  const double s_c = std::max(kSMax, zsum / std::max(1, nb)) / kSMax;
  *primal = ev.c.size() ? ev.c.lpNorm<Eigen::Infinity>() : 0.0;
  *dual = DualResidual(ev).lpNorm<Eigen::Infinity>() / s_d;
  double ce = 0.0;
  for (int k = 0; k < nf_; ++k) {
    const double xk = x_[free_[k]];
    if (has_lo_[k]) ce = std::max(ce, std::abs((xk - lo_[k]) * zl_[k] - mu));
    if (has_hi_[k]) ce = std::max(ce, std::abs((hi_[k] - xk) * zu_[k] - mu));
  }
  *compl_err = ce / s_c;
  return std::max({*primal, *dual, *compl_err});
}

double Ipm::Barrier(const Eigen::VectorXd& x) const {
  double b = 0.0;
  for (int k = 0; k < nf_; ++k) {
    const double xk = x[free_[k]];
    if (has_lo_[k]) b -= std::log(xk - lo_[k]);
    if (has_hi_[k]) b -= std::log(hi_[k] - xk);
  }
  return b;
}

double Ipm::Merit(const Eigen::VectorXd& x, const Eval& ev, double mu) const {
  (void)x;
  return ev.f + mu * Barrier(x);
}

bool Ipm::Factor(const SpMat& w, const Eigen::VectorXd& sigma,
                 const SpMat& jac) {
  // Lower triangle of [W + Sigma + dw I, J^T; J, -dc I].
  auto assemble = [&](double dw) {
    std::vector<Triplet> trip;
    trip.reserve(w.nonZeros() + jac.nonZeros() + nf_ + m_);
    for (int col = 0; col < w.outerSize(); ++col) {
      for (SpMat::InnerIterator it(w, col); it; ++it) {
        if (it.row() > col) trip.emplace_back(it.row(), col, it.value());
      }
    }
    Eigen::VectorXd diag = sigma;
    for (int col = 0; col < w.outerSize(); ++col) {
      for (SpMat::InnerIterator it(w, col); it; ++it) {
        if (it.row() == col) diag[col] += it.value();
      }
    }
    for (int k = 0; k < nf_; ++k) trip.emplace_back(k, k, diag[k] + dw);
    for (int col = 0; col < jac.outerSize(); ++col) {
      for (SpMat::InnerIterator it(jac, col); it; ++it) {
        trip.emplace_back(nf_ + it.row(), col, it.value());
      }
    }
    for (int r = 0; r < m_; ++r) trip.emplace_back(nf_ + r, nf_ + r, -delta_c_);
    kkt_.resize(nf_ + m_, nf_ + m_);
    kkt_.setFromTriplets(trip.begin(), trip.end());
  };
  auto inertia_ok = [&]() {
    if (ldlt_.info() != Eigen::Success) return false;
    const Eigen::VectorXd& d = ldlt_.vectorD();
    int pos = 0, neg = 0;
    for (int k = 0; k < d.size(); ++k) {
      if (!std::isfinite(d[k])) return false;
      if (d[k] > 0) ++pos;
      else if (d[k] < 0) ++neg;
    }
    return pos == nf_ && neg == m_;
  };
  // The pattern differs between callers; analyze once per call.
  bool analyzed = false;
  auto factor = [&](double dw) {
    assemble(dw);
    if (!analyzed) {
      ldlt_.analyzePattern(kkt_);
      analyzed = true;
    }
    ldlt_.factorize(kkt_);
    return inertia_ok();
  };

  if (delta_w_last_ == 0.0 && factor(0.0)) return true;
  double dw = delta_w_last_ == 0.0 ? 1e-8 : std::max(1e-8, delta_w_last_ / 4);
  for (int attempt = 0; attempt < 80; ++attempt) {
    if (factor(dw)) {
      delta_w_last_ = dw;
      return true;
    }
    dw *= 2.0;
  }
  return false;
}

Eigen::VectorXd Ipm::Solve(const Eigen::VectorXd& rhs) const {
  // kkt_ holds the lower triangle; refine against the full symmetric form.
  Eigen::VectorXd sol = ldlt_.solve(rhs);
  for (int pass = 0; pass < 3; ++pass) {
    Eigen::VectorXd res =
        rhs - kkt_.selfadjointView<Eigen::Lower>() * sol;
    if (res.lpNorm<Eigen::Infinity>() <=
        1e-12 * std::max(1.0, rhs.lpNorm<Eigen::Infinity>())) {
      break;
    }
    sol += ldlt_.solve(res);
  }
  return sol;
}

void Ipm::LeastSquaresMultipliers(const Eval& ev) {
  // [I J^T; J 0] [w; y] = [-(g - zl + zu); 0]
  SpMat eye(nf_, nf_);
  eye.setIdentity();
  Eigen::VectorXd sigma = Eigen::VectorXd::Zero(nf_);
  const double keep = delta_w_last_;
  delta_w_last_ = 0.0;
  y_.setZero(m_);
  if (Factor(eye, sigma, ev.jac)) {
    Eigen::VectorXd rhs = Eigen::VectorXd::Zero(nf_ + m_);
    rhs.head(nf_) = -(ev.g - zl_ + zu_);
    Eigen::VectorXd sol = Solve(rhs);
    y_ = sol.tail(m_);
    if (!y_.allFinite() || y_.lpNorm<Eigen::Infinity>() > 1e3) y_.setZero();
  }
  delta_w_last_ = keep;
}

IpmResult Ipm::Run(const Schedule& start) {
  Setup();
  IpmResult result;
  x_ = initialize(prob_, start, cfg_.slack_floor);
  for (int j = 0; j < n_; ++j) {
    if (to_free_[j] < 0) x_[j] = prob_.lower()[j];
  }
  double mu = cfg_.initial_mu;
  const double mu_min = cfg_.tol / 10.0;
  {
    Eigen::VectorXd g;
    prob_.Gradient(x_, &g);
    const double gmax = g.lpNorm<Eigen::Infinity>();
    obj_scale_ = gmax > 100.0 ? 100.0 / gmax : 1.0;
  }
  zl_.setZero(nf_);
  zu_.setZero(nf_);
  for (int k = 0; k < nf_; ++k) {
    const double xk = x_[free_[k]];
    if (has_lo_[k]) zl_[k] = mu / (xk - lo_[k]);
    if (has_hi_[k]) zu_[k] = mu / (hi_[k] - xk);
  }

  Eval ev;
  Evaluate(x_, &ev, true);
  LeastSquaresMultipliers(ev);

  double nu = 1.0;
  constexpr double kKappaEps = 10.0;
  constexpr double kKappaSigma = 1e10;
  constexpr double kArmijo = 1e-4;
  IpmStatus status = IpmStatus::kMaxIterations;
  int iter = 0;
  double primal = 0, dual = 0, compl_err = 0;
  int stalled = 0;

  for (;; ++iter) {
    const double err0 = KktError(ev, 0.0, &primal, &dual, &compl_err);
    if (cfg_.callback) {
      cfg_.callback(iter, ev.f / obj_scale_, primal, dual, mu);
    }
    if (primal <= cfg_.tol && dual <= cfg_.tol && compl_err <= cfg_.compl_tol) {
      status = IpmStatus::kLocalOptimum;
      break;
    }
    (void)err0;
    if (iter >= cfg_.max_iterations) {
      status = IpmStatus::kMaxIterations;
      break;
    }

    if (cfg_.strategy == BarrierStrategy::kMonotone) {
      double p, d, ce;
      while (mu > mu_min && KktError(ev, mu, &p, &d, &ce) <= kKappaEps * mu) {
        mu = std::max(mu_min, std::min(cfg_.mu_factor * mu, std::pow(mu, 1.5)));
      }
    } else {
      // Centering from the spread of the complementarity products.
      double sum = 0.0, lowest = kInf;
      int count = 0;
      for (int k = 0; k < nf_; ++k) {
        const double xk = x_[free_[k]];
        if (has_lo_[k]) {
          const double v = (xk - lo_[k]) * zl_[k];
          sum += v;
          lowest = std::min(lowest, v);
          ++count;
        }
        if (has_hi_[k]) {
          const double v = (hi_[k] - xk) * zu_[k];
          sum += v;
          lowest = std::min(lowest, v);
          ++count;
        }
      }
      if (count > 0) {
        const double avg = sum / count;
        const double xi = std::max(lowest / avg, 1e-12);
        const double sigma =
            0.1 * std::pow(std::min(0.05 * (1.0 - xi) / xi, 2.0), 3.0);
        mu = std::max(mu_min, sigma * avg);
      }
    }

    // Newton system.
    Eigen::VectorXd y_full = y_;
    Eigen::VectorXd full_x = x_;
    SpMat w = Restrict(
        SpMat(Restrict(prob_.LagrangianHessian(full_x, y_full, obj_scale_))
                  .transpose()));
    Eigen::VectorXd sigma = Eigen::VectorXd::Zero(nf_);
    Eigen::VectorXd grad_phi = ev.g;
    for (int k = 0; k < nf_; ++k) {
      const double xk = x_[free_[k]];
      if (has_lo_[k]) {
        sigma[k] += zl_[k] / (xk - lo_[k]);
        grad_phi[k] -= mu / (xk - lo_[k]);
      }
      if (has_hi_[k]) {
        sigma[k] += zu_[k] / (hi_[k] - xk);
        grad_phi[k] += mu / (hi_[k] - xk);
      }
    }
    if (!Factor(w, sigma, ev.jac)) {
      status = IpmStatus::kRestorationFailure;
      break;
    }
    Eigen::VectorXd rhs(nf_ + m_);
    rhs.head(nf_) = -(grad_phi + ev.jac.transpose() * y_);
    rhs.tail(m_) = -ev.c;
    const Eigen::VectorXd sol = Solve(rhs);
    const Eigen::VectorXd dx = sol.head(nf_);
    const Eigen::VectorXd dy = sol.tail(m_);
    Eigen::VectorXd dzl = Eigen::VectorXd::Zero(nf_);
    Eigen::VectorXd dzu = Eigen::VectorXd::Zero(nf_);
    for (int k = 0; k < nf_; ++k) {
      const double xk = x_[free_[k]];
      if (has_lo_[k]) {
        const double s = xk - lo_[k];
        dzl[k] = (mu - zl_[k] * s - zl_[k] * dx[k]) / s;
      }
      if (has_hi_[k]) {
        const double s = hi_[k] - xk;
        dzu[k] = (mu - zu_[k] * s + zu_[k] * dx[k]) / s;
      }
    }

    // Fraction to the boundary.
    const double tau = std::max(cfg_.fraction_to_boundary, 1.0 - mu);
    double alpha_max = 1.0, alpha_z = 1.0;
    for (int k = 0; k < nf_; ++k) {
      const double xk = x_[free_[k]];
      if (has_lo_[k]) {
        if (dx[k] < 0) alpha_max = std::min(alpha_max, -tau * (xk - lo_[k]) / dx[k]);
        if (dzl[k] < 0) alpha_z = std::min(alpha_z, -tau * zl_[k] / dzl[k]);
      }
      if (has_hi_[k]) {
        if (dx[k] > 0) alpha_max = std::min(alpha_max, tau * (hi_[k] - xk) / dx[k]);
        if (dzu[k] < 0) alpha_z = std::min(alpha_z, -tau * zu_[k] / dzu[k]);
      }
    }

    // l1 merit with Armijo backtracking.
    const double y_next = (y_ + dy).lpNorm<Eigen::Infinity>();
    if (nu < y_next + 1.0) nu = std::max(1.5 * nu, y_next + 1.0);
    const double c1 = ev.c.lpNorm<1>();
    const double phi0 = Merit(x_, ev, mu) + nu * c1;
    const double slope = grad_phi.dot(dx) - nu * c1;
    double alpha = alpha_max;
    Eigen::VectorXd x_trial = x_;
    Eval trial;
    bool accepted = false;
    for (int back = 0; back < 40; ++back) {
      x_trial = x_;
      for (int k = 0; k < nf_; ++k) x_trial[free_[k]] += alpha * dx[k];
      Evaluate(x_trial, &trial, false);
      const double phi =
          Merit(x_trial, trial, mu) + nu * trial.c.lpNorm<1>();
      if (std::isfinite(phi) &&
          (phi <= phi0 + kArmijo * alpha * std::min(slope, 0.0) ||
           (slope >= 0.0 && phi <= phi0 + 1e-12 * std::abs(phi0)))) {
        accepted = true;
        break;
      }
      alpha *= 0.5;
    }
    if (!accepted) {
      // Take a short step anyway; stop when this keeps happening.
      if (++stalled > 10) {
        status = IpmStatus::kRestorationFailure;
        break;
      }
      alpha = std::min(alpha_max, 1e-3);
      x_trial = x_;
      for (int k = 0; k < nf_; ++k) x_trial[free_[k]] += alpha * dx[k];
    } else {
      stalled = 0;
    }
    x_ = x_trial;
    y_ += alpha * dy;
    zl_ += alpha_z * dzl;
    zu_ += alpha_z * dzu;
    for (int k = 0; k < nf_; ++k) {
      const double xk = x_[free_[k]];
      if (has_lo_[k]) {
        const double s = xk - lo_[k];
        zl_[k] = std::clamp(zl_[k], mu / (kKappaSigma * s), kKappaSigma * mu / s);
      }
      if (has_hi_[k]) {
        const double s = hi_[k] - xk;
        zu_[k] = std::clamp(zu_[k], mu / (kKappaSigma * s), kKappaSigma * mu / s);
      }
    }
    Evaluate(x_, &ev, true);
  }

  result.status = status;
  result.iterations = iter;
  result.x = x_;
  result.y = y_ / obj_scale_;
  result.z_lower = Eigen::VectorXd::Zero(n_);
  result.z_upper = Eigen::VectorXd::Zero(n_);
  for (int k = 0; k < nf_; ++k) {
    result.z_lower[free_[k]] = zl_[k] / obj_scale_;
    result.z_upper[free_[k]] = zu_[k] / obj_scale_;
  }
  result.schedule = prob_.ToSchedule(x_);
  result.objective = prob_.Objective(x_);
  KktError(ev, 0.0, &primal, &dual, &compl_err);
  result.primal_infeasibility = primal;
  result.dual_infeasibility = dual;
  result.complementarity = compl_err;
  result.mu = mu;
  const Instance& inst = prob_.instance();
  const int n = inst.num_units();
  const int periods = inst.num_periods();
  result.s.resize(n, periods);
  result.u.resize(n, periods);
  result.v.resize(n, periods);
  for (int t = 0; t < periods; ++t) {
    for (int i = 0; i < n; ++i) {
      result.s(i, t) = x_[prob_.S(i, t)];
      result.u(i, t) = x_[prob_.U(i, t)];
      result.v(i, t) = x_[prob_.V(i, t)];
    }
  }
  return result;
}

}  // namespace

IpmResult solve_nlp(const NlpProblem& problem, const Schedule& start,
                    const IpmConfig& config) {
  if (!(config.initial_mu > 0.0) || !(config.tol > 0.0) ||
      !(config.mu_factor > 0.0 && config.mu_factor < 1.0) ||
      !(config.fraction_to_boundary > 0.0 &&
        config.fraction_to_boundary < 1.0) ||
      !(config.slack_floor > 0.0) || config.max_iterations < 0) {
    throw ConfigError("invalid interior-point configuration");
  }
  Ipm ipm(problem, config);
  return ipm.Run(start);
}

}  // namespace dedvpe
