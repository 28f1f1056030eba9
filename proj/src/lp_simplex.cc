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

#include "dedvpe/lp_simplex.h"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <utility>

#include <Eigen/Sparse>
#include <Eigen/SparseLU>

namespace dedvpe {
namespace {

constexpr int kScalingPasses = 8;
constexpr int kMaxRecoveries = 8;
constexpr int kMaxAlternations = 6;

double PowerOfTwo(double s) {
  if (!std::isfinite(s) || s <= 0.0) return 1.0;
  return std::exp2(std::round(std::log2(s)));
}

enum class Outcome { kOptimal, kInfeasible, kUnbounded, kLimit, kRestart };

}  // namespace

std::string ToString(LpStatus status) {
  switch (status) {
    case LpStatus::kOptimal:
      return "optimal";
    case LpStatus::kInfeasible:
      return "infeasible";
    case LpStatus::kUnbounded:
      return "unbounded";
    case LpStatus::kIterationLimit:
      return "iteration-limit";
  }
  return "unknown";
}

class SimplexSolver::Impl {
 public:
  Impl(const SparseLp& lp, SimplexOptions options);

  LpSolution Solve();
  void SetColumnBounds(int col, double lower, double upper);
  double column_lower(int col) const { return lower_[col] * col_scale_[col]; }
  double column_upper(int col) const { return upper_[col] * col_scale_[col]; }
  void LoadBasis(const LpBasis& basis);
  LpBasis GetBasis() const;
  void ResetToSlackBasis();

  long long total_iterations = 0;
  int refactorizations = 0;

 private:
  using Vector = Eigen::VectorXd;

  struct Eta {
    int pos;
    double pivot;
    std::vector<int> index;
    std::vector<double> value;
  };

  // Column access over structurals and logicals.
  template <typename F>
  void ForEachEntry(int j, F&& f) const {
    if (j < n_) {
      for (int k = col_start_[j]; k < col_start_[j + 1]; ++k) f(row_index_[k], value_[k]);
    } else {
      f(j - n_, -1.0);
    }
  }
  double Dot(int j, const Vector& y) const {
    if (j >= n_) return -y[j - n_];
    double s = 0.0;
    for (int k = col_start_[j]; k < col_start_[j + 1]; ++k) s += value_[k] * y[row_index_[k]];
    return s;
  }
  void LoadColumn(int j, Vector& v) const {
    v.setZero();
    ForEachEntry(j, [&](int i, double a) { v[i] = a; });
  }

  bool Boxed(int j) const { return std::isfinite(lower_[j]) && std::isfinite(upper_[j]); }
  bool Fixed(int j) const { return lower_[j] == upper_[j]; }
  double NonbasicValue(int j) const {
    switch (status_[j]) {
      case VarStatus::kAtLower:
        return lower_[j];
      case VarStatus::kAtUpper:
        return upper_[j];
      default:
        return 0.0;
    }
  }
  VarStatus DefaultStatus(int j) const;
  void SanitizeStatus(int j);

  bool Refactor();
  void Ftran(Vector& v) const;
  void Btran(Vector& v) const;
  void PushEta(int pos, const Vector& column);

  void ComputePrimal();
  void ComputeDuals();  // phase-2 reduced costs into d_
  double PrimalInfeasibility() const;
  double DualInfeasibility() const;
  bool FlipToDualFeasible();  // returns true when dual feasible afterwards

  Outcome DualSimplex();
  Outcome PrimalSimplex();
  bool Recover();
  bool IterationBudgetLeft() const { return iterations_ < max_iterations_; }

  LpSolution Extract(LpStatus status) const;

  SimplexOptions options_;
  int m_ = 0;
  int n_ = 0;
  int total_ = 0;
  int max_iterations_ = 0;

  std::vector<int> col_start_;
  std::vector<int> row_index_;
  std::vector<double> value_;
  std::vector<double> row_scale_;
  std::vector<double> col_scale_;
  std::vector<double> lower_;
  std::vector<double> upper_;
  std::vector<double> cost_;
  double offset_ = 0.0;

  std::vector<int> head_;
  std::vector<int> pos_;
  std::vector<VarStatus> status_;
  std::vector<double> x_;
  std::vector<double> d_;

  mutable Eigen::SparseLU<Eigen::SparseMatrix<double>, Eigen::COLAMDOrdering<int>> lu_;
  std::vector<Eta> etas_;
  bool factor_valid_ = false;
  bool primal_dirty_ = true;

  int iterations_ = 0;
  int recoveries_ = 0;

  mutable Vector work_;
  Vector column_;
  Vector row_;
  std::vector<double> pivot_row_;
};

SimplexSolver::Impl::Impl(const SparseLp& lp, SimplexOptions options)
    : options_(options) {
  const ColumnMajorMatrix a = lp.ToColumnMajor();
  m_ = a.num_rows;
  n_ = a.num_cols;
  total_ = m_ + n_;
  col_start_ = a.starts;
  row_index_ = a.rows;
  value_ = a.values;
  max_iterations_ = options_.max_iterations > 0 ? options_.max_iterations
                                                : 20 * total_ + 10000;

  row_scale_.assign(m_, 1.0);
  col_scale_.assign(n_, 1.0);
  if (options_.scale && !value_.empty()) {
    std::vector<double> row_min(m_), row_max(m_);
    for (int pass = 0; pass < kScalingPasses; ++pass) {
      std::fill(row_min.begin(), row_min.end(), kInfinity);
      std::fill(row_max.begin(), row_max.end(), 0.0);
      for (int j = 0; j < n_; ++j) {
        for (int k = col_start_[j]; k < col_start_[j + 1]; ++k) {
          const double v = std::abs(value_[k]) * col_scale_[j];
          if (v == 0.0) continue;
          row_min[row_index_[k]] = std::min(row_min[row_index_[k]], v);
          row_max[row_index_[k]] = std::max(row_max[row_index_[k]], v);
        }
      }
      for (int i = 0; i < m_; ++i) {
        if (row_max[i] > 0.0) row_scale_[i] = 1.0 / std::sqrt(row_min[i] * row_max[i]);
      }
      for (int j = 0; j < n_; ++j) {
        double lo = kInfinity;
        double hi = 0.0;
        for (int k = col_start_[j]; k < col_start_[j + 1]; ++k) {
          const double v = std::abs(value_[k]) * row_scale_[row_index_[k]];
          if (v == 0.0) continue;
          lo = std::min(lo, v);
          hi = std::max(hi, v);
        }
        if (hi > 0.0) col_scale_[j] = 1.0 / std::sqrt(lo * hi);
      }
    }
    for (double& s : row_scale_) s = PowerOfTwo(s);
    for (double& s : col_scale_) s = PowerOfTwo(s);
    for (int j = 0; j < n_; ++j) {
      for (int k = col_start_[j]; k < col_start_[j + 1]; ++k) {
        value_[k] *= row_scale_[row_index_[k]] * col_scale_[j];
      }
    }
  }

  lower_.resize(total_);
  upper_.resize(total_);
  cost_.assign(total_, 0.0);
  for (int j = 0; j < n_; ++j) {
    lower_[j] = lp.col_lower()[j] / col_scale_[j];
    upper_[j] = lp.col_upper()[j] / col_scale_[j];
    cost_[j] = lp.objective()[j] * col_scale_[j];
  }
  for (int i = 0; i < m_; ++i) {
    lower_[n_ + i] = lp.row_lower()[i] * row_scale_[i];
    upper_[n_ + i] = lp.row_upper()[i] * row_scale_[i];
  }
  offset_ = lp.objective_offset();

  head_.resize(m_);
  pos_.assign(total_, -1);
  status_.resize(total_);
  x_.assign(total_, 0.0);
  d_.assign(total_, 0.0);
  work_.resize(m_);
  column_.resize(m_);
  row_.resize(m_);
  pivot_row_.assign(total_, 0.0);
  ResetToSlackBasis();
}

VarStatus SimplexSolver::Impl::DefaultStatus(int j) const {
  const bool has_lower = std::isfinite(lower_[j]);
  const bool has_upper = std::isfinite(upper_[j]);
  if (has_lower && has_upper) {
    return cost_[j] >= 0.0 ? VarStatus::kAtLower : VarStatus::kAtUpper;
  }
  if (has_lower) return VarStatus::kAtLower;
  if (has_upper) return VarStatus::kAtUpper;
  return VarStatus::kFree;
}

void SimplexSolver::Impl::SanitizeStatus(int j) {
  switch (status_[j]) {
    case VarStatus::kBasic:
      return;
    case VarStatus::kAtLower:
      if (!std::isfinite(lower_[j])) status_[j] = DefaultStatus(j);
      return;
    case VarStatus::kAtUpper:
      if (!std::isfinite(upper_[j])) status_[j] = DefaultStatus(j);
      return;
    case VarStatus::kFree:
      if (std::isfinite(lower_[j]) || std::isfinite(upper_[j])) {
        status_[j] = DefaultStatus(j);
      }
      return;
  }
}

void SimplexSolver::Impl::ResetToSlackBasis() {
  std::fill(pos_.begin(), pos_.end(), -1);
  for (int j = 0; j < n_; ++j) status_[j] = DefaultStatus(j);
  for (int i = 0; i < m_; ++i) {
    head_[i] = n_ + i;
    pos_[n_ + i] = i;
    status_[n_ + i] = VarStatus::kBasic;
  }
  factor_valid_ = false;
  primal_dirty_ = true;
}

void SimplexSolver::Impl::SetColumnBounds(int col, double lower, double upper) {
  if (col < 0 || col >= n_) throw std::out_of_range("SetColumnBounds: column");
  lower_[col] = lower / col_scale_[col];
  upper_[col] = upper / col_scale_[col];
  if (status_[col] != VarStatus::kBasic) {
    SanitizeStatus(col);
    primal_dirty_ = true;
  }
}

void SimplexSolver::Impl::LoadBasis(const LpBasis& basis) {
  if (static_cast<int>(basis.status.size()) != total_ ||
      static_cast<int>(basis.basic.size()) != m_) {
    throw std::invalid_argument("LoadBasis: basis does not match the LP");
  }
  std::fill(pos_.begin(), pos_.end(), -1);
  for (int i = 0; i < m_; ++i) {
    const int j = basis.basic[i];
    if (j < 0 || j >= total_ || pos_[j] != -1 ||
        basis.status[j] != VarStatus::kBasic) {
      throw std::invalid_argument("LoadBasis: inconsistent basic set");
    }
    head_[i] = j;
    pos_[j] = i;
  }
  status_ = basis.status;
  for (int j = 0; j < total_; ++j) {
    if (pos_[j] == -1 && status_[j] == VarStatus::kBasic) {
      throw std::invalid_argument("LoadBasis: too many basic statuses");
    }
    SanitizeStatus(j);
  }
  factor_valid_ = false;
  primal_dirty_ = true;
}

LpBasis SimplexSolver::Impl::GetBasis() const {
  LpBasis b;
  b.basic = head_;
  b.status = status_;
  return b;
}

bool SimplexSolver::Impl::Refactor() {
  etas_.clear();
  factor_valid_ = false;
  if (m_ == 0) {
    factor_valid_ = true;
    return true;
  }
  std::vector<Eigen::Triplet<double>> entries;
  entries.reserve(m_ * 3);
  for (int pos = 0; pos < m_; ++pos) {
    ForEachEntry(head_[pos], [&](int i, double a) { entries.emplace_back(i, pos, a); });
  }
  Eigen::SparseMatrix<double> b(m_, m_);
  b.setFromTriplets(entries.begin(), entries.end());
  b.makeCompressed();
  lu_.compute(b);
  ++refactorizations;
  if (lu_.info() != Eigen::Success) return false;
  factor_valid_ = true;
  return true;
}

void SimplexSolver::Impl::Ftran(Vector& v) const {
  if (m_ == 0) return;
  work_ = lu_.solve(v);
  v.swap(work_);
  for (const Eta& eta : etas_) {
    const double yr = v[eta.pos] / eta.pivot;
    if (yr != 0.0) {
      for (size_t k = 0; k < eta.index.size(); ++k) v[eta.index[k]] -= eta.value[k] * yr;
    }
    v[eta.pos] = yr;
  }
}

void SimplexSolver::Impl::Btran(Vector& v) const {
  if (m_ == 0) return;
  for (auto it = etas_.rbegin(); it != etas_.rend(); ++it) {
    double s = v[it->pos];
    for (size_t k = 0; k < it->index.size(); ++k) s -= it->value[k] * v[it->index[k]];
    v[it->pos] = s / it->pivot;
  }
  work_ = lu_.transpose().solve(v);
  v.swap(work_);
}

void SimplexSolver::Impl::PushEta(int pos, const Vector& column) {
  Eta eta;
  eta.pos = pos;
  eta.pivot = column[pos];
  for (int i = 0; i < m_; ++i) {
    if (i != pos && column[i] != 0.0) {
      eta.index.push_back(i);
      eta.value.push_back(column[i]);
    }
  }
  etas_.push_back(std::move(eta));
}

void SimplexSolver::Impl::ComputePrimal() {
  column_.setZero();
  for (int j = 0; j < total_; ++j) {
    if (status_[j] == VarStatus::kBasic) continue;
    x_[j] = NonbasicValue(j);
    if (x_[j] != 0.0) {
      const double xj = x_[j];
      ForEachEntry(j, [&](int i, double a) { column_[i] -= a * xj; });
    }
  }
  Ftran(column_);
  for (int pos = 0; pos < m_; ++pos) x_[head_[pos]] = column_[pos];
  primal_dirty_ = false;
}

void SimplexSolver::Impl::ComputeDuals() {
  for (int pos = 0; pos < m_; ++pos) row_[pos] = cost_[head_[pos]];
  Btran(row_);
  for (int j = 0; j < total_; ++j) {
    d_[j] = status_[j] == VarStatus::kBasic ? 0.0 : cost_[j] - Dot(j, row_);
  }
}

double SimplexSolver::Impl::PrimalInfeasibility() const {
  double worst = 0.0;
  for (int pos = 0; pos < m_; ++pos) {
    const int j = head_[pos];
    worst = std::max({worst, lower_[j] - x_[j], x_[j] - upper_[j]});
  }
  return worst;
}

double SimplexSolver::Impl::DualInfeasibility() const {
  double worst = 0.0;
  for (int j = 0; j < total_; ++j) {
    if (status_[j] == VarStatus::kBasic || Fixed(j)) continue;
    switch (status_[j]) {
      case VarStatus::kAtLower:
        worst = std::max(worst, -d_[j]);
        break;
      case VarStatus::kAtUpper:
        worst = std::max(worst, d_[j]);
        break;
      case VarStatus::kFree:
        worst = std::max(worst, std::abs(d_[j]));
        break;
      default:
        break;
    }
  }
  return worst;
}

bool SimplexSolver::Impl::FlipToDualFeasible() {
  const double tol = options_.optimality_tol;
  bool feasible = true;
  for (int j = 0; j < total_; ++j) {
    if (status_[j] == VarStatus::kBasic || Fixed(j)) continue;
    if (status_[j] == VarStatus::kAtLower && d_[j] < -tol) {
      if (Boxed(j)) {
        status_[j] = VarStatus::kAtUpper;
        primal_dirty_ = true;
      } else {
        feasible = false;
      }
    } else if (status_[j] == VarStatus::kAtUpper && d_[j] > tol) {
      if (Boxed(j)) {
        status_[j] = VarStatus::kAtLower;
        primal_dirty_ = true;
      } else {
        feasible = false;
      }
    } else if (status_[j] == VarStatus::kFree && std::abs(d_[j]) > tol) {
      feasible = false;
    }
  }
  return feasible;
}

bool SimplexSolver::Impl::Recover() {
  if (++recoveries_ > kMaxRecoveries) return false;
  if (!Refactor()) {
    ResetToSlackBasis();
    if (!Refactor()) return false;
  }
  ComputePrimal();
  ComputeDuals();
  return true;
}

Outcome SimplexSolver::Impl::DualSimplex() {
  const double ftol = options_.feasibility_tol;
  const double otol = options_.optimality_tol;
  int degenerate = 0;
  bool bland = false;

  struct Candidate {
    int j;
    double ratio;
    double alpha;
  };
  std::vector<Candidate> candidates;

  while (true) {
    if (!IterationBudgetLeft()) return Outcome::kLimit;

    // Leaving row: largest bound violation (smallest index under Bland).
    int r = -1;
    double best = ftol;
    for (int pos = 0; pos < m_; ++pos) {
      const int j = head_[pos];
      const double infeas = std::max(lower_[j] - x_[j], x_[j] - upper_[j]);
      if (infeas <= ftol) continue;
      if (bland) {
        if (r == -1 || j < head_[r]) r = pos;
      } else if (infeas > best) {
        best = infeas;
        r = pos;
      }
    }
    if (r == -1) return Outcome::kOptimal;

    const int p = head_[r];
    const bool to_lower = x_[p] < lower_[p];
    const double sigma = to_lower ? 1.0 : -1.0;
    double slope = to_lower ? lower_[p] - x_[p] : x_[p] - upper_[p];

    row_.setZero();
    row_[r] = 1.0;
    Btran(row_);

    candidates.clear();
    for (int j = 0; j < total_; ++j) {
      if (status_[j] == VarStatus::kBasic) {
        pivot_row_[j] = 0.0;
        continue;
      }
      const double a = Dot(j, row_);
      pivot_row_[j] = a;
      if (Fixed(j) || std::abs(a) < options_.pivot_tol) continue;
      const double s = sigma * a;
      double ratio;
      if (status_[j] == VarStatus::kAtLower && s < 0.0) {
        ratio = std::max(d_[j], 0.0) / std::abs(a);
      } else if (status_[j] == VarStatus::kAtUpper && s > 0.0) {
        ratio = std::max(-d_[j], 0.0) / std::abs(a);
      } else if (status_[j] == VarStatus::kFree) {
        ratio = std::abs(d_[j]) / std::abs(a);
      } else {
        continue;
      }
      candidates.push_back({j, ratio, a});
    }
    if (candidates.empty()) return Outcome::kInfeasible;

    std::sort(candidates.begin(), candidates.end(),
              [](const Candidate& x, const Candidate& y) {
                return x.ratio < y.ratio || (x.ratio == y.ratio && x.j < y.j);
              });

    // Bound-flipping pass: walk breakpoints while the dual objective keeps
    // improving and the candidate can flip to its other bound.
    size_t first = 0;
    if (!bland) {
      while (first + 1 < candidates.size()) {
        const Candidate& c = candidates[first];
        if (!Boxed(c.j)) break;
        const double next = slope - std::abs(c.alpha) * (upper_[c.j] - lower_[c.j]);
        if (next < 0.0) break;
        slope = next;
        ++first;
      }
    }

    // Harris pass among the remaining candidates.
    size_t chosen = first;
    if (bland) {
      const double limit = candidates[0].ratio + 1e-12;
      for (size_t k = 0; k < candidates.size() && candidates[k].ratio <= limit; ++k) {
        if (candidates[k].j < candidates[chosen].j) chosen = k;
      }
    } else {
      double bound = kInfinity;
      for (size_t k = first; k < candidates.size(); ++k) {
        const Candidate& c = candidates[k];
        const double dj = status_[c.j] == VarStatus::kAtUpper ? -d_[c.j] : d_[c.j];
        bound = std::min(bound, (std::max(dj, 0.0) + otol) / std::abs(c.alpha));
      }
      for (size_t k = first; k < candidates.size(); ++k) {
        if (candidates[k].ratio > bound) break;
        if (std::abs(candidates[k].alpha) > std::abs(candidates[chosen].alpha)) chosen = k;
      }
    }
    const int q = candidates[chosen].j;
    const double alpha_rq = pivot_row_[q];

    // Apply flips.
    bool flipped = false;
    column_.setZero();
    for (size_t k = 0; k < first; ++k) {
      const int j = candidates[k].j;
      if (j == q) continue;
      const double old_value = x_[j];
      status_[j] = status_[j] == VarStatus::kAtLower ? VarStatus::kAtUpper
                                                     : VarStatus::kAtLower;
      x_[j] = NonbasicValue(j);
      const double delta = x_[j] - old_value;
      ForEachEntry(j, [&](int i, double a) { column_[i] += a * delta; });
      flipped = true;
    }
    if (flipped) {
      Ftran(column_);
      for (int pos = 0; pos < m_; ++pos) x_[head_[pos]] -= column_[pos];
    }

    LoadColumn(q, column_);
    Ftran(column_);
    const double pivot = column_[r];
    if (std::abs(pivot - alpha_rq) > 1e-7 * (1.0 + std::abs(pivot)) ||
        std::abs(pivot) < options_.pivot_tol) {
      if (!Recover()) return Outcome::kLimit;
      continue;
    }

    const double bound_p = to_lower ? lower_[p] : upper_[p];
    const double theta_p = (x_[p] - bound_p) / pivot;
    for (int pos = 0; pos < m_; ++pos) x_[head_[pos]] -= theta_p * column_[pos];
    x_[q] += theta_p;
    x_[p] = bound_p;

    const double t = d_[q] / alpha_rq;
    for (int j = 0; j < total_; ++j) {
      if (status_[j] != VarStatus::kBasic && pivot_row_[j] != 0.0) {
        d_[j] -= t * pivot_row_[j];
      }
    }
    d_[p] = -t;
    d_[q] = 0.0;

    status_[p] = to_lower ? VarStatus::kAtLower : VarStatus::kAtUpper;
    pos_[p] = -1;
    head_[r] = q;
    pos_[q] = r;
    status_[q] = VarStatus::kBasic;
    PushEta(r, column_);
    ++iterations_;

    if (std::abs(t) < 1e-12) {
      if (++degenerate >= options_.bland_after_degenerate) bland = true;
    } else {
      degenerate = 0;
      bland = false;
    }

    if (static_cast<int>(etas_.size()) >= options_.refactor_interval) {
      if (!Refactor()) {
        if (!Recover()) return Outcome::kLimit;
        return Outcome::kRestart;
      }
      ComputePrimal();
      ComputeDuals();
    }
  }
}

Outcome SimplexSolver::Impl::PrimalSimplex() {
  const double ftol = options_.feasibility_tol;
  const double otol = options_.optimality_tol;
  int degenerate = 0;
  bool bland = false;
  std::vector<double> phase_cost(total_, 0.0);

  while (true) {
    if (!IterationBudgetLeft()) return Outcome::kLimit;

    // Phase costs: gradient of the sum of infeasibilities while infeasible.
    bool phase1 = false;
    for (int pos = 0; pos < m_; ++pos) {
      const int j = head_[pos];
      double c = 0.0;
      if (x_[j] < lower_[j] - ftol) {
        c = -1.0;
      } else if (x_[j] > upper_[j] + ftol) {
        c = 1.0;
      }
      phase_cost[pos] = c;
      if (c != 0.0) phase1 = true;
    }
    for (int pos = 0; pos < m_; ++pos) {
      row_[pos] = phase1 ? phase_cost[pos] : cost_[head_[pos]];
    }
    Btran(row_);
    for (int j = 0; j < total_; ++j) {
      if (status_[j] == VarStatus::kBasic) {
        d_[j] = 0.0;
      } else {
        d_[j] = (phase1 ? 0.0 : cost_[j]) - Dot(j, row_);
      }
    }

    // Pricing.
    int q = -1;
    double dir = 0.0;
    double best = otol;
    for (int j = 0; j < total_; ++j) {
      if (status_[j] == VarStatus::kBasic || Fixed(j)) continue;
      double score = 0.0;
      double move = 0.0;
      if (status_[j] == VarStatus::kAtLower && d_[j] < -otol) {
        score = -d_[j];
        move = 1.0;
      } else if (status_[j] == VarStatus::kAtUpper && d_[j] > otol) {
        score = d_[j];
        move = -1.0;
      } else if (status_[j] == VarStatus::kFree && std::abs(d_[j]) > otol) {
        score = std::abs(d_[j]);
        move = d_[j] < 0.0 ? 1.0 : -1.0;
      } else {
        continue;
      }
      if (bland) {
        if (q == -1) {
          q = j;
          dir = move;
        }
      } else if (score > best) {
        best = score;
        q = j;
        dir = move;
      }
    }
    if (q == -1) return phase1 ? Outcome::kInfeasible : Outcome::kOptimal;

    LoadColumn(q, column_);
    Ftran(column_);

    // Ratio test (Harris two-pass). In phase 1 an infeasible basic
    // variable limits the step only when it moves toward feasibility, and
    // then at the bound it is violating.
    auto limit_of = [&](int pos, double slack) -> double {
      const double alpha = column_[pos];
      if (std::abs(alpha) < options_.pivot_tol) return kInfinity;
      const int j = head_[pos];
      const double rate = -dir * alpha;
      if (x_[j] < lower_[j] - ftol) {
        return rate > 0.0 ? (lower_[j] - x_[j]) / rate : kInfinity;
      }
      if (x_[j] > upper_[j] + ftol) {
        return rate < 0.0 ? (x_[j] - upper_[j]) / -rate : kInfinity;
      }
      if (rate > 0.0) {
        return std::isfinite(upper_[j]) ? std::max(upper_[j] + slack - x_[j], 0.0) / rate
                                        : kInfinity;
      }
      return std::isfinite(lower_[j]) ? std::max(x_[j] - lower_[j] + slack, 0.0) / -rate
                                      : kInfinity;
    };
    double theta_max = kInfinity;
    for (int pos = 0; pos < m_; ++pos) theta_max = std::min(theta_max, limit_of(pos, ftol));
    int r = -1;
    double theta = kInfinity;
    if (std::isfinite(theta_max)) {
      double best_alpha = 0.0;
      for (int pos = 0; pos < m_; ++pos) {
        const double lim = limit_of(pos, 0.0);
        if (lim <= theta_max && std::abs(column_[pos]) > best_alpha) {
          if (bland && r != -1 && head_[pos] > head_[r]) continue;
          best_alpha = std::abs(column_[pos]);
          r = pos;
          theta = lim;
        }
      }
    }
    const double own_range = upper_[q] - lower_[q];
    if (std::isfinite(own_range) && own_range <= theta) {
      // Entering variable hits its other bound first.
      const double step = dir * own_range;
      for (int pos = 0; pos < m_; ++pos) x_[head_[pos]] -= step * column_[pos];
      status_[q] = status_[q] == VarStatus::kAtLower ? VarStatus::kAtUpper
                                                     : VarStatus::kAtLower;
      x_[q] = NonbasicValue(q);
      ++iterations_;
      degenerate = 0;
      bland = false;
      continue;
    }
    if (r == -1) {
      if (phase1) return Outcome::kLimit;  // cannot happen with exact data
      return Outcome::kUnbounded;
    }

    const int p = head_[r];
    const double rate = -dir * column_[r];
    VarStatus leave_status;
    double leave_value;
    if (x_[p] < lower_[p] - ftol) {
      leave_status = VarStatus::kAtLower;
      leave_value = lower_[p];
    } else if (x_[p] > upper_[p] + ftol) {
      leave_status = VarStatus::kAtUpper;
      leave_value = upper_[p];
    } else if (rate > 0.0) {
      leave_status = VarStatus::kAtUpper;
      leave_value = upper_[p];
    } else {
      leave_status = VarStatus::kAtLower;
      leave_value = lower_[p];
    }
    if (Fixed(p)) leave_status = VarStatus::kAtLower;

    theta = std::max(theta, 0.0);
    for (int pos = 0; pos < m_; ++pos) x_[head_[pos]] -= dir * theta * column_[pos];
    x_[q] += dir * theta;
    x_[p] = leave_value;

    status_[p] = leave_status;
    pos_[p] = -1;
    head_[r] = q;
    pos_[q] = r;
    status_[q] = VarStatus::kBasic;
    PushEta(r, column_);
    ++iterations_;

    if (theta < 1e-12) {
      if (++degenerate >= options_.bland_after_degenerate) bland = true;
    } else {
      degenerate = 0;
      bland = false;
    }

    if (static_cast<int>(etas_.size()) >= options_.refactor_interval) {
      if (!Refactor()) {
        if (!Recover()) return Outcome::kLimit;
        return Outcome::kRestart;
      }
      ComputePrimal();
    }
  }
}

LpSolution SimplexSolver::Impl::Solve() {
  iterations_ = 0;
  recoveries_ = 0;
  for (int j = 0; j < total_; ++j) SanitizeStatus(j);
  if (!factor_valid_ && !Refactor()) {
    ResetToSlackBasis();
    if (!Refactor()) return Extract(LpStatus::kIterationLimit);
  }
  if (primal_dirty_) ComputePrimal();
  ComputeDuals();

  using Algorithm = SimplexOptions::Algorithm;
  LpStatus result = LpStatus::kIterationLimit;
  bool prefer_dual = options_.algorithm != Algorithm::kPrimal;
  for (int round = 0; round < kMaxAlternations; ++round) {
    Outcome outcome;
    bool use_dual = false;
    if (prefer_dual) {
      use_dual = FlipToDualFeasible();
      if (primal_dirty_) ComputePrimal();
    }
    outcome = use_dual ? DualSimplex() : PrimalSimplex();
    if (outcome == Outcome::kRestart) {
      --round;
      continue;
    }
    if (outcome == Outcome::kLimit) {
      result = LpStatus::kIterationLimit;
      break;
    }
    if (outcome == Outcome::kUnbounded) {
      result = LpStatus::kUnbounded;
      break;
    }
    // Confirm on a fresh factorization.
    if (!Refactor()) {
      if (!Recover()) break;
    }
    ComputePrimal();
    ComputeDuals();
    const double pinf = PrimalInfeasibility();
    const double dinf = DualInfeasibility();
    if (outcome == Outcome::kInfeasible) {
      if (use_dual && dinf > options_.optimality_tol) {
        // The ray is only a proof when the basis is dual feasible.
        prefer_dual = false;
        continue;
      }
      if (!use_dual && pinf <= options_.feasibility_tol) {
        prefer_dual = true;
        continue;
      }
      result = LpStatus::kInfeasible;
      break;
    }
    if (pinf <= options_.feasibility_tol && dinf <= options_.optimality_tol) {
      result = LpStatus::kOptimal;
      break;
    }
    // Primal infeasible after drift: dual cleanup; dual infeasible: primal.
    prefer_dual = pinf > options_.feasibility_tol;
  }
  total_iterations += iterations_;
  return Extract(result);
}

LpSolution SimplexSolver::Impl::Extract(LpStatus status) const {
  LpSolution sol;
  sol.status = status;
  sol.iterations = iterations_;
  sol.basis = GetBasis();
  sol.primal.resize(n_);
  for (int j = 0; j < n_; ++j) sol.primal[j] = x_[j] * col_scale_[j];

  Vector y(m_);
  for (int pos = 0; pos < m_; ++pos) y[pos] = cost_[head_[pos]];
  if (factor_valid_) Btran(y);
  sol.row_duals.resize(m_);
  for (int i = 0; i < m_; ++i) sol.row_duals[i] = y[i] * row_scale_[i];
  sol.reduced_costs.resize(n_);
  for (int j = 0; j < n_; ++j) {
    sol.reduced_costs[j] =
        status_[j] == VarStatus::kBasic ? 0.0 : (cost_[j] - Dot(j, y)) / col_scale_[j];
  }

  sol.row_activity.assign(m_, 0.0);
  double objective = offset_;
  for (int j = 0; j < n_; ++j) {
    const double xj = sol.primal[j];
    objective += cost_[j] / col_scale_[j] * xj;
    for (int k = col_start_[j]; k < col_start_[j + 1]; ++k) {
      const int i = row_index_[k];
      sol.row_activity[i] += value_[k] / (row_scale_[i] * col_scale_[j]) * xj;
    }
  }
  sol.objective = objective;

  // g(y) = sum_j min_{x_j in box} d_j x_j + sum_i min_{r_i in row box} y_i r_i.
  const double tol = options_.optimality_tol;
  double dual = offset_;
  auto add_term = [&](double dj, double lo, double hi) {
    if (std::abs(dj) <= tol * 1e-3) return;
    const double bound = dj > 0.0 ? lo : hi;
    if (std::isfinite(bound)) {
      dual += dj * bound;
    } else if (std::abs(dj) > tol) {
      dual = -kInfinity;
    }
  };
  for (int j = 0; j < n_; ++j) {
    add_term(sol.reduced_costs[j], lower_[j] * col_scale_[j], upper_[j] * col_scale_[j]);
  }
  for (int i = 0; i < m_; ++i) {
    add_term(sol.row_duals[i], lower_[n_ + i] / row_scale_[i],
             upper_[n_ + i] / row_scale_[i]);
  }
  sol.dual_objective = dual;
  return sol;
}

SimplexSolver::SimplexSolver(const SparseLp& lp, SimplexOptions options)
    : impl_(std::make_unique<Impl>(lp, options)) {}
SimplexSolver::~SimplexSolver() = default;
SimplexSolver::SimplexSolver(SimplexSolver&&) noexcept = default;
SimplexSolver& SimplexSolver::operator=(SimplexSolver&&) noexcept = default;

LpSolution SimplexSolver::Solve() { return impl_->Solve(); }
void SimplexSolver::SetColumnBounds(int col, double lower, double upper) {
  impl_->SetColumnBounds(col, lower, upper);
}
double SimplexSolver::column_lower(int col) const { return impl_->column_lower(col); }
double SimplexSolver::column_upper(int col) const { return impl_->column_upper(col); }
void SimplexSolver::LoadBasis(const LpBasis& basis) { impl_->LoadBasis(basis); }
LpBasis SimplexSolver::basis() const { return impl_->GetBasis(); }
void SimplexSolver::ResetToSlackBasis() { impl_->ResetToSlackBasis(); }
long long SimplexSolver::total_iterations() const { return impl_->total_iterations; }
int SimplexSolver::refactorizations() const { return impl_->refactorizations; }

LpSolution solve_lp(const SparseLp& lp, const LpBasis* warm,
                    const SimplexOptions& options) {
  SimplexSolver solver(lp, options);
  if (warm != nullptr && !warm->empty()) solver.LoadBasis(*warm);
  return solver.Solve();
}

LpSolution reoptimize_after_bound_change(const SparseLp& lp,
                                         const LpBasis& basis, int col,
                                         double lower, double upper,
                                         const SimplexOptions& options) {
  SimplexSolver solver(lp, options);
  solver.LoadBasis(basis);
  solver.SetColumnBounds(col, lower, upper);
  return solver.Solve();
}

}  // namespace dedvpe
