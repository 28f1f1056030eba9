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

#include "dedvpe/branch_and_bound.h"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <condition_variable>
#include <cstdint>
#include <memory>
#include <mutex>
#include <numeric>
#include <queue>
#include <stdexcept>
#include <thread>

#include "dedvpe/cost.h"

namespace dedvpe {

std::string ToString(BnbStatus status) {
  switch (status) {
    case BnbStatus::kGapReached:
      return "gap-reached";
    case BnbStatus::kProvenOptimal:
      return "proven-optimal";
    case BnbStatus::kLimit:
      return "limit";
    case BnbStatus::kInfeasible:
      return "infeasible";
  }
  return "unknown";
}

namespace {

using Clock = std::chrono::steady_clock;

double Seconds(Clock::time_point since) {
  return std::chrono::duration<double>(Clock::now() - since).count();
}

// Nonbasic statuses at 2 bits each; the basic set is recovered from them.
class PackedBasis {
 public:
  explicit PackedBasis(const LpBasis& basis) : size_(basis.status.size()) {
    bits_.assign((size_ + 3) / 4, 0);
    for (size_t j = 0; j < size_; ++j) {
      bits_[j / 4] |= static_cast<std::uint8_t>(basis.status[j]) << (2 * (j % 4));
    }
  }

  LpBasis Unpack() const {
    LpBasis basis;
    basis.status.resize(size_);
    for (size_t j = 0; j < size_; ++j) {
      basis.status[j] = static_cast<VarStatus>((bits_[j / 4] >> (2 * (j % 4))) & 3);
      if (basis.status[j] == VarStatus::kBasic) basis.basic.push_back(static_cast<int>(j));
    }
    return basis;
  }

 private:
  size_t size_;
  std::vector<std::uint8_t> bits_;
};

// Columns [begin, end) fixed to `value`.
struct Fixing {
  std::shared_ptr<const Fixing> parent;
  int begin;
  int end;
  int value;
};

struct Node {
  double bound = -kInfinity;
  int depth = 0;
  long long id = 0;
  std::shared_ptr<const Fixing> fixings;
  std::shared_ptr<const PackedBasis> basis;
};

// Lowest bound first; deeper nodes, then older ones, break ties.
struct WorseNode {
  bool operator()(const Node& a, const Node& b) const {
    if (a.bound != b.bound) return a.bound > b.bound;
    if (a.depth != b.depth) return a.depth < b.depth;
    return a.id > b.id;
  }
};

struct Candidate {
  std::vector<double> x;
  double objective = kInfinity;
};

class Search {
 public:
  Search(const MilpModel& model, const BnbConfig& config);
  BnbResult Run();

 private:
  struct Worker {
    Worker(const SparseLp& model, const SimplexOptions& options)
        : lp(model, options), heuristic(model, options) {}

    SimplexSolver lp;
    SimplexSolver heuristic;
    bool heuristic_warm = false;
    std::vector<int> changed;
    std::vector<int> fixed_value;  // -1 free, else 0/1
    std::vector<Candidate> found;
    long long lp_iterations = 0;
  };

  struct NodeOutcome {
    bool failed = false;
    std::vector<Node> children;
    int preferred_child = 0;
  };

  void WorkerLoop(int index);
  NodeOutcome Process(Worker& w, const Node& node, bool root, bool run_heuristic);
  void ApplyFixings(Worker& w, const Node& node);
  void Heuristic(Worker& w, std::span<const double> x);
  void FixAndWalk(Worker& w, std::vector<int> segment_of_cell);
  void Offer(Worker& w, std::vector<double> x);

  double PruneTolerance(double incumbent) const {
    return 1e-9 * std::max(1.0, std::abs(incumbent));
  }
  double GlobalBoundLocked() const;
  bool GapClosed(double bound) const;
  void PublishLocked(Worker& w);
  void ReportLocked(bool force);

  const MilpModel& model_;
  const BnbConfig& config_;
  const SparseLp& lp_;
  std::vector<int> integer_cols_;
  std::vector<double> spread_;  // per column: slope spread of its unit
  Clock::time_point start_;

  std::mutex mu_;
  std::condition_variable cv_;
  std::priority_queue<Node, std::vector<Node>, WorseNode> open_;
  std::vector<double> active_bound_;
  double failed_bound_ = kInfinity;
  Candidate incumbent_;
  long long nodes_ = 0;
  long long next_id_ = 1;
  long long lp_iterations_ = 0;
  double root_bound_ = -kInfinity;
  double reported_bound_ = -kInfinity;
  double last_report_ = -1.0;
  bool stop_ = false;
  bool limit_hit_ = false;
  bool root_infeasible_ = false;
};

Search::Search(const MilpModel& model, const BnbConfig& config)
    : model_(model), config_(config), lp_(model.lp) {
  spread_.assign(lp_.num_columns(), 0.0);
  for (int j = 0; j < lp_.num_columns(); ++j) {
    if (!lp_.integer()[j]) continue;
    integer_cols_.push_back(j);
    const int unit = model_.column_refs[j].unit;
    const std::vector<double>& k = model_.tables[unit].slopes;
    if (!k.empty()) {
      const auto [lo, hi] = std::minmax_element(k.begin(), k.end());
      spread_[j] = *hi - *lo;
    }
  }
}

bool Search::GapClosed(double bound) const {
  if (!std::isfinite(incumbent_.objective)) return false;
  const double diff = incumbent_.objective - bound;
  return diff <= config_.abs_gap ||
         diff / std::max(std::abs(incumbent_.objective), 1.0) <= config_.rel_gap;
}

double Search::GlobalBoundLocked() const {
  double bound = failed_bound_;
  if (!open_.empty()) bound = std::min(bound, open_.top().bound);
  for (double b : active_bound_) bound = std::min(bound, b);
  return std::min(bound, incumbent_.objective);
}

void Search::ReportLocked(bool force) {
  const double now = Seconds(start_);
  const double bound = std::max(reported_bound_, GlobalBoundLocked());
  reported_bound_ = bound;
  if (!config_.progress) return;
  if (!force && now - last_report_ < config_.progress_interval_seconds) return;
  last_report_ = now;
  BnbProgress p;
  p.nodes = nodes_;
  p.open_nodes = static_cast<long long>(open_.size());
  p.best_bound = bound;
  p.incumbent = incumbent_.objective;
  p.gap = std::isfinite(incumbent_.objective)
              ? (incumbent_.objective - bound) /
                    std::max(std::abs(incumbent_.objective), 1.0)
              : kInfinity;
  p.elapsed_seconds = now;
  config_.progress(p);
}

void Search::PublishLocked(Worker& w) {
  for (Candidate& c : w.found) {
    if (c.objective < incumbent_.objective - PruneTolerance(c.objective)) {
      incumbent_ = std::move(c);
    }
  }
  w.found.clear();
  lp_iterations_ += w.lp_iterations;
  w.lp_iterations = 0;
}

void Search::Offer(Worker& w, std::vector<double> x) {
  for (int j : integer_cols_) x[j] = std::round(x[j]);
  if (lp_.MaxViolation(x) > 1e-6) return;
  const double objective = lp_.Objective(x);
  for (const Candidate& c : w.found) {
    if (c.objective <= objective) return;
  }
  w.found.push_back({std::move(x), objective});
}

void Search::ApplyFixings(Worker& w, const Node& node) {
  for (int col : w.changed) {
    w.lp.SetColumnBounds(col, lp_.col_lower()[col], lp_.col_upper()[col]);
    w.fixed_value[col] = -1;
  }
  w.changed.clear();
  for (const Fixing* f = node.fixings.get(); f != nullptr; f = f->parent.get()) {
    for (int col = f->begin; col < f->end; ++col) {
      if (w.fixed_value[col] != -1) continue;
      w.fixed_value[col] = f->value;
      w.changed.push_back(col);
      w.lp.SetColumnBounds(col, f->value, f->value);
    }
  }
}

void Search::FixAndWalk(Worker& w, std::vector<int> segment_of_cell) {
  const int cells = model_.num_units * model_.num_periods;
  double last = kInfinity;
  for (int round = 0; round < 200; ++round) {
    for (int c = 0; c < cells; ++c) {
      const int first = model_.first_selector_col[c];
      if (first < 0) continue;
      const int segments = model_.num_segments(c % model_.num_units);
      for (int l = 0; l < segments; ++l) {
        const double v = l == segment_of_cell[c] ? 1.0 : 0.0;
        w.heuristic.SetColumnBounds(first + l, v, v);
      }
    }
    if (!w.heuristic_warm) w.heuristic.ResetToSlackBasis();
    LpSolution sol = w.heuristic.Solve();
    w.lp_iterations += sol.iterations;
    if (sol.status != LpStatus::kOptimal) {
      w.heuristic_warm = false;
      return;
    }
    w.heuristic_warm = true;
    if (sol.objective >= last - 1e-9 * std::max(1.0, std::abs(last))) return;
    last = sol.objective;
    Offer(w, sol.primal);

    // Move a cell to the neighbouring segment when its output sits on the
    // shared breakpoint and the LP would like to cross it. The current
    // point stays feasible, so the next LP can only be cheaper.
    bool moved = false;
    for (int c = 0; c < cells; ++c) {
      const int cvx = model_.convexity_row[c];
      if (cvx < 0) continue;
      const int unit = c % model_.num_units;
      const SegmentTable& table = model_.tables[unit];
      const int segments = table.num_segments();
      const int l = segment_of_cell[c];
      const double p = sol.primal[model_.output_col[c]];
      const double scale = 1e-7 * std::max(1.0, std::abs(p));
      const int slo = cvx - 2 * segments + 2 * l;
      const int sup = slo + 1;
      const int s_col = model_.first_segment_col[c] + l;
      if (l + 1 < segments && p >= table.breakpoints[l + 1] - scale) {
        double marginal = sol.row_duals[sup];
        if (sol.basis.status[s_col] == VarStatus::kAtUpper) {
          marginal += std::min(sol.reduced_costs[s_col], 0.0);
        }
        if (marginal < -1e-7) {
          segment_of_cell[c] = l + 1;
          moved = true;
          continue;
        }
      }
      if (l > 0 && p <= table.breakpoints[l] + scale && sol.row_duals[slo] > 1e-7) {
        segment_of_cell[c] = l - 1;
        moved = true;
      }
    }
    if (!moved) return;
  }
}

void Search::Heuristic(Worker& w, std::span<const double> x) {
  const int cells = model_.num_units * model_.num_periods;
  std::vector<int> segment(cells, 0);
  std::optional<Schedule> rounded = primal_heuristic_round(model_, x);
  if (rounded) {
    Offer(w, encode(model_, model_.instance, *rounded));
    for (int c = 0; c < cells; ++c) {
      const int unit = c % model_.num_units;
      if (model_.num_segments(unit) == 0) continue;
      segment[c] = model_.tables[unit].SegmentOf((*rounded)(unit, c / model_.num_units));
    }
  } else {
    for (int c = 0; c < cells; ++c) {
      const int first = model_.first_selector_col[c];
      if (first < 0) continue;
      const int segments = model_.num_segments(c % model_.num_units);
      int best = 0;
      for (int l = 1; l < segments; ++l) {
        if (x[first + l] > x[first + best]) best = l;
      }
      segment[c] = best;
    }
  }
  FixAndWalk(w, std::move(segment));
}

Search::NodeOutcome Search::Process(Worker& w, const Node& node, bool root,
                                    bool run_heuristic) {
  NodeOutcome out;
  ApplyFixings(w, node);
  if (node.basis) w.lp.LoadBasis(node.basis->Unpack());
  LpSolution sol = w.lp.Solve();
  w.lp_iterations += sol.iterations;
  if (sol.status == LpStatus::kIterationLimit) {
    w.lp.ResetToSlackBasis();
    sol = w.lp.Solve();
    w.lp_iterations += sol.iterations;
  }
  if (sol.status == LpStatus::kInfeasible) return out;
  if (sol.status != LpStatus::kOptimal) {
    out.failed = true;
    return out;
  }
  const double bound = std::max(sol.objective, node.bound);
  if (root) {
    std::lock_guard<std::mutex> lock(mu_);
    root_bound_ = bound;
  }

  int branch_col = -1;
  double best_frac = 0.0;
  for (int j : integer_cols_) {
    const double z = sol.primal[j];
    const double frac = std::min(z - std::floor(z), std::ceil(z) - z);
    if (frac <= config_.integrality_tol) continue;
    if (branch_col == -1 || frac > best_frac + 1e-9 ||
        (frac > best_frac - 1e-9 && spread_[j] > spread_[branch_col])) {
      branch_col = j;
      best_frac = frac;
    }
  }
  if (branch_col == -1) {
    Offer(w, sol.primal);
    return out;
  }
  if (config_.heuristics && run_heuristic) Heuristic(w, sol.primal);

  auto basis = std::make_shared<const PackedBasis>(sol.basis);
  auto add_child = [&](int begin, int end, int value) {
    Node child;
    child.bound = bound;
    child.depth = node.depth + 1;
    child.fixings = std::make_shared<const Fixing>(Fixing{node.fixings, begin, end, value});
    child.basis = basis;
    out.children.push_back(std::move(child));
  };
  if (config_.branching == BranchingRule::kMostFractional) {
    add_child(branch_col, branch_col + 1, 0);
    add_child(branch_col, branch_col + 1, 1);
    out.preferred_child = sol.primal[branch_col] >= 0.5 ? 1 : 0;
    return out;
  }
  // Split the cell's segments at the selector-weighted mean index: the
  // left child keeps segments 0..r, the right child r+1..L-1.
  const ColumnRef& ref = model_.column_refs[branch_col];
  const int cell = model_.cell(ref.unit, ref.period);
  const int first = model_.first_selector_col[cell];
  const int segments = model_.num_segments(ref.unit);
  double mean = 0.0;
  double left_weight = 0.0;
  for (int l = 0; l < segments; ++l) mean += l * sol.primal[first + l];
  const int r = std::clamp(static_cast<int>(std::floor(mean)), 0, segments - 2);
  for (int l = 0; l <= r; ++l) left_weight += sol.primal[first + l];
  add_child(first + r + 1, first + segments, 0);
  add_child(first, first + r + 1, 0);
  out.preferred_child = left_weight >= 0.5 ? 0 : 1;
  return out;
}

void Search::WorkerLoop(int index) {
  Worker w(lp_, config_.lp);
  w.fixed_value.assign(lp_.num_columns(), -1);

  Node node;
  bool have = false;
  std::unique_lock<std::mutex> lock(mu_);
  while (true) {
    if (!have) {
      while (!stop_ && open_.empty() &&
             std::any_of(active_bound_.begin(), active_bound_.end(),
                         [](double b) { return b < kInfinity; })) {
        cv_.wait(lock);
      }
      if (stop_ || open_.empty()) break;
      node = open_.top();
      open_.pop();
      have = true;
    }
    if (stop_) break;
    active_bound_[index] = node.bound;

    const double global = GlobalBoundLocked();
    if (GapClosed(global)) {
      stop_ = true;
      break;
    }
    const bool out_of_nodes = config_.node_limit > 0 && nodes_ >= config_.node_limit;
    const bool out_of_time = config_.time_limit_seconds > 0 &&
                             Seconds(start_) >= config_.time_limit_seconds;
    if (out_of_nodes || out_of_time) {
      stop_ = true;
      limit_hit_ = true;
      break;
    }
    if (node.bound >= incumbent_.objective - PruneTolerance(incumbent_.objective)) {
      have = false;
      active_bound_[index] = kInfinity;
      cv_.notify_all();
      continue;
    }
    const bool root = nodes_ == 0;
    ++nodes_;
    const bool run_heuristic =
        root || (config_.heuristic_frequency > 0 && nodes_ % config_.heuristic_frequency == 0);
    lock.unlock();

    NodeOutcome outcome = Process(w, node, root, run_heuristic);

    lock.lock();
    PublishLocked(w);
    if (root && outcome.children.empty() && !outcome.failed &&
        !std::isfinite(incumbent_.objective)) {
      root_infeasible_ = true;
    }
    if (outcome.failed) failed_bound_ = std::min(failed_bound_, node.bound);
    have = false;
    if (!outcome.children.empty()) {
      for (Node& child : outcome.children) child.id = next_id_++;
      const bool plunge =
          config_.node_selection == NodeSelection::kDepthFirst ||
          (config_.node_selection == NodeSelection::kBestBoundPlunge &&
           !std::isfinite(incumbent_.objective));
      for (int k = 0; k < 2; ++k) {
        if (plunge && k == outcome.preferred_child) continue;
        open_.push(std::move(outcome.children[k]));
      }
      if (plunge) {
        node = std::move(outcome.children[outcome.preferred_child]);
        have = true;
      }
    }
    active_bound_[index] = have ? node.bound : kInfinity;
    ReportLocked(false);
    cv_.notify_all();
  }
  if (have) open_.push(std::move(node));
  active_bound_[index] = kInfinity;
  stop_ = true;
  cv_.notify_all();
}

BnbResult Search::Run() {
  start_ = Clock::now();
  const int threads = std::max(1, config_.threads);
  active_bound_.assign(threads, kInfinity);
  open_.push(Node{});

  if (threads == 1) {
    WorkerLoop(0);
  } else {
    std::vector<std::thread> pool;
    for (int k = 0; k < threads; ++k) pool.emplace_back([this, k] { WorkerLoop(k); });
    for (std::thread& t : pool) t.join();
  }

  std::lock_guard<std::mutex> lock(mu_);
  ReportLocked(true);
  BnbResult result;
  result.nodes = nodes_;
  result.lp_iterations = lp_iterations_;
  result.root_bound = root_bound_;
  result.seconds = Seconds(start_);
  // Open nodes that cannot beat the incumbent count as explored.
  double remaining = failed_bound_;
  if (!open_.empty()) remaining = std::min(remaining, open_.top().bound);
  const bool exhausted =
      !std::isfinite(remaining) ||
      (std::isfinite(incumbent_.objective) &&
       remaining >= incumbent_.objective - PruneTolerance(incumbent_.objective));
  if (!std::isfinite(incumbent_.objective)) {
    result.status = (exhausted || root_infeasible_) && !limit_hit_
                        ? BnbStatus::kInfeasible
                        : BnbStatus::kLimit;
    result.best_bound = exhausted ? kInfinity : GlobalBoundLocked();
    return result;
  }
  result.incumbent_objective = incumbent_.objective;
  result.incumbent_solution = incumbent_.x;
  result.incumbent = decode(model_, incumbent_.x, config_.integrality_tol);
  result.best_bound = exhausted ? incumbent_.objective
                                : std::max(reported_bound_, GlobalBoundLocked());
  result.best_bound = std::min(result.best_bound, incumbent_.objective);
  result.gap = (incumbent_.objective - result.best_bound) /
               std::max(std::abs(incumbent_.objective), 1.0);
  if (exhausted) {
    result.status = BnbStatus::kProvenOptimal;
  } else if (GapClosed(result.best_bound)) {
    result.status = BnbStatus::kGapReached;
  } else {
    result.status = BnbStatus::kLimit;
  }
  return result;
}

}  // namespace

BnbResult solve_milp(const MilpModel& model, const BnbConfig& config) {
  if (!(config.rel_gap >= 0.0) || !(config.abs_gap >= 0.0)) {
    throw std::invalid_argument("solve_milp: gaps must be non-negative");
  }
  if (config.node_limit < 0 || config.time_limit_seconds < 0.0 || config.threads < 1 ||
      !(config.integrality_tol > 0.0)) {
    throw std::invalid_argument("solve_milp: limits must be positive");
  }
  Search search(model, config);
  return search.Run();
}

std::optional<Schedule> primal_heuristic_round(const MilpModel& model,
                                               std::span<const double> x) {
  const Instance& inst = model.instance;
  const int n = model.num_units;
  Schedule schedule(n, model.num_periods);
  std::vector<double> lo(n), hi(n), wide_lo(n), wide_hi(n), slope(n);
  std::vector<int> order(n);

  for (int t = 0; t < model.num_periods; ++t) {
    double total = 0.0;
    for (int i = 0; i < n; ++i) {
      const UnitParams& u = inst.units[i];
      const SegmentTable& table = model.tables[i];
      wide_lo[i] = u.p_min;
      wide_hi[i] = u.p_max;
      const std::optional<double> prev =
          t > 0 ? std::optional<double>(schedule(i, t - 1)) : u.initial_output;
      if (prev) {
        wide_lo[i] = std::max(wide_lo[i], *prev - u.ramp_down);
        wide_hi[i] = std::min(wide_hi[i], *prev + u.ramp_up);
      }
      if (wide_lo[i] > wide_hi[i]) return std::nullopt;
      lo[i] = wide_lo[i];
      hi[i] = wide_hi[i];
      const int segments = table.num_segments();
      int l = 0;
      if (segments > 0) {
        const int first = model.SelectorColumn(i, t, 0);
        for (int k = 1; k < segments; ++k) {
          if (x[first + k] > x[first + l]) l = k;
        }
        const double seg_lo = std::max(lo[i], table.breakpoints[l]);
        const double seg_hi = std::min(hi[i], table.breakpoints[l + 1]);
        if (seg_lo <= seg_hi) {
          lo[i] = seg_lo;
          hi[i] = seg_hi;
        }
        slope[i] = table.slopes[l];
      } else {
        slope[i] = 0.0;
      }
      const double p = std::clamp(x[model.OutputColumn(i, t)], lo[i], hi[i]);
      schedule(i, t) = p;
      total += p;
    }

    double deficit = inst.demand[t] - total;
    const double tol = 1e-9 * std::max(1.0, inst.demand[t]);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](int a, int b) { return slope[a] < slope[b]; });
    if (deficit < 0.0) std::reverse(order.begin(), order.end());
    // First inside the chosen segments, then across the full ramp window.
    for (int pass = 0; pass < 2 && std::abs(deficit) > tol; ++pass) {
      const std::vector<double>& top = pass == 0 ? hi : wide_hi;
      const std::vector<double>& bottom = pass == 0 ? lo : wide_lo;
      for (int i : order) {
        if (std::abs(deficit) <= tol) break;
        const double p = schedule(i, t);
        const double q = deficit > 0.0 ? std::min(top[i], p + deficit)
                                       : std::max(bottom[i], p + deficit);
        schedule(i, t) = q;
        deficit -= q - p;
      }
    }
    if (std::abs(deficit) > tol) return std::nullopt;
    // Put any rounding residue on a unit with room for it.
    for (int i : order) {
      const double q = std::clamp(schedule(i, t) + deficit, wide_lo[i], wide_hi[i]);
      deficit -= q - schedule(i, t);
      schedule(i, t) = q;
      if (deficit == 0.0) break;
    }
  }
  return schedule;
}

}  // namespace dedvpe
