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

#include "dedvpe/hybrid.h"

#include <algorithm>
#include <chrono>
#include <cmath>

#include "dedvpe/errors.h"
#include "dedvpe/milp_builder.h"

namespace dedvpe {
namespace {

double SecondsSince(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() -
                                       start)
      .count();
}

}  // namespace

ChangeStatistics change_statistics(const Schedule& before,
                                   const Schedule& after,
                                   const std::vector<double>& edges,
                                   double same_tol) {
  if (before.num_units() != after.num_units() ||
      before.num_periods() != after.num_periods()) {
    throw DomainError("schedules differ in shape");
  }
  if (!std::is_sorted(edges.begin(), edges.end())) {
    throw std::invalid_argument("change edges must be ascending");
  }
  ChangeStatistics stats;
  stats.edges = edges;
  stats.counts.assign(edges.size() + 1, 0);
  for (int t = 0; t < before.num_periods(); ++t) {
    for (int i = 0; i < before.num_units(); ++i) {
      const double d = std::abs(after(i, t) - before(i, t));
      ++stats.total;
      stats.max_change = std::max(stats.max_change, d);
      if (d <= same_tol) {
        ++stats.unchanged;
        continue;
      }
      const auto it = std::lower_bound(edges.begin(), edges.end(), d);
      ++stats.counts[it - edges.begin()];
    }
  }
  return stats;
}

std::string ToString(HybridStatus status) {
  switch (status) {
    case HybridStatus::kOptimal:
      return "local-optimum";
    case HybridStatus::kFallback:
      return "fallback";
    case HybridStatus::kInfeasible:
      return "infeasible";
  }
  return "unknown";
}

std::string ToString(ColdStart start) {
  switch (start) {
    case ColdStart::kFlatMidpoint:
      return "flat-midpoint";
    case ColdStart::kProportional:
      return "proportional";
  }
  return "unknown";
}

Instance audited_instance(const Instance& instance, bool include_loss,
                          bool reserve) {
  Instance copy = instance;
  if (!include_loss) copy.b_matrix.reset();
  copy.reserve_enabled = reserve;
  return copy;
}

HybridReport solve_hybrid(const Instance& instance,
                          const HybridConfig& config) {
  const auto start = std::chrono::steady_clock::now();
  MilpModel model =
      build_milp(instance, config.segments, config.reserve, config.placement);
  BnbResult step1 = solve_milp(model, config.bnb);
  return refine_hybrid(instance, step1, SecondsSince(start), config);
}

HybridReport refine_hybrid(const Instance& instance, const BnbResult& step1,
                           double step1_seconds, const HybridConfig& config) {
  const bool loss = config.include_loss && instance.has_loss();
  const Instance audited = audited_instance(instance, loss, config.reserve);
  HybridReport report;
  report.step1 = step1;
  report.step1_seconds = step1_seconds;
  report.total_seconds = step1_seconds;
  if (!report.step1.incumbent.has_value()) {
    report.status = HybridStatus::kInfeasible;
    return report;
  }
  const Schedule& first = *report.step1.incumbent;
  report.step1_cost = total_cost(instance, first);

  const auto step2_start = std::chrono::steady_clock::now();
  NlpProblem problem = build_nlp(instance, loss, config.reserve);
  report.step2 = solve_nlp(problem, first, config.ipm);
  report.step2_seconds = SecondsSince(step2_start);

  AuditReport refined = audit(audited, report.step2->schedule);
  if (report.step2->status == IpmStatus::kLocalOptimum && refined.pass) {
    report.status = HybridStatus::kOptimal;
    report.schedule = report.step2->schedule;
    report.audit = std::move(refined);
  } else {
    report.status = HybridStatus::kFallback;
    report.schedule = first;
    report.audit = audit(audited, first);
  }
  report.cost = total_cost(instance, *report.schedule);
  report.changes =
      change_statistics(first, *report.schedule, config.change_edges);
  report.total_seconds = step1_seconds + report.step2_seconds;
  return report;
}

Schedule cold_start(const Instance& instance, ColdStart start) {
  const int n = instance.num_units();
  const int periods = instance.num_periods();
  Schedule sched(n, periods);
  double low = 0.0, range = 0.0;
  for (const UnitParams& u : instance.units) {
    low += u.p_min;
    range += u.range();
  }
  for (int t = 0; t < periods; ++t) {
    const double share =
        range > 0.0 ? std::clamp((instance.demand[t] - low) / range, 0.0, 1.0)
                    : 0.0;
    for (int i = 0; i < n; ++i) {
      const UnitParams& u = instance.units[i];
      sched(i, t) = start == ColdStart::kFlatMidpoint
                        ? 0.5 * (u.p_min + u.p_max)
                        : u.p_min + share * u.range();
    }
  }
  return sched;
}

IpmResult solve_single_ipm(const Instance& instance, bool include_loss,
                           bool reserve, const IpmConfig& config,
                           ColdStart start) {
  NlpProblem problem =
      build_nlp(instance, include_loss && instance.has_loss(), reserve);
  return solve_nlp(problem, cold_start(instance, start), config);
}

}  // namespace dedvpe
