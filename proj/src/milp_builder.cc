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

#include "dedvpe/milp_builder.h"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "dedvpe/errors.h"
#include "dedvpe/feasibility.h"

namespace dedvpe {
namespace {

std::string Name(const char* symbol, std::initializer_list<int> idx) {
  std::string s = symbol;
  s += '(';
  bool first = true;
  for (int v : idx) {
    if (!first) s += ',';
    s += std::to_string(v + 1);
    first = false;
  }
  s += ')';
  return s;
}

}  // namespace

MilpSize milp_size(const Instance& instance, int segments_per_half_period,
                   bool reserve) {
  const int n = instance.num_units();
  const int periods = instance.num_periods();
  MilpSize size;
  int per_period_cols = 0;
  int per_period_rows = 0;
  int segments = 0;
  int with_initial = 0;
  for (const UnitParams& u : instance.units) {
    const int l = segment_count(u, segments_per_half_period);
    per_period_cols += 1 + 2 * l;
    if (l > 0) per_period_rows += 2 + 2 * l;
    segments += l;
    if (u.initial_output) ++with_initial;
  }
  size.columns = periods * per_period_cols;
  size.rows = periods * per_period_rows + periods + n * (periods - 1) +
              with_initial;
  size.binaries = periods * segments;
  if (reserve) {
    size.columns += n * periods;
    size.rows += n * periods + periods;
  }
  return size;
}

MilpModel build_milp(const Instance& instance, int segments_per_half_period,
                     bool reserve, BreakpointPlacement placement) {
  const std::vector<std::string> problems = validate(instance);
  if (!problems.empty()) {
    throw BuildError("invalid instance: " + problems.front());
  }
  if (reserve && (!instance.reserve_req || !(instance.tau > 0.0))) {
    throw BuildError("reserve requested but the instance has no reserve data");
  }
  const int n = instance.num_units();
  const int periods = instance.num_periods();

  MilpModel model;
  model.instance = instance;
  model.num_units = n;
  model.num_periods = periods;
  model.tables.reserve(n);
  for (const UnitParams& u : instance.units) {
    model.tables.push_back(build_segments(u, segments_per_half_period, placement));
  }
  const int cells = n * periods;
  model.output_col.assign(cells, -1);
  model.first_segment_col.assign(cells, -1);
  model.first_selector_col.assign(cells, -1);
  model.convexity_row.assign(cells, -1);
  if (reserve) model.reserve_col.assign(cells, -1);

  SparseLp& lp = model.lp;
  double offset = 0.0;

  for (int t = 0; t < periods; ++t) {
    for (int i = 0; i < n; ++i) {
      const UnitParams& u = instance.units[i];
      const SegmentTable& table = model.tables[i];
      const int c = model.cell(i, t);
      const int segments = table.num_segments();

      model.output_col[c] =
          lp.AddColumn(u.p_min, u.p_max, 0.0, false, Name("P", {i, t}));
      model.column_refs.push_back({ColumnKind::kOutput, i, t, -1});
      if (segments == 0) {
        offset += table.fixed_cost;
      } else {
        model.first_segment_col[c] = lp.num_columns();
        for (int l = 0; l < segments; ++l) {
          lp.AddColumn(0.0, table.breakpoints[l + 1], table.slopes[l], false,
                       Name("S", {l, i, t}));
          model.column_refs.push_back({ColumnKind::kSegment, i, t, l});
        }
        model.first_selector_col[c] = lp.num_columns();
        for (int l = 0; l < segments; ++l) {
          lp.AddColumn(0.0, 1.0, table.intercepts[l], true,
                       Name("Z", {l, i, t}));
          model.column_refs.push_back({ColumnKind::kSelector, i, t, l});
        }
      }
      if (reserve) {
        model.reserve_col[c] = lp.AddColumn(0.0, instance.tau * u.ramp_up, 0.0,
                                            false, Name("R", {i, t}));
        model.column_refs.push_back({ColumnKind::kReserve, i, t, -1});
      }

      if (segments == 0) continue;
      const int link = lp.AddRow(0.0, 0.0, Name("LNK", {i, t}));
      lp.AddCoefficient(link, model.output_col[c], 1.0);
      for (int l = 0; l < segments; ++l) {
        lp.AddCoefficient(link, model.SegmentColumn(i, t, l), -1.0);
      }
      for (int l = 0; l < segments; ++l) {
        const int s_col = model.SegmentColumn(i, t, l);
        const int z_col = model.SelectorColumn(i, t, l);
        const int lo = lp.AddRow(0.0, kInfinity, Name("SLO", {l, i, t}));
        lp.AddCoefficient(lo, s_col, 1.0);
        if (table.breakpoints[l] != 0.0) {
          lp.AddCoefficient(lo, z_col, -table.breakpoints[l]);
        }
        const int hi = lp.AddRow(-kInfinity, 0.0, Name("SUP", {l, i, t}));
        lp.AddCoefficient(hi, s_col, 1.0);
        lp.AddCoefficient(hi, z_col, -table.breakpoints[l + 1]);
      }
      const int cvx = lp.AddRow(1.0, 1.0, Name("CVX", {i, t}));
      for (int l = 0; l < segments; ++l) {
        lp.AddCoefficient(cvx, model.SelectorColumn(i, t, l), 1.0);
      }
      model.convexity_row[c] = cvx;
    }
  }

  for (int t = 0; t < periods; ++t) {
    const int bal = lp.AddRow(instance.demand[t], instance.demand[t],
                              Name("BAL", {t}));
    for (int i = 0; i < n; ++i) lp.AddCoefficient(bal, model.OutputColumn(i, t), 1.0);
  }

  for (int i = 0; i < n; ++i) {
    const UnitParams& u = instance.units[i];
    if (u.initial_output) {
      const double lo = *u.initial_output - u.ramp_down;
      const double hi = *u.initial_output + u.ramp_up;
      if (std::max(lo, u.p_min) > std::min(hi, u.p_max)) {
        std::ostringstream msg;
        msg << "unit " << i + 1
            << ": initial output and ramp limits exclude [p_min, p_max]";
        throw BuildError(msg.str());
      }
      const int row = lp.AddRow(lo, hi, Name("RMP", {i, 0}));
      lp.AddCoefficient(row, model.OutputColumn(i, 0), 1.0);
    }
    for (int t = 1; t < periods; ++t) {
      const int row = lp.AddRow(-u.ramp_down, u.ramp_up, Name("RMP", {i, t}));
      lp.AddCoefficient(row, model.OutputColumn(i, t - 1), -1.0);
      lp.AddCoefficient(row, model.OutputColumn(i, t), 1.0);
    }
  }

  if (reserve) {
    for (int t = 0; t < periods; ++t) {
      for (int i = 0; i < n; ++i) {
        const int row = lp.AddRow(-kInfinity, instance.units[i].p_max,
                                  Name("RSV", {i, t}));
        lp.AddCoefficient(row, model.reserve_col[model.cell(i, t)], 1.0);
        lp.AddCoefficient(row, model.OutputColumn(i, t), 1.0);
      }
      const int req = lp.AddRow((*instance.reserve_req)[t], kInfinity,
                                Name("RRQ", {t}));
      for (int i = 0; i < n; ++i) {
        lp.AddCoefficient(req, model.reserve_col[model.cell(i, t)], 1.0);
      }
    }
  }

  lp.SetObjectiveOffset(offset);
  const std::vector<std::string> lp_problems = lp.Validate();
  if (!lp_problems.empty()) throw BuildError(lp_problems.front());
  return model;
}

Schedule decode(const MilpModel& model, std::span<const double> solution,
                double integrality_tol) {
  if (static_cast<int>(solution.size()) != model.lp.num_columns()) {
    throw DecodeError("solution length does not match the model");
  }
  Schedule schedule(model.num_units, model.num_periods);
  for (int t = 0; t < model.num_periods; ++t) {
    for (int i = 0; i < model.num_units; ++i) {
      const double p = solution[model.OutputColumn(i, t)];
      schedule(i, t) = p;
      const int segments = model.num_segments(i);
      if (segments == 0) continue;
      double segment_sum = 0.0;
      double selector_sum = 0.0;
      for (int l = 0; l < segments; ++l) {
        segment_sum += solution[model.SegmentColumn(i, t, l)];
        const double z = solution[model.SelectorColumn(i, t, l)];
        if (std::min(std::abs(z), std::abs(z - 1.0)) > integrality_tol) {
          std::ostringstream msg;
          msg << "fractional selector Z(" << l + 1 << "," << i + 1 << ","
              << t + 1 << ") = " << z;
          throw DecodeError(msg.str());
        }
        selector_sum += z;
      }
      if (std::abs(selector_sum - 1.0) > integrality_tol) {
        std::ostringstream msg;
        msg << "convexity row violated for unit " << i + 1 << ", period "
            << t + 1;
        throw DecodeError(msg.str());
      }
      if (std::abs(segment_sum - p) > 1e-7 * std::max(1.0, std::abs(p))) {
        std::ostringstream msg;
        msg << "P(" << i + 1 << "," << t + 1
            << ") differs from the sum of its segments";
        throw DecodeError(msg.str());
      }
    }
  }
  return schedule;
}

std::vector<double> encode(const MilpModel& model, const Instance& instance,
                           const Schedule& schedule) {
  check_dimensions(instance, schedule);
  std::vector<double> x(model.lp.num_columns(), 0.0);
  for (int t = 0; t < model.num_periods; ++t) {
    for (int i = 0; i < model.num_units; ++i) {
      const double p = schedule(i, t);
      x[model.OutputColumn(i, t)] = p;
      const SegmentTable& table = model.tables[i];
      if (table.num_segments() > 0) {
        const int l = table.SegmentOf(p);
        x[model.SegmentColumn(i, t, l)] = p;
        x[model.SelectorColumn(i, t, l)] = 1.0;
      }
      if (!model.reserve_col.empty()) {
        x[model.reserve_col[model.cell(i, t)]] =
            reserve_capability(instance.units[i], p, instance.tau);
      }
    }
  }
  return x;
}

}  // namespace dedvpe
