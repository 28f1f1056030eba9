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

#include "dedvpe/schedule_io.h"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>

#include "dedvpe/cost.h"
#include "dedvpe/errors.h"
#include "dedvpe/instance_io.h"

namespace dedvpe {
namespace {

std::string Fixed(double value, int decimals) {
  if (decimals < 0) return format_double(value);
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.*f", decimals, value);
  std::string s = buf;
  // Avoid "-0.0000".
  if (s.front() == '-' && s.find_first_not_of("-0.") == std::string::npos) {
    s.erase(0, 1);
  }
  return s;
}

std::string OnOff(bool value) { return value ? "on" : "off"; }

}  // namespace

ScheduleFile make_schedule_file(const Instance& instance,
                                const Schedule& schedule, bool loss,
                                bool reserve) {
  Instance audited = instance;
  if (!loss) audited.b_matrix.reset();
  audited.reserve_enabled = reserve;
  const AuditReport report = audit(audited, schedule);
  ScheduleFile file;
  file.loss = loss;
  file.reserve = reserve;
  file.schedule = schedule;
  file.loss_column = report.loss;
  file.delta_p_column = report.balance_violation;
  return file;
}

std::string serialize_schedule(const ScheduleFile& file, int decimals) {
  std::ostringstream out;
  out << "# dedvpe schedule\n[header]\n";
  if (!file.instance_hash.empty()) out << "instance " << file.instance_hash << "\n";
  out << "units " << file.schedule.num_units() << "\n";
  if (!file.method.empty()) out << "method " << file.method << "\n";
  out << "loss " << OnOff(file.loss) << "\n";
  out << "reserve " << OnOff(file.reserve) << "\n";
  auto optional = [&](const char* key, const std::optional<double>& v) {
    if (v.has_value()) out << key << " " << format_double(*v) << "\n";
  };
  optional("objective", file.objective);
  optional("gap", file.gap);
  optional("step1_seconds", file.step1_seconds);
  optional("step2_seconds", file.step2_seconds);
  optional("total_seconds", file.total_seconds);
  out << "[dispatch]\n# t";
  const int n = file.schedule.num_units();
  for (int i = 0; i < n; ++i) out << " P" << i + 1;
  const bool columns = !file.loss_column.empty();
  if (columns) out << " loss dP";
  out << "\n";
  for (int t = 0; t < file.schedule.num_periods(); ++t) {
    out << t + 1;
    for (int i = 0; i < n; ++i) out << " " << Fixed(file.schedule(i, t), decimals);
    if (columns) {
      out << " " << Fixed(file.loss_column[t], decimals) << " "
          << Fixed(file.delta_p_column[t], decimals);
    }
    out << "\n";
  }
  return out.str();
}

ScheduleFile parse_schedule(std::string_view text) {
  ScheduleFile file;
  std::string section;
  std::vector<std::vector<double>> rows;
  int width = -1;
  int units = 0;
  int line_no = 0;
  size_t pos = 0;
  bool seen_header = false;
  bool seen_dispatch = false;
  std::vector<std::string> seen_keys;

  while (pos <= text.size()) {
    size_t eol = text.find('\n', pos);
    if (eol == std::string_view::npos) eol = text.size();
    std::string_view line = text.substr(pos, eol - pos);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    pos = eol + 1;
    ++line_no;
    const std::vector<std::string_view> tok = tokenize_line(line);
    if (tok.empty()) continue;

    if (tok[0].front() == '[') {
      if (tok.size() != 1 || tok[0].back() != ']') {
        throw ParseError(line_no, section, "malformed section header");
      }
      const std::string name(tok[0].substr(1, tok[0].size() - 2));
      if (name == "header" && !seen_header && !seen_dispatch) {
        seen_header = true;
      } else if (name == "dispatch" && !seen_dispatch) {
        seen_dispatch = true;
      } else {
        throw ParseError(line_no, name,
                         "unknown, repeated or out-of-order section");
      }
      section = name;
      continue;
    }
    if (section.empty()) {
      throw ParseError(line_no, "", "data before the first section");
    }

    if (section == "header") {
      if (tok.size() != 2) {
        throw ParseError(line_no, section, "expected `key value`");
      }
      const std::string key(tok[0]);
      if (std::find(seen_keys.begin(), seen_keys.end(), key) != seen_keys.end()) {
        throw ParseError(line_no, section, "repeated key " + key);
      }
      seen_keys.push_back(key);
      const std::string_view value = tok[1];
      auto number = [&]() {
        double v;
        if (!parse_number(value, &v)) {
          throw ParseError(line_no, section, "bad number for " + key);
        }
        return v;
      };
      auto flag = [&]() {
        if (value == "on") return true;
        if (value == "off") return false;
        throw ParseError(line_no, section, key + " must be on or off");
      };
      if (key == "instance") {
        file.instance_hash = value;
      } else if (key == "units") {
        const double v = number();
        if (v < 1 || v != std::floor(v)) {
          throw ParseError(line_no, section, "units must be a positive integer");
        }
        units = static_cast<int>(v);
      } else if (key == "method") {
        file.method = value;
      } else if (key == "loss") {
        file.loss = flag();
      } else if (key == "reserve") {
        file.reserve = flag();
      } else if (key == "objective") {
        file.objective = number();
      } else if (key == "gap") {
        file.gap = number();
      } else if (key == "step1_seconds") {
        file.step1_seconds = number();
      } else if (key == "step2_seconds") {
        file.step2_seconds = number();
      } else if (key == "total_seconds") {
        file.total_seconds = number();
      } else {
        throw ParseError(line_no, section, "unknown key " + key);
      }
      continue;
    }

    // dispatch
    if (width < 0) {
      width = static_cast<int>(tok.size());
      if (width < 2) throw ParseError(line_no, section, "row too short");
    } else if (static_cast<int>(tok.size()) != width) {
      throw ParseError(line_no, section,
                       "expected " + std::to_string(width) + " fields, found " +
                           std::to_string(tok.size()));
    }
    std::vector<double> v(tok.size());
    for (size_t k = 0; k < tok.size(); ++k) {
      if (!parse_number(tok[k], &v[k])) {
        throw ParseError(line_no, section,
                         "non-numeric token '" + std::string(tok[k]) + "'");
      }
    }
    if (v[0] != static_cast<double>(rows.size() + 1)) {
      throw ParseError(line_no, section,
                       "periods must be numbered 1, 2, ... in order");
    }
    rows.push_back(std::move(v));
  }
  if (units <= 0) throw ParseError(line_no, "header", "missing `units N`");
  if (!seen_dispatch || rows.empty()) {
    throw ParseError(line_no, "dispatch", "no dispatch rows");
  }
  // `t P_1..P_N` or `t P_1..P_N loss dP`.
  const int n = units;
  if (width != n + 1 && width != n + 3) {
    throw ParseError(line_no, "dispatch",
                     "rows must have " + std::to_string(n + 1) + " or " +
                         std::to_string(n + 3) + " fields for " +
                         std::to_string(n) + " units");
  }
  const bool columns = width == n + 3;
  file.schedule = Schedule(n, static_cast<int>(rows.size()));
  for (size_t t = 0; t < rows.size(); ++t) {
    for (int i = 0; i < n; ++i) file.schedule(i, static_cast<int>(t)) = rows[t][i + 1];
    if (columns) {
      file.loss_column.push_back(rows[t][n + 1]);
      file.delta_p_column.push_back(rows[t][n + 2]);
    }
  }
  return file;
}

ScheduleFile read_schedule_file(const std::string& path) {
  return parse_schedule(read_text_file(path));
}

ScheduleCheck check_schedule(const Instance& instance, const ScheduleFile& file,
                             const Tolerances& tol) {
  check_dimensions(instance, file.schedule);
  if (file.loss && !instance.has_loss()) {
    throw ConfigError("schedule was written with loss; instance has no B-matrix");
  }
  if (file.reserve && !instance.reserve_req.has_value()) {
    throw ConfigError("schedule was written with reserve; instance has none");
  }
  Instance audited = instance;
  if (!file.loss) audited.b_matrix.reset();
  audited.reserve_enabled = file.reserve;
  ScheduleCheck check;
  check.audit = audit(audited, file.schedule, tol);
  check.cost = total_cost(instance, file.schedule);
  check.hash_matches =
      file.instance_hash.empty() || file.instance_hash == instance_hash(instance);
  for (size_t t = 0; t < file.loss_column.size(); ++t) {
    check.max_loss_mismatch = std::max(
        check.max_loss_mismatch, std::abs(file.loss_column[t] - check.audit.loss[t]));
    check.max_delta_p_mismatch =
        std::max(check.max_delta_p_mismatch,
                 std::abs(file.delta_p_column[t] -
                          check.audit.balance_violation[t]));
  }
  if (file.objective.has_value()) {
    check.objective_mismatch = std::abs(check.cost - *file.objective) /
                               std::max(1.0, std::abs(*file.objective));
  }
  check.pass = check.audit.pass && check.hash_matches &&
               check.max_loss_mismatch <= kLossColumnTolerance &&
               check.max_delta_p_mismatch <= kDeltaPColumnTolerance &&
               check.objective_mismatch <= kObjectiveTolerance;
  return check;
}

}  // namespace dedvpe
