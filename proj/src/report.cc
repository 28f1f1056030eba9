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

#include "dedvpe/report.h"

#include <sstream>
#include <stdexcept>
#include <vector>

#include "dedvpe/errors.h"
#include "dedvpe/instance_io.h"

namespace dedvpe {

double scaled_minutes(double minutes, double base_ghz, double given_ghz) {
  if (!(base_ghz > 0.0) || !(given_ghz > 0.0)) {
    throw std::invalid_argument("CPU speeds must be positive");
  }
  return given_ghz / base_ghz * minutes;
}

std::string report(const RunSummary& s) {
  std::ostringstream out;
  auto text = [&](const char* key, const std::string& v) {
    if (!v.empty()) out << key << " " << v << "\n";
  };
  text("instance", s.instance);
  text("method", s.method);
  text("status", s.status);
  out << "cost " << format_double(s.cost) << "\n";
  if (s.gap.has_value()) out << "gap " << format_double(*s.gap) << "\n";
  out << "max_delta_p " << format_double(s.max_delta_p) << "\n";
  out << "minutes " << format_double(s.minutes) << "\n";
  out << "base_ghz " << format_double(s.base_ghz) << "\n";
  out << "given_ghz " << format_double(s.given_ghz) << "\n";
  out << "s_time_minutes " << format_double(s.s_time()) << "\n";
  return out.str();
}

RunSummary parse_report(std::string_view text) {
  RunSummary s;
  int line_no = 0;
  size_t pos = 0;
  while (pos <= text.size()) {
    size_t eol = text.find('\n', pos);
    if (eol == std::string_view::npos) eol = text.size();
    const std::string_view line = text.substr(pos, eol - pos);
    pos = eol + 1;
    ++line_no;
    const std::vector<std::string_view> tok = tokenize_line(line);
    if (tok.empty()) continue;
    if (tok.size() != 2) throw ParseError(line_no, "", "expected `key value`");
    const std::string key(tok[0]);
    double v = 0.0;
    const bool numeric = parse_number(tok[1], &v);
    auto need = [&]() {
      if (!numeric) throw ParseError(line_no, "", "bad number for " + key);
      return v;
    };
    if (key == "instance") s.instance = tok[1];
    else if (key == "method") s.method = tok[1];
    else if (key == "status") s.status = tok[1];
    else if (key == "cost") s.cost = need();
    else if (key == "gap") s.gap = need();
    else if (key == "max_delta_p") s.max_delta_p = need();
    else if (key == "minutes") s.minutes = need();
    else if (key == "base_ghz") s.base_ghz = need();
    else if (key == "given_ghz") s.given_ghz = need();
    else if (key == "s_time_minutes") need();  // derived
    else throw ParseError(line_no, "", "unknown key " + key);
  }
  return s;
}

}  // namespace dedvpe
