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

#include "dedvpe/mps_writer.h"

#include <cctype>
#include <cmath>
#include <optional>
#include <stdexcept>
#include <vector>

#include "dedvpe/instance_io.h"

namespace dedvpe {
namespace {

class Writer {
 public:
  explicit Writer(bool fixed) : fixed_(fixed) {}

  void Section(const std::string& name) { out_ += name + "\n"; }
  void Comment(const std::string& text) { out_ += "* " + text + "\n"; }

  // Data line: code (e.g. row type or bound type) and up to five fields.
  void Line(const std::string& code, const std::vector<std::string>& fields) {
    std::string line;
    if (fixed_) {
      static const int kStarts[] = {4, 14, 24, 39, 49};
      line = " " + code;
      for (size_t k = 0; k < fields.size(); ++k) {
        const size_t start = kStarts[k];
        if (line.size() < start) line.resize(start, ' ');
        else line += ' ';
        line += fields[k];
      }
    } else {
      line = code.empty() ? "   " : " " + code;
      for (const std::string& f : fields) line += " " + f;
    }
    while (!line.empty() && line.back() == ' ') line.pop_back();
    out_ += line + "\n";
  }

  std::string Take() { return std::move(out_); }

 private:
  bool fixed_;
  std::string out_;
};

void CheckName(const std::string& name) {
  if (name.empty()) throw std::invalid_argument("empty name in MPS export");
  for (char c : name) {
    if (std::isspace(static_cast<unsigned char>(c))) {
      throw std::invalid_argument("name with whitespace: '" + name + "'");
    }
  }
}

}  // namespace

std::string export_mps(const SparseLp& lp) {
  const int m = lp.num_rows();
  const int n = lp.num_columns();
  bool fixed = lp.name().size() <= 8;
  CheckName(lp.name());
  for (const std::string& s : lp.row_names()) {
    CheckName(s);
    fixed = fixed && s.size() <= 8;
  }
  for (const std::string& s : lp.column_names()) {
    CheckName(s);
    fixed = fixed && s.size() <= 8;
  }

  Writer w(fixed);
  std::string head = fixed ? "NAME          " : "NAME ";
  w.Section(head + lp.name());
  if (!fixed) w.Comment("free-format MPS: some names exceed 8 characters");

  std::vector<char> type(m);
  w.Section("ROWS");
  w.Line("N", {kObjectiveRowName});
  for (int r = 0; r < m; ++r) {
    const double lo = lp.row_lower()[r];
    const double hi = lp.row_upper()[r];
    if (lo == hi) type[r] = 'E';
    else if (std::isfinite(hi)) type[r] = 'L';
    else if (std::isfinite(lo)) type[r] = 'G';
    else type[r] = 'N';
    w.Line(std::string(1, type[r]), {lp.row_names()[r]});
  }

  const ColumnMajorMatrix a = lp.ToColumnMajor();
  w.Section("COLUMNS");
  bool in_integer = false;
  int marker = 0;
  auto toggle = [&](bool integer) {
    const std::string name = "MARKER" + std::to_string(marker++);
    w.Line("", {name, "'MARKER'", integer ? "'INTORG'" : "'INTEND'"});
    in_integer = integer;
  };
  for (int j = 0; j < n; ++j) {
    if (lp.integer()[j] != in_integer) toggle(lp.integer()[j]);
    const std::string& col = lp.column_names()[j];
    std::vector<std::pair<std::string, double>> entries;
    if (lp.objective()[j] != 0.0) {
      entries.emplace_back(kObjectiveRowName, lp.objective()[j]);
    }
    for (int k = a.starts[j]; k < a.starts[j + 1]; ++k) {
      entries.emplace_back(lp.row_names()[a.rows[k]], a.values[k]);
    }
    if (entries.empty()) {
      // Keep the column declared.
      entries.emplace_back(kObjectiveRowName, 0.0);
    }
    for (size_t k = 0; k < entries.size(); k += 2) {
      std::vector<std::string> f = {col, entries[k].first,
                                    format_double(entries[k].second)};
      if (k + 1 < entries.size()) {
        f.push_back(entries[k + 1].first);
        f.push_back(format_double(entries[k + 1].second));
      }
      w.Line("", f);
    }
  }
  if (in_integer) toggle(false);

  w.Section("RHS");
  if (lp.objective_offset() != 0.0) {
    w.Line("", {"RHS", kObjectiveRowName, format_double(-lp.objective_offset())});
  }
  for (int r = 0; r < m; ++r) {
    double rhs = 0.0;
    switch (type[r]) {
      case 'E':
      case 'G':
        rhs = lp.row_lower()[r];
        break;
      case 'L':
        rhs = lp.row_upper()[r];
        break;
      default:
        continue;
    }
    if (rhs != 0.0) w.Line("", {"RHS", lp.row_names()[r], format_double(rhs)});
  }

  bool ranges = false;
  for (int r = 0; r < m; ++r) {
    if (type[r] != 'L' || !std::isfinite(lp.row_lower()[r])) continue;
    if (!ranges) {
      w.Section("RANGES");
      ranges = true;
    }
    w.Line("", {"RNG", lp.row_names()[r],
                format_double(lp.row_upper()[r] - lp.row_lower()[r])});
  }

  bool bounds = false;
  auto bound = [&](const char* code, const std::string& col,
                   std::optional<double> value) {
    if (!bounds) {
      w.Section("BOUNDS");
      bounds = true;
    }
    std::vector<std::string> f = {"BND", col};
    if (value.has_value()) f.push_back(format_double(*value));
    w.Line(code, f);
  };
  for (int j = 0; j < n; ++j) {
    const std::string& col = lp.column_names()[j];
    const double lo = lp.col_lower()[j];
    const double hi = lp.col_upper()[j];
    if (lo == hi) {
      bound("FX", col, lo);
      continue;
    }
    if (!std::isfinite(lo) && !std::isfinite(hi)) {
      bound("FR", col, std::nullopt);
      continue;
    }
    if (!std::isfinite(lo)) bound("MI", col, std::nullopt);
    else if (lo != 0.0) bound("LO", col, lo);
    if (std::isfinite(hi)) bound("UP", col, hi);
  }
  w.Section("ENDATA");
  return w.Take();
}

}  // namespace dedvpe
