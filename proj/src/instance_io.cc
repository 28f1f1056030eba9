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

#include "dedvpe/instance_io.h"

#include <charconv>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <vector>

#include "dedvpe/errors.h"

namespace dedvpe {
namespace {

const char* const kSections[] = {"units", "demand", "bmatrix", "reserve"};
constexpr int kNumSections = 4;

int SectionIndex(std::string_view name) {
  for (int k = 0; k < kNumSections; ++k) {
    if (name == kSections[k]) return k;
  }
  return -1;
}

}  // namespace

std::vector<std::string_view> tokenize_line(std::string_view line) {
  const size_t hash = line.find('#');
  if (hash != std::string_view::npos) line = line.substr(0, hash);
  std::vector<std::string_view> tokens;
  size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && std::isspace(static_cast<unsigned char>(line[i]))) ++i;
    const size_t start = i;
    while (i < line.size() && !std::isspace(static_cast<unsigned char>(line[i]))) ++i;
    if (i > start) tokens.push_back(line.substr(start, i - start));
  }
  return tokens;
}

bool parse_number(std::string_view token, double* value) {
  if (!token.empty() && token.front() == '+') token.remove_prefix(1);
  const char* end = token.data() + token.size();
  const auto [ptr, ec] = std::from_chars(token.data(), end, *value);
  return ec == std::errc() && ptr == end && std::isfinite(*value);
}

std::string format_double(double value) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), value);
  return std::string(buf, ptr);
}

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError(0, "", "cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

Instance parse_instance(std::string_view text) {
  Instance inst;
  int section = -1;
  int section_line = 0;
  std::vector<std::vector<double>> b_rows;
  std::vector<double> reserve;
  bool have_tau = false;
  bool have_reserve = false;
  bool have_bmatrix = false;

  auto name_of = [&](int s) { return s < 0 ? std::string() : std::string(kSections[s]); };
  auto fail = [&](int line, const std::string& msg) -> ParseError {
    return ParseError(line, name_of(section), msg);
  };
  auto finish_section = [&](int line) {
    if (section == 2 && static_cast<int>(b_rows.size()) != inst.num_units()) {
      throw ParseError(line, "bmatrix",
                       "expected " + std::to_string(inst.num_units()) +
                           " rows, found " + std::to_string(b_rows.size()));
    }
  };

  int line_no = 0;
  size_t pos = 0;
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
        throw fail(line_no, "malformed section header");
      }
      const std::string_view name = tok[0].substr(1, tok[0].size() - 2);
      const int next = SectionIndex(name);
      if (next < 0) {
        throw ParseError(line_no, std::string(name), "unknown section");
      }
      if (next <= section) {
        throw ParseError(line_no, std::string(name),
                         "section out of order or repeated");
      }
      if (next > 1 && section < 1) {
        throw ParseError(line_no, std::string(name),
                         "[units] and [demand] must come first");
      }
      if (next == 1 && section != 0) {
        throw ParseError(line_no, "demand", "[units] must come first");
      }
      finish_section(line_no);
      section = next;
      section_line = line_no;
      if (section == 2) have_bmatrix = true;
      if (section == 3) have_reserve = true;
      continue;
    }
    if (section < 0) throw fail(line_no, "data before the first section");

    std::vector<double> v(tok.size());
    for (size_t k = 0; k < tok.size(); ++k) {
      if (section == 3 && k == 0 && tok[0] == "tau") {
        v[0] = 0.0;
        continue;
      }
      if (!parse_number(tok[k], &v[k])) {
        throw fail(line_no, "not a number: '" + std::string(tok[k]) + "'");
      }
    }

    switch (section) {
      case 0: {
        if (tok.size() != 10 && tok.size() != 11) {
          throw fail(line_no, "expected 10 or 11 fields (id alpha beta gamma "
                              "e f pmin pmax ur dr [p0]), found " +
                                  std::to_string(tok.size()));
        }
        if (v[0] != inst.num_units() + 1) {
          throw fail(line_no, "unit ids must be 1, 2, ... in order");
        }
        UnitParams u;
        u.alpha = v[1];
        u.beta = v[2];
        u.gamma = v[3];
        u.e = v[4];
        u.f = v[5];
        u.p_min = v[6];
        u.p_max = v[7];
        u.ramp_up = v[8];
        u.ramp_down = v[9];
        if (tok.size() == 11) u.initial_output = v[10];
        inst.units.push_back(u);
        break;
      }
      case 1:
        if (tok.size() != 2) {
          throw fail(line_no, "expected 2 fields (t D_t), found " +
                                  std::to_string(tok.size()));
        }
        if (v[0] != inst.num_periods() + 1) {
          throw fail(line_no, "periods must be 1, 2, ... in order");
        }
        inst.demand.push_back(v[1]);
        break;
      case 2:
        if (static_cast<int>(tok.size()) != inst.num_units()) {
          throw fail(line_no, "expected " + std::to_string(inst.num_units()) +
                                  " numbers, found " + std::to_string(tok.size()));
        }
        if (static_cast<int>(b_rows.size()) == inst.num_units()) {
          throw fail(line_no, "more than " + std::to_string(inst.num_units()) +
                                  " rows");
        }
        b_rows.push_back(v);
        break;
      case 3:
        if (tok[0] == "tau") {
          if (tok.size() != 2) throw fail(line_no, "expected 'tau X'");
          if (have_tau) throw fail(line_no, "tau given twice");
          inst.tau = v[1];
          have_tau = true;
        } else {
          if (tok.size() != 2) {
            throw fail(line_no, "expected 2 fields (t R_t), found " +
                                    std::to_string(tok.size()));
          }
          if (v[0] != static_cast<double>(reserve.size() + 1)) {
            throw fail(line_no, "periods must be 1, 2, ... in order");
          }
          reserve.push_back(v[1]);
        }
        break;
    }
  }
  finish_section(line_no);

  if (inst.units.empty()) throw ParseError(line_no, "units", "no units");
  if (inst.demand.empty()) throw ParseError(line_no, "demand", "no periods");
  if (have_bmatrix) {
    const int n = inst.num_units();
    Eigen::MatrixXd b(n, n);
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < n; ++j) b(i, j) = b_rows[i][j];
    }
    inst.b_matrix = b;
  }
  if (have_reserve) {
    if (static_cast<int>(reserve.size()) != inst.num_periods()) {
      throw ParseError(section_line, "reserve",
                       "expected " + std::to_string(inst.num_periods()) +
                           " rows, found " + std::to_string(reserve.size()));
    }
    if (!have_tau) throw ParseError(section_line, "reserve", "missing tau");
    inst.reserve_req = reserve;
    inst.reserve_enabled = true;
  }
  const std::vector<std::string> problems = validate(inst);
  if (!problems.empty()) throw ParseError(line_no, "", problems.front());
  return inst;
}

Instance read_instance_file(const std::string& path) {
  return parse_instance(read_text_file(path));
}

std::string serialize_instance(const Instance& inst) {
  std::string out = "[units]\n# id alpha beta gamma e f pmin pmax ur dr [p0]\n";
  for (int i = 0; i < inst.num_units(); ++i) {
    const UnitParams& u = inst.units[i];
    out += std::to_string(i + 1);
    for (double v : {u.alpha, u.beta, u.gamma, u.e, u.f, u.p_min, u.p_max,
                     u.ramp_up, u.ramp_down}) {
      out += ' ';
      out += format_double(v);
    }
    if (u.initial_output) {
      out += ' ';
      out += format_double(*u.initial_output);
    }
    out += '\n';
  }
  out += "\n[demand]\n";
  for (int t = 0; t < inst.num_periods(); ++t) {
    out += std::to_string(t + 1) + ' ' + format_double(inst.demand[t]) + '\n';
  }
  if (inst.b_matrix) {
    out += "\n[bmatrix]\n";
    const Eigen::MatrixXd& b = *inst.b_matrix;
    for (int i = 0; i < b.rows(); ++i) {
      for (int j = 0; j < b.cols(); ++j) {
        if (j > 0) out += ' ';
        out += format_double(b(i, j));
      }
      out += '\n';
    }
  }
  if (inst.reserve_req) {
    out += "\n[reserve]\ntau " + format_double(inst.tau) + '\n';
    for (size_t t = 0; t < inst.reserve_req->size(); ++t) {
      out += std::to_string(t + 1) + ' ' + format_double((*inst.reserve_req)[t]) + '\n';
    }
  }
  return out;
}

std::string instance_hash(const Instance& instance) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : serialize_instance(instance)) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

}  // namespace dedvpe
