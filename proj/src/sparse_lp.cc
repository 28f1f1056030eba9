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

#include "dedvpe/sparse_lp.h"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace dedvpe {

int SparseLp::AddColumn(double lower, double upper, double cost, bool integer,
                        std::string name) {
  col_lower_.push_back(lower);
  col_upper_.push_back(upper);
  objective_.push_back(cost);
  integer_.push_back(integer);
  col_names_.push_back(std::move(name));
  return num_columns() - 1;
}

int SparseLp::AddRow(double lower, double upper, std::string name) {
  row_lower_.push_back(lower);
  row_upper_.push_back(upper);
  row_names_.push_back(std::move(name));
  return num_rows() - 1;
}

void SparseLp::AddCoefficient(int row, int col, double value) {
  if (row < 0 || row >= num_rows() || col < 0 || col >= num_columns()) {
    throw std::invalid_argument("AddCoefficient: index out of range");
  }
  const std::uint64_t key =
      (static_cast<std::uint64_t>(row) << 32) | static_cast<std::uint32_t>(col);
  if (!occupied_.insert(key).second) {
    throw std::invalid_argument("AddCoefficient: duplicate entry (" +
                                row_names_[row] + ", " + col_names_[col] + ")");
  }
  triplets_.push_back({row, col, value});
}

void SparseLp::SetColumnBounds(int col, double lower, double upper) {
  col_lower_.at(col) = lower;
  col_upper_.at(col) = upper;
}

int SparseLp::num_integer_columns() const {
  return static_cast<int>(std::count(integer_.begin(), integer_.end(), true));
}

ColumnMajorMatrix SparseLp::ToColumnMajor() const {
  ColumnMajorMatrix m;
  m.num_rows = num_rows();
  m.num_cols = num_columns();
  m.starts.assign(m.num_cols + 1, 0);
  for (const LpTriplet& e : triplets_) ++m.starts[e.col + 1];
  for (int j = 0; j < m.num_cols; ++j) m.starts[j + 1] += m.starts[j];
  m.rows.resize(triplets_.size());
  m.values.resize(triplets_.size());
  std::vector<int> next(m.starts.begin(), m.starts.end() - 1);
  for (const LpTriplet& e : triplets_) {
    const int k = next[e.col]++;
    m.rows[k] = e.row;
    m.values[k] = e.value;
  }
  // Row order inside each column makes the copy independent of insertion
  // order.
  for (int j = 0; j < m.num_cols; ++j) {
    const int begin = m.starts[j];
    const int end = m.starts[j + 1];
    std::vector<std::pair<int, double>> entries;
    entries.reserve(end - begin);
    for (int k = begin; k < end; ++k) entries.emplace_back(m.rows[k], m.values[k]);
    std::sort(entries.begin(), entries.end());
    for (int k = begin; k < end; ++k) {
      m.rows[k] = entries[k - begin].first;
      m.values[k] = entries[k - begin].second;
    }
  }
  return m;
}

double SparseLp::Objective(std::span<const double> x) const {
  double sum = objective_offset_;
  for (int j = 0; j < num_columns(); ++j) sum += objective_[j] * x[j];
  return sum;
}

std::vector<double> SparseLp::RowActivity(std::span<const double> x) const {
  std::vector<double> activity(num_rows(), 0.0);
  for (const LpTriplet& e : triplets_) activity[e.row] += e.value * x[e.col];
  return activity;
}

double SparseLp::MaxViolation(std::span<const double> x) const {
  double worst = 0.0;
  for (int j = 0; j < num_columns(); ++j) {
    worst = std::max({worst, col_lower_[j] - x[j], x[j] - col_upper_[j]});
  }
  const std::vector<double> activity = RowActivity(x);
  for (int i = 0; i < num_rows(); ++i) {
    worst = std::max(
        {worst, row_lower_[i] - activity[i], activity[i] - row_upper_[i]});
  }
  return worst;
}

double SparseLp::MaxIntegrality(std::span<const double> x) const {
  double worst = 0.0;
  for (int j = 0; j < num_columns(); ++j) {
    if (integer_[j]) worst = std::max(worst, std::abs(x[j] - std::round(x[j])));
  }
  return worst;
}

std::vector<std::string> SparseLp::Validate() const {
  std::vector<std::string> out;
  for (int j = 0; j < num_columns(); ++j) {
    if (col_lower_[j] > col_upper_[j]) {
      out.push_back("column " + col_names_[j] + ": lower > upper");
    }
    if (integer_[j] &&
        (!std::isfinite(col_lower_[j]) || !std::isfinite(col_upper_[j]))) {
      out.push_back("column " + col_names_[j] + ": integral with infinite bound");
    }
  }
  for (int i = 0; i < num_rows(); ++i) {
    if (row_lower_[i] > row_upper_[i]) {
      out.push_back("row " + row_names_[i] + ": lower > upper");
    }
  }
  return out;
}

}  // namespace dedvpe
