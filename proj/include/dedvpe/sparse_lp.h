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

#ifndef DEDVPE_SPARSE_LP_H_
#define DEDVPE_SPARSE_LP_H_

#include <cstdint>
#include <limits>
#include <span>
#include <string>
#include <unordered_set>
#include <vector>

namespace dedvpe {

inline constexpr double kInfinity = std::numeric_limits<double>::infinity();

struct LpTriplet {
  int row;
  int col;
  double value;
};

// Compressed sparse column copy of the constraint matrix.
struct ColumnMajorMatrix {
  int num_rows = 0;
  int num_cols = 0;
  std::vector<int> starts;  // num_cols + 1
  std::vector<int> rows;
  std::vector<double> values;
};

// Solver-neutral linear program
//
//   minimize    c'x + offset
//   subject to  row_lower <= A x <= row_upper
//               col_lower <=  x  <= col_upper
//               x_j integral for integer-marked columns
//
// Equality rows have row_lower == row_upper; one-sided rows use an infinite
// bound on the other side.
class SparseLp {
 public:
  int AddColumn(double lower, double upper, double cost, bool integer,
                std::string name);
  int AddRow(double lower, double upper, std::string name);
  // Throws std::invalid_argument on an index out of range or when (row,
  // col) already has a coefficient.
  void AddCoefficient(int row, int col, double value);

  void SetColumnBounds(int col, double lower, double upper);
  void SetObjectiveOffset(double offset) { objective_offset_ = offset; }
  void SetName(std::string name) { name_ = std::move(name); }

  int num_columns() const { return static_cast<int>(col_lower_.size()); }
  int num_rows() const { return static_cast<int>(row_lower_.size()); }
  int num_integer_columns() const;

  const std::string& name() const { return name_; }
  const std::vector<double>& col_lower() const { return col_lower_; }
  const std::vector<double>& col_upper() const { return col_upper_; }
  const std::vector<double>& row_lower() const { return row_lower_; }
  const std::vector<double>& row_upper() const { return row_upper_; }
  const std::vector<double>& objective() const { return objective_; }
  double objective_offset() const { return objective_offset_; }
  const std::vector<bool>& integer() const { return integer_; }
  const std::vector<LpTriplet>& triplets() const { return triplets_; }
  const std::vector<std::string>& column_names() const { return col_names_; }
  const std::vector<std::string>& row_names() const { return row_names_; }

  ColumnMajorMatrix ToColumnMajor() const;

  // c'x + offset.
  double Objective(std::span<const double> x) const;
  std::vector<double> RowActivity(std::span<const double> x) const;
  // Largest row or column bound violation of x (0 when feasible).
  double MaxViolation(std::span<const double> x) const;
  // Largest distance of an integer-marked column from the nearest integer.
  double MaxIntegrality(std::span<const double> x) const;

  // Invariant violations: lower > upper, non-finite integral bounds.
  std::vector<std::string> Validate() const;

 private:
  std::string name_ = "DEDVPE";
  std::vector<double> col_lower_;
  std::vector<double> col_upper_;
  std::vector<double> objective_;
  std::vector<bool> integer_;
  std::vector<std::string> col_names_;
  std::vector<double> row_lower_;
  std::vector<double> row_upper_;
  std::vector<std::string> row_names_;
  std::vector<LpTriplet> triplets_;
  std::unordered_set<std::uint64_t> occupied_;
  double objective_offset_ = 0.0;
};

}  // namespace dedvpe

#endif  // DEDVPE_SPARSE_LP_H_
