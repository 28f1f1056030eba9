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

// Bounded-variable revised simplex.
//
// The LP is brought to the computational form
//
//   [A  -I] [x; r] = 0,   col bounds on x,  row bounds on r,
//
// so every row owns a logical variable r_i and the basis is always m x m.
// Variables 0..n-1 are structural columns, n..n+m-1 are row logicals.
//
// Rows and columns are scaled geometrically (powers of two) before
// solving. The basis is factorized with a sparse LU and updated in product
// form between refactorizations.
//
// Cold solves start from the slack basis and use the dual simplex when
// that basis is dual feasible (always the case for boxed columns), the
// primal simplex otherwise. Warm solves after bound changes use the dual
// simplex from the previous optimal basis. Either algorithm finishes with
// a cleanup pass of the other when tolerances drift.

#ifndef DEDVPE_LP_SIMPLEX_H_
#define DEDVPE_LP_SIMPLEX_H_

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "dedvpe/sparse_lp.h"

namespace dedvpe {

enum class LpStatus { kOptimal, kInfeasible, kUnbounded, kIterationLimit };
std::string ToString(LpStatus status);

enum class VarStatus : std::uint8_t { kBasic, kAtLower, kAtUpper, kFree };

// Basic set and nonbasic statuses over the n + m variables (structurals
// first, then row logicals). The factorization itself stays inside the
// SimplexSolver that produced it and is rebuilt when a basis is loaded.
struct LpBasis {
  std::vector<int> basic;          // m variable indices
  std::vector<VarStatus> status;   // n + m entries

  bool empty() const { return status.empty(); }
};

struct LpSolution {
  LpStatus status = LpStatus::kIterationLimit;
  std::vector<double> primal;          // per column
  std::vector<double> row_activity;    // per row
  std::vector<double> row_duals;       // per row
  std::vector<double> reduced_costs;   // per column
  double objective = 0.0;              // includes the offset
  double dual_objective = 0.0;         // Lagrangian bound, includes offset
  int iterations = 0;
  LpBasis basis;
};

struct SimplexOptions {
  enum class Algorithm { kAuto, kPrimal, kDual };

  double feasibility_tol = 1e-7;
  double optimality_tol = 1e-7;
  double pivot_tol = 1e-9;
  int max_iterations = 0;  // 0: 20 * (rows + columns) + 10000
  int refactor_interval = 100;
  int bland_after_degenerate = 50;
  bool scale = true;
  Algorithm algorithm = Algorithm::kAuto;
};

class SimplexSolver {
 public:
  explicit SimplexSolver(const SparseLp& lp, SimplexOptions options = {});
  ~SimplexSolver();
  SimplexSolver(SimplexSolver&&) noexcept;
  SimplexSolver& operator=(SimplexSolver&&) noexcept;

  // Solves from the current basis: the slack basis on a fresh solver, the
  // last basis after a previous Solve, or whatever LoadBasis installed.
  LpSolution Solve();

  // Changes bounds of a structural column for subsequent solves; the basis
  // is kept.
  void SetColumnBounds(int col, double lower, double upper);
  double column_lower(int col) const;
  double column_upper(int col) const;

  // Throws std::invalid_argument on a size mismatch. A basis whose
  // factorization fails is replaced by the slack basis on the next Solve.
  void LoadBasis(const LpBasis& basis);
  LpBasis basis() const;
  void ResetToSlackBasis();

  // Cumulative over all Solve calls.
  long long total_iterations() const;
  int refactorizations() const;

 private:
  class Impl;
  std::unique_ptr<Impl> impl_;
};

// One-shot solve, optionally warm-started.
LpSolution solve_lp(const SparseLp& lp, const LpBasis* warm = nullptr,
                    const SimplexOptions& options = {});

// Re-solves `lp` with column `col` restricted to [lower, upper], starting
// from `basis` (optimal for the unmodified lp). `lp` itself is unchanged.
LpSolution reoptimize_after_bound_change(const SparseLp& lp,
                                         const LpBasis& basis, int col,
                                         double lower, double upper,
                                         const SimplexOptions& options = {});

}  // namespace dedvpe

#endif  // DEDVPE_LP_SIMPLEX_H_
