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

// MPS export of a SparseLp for cross-checking with external solvers.
//
// Fixed format (fields starting in columns 2, 5, 15, 25, 40, 50) when every
// name fits in 8 characters, free format otherwise, announced by a comment
// line. Numbers use the shortest round-trip form. Row types: E for
// equalities, L (rhs = upper) for upper-bounded and ranged rows, G for
// lower-bounded rows, N for free rows. Ranged rows carry their width in
// RANGES. The objective constant is written as RHS of the objective row
// with the opposite sign. Integer columns sit between INTORG/INTEND
// markers.

#ifndef DEDVPE_MPS_WRITER_H_
#define DEDVPE_MPS_WRITER_H_

#include <string>

#include "dedvpe/sparse_lp.h"

namespace dedvpe {

inline constexpr const char* kObjectiveRowName = "OBJ";

// Throws std::invalid_argument when a name is empty or contains whitespace.
std::string export_mps(const SparseLp& lp);

}  // namespace dedvpe

#endif  // DEDVPE_MPS_WRITER_H_
