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

// Sectioned text format for Instance. See docs/formats.md for the grammar.
//
//   [units]     id alpha beta gamma e f pmin pmax ur dr [p0]
//   [demand]    t D_t
//   [bmatrix]   N rows of N numbers (optional)
//   [reserve]   t R_t rows and one "tau X" line (optional)
//
// Sections appear in that order. '#' starts a comment.

#ifndef DEDVPE_INSTANCE_IO_H_
#define DEDVPE_INSTANCE_IO_H_

#include <string>
#include <string_view>

#include "dedvpe/model.h"

namespace dedvpe {

// Throws ParseError naming the line and section on malformed input or on
// an instance that fails validate().
Instance parse_instance(std::string_view text);

// Reads and parses a file. Throws ParseError (line 0) when unreadable.
Instance read_instance_file(const std::string& path);

// Shortest decimal form that parses back to the same double.
std::string format_double(double value);

// Text that parse_instance maps back to an identical Instance.
std::string serialize_instance(const Instance& instance);

// FNV-1a 64-bit hash of serialize_instance(instance), as 16 hex digits.
std::string instance_hash(const Instance& instance);

// Splits on whitespace after dropping a '#' comment.
std::vector<std::string_view> tokenize_line(std::string_view line);

// Strict decimal parse of a whole token.
bool parse_number(std::string_view token, double* value);

std::string read_text_file(const std::string& path);

}  // namespace dedvpe

#endif  // DEDVPE_INSTANCE_IO_H_
