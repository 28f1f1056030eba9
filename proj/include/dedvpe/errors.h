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

#ifndef DEDVPE_ERRORS_H_
#define DEDVPE_ERRORS_H_

#include <stdexcept>
#include <string>

namespace dedvpe {

// A generator output outside [p_min, p_max], or a malformed schedule.
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

// Requested feature needs data the instance does not carry (e.g. loss
// without a B-matrix).
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Static bounds of a model are contradictory.
class BuildError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Solver output does not have the structure the decoder expects.
class DecodeError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Text input error carrying the 1-based line and the section being read.
class ParseError : public std::runtime_error {
 public:
  ParseError(int line, std::string section, const std::string& message)
      : std::runtime_error("line " + std::to_string(line) +
                           (section.empty() ? "" : " [" + section + "]") +
                           ": " + message),
        line_(line),
        section_(std::move(section)) {}

  int line() const { return line_; }
  const std::string& section() const { return section_; }

 private:
  int line_;
  std::string section_;
};

}  // namespace dedvpe

#endif  // DEDVPE_ERRORS_H_
