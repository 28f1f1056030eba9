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

// Plain-text run summary with CPU-speed-scaled time:
//
//   S-time = (given CPU speed / base CPU speed) * measured minutes.

#ifndef DEDVPE_REPORT_H_
#define DEDVPE_REPORT_H_

#include <optional>
#include <string>
#include <string_view>

namespace dedvpe {

inline constexpr double kBaseCpuGhz = 2.4;

// Throws std::invalid_argument unless both speeds are positive.
double scaled_minutes(double minutes, double base_ghz, double given_ghz);

struct RunSummary {
  std::string instance;  // free text, no whitespace
  std::string method;
  std::string status;
  double cost = 0.0;
  std::optional<double> gap;
  double max_delta_p = 0.0;
  double minutes = 0.0;
  double base_ghz = kBaseCpuGhz;
  double given_ghz = kBaseCpuGhz;

  double s_time() const { return scaled_minutes(minutes, base_ghz, given_ghz); }
};

// `key value` lines; numbers at full round-trip precision.
std::string report(const RunSummary& summary);

// Inverse of report(). Throws ParseError.
RunSummary parse_report(std::string_view text);

}  // namespace dedvpe

#endif  // DEDVPE_REPORT_H_
