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

// Schedule files: a [header] of key/value lines and a [dispatch] table
// with one row per period, `t P_1 .. P_N [loss dP]`. See docs/formats.md.

#ifndef DEDVPE_SCHEDULE_IO_H_
#define DEDVPE_SCHEDULE_IO_H_

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "dedvpe/feasibility.h"
#include "dedvpe/model.h"

namespace dedvpe {

struct ScheduleFile {
  std::string instance_hash;  // empty when not recorded
  std::string method;         // empty when not recorded
  bool loss = false;
  bool reserve = false;
  std::optional<double> objective;
  std::optional<double> gap;
  std::optional<double> step1_seconds;
  std::optional<double> step2_seconds;
  std::optional<double> total_seconds;
  Schedule schedule;
  // Either both empty or one entry per period.
  std::vector<double> loss_column;
  std::vector<double> delta_p_column;
};

// Header fields are left empty; loss and delta P come from the audit of
// `schedule` against `instance` (B-matrix used only when `loss` is set).
ScheduleFile make_schedule_file(const Instance& instance,
                                const Schedule& schedule, bool loss,
                                bool reserve);

// decimals < 0 writes every number at full round-trip precision; otherwise
// dispatch numbers are fixed-point with that many decimals. Header numbers
// are always full precision.
std::string serialize_schedule(const ScheduleFile& file, int decimals = -1);

// Throws ParseError.
ScheduleFile parse_schedule(std::string_view text);
ScheduleFile read_schedule_file(const std::string& path);

struct ScheduleCheck {
  AuditReport audit;
  double cost = 0.0;
  bool hash_matches = true;           // true when no hash is recorded
  double max_loss_mismatch = 0.0;     // vs the file's loss column
  double max_delta_p_mismatch = 0.0;  // vs the file's delta P column
  double objective_mismatch = 0.0;    // |cost - objective| / max(1, |objective|)
  bool pass = false;
};

inline constexpr double kLossColumnTolerance = 5e-4;
inline constexpr double kDeltaPColumnTolerance = 1e-4;
inline constexpr double kObjectiveTolerance = 1e-4;

// Re-audits a schedule file against its instance. `pass` requires the
// audit to pass, the hash to match, recorded columns to be reproduced
// within the tolerances above and a recorded objective within 1e-4
// relative.
ScheduleCheck check_schedule(const Instance& instance, const ScheduleFile& file,
                             const Tolerances& tol = {});

}  // namespace dedvpe

#endif  // DEDVPE_SCHEDULE_IO_H_
