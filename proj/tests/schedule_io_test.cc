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

#include "dedvpe/schedule_io.h"

#include <random>
#include <string>

#include <gtest/gtest.h>

#include "dedvpe/cost.h"
#include "dedvpe/errors.h"
#include "dedvpe/instance_io.h"
#include "test_instances.h"

namespace dedvpe {
namespace {

Schedule RandomSchedule(std::mt19937& rng, const Instance& inst) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  Schedule s(inst.num_units(), inst.num_periods());
  for (int t = 0; t < inst.num_periods(); ++t) {
    for (int i = 0; i < inst.num_units(); ++i) {
      s(i, t) = inst.units[i].p_min + u(rng) * inst.units[i].range();
    }
  }
  return s;
}

TEST(ScheduleFileTest, FullPrecisionRoundTrip) {
  const Instance inst = testing::LoadFixture("ded5.txt");
  std::mt19937 rng(71);
  for (bool loss : {false, true}) {
    ScheduleFile file = make_schedule_file(inst, RandomSchedule(rng, inst), loss, false);
    file.instance_hash = instance_hash(inst);
    file.method = "hybrid";
    file.objective = total_cost(inst, file.schedule);
    file.gap = 0.0123;
    file.step1_seconds = 1.5;
    file.step2_seconds = 0.25;
    file.total_seconds = 1.75;
    const ScheduleFile back = parse_schedule(serialize_schedule(file));
    EXPECT_EQ(back.instance_hash, file.instance_hash);
    EXPECT_EQ(back.method, file.method);
    EXPECT_EQ(back.loss, loss);
    EXPECT_EQ(back.objective, file.objective);
    EXPECT_EQ(back.gap, file.gap);
    EXPECT_EQ(back.total_seconds, file.total_seconds);
    EXPECT_LE((back.schedule.outputs - file.schedule.outputs).cwiseAbs().maxCoeff(), 1e-12);
    EXPECT_EQ(back.loss_column, file.loss_column);
    EXPECT_EQ(back.delta_p_column, file.delta_p_column);
  }
}

TEST(ScheduleFileTest, RoundedBodyKeepsExactHeader) {
  const Instance inst = testing::LoadFixture("ded5.txt");
  std::mt19937 rng(72);
  ScheduleFile file = make_schedule_file(inst, RandomSchedule(rng, inst), true, false);
  file.objective = 43084.123456789;
  const std::string text = serialize_schedule(file, 4);
  EXPECT_NE(text.find("objective 43084.123456789"), std::string::npos);
  const ScheduleFile back = parse_schedule(text);
  EXPECT_LE((back.schedule.outputs - file.schedule.outputs).cwiseAbs().maxCoeff(), 5e-5 + 1e-12);
}

TEST(ScheduleFileTest, NoNegativeZero) {
  ScheduleFile file;
  file.schedule = Schedule(1, 1);
  file.schedule(0, 0) = -1e-9;
  EXPECT_EQ(serialize_schedule(file, 4).find("-0.0000"), std::string::npos);
}

TEST(ParseScheduleTest, Errors) {
  const std::string head = "[header]\nunits 2\n[dispatch]\n";
  EXPECT_THROW(parse_schedule("[dispatch]\n1 2 3\n"), ParseError);        // no units
  EXPECT_THROW(parse_schedule(head + "1 2 3\n2 3\n"), ParseError);        // width
  EXPECT_THROW(parse_schedule(head + "2 2 3\n"), ParseError);             // numbering
  EXPECT_THROW(parse_schedule(head + "1 2 3 4\n"), ParseError);           // N+2 fields
  EXPECT_THROW(parse_schedule(head + "1 2 x\n"), ParseError);
  EXPECT_THROW(parse_schedule("[header]\nunits 2\ncolour red\n[dispatch]\n1 2 3\n"), ParseError);
  EXPECT_THROW(parse_schedule("[header]\nunits 2\nunits 2\n[dispatch]\n1 2 3\n"), ParseError);
  EXPECT_THROW(parse_schedule("[header]\nunits 2\nloss maybe\n[dispatch]\n1 2 3\n"), ParseError);
  EXPECT_THROW(parse_schedule(head + "1 2 3\n[header]\n"), ParseError);
  EXPECT_THROW(parse_schedule(head), ParseError);
  EXPECT_NO_THROW(parse_schedule(head + "1 2 3\n2 4 5\n"));
  EXPECT_NO_THROW(parse_schedule(head + "1 2 3 0.1 0\n"));
}

TEST(CheckScheduleTest, ReauditReproducesHeaderObjective) {
  const Instance inst = testing::LoadFixture("ded5.txt");
  ScheduleFile file = make_schedule_file(
      inst, read_schedule_file(testing::DataPath("tables/table2.sched")).schedule, false,
      false);
  file.instance_hash = instance_hash(inst);
  file.objective = total_cost(inst, file.schedule);
  ScheduleCheck check =
      check_schedule(inst, parse_schedule(serialize_schedule(file)), Tolerances::Uniform(1e-3));
  EXPECT_TRUE(check.pass);
  EXPECT_LE(check.objective_mismatch, 1e-12);

  file.objective = *file.objective * (1 + 2e-4);
  check = check_schedule(inst, file, Tolerances::Uniform(1e-3));
  EXPECT_FALSE(check.pass);

  file.objective.reset();
  file.instance_hash = "0000000000000000";
  check = check_schedule(inst, file, Tolerances::Uniform(1e-3));
  EXPECT_FALSE(check.hash_matches);
  EXPECT_FALSE(check.pass);
}

TEST(CheckScheduleTest, ReferenceTablesReproduceLossAndDeltaColumns) {
  struct Case {
    const char* instance;
    const char* table;
  } cases[] = {{"ded5.txt", "tables/table5.sched"}, {"ded10.txt", "tables/table6.sched"}};
  for (const Case& c : cases) {
    const Instance inst = testing::LoadFixture(c.instance);
    const ScheduleFile file = read_schedule_file(testing::DataPath(c.table));
    ASSERT_TRUE(file.loss);
    ASSERT_EQ(file.loss_column.size(), static_cast<size_t>(inst.num_periods()));
    const ScheduleCheck check = check_schedule(inst, file, Tolerances::Uniform(5e-4));
    EXPECT_LE(check.max_loss_mismatch, 5e-4) << c.table;
    EXPECT_LE(check.max_delta_p_mismatch, 1e-4) << c.table;
    EXPECT_TRUE(check.pass) << c.table;
  }
}

TEST(CheckScheduleTest, MissingDataIsAConfigError) {
  Instance inst = testing::LoadFixture("ded5.txt");
  const ScheduleFile file = read_schedule_file(testing::DataPath("tables/table5.sched"));
  inst.b_matrix.reset();
  EXPECT_THROW(check_schedule(inst, file), ConfigError);
}

}  // namespace
}  // namespace dedvpe
