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

#include "dedvpe/mps_writer.h"

#include <cstdlib>
#include <fstream>
#include <numbers>
#include <string>

#include <gtest/gtest.h>

#include "dedvpe/instance_io.h"
#include "dedvpe/milp_builder.h"
#include "dedvpe/sparse_lp.h"

namespace dedvpe {
namespace {

// Set DEDVPE_UPDATE_GOLDEN=1 to rewrite the golden files after a
// deliberate format change.
void ExpectGolden(const std::string& name, const std::string& text) {
  const std::string path = std::string(DEDVPE_GOLDEN_DIR) + "/" + name;
  if (std::getenv("DEDVPE_UPDATE_GOLDEN") != nullptr) {
    std::ofstream(path, std::ios::binary) << text;
  }
  EXPECT_EQ(text, read_text_file(path)) << path;
}

// Every row type, bound type and an integer column.
SparseLp MixedLp() {
  SparseLp lp;
  lp.SetName("MIXED");
  const int x = lp.AddColumn(0, 4, 1.5, false, "x");
  const int y = lp.AddColumn(-kInfinity, kInfinity, -2, false, "y");
  const int z = lp.AddColumn(0, 1, 3, true, "z");
  const int w = lp.AddColumn(2, 2, 0, false, "w");
  const int v = lp.AddColumn(-kInfinity, 10, 0.25, false, "v");
  const int u = lp.AddColumn(-3, kInfinity, 0, false, "u");
  const int eq = lp.AddRow(4, 4, "EQ");
  const int le = lp.AddRow(-kInfinity, 5, "LE");
  const int ge = lp.AddRow(1, kInfinity, "GE");
  const int rg = lp.AddRow(1, 3.5, "RG");
  const int fr = lp.AddRow(-kInfinity, kInfinity, "FREE");
  lp.AddCoefficient(eq, x, 1);
  lp.AddCoefficient(eq, y, 1);
  lp.AddCoefficient(eq, z, 1);
  lp.AddCoefficient(le, x, 2);
  lp.AddCoefficient(le, w, -1);
  lp.AddCoefficient(ge, y, 1);
  lp.AddCoefficient(ge, v, 1);
  lp.AddCoefficient(rg, u, 1e-5);
  lp.AddCoefficient(rg, z, 1);
  lp.AddCoefficient(fr, x, 1);
  lp.SetObjectiveOffset(7);
  return lp;
}

TEST(ExportMpsTest, EmptyModel) {
  EXPECT_EQ(export_mps(SparseLp()),
            "NAME          DEDVPE\nROWS\n N  OBJ\nCOLUMNS\nRHS\nENDATA\n");
}

TEST(ExportMpsTest, MixedFixedFormatGolden) {
  const std::string text = export_mps(MixedLp());
  EXPECT_EQ(text.find("free-format"), std::string::npos);
  ExpectGolden("mixed.mps", text);
  EXPECT_EQ(text, export_mps(MixedLp()));
}

TEST(ExportMpsTest, OneUnitMilpGolden) {
  Instance inst;
  UnitParams u;
  u.alpha = 5;
  u.beta = 2;
  u.gamma = 0.01;
  u.e = 40;
  u.p_min = 10;
  u.p_max = 60;
  u.f = 2 * std::numbers::pi / u.range();
  u.ramp_up = u.ramp_down = 50;
  inst.units = {u};
  inst.demand = {40};
  const MilpModel model = build_milp(inst, 1, false);
  const std::string text = export_mps(model.lp);
  // S(1,1,1) is longer than 8 characters.
  EXPECT_NE(text.find("* free-format MPS"), std::string::npos);
  EXPECT_NE(text.find("'INTORG'"), std::string::npos);
  ExpectGolden("one_unit_milp.mps", text);
}

TEST(ExportMpsTest, RejectsBadNames) {
  SparseLp lp;
  lp.AddColumn(0, 1, 1, false, "has space");
  EXPECT_THROW(export_mps(lp), std::invalid_argument);
  SparseLp empty_name;
  empty_name.AddRow(0, 1, "");
  EXPECT_THROW(export_mps(empty_name), std::invalid_argument);
}

}  // namespace
}  // namespace dedvpe
