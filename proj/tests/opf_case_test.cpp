// Copyright 2026 The TRAP Authors
//
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

#include <string>

#include <gtest/gtest.h>

#include "trap/errors.hpp"
#include "trap/opf_case.hpp"

namespace trap {
namespace {

const std::string kData = TRAP_TEST_DATA;

std::string two_bus_text(const std::string& branch_row, const std::string& base = "100") {
  return "function mpc = t\n"
         "mpc.baseMVA = " + base + ";\n"
         "mpc.bus = [\n"
         "  1 3 0 0 0 0 1 1 0 230 1 1.1 0.9;\n"
         "  2 1 50 10 0 0 1 1 0 230 1 1.1 0.9;\n"
         "];\n"
         "mpc.gen = [\n"
         "  1 0 0 100 -100 1 100 1 200 0;\n"
         "];\n"
         "mpc.branch = [\n" + branch_row + "\n];\n"
         "mpc.gencost = [\n"
         "  2 0 0 3 0.01 10 0;\n"
         "];\n";
}

const std::string kLine = "  1 2 0 0.1 0 100 100 100 0 0 1 -360 360;";

int error_line(const std::string& text) {
  try {
    parse_case(text);
  } catch (const ParseError& e) {
    return e.line();
  }
  return -1;
}

TEST(ParseCase, TwoBusAdmittance) {
  const NetworkCase c = parse_case_file(kData + "/two_bus.m");
  ASSERT_EQ(c.buses.size(), 2u);
  ASSERT_EQ(c.branches.size(), 1u);
  ASSERT_EQ(c.gens.size(), 1u);
  const Branch& br = c.branches[0];
  EXPECT_DOUBLE_EQ(br.bser, -10.0);
  EXPECT_DOUBLE_EQ(br.g, 0.0);
  EXPECT_DOUBLE_EQ(br.b_mutual(), 10.0);
  EXPECT_DOUBLE_EQ(br.g_mutual(), 0.0);
  EXPECT_DOUBLE_EQ(br.b_self(), -10.0);
}

TEST(ParseCase, PerUnitConversion) {
  const NetworkCase c = parse_case_file(kData + "/two_bus.m");
  EXPECT_DOUBLE_EQ(c.base_mva, 100.0);
  EXPECT_DOUBLE_EQ(c.buses[1].pd, 0.5);
  EXPECT_DOUBLE_EQ(c.buses[1].qd, 0.1);
  EXPECT_DOUBLE_EQ(c.gens[0].pmax, 2.0);
  EXPECT_DOUBLE_EQ(c.gens[0].qmin, -1.0);
  EXPECT_DOUBLE_EQ(c.gens[0].c2, 0.01);
  EXPECT_DOUBLE_EQ(c.gens[0].c1, 10.0);
  EXPECT_DOUBLE_EQ(c.branches[0].rate, 1.0);
  EXPECT_EQ(c.reference, 0);
}

TEST(ParseCase, PiModelWithLosses) {
  const NetworkCase c = parse_case(two_bus_text("  1 2 0.03 0.04 0.2 0 0 0 0 0 1 -360 360;"));
  const Branch& br = c.branches[0];
  // 1 / (0.03 + 0.04j) = 12 - 16j.
  EXPECT_NEAR(br.g, 12.0, 1e-12);
  EXPECT_NEAR(br.bser, -16.0, 1e-12);
  EXPECT_NEAR(br.b_self(), -15.9, 1e-12);
}

TEST(ParseCase, UnknownBusNamed) {
  try {
    parse_case_file(kData + "/missing_bus.m");
    FAIL() << "expected ParseError";
  } catch (const ParseError& e) {
    EXPECT_NE(std::string(e.what()).find("99"), std::string::npos) << e.what();
    EXPECT_EQ(e.line(), 12);
  }
}

TEST(ParseCase, NineBusTopology) {
  const NetworkCase c = parse_case_file(std::string(TRAP_CASE_DIR) + "/case9.m");
  EXPECT_EQ(c.buses.size(), 9u);
  EXPECT_EQ(c.branches.size(), 9u);
  EXPECT_EQ(c.gens.size(), 3u);
  EXPECT_EQ(c.buses[c.reference].id, 1);
}

TEST(ParseCase, ErrorsCarryLineNumbers) {
  EXPECT_EQ(error_line(two_bus_text(kLine, "0")), 2);
  EXPECT_EQ(error_line(two_bus_text(kLine, "-5")), 2);
  EXPECT_EQ(error_line(two_bus_text("  1 2 0 0.1;")), 11);
  EXPECT_EQ(error_line(two_bus_text("  1 2 0 abc 0 100 100 100 0 0 1 -360 360;")), 11);
  EXPECT_EQ(error_line(two_bus_text("  1 1 0 0.1 0 100 100 100 0 0 1 -360 360;")), 11);
  EXPECT_EQ(error_line(two_bus_text("  1 2 0 0 0 100 100 100 0 0 1 -360 360;")), 11);
}

TEST(ParseCase, StructuralErrors) {
  EXPECT_THROW(parse_case("mpc.baseMVA = 100;\n"), ParseError);
  EXPECT_THROW(parse_case_file(kData + "/does_not_exist.m"), ParseError);
  std::string unclosed = two_bus_text(kLine);
  unclosed.erase(unclosed.rfind("];"));
  EXPECT_THROW(parse_case(unclosed), ParseError);
}

TEST(ParseCase, OutOfServiceBranchesSkipped) {
  const NetworkCase c = parse_case(two_bus_text(kLine + "\n  1 2 0 0.2 0 100 100 100 0 0 0 -360 360;"));
  EXPECT_EQ(c.branches.size(), 1u);
}

}  // namespace
}  // namespace trap
