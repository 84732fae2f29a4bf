// Copyright 2026 The divsched Authors
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

#include "divsched/error.hpp"
#include "divsched/target.hpp"
#include "doctest.h"
#include "testutil.hpp"

using namespace divsched;

TEST_CASE("default target") {
  const TargetDesc t = default_target();
  CHECK(t.registers.size() == 8);
  CHECK(t.issue_width == 1);
  REQUIRE(t.find_impls("mul") != nullptr);
  REQUIRE(t.find_impls("mul")->size() == 2);
  CHECK(t.find_impls("mul")->at(0) == ProcInstr{"mul", 3, 1});
  CHECK(t.find_impls("mul")->at(1) == ProcInstr{"mul.alt", 4, 1});
  for (const char* op : {"add", "addi", "slti", "move", "b", "beq", "blez", "jr"}) {
    REQUIRE(t.find_impls(op) != nullptr);
    CHECK(t.find_impls(op)->at(0).latency == 1);
  }
  CHECK(t.register_index("r0") == 0);
  CHECK(t.register_index("r7") == 7);
  CHECK_FALSE(t.register_index("r8").has_value());
}

TEST_CASE("bundled toy.tgt equals the builtin target") {
  const TargetDesc file = testutil::target("toy");
  CHECK(file == default_target());
  CHECK(testutil::target("toy") == file);
}

TEST_CASE("every factorial opcode has an implementation") {
  const TargetDesc t = default_target();
  for (const auto& in : testutil::fixture("factorial").instrs) CHECK(t.find_impls(in.opcode) != nullptr);
}

TEST_CASE("latency zero is rejected") {
  try {
    load_target("registers r0\nimpl add add latency 0\n");
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(std::string(e.what()).find("latency must be ≥ 1") != std::string::npos);
  }
}

TEST_CASE("a third mul implementation") {
  const std::string text = serialize(default_target()) + "impl mul mul.slow latency 6\n";
  const TargetDesc t = load_target(text);
  CHECK(t.find_impls("mul")->size() == 3);
  CHECK(load_target(serialize(t)) == t);
}

TEST_CASE("malformed target text") {
  CHECK_THROWS_AS(load_target("registers r0\nissue_width zero\n"), ParseError);
  CHECK_THROWS_AS(load_target("registers r0\nbogus line\n"), ParseError);
  CHECK_THROWS_AS(load_target("issue_width 1\n"), Error);
  CHECK_THROWS(load_target("registers r0\nimpl add add\n"));
}

TEST_CASE("dual-issue test target") {
  const TargetDesc t = testutil::target("tiny2w");
  CHECK(t.registers.size() == 3);
  CHECK(t.issue_width == 2);
  CHECK(t.find_impls("mul")->size() == 2);
}
