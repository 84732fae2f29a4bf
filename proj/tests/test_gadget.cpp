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

#include <numeric>
#include <string>

#include "divsched/diversify.hpp"
#include "divsched/emit.hpp"
#include "divsched/error.hpp"
#include "divsched/gadget.hpp"
#include "doctest.h"
#include "testutil.hpp"

using namespace divsched;

namespace {

AsmLine line(std::uint64_t addr, std::string mnemonic, bool branch = false) {
  AsmLine l;
  l.address = addr;
  l.mnemonic = std::move(mnemonic);
  l.is_branch = branch;
  l.is_nop = l.mnemonic == "nop";
  return l;
}

AsmListing listing(std::vector<std::string> ops, std::uint64_t base = 0x100) {
  AsmListing l;
  l.base = base;
  l.block_starts = {0};
  for (std::size_t k = 0; k < ops.size(); ++k) {
    const bool br = ops[k].rfind("j", 0) == 0;
    l.lines.push_back(line(base + 4 * k, ops[k], br));
  }
  return l;
}

}  // namespace

TEST_CASE("no branches means no gadgets") {
  CHECK(find_gadgets(listing({"a", "b", "c"})).empty());
  const Srate s = srate(listing({"a"}), listing({"a"}));
  CHECK(s.no_gadgets);
  CHECK(s.value() == 0.0);
}

TEST_CASE("gadget suffixes") {
  const auto g = find_gadgets(listing({"x", "y", "z", "jr"}));
  REQUIRE(g.size() == 4);
  const std::vector<Gadget> expect = {
      {0x100, {"x", "y", "z", "jr"}},
      {0x104, {"y", "z", "jr"}},
      {0x108, {"z", "jr"}},
      {0x10c, {"jr"}},
  };
  std::vector<Gadget> sorted = g;
  std::sort(sorted.begin(), sorted.end());
  CHECK(sorted == expect);
  CHECK(find_gadgets(listing({"x", "y", "z", "jr"}), 2).size() == 2);
}

TEST_CASE("gadgets skip nops and stop at the previous branch") {
  const auto g = find_gadgets(listing({"a", "j1", "x", "nop", "j2"}));
  std::vector<Gadget> sorted = g;
  std::sort(sorted.begin(), sorted.end());
  const std::vector<Gadget> expect = {
      {0x100, {"a", "j1"}},
      {0x104, {"j1"}},
      {0x108, {"x", "j2"}},
      {0x110, {"j2"}},
  };
  CHECK(sorted == expect);
}

TEST_CASE("hand computed survival rates") {
  const AsmListing a = listing({"x", "y", "z", "jr"});
  CHECK(srate(a, a).value() == 1.0);
  // changing the third line kills every gadget containing it
  const Srate quarter = srate(a, listing({"x", "y", "w", "jr"}));
  CHECK(quarter.survived == 1);
  CHECK(quarter.total == 4);
  CHECK(quarter.value() == 0.25);
  // changing the first line kills only the longest
  CHECK(srate(a, listing({"q", "y", "z", "jr"})).value() == 0.75);
  // same code at another address survives nowhere
  CHECK(srate(a, listing({"x", "y", "z", "jr"}, 0x104)).value() == 0.0);
}

TEST_CASE("buckets") {
  CHECK(srate_bucket({0, 10}) == 0);
  CHECK(srate_bucket({0, 0, true}) == 0);
  CHECK(srate_bucket({1, 10}) == 1);
  CHECK(srate_bucket({1, 9}) == 2);
  CHECK(srate_bucket({4, 10}) == 2);
  CHECK(srate_bucket({41, 100}) == 3);
  CHECK(srate_bucket({7, 7}) == 3);
}

TEST_CASE("survival over a diversified pool") {
  const Program prog = testutil::fixture("bench20");
  const TargetDesc tgt = testutil::target("toy");
  const Csp csp = build_csp(prog, tgt);
  DivConfig cfg;
  cfg.k = 12;
  const VariantPool pool = diversify(csp, cfg);
  REQUIRE(pool.solutions.size() == 12);
  std::vector<AsmListing> asms;
  for (const auto& s : pool.solutions) asms.push_back(emit(prog, tgt, s));
  const SurvivalReport rep = survival_report(asms);
  CHECK(rep.pairs.size() == 12 * 11);
  CHECK(std::accumulate(rep.histogram.begin(), rep.histogram.end(), 0L) == 12 * 11);
  for (const auto& pr : rep.pairs) {
    CHECK(pr.i != pr.j);
    CHECK(pr.rate.survived <= pr.rate.total);
    CHECK(pr.rate.value() == srate(asms[pr.i], asms[pr.j]).value());
  }
  REQUIRE_FALSE(rep.modes.empty());
  for (int m : rep.modes)
    for (long h : rep.histogram) CHECK(rep.histogram[m] >= h);
  CHECK(rep.mean() >= 0.0);
  CHECK(rep.mean() <= 1.0);
  // header plus one row per pair
  const std::string csv = pair_matrix_csv(rep);
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 1 + 12 * 11);
  CHECK_THROWS_AS(survival_report(std::span(asms).first(1)), PoolTooSmall);
}
