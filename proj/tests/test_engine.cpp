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

#include <set>
#include <vector>

#include "divsched/engine.hpp"
#include "divsched/model.hpp"
#include "doctest.h"
#include "oracle.hpp"
#include "testutil.hpp"

using namespace divsched;

namespace {

Csp build(const char* name, const char* tgt = "toy") { return build_csp(testutil::fixture(name), testutil::target(tgt)); }

// Every distinct c vector under the current constraints, by repeatedly
// excluding the last one found.
std::set<std::vector<int>> all_schedules(Csp csp) {
  std::set<std::vector<int>> out;
  SearchConfig cfg;
  cfg.restart_growth = 2.0;
  for (;;) {
    const SearchResult r = solve_next(csp, cfg);
    if (r.status == SearchStatus::Unsat) break;
    REQUIRE(r.status == SearchStatus::Found);
    REQUIRE(check_solution(csp, *r.solution));
    REQUIRE(out.insert(r.solution->c).second);
    csp.post(Distance{r.solution->c, 1});
  }
  return out;
}

}  // namespace

TEST_CASE("store basics") {
  const Csp csp = build("diamond");
  Store s = root_store(csp);
  CHECK(s.num_vars() == 2 * 5 + csp.num_temps());
  const Var m1 = s.m_var(1);
  CHECK(s.size(m1) == 2);
  CHECK(s.values(m1) == std::vector<int>{0, 1});
  CHECK(s.remove(m1, 0));
  CHECK(s.fixed(m1));
  CHECK(s.value(m1) == 1);
  CHECK_FALSE(s.remove(m1, 1));

  Store t = root_store(csp);
  const Var c4 = t.c_var(4);
  const int hi = t.max(c4);
  CHECK(t.set_min(c4, 2));
  CHECK(t.min(c4) == 2);
  CHECK(t.set_max(c4, hi - 1));
  CHECK(t.nth_value(c4, 1) == 3);
  CHECK_FALSE(t.contains(c4, 1));
  CHECK(t.assign(c4, 3));
  CHECK(t.fixed(c4));
  CHECK_FALSE(t.assign(c4, 2));
}

TEST_CASE("precedence propagation on a chain") {
  const Csp csp = build("chain3");
  Store s = root_store(csp);
  REQUIRE(propagate(csp, s));
  CHECK(s.min(s.c_var(1)) == 1);
  CHECK(s.min(s.c_var(2)) == 2);
  CHECK(s.max(s.c_var(0)) == s.max(s.c_var(2)) - 2);
}

TEST_CASE("conflicting assignments fail") {
  const Csp csp = build("chain3");
  Store s = root_store(csp);
  s.assign(s.c_var(0), 1);
  s.assign(s.c_var(1), 1);
  CHECK_FALSE(propagate(csp, s));

  // two pinned temps on one register with overlapping lives
  const Csp inf = build("infeasible");
  Store t = root_store(inf);
  for (int i = 0; i < inf.num_instrs(); ++i) t.assign(t.c_var(i), i);
  CHECK_FALSE(propagate(inf, t));
}

TEST_CASE("distance propagation removes the last equal value") {
  BuildOptions wide;
  wide.initial_horizon = 6;
  Csp csp = build_csp(testutil::fixture("chain3"), testutil::target("toy"), wide);
  csp.post(Distance{{0, 1, 2}, 1});
  Store s = root_store(csp);
  s.assign(s.c_var(0), 0);
  s.assign(s.c_var(1), 1);
  REQUIRE(propagate(csp, s));
  CHECK_FALSE(s.contains(s.c_var(2), 2));
  CHECK(s.min(s.c_var(2)) == 3);

  Csp far = build_csp(testutil::fixture("chain3"), testutil::target("toy"), wide);
  far.post(Distance{{0, 1, 2}, 2});
  Store t = root_store(far);
  t.assign(t.c_var(0), 0);
  t.assign(t.c_var(1), 1);
  CHECK_FALSE(propagate(far, t));
}

TEST_CASE("cost bound prunes") {
  Csp csp = build("chain3");
  csp.post(CostBound{3});
  Store s = root_store(csp);
  REQUIRE(propagate(csp, s));
  for (int i = 0; i < 3; ++i) CHECK(s.fixed(s.c_var(i)));
  csp.post(CostBound{2});
  Store t = root_store(csp);
  CHECK_FALSE(propagate(csp, t));
}

TEST_CASE("propagation is idempotent") {
  for (const char* name : {"factorial", "diamond", "bench20", "exhaust"}) {
    CAPTURE(name);
    const Csp csp = build(name);
    Store s = root_store(csp);
    REQUIRE(propagate(csp, s));
    Store again = s;
    REQUIRE(propagate(csp, again));
    CHECK(again == s);
  }
}

TEST_CASE("original branching picks the first unfixed variable and its minimum") {
  const Csp csp = build("diamond");
  Store s = root_store(csp);
  REQUIRE(propagate(csp, s));
  Rng rng(1);
  const Decision d = branch(s, Strategy::Original, rng);
  CHECK(d.var == s.c_var(0));
  CHECK(d.value == s.min(s.c_var(0)));
}

TEST_CASE("random branching draws values uniformly") {
  const Csp csp = build("diamond");
  Store s = root_store(csp);
  // leave only m[1] open
  for (Var v = 0; v < s.num_vars(); ++v)
    if (v != s.m_var(1)) s.assign(v, s.min(v));
  Rng rng(42);
  int zeros = 0;
  for (int k = 0; k < 1000; ++k) {
    const Decision d = branch(s, Strategy::Random, rng);
    CHECK(d.var == s.m_var(1));
    zeros += d.value == 0;
  }
  // binomial(1000, 0.5): 5 sigma is about 79
  CHECK(zeros > 420);
  CHECK(zeros < 580);
}

TEST_CASE("searches are deterministic in the seed") {
  const Csp csp = build("bench20");
  SearchConfig cfg;
  cfg.strategy = Strategy::Random;
  cfg.seed = 7;
  const SearchResult a = solve_next(csp, cfg);
  const SearchResult b = solve_next(csp, cfg);
  REQUIRE(a.status == SearchStatus::Found);
  CHECK(*a.solution == *b.solution);
  CHECK(a.stats.nodes == b.stats.nodes);
  const SearchResult o1 = solve_optimal(csp, cfg);
  const SearchResult o2 = solve_optimal(csp, cfg);
  CHECK(*o1.solution == *o2.solution);
}

TEST_CASE("optimal solutions are valid by independent check") {
  for (const char* name : {"factorial", "fig1", "nopshift", "exhaust", "diamond", "twoblock"}) {
    CAPTURE(name);
    const Program prog = testutil::fixture(name);
    const TargetDesc tgt = testutil::target("toy");
    const Csp csp = build_csp(prog, tgt);
    const SearchResult r = solve_optimal(csp, SearchConfig{});
    REQUIRE(r.status == SearchStatus::Optimal);
    CHECK(oracle::valid(oracle::make(prog, tgt), r.solution->c, r.solution->m, r.solution->r));
  }
}

TEST_CASE("enumeration under the optimal bound matches brute force") {
  for (const char* name : {"factorial", "fig1", "exhaust", "diamond", "twoblock"}) {
    CAPTURE(name);
    const Program prog = testutil::fixture(name);
    const TargetDesc tgt = testutil::target("toy");
    const oracle::Problem op = oracle::make(prog, tgt);
    const oracle::Cost opt = oracle::optimum(op);
    for (const double slack : {0.0, 0.2}) {
      Csp csp = build_csp(prog, tgt);
      const Cost limit = static_cast<Cost>(opt * (1 + slack));
      csp.post(CostBound{limit});
      CHECK(all_schedules(csp) == oracle::schedules(op, limit));
    }
  }
}

TEST_CASE("start assignments are respected") {
  const Csp csp = build("diamond");
  PartialAssignment pa = PartialAssignment::empty(csp);
  pa.m[1] = 1;
  pa.c[0] = 1;
  SearchConfig cfg;
  cfg.strategy = Strategy::Random;
  const SearchResult r = solve_next(csp, cfg, &pa);
  REQUIRE(r.status == SearchStatus::Found);
  CHECK(r.solution->m[1] == 1);
  CHECK(r.solution->c[0] == 1);

  pa.c[1] = 0;  // before its operand
  CHECK(solve_next(csp, cfg, &pa).status == SearchStatus::Unsat);
}

TEST_CASE("budgets") {
  Csp csp = build("bench20");
  // ask for a schedule far from the optimum under the optimal bound: hard and unsat
  const SearchResult opt = solve_optimal(csp, SearchConfig{});
  csp.post(CostBound{opt.solution->cost});
  csp.post(Distance{opt.solution->c, csp.num_instrs()});
  SearchConfig cfg;
  cfg.strategy = Strategy::Random;
  cfg.fail_limit = 1;
  cfg.max_restarts = 0;
  const SearchResult r = solve_next(csp, cfg);
  CHECK((r.status == SearchStatus::LimitHit || r.status == SearchStatus::Unsat));
  CHECK(r.stats.restarts == 0);

  SearchConfig complete;
  complete.strategy = Strategy::Random;
  complete.restart_growth = 2.0;
  CHECK(solve_next(csp, complete).status == SearchStatus::Unsat);
}
