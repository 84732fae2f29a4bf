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

#include "divsched/distance.hpp"
#include "divsched/diversify.hpp"
#include "divsched/emit.hpp"
#include "divsched/error.hpp"
#include "divsched/engine.hpp"
#include "divsched/gadget.hpp"
#include "doctest.h"
#include "oracle.hpp"
#include "randprog.hpp"
#include "testutil.hpp"

using namespace divsched;

namespace {

struct Sample {
  Program prog;
  TargetDesc tgt;
};

// Alternates between the toy target and the three-register dual-issue one.
std::vector<Sample> samples(int count, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<Sample> out;
  const TargetDesc toy = testutil::target("toy");
  const TargetDesc tiny = testutil::target("tiny2w");
  for (int i = 0; i < count; ++i) {
    if (i % 2 == 0) {
      out.push_back({testutil::random_program(rng, {}), toy});
    } else {
      testutil::RandomProgramShape shape;
      shape.branches = false;
      shape.memory = false;
      shape.max_block_len = 5;
      out.push_back({testutil::random_program(rng, shape), tiny});
    }
  }
  return out;
}

}  // namespace

TEST_CASE("property: serialization round trip") {
  for (const auto& s : samples(100, 11)) CHECK(parse_program(serialize(s.prog)) == s.prog);
}

TEST_CASE("property: solver optimum equals brute force") {
  int feasible = 0;
  for (const auto& s : samples(80, 12)) {
    CAPTURE(serialize(s.prog));
    const Csp csp = build_csp(s.prog, s.tgt);
    const SearchResult r = solve_optimal(csp, SearchConfig{});
    const oracle::Problem op = oracle::make(s.prog, s.tgt);
    const oracle::Cost want = oracle::optimum(op);
    if (want < 0) {
      CHECK(r.status == SearchStatus::Unsat);
      continue;
    }
    ++feasible;
    REQUIRE(r.status == SearchStatus::Optimal);
    CHECK(r.solution->cost == want);
    CHECK(oracle::valid(op, r.solution->c, r.solution->m, r.solution->r));
  }
  CHECK(feasible > 40);
}

TEST_CASE("property: propagation never removes a solution") {
  Rng pick(3);
  for (const auto& s : samples(40, 13)) {
    CAPTURE(serialize(s.prog));
    const Csp csp = build_csp(s.prog, s.tgt);
    const oracle::Problem op = oracle::make(s.prog, s.tgt);
    int seen = 0;
    oracle::enumerate(op, 1'000'000, [&](const std::vector<int>& c, const std::vector<int>& m, oracle::Cost) {
      // fix a random subset of this schedule; its values must survive
      Store st = root_store(csp);
      for (int i = 0; i < csp.num_instrs(); ++i) {
        if (pick.bernoulli(0.5)) st.assign(st.c_var(i), c[i]);
        if (pick.bernoulli(0.5)) st.assign(st.m_var(i), m[i]);
      }
      REQUIRE(propagate(csp, st));
      for (int i = 0; i < csp.num_instrs(); ++i) {
        CHECK(st.contains(st.c_var(i), c[i]));
        CHECK(st.contains(st.m_var(i), m[i]));
      }
      return ++seen < 30;
    });
  }
}

TEST_CASE("property: pools satisfy every invariant") {
  Rng cfg_rng(21);
  for (const auto& s : samples(40, 14)) {
    CAPTURE(serialize(s.prog));
    const oracle::Problem op = oracle::make(s.prog, s.tgt);
    const oracle::Cost opt = oracle::optimum(op);
    if (opt < 0) continue;
    const Csp csp = build_csp(s.prog, s.tgt);
    DivConfig cfg;
    cfg.k = 2 + static_cast<int>(cfg_rng.uniform(30));
    cfg.p = 0.1 * static_cast<double>(cfg_rng.uniform(5));
    cfg.h = 1 + static_cast<int>(cfg_rng.uniform(2));
    cfg.metric = cfg_rng.bernoulli(0.3) ? Metric::LD : Metric::HD;
    cfg.method = static_cast<Method>(cfg_rng.uniform(3));
    cfg.seed = cfg_rng.next();
    cfg.time_limit = 20;
    CAPTURE(cfg.k);
    CAPTURE(cfg.p);
    CAPTURE(to_string(cfg.method));
    const VariantPool pool = diversify(csp, cfg);

    REQUIRE(!pool.solutions.empty());
    CHECK(pool.stop != StopReason::TimeLimit);
    CHECK(pool.solutions.size() <= static_cast<std::size_t>(cfg.k));
    CHECK(pool.optimum == opt);
    CHECK(pool.solutions[0].cost == opt);
    CHECK(pool.cost_bound == gap_bound(opt, cfg.p));
    std::set<std::vector<int>> cs;
    for (const auto& sol : pool.solutions) {
      CHECK(oracle::valid(op, sol.c, sol.m, sol.r));
      CHECK(sol.cost == oracle::cost(op, sol.c, sol.m));
      CHECK(sol.cost <= pool.cost_bound);
      cs.insert(sol.c);
    }
    CHECK(cs.size() == pool.solutions.size());
    for (std::size_t i = 0; i < pool.solutions.size(); ++i)
      for (std::size_t j = i + 1; j < pool.solutions.size(); ++j)
        CHECK(distance(s.prog, cfg.metric, pool.solutions[i], pool.solutions[j]) >= cfg.h);
    if (pool.stop == StopReason::Exhausted && cfg.metric == Metric::HD && cfg.h == 1)
      CHECK(cs == oracle::schedules(op, pool.cost_bound));
    if (pool.stop == StopReason::Complete) CHECK(pool.solutions.size() == static_cast<std::size_t>(cfg.k));
  }
}

TEST_CASE("property: listings and distances") {
  for (const auto& s : samples(40, 15)) {
    const Csp csp = build_csp(s.prog, s.tgt);
    if (s.tgt.issue_width != 1) continue;  // one instruction per slot
    DivConfig cfg;
    cfg.k = 6;
    cfg.p = 0.3;
    VariantPool pool;
    try {
      pool = diversify(csp, cfg);
    } catch (const Unsatisfiable&) {
      continue;
    }
    const int n = s.prog.num_instrs();
    std::vector<AsmListing> asms;
    for (const auto& sol : pool.solutions) {
      const AsmListing l = emit(s.prog, s.tgt, sol);
      const ScheduleSeq seq = channel(s.prog, sol);
      REQUIRE(l.lines.size() == seq.symbols.size());
      int real = 0;
      for (std::size_t k = 0; k < l.lines.size(); ++k) {
        CHECK(l.lines[k].address == l.base + k * kSlotBytes);
        CHECK(l.lines[k].instr == seq.symbols[k]);
        real += !l.lines[k].is_nop;
      }
      CHECK(real == n);
      asms.push_back(l);
      const Srate self = srate(l, l);
      if (!self.no_gadgets) CHECK(self.value() == 1.0);
    }
    for (std::size_t i = 0; i < pool.solutions.size(); ++i)
      for (std::size_t j = 0; j < pool.solutions.size(); ++j) {
        const auto& a = pool.solutions[i];
        const auto& b = pool.solutions[j];
        const int hd = hamming(a, b);
        const int ld = levenshtein(s.prog, a, b);
        CHECK(hd == hamming(b, a));
        CHECK(hd <= n);
        CHECK(ld == levenshtein(s.prog, b, a));
        CHECK((hd == 0) == (i == j));
        CHECK((ld == 0) == (channel(s.prog, a) == channel(s.prog, b)));
        const Srate r = srate(asms[i], asms[j]);
        CHECK(r.survived <= r.total);
        CHECK(srate_bucket(r) >= 0);
        CHECK(srate_bucket(r) <= 3);
      }
  }
}
