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

#include "divsched/diversify.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "divsched/error.hpp"

namespace divsched {

namespace {

using Clock = std::chrono::steady_clock;

constexpr int kDestroyAttempts = 3;
// Failure-limit growth for searches over the whole tree, so that they can
// prove exhaustion.
constexpr double kFullSearchGrowth = 1.5;

double seconds_since(Clock::time_point t) { return std::chrono::duration<double>(Clock::now() - t).count(); }

SearchConfig random_search(const DivConfig& cfg, std::uint64_t seed, double time_limit) {
  SearchConfig sc;
  sc.strategy = Strategy::Random;
  sc.fail_limit = cfg.fail_limit;
  sc.time_limit = time_limit;
  sc.seed = seed;
  sc.restart_growth = kFullSearchGrowth;
  return sc;
}

StepResult from_search(const SearchResult& r) {
  StepResult s;
  s.status = r.status;
  s.solution = r.solution;
  s.restarts = r.stats.restarts;
  return s;
}

int min_hamming(const std::vector<Solution>& pool, const Solution& s) {
  int best = std::numeric_limits<int>::max();
  for (const auto& q : pool) best = std::min(best, hamming(q, s));
  return best;
}

}  // namespace

void DivConfig::validate() const {
  if (k < 1) throw std::invalid_argument("variant count must be at least 1");
  if (p < 0) throw std::invalid_argument("optimality gap must be non-negative");
  if (h < 1) throw std::invalid_argument("minimum distance must be at least 1");
  if (relax_rate < 0 || relax_rate > 1) throw std::invalid_argument("relax rate must lie in [0, 1]");
  if (fail_limit < 1) throw std::invalid_argument("failure limit must be at least 1");
  if (!(time_limit > 0)) throw std::invalid_argument("time limit must be positive");
}

Cost gap_bound(Cost optimum, double p) {
  return static_cast<Cost>(std::floor((1.0 + p) * static_cast<double>(optimum) + 1e-9));
}

StepResult lns_step(const Csp& csp, const Solution& current, const DivConfig& cfg, Rng& rng, double time_limit) {
  const auto start = Clock::now();
  StepResult out;
  for (int attempt = 0; attempt < kDestroyAttempts; ++attempt) {
    const double left = time_limit - seconds_since(start);
    if (left <= 0) {
      out.status = SearchStatus::LimitHit;
      return out;
    }
    auto keep = PartialAssignment::empty(csp);
    for (int i = 0; i < csp.num_instrs(); ++i)
      if (!rng.bernoulli(cfg.relax_rate)) keep.c[i] = current.c[i];
    for (int i = 0; i < csp.num_instrs(); ++i)
      if (!rng.bernoulli(cfg.relax_rate)) keep.m[i] = current.m[i];
    for (int t = 0; t < csp.num_temps(); ++t)
      if (!rng.bernoulli(cfg.relax_rate)) keep.r[t] = current.r[t];
    auto sc = random_search(cfg, rng.next(), left);
    sc.max_restarts = 0;
    sc.restart_growth = 1.0;
    auto r = solve_next(csp, sc, &keep);
    ++out.attempts;
    out.restarts += r.stats.restarts;
    if (r.status == SearchStatus::Found) {
      out.status = r.status;
      out.solution = std::move(r.solution);
      return out;
    }
  }
  const double left = time_limit - seconds_since(start);
  if (left <= 0) {
    out.status = SearchStatus::LimitHit;
    return out;
  }
  auto r = solve_next(csp, random_search(cfg, rng.next(), left));
  out.status = r.status;
  out.solution = std::move(r.solution);
  out.restarts += r.stats.restarts;
  return out;
}

StepResult rs_step(const Csp& csp, const DivConfig& cfg, double time_limit) {
  return from_search(solve_next(csp, random_search(cfg, cfg.seed, time_limit)));
}

StepResult maxdiv_step(const Csp& csp, const std::vector<Solution>& pool, const DivConfig& cfg, double time_limit) {
  if (pool.empty()) throw std::invalid_argument("maxdiv_step needs a nonempty pool");
  const auto start = Clock::now();
  StepResult out = from_search(solve_next(csp, random_search(cfg, cfg.seed + pool.size(), time_limit)));
  if (out.status != SearchStatus::Found) return out;
  int best = min_hamming(pool, *out.solution);
  const int n = csp.num_instrs();
  while (best < n) {
    const double left = time_limit - seconds_since(start);
    if (left <= 0) break;
    Csp tighter = csp;
    for (const auto& q : pool) tighter.post(Distance{q.c, best + 1});
    SearchConfig sc;
    sc.strategy = Strategy::Original;
    sc.fail_limit = std::numeric_limits<long>::max();
    sc.time_limit = left;
    sc.seed = cfg.seed;
    auto r = solve_next(tighter, sc);
    out.restarts += r.stats.restarts;
    if (r.status != SearchStatus::Found) break;
    // The bound may have been cleared by more than one.
    best = min_hamming(pool, *r.solution);
    out.solution = std::move(r.solution);
  }
  return out;
}

VariantPool diversify(const Csp& csp, const DivConfig& cfg) {
  cfg.validate();
  const auto start = Clock::now();
  VariantPool pool;
  pool.config = cfg;

  SearchConfig oc;
  oc.time_limit = cfg.time_limit;
  oc.seed = cfg.seed;
  auto opt = solve_optimal(csp, oc);
  if (!opt.solution) {
    if (opt.status == SearchStatus::LimitHit) throw Error("no solution found within the time limit");
    throw Unsatisfiable("the program has no feasible schedule");
  }
  pool.optimum = opt.solution->cost;
  pool.optimum_proven = opt.status == SearchStatus::Optimal;
  pool.cost_bound = gap_bound(pool.optimum, cfg.p);
  pool.solutions.push_back(*opt.solution);
  pool.provenance.push_back({0, opt.stats.restarts, 0});

  // Under LD the engine only excludes repeats; distance is checked here.
  const int posted_h = cfg.metric == Metric::HD ? cfg.h : 1;
  Csp work = csp;
  work.post(CostBound{pool.cost_bound});
  work.post(Distance{opt.solution->c, posted_h});

  Rng rng(cfg.seed, 0);
  int iteration = 0;
  int ld_rejected = 0;
  while (static_cast<int>(pool.solutions.size()) < cfg.k) {
    const double left = cfg.time_limit - seconds_since(start);
    if (left <= 0) {
      pool.stop = StopReason::TimeLimit;
      break;
    }
    ++iteration;
    StepResult step;
    switch (cfg.method) {
      case Method::LNS:
        step = lns_step(work, pool.solutions.back(), cfg, rng, left);
        break;
      case Method::RS:
        step = rs_step(work, cfg, left);
        break;
      case Method::MaxDiv:
        step = maxdiv_step(work, pool.solutions, cfg, left);
        break;
    }
    if (step.status == SearchStatus::Unsat) {
      pool.stop = StopReason::Exhausted;
      break;
    }
    if (step.status != SearchStatus::Found) {
      pool.stop = StopReason::TimeLimit;
      break;
    }
    const Solution& s = *step.solution;
    if (cfg.metric == Metric::LD) {
      work.post(Distance{s.c, 1});
      bool far = true;
      for (const auto& q : pool.solutions) far = far && levenshtein(*csp.program, q, s) >= cfg.h;
      if (!far) {
        ++ld_rejected;
        continue;
      }
    } else {
      work.post(Distance{s.c, cfg.h});
    }
    pool.solutions.push_back(s);
    pool.provenance.push_back({iteration, step.restarts, step.attempts + ld_rejected});
    ld_rejected = 0;
  }
  pool.wall_time = seconds_since(start);
  return pool;
}

const char* to_string(Method m) {
  switch (m) {
    case Method::LNS:
      return "lns";
    case Method::RS:
      return "rs";
    case Method::MaxDiv:
      return "maxdiv";
  }
  return "?";
}

const char* to_string(StopReason r) {
  switch (r) {
    case StopReason::Complete:
      return "complete";
    case StopReason::Exhausted:
      return "exhausted";
    case StopReason::TimeLimit:
      return "time_limit";
  }
  return "?";
}

}  // namespace divsched
