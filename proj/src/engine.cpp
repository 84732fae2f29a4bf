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

#include "divsched/engine.hpp"

#include <bit>
#include <chrono>
#include <stdexcept>
#include <string>

#include "propagators.hpp"

namespace divsched {

namespace {

constexpr int kWordBits = 64;

int word_of(int x) { return x / kWordBits; }
std::uint64_t bit_of(int x) { return std::uint64_t{1} << (x % kWordBits); }

}  // namespace

Store::Store(const Csp& csp) {
  const int n = csp.num_instrs();
  const int vars = 2 * n + csp.num_temps();
  auto layout = std::make_shared<Layout>();
  layout->num_instrs = n;
  lo_.assign(vars, 0);
  hi_.assign(vars, 0);
  for (int i = 0; i < n; ++i) {
    hi_[i] = csp.c_max[i];
    hi_[n + i] = static_cast<int>(csp.latency[i].size()) - 1;
  }
  for (int t = 0; t < csp.num_temps(); ++t) {
    lo_[2 * n + t] = csp.r_domain[t].front();
    hi_[2 * n + t] = csp.r_domain[t].back();
  }
  layout->offset.resize(vars + 1);
  int total = 0;
  for (int v = 0; v < vars; ++v) {
    layout->offset[v] = total;
    total += word_of(hi_[v]) + 1;
  }
  layout->offset[vars] = total;
  layout_ = std::move(layout);

  bits_.assign(total, 0);
  for (int v = 0; v < 2 * n; ++v)
    for (int x = lo_[v]; x <= hi_[v]; ++x) words(v)[word_of(x)] |= bit_of(x);
  for (int t = 0; t < csp.num_temps(); ++t)
    for (int x : csp.r_domain[t]) words(2 * n + t)[word_of(x)] |= bit_of(x);
}

bool Store::contains(Var v, int x) const {
  if (x < lo_[v] || x > hi_[v]) return false;
  return (words(v)[word_of(x)] & bit_of(x)) != 0;
}

int Store::size(Var v) const {
  int count = 0;
  for (int w = word_of(lo_[v]); w <= word_of(hi_[v]); ++w) count += std::popcount(words(v)[w]);
  return count;
}

std::vector<int> Store::values(Var v) const {
  std::vector<int> out;
  for (int x = lo_[v]; x <= hi_[v]; ++x)
    if (contains(v, x)) out.push_back(x);
  return out;
}

int Store::nth_value(Var v, int k) const {
  for (int x = lo_[v]; x <= hi_[v]; ++x)
    if (contains(v, x) && k-- == 0) return x;
  throw std::out_of_range("nth_value: index beyond domain size");
}

bool Store::all_fixed() const {
  for (std::size_t v = 0; v < lo_.size(); ++v)
    if (lo_[v] != hi_[v]) return false;
  return true;
}

void Store::fix_bounds(Var v) {
  const std::uint64_t* w = words(v);
  int lo = lo_[v];
  while (lo <= hi_[v] && !(w[word_of(lo)] & bit_of(lo))) ++lo;
  int hi = hi_[v];
  while (hi >= lo && !(w[word_of(hi)] & bit_of(hi))) --hi;
  lo_[v] = lo;
  hi_[v] = hi;
}

bool Store::remove(Var v, int x) {
  if (!contains(v, x)) return true;
  if (lo_[v] == hi_[v]) return false;
  words(v)[word_of(x)] &= ~bit_of(x);
  if (x == lo_[v] || x == hi_[v]) fix_bounds(v);
  touch(v);
  return true;
}

bool Store::set_min(Var v, int x) {
  if (x <= lo_[v]) return true;
  if (x > hi_[v]) return false;
  std::uint64_t* w = words(v);
  for (int y = lo_[v]; y < x; ++y) w[word_of(y)] &= ~bit_of(y);
  lo_[v] = x;
  fix_bounds(v);
  if (lo_[v] > hi_[v]) return false;
  touch(v);
  return true;
}

bool Store::set_max(Var v, int x) {
  if (x >= hi_[v]) return true;
  if (x < lo_[v]) return false;
  std::uint64_t* w = words(v);
  for (int y = x + 1; y <= hi_[v]; ++y) w[word_of(y)] &= ~bit_of(y);
  hi_[v] = x;
  fix_bounds(v);
  if (lo_[v] > hi_[v]) return false;
  touch(v);
  return true;
}

bool Store::assign(Var v, int x) {
  if (!contains(v, x)) return false;
  if (lo_[v] == hi_[v]) return true;
  std::uint64_t* w = words(v);
  for (int k = word_of(lo_[v]); k <= word_of(hi_[v]); ++k) w[k] = 0;
  w[word_of(x)] = bit_of(x);
  lo_[v] = hi_[v] = x;
  touch(v);
  return true;
}

Store root_store(const Csp& csp) {
  Store s(csp);
  s.cost_limit = csp.cost_limit().value_or(std::numeric_limits<Cost>::max());
  return s;
}

bool propagate(const Csp& csp, Store& store) { return detail::PropagatorSet(csp).run_all(store); }

Decision branch(const Store& store, Strategy strategy, Rng& rng) {
  if (strategy == Strategy::Original) {
    for (Var v = 0; v < store.num_vars(); ++v) {
      if (store.fixed(v)) continue;
      if (v < 2 * store.num_instrs()) return {v, store.min(v)};
      return {v, store.nth_value(v, static_cast<int>(rng.uniform(store.size(v))))};
    }
    throw std::logic_error("branch: every variable is fixed");
  }
  std::vector<Var> open;
  for (Var v = 0; v < store.num_vars(); ++v)
    if (!store.fixed(v)) open.push_back(v);
  if (open.empty()) throw std::logic_error("branch: every variable is fixed");
  Var v = open[rng.uniform(open.size())];
  return {v, store.nth_value(v, static_cast<int>(rng.uniform(store.size(v))))};
}

namespace {

using Clock = std::chrono::steady_clock;

enum class RunEnd { Exhausted, FailLimit, Timeout, Stopped };

Solution extract(const Csp& csp, const Store& s) {
  Solution sol;
  const int n = csp.num_instrs();
  for (int i = 0; i < n; ++i) {
    sol.c.push_back(s.value(s.c_var(i)));
    sol.m.push_back(s.value(s.m_var(i)));
  }
  for (int t = 0; t < csp.num_temps(); ++t) sol.r.push_back(s.value(s.r_var(t)));
  sol.cost = objective(csp, sol);
  std::vector<std::string> why;
  if (!check_solution(csp, sol, &why))
    throw std::logic_error("search produced an invalid solution: " + why.front());
  return sol;
}

class Search {
 public:
  Search(const Csp& csp, const SearchConfig& cfg)
      : csp_(csp), props_(csp), cfg_(cfg), start_(Clock::now()),
        deadline_(start_ + std::chrono::duration_cast<Clock::duration>(std::chrono::duration<double>(cfg.time_limit))) {}

  /// Propagated root, or nullopt when the root already fails.
  std::optional<Store> root(const PartialAssignment* fix) {
    Store s = root_store(csp_);
    if (fix) {
      bool ok = true;
      for (int i = 0; i < csp_.num_instrs() && ok; ++i) {
        if (fix->c[i]) ok = s.assign(s.c_var(i), *fix->c[i]);
        if (ok && fix->m[i]) ok = s.assign(s.m_var(i), *fix->m[i]);
      }
      for (int t = 0; t < csp_.num_temps() && ok; ++t)
        if (fix->r[t]) ok = s.assign(s.r_var(t), *fix->r[t]);
      if (!ok) return std::nullopt;
    }
    if (!props_.run_all(s)) return std::nullopt;
    return s;
  }

  bool timed_out() const { return Clock::now() >= deadline_; }

  /// Depth-first search below `root`. `on_solution` returns true to stop.
  /// In Optimize mode every solution tightens the cost limit to cost - 1.
  template <typename OnSolution>
  RunEnd run(const Store& root, Rng& rng, long fail_limit, OnSolution&& on_solution) {
    struct Frame {
      Store store;
      std::optional<Decision> exclude;
    };
    std::vector<Frame> stack;
    stack.push_back({root, std::nullopt});
    long run_failures = 0;
    Cost limit = root.cost_limit;
    while (!stack.empty()) {
      if ((++stats.nodes & 63) == 0 && timed_out()) return RunEnd::Timeout;
      Frame f = std::move(stack.back());
      stack.pop_back();
      Store& s = f.store;
      bool ok = true;
      if (f.exclude || s.cost_limit > limit) {
        if (f.exclude) ok = s.remove(f.exclude->var, f.exclude->value);
        if (ok && s.cost_limit > limit) {
          s.cost_limit = limit;
          ok = props_.run_cost(s);
        } else if (ok) {
          ok = props_.run_touched(s);
        }
      }
      if (!ok) {
        ++stats.failures;
        if (++run_failures >= fail_limit) return RunEnd::FailLimit;
        continue;
      }
      if (s.all_fixed()) {
        Solution sol = extract(csp_, s);
        if (cfg_.mode == Mode::Optimize) limit = std::min(limit, sol.cost - 1);
        if (on_solution(std::move(sol))) return RunEnd::Stopped;
        continue;
      }
      Decision d = branch(s, cfg_.strategy, rng);
      stack.push_back({s, d});
      Store left = std::move(s);
      if (left.assign(d.var, d.value) && props_.run_touched(left)) {
        stack.push_back({std::move(left), std::nullopt});
      } else {
        ++stats.failures;
        if (++run_failures >= fail_limit) return RunEnd::FailLimit;
      }
    }
    return RunEnd::Exhausted;
  }

  double elapsed() const { return std::chrono::duration<double>(Clock::now() - start_).count(); }

  SearchStats stats;

 private:
  const Csp& csp_;
  detail::PropagatorSet props_;
  SearchConfig cfg_;
  Clock::time_point start_;
  Clock::time_point deadline_;
};

}  // namespace

SearchResult solve_optimal(const Csp& csp, const SearchConfig& cfg) {
  SearchConfig c = cfg;
  c.mode = Mode::Optimize;
  Search search(csp, c);
  SearchResult res;
  auto root = search.root(nullptr);
  if (!root) {
    res.status = SearchStatus::Unsat;
    res.stats = search.stats;
    res.stats.elapsed = search.elapsed();
    return res;
  }
  Rng rng(cfg.seed, 0);
  RunEnd end = search.run(*root, rng, std::numeric_limits<long>::max(), [&](Solution s) {
    res.solution = std::move(s);
    return false;
  });
  if (end == RunEnd::Exhausted)
    res.status = res.solution ? SearchStatus::Optimal : SearchStatus::Unsat;
  else
    res.status = res.solution ? SearchStatus::Feasible : SearchStatus::LimitHit;
  res.stats = search.stats;
  res.stats.elapsed = search.elapsed();
  return res;
}

SearchResult solve_next(const Csp& csp, const SearchConfig& cfg, const PartialAssignment* start) {
  SearchConfig c = cfg;
  c.mode = Mode::FindFirst;
  Search search(csp, c);
  SearchResult res;
  auto finish = [&](SearchStatus st) {
    res.status = st;
    res.stats = search.stats;
    res.stats.elapsed = search.elapsed();
    return res;
  };
  auto root = search.root(start);
  if (!root) return finish(SearchStatus::Unsat);
  double limit = static_cast<double>(std::max(1L, cfg.fail_limit));
  constexpr double kMaxLimit = 1e15;
  for (std::uint64_t k = 0;; ++k) {
    Rng rng(cfg.seed, k);
    RunEnd end = search.run(*root, rng, static_cast<long>(limit), [&](Solution s) {
      res.solution = std::move(s);
      return true;
    });
    switch (end) {
      case RunEnd::Stopped:
        return finish(SearchStatus::Found);
      case RunEnd::Exhausted:
        return finish(SearchStatus::Unsat);
      case RunEnd::Timeout:
        return finish(SearchStatus::LimitHit);
      case RunEnd::FailLimit:
        break;
    }
    if (search.timed_out()) return finish(SearchStatus::LimitHit);
    if (cfg.max_restarts && search.stats.restarts >= *cfg.max_restarts) return finish(SearchStatus::LimitHit);
    ++search.stats.restarts;
    limit = std::min(kMaxLimit, limit * std::max(1.0, cfg.restart_growth));
  }
}

}  // namespace divsched
