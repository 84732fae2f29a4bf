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

#pragma once

#include <cstdint>
#include <limits>
#include <memory>
#include <optional>
#include <vector>

#include "divsched/model.hpp"
#include "divsched/rng.hpp"

namespace divsched {

/// Variable numbering inside a store: c[i] is i, m[i] is n + i and r[t] is
/// 2n + t, where n is the instruction count.
using Var = int;

/// Finite integer domains for every variable of one Csp, as bitsets with
/// cached bounds. Copying a store is the unit of backtracking.
class Store {
 public:
  explicit Store(const Csp& csp);

  int num_vars() const { return static_cast<int>(lo_.size()); }
  int num_instrs() const { return layout_->num_instrs; }
  Var c_var(int instr) const { return instr; }
  Var m_var(int instr) const { return layout_->num_instrs + instr; }
  Var r_var(int temp) const { return 2 * layout_->num_instrs + temp; }

  int min(Var v) const { return lo_[v]; }
  int max(Var v) const { return hi_[v]; }
  bool fixed(Var v) const { return lo_[v] == hi_[v]; }
  int value(Var v) const { return lo_[v]; }
  bool contains(Var v, int x) const;
  int size(Var v) const;
  std::vector<int> values(Var v) const;
  /// The k-th smallest value, 0-based.
  int nth_value(Var v, int k) const;
  bool all_fixed() const;

  // Each modifier returns false when the domain becomes empty.
  bool remove(Var v, int x);
  bool set_min(Var v, int x);
  bool set_max(Var v, int x);
  bool assign(Var v, int x);

  /// Upper bound on the objective enforced by the cost propagator.
  Cost cost_limit = std::numeric_limits<Cost>::max();

  std::vector<Var>& touched() { return touched_; }

  friend bool operator==(const Store& a, const Store& b) {
    return a.bits_ == b.bits_ && a.lo_ == b.lo_ && a.hi_ == b.hi_ && a.cost_limit == b.cost_limit;
  }

 private:
  struct Layout {
    int num_instrs = 0;
    std::vector<int> offset;  // first word of each variable
  };

  std::uint64_t* words(Var v) { return bits_.data() + layout_->offset[v]; }
  const std::uint64_t* words(Var v) const { return bits_.data() + layout_->offset[v]; }
  int word_count(Var v) const { return layout_->offset[v + 1] - layout_->offset[v]; }
  void touch(Var v) { touched_.push_back(v); }
  void fix_bounds(Var v);

  std::shared_ptr<const Layout> layout_;
  std::vector<std::uint64_t> bits_;
  std::vector<int> lo_;
  std::vector<int> hi_;
  std::vector<Var> touched_;
};

/// Root domains of `csp`, with the tightest posted cost bound. Not yet
/// propagated.
Store root_store(const Csp& csp);

/// Runs every propagator of `csp` to a common fixpoint. Returns false when
/// some domain empties; the store is then unspecified.
bool propagate(const Csp& csp, Store& store);

enum class Strategy { Original, Random };
enum class Mode { Optimize, FindFirst };

struct SearchConfig {
  Strategy strategy = Strategy::Original;
  long fail_limit = 500;       // failures per restart
  double time_limit = 60.0;    // seconds of wall clock
  std::uint64_t seed = 1;
  Mode mode = Mode::FindFirst;
  std::optional<long> max_restarts;  // unset: restart until the time limit
  /// Restart k allows fail_limit * restart_growth^k failures. Above 1 the
  /// search is complete: some run eventually exhausts its tree.
  double restart_growth = 1.0;
};

struct SearchStats {
  long failures = 0;
  long restarts = 0;
  long nodes = 0;
  double elapsed = 0.0;
};

enum class SearchStatus {
  Optimal,     // solve_optimal: proven minimum
  Feasible,    // solve_optimal: time ran out, best so far
  Found,       // solve_next: a solution
  Unsat,       // search space exhausted
  LimitHit,    // time or restart budget exhausted without a solution
};

struct SearchResult {
  SearchStatus status = SearchStatus::Unsat;
  std::optional<Solution> solution;
  SearchStats stats;
};

struct Decision {
  Var var = 0;
  int value = 0;
};

/// Picks the next branching decision. Original: first unfixed variable in
/// c, m, r order; minimum value for c and m, uniform value for r. Random:
/// uniform unfixed variable and uniform value. Requires an unfixed variable.
Decision branch(const Store& store, Strategy strategy, Rng& rng);

/// Branch-and-bound to a proven minimum (complete depth-first search, no
/// restarts). Each new incumbent tightens the bound to cost - 1.
SearchResult solve_optimal(const Csp& csp, const SearchConfig& cfg);

/// First solution by restart-based search. Restart k draws its decisions
/// from Rng(cfg.seed, k). A run that exhausts its tree below the failure
/// limit proves unsatisfiability. `start` fixes a subset of variables.
SearchResult solve_next(const Csp& csp, const SearchConfig& cfg, const PartialAssignment* start = nullptr);

}  // namespace divsched
