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
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "divsched/ir.hpp"
#include "divsched/target.hpp"

namespace divsched {

using Cost = std::int64_t;

// Constraint kinds. Instruction and temp references are ids into the
// program the Csp was built from.

/// c[to] >= c[from] + gap, where gap is the latency of the implementation
/// chosen for `from` (Data) or 0 (Order).
struct Precedence {
  int from = 0;
  int to = 0;
  DepKind kind = DepKind::Data;
};

/// At most issue_width instructions of the block share a cycle.
struct IssueWidth {
  int block = 0;
};

/// Temps whose live ranges overlap in some block get distinct registers.
struct RegInterference {
  int temp_a = 0;
  int temp_b = 0;
};

/// Every branch of the block issues no earlier than every non-branch.
struct BranchLast {
  int block = 0;
};

/// Hamming distance between c and `ref` is at least h.
struct Distance {
  std::vector<int> ref;
  int h = 1;
};

struct CostBound {
  Cost limit = 0;
};

using Constraint = std::variant<Precedence, IssueWidth, RegInterference, BranchLast, Distance, CostBound>;

/// The part of a temp's lifetime inside one block.
struct LiveSegment {
  int block = 0;
  int def_instr = -1;  // -1 when live on entry
  std::vector<int> uses;
  bool live_out = false;
};

/// Half-open interval of cycles [start, end).
struct Interval {
  int start = 0;
  int end = 0;
};

struct BlockScope {
  int freq = 1;
  int horizon = 0;  // every instruction completes by this cycle
  std::vector<int> instrs;
  std::vector<int> branches;
};

/// The constraint model of one program on one target.
///
/// Variables: c[i] issue cycle and m[i] implementation index per
/// instruction, r[t] register index per temp. Root domains are
/// c[i] in [0, c_max[i]], m[i] in [0, latency[i].size()), r[t] in r_domain[t].
struct Csp {
  std::shared_ptr<const Program> program;
  std::shared_ptr<const TargetDesc> target;

  std::vector<std::vector<int>> latency;  // per instruction, per implementation
  std::vector<int> c_max;
  std::vector<std::vector<int>> r_domain;

  std::vector<BlockScope> blocks;
  std::vector<std::vector<LiveSegment>> live;  // per temp
  int issue_width = 1;

  std::vector<Constraint> constraints;

  int num_instrs() const { return static_cast<int>(c_max.size()); }
  int num_temps() const { return static_cast<int>(r_domain.size()); }
  int block_of(int instr) const { return program->instrs[instr].block; }
  int min_latency(int instr) const;
  int max_latency(int instr) const;

  void post(Constraint c) { constraints.push_back(std::move(c)); }

  /// Tightest posted CostBound, if any.
  std::optional<Cost> cost_limit() const;
};

struct Solution {
  std::vector<int> c;
  std::vector<int> m;
  std::vector<int> r;
  Cost cost = 0;

  friend bool operator==(const Solution&, const Solution&) = default;
};

/// Some variables assigned, others free.
struct PartialAssignment {
  std::vector<std::optional<int>> c;
  std::vector<std::optional<int>> m;
  std::vector<std::optional<int>> r;

  static PartialAssignment empty(const Csp& csp);
};

struct BuildOptions {
  /// Overrides the per-block horizon (sum of the largest latencies).
  std::optional<int> initial_horizon;
};

/// Throws SemanticError for programs the target cannot implement and
/// UnschedulableBlock when a block does not fit within 4x its initial horizon.
Csp build_csp(const Program& prog, const TargetDesc& tgt, const BuildOptions& opts = {});

/// Sum over blocks of freq * makespan, makespan = max(c[i] + latency(m[i])).
Cost objective(const Csp& csp, const Solution& s);

/// Admissible lower bound on the objective of any completion of `p`.
Cost objective(const Csp& csp, const PartialAssignment& p);

/// Lower bound on max(c[i] + tail[i]) over unit-time instructions issued no
/// earlier than release[i], at most `width` per cycle. Exact for the
/// relaxation without precedences (largest-tail-first list scheduling).
int makespan_bound(std::span<const int> release, std::span<const int> tail, int width);

Interval live_interval(const Csp& csp, const LiveSegment& seg, std::span<const int> c);

/// Re-evaluates every constraint of `csp` on `s` from scratch. Violations are
/// appended to `why` when given.
bool check_solution(const Csp& csp, const Solution& s, std::vector<std::string>* why = nullptr);

}  // namespace divsched
