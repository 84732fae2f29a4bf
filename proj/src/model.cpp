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

#include "divsched/model.hpp"

#include <algorithm>
#include <numeric>
#include <queue>
#include <set>

#include "divsched/error.hpp"

namespace divsched {

namespace {

/// Instructions of a block in a topological order of its dependencies.
std::vector<int> topo_order(const Program& prog, const std::vector<int>& instrs) {
  std::vector<int> order;
  std::vector<int> indeg(prog.num_instrs(), 0);
  std::vector<std::vector<int>> out(prog.num_instrs());
  for (int id : instrs)
    for (const auto& d : prog.instrs[id].deps) {
      ++indeg[id];
      out[d.pred].push_back(id);
    }
  std::vector<int> ready;
  for (auto it = instrs.rbegin(); it != instrs.rend(); ++it)
    if (indeg[*it] == 0) ready.push_back(*it);
  while (!ready.empty()) {
    int id = ready.back();
    ready.pop_back();
    order.push_back(id);
    for (int next : out[id])
      if (--indeg[next] == 0) ready.push_back(next);
  }
  return order;
}

int gap_min(const Csp& csp, int from, DepKind kind) { return kind == DepKind::Data ? csp.min_latency(from) : 0; }

/// Earliest start of every instruction in the block from the dependency
/// graph, honouring assigned cycles and minimum latencies.
void earliest_starts(const Csp& csp, int block, const PartialAssignment& p, std::vector<int>& est) {
  const auto& prog = *csp.program;
  for (int id : topo_order(prog, csp.blocks[block].instrs)) {
    int e = p.c[id].value_or(0);
    for (const auto& d : prog.instrs[id].deps) {
      int gap = d.kind == DepKind::Data && p.m[d.pred] ? csp.latency[d.pred][*p.m[d.pred]] : gap_min(csp, d.pred, d.kind);
      if (!p.c[id]) e = std::max(e, est[d.pred] + gap);
    }
    est[id] = e;
  }
}

}  // namespace

int Csp::min_latency(int instr) const { return *std::min_element(latency[instr].begin(), latency[instr].end()); }

int Csp::max_latency(int instr) const { return *std::max_element(latency[instr].begin(), latency[instr].end()); }

std::optional<Cost> Csp::cost_limit() const {
  std::optional<Cost> limit;
  for (const auto& c : constraints)
    if (const auto* cb = std::get_if<CostBound>(&c)) limit = limit ? std::min(*limit, cb->limit) : cb->limit;
  return limit;
}

PartialAssignment PartialAssignment::empty(const Csp& csp) {
  PartialAssignment p;
  p.c.assign(csp.num_instrs(), std::nullopt);
  p.m.assign(csp.num_instrs(), std::nullopt);
  p.r.assign(csp.num_temps(), std::nullopt);
  return p;
}

int makespan_bound(std::span<const int> release, std::span<const int> tail, int width) {
  const std::size_t n = release.size();
  if (n == 0) return 0;
  std::vector<std::size_t> idx(n);
  std::iota(idx.begin(), idx.end(), 0);
  std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return release[a] < release[b]; });
  std::priority_queue<int> ready;
  std::size_t k = 0;
  int t = release[idx[0]];
  int best = 0;
  while (k < n || !ready.empty()) {
    if (ready.empty() && t < release[idx[k]]) t = release[idx[k]];
    while (k < n && release[idx[k]] <= t) ready.push(tail[idx[k++]]);
    for (int w = 0; w < width && !ready.empty(); ++w) {
      best = std::max(best, t + ready.top());
      ready.pop();
    }
    ++t;
  }
  return best;
}

Csp build_csp(const Program& prog, const TargetDesc& tgt, const BuildOptions& opts) {
  if (auto diags = validate(prog); !diags.empty()) throw SemanticError(diags.front().message);
  if (tgt.issue_width < 1) throw SemanticError("issue width must be ≥ 1");
  if (tgt.registers.size() > 64) throw SemanticError("at most 64 registers are supported");

  Csp csp;
  csp.program = std::make_shared<const Program>(prog);
  csp.target = std::make_shared<const TargetDesc>(tgt);
  csp.issue_width = tgt.issue_width;

  const int n = prog.num_instrs();
  csp.latency.resize(n);
  for (const auto& in : prog.instrs) {
    const auto* impls = tgt.find_impls(in.opcode);
    if (impls == nullptr || impls->empty())
      throw SemanticError("opcode '" + in.opcode + "' (instruction " + std::to_string(in.id) + ") has no implementation");
    for (const auto& pi : *impls) csp.latency[in.id].push_back(pi.latency);
  }

  // Blocks and horizons.
  csp.c_max.assign(n, 0);
  auto empty = PartialAssignment::empty(csp);
  std::vector<int> est(n, 0);
  for (const auto& b : prog.blocks) {
    BlockScope scope;
    scope.freq = b.freq;
    scope.instrs = b.instrs;
    for (int id : b.instrs)
      if (prog.instrs[id].is_branch) scope.branches.push_back(id);
    int initial = 0;
    for (int id : b.instrs) initial += csp.max_latency(id);
    if (opts.initial_horizon) initial = std::max(*opts.initial_horizon, 1);
    csp.blocks.push_back(scope);

    earliest_starts(csp, b.id, empty, est);
    std::vector<int> rel, tail;
    for (int id : b.instrs) {
      rel.push_back(est[id]);
      tail.push_back(csp.min_latency(id));
    }
    const int needed = makespan_bound(rel, tail, csp.issue_width);
    int horizon = initial;
    const int cap = 4 * initial;
    while (horizon < needed && horizon < cap) horizon = std::min(horizon * 2, cap);
    if (horizon < needed)
      throw UnschedulableBlock(b.id, "block " + std::to_string(b.id) + " needs " + std::to_string(needed) +
                                         " cycles, more than the horizon cap " + std::to_string(cap));
    csp.blocks.back().horizon = horizon;
    for (int id : b.instrs) csp.c_max[id] = horizon - csp.min_latency(id);
  }

  // Register domains: pinned temps get their register, the rest anything not
  // named explicitly by the program.
  std::set<int> reserved;
  for (const auto& name : prog.fixed_registers()) {
    auto idx = tgt.register_index(name);
    if (!idx) throw SemanticError("register '" + name + "' is not defined by the target");
    reserved.insert(*idx);
  }
  csp.r_domain.resize(prog.num_temps());
  for (const auto& t : prog.temps) {
    if (t.preassigned) {
      auto idx = tgt.register_index(*t.preassigned);
      if (!idx) throw SemanticError("register '" + *t.preassigned + "' is not defined by the target");
      csp.r_domain[t.id] = {*idx};
      continue;
    }
    for (int r = 0; r < static_cast<int>(tgt.registers.size()); ++r)
      if (!reserved.count(r)) csp.r_domain[t.id].push_back(r);
    if (csp.r_domain[t.id].empty())
      throw SemanticError("no register left for temp t" + std::to_string(t.number));
  }

  // Live segments.
  const auto live = compute_liveness(prog);
  csp.live.resize(prog.num_temps());
  for (const auto& t : prog.temps) {
    for (const auto& b : prog.blocks) {
      bool defined_here = t.def_instr >= 0 && prog.instrs[t.def_instr].block == b.id;
      if (!defined_here && !live.live_in[b.id][t.id]) continue;
      LiveSegment seg;
      seg.block = b.id;
      seg.def_instr = defined_here ? t.def_instr : -1;
      for (int u : t.uses)
        if (prog.instrs[u].block == b.id) seg.uses.push_back(u);
      seg.live_out = live.live_out[b.id][t.id];
      csp.live[t.id].push_back(std::move(seg));
    }
  }

  // Constraints.
  for (const auto& in : prog.instrs)
    for (const auto& d : in.deps) csp.post(Precedence{d.pred, in.id, d.kind});
  for (const auto& b : prog.blocks) {
    if (static_cast<int>(b.instrs.size()) > csp.issue_width) csp.post(IssueWidth{b.id});
    const auto& scope = csp.blocks[b.id];
    if (!scope.branches.empty() && scope.branches.size() < scope.instrs.size()) csp.post(BranchLast{b.id});
  }
  for (int a = 0; a < prog.num_temps(); ++a)
    for (int b = a + 1; b < prog.num_temps(); ++b) {
      bool share_block = false;
      for (const auto& sa : csp.live[a])
        for (const auto& sb : csp.live[b]) share_block = share_block || sa.block == sb.block;
      if (!share_block) continue;
      std::vector<int> both;
      std::set_intersection(csp.r_domain[a].begin(), csp.r_domain[a].end(), csp.r_domain[b].begin(),
                            csp.r_domain[b].end(), std::back_inserter(both));
      if (!both.empty()) csp.post(RegInterference{a, b});
    }
  return csp;
}

Cost objective(const Csp& csp, const Solution& s) {
  Cost total = 0;
  for (const auto& b : csp.blocks) {
    int span = 0;
    for (int id : b.instrs) span = std::max(span, s.c[id] + csp.latency[id][s.m[id]]);
    total += static_cast<Cost>(b.freq) * span;
  }
  return total;
}

Cost objective(const Csp& csp, const PartialAssignment& p) {
  std::vector<int> est(csp.num_instrs(), 0);
  Cost total = 0;
  for (int b = 0; b < static_cast<int>(csp.blocks.size()); ++b) {
    earliest_starts(csp, b, p, est);
    std::vector<int> rel, tail;
    for (int id : csp.blocks[b].instrs) {
      rel.push_back(est[id]);
      tail.push_back(p.m[id] ? csp.latency[id][*p.m[id]] : csp.min_latency(id));
    }
    total += static_cast<Cost>(csp.blocks[b].freq) * makespan_bound(rel, tail, csp.issue_width);
  }
  return total;
}

Interval live_interval(const Csp& csp, const LiveSegment& seg, std::span<const int> c) {
  Interval iv;
  iv.start = seg.def_instr >= 0 ? c[seg.def_instr] : 0;
  if (seg.live_out) {
    iv.end = csp.blocks[seg.block].horizon + 1;
    return iv;
  }
  iv.end = seg.def_instr >= 0 ? c[seg.def_instr] + 1 : 0;
  for (int u : seg.uses) iv.end = std::max(iv.end, c[u]);
  return iv;
}

bool check_solution(const Csp& csp, const Solution& s, std::vector<std::string>* why) {
  bool ok = true;
  auto bad = [&](std::string msg) {
    ok = false;
    if (why) why->push_back(std::move(msg));
  };
  const int n = csp.num_instrs();
  if (static_cast<int>(s.c.size()) != n || static_cast<int>(s.m.size()) != n ||
      static_cast<int>(s.r.size()) != csp.num_temps()) {
    bad("solution has the wrong number of variables");
    return false;
  }
  for (int i = 0; i < n; ++i) {
    if (s.m[i] < 0 || s.m[i] >= static_cast<int>(csp.latency[i].size())) {
      bad("m" + std::to_string(i) + " out of range");
      return false;
    }
    if (s.c[i] < 0) bad("c" + std::to_string(i) + " is negative");
    if (s.c[i] + csp.latency[i][s.m[i]] > csp.blocks[csp.block_of(i)].horizon)
      bad("instruction " + std::to_string(i) + " completes after the block horizon");
  }
  for (int t = 0; t < csp.num_temps(); ++t) {
    const auto& dom = csp.r_domain[t];
    if (std::find(dom.begin(), dom.end(), s.r[t]) == dom.end()) bad("r" + std::to_string(t) + " outside its domain");
  }

  const Cost cost = objective(csp, s);
  if (cost != s.cost) bad("recorded cost " + std::to_string(s.cost) + " differs from objective " + std::to_string(cost));

  for (const auto& con : csp.constraints) {
    if (const auto* p = std::get_if<Precedence>(&con)) {
      int gap = p->kind == DepKind::Data ? csp.latency[p->from][s.m[p->from]] : 0;
      if (s.c[p->to] < s.c[p->from] + gap)
        bad("precedence " + std::to_string(p->from) + " -> " + std::to_string(p->to) + " violated");
    } else if (const auto* w = std::get_if<IssueWidth>(&con)) {
      std::vector<int> cycles;
      for (int id : csp.blocks[w->block].instrs) cycles.push_back(s.c[id]);
      std::sort(cycles.begin(), cycles.end());
      for (std::size_t i = 0; i < cycles.size();) {
        std::size_t j = i;
        while (j < cycles.size() && cycles[j] == cycles[i]) ++j;
        if (static_cast<int>(j - i) > csp.issue_width)
          bad("issue width exceeded in block " + std::to_string(w->block) + " at cycle " + std::to_string(cycles[i]));
        i = j;
      }
    } else if (const auto* bl = std::get_if<BranchLast>(&con)) {
      const auto& scope = csp.blocks[bl->block];
      for (int br : scope.branches)
        for (int id : scope.instrs)
          if (!csp.program->instrs[id].is_branch && s.c[br] < s.c[id])
            bad("branch " + std::to_string(br) + " issues before " + std::to_string(id));
    } else if (const auto* ri = std::get_if<RegInterference>(&con)) {
      if (s.r[ri->temp_a] != s.r[ri->temp_b]) continue;
      for (const auto& sa : csp.live[ri->temp_a])
        for (const auto& sb : csp.live[ri->temp_b]) {
          if (sa.block != sb.block) continue;
          auto ia = live_interval(csp, sa, s.c);
          auto ib = live_interval(csp, sb, s.c);
          if (std::max(ia.start, ib.start) < std::min(ia.end, ib.end))
            bad("temps " + std::to_string(ri->temp_a) + " and " + std::to_string(ri->temp_b) +
                " share a register while both live in block " + std::to_string(sa.block));
        }
    } else if (const auto* d = std::get_if<Distance>(&con)) {
      int diff = 0;
      for (int i = 0; i < n; ++i) diff += s.c[i] != d->ref[i];
      if (diff < d->h) bad("distance " + std::to_string(diff) + " below " + std::to_string(d->h));
    } else if (const auto* cb = std::get_if<CostBound>(&con)) {
      if (cost > cb->limit) bad("cost " + std::to_string(cost) + " exceeds bound " + std::to_string(cb->limit));
    }
  }
  return ok;
}

}  // namespace divsched
