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

#include "oracle.hpp"

#include <algorithm>
#include <limits>
#include <optional>

namespace oracle {

using divsched::DepKind;
using divsched::OperandKind;

Problem make(const divsched::Program& prog, const divsched::TargetDesc& tgt) {
  Problem p{prog, tgt, {}, {}, {}, {}, {}};
  for (const auto& in : prog.instrs) {
    std::vector<int> l;
    for (const auto& pi : tgt.impls.at(in.opcode)) l.push_back(pi.latency);
    p.lat.push_back(l);
  }
  for (const auto& b : prog.blocks) {
    int h = 0;
    for (int id : b.instrs) h += *std::max_element(p.lat[id].begin(), p.lat[id].end());
    p.horizon.push_back(h);
  }
  std::set<std::string> named;
  for (const auto& in : prog.instrs) {
    for (const auto& o : in.defs)
      if (o.kind == OperandKind::Reg) named.insert(o.reg);
    for (const auto& o : in.uses)
      if (o.kind == OperandKind::Reg) named.insert(o.reg);
  }
  for (const auto& t : prog.temps) {
    std::vector<int> dom;
    for (int r = 0; r < static_cast<int>(tgt.registers.size()); ++r) {
      const auto& name = tgt.registers[r];
      if (t.preassigned ? name == *t.preassigned : !named.count(name)) dom.push_back(r);
    }
    p.reg_domain.push_back(dom);
  }

  // Temp liveness by fixpoint over the block successor graph.
  const int nb = prog.num_blocks(), nt = prog.num_temps();
  std::vector<std::vector<bool>> use(nb, std::vector<bool>(nt)), def(nb, std::vector<bool>(nt));
  for (const auto& b : prog.blocks)
    for (int id : b.instrs) {
      for (const auto& o : prog.instrs[id].uses)
        if (o.kind == OperandKind::Temp && !def[b.id][o.value]) use[b.id][o.value] = true;
      for (const auto& o : prog.instrs[id].defs)
        if (o.kind == OperandKind::Temp) def[b.id][o.value] = true;
    }
  p.live_in.assign(nb, std::vector<bool>(nt));
  p.live_out.assign(nb, std::vector<bool>(nt));
  for (bool changed = true; changed;) {
    changed = false;
    for (int b = nb - 1; b >= 0; --b)
      for (int t = 0; t < nt; ++t) {
        bool out = false;
        for (int s : prog.blocks[b].succ) out = out || p.live_in[s][t];
        bool in = use[b][t] || (out && !def[b][t]);
        if (out != p.live_out[b][t] || in != p.live_in[b][t]) changed = true;
        p.live_out[b][t] = out;
        p.live_in[b][t] = in;
      }
  }
  return p;
}

Cost cost(const Problem& p, const std::vector<int>& c, const std::vector<int>& m) {
  Cost total = 0;
  for (const auto& b : p.prog.blocks) {
    int span = 0;
    for (int id : b.instrs) span = std::max(span, c[id] + p.lat[id][m[id]]);
    total += static_cast<Cost>(b.freq) * span;
  }
  return total;
}

namespace {

struct BlockSched {
  std::vector<int> c, m;  // indexed like the block's instruction list
  int span = 0;
};

bool is_branch(const Problem& p, int id) { return p.prog.instrs[id].is_branch; }

/// All schedules of one block with makespan <= limit.
std::vector<BlockSched> block_schedules(const Problem& p, int block, int limit) {
  const auto& ids = p.prog.blocks[block].instrs;
  const int k = static_cast<int>(ids.size());
  std::vector<int> pos(p.prog.num_instrs(), -1);
  for (int q = 0; q < k; ++q) pos[ids[q]] = q;
  std::vector<BlockSched> out;
  BlockSched cur;
  cur.c.assign(k, -1);
  cur.m.assign(k, -1);
  const int width = p.tgt.issue_width;

  std::function<void(int)> rec = [&](int q) {
    if (q == k) {
      BlockSched s = cur;
      for (int j = 0; j < k; ++j) s.span = std::max(s.span, s.c[j] + p.lat[ids[j]][s.m[j]]);
      out.push_back(std::move(s));
      return;
    }
    const int id = ids[q];
    for (int mi = 0; mi < static_cast<int>(p.lat[id].size()); ++mi) {
      const int top = std::min(p.horizon[block], limit) - p.lat[id][mi];
      for (int ci = 0; ci <= top; ++ci) {
        int same = 0;
        for (int j = 0; j < q; ++j) same += cur.c[j] == ci;
        if (same >= width) continue;
        bool ok = true;
        // Dependencies in both directions with already placed instructions.
        for (const auto& d : p.prog.instrs[id].deps) {
          int j = pos[d.pred];
          if (j < 0 || j >= q) continue;
          int gap = d.kind == DepKind::Data ? p.lat[d.pred][cur.m[j]] : 0;
          ok = ok && ci >= cur.c[j] + gap;
        }
        for (int j = 0; j < q && ok; ++j)
          for (const auto& d : p.prog.instrs[ids[j]].deps)
            if (d.pred == id) ok = ok && cur.c[j] >= ci + (d.kind == DepKind::Data ? p.lat[id][mi] : 0);
        for (int j = 0; j < q && ok; ++j) {
          if (is_branch(p, id) && !is_branch(p, ids[j])) ok = ci >= cur.c[j];
          if (!is_branch(p, id) && is_branch(p, ids[j])) ok = cur.c[j] >= ci;
        }
        if (!ok) continue;
        cur.c[q] = ci;
        cur.m[q] = mi;
        rec(q + 1);
      }
    }
    cur.c[q] = cur.m[q] = -1;
  };
  rec(0);
  return out;
}

struct Range {
  int start, end;
};

/// Live range of temp t in block b under schedule c, if it lives there.
std::optional<Range> live_range(const Problem& p, int t, int b, const std::vector<int>& c) {
  const auto& temp = p.prog.temps[t];
  const bool defined_here = temp.def_instr >= 0 && p.prog.instrs[temp.def_instr].block == b;
  if (!defined_here && !p.live_in[b][t]) return std::nullopt;
  Range r;
  r.start = defined_here ? c[temp.def_instr] : 0;
  if (p.live_out[b][t]) {
    r.end = p.horizon[b] + 1;
    return r;
  }
  r.end = defined_here ? c[temp.def_instr] + 1 : 0;
  for (int u : temp.uses)
    if (p.prog.instrs[u].block == b) r.end = std::max(r.end, c[u]);
  return r;
}

std::vector<std::vector<bool>> conflicts(const Problem& p, const std::vector<int>& c) {
  const int nt = p.prog.num_temps();
  std::vector<std::vector<bool>> x(nt, std::vector<bool>(nt));
  for (int b = 0; b < p.prog.num_blocks(); ++b)
    for (int a = 0; a < nt; ++a)
      for (int d = a + 1; d < nt; ++d) {
        auto ra = live_range(p, a, b, c), rd = live_range(p, d, b, c);
        if (ra && rd && std::max(ra->start, rd->start) < std::min(ra->end, rd->end)) x[a][d] = x[d][a] = true;
      }
  return x;
}

}  // namespace

bool colorable(const Problem& p, const std::vector<int>& c) {
  const int nt = p.prog.num_temps();
  const auto x = conflicts(p, c);
  std::vector<int> r(nt, -1);
  std::function<bool(int)> rec = [&](int t) {
    if (t == nt) return true;
    for (int reg : p.reg_domain[t]) {
      bool ok = true;
      for (int u = 0; u < t && ok; ++u) ok = !(x[t][u] && r[u] == reg);
      if (!ok) continue;
      r[t] = reg;
      if (rec(t + 1)) return true;
    }
    r[t] = -1;
    return false;
  };
  return rec(0);
}

bool valid(const Problem& p, const std::vector<int>& c, const std::vector<int>& m, const std::vector<int>& r) {
  const int n = p.prog.num_instrs();
  if (static_cast<int>(c.size()) != n || static_cast<int>(m.size()) != n ||
      static_cast<int>(r.size()) != p.prog.num_temps())
    return false;
  for (int i = 0; i < n; ++i) {
    if (m[i] < 0 || m[i] >= static_cast<int>(p.lat[i].size()) || c[i] < 0) return false;
    if (c[i] + p.lat[i][m[i]] > p.horizon[p.prog.instrs[i].block]) return false;
    for (const auto& d : p.prog.instrs[i].deps)
      if (c[i] < c[d.pred] + (d.kind == DepKind::Data ? p.lat[d.pred][m[d.pred]] : 0)) return false;
  }
  for (const auto& b : p.prog.blocks)
    for (int a : b.instrs)
      for (int d : b.instrs) {
        if (a < d && c[a] == c[d]) {
          int same = 0;
          for (int e : b.instrs) same += c[e] == c[a];
          if (same > p.tgt.issue_width) return false;
        }
        if (is_branch(p, a) && !is_branch(p, d) && c[a] < c[d]) return false;
      }
  for (int t = 0; t < p.prog.num_temps(); ++t)
    if (std::find(p.reg_domain[t].begin(), p.reg_domain[t].end(), r[t]) == p.reg_domain[t].end()) return false;
  const auto x = conflicts(p, c);
  for (int a = 0; a < p.prog.num_temps(); ++a)
    for (int d = a + 1; d < p.prog.num_temps(); ++d)
      if (x[a][d] && r[a] == r[d]) return false;
  return true;
}

void enumerate(const Problem& p, Cost limit,
               const std::function<bool(const std::vector<int>&, const std::vector<int>&, Cost)>& visit) {
  const int nb = p.prog.num_blocks();
  // Per-block minimum makespan bounds the room left for each block.
  std::vector<std::vector<BlockSched>> all(nb);
  std::vector<int> min_span(nb);
  for (int b = 0; b < nb; ++b) {
    auto scheds = block_schedules(p, b, p.horizon[b]);
    if (scheds.empty()) return;
    min_span[b] = std::numeric_limits<int>::max();
    for (const auto& s : scheds) min_span[b] = std::min(min_span[b], s.span);
    all[b] = std::move(scheds);
  }
  Cost base = 0;
  for (int b = 0; b < nb; ++b) base += static_cast<Cost>(p.prog.blocks[b].freq) * min_span[b];
  if (base > limit) return;

  const int n = p.prog.num_instrs();
  std::vector<int> c(n), m(n);
  bool stop = false;
  std::function<void(int, Cost)> rec = [&](int b, Cost rest) {
    if (stop) return;
    if (b == nb) {
      if (!colorable(p, c)) return;
      if (!visit(c, m, cost(p, c, m))) stop = true;
      return;
    }
    const Cost freq = p.prog.blocks[b].freq;
    const Cost others = rest - freq * min_span[b];
    for (const auto& s : all[b]) {
      const Cost spent = freq * s.span;
      if (others + spent > limit) continue;
      const auto& ids = p.prog.blocks[b].instrs;
      for (std::size_t q = 0; q < ids.size(); ++q) {
        c[ids[q]] = s.c[q];
        m[ids[q]] = s.m[q];
      }
      rec(b + 1, others + spent);
      if (stop) return;
    }
  };
  rec(0, base);
}

Cost optimum(const Problem& p) {
  Cost best = -1;
  enumerate(p, std::numeric_limits<Cost>::max(), [&](const std::vector<int>&, const std::vector<int>&, Cost cst) {
    if (best < 0 || cst < best) best = cst;
    return true;
  });
  return best;
}

std::set<std::vector<int>> schedules(const Problem& p, Cost limit) {
  std::set<std::vector<int>> out;
  enumerate(p, limit, [&](const std::vector<int>& c, const std::vector<int>&, Cost) {
    out.insert(c);
    return true;
  });
  return out;
}

}  // namespace oracle
