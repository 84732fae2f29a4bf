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

#include "propagators.hpp"

#include <algorithm>
#include <bit>
#include <cstdint>
#include <limits>

namespace divsched::detail {

namespace {

class PrecedenceProp final : public Propagator {
 public:
  PrecedenceProp(const Csp& csp, const Store& s, const Precedence& p)
      : from_(s.c_var(p.from)), to_(s.c_var(p.to)), m_from_(s.m_var(p.from)), data_(p.kind == DepKind::Data),
        lat_(csp.latency[p.from]) {
    scope_ = {from_, to_, m_from_};
  }

  bool propagate(Store& s) const override {
    int gap = 0;
    if (data_) {
      // Drop implementations too slow for the consumer's latest cycle.
      const int slack = s.max(to_) - s.min(from_);
      for (int v = s.min(m_from_); v <= s.max(m_from_); ++v)
        if (s.contains(m_from_, v) && lat_[v] > slack && !s.remove(m_from_, v)) return false;
      gap = lat_[s.min(m_from_)];
      for (int v = s.min(m_from_); v <= s.max(m_from_); ++v)
        if (s.contains(m_from_, v)) gap = std::min(gap, lat_[v]);
    }
    return s.set_min(to_, s.min(from_) + gap) && s.set_max(from_, s.max(to_) - gap);
  }

 private:
  Var from_, to_, m_from_;
  bool data_;
  std::vector<int> lat_;
};

/// Pigeonhole reasoning over issue slots: any window [L, U] holds at most
/// width * (U - L + 1) instructions; a full window is closed to the rest.
class IssueWidthProp final : public Propagator {
 public:
  IssueWidthProp(const Csp& csp, const Store& s, const IssueWidth& w) : width_(csp.issue_width) {
    for (int id : csp.blocks[w.block].instrs) scope_.push_back(s.c_var(id));
  }

  bool propagate(Store& s) const override {
    const std::size_t k = scope_.size();
    std::vector<int> mins;
    mins.reserve(k);
    for (Var v : scope_) mins.push_back(s.min(v));
    std::sort(mins.begin(), mins.end());
    mins.erase(std::unique(mins.begin(), mins.end()), mins.end());
    std::vector<std::pair<int, Var>> inside;
    inside.reserve(k);
    for (int lo : mins) {
      inside.clear();
      for (Var v : scope_)
        if (s.min(v) >= lo) inside.emplace_back(s.max(v), v);
      std::sort(inside.begin(), inside.end());
      for (std::size_t j = 0; j < inside.size(); ++j) {
        const int hi = inside[j].first;
        const long cap = static_cast<long>(width_) * (hi - lo + 1);
        const long count = static_cast<long>(j) + 1;
        if (count > cap) return false;
        if (count < cap) continue;
        // [lo, hi] is saturated by inside[0..j].
        for (Var v : scope_) {
          bool member = false;
          for (std::size_t q = 0; q <= j && !member; ++q) member = inside[q].second == v;
          if (member || s.max(v) < lo || s.min(v) > hi) continue;
          if (s.min(v) >= lo) {
            if (!s.set_min(v, hi + 1)) return false;
          } else if (s.max(v) <= hi) {
            if (!s.set_max(v, lo - 1)) return false;
          } else {
            for (int x = lo; x <= hi; ++x)
              if (!s.remove(v, x)) return false;
          }
        }
      }
    }
    return true;
  }

 private:
  int width_;
};

class BranchLastProp final : public Propagator {
 public:
  BranchLastProp(const Csp& csp, const Store& s, const BranchLast& b) {
    const auto& scope = csp.blocks[b.block];
    for (int id : scope.instrs) {
      if (csp.program->instrs[id].is_branch)
        branches_.push_back(s.c_var(id));
      else
        others_.push_back(s.c_var(id));
    }
    scope_ = branches_;
    scope_.insert(scope_.end(), others_.begin(), others_.end());
  }

  bool propagate(Store& s) const override {
    int latest_min = 0;
    for (Var v : others_) latest_min = std::max(latest_min, s.min(v));
    int earliest_max = s.max(branches_.front());
    for (Var v : branches_) earliest_max = std::min(earliest_max, s.max(v));
    for (Var v : branches_)
      if (!s.set_min(v, latest_min)) return false;
    for (Var v : others_)
      if (!s.set_max(v, earliest_max)) return false;
    return true;
  }

 private:
  std::vector<Var> branches_;
  std::vector<Var> others_;
};

/// Two temps may share a register only if their live ranges are disjoint
/// in every block where both live.
class InterferenceProp final : public Propagator {
 public:
  InterferenceProp(const Csp& csp, const Store& s, const RegInterference& ri)
      : ra_(s.r_var(ri.temp_a)), rb_(s.r_var(ri.temp_b)) {
    scope_ = {ra_, rb_};
    for (const auto& sa : csp.live[ri.temp_a])
      for (const auto& sb : csp.live[ri.temp_b])
        if (sa.block == sb.block) {
          pairs_.push_back({range(csp, s, sa), range(csp, s, sb)});
          for (const auto* r : {&pairs_.back().a, &pairs_.back().b}) {
            if (r->def >= 0) scope_.push_back(r->def);
            scope_.insert(scope_.end(), r->uses.begin(), r->uses.end());
          }
        }
    std::sort(scope_.begin(), scope_.end());
    scope_.erase(std::unique(scope_.begin(), scope_.end()), scope_.end());
  }

  bool propagate(Store& s) const override {
    if (s.fixed(ra_) && s.fixed(rb_) && s.value(ra_) == s.value(rb_)) {
      for (const auto& p : pairs_)
        if (!separate(s, p.a, p.b)) return false;
      return true;
    }
    if (!overlaps_for_sure(s)) return true;
    if (s.fixed(ra_) && !s.remove(rb_, s.value(ra_))) return false;
    if (s.fixed(rb_) && !s.remove(ra_, s.value(rb_))) return false;
    return true;
  }

 private:
  struct Range {
    Var def = -1;
    std::vector<Var> uses;
    bool live_out = false;
    int out_end = 0;
  };
  struct Pair {
    Range a, b;
  };

  static Range range(const Csp& csp, const Store& s, const LiveSegment& seg) {
    Range r;
    r.def = seg.def_instr >= 0 ? s.c_var(seg.def_instr) : -1;
    for (int u : seg.uses) r.uses.push_back(s.c_var(u));
    r.live_out = seg.live_out;
    r.out_end = csp.blocks[seg.block].horizon + 1;
    return r;
  }

  static int start_max(const Store& s, const Range& r) { return r.def >= 0 ? s.max(r.def) : 0; }

  static int end_min(const Store& s, const Range& r) {
    if (r.live_out) return r.out_end;
    int e = r.def >= 0 ? s.min(r.def) + 1 : 0;
    for (Var u : r.uses) e = std::max(e, s.min(u));
    return e;
  }

  /// Both ranges share a register: one must end before the other starts.
  static bool separate(Store& s, const Range& a, const Range& b) {
    const bool a_first = end_min(s, a) <= start_max(s, b);
    const bool b_first = end_min(s, b) <= start_max(s, a);
    if (a_first && b_first) return true;
    if (!a_first && !b_first) return false;
    return a_first ? before(s, a, b) : before(s, b, a);
  }

  /// Enforces end(x) <= start(y).
  static bool before(Store& s, const Range& x, const Range& y) {
    if (x.live_out) return false;
    if (y.def < 0) {
      if (end_min(s, x) > 0) return false;
    } else if (!s.set_min(y.def, end_min(s, x))) {
      return false;
    }
    const int latest = y.def >= 0 ? s.max(y.def) : 0;
    if (x.def >= 0 && !s.set_max(x.def, latest - 1)) return false;
    for (Var u : x.uses)
      if (!s.set_max(u, latest)) return false;
    return true;
  }

  bool overlaps_for_sure(const Store& s) const {
    for (const auto& p : pairs_)
      if (std::max(start_max(s, p.a), start_max(s, p.b)) < std::min(end_min(s, p.a), end_min(s, p.b))) return true;
    return false;
  }

  Var ra_, rb_;
  std::vector<Pair> pairs_;
};

/// Implied by pairwise interference: temps whose ranges all certainly cover
/// one cycle need that many distinct registers. Exact for fixed schedules
/// when the temps share one register domain.
class RegPressureProp final : public Propagator {
 public:
  RegPressureProp(const Csp& csp, const Store& s, int block) {
    for (int t = 0; t < csp.num_temps(); ++t)
      for (const auto& seg : csp.live[t])
        if (seg.block == block) {
          Item it;
          it.r = s.r_var(t);
          it.def = seg.def_instr >= 0 ? s.c_var(seg.def_instr) : -1;
          for (int u : seg.uses) it.uses.push_back(s.c_var(u));
          it.out_end = seg.live_out ? csp.blocks[block].horizon + 1 : -1;
          items_.push_back(std::move(it));
        }
    for (const auto& it : items_) {
      scope_.push_back(it.r);
      if (it.def >= 0) scope_.push_back(it.def);
      scope_.insert(scope_.end(), it.uses.begin(), it.uses.end());
    }
    std::sort(scope_.begin(), scope_.end());
    scope_.erase(std::unique(scope_.begin(), scope_.end()), scope_.end());
  }

  std::size_t size() const { return items_.size(); }

  bool propagate(Store& s) const override {
    thread_local std::vector<std::pair<int, int>> parts;
    thread_local std::vector<std::uint64_t> regs;
    parts.clear();
    regs.clear();
    for (const auto& it : items_) {
      const int start = it.def >= 0 ? s.max(it.def) : 0;
      int end = it.out_end;
      if (end < 0) {
        end = it.def >= 0 ? s.min(it.def) + 1 : 0;
        for (Var u : it.uses) end = std::max(end, s.min(u));
      }
      if (start >= end) continue;
      parts.emplace_back(start, end);
      std::uint64_t mask = 0;
      for (int v = s.min(it.r); v <= s.max(it.r) && v < 64; ++v)
        if (s.contains(it.r, v)) mask |= std::uint64_t{1} << v;
      regs.push_back(mask);
    }
    for (const auto& [point, unused] : parts) {
      int count = 0;
      std::uint64_t avail = 0;
      for (std::size_t k = 0; k < parts.size(); ++k)
        if (parts[k].first <= point && point < parts[k].second) {
          ++count;
          avail |= regs[k];
        }
      if (count > std::popcount(avail)) return false;
    }
    return true;
  }

 private:
  struct Item {
    Var r = 0;
    Var def = -1;
    std::vector<Var> uses;
    int out_end = -1;  // fixed end for live-out ranges
  };
  std::vector<Item> items_;
};

/// At least h issue cycles differ from the reference.
class DistanceProp final : public Propagator {
 public:
  DistanceProp(const Store& s, const Distance& d) : ref_(d.ref), h_(d.h) {
    for (int i = 0; i < s.num_instrs(); ++i) scope_.push_back(s.c_var(i));
  }

  bool propagate(Store& s) const override {
    int free = 0;
    for (std::size_t i = 0; i < ref_.size(); ++i) {
      Var v = scope_[i];
      if (!(s.fixed(v) && s.value(v) == ref_[i])) ++free;
      if (free > h_) return true;
    }
    if (free < h_) return false;
    for (std::size_t i = 0; i < ref_.size(); ++i) {
      Var v = scope_[i];
      if (!(s.fixed(v) && s.value(v) == ref_[i]) && !s.remove(v, ref_[i])) return false;
    }
    return true;
  }

 private:
  std::vector<int> ref_;
  int h_;
};

/// Frequency-weighted makespan bound against the store's cost limit, plus
/// the per-block horizon c + latency(m) <= horizon.
class CostProp final : public Propagator {
 public:
  CostProp(const Csp& csp, const Store& s) : width_(csp.issue_width) {
    for (const auto& b : csp.blocks) {
      BlockData bd;
      bd.freq = b.freq;
      bd.horizon = b.horizon;
      for (int id : b.instrs) {
        bd.c.push_back(s.c_var(id));
        bd.m.push_back(s.m_var(id));
        bd.lat.push_back(csp.latency[id]);
      }
      blocks_.push_back(std::move(bd));
    }
    for (const auto& bd : blocks_) {
      scope_.insert(scope_.end(), bd.c.begin(), bd.c.end());
      scope_.insert(scope_.end(), bd.m.begin(), bd.m.end());
    }
  }

  bool propagate(Store& s) const override {
    thread_local std::vector<int> release, tail, bound;
    bound.assign(blocks_.size(), 0);
    Cost total = 0;
    for (std::size_t b = 0; b < blocks_.size(); ++b) {
      const auto& bd = blocks_[b];
      release.clear();
      tail.clear();
      for (std::size_t k = 0; k < bd.c.size(); ++k) {
        release.push_back(s.min(bd.c[k]));
        tail.push_back(min_latency(s, bd.m[k], bd.lat[k]));
      }
      bound[b] = makespan_bound(release, tail, width_);
      if (bound[b] > bd.horizon) return false;
      total += static_cast<Cost>(bd.freq) * bound[b];
    }
    if (total > s.cost_limit) return false;
    for (std::size_t b = 0; b < blocks_.size(); ++b) {
      const auto& bd = blocks_[b];
      Cost allowed = bd.horizon;
      if (s.cost_limit != std::numeric_limits<Cost>::max()) {
        Cost rest = total - static_cast<Cost>(bd.freq) * bound[b];
        allowed = std::min<Cost>(allowed, (s.cost_limit - rest) / bd.freq);
      }
      const int span = static_cast<int>(allowed);
      for (std::size_t k = 0; k < bd.c.size(); ++k) {
        const Var c = bd.c[k], m = bd.m[k];
        for (int v = s.min(m); v <= s.max(m); ++v)
          if (s.contains(m, v) && s.min(c) + bd.lat[k][v] > span && !s.remove(m, v)) return false;
        if (!s.set_max(c, span - min_latency(s, m, bd.lat[k]))) return false;
      }
    }
    return true;
  }

 private:
  struct BlockData {
    int freq = 1;
    int horizon = 0;
    std::vector<Var> c, m;
    std::vector<std::vector<int>> lat;
  };

  static int min_latency(const Store& s, Var m, const std::vector<int>& lat) {
    int best = lat[s.min(m)];
    for (int v = s.min(m) + 1; v <= s.max(m); ++v)
      if (s.contains(m, v)) best = std::min(best, lat[v]);
    return best;
  }

  int width_;
  std::vector<BlockData> blocks_;
};

}  // namespace

PropagatorSet::PropagatorSet(const Csp& csp) {
  Store shape(csp);
  for (const auto& con : csp.constraints) {
    if (const auto* p = std::get_if<Precedence>(&con))
      props_.push_back(std::make_unique<PrecedenceProp>(csp, shape, *p));
    else if (const auto* w = std::get_if<IssueWidth>(&con))
      props_.push_back(std::make_unique<IssueWidthProp>(csp, shape, *w));
    else if (const auto* b = std::get_if<BranchLast>(&con))
      props_.push_back(std::make_unique<BranchLastProp>(csp, shape, *b));
    else if (const auto* r = std::get_if<RegInterference>(&con))
      props_.push_back(std::make_unique<InterferenceProp>(csp, shape, *r));
    else if (const auto* d = std::get_if<Distance>(&con))
      props_.push_back(std::make_unique<DistanceProp>(shape, *d));
    // CostBound limits live in the store; one CostProp serves them all.
  }
  for (int b = 0; b < static_cast<int>(csp.blocks.size()); ++b) {
    auto p = std::make_unique<RegPressureProp>(csp, shape, b);
    if (p->size() > 1) props_.push_back(std::move(p));
  }
  cost_index_ = static_cast<int>(props_.size());
  props_.push_back(std::make_unique<CostProp>(csp, shape));

  subs_.resize(shape.num_vars());
  for (int p = 0; p < static_cast<int>(props_.size()); ++p)
    for (Var v : props_[p]->scope()) subs_[v].push_back(p);
  queued_.assign(props_.size(), 0);
}

void PropagatorSet::enqueue(int p) const {
  if (queued_[p]) return;
  queued_[p] = 1;
  queue_.push_back(p);
}

void PropagatorSet::wake(Store& s) const {
  auto& touched = s.touched();
  for (Var v : touched)
    for (int p : subs_[v]) enqueue(p);
  touched.clear();
}

bool PropagatorSet::fixpoint(Store& s) const {
  bool ok = true;
  while (head_ < queue_.size()) {
    int p = queue_[head_++];
    queued_[p] = 0;
    if (!props_[p]->propagate(s)) {
      ok = false;
      break;
    }
    wake(s);
  }
  for (std::size_t k = head_; k < queue_.size(); ++k) queued_[queue_[k]] = 0;
  queue_.clear();
  head_ = 0;
  s.touched().clear();
  return ok;
}

bool PropagatorSet::run_all(Store& s) const {
  s.touched().clear();
  for (int p = 0; p < static_cast<int>(props_.size()); ++p) enqueue(p);
  return fixpoint(s);
}

bool PropagatorSet::run_touched(Store& s) const {
  wake(s);
  return fixpoint(s);
}

bool PropagatorSet::run_cost(Store& s) const {
  wake(s);
  enqueue(cost_index_);
  return fixpoint(s);
}

}  // namespace divsched::detail
