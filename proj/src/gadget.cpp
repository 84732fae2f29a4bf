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

#include "divsched/gadget.hpp"

#include <algorithm>
#include <set>
#include <sstream>

#include "divsched/error.hpp"

namespace divsched {

std::vector<Gadget> find_gadgets(const AsmListing& listing, int max_len) {
  std::vector<Gadget> out;
  const auto& lines = listing.lines;
  for (std::size_t end = 0; end < lines.size(); ++end) {
    if (!lines[end].is_branch) continue;
    std::vector<std::size_t> picked{end};
    for (std::size_t k = end; k-- > 0 && static_cast<int>(picked.size()) < max_len;) {
      if (lines[k].is_branch) break;
      if (!lines[k].is_nop) picked.push_back(k);
    }
    for (std::size_t len = 1; len <= picked.size(); ++len) {
      Gadget g;
      g.address = lines[picked[len - 1]].address;
      for (std::size_t q = len; q-- > 0;) g.body.push_back(lines[picked[q]].text());
      out.push_back(std::move(g));
    }
  }
  return out;
}

namespace {

Srate rate_against(const std::vector<Gadget>& from, const std::set<Gadget>& in) {
  Srate s;
  s.total = static_cast<long>(from.size());
  s.no_gadgets = from.empty();
  for (const auto& g : from) s.survived += in.count(g);
  return s;
}

}  // namespace

Srate srate(const AsmListing& a, const AsmListing& b, int max_len) {
  const auto gb = find_gadgets(b, max_len);
  return rate_against(find_gadgets(a, max_len), std::set<Gadget>(gb.begin(), gb.end()));
}

int srate_bucket(const Srate& s) {
  if (s.survived == 0) return 0;
  if (10 * s.survived <= s.total) return 1;
  if (10 * s.survived <= 4 * s.total) return 2;
  return 3;
}

double SurvivalReport::mean() const {
  if (pairs.empty()) return 0.0;
  double sum = 0;
  for (const auto& p : pairs) sum += p.rate.value();
  return sum / static_cast<double>(pairs.size());
}

SurvivalReport survival_report(std::span<const AsmListing> pool, int max_len) {
  if (pool.size() < 2)
    throw PoolTooSmall("gadget survival needs at least two variants, got " + std::to_string(pool.size()));
  std::vector<std::vector<Gadget>> gadgets;
  std::vector<std::set<Gadget>> sets;
  for (const auto& l : pool) {
    gadgets.push_back(find_gadgets(l, max_len));
    sets.emplace_back(gadgets.back().begin(), gadgets.back().end());
  }
  SurvivalReport r;
  for (std::size_t i = 0; i < pool.size(); ++i)
    for (std::size_t j = 0; j < pool.size(); ++j) {
      if (i == j) continue;
      PairRate pr{static_cast<int>(i), static_cast<int>(j), rate_against(gadgets[i], sets[j])};
      ++r.histogram[srate_bucket(pr.rate)];
      r.pairs.push_back(pr);
    }
  const long top = *std::max_element(r.histogram.begin(), r.histogram.end());
  for (int b = 0; b < 4; ++b)
    if (r.histogram[b] == top) r.modes.push_back(b);
  return r;
}

std::string pair_matrix_csv(const SurvivalReport& report) {
  std::ostringstream out;
  out << "i,j,survived,total,srate\n";
  for (const auto& p : report.pairs)
    out << p.i << ',' << p.j << ',' << p.rate.survived << ',' << p.rate.total << ',' << p.rate.value() << '\n';
  return out.str();
}

}  // namespace divsched
