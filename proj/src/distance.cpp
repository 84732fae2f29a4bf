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

#include "divsched/distance.hpp"

#include <algorithm>
#include <limits>
#include <numeric>
#include <string>

#include "divsched/error.hpp"

namespace divsched {

namespace {

void check_same(const Solution& a, const Solution& b) {
  if (a.c.size() != b.c.size())
    throw MismatchedPrograms("solutions have " + std::to_string(a.c.size()) + " and " + std::to_string(b.c.size()) +
                             " instructions");
}

void check_pool(std::size_t n) {
  if (n < 2) throw PoolTooSmall("pairwise metrics need at least two variants, got " + std::to_string(n));
}

}  // namespace

int hamming(const Solution& a, const Solution& b) {
  check_same(a, b);
  int d = 0;
  for (std::size_t i = 0; i < a.c.size(); ++i) d += a.c[i] != b.c[i];
  return d;
}

ScheduleSeq channel(const Program& prog, const Solution& s) {
  if (static_cast<int>(s.c.size()) != prog.num_instrs())
    throw MismatchedPrograms("solution does not match the program's instruction count");
  ScheduleSeq seq;
  for (const auto& b : prog.blocks) {
    std::vector<int> ids = b.instrs;
    std::sort(ids.begin(), ids.end(), [&](int x, int y) { return s.c[x] != s.c[y] ? s.c[x] < s.c[y] : x < y; });
    int cycle = 0;
    for (int id : ids) {
      for (; cycle < s.c[id]; ++cycle) seq.symbols.push_back(kGap);
      seq.symbols.push_back(id);
      cycle = s.c[id] + 1;
    }
  }
  return seq;
}

int levenshtein(std::span<const int> a, std::span<const int> b) {
  std::vector<int> prev(b.size() + 1), cur(b.size() + 1);
  std::iota(prev.begin(), prev.end(), 0);
  for (std::size_t i = 1; i <= a.size(); ++i) {
    cur[0] = static_cast<int>(i);
    for (std::size_t j = 1; j <= b.size(); ++j)
      cur[j] = std::min({prev[j] + 1, cur[j - 1] + 1, prev[j - 1] + (a[i - 1] != b[j - 1])});
    std::swap(prev, cur);
  }
  return prev[b.size()];
}

int levenshtein(const Program& prog, const Solution& a, const Solution& b) {
  check_same(a, b);
  return levenshtein(channel(prog, a).symbols, channel(prog, b).symbols);
}

int distance(const Program& prog, Metric metric, const Solution& a, const Solution& b) {
  return metric == Metric::HD ? hamming(a, b) : levenshtein(prog, a, b);
}

double pairwise_diversity(const Program& prog, std::span<const Solution> pool, Metric metric) {
  check_pool(pool.size());
  std::vector<ScheduleSeq> seqs;
  if (metric == Metric::LD)
    for (const auto& s : pool) seqs.push_back(channel(prog, s));
  double sum = 0;
  for (std::size_t i = 0; i < pool.size(); ++i)
    for (std::size_t j = i + 1; j < pool.size(); ++j)
      sum += metric == Metric::HD ? hamming(pool[i], pool[j]) : levenshtein(seqs[i].symbols, seqs[j].symbols);
  const double pairs = static_cast<double>(pool.size()) * static_cast<double>(pool.size() - 1) / 2.0;
  return sum / pairs;
}

int min_pairwise(const Program& prog, std::span<const Solution> pool, Metric metric) {
  check_pool(pool.size());
  int best = std::numeric_limits<int>::max();
  for (std::size_t i = 0; i < pool.size(); ++i)
    for (std::size_t j = i + 1; j < pool.size(); ++j) best = std::min(best, distance(prog, metric, pool[i], pool[j]));
  return best;
}

const char* to_string(Metric m) { return m == Metric::HD ? "hd" : "ld"; }

}  // namespace divsched
