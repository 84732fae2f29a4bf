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

#include <span>
#include <vector>

#include "divsched/ir.hpp"
#include "divsched/model.hpp"

namespace divsched {

/// Symbol for an issue slot holding no instruction.
inline constexpr int kGap = -1;

/// A schedule as the sequence of instructions ordered by issue cycle. Each
/// block contributes slots 0 through its last used cycle; blocks are
/// concatenated in id order.
struct ScheduleSeq {
  std::vector<int> symbols;

  friend bool operator==(const ScheduleSeq&, const ScheduleSeq&) = default;
};

enum class Metric { HD, LD };

/// Number of instructions whose issue cycles differ. Throws MismatchedPrograms
/// when the solutions have different instruction counts.
int hamming(const Solution& a, const Solution& b);

/// Instructions sharing a cycle are ordered by id.
ScheduleSeq channel(const Program& prog, const Solution& s);

/// Edit distance between two symbol sequences (unit insert, delete, replace).
int levenshtein(std::span<const int> a, std::span<const int> b);

/// Edit distance between the channel sequences of two solutions.
int levenshtein(const Program& prog, const Solution& a, const Solution& b);

int distance(const Program& prog, Metric metric, const Solution& a, const Solution& b);

/// Mean distance over all unordered pairs. Throws PoolTooSmall below two.
double pairwise_diversity(const Program& prog, std::span<const Solution> pool, Metric metric);

/// Smallest distance over all unordered pairs. Throws PoolTooSmall below two.
int min_pairwise(const Program& prog, std::span<const Solution> pool, Metric metric);

const char* to_string(Metric m);

}  // namespace divsched
