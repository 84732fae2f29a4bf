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

#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "divsched/emit.hpp"

namespace divsched {

inline constexpr int kDefaultGadgetLen = 5;

/// A code suffix ending in a branch, keyed by the address of its first
/// instruction. Nops are dropped from the body.
struct Gadget {
  std::uint64_t address = 0;
  std::vector<std::string> body;

  friend auto operator<=>(const Gadget&, const Gadget&) = default;
};

/// For each branch line, every suffix of 1..max_len non-nop lines ending
/// there. The walk backwards stops at the previous branch.
std::vector<Gadget> find_gadgets(const AsmListing& listing, int max_len = kDefaultGadgetLen);

struct Srate {
  long survived = 0;
  long total = 0;
  bool no_gadgets = false;  // total is 0; value() is then 0

  double value() const { return total == 0 ? 0.0 : static_cast<double>(survived) / static_cast<double>(total); }
};

/// Fraction of the gadgets of `a` found identically at the same address in `b`.
Srate srate(const AsmListing& a, const AsmListing& b, int max_len = kDefaultGadgetLen);

/// Histogram bucket of a survival rate: 0 for exactly zero, then (0, 0.1],
/// (0.1, 0.4] and (0.4, 1]. Computed on the exact ratio.
int srate_bucket(const Srate& s);

inline constexpr std::array<const char*, 4> kBucketNames = {"0", "(0,10]", "(10,40]", "(40,100]"};

struct PairRate {
  int i = 0;
  int j = 0;
  Srate rate;
};

struct SurvivalReport {
  std::vector<PairRate> pairs;  // all ordered pairs i != j, row-major
  std::array<long, 4> histogram{};
  std::vector<int> modes;       // buckets holding the largest count

  double mean() const;
};

/// Throws PoolTooSmall below two listings.
SurvivalReport survival_report(std::span<const AsmListing> pool, int max_len = kDefaultGadgetLen);

/// Per-pair matrix as CSV rows `i,j,survived,total,srate`.
std::string pair_matrix_csv(const SurvivalReport& report);

}  // namespace divsched
