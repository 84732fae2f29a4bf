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
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "divsched/diversify.hpp"
#include "divsched/ir.hpp"
#include "divsched/target.hpp"

namespace divsched {

struct Fixture {
  std::string name;
  Program program;
};

struct BenchConfig {
  std::vector<double> gaps = {0.0, 0.05, 0.10, 0.20};
  std::vector<Method> methods = {Method::LNS};
  int seeds = 10;                 // runs use seeds 1..seeds
  DivConfig base;                 // everything except p, method and seed
  int gadget_len = 5;
  int jobs = 1;
};

/// One diversify run of the sweep.
struct RunRow {
  std::string fixture;
  Method method = Method::LNS;
  double gap = 0;
  std::uint64_t seed = 0;
  bool ok = false;
  std::string error;
  int pool_size = 0;
  Cost optimum = 0;
  double d_hd = 0;  // mean pairwise distance, 0 for pools below two
  double d_ld = 0;
  double srate_mean = 0;
  std::array<long, 4> histogram{};
  double wall_time = 0;
  std::string records;  // pool records, for determinism checks
};

/// Runs every fixture x gap x method x seed, `jobs` at a time. Rows come back
/// in that nested order whatever the parallelism. A failing run is recorded
/// in its row and the sweep continues.
std::vector<RunRow> run_bench(std::span<const Fixture> fixtures, const TargetDesc& tgt, const BenchConfig& cfg);

/// Runs fn(0..n-1) on up to `jobs` worker threads.
void parallel_for(int n, int jobs, const std::function<void(int)>& fn);

struct MeanStd {
  double mean = 0;
  double stddev = 0;  // sample standard deviation, 0 for one value
};

MeanStd mean_std(std::span<const double> xs);

struct PairedTest {
  double t = 0;
  int df = 0;
  double p = 1;  // one-sided p-value for mean(x - y) > 0
};

/// Paired t-test of the hypothesis that x exceeds y on average.
PairedTest paired_t_greater(std::span<const double> x, std::span<const double> y);

/// CSV tables over the rows (schemas in the README).
std::string runs_csv(std::span<const RunRow> rows);
std::string methods_csv(std::span<const RunRow> rows);
std::string gaps_csv(std::span<const RunRow> rows);
std::string survival_csv(std::span<const RunRow> rows);

}  // namespace divsched
