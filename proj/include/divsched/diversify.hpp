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
#include <optional>
#include <string>
#include <vector>

#include "divsched/distance.hpp"
#include "divsched/engine.hpp"
#include "divsched/model.hpp"
#include "divsched/rng.hpp"

namespace divsched {

enum class Method { LNS, RS, MaxDiv };

struct DivConfig {
  int k = 200;             // pool size including the optimum
  double p = 0.10;         // optimality gap
  int h = 1;               // minimum pairwise distance
  Metric metric = Metric::HD;
  Method method = Method::LNS;
  double relax_rate = 0.70;
  long fail_limit = 500;
  double time_limit = 60.0;  // seconds for the whole run
  std::uint64_t seed = 1;

  /// Throws std::invalid_argument on out-of-range fields.
  void validate() const;
};

struct Provenance {
  int iteration = 0;   // loop iteration that produced the solution, 0 for the optimum
  long restarts = 0;   // search restarts spent on it
  int attempts = 0;    // LNS destroy/repair attempts, or LD candidates tried
};

enum class StopReason { Complete, Exhausted, TimeLimit };

struct VariantPool {
  std::vector<Solution> solutions;  // solutions[0] is the optimum
  std::vector<Provenance> provenance;
  DivConfig config;
  Cost optimum = 0;
  bool optimum_proven = false;
  Cost cost_bound = 0;
  StopReason stop = StopReason::Complete;
  double wall_time = 0.0;

  bool incomplete() const { return static_cast<int>(solutions.size()) < config.k; }
};

/// Largest cost admitted by gap p over optimum o.
Cost gap_bound(Cost optimum, double p);

/// Grows a pool of pairwise distant near-optimal solutions. Throws
/// Unsatisfiable when the model has no solution.
VariantPool diversify(const Csp& csp, const DivConfig& cfg);

struct StepResult {
  SearchStatus status = SearchStatus::Unsat;  // Found, Unsat or LimitHit
  std::optional<Solution> solution;
  long restarts = 0;
  int attempts = 0;
};

/// Destroys each variable of `current` with probability relax_rate and
/// repairs with randomized search. Three failed attempts escalate to a
/// search over all variables.
StepResult lns_step(const Csp& csp, const Solution& current, const DivConfig& cfg, Rng& rng, double time_limit);

/// Randomized search from the root, seeded by cfg.seed.
StepResult rs_step(const Csp& csp, const DivConfig& cfg, double time_limit);

/// Solution maximizing the minimum Hamming distance to `pool`; the first
/// candidate comes from randomized search, later ones from complete search
/// for a strictly larger distance.
StepResult maxdiv_step(const Csp& csp, const std::vector<Solution>& pool, const DivConfig& cfg, double time_limit);

const char* to_string(Method m);
const char* to_string(StopReason r);

}  // namespace divsched
