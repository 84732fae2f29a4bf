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

// Brute-force reference for small programs. Shares only the Program and
// TargetDesc data types with the library; constraint semantics, liveness
// and register assignment are re-derived here.

#include <cstdint>
#include <functional>
#include <set>
#include <vector>

#include "divsched/ir.hpp"
#include "divsched/target.hpp"

namespace oracle {

using Cost = std::int64_t;

struct Problem {
  divsched::Program prog;
  divsched::TargetDesc tgt;
  std::vector<std::vector<int>> lat;  // per instruction, per implementation
  std::vector<int> horizon;           // per block
  std::vector<std::vector<int>> reg_domain;  // per temp
  std::vector<std::vector<bool>> live_in, live_out;  // per block, per temp
};

Problem make(const divsched::Program& prog, const divsched::TargetDesc& tgt);

Cost cost(const Problem& p, const std::vector<int>& c, const std::vector<int>& m);

/// Every (c, m) satisfying all scheduling constraints with cost <= limit and
/// some valid register assignment. Stops early when visit returns false.
void enumerate(const Problem& p, Cost limit,
               const std::function<bool(const std::vector<int>& c, const std::vector<int>& m, Cost cost)>& visit);

/// Minimum cost, or -1 when nothing is feasible.
Cost optimum(const Problem& p);

/// Distinct issue-cycle vectors with cost <= limit.
std::set<std::vector<int>> schedules(const Problem& p, Cost limit);

/// True when some register assignment fits schedule c.
bool colorable(const Problem& p, const std::vector<int>& c);

/// Full independent check of one assignment.
bool valid(const Problem& p, const std::vector<int>& c, const std::vector<int>& m, const std::vector<int>& r);

}  // namespace oracle
