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

#include <memory>
#include <vector>

#include "divsched/engine.hpp"
#include "divsched/model.hpp"

namespace divsched::detail {

class Propagator {
 public:
  virtual ~Propagator() = default;
  /// Narrows domains; returns false on failure.
  virtual bool propagate(Store& s) const = 0;
  const std::vector<Var>& scope() const { return scope_; }

 protected:
  std::vector<Var> scope_;
};

/// All propagators of one Csp with variable subscriptions. One instance is
/// used by one search at a time.
class PropagatorSet {
 public:
  explicit PropagatorSet(const Csp& csp);

  bool run_all(Store& s) const;
  /// Wakes the subscribers of the store's touched variables.
  bool run_touched(Store& s) const;
  /// Re-runs the cost propagator after the store's cost limit tightened.
  bool run_cost(Store& s) const;

 private:
  bool fixpoint(Store& s) const;
  void wake(Store& s) const;
  void enqueue(int p) const;

  std::vector<std::unique_ptr<Propagator>> props_;
  std::vector<std::vector<int>> subs_;
  int cost_index_ = -1;

  mutable std::vector<int> queue_;
  mutable std::size_t head_ = 0;
  mutable std::vector<char> queued_;
};

}  // namespace divsched::detail
