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

#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace divsched {

/// A concrete processor instruction that can implement an abstract opcode.
struct ProcInstr {
  std::string name;
  int latency = 1;
  int size = 1;

  friend bool operator==(const ProcInstr&, const ProcInstr&) = default;
};

struct TargetDesc {
  std::vector<std::string> registers;
  int issue_width = 1;
  std::map<std::string, std::vector<ProcInstr>> impls;

  std::optional<int> register_index(std::string_view name) const;
  const std::vector<ProcInstr>* find_impls(std::string_view opcode) const;

  friend bool operator==(const TargetDesc&, const TargetDesc&) = default;
};

/// The bundled toy RISC target (same content as data/targets/toy.tgt).
TargetDesc default_target();

/// Parses a `.tgt` description; throws ParseError or SemanticError.
TargetDesc load_target(std::string_view text);

std::string serialize(const TargetDesc& tgt);

}  // namespace divsched
