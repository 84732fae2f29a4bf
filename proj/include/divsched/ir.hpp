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
#include <string_view>
#include <vector>

namespace divsched {

enum class OperandKind { Temp, Reg, Imm, Label };

/// One operand of an abstract instruction. `value` is the dense temp index
/// for temps, the literal for immediates and the block id for labels;
/// `reg` names a fixed physical register.
struct Operand {
  OperandKind kind = OperandKind::Imm;
  std::int64_t value = 0;
  std::string reg;

  static Operand temp(int index) { return {OperandKind::Temp, index, {}}; }
  static Operand fixed(std::string name) { return {OperandKind::Reg, 0, std::move(name)}; }
  static Operand imm(std::int64_t v) { return {OperandKind::Imm, v, {}}; }
  static Operand label(int block) { return {OperandKind::Label, block, {}}; }

  friend bool operator==(const Operand&, const Operand&) = default;
};

/// Data edges impose the producer's latency; order edges only forbid the
/// consumer from issuing before the producer.
enum class DepKind { Data, Order };

struct Dep {
  int pred = 0;
  DepKind kind = DepKind::Data;
  bool is_explicit = false;

  friend bool operator==(const Dep&, const Dep&) = default;
};

struct Instr {
  int id = 0;
  int block = 0;
  std::string opcode;
  std::vector<Operand> defs;
  std::vector<Operand> uses;
  bool is_branch = false;
  std::vector<Dep> deps;  // incoming edges, sorted by predecessor

  friend bool operator==(const Instr&, const Instr&) = default;
};

struct Block {
  int id = 0;
  std::vector<int> instrs;  // textual order
  int freq = 1;
  std::vector<int> succ;

  friend bool operator==(const Block&, const Block&) = default;
};

struct Temp {
  int id = 0;       // dense index
  int number = 0;   // the N in `tN`
  int def_instr = -1;
  std::vector<int> uses;
  std::optional<std::string> preassigned;

  friend bool operator==(const Temp&, const Temp&) = default;
};

/// A function as a CFG of basic blocks. Instruction ids are global and
/// index `instrs`; temps are indexed densely in order of their number.
struct Program {
  std::string name;
  std::vector<Block> blocks;
  std::vector<Instr> instrs;
  std::vector<Temp> temps;

  int num_instrs() const { return static_cast<int>(instrs.size()); }
  int num_blocks() const { return static_cast<int>(blocks.size()); }
  int num_temps() const { return static_cast<int>(temps.size()); }

  /// Physical registers named explicitly by some operand, sorted.
  std::vector<std::string> fixed_registers() const;

  friend bool operator==(const Program&, const Program&) = default;
};

enum class DiagKind {
  NoBlocks,
  BlockIdsNotDense,
  InstrIdsNotDense,
  FreqBelowOne,
  BadSuccessor,
  MultipleDefs,
  NoDef,
  UndefinedTemp,
  LiveAtEntry,
  CrossBlockDep,
  CyclicDeps,
  BranchNotLast,
  BranchWithDefs,
};

struct Diagnostic {
  DiagKind kind;
  int id = -1;  // offending block, instruction or temp number
  std::string message;
};

/// Temps live on entry to and exit from each block.
struct Liveness {
  std::vector<std::vector<bool>> live_in;
  std::vector<std::vector<bool>> live_out;
};

/// Parses and validates; throws ParseError or SemanticError.
Program parse_program(std::string_view text);

/// Parses without semantic validation. Derived information (def-use edges,
/// temp def/use lists) is filled in on a best-effort basis.
Program parse_unchecked(std::string_view text);

std::string serialize(const Program& prog);

std::vector<Diagnostic> validate(const Program& prog);

Liveness compute_liveness(const Program& prog);

std::string to_string(DiagKind kind);

}  // namespace divsched
