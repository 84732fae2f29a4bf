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

#include "divsched/ir.hpp"
#include "divsched/model.hpp"
#include "divsched/target.hpp"

namespace divsched {

inline constexpr std::uint64_t kDefaultBase = 0x9d000000;
inline constexpr std::uint64_t kSlotBytes = 4;

struct AsmLine {
  std::uint64_t address = 0;
  std::string mnemonic;
  std::vector<std::string> operands;
  bool is_nop = false;
  bool is_branch = false;
  int instr = -1;  // source instruction, -1 for nops and parsed text

  /// Mnemonic and operands as printed, without the address.
  std::string text() const;

  friend bool operator==(const AsmLine&, const AsmLine&) = default;
};

struct AsmListing {
  std::uint64_t base = kDefaultBase;
  std::vector<AsmLine> lines;
  std::vector<std::size_t> block_starts;  // first line of each block

  friend bool operator==(const AsmListing&, const AsmListing&) = default;
};

/// Lays the schedule out one slot per issue cycle, nop-filling idle cycles.
/// Operands print defs first; branch targets print as block labels.
AsmListing emit(const Program& prog, const TargetDesc& tgt, const Solution& s, std::uint64_t base = kDefaultBase);

/// One line per slot as `ADDRESS: MNEMONIC OPERANDS`, with a `bbN:` label
/// line before each block.
std::string to_text(const AsmListing& listing);

/// Reads text produced by to_text. Branch-ness is recovered from
/// `branch_mnemonics`; instruction ids are not. Throws ParseError.
AsmListing parse_listing(std::string_view text, const std::vector<std::string>& branch_mnemonics = {});

struct LineDiff {
  std::uint64_t address = 0;
  std::optional<std::string> a;  // nullopt: the listing has no line here
  std::optional<std::string> b;

  friend bool operator==(const LineDiff&, const LineDiff&) = default;
};

/// Slots whose line text differs, up to the longer listing.
std::vector<LineDiff> diff_listings(const AsmListing& a, const AsmListing& b);

}  // namespace divsched
