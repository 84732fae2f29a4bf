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

#include "divsched/emit.hpp"

#include <algorithm>
#include <cstdio>
#include <sstream>

#include "divsched/distance.hpp"
#include "divsched/error.hpp"

namespace divsched {

namespace {

std::string render(const Operand& op, const TargetDesc& tgt, const Solution& s) {
  switch (op.kind) {
    case OperandKind::Temp:
      return tgt.registers.at(s.r.at(op.value));
    case OperandKind::Reg:
      return op.reg;
    case OperandKind::Imm:
      return std::to_string(op.value);
    case OperandKind::Label:
      return "bb" + std::to_string(op.value);
  }
  return {};
}

std::string hex_address(std::uint64_t a) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%08llx", static_cast<unsigned long long>(a));
  return buf;
}

}  // namespace

std::string AsmLine::text() const {
  std::string out = mnemonic;
  for (std::size_t k = 0; k < operands.size(); ++k) out += (k == 0 ? " " : ", ") + operands[k];
  return out;
}

AsmListing emit(const Program& prog, const TargetDesc& tgt, const Solution& s, std::uint64_t base) {
  AsmListing listing;
  listing.base = base;
  const auto seq = channel(prog, s);
  // channel() concatenates blocks; find where each starts again.
  std::size_t pos = 0;
  for (const auto& b : prog.blocks) {
    listing.block_starts.push_back(pos);
    int last = -1;
    for (int id : b.instrs) last = std::max(last, s.c[id]);
    std::size_t len = 0;
    if (last >= 0) {
      // Slots in this block: cycles 0..last plus extra instructions sharing cycles.
      len = static_cast<std::size_t>(last) + 1;
      std::vector<int> per_cycle(len, 0);
      for (int id : b.instrs) ++per_cycle[s.c[id]];
      for (int n : per_cycle)
        if (n > 1) len += n - 1;
    }
    pos += len;
  }
  for (std::size_t k = 0; k < seq.symbols.size(); ++k) {
    AsmLine line;
    line.address = base + kSlotBytes * k;
    const int id = seq.symbols[k];
    if (id == kGap) {
      line.mnemonic = "nop";
      line.is_nop = true;
    } else {
      const auto& in = prog.instrs[id];
      line.instr = id;
      line.is_branch = in.is_branch;
      line.mnemonic = tgt.find_impls(in.opcode)->at(s.m[id]).name;
      for (const auto& op : in.defs) line.operands.push_back(render(op, tgt, s));
      for (const auto& op : in.uses) line.operands.push_back(render(op, tgt, s));
    }
    listing.lines.push_back(std::move(line));
  }
  return listing;
}

std::string to_text(const AsmListing& listing) {
  std::string out;
  std::size_t next_block = 0;
  for (std::size_t k = 0; k < listing.lines.size(); ++k) {
    while (next_block < listing.block_starts.size() && listing.block_starts[next_block] == k)
      out += "bb" + std::to_string(next_block++) + ":\n";
    out += hex_address(listing.lines[k].address) + ": " + listing.lines[k].text() + "\n";
  }
  while (next_block < listing.block_starts.size()) out += "bb" + std::to_string(next_block++) + ":\n";
  return out;
}

AsmListing parse_listing(std::string_view text, const std::vector<std::string>& branch_mnemonics) {
  AsmListing listing;
  std::istringstream in{std::string(text)};
  std::string raw;
  int lineno = 0;
  while (std::getline(in, raw)) {
    ++lineno;
    if (raw.empty()) continue;
    const auto colon = raw.find(':');
    if (colon == std::string::npos) throw ParseError(lineno, 0, "expected ':'");
    const std::string head = raw.substr(0, colon);
    if (head.rfind("bb", 0) == 0) {
      listing.block_starts.push_back(listing.lines.size());
      continue;
    }
    AsmLine line;
    try {
      std::size_t used = 0;
      line.address = std::stoull(head, &used, 16);
      if (used != head.size()) throw std::invalid_argument(head);
    } catch (const std::exception&) {
      throw ParseError(lineno, 1, "bad address '" + head + "'");
    }
    if (listing.lines.empty())
      listing.base = line.address;
    std::istringstream body(raw.substr(colon + 1));
    body >> line.mnemonic;
    if (line.mnemonic.empty()) throw ParseError(lineno, static_cast<int>(colon) + 2, "missing mnemonic");
    std::string rest;
    std::getline(body, rest);
    std::istringstream ops(rest);
    for (std::string op; std::getline(ops, op, ',');) {
      const auto first = op.find_first_not_of(' ');
      const auto last = op.find_last_not_of(' ');
      if (first != std::string::npos) line.operands.push_back(op.substr(first, last - first + 1));
    }
    line.is_nop = line.mnemonic == "nop";
    line.is_branch = std::find(branch_mnemonics.begin(), branch_mnemonics.end(), line.mnemonic) != branch_mnemonics.end();
    listing.lines.push_back(std::move(line));
  }
  return listing;
}

std::vector<LineDiff> diff_listings(const AsmListing& a, const AsmListing& b) {
  std::vector<LineDiff> out;
  const std::size_t n = std::max(a.lines.size(), b.lines.size());
  for (std::size_t k = 0; k < n; ++k) {
    LineDiff d;
    d.address = k < a.lines.size() ? a.lines[k].address : b.lines[k].address;
    if (k < a.lines.size()) d.a = a.lines[k].text();
    if (k < b.lines.size()) d.b = b.lines[k].text();
    if (d.a != d.b) out.push_back(std::move(d));
  }
  return out;
}

}  // namespace divsched
