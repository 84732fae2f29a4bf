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

#include "divsched/target.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <set>
#include <sstream>

#include "divsched/error.hpp"

namespace divsched {

namespace {

// Kept in sync with data/targets/toy.tgt; a unit test loads the file and
// compares.
constexpr std::string_view kToyTarget = R"(registers r0 r1 r2 r3 r4 r5 r6 r7
issue_width 1
impl add add latency 1
impl addi addi latency 1
impl sub sub latency 1
impl and and latency 1
impl or or latency 1
impl xor xor latency 1
impl sll sll latency 1
impl srl srl latency 1
impl slt slt latency 1
impl slti slti latency 1
impl li li latency 1
impl move move latency 1
impl lw lw latency 2
impl sw sw latency 1
impl mul mul latency 3
impl mul mul.alt latency 4
impl b b latency 1
impl beq beq latency 1
impl bne bne latency 1
impl blez blez latency 1
impl bnez bnez latency 1
impl jr jr latency 1
)";

struct Word {
  std::string_view text;
  int column;
};

std::vector<Word> words(std::string_view line) {
  if (auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
  std::vector<Word> out;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && std::isspace(static_cast<unsigned char>(line[i]))) ++i;
    std::size_t start = i;
    while (i < line.size() && !std::isspace(static_cast<unsigned char>(line[i]))) ++i;
    if (i > start) out.push_back({line.substr(start, i - start), static_cast<int>(start) + 1});
  }
  return out;
}

int integer(const Word& w, int line) {
  int v = 0;
  auto [ptr, ec] = std::from_chars(w.text.data(), w.text.data() + w.text.size(), v);
  if (ec != std::errc() || ptr != w.text.data() + w.text.size())
    throw ParseError(line, w.column, "expected integer '" + std::string(w.text) + "'");
  return v;
}

}  // namespace

std::optional<int> TargetDesc::register_index(std::string_view name) const {
  auto it = std::find(registers.begin(), registers.end(), name);
  if (it == registers.end()) return std::nullopt;
  return static_cast<int>(it - registers.begin());
}

const std::vector<ProcInstr>* TargetDesc::find_impls(std::string_view opcode) const {
  auto it = impls.find(std::string(opcode));
  return it == impls.end() ? nullptr : &it->second;
}

TargetDesc default_target() { return load_target(kToyTarget); }

TargetDesc load_target(std::string_view text) {
  TargetDesc tgt;
  bool have_registers = false;
  int line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    auto nl = text.find('\n', pos);
    if (nl == std::string_view::npos) nl = text.size();
    auto line = text.substr(pos, nl - pos);
    pos = nl + 1;
    ++line_no;
    auto w = words(line);
    if (w.empty()) continue;
    if (w[0].text == "registers") {
      if (have_registers) throw ParseError(line_no, w[0].column, "duplicate 'registers' line");
      std::set<std::string_view> seen;
      for (std::size_t i = 1; i < w.size(); ++i) {
        if (!seen.insert(w[i].text).second)
          throw ParseError(line_no, w[i].column, "duplicate register '" + std::string(w[i].text) + "'");
        tgt.registers.emplace_back(w[i].text);
      }
      have_registers = true;
    } else if (w[0].text == "issue_width") {
      if (w.size() != 2) throw ParseError(line_no, w[0].column, "expected 'issue_width N'");
      tgt.issue_width = integer(w[1], line_no);
      if (tgt.issue_width < 1) throw SemanticError("line " + std::to_string(line_no) + ": issue width must be ≥ 1");
    } else if (w[0].text == "impl") {
      // impl OPCODE NAME latency L [size S]
      if ((w.size() != 5 && w.size() != 7) || w[3].text != "latency" || (w.size() == 7 && w[5].text != "size"))
        throw ParseError(line_no, w[0].column, "expected 'impl OPCODE NAME latency L [size S]'");
      ProcInstr pi{std::string(w[2].text), integer(w[4], line_no), w.size() == 7 ? integer(w[6], line_no) : 1};
      if (pi.latency < 1) throw SemanticError("line " + std::to_string(line_no) + ": latency must be ≥ 1");
      if (pi.size < 1) throw SemanticError("line " + std::to_string(line_no) + ": size must be ≥ 1");
      tgt.impls[std::string(w[1].text)].push_back(std::move(pi));
    } else {
      throw ParseError(line_no, w[0].column, "unknown directive '" + std::string(w[0].text) + "'");
    }
  }
  if (tgt.registers.empty()) throw SemanticError("target declares no registers");
  return tgt;
}

std::string serialize(const TargetDesc& tgt) {
  std::ostringstream os;
  os << "registers";
  for (const auto& r : tgt.registers) os << " " << r;
  os << "\nissue_width " << tgt.issue_width << "\n";
  for (const auto& [op, list] : tgt.impls)
    for (const auto& pi : list) {
      os << "impl " << op << " " << pi.name << " latency " << pi.latency;
      if (pi.size != 1) os << " size " << pi.size;
      os << "\n";
    }
  return os.str();
}

}  // namespace divsched
