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

#include "divsched/ir.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <functional>
#include <map>
#include <set>
#include <sstream>

#include "divsched/error.hpp"

namespace divsched {

namespace {

struct Token {
  std::string_view text;
  int column;
};

std::vector<Token> tokenize(std::string_view line) {
  if (auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
  std::vector<Token> tokens;
  std::size_t i = 0;
  auto is_sep = [](char ch) { return ch == ' ' || ch == '\t' || ch == ',' || ch == '\r'; };
  while (i < line.size()) {
    while (i < line.size() && is_sep(line[i])) ++i;
    if (i >= line.size()) break;
    std::size_t start = i;
    while (i < line.size() && !is_sep(line[i])) ++i;
    tokens.push_back({line.substr(start, i - start), static_cast<int>(start) + 1});
  }
  return tokens;
}

std::optional<std::int64_t> to_int(std::string_view s) {
  std::int64_t v = 0;
  const char* first = s.data();
  if (!s.empty() && s.front() == '+') ++first;
  auto [ptr, ec] = std::from_chars(first, s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size() || first == s.data() + s.size()) return std::nullopt;
  return v;
}

std::optional<int> prefixed_number(std::string_view s, std::string_view prefix) {
  if (s.size() <= prefix.size() || s.substr(0, prefix.size()) != prefix) return std::nullopt;
  auto rest = s.substr(prefix.size());
  if (!std::all_of(rest.begin(), rest.end(), [](char ch) { return ch >= '0' && ch <= '9'; })) return std::nullopt;
  auto v = to_int(rest);
  if (!v || *v > 1'000'000) return std::nullopt;
  return static_cast<int>(*v);
}

bool is_register_name(std::string_view s) { return prefixed_number(s, "r").has_value(); }

bool is_identifier(std::string_view s) {
  if (s.empty()) return false;
  auto head = [](char ch) { return std::isalpha(static_cast<unsigned char>(ch)) || ch == '_' || ch == '.'; };
  auto tail = [&](char ch) { return head(ch) || std::isdigit(static_cast<unsigned char>(ch)); };
  return head(s.front()) && std::all_of(s.begin() + 1, s.end(), tail);
}

[[noreturn]] void fail(int line, const Token& tok, const std::string& what) {
  throw ParseError(line, tok.column, what + " '" + std::string(tok.text) + "'");
}

void add_dep(Instr& in, Dep dep) {
  auto it = std::find_if(in.deps.begin(), in.deps.end(), [&](const Dep& d) { return d.pred == dep.pred; });
  if (it == in.deps.end()) {
    in.deps.push_back(dep);
    return;
  }
  if (dep.kind == DepKind::Data) it->kind = DepKind::Data;
  it->is_explicit = it->is_explicit || dep.is_explicit;
}

/// Fills temp def/use lists and adds the implicit edges: temp def-use, fixed
/// register RAW/WAR/WAW in textual order, and the terminator chain.
void derive(Program& prog) {
  for (auto& t : prog.temps) {
    t.def_instr = -1;
    t.uses.clear();
  }
  for (const auto& in : prog.instrs) {
    for (const auto& d : in.defs)
      if (d.kind == OperandKind::Temp && prog.temps[d.value].def_instr < 0) prog.temps[d.value].def_instr = in.id;
    for (const auto& u : in.uses)
      if (u.kind == OperandKind::Temp) prog.temps[u.value].uses.push_back(in.id);
  }
  for (auto& t : prog.temps) {
    std::sort(t.uses.begin(), t.uses.end());
    t.uses.erase(std::unique(t.uses.begin(), t.uses.end()), t.uses.end());
  }

  for (const auto& block : prog.blocks) {
    std::map<std::string, int> last_writer;
    std::map<std::string, std::vector<int>> readers;
    int prev_branch = -1;
    for (int id : block.instrs) {
      Instr& in = prog.instrs[id];
      for (const auto& u : in.uses) {
        if (u.kind == OperandKind::Temp) {
          int def = prog.temps[u.value].def_instr;
          if (def >= 0 && def != id && prog.instrs[def].block == in.block) add_dep(in, {def, DepKind::Data, false});
        } else if (u.kind == OperandKind::Reg) {
          if (auto w = last_writer.find(u.reg); w != last_writer.end() && w->second != id)
            add_dep(in, {w->second, DepKind::Data, false});
          readers[u.reg].push_back(id);
        }
      }
      for (const auto& d : in.defs) {
        if (d.kind != OperandKind::Reg) continue;
        for (int r : readers[d.reg])
          if (r != id) add_dep(in, {r, DepKind::Order, false});
        if (auto w = last_writer.find(d.reg); w != last_writer.end() && w->second != id)
          add_dep(in, {w->second, DepKind::Data, false});
        last_writer[d.reg] = id;
        readers[d.reg].clear();
      }
      if (in.is_branch) {
        if (prev_branch >= 0) add_dep(in, {prev_branch, DepKind::Data, false});
        prev_branch = id;
      }
    }
  }
  for (auto& in : prog.instrs)
    std::sort(in.deps.begin(), in.deps.end(), [](const Dep& a, const Dep& b) { return a.pred < b.pred; });
}

bool has_cycle(const Program& prog, const Block& block) {
  // Kahn's algorithm restricted to in-block edges.
  std::map<int, int> indeg;
  std::map<int, std::vector<int>> out;
  for (int id : block.instrs) indeg[id];
  for (int id : block.instrs)
    for (const auto& d : prog.instrs[id].deps)
      if (indeg.count(d.pred)) {
        ++indeg[id];
        out[d.pred].push_back(id);
      }
  std::vector<int> ready;
  for (auto [id, deg] : indeg)
    if (deg == 0) ready.push_back(id);
  std::size_t seen = 0;
  while (!ready.empty()) {
    int id = ready.back();
    ready.pop_back();
    ++seen;
    for (int next : out[id])
      if (--indeg[next] == 0) ready.push_back(next);
  }
  return seen != block.instrs.size();
}

}  // namespace

std::vector<std::string> Program::fixed_registers() const {
  std::set<std::string> regs;
  for (const auto& in : instrs) {
    for (const auto& o : in.defs)
      if (o.kind == OperandKind::Reg) regs.insert(o.reg);
    for (const auto& o : in.uses)
      if (o.kind == OperandKind::Reg) regs.insert(o.reg);
  }
  return {regs.begin(), regs.end()};
}

Program parse_unchecked(std::string_view text) {
  Program prog;
  bool have_func = false;
  std::vector<Instr> raw;
  std::map<int, std::string> pins;  // temp number -> register
  std::set<int> temp_numbers;
  struct RawDep {
    int from, to, line;
  };
  std::vector<RawDep> raw_deps;

  int line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    auto nl = text.find('\n', pos);
    if (nl == std::string_view::npos) nl = text.size();
    auto line = text.substr(pos, nl - pos);
    pos = nl + 1;
    ++line_no;
    auto toks = tokenize(line);
    if (toks.empty()) continue;
    auto head = toks[0].text;

    if (head == "func") {
      if (toks.size() != 2 || !is_identifier(toks[1].text))
        throw ParseError(line_no, toks[0].column, "expected 'func NAME'");
      if (have_func) fail(line_no, toks[0], "duplicate");
      prog.name = std::string(toks[1].text);
      have_func = true;
      continue;
    }
    if (!have_func) throw ParseError(line_no, toks[0].column, "expected 'func NAME' before any other line");

    if (head == "temp") {
      // temp tN reg rK
      if (toks.size() != 4 || toks[2].text != "reg") throw ParseError(line_no, toks[0].column, "expected 'temp tN reg rK'");
      auto n = prefixed_number(toks[1].text, "t");
      if (!n) fail(line_no, toks[1], "expected temp");
      if (!is_register_name(toks[3].text)) fail(line_no, toks[3], "expected register");
      if (pins.count(*n)) fail(line_no, toks[1], "temp pinned twice");
      pins[*n] = std::string(toks[3].text);
      temp_numbers.insert(*n);
      continue;
    }
    if (head == "block") {
      // block ID [freq F] [succ S...]
      if (toks.size() < 2) throw ParseError(line_no, toks[0].column, "expected block id");
      auto id = to_int(toks[1].text);
      if (!id || *id < 0) fail(line_no, toks[1], "expected block id");
      Block b;
      b.id = static_cast<int>(*id);
      std::size_t i = 2;
      if (i < toks.size() && toks[i].text == "freq") {
        if (i + 1 >= toks.size()) throw ParseError(line_no, toks[i].column, "expected frequency");
        auto f = to_int(toks[i + 1].text);
        if (!f) fail(line_no, toks[i + 1], "expected frequency");
        b.freq = static_cast<int>(*f);
        i += 2;
      }
      if (i < toks.size() && toks[i].text == "succ") ++i;
      for (; i < toks.size(); ++i) {
        auto s = to_int(toks[i].text);
        if (!s) s = prefixed_number(toks[i].text, "bb");
        if (!s || *s < 0) fail(line_no, toks[i], "expected successor block id");
        b.succ.push_back(static_cast<int>(*s));
      }
      prog.blocks.push_back(std::move(b));
      continue;
    }
    if (head == "dep") {
      // dep A -> B
      if (toks.size() != 4 || toks[2].text != "->") throw ParseError(line_no, toks[0].column, "expected 'dep A -> B'");
      auto a = to_int(toks[1].text);
      auto b = to_int(toks[3].text);
      if (!a || *a < 0) fail(line_no, toks[1], "expected instruction id");
      if (!b || *b < 0) fail(line_no, toks[3], "expected instruction id");
      raw_deps.push_back({static_cast<int>(*a), static_cast<int>(*b), line_no});
      continue;
    }

    // ID: [DEF <-] OPCODE OPERAND... [!branch]
    if (head.size() < 2 || head.back() != ':') fail(line_no, toks[0], "unexpected token");
    auto id = to_int(head.substr(0, head.size() - 1));
    if (!id || *id < 0) fail(line_no, toks[0], "expected instruction id");
    if (prog.blocks.empty()) throw ParseError(line_no, toks[0].column, "instruction outside of a block");
    Instr in;
    in.id = static_cast<int>(*id);
    in.block = static_cast<int>(prog.blocks.size()) - 1;
    std::size_t i = 1;
    if (toks.size() >= 3 && toks[2].text == "<-") {
      const auto& d = toks[1];
      if (auto n = prefixed_number(d.text, "t")) {
        in.defs.push_back(Operand::temp(*n));
        temp_numbers.insert(*n);
      } else if (is_register_name(d.text)) {
        in.defs.push_back(Operand::fixed(std::string(d.text)));
      } else {
        fail(line_no, d, "expected temp or register");
      }
      i = 3;
    }
    if (i >= toks.size()) throw ParseError(line_no, 0, "missing opcode");
    if (!is_identifier(toks[i].text)) fail(line_no, toks[i], "expected opcode");
    in.opcode = std::string(toks[i].text);
    for (++i; i < toks.size(); ++i) {
      const auto& t = toks[i];
      if (t.text == "!branch") {
        if (i + 1 != toks.size()) fail(line_no, toks[i + 1], "unexpected token after !branch");
        in.is_branch = true;
      } else if (auto n = prefixed_number(t.text, "t")) {
        in.uses.push_back(Operand::temp(*n));
        temp_numbers.insert(*n);
      } else if (is_register_name(t.text)) {
        in.uses.push_back(Operand::fixed(std::string(t.text)));
      } else if (auto bb = prefixed_number(t.text, "bb")) {
        in.uses.push_back(Operand::label(*bb));
      } else if (auto v = to_int(t.text)) {
        in.uses.push_back(Operand::imm(*v));
      } else {
        fail(line_no, t, "unexpected operand");
      }
    }
    prog.blocks.back().instrs.push_back(in.id);
    raw.push_back(std::move(in));
  }
  if (!have_func) throw ParseError(line_no, 0, "missing 'func NAME'");

  // Dense temp indices in order of temp number.
  std::map<int, int> temp_index;
  for (int n : temp_numbers) {
    Temp t;
    t.id = static_cast<int>(prog.temps.size());
    t.number = n;
    if (auto p = pins.find(n); p != pins.end()) t.preassigned = p->second;
    temp_index[n] = t.id;
    prog.temps.push_back(std::move(t));
  }
  for (auto& in : raw) {
    for (auto& o : in.defs)
      if (o.kind == OperandKind::Temp) o.value = temp_index.at(static_cast<int>(o.value));
    for (auto& o : in.uses)
      if (o.kind == OperandKind::Temp) o.value = temp_index.at(static_cast<int>(o.value));
  }

  std::sort(raw.begin(), raw.end(), [](const Instr& a, const Instr& b) { return a.id < b.id; });
  prog.instrs = std::move(raw);
  bool dense = true;
  for (int k = 0; k < prog.num_instrs(); ++k) dense = dense && prog.instrs[k].id == k;
  for (int k = 0; k < prog.num_blocks(); ++k) dense = dense && prog.blocks[k].id == k;
  if (!dense) return prog;

  for (const auto& d : raw_deps) {
    if (d.from >= prog.num_instrs() || d.to >= prog.num_instrs())
      throw SemanticError("line " + std::to_string(d.line) + ": dep references unknown instruction " +
                          std::to_string(std::max(d.from, d.to)));
    add_dep(prog.instrs[d.to], {d.from, DepKind::Data, true});
  }
  derive(prog);
  return prog;
}

Program parse_program(std::string_view text) {
  Program prog = parse_unchecked(text);
  auto diags = validate(prog);
  if (!diags.empty()) throw SemanticError(diags.front().message);
  return prog;
}

std::vector<Diagnostic> validate(const Program& prog) {
  std::vector<Diagnostic> out;
  auto report = [&](DiagKind kind, int id, std::string msg) { out.push_back({kind, id, std::move(msg)}); };

  if (prog.blocks.empty()) {
    report(DiagKind::NoBlocks, -1, "program has no blocks");
    return out;
  }
  for (int k = 0; k < prog.num_blocks(); ++k)
    if (prog.blocks[k].id != k) {
      report(DiagKind::BlockIdsNotDense, prog.blocks[k].id, "block ids are not dense: expected " + std::to_string(k));
      return out;
    }
  for (int k = 0; k < prog.num_instrs(); ++k)
    if (prog.instrs[k].id != k) {
      report(DiagKind::InstrIdsNotDense, prog.instrs[k].id,
             "instruction ids are not dense: expected " + std::to_string(k) + ", found " +
                 std::to_string(prog.instrs[k].id));
      return out;
    }

  for (const auto& b : prog.blocks) {
    if (b.freq < 1) report(DiagKind::FreqBelowOne, b.id, "block " + std::to_string(b.id) + " has frequency < 1");
    for (int s : b.succ)
      if (s < 0 || s >= prog.num_blocks())
        report(DiagKind::BadSuccessor, b.id, "block " + std::to_string(b.id) + " has unknown successor " + std::to_string(s));
    bool seen_branch = false;
    for (int id : b.instrs) {
      const auto& in = prog.instrs[id];
      if (in.is_branch && !in.defs.empty())
        report(DiagKind::BranchWithDefs, id, "branch instruction " + std::to_string(id) + " defines a value");
      if (!in.is_branch && seen_branch)
        report(DiagKind::BranchNotLast, id, "instruction " + std::to_string(id) + " follows a branch in block " + std::to_string(b.id));
      seen_branch = seen_branch || in.is_branch;
    }
  }

  // One def per temp.
  std::vector<int> defs(prog.temps.size(), 0), uses(prog.temps.size(), 0);
  for (const auto& in : prog.instrs) {
    for (const auto& d : in.defs)
      if (d.kind == OperandKind::Temp) ++defs.at(d.value);
    for (const auto& u : in.uses)
      if (u.kind == OperandKind::Temp) ++uses.at(u.value);
  }
  bool temps_ok = true;
  for (const auto& t : prog.temps) {
    auto name = "t" + std::to_string(t.number);
    if (defs[t.id] > 1) report(DiagKind::MultipleDefs, t.number, "temp " + name + " has multiple defs");
    if (defs[t.id] == 0 && uses[t.id] > 0) report(DiagKind::UndefinedTemp, t.number, "temp " + name + " is used but never defined");
    if (defs[t.id] == 0 && uses[t.id] == 0) report(DiagKind::NoDef, t.number, "temp " + name + " is declared but never defined");
    temps_ok = temps_ok && defs[t.id] == 1;
  }

  bool deps_ok = true;
  for (const auto& in : prog.instrs)
    for (const auto& d : in.deps) {
      if (d.pred < 0 || d.pred >= prog.num_instrs()) {
        report(DiagKind::CrossBlockDep, in.id, "dependency of " + std::to_string(in.id) + " on unknown instruction");
        deps_ok = false;
      } else if (prog.instrs[d.pred].block != in.block) {
        report(DiagKind::CrossBlockDep, in.id,
               "dependency " + std::to_string(d.pred) + " -> " + std::to_string(in.id) + " crosses blocks");
        deps_ok = false;
      }
    }
  if (deps_ok)
    for (const auto& b : prog.blocks)
      if (has_cycle(prog, b)) report(DiagKind::CyclicDeps, b.id, "dependencies in block " + std::to_string(b.id) + " are cyclic");

  if (temps_ok && out.empty()) {
    auto live = compute_liveness(prog);
    for (const auto& t : prog.temps)
      if (live.live_in[0][t.id])
        report(DiagKind::LiveAtEntry, t.number, "temp t" + std::to_string(t.number) + " may be used before its definition");
  }
  return out;
}

Liveness compute_liveness(const Program& prog) {
  const int nb = prog.num_blocks();
  const int nt = prog.num_temps();
  std::vector<std::vector<bool>> gen(nb, std::vector<bool>(nt)), kill(nb, std::vector<bool>(nt));
  for (const auto& in : prog.instrs) {
    for (const auto& d : in.defs)
      if (d.kind == OperandKind::Temp) kill[in.block][d.value] = true;
  }
  for (const auto& in : prog.instrs)
    for (const auto& u : in.uses)
      if (u.kind == OperandKind::Temp && !kill[in.block][u.value]) gen[in.block][u.value] = true;

  Liveness live{std::vector<std::vector<bool>>(nb, std::vector<bool>(nt)),
                std::vector<std::vector<bool>>(nb, std::vector<bool>(nt))};
  bool changed = true;
  while (changed) {
    changed = false;
    for (int b = nb - 1; b >= 0; --b) {
      for (int s : prog.blocks[b].succ) {
        if (s < 0 || s >= nb) continue;
        for (int t = 0; t < nt; ++t)
          if (live.live_in[s][t] && !live.live_out[b][t]) {
            live.live_out[b][t] = true;
            changed = true;
          }
      }
      for (int t = 0; t < nt; ++t) {
        bool in = gen[b][t] || (live.live_out[b][t] && !kill[b][t]);
        if (in && !live.live_in[b][t]) {
          live.live_in[b][t] = true;
          changed = true;
        }
      }
    }
  }
  return live;
}

std::string serialize(const Program& prog) {
  std::ostringstream os;
  auto operand = [&](const Operand& o) -> std::string {
    switch (o.kind) {
      case OperandKind::Temp: return "t" + std::to_string(prog.temps[o.value].number);
      case OperandKind::Reg: return o.reg;
      case OperandKind::Imm: return std::to_string(o.value);
      case OperandKind::Label: return "bb" + std::to_string(o.value);
    }
    return {};
  };
  os << "func " << prog.name << "\n";
  for (const auto& t : prog.temps)
    if (t.preassigned) os << "temp t" << t.number << " reg " << *t.preassigned << "\n";
  for (const auto& b : prog.blocks) {
    os << "block " << b.id << " freq " << b.freq;
    if (!b.succ.empty()) {
      os << " succ";
      for (int s : b.succ) os << " " << s;
    }
    os << "\n";
    for (int id : b.instrs) {
      const auto& in = prog.instrs[id];
      os << "  " << id << ":";
      for (const auto& d : in.defs) os << " " << operand(d) << " <-";
      os << " " << in.opcode;
      for (std::size_t k = 0; k < in.uses.size(); ++k) os << (k == 0 ? " " : ", ") << operand(in.uses[k]);
      if (in.is_branch) os << " !branch";
      os << "\n";
    }
    for (int id : b.instrs)
      for (const auto& d : prog.instrs[id].deps)
        if (d.is_explicit) os << "  dep " << d.pred << " -> " << id << "\n";
  }
  return os.str();
}

std::string to_string(DiagKind kind) {
  switch (kind) {
    case DiagKind::NoBlocks: return "NoBlocks";
    case DiagKind::BlockIdsNotDense: return "BlockIdsNotDense";
    case DiagKind::InstrIdsNotDense: return "InstrIdsNotDense";
    case DiagKind::FreqBelowOne: return "FreqBelowOne";
    case DiagKind::BadSuccessor: return "BadSuccessor";
    case DiagKind::MultipleDefs: return "MultipleDefs";
    case DiagKind::NoDef: return "NoDef";
    case DiagKind::UndefinedTemp: return "UndefinedTemp";
    case DiagKind::LiveAtEntry: return "LiveAtEntry";
    case DiagKind::CrossBlockDep: return "CrossBlockDep";
    case DiagKind::CyclicDeps: return "CyclicDeps";
    case DiagKind::BranchNotLast: return "BranchNotLast";
    case DiagKind::BranchWithDefs: return "BranchWithDefs";
  }
  return "?";
}

}  // namespace divsched
