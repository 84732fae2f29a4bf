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

#include "divsched/records.hpp"

#include <fstream>
#include <sstream>

#include "divsched/error.hpp"

namespace divsched {

ordered_json solution_record(const Solution& s, std::uint64_t seed, int index, const Provenance& prov) {
  ordered_json j;
  j["seed"] = seed;
  j["c"] = s.c;
  j["m"] = s.m;
  j["r"] = s.r;
  j["cost"] = s.cost;
  j["index"] = index;
  j["iteration"] = prov.iteration;
  j["restarts"] = prov.restarts;
  return j;
}

Solution solution_from_record(const nlohmann::json& rec) {
  try {
    Solution s;
    s.c = rec.at("c").get<std::vector<int>>();
    s.m = rec.at("m").get<std::vector<int>>();
    s.r = rec.at("r").get<std::vector<int>>();
    s.cost = rec.at("cost").get<Cost>();
    if (s.m.size() != s.c.size()) throw Error("c and m lengths differ");
    return s;
  } catch (const nlohmann::json::exception& e) {
    throw Error(std::string("malformed solution record: ") + e.what());
  }
}

std::string pool_records(const VariantPool& pool) {
  std::string out;
  for (std::size_t i = 0; i < pool.solutions.size(); ++i)
    out += solution_record(pool.solutions[i], pool.config.seed, static_cast<int>(i), pool.provenance[i]).dump() + "\n";
  return out;
}

std::vector<Solution> read_pool_records(std::string_view text) {
  std::vector<Solution> out;
  std::istringstream in{std::string(text)};
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      out.push_back(solution_from_record(nlohmann::json::parse(line)));
    } catch (const nlohmann::json::exception& e) {
      throw ParseError(lineno, 0, e.what());
    } catch (const Error& e) {
      throw ParseError(lineno, 0, e.what());
    }
  }
  return out;
}

ordered_json config_json(const DivConfig& cfg) {
  ordered_json j;
  j["k"] = cfg.k;
  j["p"] = cfg.p;
  j["h"] = cfg.h;
  j["metric"] = to_string(cfg.metric);
  j["method"] = to_string(cfg.method);
  j["relax_rate"] = cfg.relax_rate;
  j["fail_limit"] = cfg.fail_limit;
  j["time_limit"] = cfg.time_limit;
  j["seed"] = cfg.seed;
  return j;
}

Method parse_method(std::string_view name) {
  if (name == "lns") return Method::LNS;
  if (name == "rs") return Method::RS;
  if (name == "maxdiv") return Method::MaxDiv;
  throw Error("unknown method '" + std::string(name) + "' (expected lns, rs or maxdiv)");
}

Metric parse_metric(std::string_view name) {
  if (name == "hd") return Metric::HD;
  if (name == "ld") return Metric::LD;
  throw Error("unknown metric '" + std::string(name) + "' (expected hd or ld)");
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot read " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::filesystem::path& path, std::string_view text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path.string());
  out << text;
  if (!out) throw Error("write failed for " + path.string());
}

}  // namespace divsched
