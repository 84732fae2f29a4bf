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
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "divsched/diversify.hpp"
#include "json.hpp"

namespace divsched {

using ordered_json = nlohmann::ordered_json;

/// One pool record: {"seed", "c", "m", "r", "cost", "index", "iteration", "restarts"}.
ordered_json solution_record(const Solution& s, std::uint64_t seed, int index, const Provenance& prov);

/// Throws Error on missing or mistyped fields.
Solution solution_from_record(const nlohmann::json& rec);

/// Line-delimited records, one per pool member in order. No timing data, so
/// the text is reproducible for fixed inputs.
std::string pool_records(const VariantPool& pool);

/// Throws ParseError naming the offending line.
std::vector<Solution> read_pool_records(std::string_view text);

ordered_json config_json(const DivConfig& cfg);

Method parse_method(std::string_view name);
Metric parse_metric(std::string_view name);

/// Whole-file helpers; throw Error with the path on I/O failure.
std::string read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, std::string_view text);

}  // namespace divsched
