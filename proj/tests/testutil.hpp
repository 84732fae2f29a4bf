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

#include <filesystem>
#include <string>

#include "divsched/ir.hpp"
#include "divsched/records.hpp"
#include "divsched/target.hpp"

namespace testutil {

inline std::filesystem::path data_dir() { return DIVSCHED_DATA_DIR; }

inline divsched::Program fixture(const std::string& name) {
  return divsched::parse_program(divsched::read_file(data_dir() / "fixtures" / (name + ".ir")));
}

inline divsched::TargetDesc target(const std::string& name) {
  return divsched::load_target(divsched::read_file(data_dir() / "targets" / (name + ".tgt")));
}

}  // namespace testutil
