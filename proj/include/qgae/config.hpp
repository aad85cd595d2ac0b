// Copyright 2026 The qgae Authors
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
#include <map>
#include <string>
#include <vector>

#include "qgae/agent.hpp"
#include "qgae/circuit.hpp"
#include "qgae/dvae.hpp"

namespace qgae {

/// Fully resolved settings for one run.
struct RunConfig {
  BvSpec bv{2, 3};
  AgentConfig agent;  // agent.epochs == 0 means default_epochs(bv.n_data)
  DvaeConfig dvae;
  int n_seeds = 5;
  std::uint64_t seed = 1;  // root seed; per-seed cells derive from it
  std::string out_dir = "runs";

  /// Episode budget per BV size when `epochs` is not set: 1000 * (n + 1).
  static int default_epochs(int n_data) { return 1000 * (n_data + 1); }
  void validate() const;
};

/// Defaults for every key (agent.epochs follows bv.n).
RunConfig default_config();

/// Flat `key = value` lines, `#` comments. Later assignments win. Throws
/// Error(kConfig) naming the key on unknown keys or unparsable values.
void apply_config_text(RunConfig& cfg, const std::string& text);
void apply_config_value(RunConfig& cfg, const std::string& key, const std::string& value);

/// defaults <- file (if non-empty path) <- overrides, in that order; then
/// resolves a zero epoch budget and validates.
RunConfig load_config(const std::string& path,
                      const std::vector<std::pair<std::string, std::string>>& overrides);

/// Canonical `key = value` rendering of every key; feeding it back through
/// apply_config_text reproduces `cfg` exactly.
std::string render_config(const RunConfig& cfg);

std::vector<std::string> config_keys();

}  // namespace qgae
