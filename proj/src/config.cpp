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

#include "qgae/config.hpp"

#include <charconv>
#include <fstream>
#include <functional>
#include <sstream>

#include "qgae/error.hpp"

namespace qgae {

namespace {

[[noreturn]] void bad_value(const std::string& key, const std::string& value, const char* want) {
  throw Error(ErrorCode::kConfig,
              "config key '" + key + "': expected " + want + ", got '" + value + "'");
}

template <typename T>
T parse_int(const std::string& key, const std::string& v) {
  T out{};
  const char* end = v.data() + v.size();
  int base = 10;
  const char* begin = v.data();
  if (v.size() > 2 && v[0] == '0' && (v[1] == 'x' || v[1] == 'X')) {
    base = 16;
    begin += 2;
  } else if (v.size() > 2 && v[0] == '0' && (v[1] == 'b' || v[1] == 'B')) {
    base = 2;
    begin += 2;
  }
  const auto [ptr, ec] = std::from_chars(begin, end, out, base);
  if (v.empty() || ec != std::errc() || ptr != end) bad_value(key, v, "an integer");
  return out;
}

double parse_double(const std::string& key, const std::string& v) {
  double out = 0;
  const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (v.empty() || ec != std::errc() || ptr != v.data() + v.size()) bad_value(key, v, "a number");
  return out;
}

bool parse_bool(const std::string& key, const std::string& v) {
  if (v == "true" || v == "1") return true;
  if (v == "false" || v == "0") return false;
  bad_value(key, v, "true or false");
}

std::string fmt_double(double v) {
  char buf[40];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);  // shortest round-trip form
  return std::string(buf, res.ptr);
}

struct Field {
  std::function<void(RunConfig&, const std::string&, const std::string&)> set;
  std::function<std::string(const RunConfig&)> get;
};

template <typename T>
Field int_field(T RunConfig::*outer) {
  return {[outer](RunConfig& c, const std::string& k, const std::string& v) {
            c.*outer = parse_int<T>(k, v);
          },
          [outer](const RunConfig& c) { return std::to_string(c.*outer); }};
}

template <typename S, typename T>
Field int_field(S RunConfig::*outer, T S::*inner) {
  return {[=](RunConfig& c, const std::string& k, const std::string& v) {
            c.*outer.*inner = parse_int<T>(k, v);
          },
          [=](const RunConfig& c) { return std::to_string(c.*outer.*inner); }};
}

template <typename S>
Field double_field(S RunConfig::*outer, double S::*inner) {
  return {[=](RunConfig& c, const std::string& k, const std::string& v) {
            c.*outer.*inner = parse_double(k, v);
          },
          [=](const RunConfig& c) { return fmt_double(c.*outer.*inner); }};
}

// Ordered by key so render_config is canonical.
const std::map<std::string, Field>& fields() {
  static const std::map<std::string, Field> f = {
      {"agent.discount", double_field(&RunConfig::agent, &AgentConfig::discount)},
      {"agent.epochs", int_field(&RunConfig::agent, &AgentConfig::epochs)},
      {"agent.epsilon_decay", double_field(&RunConfig::agent, &AgentConfig::epsilon_decay)},
      {"agent.epsilon_min", double_field(&RunConfig::agent, &AgentConfig::epsilon_min)},
      {"agent.epsilon_start", double_field(&RunConfig::agent, &AgentConfig::epsilon_start)},
      {"agent.learning_rate", double_field(&RunConfig::agent, &AgentConfig::learning_rate)},
      {"agent.max_steps", int_field(&RunConfig::agent, &AgentConfig::max_steps)},
      {"agent.reverse_actions",
       {[](RunConfig& c, const std::string& k, const std::string& v) {
          c.agent.reverse_actions = parse_bool(k, v);
        },
        [](const RunConfig& c) { return std::string(c.agent.reverse_actions ? "true" : "false"); }}},
      {"agent.step_penalty", double_field(&RunConfig::agent, &AgentConfig::step_penalty)},
      {"agent.target_depth", int_field(&RunConfig::agent, &AgentConfig::target_depth)},
      {"agent.terminal_bonus", double_field(&RunConfig::agent, &AgentConfig::terminal_bonus)},
      {"bv.n", int_field(&RunConfig::bv, &BvSpec::n_data)},
      {"bv.secret", int_field(&RunConfig::bv, &BvSpec::secret)},
      {"dvae.alpha", double_field(&RunConfig::dvae, &DvaeConfig::alpha)},
      {"dvae.batch_size", int_field(&RunConfig::dvae, &DvaeConfig::batch_size)},
      {"dvae.beta", double_field(&RunConfig::dvae, &DvaeConfig::beta)},
      {"dvae.bin_width", double_field(&RunConfig::dvae, &DvaeConfig::bin_width)},
      {"dvae.d_h", int_field(&RunConfig::dvae, &DvaeConfig::d_h)},
      {"dvae.d_z", int_field(&RunConfig::dvae, &DvaeConfig::d_z)},
      {"dvae.epochs", int_field(&RunConfig::dvae, &DvaeConfig::epochs)},
      {"dvae.gamma", double_field(&RunConfig::dvae, &DvaeConfig::gamma)},
      {"dvae.lr", double_field(&RunConfig::dvae, &DvaeConfig::lr)},
      {"dvae.max_decode_nodes", int_field(&RunConfig::dvae, &DvaeConfig::max_decode_nodes)},
      {"dvae.max_train_dags", int_field(&RunConfig::dvae, &DvaeConfig::max_train_dags)},
      {"n_seeds", int_field(&RunConfig::n_seeds)},
      {"out_dir",
       {[](RunConfig& c, const std::string&, const std::string& v) { c.out_dir = v; },
        [](const RunConfig& c) { return c.out_dir; }}},
      {"seed", int_field(&RunConfig::seed)},
  };
  return f;
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

}  // namespace

void RunConfig::validate() const {
  try {
    bv.validate();
  } catch (const Error& e) {
    throw Error(ErrorCode::kConfig, std::string("bv: ") + e.what());
  }
  agent.validate();
  dvae.validate();
  if (n_seeds < 1) throw Error(ErrorCode::kConfig, "n_seeds must be >= 1");
}

RunConfig default_config() {
  RunConfig c;
  c.agent.epochs = 0;
  return c;
}

std::vector<std::string> config_keys() {
  std::vector<std::string> out;
  for (const auto& [k, f] : fields()) out.push_back(k);
  return out;
}

void apply_config_value(RunConfig& cfg, const std::string& key, const std::string& value) {
  const auto it = fields().find(key);
  if (it == fields().end()) throw Error(ErrorCode::kConfig, "unknown config key '" + key + "'");
  it->second.set(cfg, key, value);
}

void apply_config_text(RunConfig& cfg, const std::string& text) {
  std::istringstream in(text);
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.resize(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw Error(ErrorCode::kConfig,
                  "config line " + std::to_string(line_no) + ": expected 'key = value'");
    }
    apply_config_value(cfg, trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
  }
}

RunConfig load_config(const std::string& path,
                      const std::vector<std::pair<std::string, std::string>>& overrides) {
  RunConfig cfg = default_config();
  if (!path.empty()) {
    std::ifstream f(path);
    if (!f) throw Error(ErrorCode::kIo, "cannot read config file '" + path + "'");
    std::stringstream ss;
    ss << f.rdbuf();
    apply_config_text(cfg, ss.str());
  }
  for (const auto& [k, v] : overrides) apply_config_value(cfg, k, v);
  if (cfg.agent.epochs == 0) cfg.agent.epochs = RunConfig::default_epochs(cfg.bv.n_data);
  cfg.validate();
  return cfg;
}

std::string render_config(const RunConfig& cfg) {
  std::string out;
  for (const auto& [k, f] : fields()) out += k + " = " + f.get(cfg) + "\n";
  return out;
}

}  // namespace qgae
