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
#include <functional>
#include <map>
#include <memory>
#include <random>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "qgae/circuit.hpp"
#include "qgae/dvae.hpp"
#include "qgae/rewrite.hpp"

namespace qgae {

using StateKey = std::string;

/// Maps circuits to Q-table keys: the exact gate string, or the quantised
/// latent mean of the circuit's DAG under a frozen model. Latent keys are
/// memoised per gate string.
class Abstraction {
 public:
  static Abstraction exact();
  static Abstraction latent(std::shared_ptr<const DvaeModel> model, double bin_width);

  StateKey operator()(const Circuit& c) const;
  bool is_exact() const { return model_ == nullptr; }
  std::size_t cache_size() const { return cache_->size(); }

 private:
  std::shared_ptr<const DvaeModel> model_;
  double bin_width_ = 0;
  std::shared_ptr<std::unordered_map<std::string, StateKey>> cache_;
};

/// StateKey -> action key -> value. Ordered maps keep exports deterministic.
class QTable {
 public:
  double get(const StateKey& s, const std::string& action) const;
  void set(const StateKey& s, const std::string& action, double v);
  /// Registers a state without any action values.
  void touch(const StateKey& s);
  bool contains(const StateKey& s) const { return table_.count(s) != 0; }
  /// Max over the given action keys, missing entries read as 0; 0 if empty.
  double max_value(const StateKey& s, std::span<const std::string> actions) const;
  std::size_t state_count() const { return table_.size(); }
  std::size_t entry_count() const;

  /// `state<TAB>action<TAB>value` lines, values printed round-trippably.
  std::string export_tsv() const;
  static QTable import_tsv(std::string_view text);

  const std::map<StateKey, std::map<std::string, double>>& raw() const { return table_; }

 private:
  std::map<StateKey, std::map<std::string, double>> table_;
};

struct AgentConfig {
  double learning_rate = 0.1;
  double discount = 0.9;
  double epsilon_start = 1.0;
  double epsilon_min = 0.05;
  double epsilon_decay = 0.995;  // per episode
  int max_steps = 50;
  double step_penalty = 0.01;
  double terminal_bonus = 10.0;
  int target_depth = 3;  // <= 0 disables the terminal condition
  /// Also offer the reverse (insertion) templates. Off by default: the extra
  /// insertion sites swamp exploration and BV never reaches its target.
  bool reverse_actions = false;
  int epochs = 3000;
  std::uint64_t seed = 1;

  void validate() const;
};

struct StepRecord {
  StateKey state;
  std::string action;
  double reward = 0;
  int depth = 0;  // after the action
};

struct EpisodeTrace {
  std::vector<StepRecord> steps;
  int start_depth = 0;
  int final_depth = 0;
  int best_depth = 0;
  bool done = false;
};

std::size_t choose_action(const QTable& q, const StateKey& s, std::span<const std::string> keys,
                          double epsilon, std::mt19937_64& rng);

double reward(int depth_before, int depth_after, bool done, const AgentConfig& cfg);

void q_update(QTable& q, const StateKey& s, const std::string& a, double r, const StateKey& next,
              std::span<const std::string> next_actions, const AgentConfig& cfg);

struct EpisodeOptions {
  double epsilon = 0;
  bool learn = true;  // false: act without touching the table
  /// Called with every circuit the episode visits, the start included.
  std::function<void(const StateKey&, const Circuit&)> on_visit;
  /// Receives the best circuit found (lowest depth, earliest on ties).
  Circuit* best_circuit = nullptr;
};

EpisodeTrace run_episode(const Circuit& start, QTable& q, const Abstraction& abs,
                         const AgentConfig& cfg, std::mt19937_64& rng,
                         const EpisodeOptions& opts);

struct EpisodeSummary {
  int steps = 0;
  int final_depth = 0;
  int best_depth = 0;
  std::size_t state_count = 0;  // table size after the episode
};

struct TrainOutcome {
  QTable q;
  std::vector<EpisodeSummary> episodes;
  std::size_t state_count = 0;
  int best_depth = 0;
  Circuit best_circuit;
};

/// cfg.epochs episodes from `start`, epsilon decayed after each.
TrainOutcome train_agent(const Circuit& start, const Abstraction& abs, const AgentConfig& cfg,
                         const std::function<void(const StateKey&, const Circuit&)>& on_visit = {});

/// Epsilon-zero rollout on a trained table without learning.
EpisodeTrace greedy_rollout(const Circuit& start, const QTable& q, const Abstraction& abs,
                            const AgentConfig& cfg, Circuit* final_circuit = nullptr);

}  // namespace qgae
