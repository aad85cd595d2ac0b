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

#include "qgae/agent.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <sstream>

#include "qgae/dag.hpp"
#include "qgae/error.hpp"

namespace qgae {

// ---------------------------------------------------------------------------
// Abstraction

Abstraction Abstraction::exact() {
  Abstraction a;
  a.cache_ = std::make_shared<std::unordered_map<std::string, StateKey>>();
  return a;
}

Abstraction Abstraction::latent(std::shared_ptr<const DvaeModel> model, double bin_width) {
  if (!model) throw Error(ErrorCode::kInvalidArgument, "latent abstraction needs a model");
  if (!(bin_width > 0)) throw Error(ErrorCode::kInvalidArgument, "bin_width must be positive");
  Abstraction a = exact();
  a.model_ = std::move(model);
  a.bin_width_ = bin_width;
  return a;
}

StateKey Abstraction::operator()(const Circuit& c) const {
  std::string s = state_string(c);
  if (is_exact()) return s;
  const auto it = cache_->find(s);
  if (it != cache_->end()) return it->second;
  StateKey key = latent_key(encode(*model_, to_dag(c)), bin_width_);
  cache_->emplace(std::move(s), key);
  return key;
}

// ---------------------------------------------------------------------------
// QTable

double QTable::get(const StateKey& s, const std::string& action) const {
  const auto it = table_.find(s);
  if (it == table_.end()) return 0.0;
  const auto jt = it->second.find(action);
  return jt == it->second.end() ? 0.0 : jt->second;
}

void QTable::set(const StateKey& s, const std::string& action, double v) {
  if (!std::isfinite(v)) throw Error(ErrorCode::kInvalidArgument, "non-finite Q value");
  table_[s][action] = v;
}

void QTable::touch(const StateKey& s) { table_.try_emplace(s); }

double QTable::max_value(const StateKey& s, std::span<const std::string> actions) const {
  if (actions.empty()) return 0.0;
  const auto it = table_.find(s);
  if (it == table_.end()) return 0.0;
  double best = -INFINITY;
  for (const std::string& a : actions) {
    const auto jt = it->second.find(a);
    best = std::max(best, jt == it->second.end() ? 0.0 : jt->second);
  }
  return best;
}

std::size_t QTable::entry_count() const {
  std::size_t n = 0;
  for (const auto& [s, row] : table_) n += row.size();
  return n;
}

std::string QTable::export_tsv() const {
  std::string out;
  char buf[40];
  for (const auto& [s, row] : table_) {
    for (const auto& [a, v] : row) {
      std::snprintf(buf, sizeof buf, "%.17g", v);
      out += s;
      out += '\t';
      out += a;
      out += '\t';
      out += buf;
      out += '\n';
    }
  }
  return out;
}

QTable QTable::import_tsv(std::string_view text) {
  QTable q;
  std::size_t line_no = 0;
  while (!text.empty()) {
    ++line_no;
    const std::size_t nl = text.find('\n');
    const std::string_view line = text.substr(0, nl);
    text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
    if (line.empty()) continue;
    const std::size_t t1 = line.find('\t');
    const std::size_t t2 = t1 == std::string_view::npos ? t1 : line.find('\t', t1 + 1);
    if (t2 == std::string_view::npos) {
      throw ParseError(static_cast<int>(line_no), 1, "expected three tab-separated fields");
    }
    const std::string value(line.substr(t2 + 1));
    char* end = nullptr;
    const double v = std::strtod(value.c_str(), &end);
    if (value.empty() || end != value.c_str() + value.size()) {
      throw ParseError(static_cast<int>(line_no), static_cast<int>(t2 + 2), "bad value '" + value + "'");
    }
    q.set(std::string(line.substr(0, t1)), std::string(line.substr(t1 + 1, t2 - t1 - 1)), v);
  }
  return q;
}

// ---------------------------------------------------------------------------
// Q-learning

void AgentConfig::validate() const {
  auto fail = [](const std::string& field, const std::string& why) {
    throw Error(ErrorCode::kConfig, "agent." + field + " " + why);
  };
  if (!(learning_rate > 0 && learning_rate <= 1)) fail("learning_rate", "must be in (0, 1]");
  if (!(discount >= 0 && discount < 1)) fail("discount", "must be in [0, 1)");
  if (!(epsilon_min >= 0 && epsilon_min <= epsilon_start && epsilon_start <= 1)) {
    fail("epsilon_start", "and epsilon_min must satisfy 0 <= epsilon_min <= epsilon_start <= 1");
  }
  if (!(epsilon_decay > 0 && epsilon_decay <= 1)) fail("epsilon_decay", "must be in (0, 1]");
  if (max_steps < 0) fail("max_steps", "must be >= 0");
  if (!std::isfinite(step_penalty)) fail("step_penalty", "must be finite");
  if (!std::isfinite(terminal_bonus)) fail("terminal_bonus", "must be finite");
  if (epochs < 0) fail("epochs", "must be >= 0");
}

std::size_t choose_action(const QTable& q, const StateKey& s, std::span<const std::string> keys,
                          double epsilon, std::mt19937_64& rng) {
  if (keys.empty()) throw Error(ErrorCode::kEmpty, "no actions to choose from");
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  if (epsilon > 0 && unit(rng) < epsilon) {
    std::uniform_int_distribution<std::size_t> pick(0, keys.size() - 1);
    return pick(rng);
  }
  std::size_t best = 0;
  double best_v = q.get(s, keys[0]);
  for (std::size_t i = 1; i < keys.size(); ++i) {
    const double v = q.get(s, keys[i]);
    if (v > best_v || (v == best_v && keys[i] < keys[best])) {
      best = i;
      best_v = v;
    }
  }
  return best;
}

double reward(int depth_before, int depth_after, bool done, const AgentConfig& cfg) {
  return static_cast<double>(depth_before - depth_after) - cfg.step_penalty +
         (done ? cfg.terminal_bonus : 0.0);
}

void q_update(QTable& q, const StateKey& s, const std::string& a, double r, const StateKey& next,
              std::span<const std::string> next_actions, const AgentConfig& cfg) {
  const double old = q.get(s, a);
  const double target = r + cfg.discount * q.max_value(next, next_actions);
  q.set(s, a, old + cfg.learning_rate * (target - old));
  q.touch(next);
}

namespace {

std::vector<std::string> keys_of(const std::vector<Action>& actions) {
  std::vector<std::string> keys;
  keys.reserve(actions.size());
  for (const Action& a : actions) keys.push_back(a.key());
  return keys;
}

std::vector<Action> actions_for(const Circuit& c, const AgentConfig& cfg) {
  return cfg.reverse_actions ? enumerate_actions(c) : enumerate_forward_actions(c);
}

bool reached(int d, const AgentConfig& cfg) { return cfg.target_depth > 0 && d <= cfg.target_depth; }

}  // namespace

EpisodeTrace run_episode(const Circuit& start, QTable& q, const Abstraction& abs,
                         const AgentConfig& cfg, std::mt19937_64& rng,
                         const EpisodeOptions& opts) {
  EpisodeTrace tr;
  Circuit c = start;
  int d = depth(c);
  tr.start_depth = tr.final_depth = tr.best_depth = d;
  if (opts.best_circuit) *opts.best_circuit = c;
  StateKey s = abs(c);
  if (opts.learn) q.touch(s);
  if (opts.on_visit) opts.on_visit(s, c);
  if (reached(d, cfg)) {
    tr.done = true;
    return tr;
  }
  std::vector<Action> actions = actions_for(c, cfg);
  std::vector<std::string> keys = keys_of(actions);
  for (int step = 0; step < cfg.max_steps && !actions.empty(); ++step) {
    const std::size_t i = choose_action(q, s, keys, opts.epsilon, rng);
    Circuit next = apply_unchecked(c, actions[i]);
    const int nd = depth(next);
    const bool done = reached(nd, cfg);
    const double r = reward(d, nd, done, cfg);
    StateKey ns = abs(next);
    std::vector<Action> next_actions;
    std::vector<std::string> next_keys;
    if (!done) {
      next_actions = actions_for(next, cfg);
      next_keys = keys_of(next_actions);
    }
    if (opts.learn) q_update(q, s, keys[i], r, ns, next_keys, cfg);
    if (opts.on_visit) opts.on_visit(ns, next);
    tr.steps.push_back({s, keys[i], r, nd});
    if (nd < tr.best_depth) {
      tr.best_depth = nd;
      if (opts.best_circuit) *opts.best_circuit = next;
    }
    c = std::move(next);
    d = nd;
    s = std::move(ns);
    actions = std::move(next_actions);
    keys = std::move(next_keys);
    if (done) {
      tr.done = true;
      break;
    }
  }
  tr.final_depth = d;
  return tr;
}

TrainOutcome train_agent(const Circuit& start, const Abstraction& abs, const AgentConfig& cfg,
                         const std::function<void(const StateKey&, const Circuit&)>& on_visit) {
  cfg.validate();
  start.validate();
  TrainOutcome out;
  std::mt19937_64 rng(cfg.seed);
  double eps = cfg.epsilon_start;
  out.best_depth = depth(start);
  out.best_circuit = start;
  Circuit episode_best;
  for (int e = 0; e < cfg.epochs; ++e) {
    EpisodeOptions opts;
    opts.epsilon = eps;
    opts.on_visit = on_visit;
    opts.best_circuit = &episode_best;
    const EpisodeTrace tr = run_episode(start, out.q, abs, cfg, rng, opts);
    out.episodes.push_back({static_cast<int>(tr.steps.size()), tr.final_depth, tr.best_depth,
                            out.q.state_count()});
    if (tr.best_depth < out.best_depth) {
      out.best_depth = tr.best_depth;
      out.best_circuit = episode_best;
    }
    eps = std::max(cfg.epsilon_min, eps * cfg.epsilon_decay);
  }
  out.state_count = out.q.state_count();
  return out;
}

EpisodeTrace greedy_rollout(const Circuit& start, const QTable& q, const Abstraction& abs,
                            const AgentConfig& cfg, Circuit* final_circuit) {
  std::mt19937_64 rng(0);
  EpisodeOptions opts;
  opts.learn = false;
  Circuit last;
  opts.on_visit = [&](const StateKey&, const Circuit& c) { last = c; };
  // learn = false never writes to the table.
  EpisodeTrace tr = run_episode(start, const_cast<QTable&>(q), abs, cfg, rng, opts);
  if (final_circuit) *final_circuit = last;
  return tr;
}

}  // namespace qgae
