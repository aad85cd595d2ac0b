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
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "qgae/agent.hpp"
#include "qgae/config.hpp"
#include "qgae/dag.hpp"
#include "qgae/dvae.hpp"

namespace qgae {

/// splitmix64 of (root, stream): independent seeds per run component.
std::uint64_t derive_seed(std::uint64_t root, std::uint64_t stream);

enum SeedStream : std::uint64_t { kAgentStream = 1, kDvaeStream = 2 };

struct BaselineResult {
  BvSpec spec;
  int epochs = 0;
  TrainOutcome outcome;
  std::vector<std::string> corpus_keys;  // exact gate strings, sorted
  std::vector<CircuitDag> corpus;        // corpus[i] is the DAG of corpus_keys[i]
  std::size_t l_s = 0;
};

/// Exact-mode training plus the harvested corpus, one DAG per visited state.
BaselineResult run_baseline(const BvSpec& spec, const AgentConfig& cfg);

/// Trains the encoder on the corpus. With a non-empty `out_dir` the
/// checkpoint (model.ckpt) and metadata sidecar (model.json) are written there.
TrainResult train_encoder_from_corpus(std::span<const CircuitDag> corpus, const DvaeConfig& cfg,
                                      const std::string& out_dir = {});

struct EncodedResult {
  BvSpec spec;
  int epochs = 0;
  TrainOutcome outcome;
  std::size_t l_a = 0;
  std::size_t distinct_circuits = 0;  // circuits encoded during training
};

EncodedResult run_encoded(const BvSpec& spec, std::shared_ptr<const DvaeModel> model,
                          const AgentConfig& cfg);

struct SeedReport {
  std::uint64_t seed = 0;
  std::size_t l_s = 0;
  std::size_t l_a = 0;
  double improvement = 0;  // (l_s - l_a) / l_s
  int best_depth_qasm = 0;
  int best_depth_encoder = 0;
  double reconstruction_accuracy = 0;
  std::vector<EpisodeSummary> trace_qasm;
  std::vector<EpisodeSummary> trace_encoder;
};

/// Pairs the two runs of one seed; throws Error(kInvalidArgument) when they
/// are for different benchmarks or budgets.
SeedReport compare(const BaselineResult& baseline, const EncodedResult& encoded);

double improvement(std::size_t l_s, std::size_t l_a);

struct BenchmarkReport {
  BvSpec spec;
  int epochs = 0;
  std::vector<SeedReport> seeds;
  std::string config_text;  // render_config of the run

  double median_l_s() const;
  double median_l_a() const;
  double median_improvement() const;
  int optimal_seeds(int target_depth, bool encoder) const;
};

/// Runs the three-phase protocol (baseline, encoder training, encoded agent)
/// for cfg.n_seeds seeds. `progress` receives one line per finished phase.
/// With a non-empty `models_dir` each seed's encoder is saved under
/// models_dir/seed-<seed>/.
BenchmarkReport run_protocol(const RunConfig& cfg,
                             const std::function<void(const std::string&)>& progress = {},
                             const std::string& models_dir = {});

std::string states_csv(const BenchmarkReport& r);
std::string depth_trace_csv(const BenchmarkReport& r);
std::string report_text(const BenchmarkReport& r);

/// Writes states.csv, depth_trace.csv, report.txt and config.txt into `dir`.
void write_report(const BenchmarkReport& r, const std::string& dir);

/// `episode,final_depth,best_depth,state_count` rows for a single run.
std::string trace_csv(const std::vector<EpisodeSummary>& trace);

double median(std::vector<double> v);

/// Reads model.json and model.ckpt written by train_encoder_from_corpus.
DvaeModel load_model_dir(const std::string& dir);

struct VerifyReport {
  int circuits = 0;
  long actions = 0;
  long unitary_failures = 0;
  long dag_failures = 0;
  double max_deviation = 0;  // largest entrywise unitary difference seen
  std::vector<std::string> messages;  // first few failures
  bool ok() const { return unitary_failures == 0 && dag_failures == 0; }
};

/// Random circuits (2-4 wires, up to 12 gates): every enumerated action must
/// preserve the unitary within `tol`, and every circuit's DAG must validate.
VerifyReport verify_templates(int circuits, std::uint64_t seed, double tol = 1e-9);

/// Finite-difference check of the full encoder/decoder loss on `dags` random
/// small circuit DAGs; returns the largest relative error.
double gradient_check(int dags, std::uint64_t seed);

}  // namespace qgae
