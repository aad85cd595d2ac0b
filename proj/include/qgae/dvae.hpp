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
#include <iosfwd>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "qgae/dag.hpp"
#include "qgae/nn.hpp"

namespace qgae {

struct DvaeConfig {
  int d_h = 32;
  int d_z = 8;
  double alpha = 1.0;        // reconstruction scale
  double gamma = 1.0;        // expected edit-distance scale
  double beta = 0.005;       // KL scale; 0 gives the plain alpha*R + gamma*E loss
  double lr = 5e-3;
  int epochs = 10;
  int batch_size = 16;
  double bin_width = 0.05;   // latent quantisation step for state keys
  int max_decode_nodes = 512;  // larger DAGs are left out of training
  int max_train_dags = 300;  // corpus subsample size; 0 trains on all of it
  std::uint64_t seed = 1;

  /// Throws Error(kConfig) naming the offending field.
  void validate() const;
};

struct Latent {
  nn::Vec mu;
  nn::Vec logvar;
};

inline constexpr int kEndToken = kNumNodeTypes;  // index of END in the type head

/// Encoder, latent heads and decoder parameters.
class DvaeModel {
 public:
  DvaeModel() = default;
  /// Random initialisation from cfg.seed.
  explicit DvaeModel(const DvaeConfig& cfg);

  const DvaeConfig& config() const { return cfg_; }
  int d_h() const { return cfg_.d_h; }
  int d_z() const { return cfg_.d_z; }

  nn::ParamList params();
  std::vector<const nn::Param*> params() const;
  void set_zero();

  void save(std::ostream& os) const;
  void load(std::istream& is);

  // Encoder.
  nn::GruCell enc_gru;
  nn::GatedSum enc_agg;
  nn::GatedSum readout;
  nn::Param mu_w, mu_b, lv_w, lv_b;
  // Decoder.
  nn::Param z_w, z_b;
  nn::GruCell dec_gru;
  nn::GatedSum dec_agg;
  nn::Param type_w, type_b;
  nn::Param edge_wu, edge_wv, edge_b, edge_out, edge_out_b;

 private:
  DvaeConfig cfg_;
};

/// Asynchronous message passing in topological order; the graph embedding
/// is a gated sum over the sink nodes.
Latent encode(const DvaeModel& m, const CircuitDag& d);

nn::Vec reparameterize(const Latent& l, std::mt19937_64& rng);

struct TeacherForcedOutput {
  std::vector<nn::Vec> type_logits;  // one per node plus the final END step
  std::vector<nn::Vec> edge_probs;   // edge_probs[k][u] = P(u -> k), u < k
  std::vector<int> order;            // target node id decoded at each step
};

TeacherForcedOutput decode_teacher_forced(const DvaeModel& m, const nn::Vec& z,
                                          const CircuitDag& target);

struct LossTerms {
  double total = 0;
  double reconstruction = 0;
  double expected_edit = 0;
  double kl = 0;
  double edit_distance = 0;  // discrete, edges thresholded at 0.5
  long correct = 0;          // node types and edge indicators predicted correctly
  long predictions = 0;
};

/// Loss for one DAG with z = mu + exp(logvar/2) * noise. When `grad_scale`
/// is non-zero the gradients of grad_scale * total are added to the
/// parameters' grad buffers.
LossTerms loss(DvaeModel& m, const CircuitDag& d, const nn::Vec& noise, double grad_scale);

struct TrainResult {
  DvaeModel model;
  std::vector<double> epoch_loss;
  std::vector<double> epoch_accuracy;
  std::vector<std::size_t> train_indices;  // dataset entries used, ascending
  std::size_t skipped_oversize = 0;         // entries above max_decode_nodes
};

/// Adam over shuffled mini-batches; deterministic for a fixed cfg.seed.
TrainResult train(std::span<const CircuitDag> dataset, const DvaeConfig& cfg);

/// Teacher-forced accuracy with z = mu.
double reconstruction_accuracy(const DvaeModel& m, std::span<const CircuitDag> dags);

/// Comma-joined floor(mu_i / bin_width).
std::string latent_key(const Latent& l, double bin_width);

/// Free-running generation. With `greedy` the most likely type is taken and
/// edges are thresholded at 0.5 instead of sampled.
CircuitDag decode_sample(const DvaeModel& m, const nn::Vec& z, std::mt19937_64& rng,
                         bool greedy = false);

}  // namespace qgae
