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

#include "qgae/dvae.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "qgae/error.hpp"

namespace qgae {

using nn::Param;
using nn::Tape;
using nn::Vec;

namespace {

void require_positive(double v, const char* field) {
  if (!(v > 0) || !std::isfinite(v)) {
    throw Error(ErrorCode::kConfig, std::string("dvae.") + field + " must be positive");
  }
}

struct DagIndex {
  std::vector<int> order;               // node ids in topological order
  std::vector<int> rank;                // rank[id] = position in order
  std::vector<std::vector<int>> preds;  // by rank, predecessor ranks ascending
};

DagIndex index_dag(const CircuitDag& d) {
  DagIndex ix;
  ix.order = topo_order(d);
  ix.rank.assign(d.nodes.size(), -1);
  for (std::size_t k = 0; k < ix.order.size(); ++k) ix.rank[ix.order[k]] = static_cast<int>(k);
  ix.preds.assign(d.nodes.size(), {});
  for (const DagEdge& e : d.edges) ix.preds[ix.rank[e.dst]].push_back(ix.rank[e.src]);
  for (auto& p : ix.preds) std::sort(p.begin(), p.end());
  return ix;
}

struct EncodeIds {
  Tape::Id mu;
  Tape::Id logvar;
};

EncodeIds encode_on_tape(Tape& t, const DvaeModel& m, const CircuitDag& d) {
  if (d.nodes.empty()) throw Error(ErrorCode::kEmpty, "cannot encode an empty DAG");
  const DagIndex ix = index_dag(d);
  const int n = static_cast<int>(ix.order.size());
  std::vector<Tape::Id> h(n);
  std::vector<bool> has_succ(n, false);
  for (const DagEdge& e : d.edges) has_succ[ix.rank[e.src]] = true;
  std::vector<Tape::Id> sinks;
  for (int k = 0; k < n; ++k) {
    std::vector<Tape::Id> in;
    in.reserve(ix.preds[k].size());
    for (int p : ix.preds[k]) in.push_back(h[p]);
    const Tape::Id msg = m.enc_agg.apply(t, in, m.d_h());
    h[k] = m.enc_gru.step_onehot(t, static_cast<int>(d.nodes[ix.order[k]].type), msg);
    if (!has_succ[k]) sinks.push_back(h[k]);
  }
  const Tape::Id g = m.readout.apply(t, sinks, m.d_h());
  return {t.add(t.matvec(m.mu_w, g), t.param(m.mu_b)),
          t.add(t.matvec(m.lv_w, g), t.param(m.lv_b))};
}

Vec sigm(const Vec& x) {
  return x.unaryExpr([](double v) { return 1.0 / (1.0 + std::exp(-v)); });
}

int argmax(const Vec& v) {
  Eigen::Index i = 0;
  v.maxCoeff(&i);
  return static_cast<int>(i);
}

// Teacher-forced decoder pass. Fills the per-step type logits and edge
// logits ids; the caller decides what to do with them.
struct DecodeIds {
  std::vector<Tape::Id> type_logits;            // n + 1 entries, last is END
  std::vector<Tape::Id> edge_logits;            // entry k has k logits, k >= 1
  std::vector<std::vector<double>> edge_targets;
};

DecodeIds decode_on_tape(Tape& t, const DvaeModel& m, Tape::Id z, const CircuitDag& target,
                         const DagIndex& ix) {
  const int n = static_cast<int>(ix.order.size());
  if (n > m.config().max_decode_nodes) {
    throw Error(ErrorCode::kOutOfRange, "DAG has " + std::to_string(n) +
                                            " nodes, more than max_decode_nodes = " +
                                            std::to_string(m.config().max_decode_nodes));
  }
  DecodeIds out;
  Tape::Id s = t.tanh(t.add(t.matvec(m.z_w, z), t.param(m.z_b)));
  std::vector<Tape::Id> hidden;
  std::vector<Tape::Id> proj;  // edge_wu * h_u
  out.edge_logits.push_back(-1);
  out.edge_targets.emplace_back();
  for (int k = 0; k < n; ++k) {
    const int type = static_cast<int>(target.nodes[ix.order[k]].type);
    out.type_logits.push_back(t.add(t.matvec(m.type_w, s), t.param(m.type_b)));
    if (k > 0) {
      const Tape::Id prov = m.dec_gru.step_onehot(t, type, s);
      const Tape::Id b = t.add(t.matvec(m.edge_wv, prov), t.param(m.edge_b));
      out.edge_logits.push_back(t.edge_logits(proj, b, m.edge_out, m.edge_out_b));
      std::vector<double> tg(k, 0.0);
      for (int p : ix.preds[k]) tg[p] = 1.0;
      out.edge_targets.push_back(std::move(tg));
    }
    Tape::Id in = s;
    if (!ix.preds[k].empty()) {
      std::vector<Tape::Id> ps;
      for (int p : ix.preds[k]) ps.push_back(hidden[p]);
      in = m.dec_agg.apply(t, ps, m.d_h());
    }
    const Tape::Id hk = m.dec_gru.step_onehot(t, type, in);
    hidden.push_back(hk);
    proj.push_back(t.matvec(m.edge_wu, hk));
    s = hk;
  }
  out.type_logits.push_back(t.add(t.matvec(m.type_w, s), t.param(m.type_b)));
  return out;
}

}  // namespace

void DvaeConfig::validate() const {
  require_positive(d_h, "d_h");
  require_positive(d_z, "d_z");
  require_positive(alpha, "alpha");
  require_positive(gamma, "gamma");
  if (!(beta >= 0) || !std::isfinite(beta)) {
    throw Error(ErrorCode::kConfig, "dvae.beta must be non-negative");
  }
  require_positive(lr, "lr");
  require_positive(epochs, "epochs");
  require_positive(batch_size, "batch_size");
  require_positive(bin_width, "bin_width");
  require_positive(max_decode_nodes, "max_decode_nodes");
  if (max_train_dags < 0) throw Error(ErrorCode::kConfig, "dvae.max_train_dags must be >= 0");
}

DvaeModel::DvaeModel(const DvaeConfig& cfg) : cfg_(cfg) {
  cfg.validate();
  const int h = cfg.d_h;
  const int z = cfg.d_z;
  const int types = kNumNodeTypes;
  enc_gru = nn::GruCell("enc.gru", types, h);
  enc_agg = nn::GatedSum("enc.agg", h);
  readout = nn::GatedSum("enc.readout", h);
  mu_w = Param("enc.mu_w", z, h);
  mu_b = Param("enc.mu_b", z, 1);
  lv_w = Param("enc.lv_w", z, h);
  lv_b = Param("enc.lv_b", z, 1);
  z_w = Param("dec.z_w", h, z);
  z_b = Param("dec.z_b", h, 1);
  dec_gru = nn::GruCell("dec.gru", types, h);
  dec_agg = nn::GatedSum("dec.agg", h);
  type_w = Param("dec.type_w", types + 1, h);
  type_b = Param("dec.type_b", types + 1, 1);
  edge_wu = Param("dec.edge_wu", h, h);
  edge_wv = Param("dec.edge_wv", h, h);
  edge_b = Param("dec.edge_b", h, 1);
  edge_out = Param("dec.edge_out", h, 1);
  edge_out_b = Param("dec.edge_out_b", 1, 1);

  std::mt19937_64 rng(cfg.seed);
  for (Param* p : params()) nn::init_uniform(*p, static_cast<double>(p->cols() > 1 ? p->cols() : h), rng);
  // Start with a small posterior variance so early training is not noise-dominated.
  lv_b.value.setConstant(-4.0);
}

nn::ParamList DvaeModel::params() {
  nn::ParamList out;
  enc_gru.collect(out);
  enc_agg.collect(out);
  readout.collect(out);
  for (Param* p : {&mu_w, &mu_b, &lv_w, &lv_b, &z_w, &z_b}) out.push_back(p);
  dec_gru.collect(out);
  dec_agg.collect(out);
  for (Param* p : {&type_w, &type_b, &edge_wu, &edge_wv, &edge_b, &edge_out, &edge_out_b}) {
    out.push_back(p);
  }
  return out;
}

std::vector<const Param*> DvaeModel::params() const {
  const auto list = const_cast<DvaeModel*>(this)->params();
  return {list.begin(), list.end()};
}

void DvaeModel::set_zero() {
  for (Param* p : params()) p->value.setZero();
}

void DvaeModel::save(std::ostream& os) const { nn::write_checkpoint(os, params()); }

void DvaeModel::load(std::istream& is) { nn::read_checkpoint(is, params()); }

Latent encode(const DvaeModel& m, const CircuitDag& d) {
  // Same computation as encode_on_tape, evaluated directly without recording.
  if (d.nodes.empty()) throw Error(ErrorCode::kEmpty, "cannot encode an empty DAG");
  const DagIndex ix = index_dag(d);
  const int n = static_cast<int>(ix.order.size());
  std::vector<Vec> h(n);
  std::vector<bool> has_succ(n, false);
  for (const DagEdge& e : d.edges) has_succ[ix.rank[e.src]] = true;
  std::vector<Vec> in;
  std::vector<Vec> sinks;
  Vec x = Vec::Zero(kNumNodeTypes);
  for (int k = 0; k < n; ++k) {
    in.clear();
    for (int p : ix.preds[k]) in.push_back(h[p]);
    const Vec msg = nn::gated_sum(m.enc_agg.gate.value, m.enc_agg.map.value, in, m.d_h());
    const int type = static_cast<int>(d.nodes[ix.order[k]].type);
    x[type] = 1.0;
    h[k] = nn::gru_step(m.enc_gru, x, msg);
    x[type] = 0.0;
    if (!has_succ[k]) sinks.push_back(h[k]);
  }
  const Vec g = nn::gated_sum(m.readout.gate.value, m.readout.map.value, sinks, m.d_h());
  return {m.mu_w.value * g + m.mu_b.value.col(0), m.lv_w.value * g + m.lv_b.value.col(0)};
}

Vec reparameterize(const Latent& l, std::mt19937_64& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  Vec noise(l.mu.size());
  for (Eigen::Index i = 0; i < noise.size(); ++i) noise[i] = normal(rng);
  return l.mu + (0.5 * l.logvar.array()).exp().matrix().cwiseProduct(noise);
}

TeacherForcedOutput decode_teacher_forced(const DvaeModel& m, const Vec& z,
                                          const CircuitDag& target) {
  if (z.size() != m.d_z()) throw Error(ErrorCode::kDimension, "latent has the wrong dimension");
  const DagIndex ix = index_dag(target);
  Tape t;
  const DecodeIds ids = decode_on_tape(t, m, t.input(z), target, ix);
  TeacherForcedOutput out;
  out.order = ix.order;
  for (Tape::Id id : ids.type_logits) out.type_logits.push_back(t.value(id));
  out.edge_probs.emplace_back();
  for (std::size_t k = 1; k < ids.edge_logits.size(); ++k) {
    out.edge_probs.push_back(sigm(t.value(ids.edge_logits[k])));
  }
  return out;
}

namespace {

LossTerms loss_impl(DvaeModel& m, const CircuitDag& d, const Vec* noise, double grad_scale) {
  const DvaeConfig& cfg = m.config();
  const DagIndex ix = index_dag(d);
  Tape t;
  const EncodeIds enc = encode_on_tape(t, m, d);
  const Tape::Id z = noise ? t.reparameterize(enc.mu, enc.logvar, *noise) : enc.mu;
  const DecodeIds dec = decode_on_tape(t, m, z, d, ix);

  LossTerms out;
  std::vector<Tape::Id> recon;
  std::vector<Tape::Id> edit;
  const int n = static_cast<int>(ix.order.size());
  for (int k = 0; k <= n; ++k) {
    const int type = k < n ? static_cast<int>(d.nodes[ix.order[k]].type) : kEndToken;
    recon.push_back(t.softmax_xent(dec.type_logits[k], type));
    out.correct += argmax(t.value(dec.type_logits[k])) == type;
    ++out.predictions;
  }
  for (int k = 1; k < n; ++k) {
    const auto& tg = dec.edge_targets[k];
    recon.push_back(t.bce_logits(dec.edge_logits[k], tg));
    edit.push_back(t.expected_abs_error(dec.edge_logits[k], tg));
    const Vec& l = t.value(dec.edge_logits[k]);
    for (int u = 0; u < k; ++u) {
      const bool predicted = l[u] > 0.0;
      const bool actual = tg[u] > 0.5;
      out.correct += predicted == actual;
      out.edit_distance += predicted != actual;
      ++out.predictions;
    }
  }
  const Tape::Id r = t.sum(recon, 1);
  const Tape::Id e = t.sum(edit, 1);
  const Tape::Id kl = t.kl_standard_normal(enc.mu, enc.logvar);
  const std::vector<Tape::Id> parts = {t.scale(r, cfg.alpha), t.scale(e, cfg.gamma),
                                       t.scale(kl, cfg.beta)};
  const Tape::Id total = t.sum(parts, 1);
  out.reconstruction = t.scalar(r);
  out.expected_edit = t.scalar(e);
  out.kl = t.scalar(kl);
  out.total = t.scalar(total);
  if (grad_scale != 0.0) t.backward(total, grad_scale);
  return out;
}

}  // namespace

LossTerms loss(DvaeModel& m, const CircuitDag& d, const Vec& noise, double grad_scale) {
  if (noise.size() != m.d_z()) throw Error(ErrorCode::kDimension, "noise has the wrong dimension");
  return loss_impl(m, d, &noise, grad_scale);
}

TrainResult train(std::span<const CircuitDag> dataset, const DvaeConfig& cfg) {
  cfg.validate();
  if (dataset.empty()) throw Error(ErrorCode::kEmpty, "cannot train on an empty dataset");
  TrainResult res;
  res.model = DvaeModel(cfg);
  DvaeModel& m = res.model;
  std::mt19937_64 rng(cfg.seed ^ 0x9e3779b97f4a7c15ULL);
  std::normal_distribution<double> normal(0.0, 1.0);

  std::vector<std::size_t> pool;
  for (std::size_t i = 0; i < dataset.size(); ++i) {
    if (dataset[i].nodes.size() <= static_cast<std::size_t>(cfg.max_decode_nodes)) {
      pool.push_back(i);
    } else {
      ++res.skipped_oversize;
    }
  }
  if (pool.empty()) throw Error(ErrorCode::kEmpty, "every DAG exceeds max_decode_nodes");
  if (cfg.max_train_dags > 0 && pool.size() > static_cast<std::size_t>(cfg.max_train_dags)) {
    std::shuffle(pool.begin(), pool.end(), rng);
    pool.resize(cfg.max_train_dags);
    std::sort(pool.begin(), pool.end());
  }
  res.train_indices = pool;

  const nn::ParamList params = m.params();
  nn::Adam adam({.lr = cfg.lr});
  Vec noise(cfg.d_z);
  for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
    std::shuffle(pool.begin(), pool.end(), rng);
    double loss_sum = 0;
    long correct = 0;
    long total = 0;
    for (std::size_t start = 0; start < pool.size(); start += cfg.batch_size) {
      const std::size_t end = std::min(pool.size(), start + cfg.batch_size);
      nn::zero_grads(params);
      for (std::size_t i = start; i < end; ++i) {
        for (Eigen::Index j = 0; j < noise.size(); ++j) noise[j] = normal(rng);
        const LossTerms lt =
            loss_impl(m, dataset[pool[i]], &noise, 1.0 / static_cast<double>(end - start));
        loss_sum += lt.total;
        correct += lt.correct;
        total += lt.predictions;
      }
      adam.step(params);
    }
    res.epoch_loss.push_back(loss_sum / static_cast<double>(pool.size()));
    res.epoch_accuracy.push_back(total ? static_cast<double>(correct) / total : 1.0);
    if (!std::isfinite(res.epoch_loss.back())) {
      throw Error(ErrorCode::kInternal, "training diverged at epoch " + std::to_string(epoch));
    }
  }
  return res;
}

double reconstruction_accuracy(const DvaeModel& m, std::span<const CircuitDag> dags) {
  long correct = 0;
  long total = 0;
  auto& mm = const_cast<DvaeModel&>(m);  // grad_scale 0 leaves the model untouched
  for (const CircuitDag& d : dags) {
    const LossTerms lt = loss_impl(mm, d, nullptr, 0.0);
    correct += lt.correct;
    total += lt.predictions;
  }
  return total ? static_cast<double>(correct) / total : 1.0;
}

std::string latent_key(const Latent& l, double bin_width) {
  if (!(bin_width > 0)) throw Error(ErrorCode::kInvalidArgument, "bin_width must be positive");
  std::ostringstream os;
  for (Eigen::Index i = 0; i < l.mu.size(); ++i) {
    if (!std::isfinite(l.mu[i])) throw Error(ErrorCode::kInvalidArgument, "non-finite latent mean");
    if (i) os << ',';
    os << static_cast<long long>(std::floor(l.mu[i] / bin_width));
  }
  return os.str();
}

CircuitDag decode_sample(const DvaeModel& m, const Vec& z, std::mt19937_64& rng, bool greedy) {
  if (z.size() != m.d_z()) throw Error(ErrorCode::kDimension, "latent has the wrong dimension");
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  CircuitDag out;
  out.n_wires = 0;
  Tape t;
  Tape::Id s = t.tanh(t.add(t.matvec(m.z_w, t.input(z)), t.param(m.z_b)));
  std::vector<Tape::Id> hidden;
  std::vector<Tape::Id> proj;
  for (int k = 0; k < m.config().max_decode_nodes; ++k) {
    const Vec logits = t.value(t.add(t.matvec(m.type_w, s), t.param(m.type_b)));
    int type = 0;
    if (greedy) {
      type = argmax(logits);
    } else {
      Vec p = (logits.array() - logits.maxCoeff()).exp().matrix();
      std::discrete_distribution<int> pick(p.data(), p.data() + p.size());
      type = pick(rng);
    }
    if (type == kEndToken) break;
    std::vector<int> preds;
    if (k > 0) {
      const Tape::Id prov = m.dec_gru.step_onehot(t, type, s);
      const Tape::Id b = t.add(t.matvec(m.edge_wv, prov), t.param(m.edge_b));
      const Vec probs = sigm(t.value(t.edge_logits(proj, b, m.edge_out, m.edge_out_b)));
      for (int u = 0; u < k; ++u) {
        if (greedy ? probs[u] > 0.5 : unit(rng) < probs[u]) preds.push_back(u);
      }
    }
    const int id = out.add_node(static_cast<NodeType>(type), 0, k);
    for (int u : preds) out.add_edge(u, id, 0);
    Tape::Id in = s;
    if (!preds.empty()) {
      std::vector<Tape::Id> ps;
      for (int u : preds) ps.push_back(hidden[u]);
      in = m.dec_agg.apply(t, ps, m.d_h());
    }
    const Tape::Id hk = m.dec_gru.step_onehot(t, type, in);
    hidden.push_back(hk);
    proj.push_back(t.matvec(m.edge_wu, hk));
    s = hk;
  }
  return out;
}

}  // namespace qgae
