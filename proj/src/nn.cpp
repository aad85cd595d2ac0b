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

#include "qgae/nn.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>

#include "qgae/error.hpp"

namespace qgae::nn {

namespace {

double sigm(double x) { return 1.0 / (1.0 + std::exp(-x)); }

Vec sigm(const Vec& x) {
  return x.unaryExpr([](double v) { return sigm(v); });
}

void require_dim(Eigen::Index got, Eigen::Index want, const char* what) {
  if (got != want) {
    throw Error(ErrorCode::kDimension, std::string(what) + ": expected dimension " +
                                           std::to_string(want) + ", got " +
                                           std::to_string(got));
  }
}

}  // namespace

void init_uniform(Param& p, double fan_in, std::mt19937_64& rng) {
  const double bound = 1.0 / std::sqrt(fan_in);
  std::uniform_real_distribution<double> u(-bound, bound);
  for (Eigen::Index i = 0; i < p.value.size(); ++i) p.value.data()[i] = u(rng);
}

void zero_grads(const ParamList& params) {
  for (Param* p : params) p->zero_grad();
}

// ---------------------------------------------------------------------------
// Tape

Tape::Id Tape::push(Node n) {
  nodes_.push_back(std::move(n));
  return static_cast<Id>(nodes_.size()) - 1;
}

Tape::Id Tape::input(Vec v) { return push({Op::kInput, std::move(v), {}}); }

Tape::Id Tape::zeros(Eigen::Index dim) { return input(Vec::Zero(dim)); }

Tape::Id Tape::param(const Param& p) {
  require_dim(p.cols(), 1, "vector parameter");
  Node n{Op::kParam, p.value.col(0), {}};
  n.p = const_cast<Param*>(&p);
  return push(std::move(n));
}

Tape::Id Tape::matvec(const Param& w, Id x) {
  require_dim(value(x).size(), w.cols(), "matvec");
  Node n{Op::kMatVec, w.value * value(x), {}};
  n.p = const_cast<Param*>(&w);
  n.a = x;
  return push(std::move(n));
}

Tape::Id Tape::column(const Param& w, int col) {
  if (col < 0 || col >= w.cols()) {
    throw Error(ErrorCode::kDimension, "column index out of range");
  }
  Node n{Op::kColumn, w.value.col(col), {}};
  n.p = const_cast<Param*>(&w);
  n.list = col;
  return push(std::move(n));
}

Tape::Id Tape::add(Id a, Id b) {
  require_dim(value(b).size(), value(a).size(), "add");
  Node n{Op::kAdd, value(a) + value(b), {}};
  n.a = a;
  n.b = b;
  return push(std::move(n));
}

Tape::Id Tape::mul(Id a, Id b) {
  require_dim(value(b).size(), value(a).size(), "mul");
  Node n{Op::kMul, value(a).cwiseProduct(value(b)), {}};
  n.a = a;
  n.b = b;
  return push(std::move(n));
}

Tape::Id Tape::sigmoid(Id a) {
  Node n{Op::kSigmoid, sigm(value(a)), {}};
  n.a = a;
  return push(std::move(n));
}

Tape::Id Tape::tanh(Id a) {
  Node n{Op::kTanh, value(a).array().tanh().matrix(), {}};
  n.a = a;
  return push(std::move(n));
}

Tape::Id Tape::one_minus(Id a) {
  Node n{Op::kOneMinus, (1.0 - value(a).array()).matrix(), {}};
  n.a = a;
  return push(std::move(n));
}

Tape::Id Tape::scale(Id a, double s) {
  Node n{Op::kScale, value(a) * s, {}};
  n.a = a;
  n.s = s;
  return push(std::move(n));
}

Tape::Id Tape::sum(std::span<const Id> xs, Eigen::Index dim) {
  Vec acc = Vec::Zero(xs.empty() ? dim : value(xs[0]).size());
  for (Id x : xs) {
    require_dim(value(x).size(), acc.size(), "sum");
    acc += value(x);
  }
  Node n{Op::kSum, std::move(acc), {}};
  n.list = static_cast<int>(lists_.size());
  lists_.emplace_back(xs.begin(), xs.end());
  return push(std::move(n));
}

Tape::Id Tape::reparameterize(Id mu, Id logvar, const Vec& noise) {
  require_dim(value(logvar).size(), value(mu).size(), "reparameterize");
  require_dim(noise.size(), value(mu).size(), "reparameterize noise");
  Vec z = value(mu) + (0.5 * value(logvar).array()).exp().matrix().cwiseProduct(noise);
  Node n{Op::kReparam, std::move(z), {}};
  n.a = mu;
  n.b = logvar;
  n.list = static_cast<int>(data_.size());
  data_.push_back(noise);
  return push(std::move(n));
}

Tape::Id Tape::softmax_xent(Id logits, int target) {
  const Vec& l = value(logits);
  if (target < 0 || target >= l.size()) {
    throw Error(ErrorCode::kDimension, "softmax target out of range");
  }
  const double mx = l.maxCoeff();
  const double lse = mx + std::log((l.array() - mx).exp().sum());
  Node n{Op::kSoftmaxXent, Vec::Constant(1, lse - l[target]), {}};
  n.a = logits;
  n.list = target;
  return push(std::move(n));
}

Tape::Id Tape::bce_logits(Id logits, std::vector<double> targets) {
  const Vec& l = value(logits);
  require_dim(static_cast<Eigen::Index>(targets.size()), l.size(), "bce targets");
  double loss = 0;
  for (Eigen::Index k = 0; k < l.size(); ++k) {
    const double x = l[k];
    loss += std::max(x, 0.0) - x * targets[k] + std::log1p(std::exp(-std::abs(x)));
  }
  Node n{Op::kBce, Vec::Constant(1, loss), {}};
  n.a = logits;
  n.list = static_cast<int>(data_.size());
  data_.push_back(Eigen::Map<const Vec>(targets.data(), l.size()));
  return push(std::move(n));
}

Tape::Id Tape::expected_abs_error(Id logits, std::vector<double> targets) {
  const Vec& l = value(logits);
  require_dim(static_cast<Eigen::Index>(targets.size()), l.size(), "edit targets");
  double loss = 0;
  for (Eigen::Index k = 0; k < l.size(); ++k) loss += std::abs(sigm(l[k]) - targets[k]);
  Node n{Op::kAbsErr, Vec::Constant(1, loss), {}};
  n.a = logits;
  n.list = static_cast<int>(data_.size());
  data_.push_back(Eigen::Map<const Vec>(targets.data(), l.size()));
  return push(std::move(n));
}

Tape::Id Tape::kl_standard_normal(Id mu, Id logvar) {
  const Vec& m = value(mu);
  const Vec& lv = value(logvar);
  require_dim(lv.size(), m.size(), "kl");
  const double kl = 0.5 * (m.array().square() + lv.array().exp() - 1.0 - lv.array()).sum();
  Node n{Op::kKl, Vec::Constant(1, kl), {}};
  n.a = mu;
  n.b = logvar;
  return push(std::move(n));
}

Tape::Id Tape::edge_logits(std::span<const Id> a, Id b, const Param& w2, const Param& b2) {
  const Vec& bv = value(b);
  require_dim(w2.rows(), bv.size(), "edge head");
  const auto k = static_cast<Eigen::Index>(a.size());
  Mat t(bv.size(), k);
  for (Eigen::Index j = 0; j < k; ++j) t.col(j) = value(a[j]) + bv;
  t = t.array().tanh().matrix();
  Vec out = (t.transpose() * w2.value.col(0)).array() + b2.value(0, 0);
  Node n{Op::kEdge, std::move(out), {}};
  n.b = b;
  n.p = const_cast<Param*>(&w2);
  n.q = const_cast<Param*>(&b2);
  n.list = static_cast<int>(lists_.size());
  lists_.emplace_back(a.begin(), a.end());
  n.s = static_cast<double>(mats_.size());
  mats_.push_back(std::move(t));
  return push(std::move(n));
}

Tape::Id Tape::gru(const GruCell& c, Id x, int onehot, Id h) {
  const Vec& hv = value(h);
  require_dim(hv.size(), c.hidden_dim(), "gru hidden");
  const Eigen::Index d = hv.size();
  Vec xz, xr, xh;
  if (onehot >= 0) {
    if (onehot >= c.input_dim()) throw Error(ErrorCode::kDimension, "gru one-hot index out of range");
    xz = c.wz.value.col(onehot);
    xr = c.wr.value.col(onehot);
    xh = c.wh.value.col(onehot);
  } else {
    const Vec& xv = value(x);
    require_dim(xv.size(), c.input_dim(), "gru input");
    xz = c.wz.value * xv;
    xr = c.wr.value * xv;
    xh = c.wh.value * xv;
  }
  // Columns: z, r, candidate.
  Mat gates(d, 3);
  gates.col(0) = sigm(xz + c.uz.value * hv + c.bz.value.col(0));
  gates.col(1) = sigm(xr + c.ur.value * hv + c.br.value.col(0));
  gates.col(2) =
      (xh + c.uh.value * gates.col(1).cwiseProduct(hv) + c.bh.value.col(0)).array().tanh().matrix();
  Vec out = hv + gates.col(0).cwiseProduct(gates.col(2) - hv);
  Node n{Op::kGru, std::move(out), {}};
  n.a = onehot >= 0 ? -1 : x;
  n.b = h;
  n.layer = &c;
  n.list = onehot;
  n.s = static_cast<double>(mats_.size());
  mats_.push_back(std::move(gates));
  return push(std::move(n));
}

Tape::Id Tape::gated_sum(const GatedSum& g, std::span<const Id> hs, Eigen::Index dim) {
  Vec acc = Vec::Zero(hs.empty() ? dim : g.gate.rows());
  // Columns 2i and 2i+1 hold sigmoid(A h_i) and tanh(B h_i).
  Mat parts(acc.size(), 2 * static_cast<Eigen::Index>(hs.size()));
  for (std::size_t i = 0; i < hs.size(); ++i) {
    const Vec& h = value(hs[i]);
    require_dim(h.size(), g.gate.cols(), "gated_sum input");
    const auto j = 2 * static_cast<Eigen::Index>(i);
    parts.col(j) = sigm(g.gate.value * h);
    parts.col(j + 1) = (g.map.value * h).array().tanh().matrix();
    acc += parts.col(j).cwiseProduct(parts.col(j + 1));
  }
  Node n{Op::kGatedSum, std::move(acc), {}};
  n.layer = &g;
  n.list = static_cast<int>(lists_.size());
  lists_.emplace_back(hs.begin(), hs.end());
  n.s = static_cast<double>(mats_.size());
  mats_.push_back(std::move(parts));
  return push(std::move(n));
}

void Tape::backward(Id out, double seed) {
  for (Node& n : nodes_) n.grad = Vec::Zero(n.value.size());
  nodes_[out].grad.setConstant(seed);
  for (Id i = out; i >= 0; --i) {
    Node& n = nodes_[i];
    const Vec& g = n.grad;
    if (g.isZero(0.0)) continue;
    switch (n.op) {
      case Op::kInput:
        break;
      case Op::kParam:
        n.p->grad.col(0) += g;
        break;
      case Op::kMatVec:
        n.p->grad.noalias() += g * value(n.a).transpose();
        nodes_[n.a].grad.noalias() += n.p->value.transpose() * g;
        break;
      case Op::kColumn:
        n.p->grad.col(n.list) += g;
        break;
      case Op::kAdd:
        nodes_[n.a].grad += g;
        nodes_[n.b].grad += g;
        break;
      case Op::kMul:
        nodes_[n.a].grad += g.cwiseProduct(value(n.b));
        nodes_[n.b].grad += g.cwiseProduct(value(n.a));
        break;
      case Op::kSigmoid:
        nodes_[n.a].grad +=
            g.cwiseProduct(n.value.cwiseProduct((1.0 - n.value.array()).matrix()));
        break;
      case Op::kTanh:
        nodes_[n.a].grad += g.cwiseProduct((1.0 - n.value.array().square()).matrix());
        break;
      case Op::kOneMinus:
        nodes_[n.a].grad -= g;
        break;
      case Op::kScale:
        nodes_[n.a].grad += n.s * g;
        break;
      case Op::kSum:
        for (Id x : lists_[n.list]) nodes_[x].grad += g;
        break;
      case Op::kReparam: {
        const Vec& noise = data_[n.list];
        nodes_[n.a].grad += g;
        const Vec half = (0.5 * value(n.b).array()).exp().matrix();
        nodes_[n.b].grad += 0.5 * g.cwiseProduct(half).cwiseProduct(noise);
        break;
      }
      case Op::kSoftmaxXent: {
        const Vec& l = value(n.a);
        const double mx = l.maxCoeff();
        Vec p = (l.array() - mx).exp().matrix();
        p /= p.sum();
        p[n.list] -= 1.0;
        nodes_[n.a].grad += g[0] * p;
        break;
      }
      case Op::kBce: {
        const Vec& l = value(n.a);
        const Vec& t = data_[n.list];
        nodes_[n.a].grad += g[0] * (sigm(l) - t);
        break;
      }
      case Op::kAbsErr: {
        const Vec& l = value(n.a);
        const Vec& t = data_[n.list];
        Vec d(l.size());
        for (Eigen::Index k = 0; k < l.size(); ++k) {
          const double p = sigm(l[k]);
          const double sign = p > t[k] ? 1.0 : (p < t[k] ? -1.0 : 0.0);
          d[k] = sign * p * (1.0 - p);
        }
        nodes_[n.a].grad += g[0] * d;
        break;
      }
      case Op::kKl:
        nodes_[n.a].grad += g[0] * value(n.a);
        nodes_[n.b].grad += g[0] * 0.5 * (value(n.b).array().exp() - 1.0).matrix();
        break;
      case Op::kEdge: {
        const Mat& t = mats_[static_cast<std::size_t>(n.s)];
        const auto& as = lists_[n.list];
        n.p->grad.col(0).noalias() += t * g;
        n.q->grad(0, 0) += g.sum();
        const Mat pre =
            (n.p->value.col(0) * g.transpose()).cwiseProduct((1.0 - t.array().square()).matrix());
        nodes_[n.b].grad += pre.rowwise().sum();
        for (std::size_t k = 0; k < as.size(); ++k) {
          nodes_[as[k]].grad += pre.col(static_cast<Eigen::Index>(k));
        }
        break;
      }
      case Op::kGru: {
        auto& c = *const_cast<GruCell*>(static_cast<const GruCell*>(n.layer));
        const Mat& gates = mats_[static_cast<std::size_t>(n.s)];
        const Vec& h = value(n.b);
        const auto z = gates.col(0);
        const auto r = gates.col(1);
        const auto cand = gates.col(2);
        const Vec rh = r.cwiseProduct(h);
        const Vec da_c = g.cwiseProduct(z).cwiseProduct((1.0 - cand.array().square()).matrix());
        const Vec da_z =
            g.cwiseProduct(cand - h).cwiseProduct(z.cwiseProduct((1.0 - z.array()).matrix()));
        const Vec d_rh = c.uh.value.transpose() * da_c;
        const Vec da_r =
            d_rh.cwiseProduct(h).cwiseProduct(r.cwiseProduct((1.0 - r.array()).matrix()));
        c.uh.grad.noalias() += da_c * rh.transpose();
        c.uz.grad.noalias() += da_z * h.transpose();
        c.ur.grad.noalias() += da_r * h.transpose();
        c.bh.grad.col(0) += da_c;
        c.bz.grad.col(0) += da_z;
        c.br.grad.col(0) += da_r;
        Vec dh = g.cwiseProduct((1.0 - z.array()).matrix()) + d_rh.cwiseProduct(r);
        dh.noalias() += c.uz.value.transpose() * da_z;
        dh.noalias() += c.ur.value.transpose() * da_r;
        nodes_[n.b].grad += dh;
        if (n.list >= 0) {
          c.wz.grad.col(n.list) += da_z;
          c.wr.grad.col(n.list) += da_r;
          c.wh.grad.col(n.list) += da_c;
        } else {
          const Vec& x = value(n.a);
          c.wz.grad.noalias() += da_z * x.transpose();
          c.wr.grad.noalias() += da_r * x.transpose();
          c.wh.grad.noalias() += da_c * x.transpose();
          Vec& dx = nodes_[n.a].grad;
          dx.noalias() += c.wz.value.transpose() * da_z;
          dx.noalias() += c.wr.value.transpose() * da_r;
          dx.noalias() += c.wh.value.transpose() * da_c;
        }
        break;
      }
      case Op::kGatedSum: {
        auto& gs = *const_cast<GatedSum*>(static_cast<const GatedSum*>(n.layer));
        const Mat& parts = mats_[static_cast<std::size_t>(n.s)];
        const auto& hs = lists_[n.list];
        for (std::size_t i = 0; i < hs.size(); ++i) {
          const auto j = 2 * static_cast<Eigen::Index>(i);
          const auto sg = parts.col(j);
          const auto th = parts.col(j + 1);
          const Vec da = g.cwiseProduct(th).cwiseProduct(sg.cwiseProduct((1.0 - sg.array()).matrix()));
          const Vec db = g.cwiseProduct(sg).cwiseProduct((1.0 - th.array().square()).matrix());
          const Vec& h = value(hs[i]);
          gs.gate.grad.noalias() += da * h.transpose();
          gs.map.grad.noalias() += db * h.transpose();
          Vec& dh = nodes_[hs[i]].grad;
          dh.noalias() += gs.gate.value.transpose() * da;
          dh.noalias() += gs.map.value.transpose() * db;
        }
        break;
      }
    }
  }
}

// ---------------------------------------------------------------------------
// Layers

GruCell::GruCell(const std::string& prefix, int d_x, int d_h)
    : wz(prefix + ".wz", d_h, d_x), uz(prefix + ".uz", d_h, d_h), bz(prefix + ".bz", d_h, 1),
      wr(prefix + ".wr", d_h, d_x), ur(prefix + ".ur", d_h, d_h), br(prefix + ".br", d_h, 1),
      wh(prefix + ".wh", d_h, d_x), uh(prefix + ".uh", d_h, d_h), bh(prefix + ".bh", d_h, 1) {}

void GruCell::init(std::mt19937_64& rng) {
  const double fan = hidden_dim();
  for (Param* p : {&wz, &uz, &bz, &wr, &ur, &br, &wh, &uh, &bh}) init_uniform(*p, fan, rng);
}

void GruCell::collect(ParamList& out) {
  for (Param* p : {&wz, &uz, &bz, &wr, &ur, &br, &wh, &uh, &bh}) out.push_back(p);
}

Tape::Id GruCell::step(Tape& t, Tape::Id x, Tape::Id h) const { return t.gru(*this, x, -1, h); }

Tape::Id GruCell::step_onehot(Tape& t, int index, Tape::Id h) const {
  return t.gru(*this, -1, index, h);
}

Vec gru_step(const GruCell& c, const Vec& x, const Vec& h) {
  require_dim(x.size(), c.input_dim(), "gru input");
  require_dim(h.size(), c.hidden_dim(), "gru hidden");
  const Vec z = sigm(c.wz.value * x + c.uz.value * h + c.bz.value.col(0));
  const Vec r = sigm(c.wr.value * x + c.ur.value * h + c.br.value.col(0));
  const Vec cand = (c.wh.value * x + c.uh.value * r.cwiseProduct(h) + c.bh.value.col(0))
                       .array()
                       .tanh()
                       .matrix();
  return (1.0 - z.array()).matrix().cwiseProduct(h) + z.cwiseProduct(cand);
}

GatedSum::GatedSum(const std::string& prefix, int d_h)
    : gate(prefix + ".gate", d_h, d_h), map(prefix + ".map", d_h, d_h) {}

void GatedSum::init(std::mt19937_64& rng) {
  init_uniform(gate, static_cast<double>(gate.cols()), rng);
  init_uniform(map, static_cast<double>(map.cols()), rng);
}

void GatedSum::collect(ParamList& out) {
  out.push_back(&gate);
  out.push_back(&map);
}

Tape::Id GatedSum::apply(Tape& t, std::span<const Tape::Id> hs, Eigen::Index dim) const {
  return t.gated_sum(*this, hs, dim);
}

Vec gated_sum(const Mat& a, const Mat& b, std::span<const Vec> hs, Eigen::Index dim) {
  Vec acc = Vec::Zero(dim);
  for (const Vec& h : hs) {
    require_dim(h.size(), a.cols(), "gated_sum input");
    acc += sigm(a * h).cwiseProduct((b * h).array().tanh().matrix());
  }
  return acc;
}

// ---------------------------------------------------------------------------
// Adam

void Adam::step(const ParamList& params) {
  if (m_.empty()) {
    for (const Param* p : params) {
      m_.push_back(Mat::Zero(p->rows(), p->cols()));
      v_.push_back(Mat::Zero(p->rows(), p->cols()));
    }
  }
  if (m_.size() != params.size()) {
    throw Error(ErrorCode::kDimension, "Adam parameter list changed size");
  }
  ++t_;
  const double c1 = 1.0 - std::pow(cfg_.beta1, static_cast<double>(t_));
  const double c2 = 1.0 - std::pow(cfg_.beta2, static_cast<double>(t_));
  for (std::size_t i = 0; i < params.size(); ++i) {
    Param& p = *params[i];
    if (p.grad.rows() != m_[i].rows() || p.grad.cols() != m_[i].cols()) {
      throw Error(ErrorCode::kDimension, "Adam shape mismatch for " + p.name);
    }
    m_[i] = cfg_.beta1 * m_[i] + (1.0 - cfg_.beta1) * p.grad;
    v_[i] = cfg_.beta2 * v_[i] + (1.0 - cfg_.beta2) * p.grad.cwiseAbs2();
    p.value.array() -= cfg_.lr * (m_[i].array() / c1) / ((v_[i].array() / c2).sqrt() + cfg_.eps);
  }
}

// ---------------------------------------------------------------------------
// Finite differences

double finite_diff_check(const std::function<double(bool)>& loss, const ParamList& params,
                         double eps, int stride) {
  loss(true);
  std::vector<Mat> analytic;
  for (const Param* p : params) analytic.push_back(p->grad);
  double worst = 0;
  long counter = 0;
  for (std::size_t i = 0; i < params.size(); ++i) {
    Param& p = *params[i];
    for (Eigen::Index k = 0; k < p.value.size(); ++k) {
      if (counter++ % stride != 0) continue;
      double& w = p.value.data()[k];
      const double saved = w;
      w = saved + eps;
      const double up = loss(false);
      w = saved - eps;
      const double down = loss(false);
      w = saved;
      const double numeric = (up - down) / (2 * eps);
      const double a = analytic[i].data()[k];
      const double denom = std::max({std::abs(a), std::abs(numeric), 1e-3});
      worst = std::max(worst, std::abs(a - numeric) / denom);
    }
  }
  return worst;
}

// ---------------------------------------------------------------------------
// Checkpoints

void write_checkpoint(std::ostream& os, const std::vector<const Param*>& params) {
  os << "qgae-checkpoint 1\n";
  char buf[64];
  for (const Param* p : params) {
    os << "tensor " << p->name << ' ' << p->rows() << ' ' << p->cols() << '\n';
    for (Eigen::Index r = 0; r < p->rows(); ++r) {
      for (Eigen::Index c = 0; c < p->cols(); ++c) {
        std::snprintf(buf, sizeof buf, "%a", p->value(r, c));
        os << (c ? " " : "") << buf;
      }
      os << '\n';
    }
  }
}

void read_checkpoint(std::istream& is, const ParamList& params) {
  std::string magic;
  int version = 0;
  if (!(is >> magic >> version) || magic != "qgae-checkpoint" || version != 1) {
    throw Error(ErrorCode::kIo, "not a qgae checkpoint (version 1)");
  }
  std::map<std::string, Param*> by_name;
  for (Param* p : params) by_name[p->name] = p;
  std::size_t filled = 0;
  std::string word;
  while (is >> word) {
    if (word != "tensor") throw Error(ErrorCode::kIo, "expected 'tensor', found '" + word + "'");
    std::string name;
    Eigen::Index rows, cols;
    if (!(is >> name >> rows >> cols)) throw Error(ErrorCode::kIo, "truncated tensor header");
    const auto it = by_name.find(name);
    if (it == by_name.end()) throw Error(ErrorCode::kIo, "unknown tensor '" + name + "'");
    Param& p = *it->second;
    if (p.rows() != rows || p.cols() != cols) {
      throw Error(ErrorCode::kIo, "shape mismatch for tensor '" + name + "'");
    }
    for (Eigen::Index r = 0; r < rows; ++r) {
      for (Eigen::Index c = 0; c < cols; ++c) {
        std::string tok;
        if (!(is >> tok)) throw Error(ErrorCode::kIo, "truncated tensor '" + name + "'");
        char* end = nullptr;
        p.value(r, c) = std::strtod(tok.c_str(), &end);
        if (end != tok.c_str() + tok.size()) {
          throw Error(ErrorCode::kIo, "bad number '" + tok + "' in tensor '" + name + "'");
        }
      }
    }
    ++filled;
  }
  if (filled != params.size()) {
    throw Error(ErrorCode::kIo, "checkpoint has " + std::to_string(filled) + " tensors, model needs " +
                                    std::to_string(params.size()));
  }
}

}  // namespace qgae::nn
