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

#include <functional>
#include <iosfwd>
#include <random>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace qgae::nn {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

/// Named trainable tensor with its gradient accumulator. Vectors are stored
/// as n x 1 matrices.
struct Param {
  std::string name;
  Mat value;
  Mat grad;

  Param() = default;
  Param(std::string n, Eigen::Index rows, Eigen::Index cols)
      : name(std::move(n)), value(Mat::Zero(rows, cols)), grad(Mat::Zero(rows, cols)) {}

  Eigen::Index rows() const { return value.rows(); }
  Eigen::Index cols() const { return value.cols(); }
  Eigen::Index size() const { return value.size(); }
  void zero_grad() { grad.setZero(); }
};

using ParamList = std::vector<Param*>;

/// Uniform(-1/sqrt(fan_in), 1/sqrt(fan_in)) initialisation.
void init_uniform(Param& p, double fan_in, std::mt19937_64& rng);

void zero_grads(const ParamList& params);

struct GruCell;
struct GatedSum;

/// Reverse-mode recorder over vector-valued nodes. Every op appends a node;
/// backward() walks them in reverse and accumulates into Param::grad, so the
/// parameters of a tape that is never differentiated are left untouched.
class Tape {
 public:
  using Id = int;

  Id input(Vec v);
  Id zeros(Eigen::Index dim);
  /// Vector parameter (n x 1) as a variable.
  Id param(const Param& p);
  Id matvec(const Param& w, Id x);
  /// Column `col` of `w`, i.e. w times a one-hot vector.
  Id column(const Param& w, int col);
  Id add(Id a, Id b);
  Id mul(Id a, Id b);
  Id sigmoid(Id a);
  Id tanh(Id a);
  Id one_minus(Id a);
  Id scale(Id a, double s);
  /// Elementwise sum of the listed nodes; `dim` is used when the list is empty.
  Id sum(std::span<const Id> xs, Eigen::Index dim);
  /// mu + exp(logvar / 2) * noise
  Id reparameterize(Id mu, Id logvar, const Vec& noise);

  /// -log softmax(logits)[target]
  Id softmax_xent(Id logits, int target);
  /// Sum of binary cross-entropies of sigmoid(logits) against targets.
  Id bce_logits(Id logits, std::vector<double> targets);
  /// Sum of |sigmoid(logits) - targets|: expected edge edit distance.
  Id expected_abs_error(Id logits, std::vector<double> targets);
  /// KL(N(mu, exp(logvar)) || N(0, I)).
  Id kl_standard_normal(Id mu, Id logvar);
  /// Pairwise edge scores: out[k] = w2 . tanh(a[k] + b) + b2.
  Id edge_logits(std::span<const Id> a, Id b, const Param& w2, const Param& b2);
  /// Fused GRU step. With `onehot` >= 0 the input is e_onehot and `x` is ignored.
  Id gru(const GruCell& cell, Id x, int onehot, Id h);
  /// Fused sum over hs of sigmoid(A h) * tanh(B h); zeros(dim) when empty.
  Id gated_sum(const GatedSum& g, std::span<const Id> hs, Eigen::Index dim);

  const Vec& value(Id id) const { return nodes_[id].value; }
  double scalar(Id id) const { return nodes_[id].value[0]; }
  std::size_t size() const { return nodes_.size(); }

  /// Seeds d(out)/d(out) = seed and propagates to every parameter.
  void backward(Id out, double seed = 1.0);

 private:
  enum class Op {
    kInput, kParam, kMatVec, kColumn, kAdd, kMul, kSigmoid, kTanh, kOneMinus,
    kScale, kSum, kReparam, kSoftmaxXent, kBce, kAbsErr, kKl, kEdge, kGru, kGatedSum,
  };
  struct Node {
    Op op;
    Vec value;
    Vec grad;
    Id a = -1;
    Id b = -1;
    Param* p = nullptr;
    Param* q = nullptr;
    const void* layer = nullptr;  // GruCell or GatedSum for fused ops
    double s = 0;
    int list = -1;  // index into lists_ / data_
  };

  Id push(Node n);

  std::vector<Node> nodes_;
  std::vector<std::vector<Id>> lists_;
  std::vector<Vec> data_;
  std::vector<Mat> mats_;
};

/// Gated recurrent unit with h' = (1 - z) * h + z * h_tilde.
struct GruCell {
  Param wz, uz, bz, wr, ur, br, wh, uh, bh;

  GruCell() = default;
  GruCell(const std::string& prefix, int d_x, int d_h);

  int input_dim() const { return static_cast<int>(wz.cols()); }
  int hidden_dim() const { return static_cast<int>(wz.rows()); }
  void init(std::mt19937_64& rng);
  void collect(ParamList& out);

  Tape::Id step(Tape& t, Tape::Id x, Tape::Id h) const;
  /// Same as step with x the one-hot vector e_index.
  Tape::Id step_onehot(Tape& t, int index, Tape::Id h) const;
};

/// Direct evaluation of a GRU step without a tape.
Vec gru_step(const GruCell& cell, const Vec& x, const Vec& h_prev);

/// Sum over inputs of sigmoid(A h) * tanh(B h).
struct GatedSum {
  Param gate, map;

  GatedSum() = default;
  GatedSum(const std::string& prefix, int d_h);
  void init(std::mt19937_64& rng);
  void collect(ParamList& out);

  Tape::Id apply(Tape& t, std::span<const Tape::Id> hs, Eigen::Index dim) const;
};

Vec gated_sum(const Mat& a, const Mat& b, std::span<const Vec> hs, Eigen::Index dim);

struct AdamConfig {
  double lr = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
};

class Adam {
 public:
  explicit Adam(AdamConfig cfg = {}) : cfg_(cfg) {}
  /// One bias-corrected update of every parameter from its accumulated grad.
  void step(const ParamList& params);
  long steps() const { return t_; }

 private:
  AdamConfig cfg_;
  long t_ = 0;
  std::vector<Mat> m_;
  std::vector<Mat> v_;
};

/// Largest per-coordinate relative error between analytic gradients and
/// central differences. `loss` must zero and refill Param::grad when its
/// argument is true. Coordinates are visited with `stride` to bound cost.
double finite_diff_check(const std::function<double(bool)>& loss, const ParamList& params,
                         double eps = 1e-5, int stride = 1);

/// Text checkpoint: one `tensor <name> <rows> <cols>` line followed by the
/// row-major values in hexadecimal floating point, so reloads are bit-exact.
void write_checkpoint(std::ostream& os, const std::vector<const Param*>& params);
/// Fills `params` by name; throws Error(kIo) on any mismatch.
void read_checkpoint(std::istream& is, const ParamList& params);

}  // namespace qgae::nn
