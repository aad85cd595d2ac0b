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

#include <doctest.h>

#include <cmath>
#include <cstring>
#include <random>
#include <sstream>

#include "qgae/error.hpp"
#include "qgae/nn.hpp"

using namespace qgae;
using namespace qgae::nn;

namespace {

// Scalar re-implementation of the GRU step with explicit loops.
std::vector<double> reference_gru(const GruCell& c, const std::vector<double>& x,
                                  const std::vector<double>& h) {
  const std::size_t dh = h.size();
  const std::size_t dx = x.size();
  auto affine = [&](const Param& w, const Param& u, const Param& b, const std::vector<double>& hv,
                    std::size_t i) {
    double acc = b.value(i, 0);
    for (std::size_t j = 0; j < dx; ++j) acc += w.value(i, j) * x[j];
    for (std::size_t j = 0; j < dh; ++j) acc += u.value(i, j) * hv[j];
    return acc;
  };
  std::vector<double> z(dh), r(dh), rh(dh), out(dh);
  for (std::size_t i = 0; i < dh; ++i) {
    z[i] = 1.0 / (1.0 + std::exp(-affine(c.wz, c.uz, c.bz, h, i)));
    r[i] = 1.0 / (1.0 + std::exp(-affine(c.wr, c.ur, c.br, h, i)));
  }
  for (std::size_t i = 0; i < dh; ++i) rh[i] = r[i] * h[i];
  for (std::size_t i = 0; i < dh; ++i) {
    const double cand = std::tanh(affine(c.wh, c.uh, c.bh, rh, i));
    out[i] = (1 - z[i]) * h[i] + z[i] * cand;
  }
  return out;
}

Vec random_vec(Eigen::Index n, std::mt19937_64& rng) {
  std::normal_distribution<double> d;
  Vec v(n);
  for (Eigen::Index i = 0; i < n; ++i) v[i] = d(rng);
  return v;
}

}  // namespace

TEST_CASE("gru_step fixed points") {
  GruCell c("g", 2, 2);
  CHECK(gru_step(c, Vec::Zero(2), Vec::Ones(2)).isApprox(Vec::Constant(2, 0.5), 1e-15));

  c.bz.value.setConstant(10.0);
  const Vec h = gru_step(c, Vec::Zero(2), Vec::Ones(2));
  CHECK(h.cwiseAbs().maxCoeff() < 1e-4);
}

TEST_CASE("gru_step matches the scalar reference") {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 20; ++trial) {
    GruCell c("g", 3, 5);
    c.init(rng);
    const Vec x = random_vec(3, rng);
    const Vec h = random_vec(5, rng);
    const Vec got = gru_step(c, x, h);
    const auto want = reference_gru(c, {x.data(), x.data() + 3}, {h.data(), h.data() + 5});
    for (int i = 0; i < 5; ++i) REQUIRE(std::abs(got[i] - want[i]) < 1e-12);
    // Tape form agrees with the direct form.
    Tape t;
    const Vec tape_h = t.value(c.step(t, t.input(x), t.input(h)));
    REQUIRE((tape_h - got).cwiseAbs().maxCoeff() < 1e-14);
  }
  GruCell c("g", 3, 5);
  CHECK_THROWS_AS(gru_step(c, Vec::Zero(2), Vec::Zero(5)), Error);
}

TEST_CASE("gated_sum") {
  std::mt19937_64 rng(5);
  GatedSum g("a", 4);
  g.init(rng);
  CHECK(gated_sum(g.gate.value, g.map.value, {}, 4) == Vec::Zero(4));

  std::vector<Vec> hs = {random_vec(4, rng), random_vec(4, rng), random_vec(4, rng)};
  const Vec fwd = gated_sum(g.gate.value, g.map.value, hs, 4);
  std::vector<Vec> rev(hs.rbegin(), hs.rend());
  CHECK((gated_sum(g.gate.value, g.map.value, rev, 4) - fwd).cwiseAbs().maxCoeff() < 1e-15);

  // A zero vector contributes sigmoid(0) * tanh(0) = 0.
  std::vector<Vec> one = {hs[0]};
  std::vector<Vec> with_zero = {hs[0], Vec::Zero(4)};
  CHECK(gated_sum(g.gate.value, g.map.value, one, 4) ==
        gated_sum(g.gate.value, g.map.value, with_zero, 4));
  std::vector<Vec> bad = {Vec::Zero(3)};
  CHECK_THROWS_AS(gated_sum(g.gate.value, g.map.value, bad, 4), Error);
}

TEST_CASE("Adam") {
  Param p("w", 2, 1);
  p.value << 1.0, -2.0;
  p.grad.setConstant(1.0);
  Adam adam({.lr = 0.001});
  adam.step({&p});
  CHECK(std::abs((p.value(0, 0) - 1.0) + 0.001) < 1e-6);
  CHECK(std::abs((p.value(1, 0) + 2.0) + 0.001) < 1e-6);

  Param q("w", 3, 2);
  q.value.setConstant(0.25);
  Adam idle;
  for (int i = 0; i < 5; ++i) idle.step({&q});
  CHECK(q.value == Mat::Constant(3, 2, 0.25));

  auto run = [] {
    std::mt19937_64 rng(3);
    Param w("w", 4, 1);
    init_uniform(w, 4, rng);
    Adam a;
    for (int i = 0; i < 50; ++i) {
      w.grad = 2.0 * w.value;  // d/dw of |w|^2
      a.step({&w});
    }
    return w.value;
  };
  CHECK(run() == run());

  Param r("r", 2, 2);
  Adam shape;
  shape.step({&r});
  r.grad = Mat::Zero(3, 3);
  CHECK_THROWS_AS(shape.step({&r}), Error);
}

TEST_CASE("finite_diff_check on w^2") {
  Param w("w", 1, 1);
  w.value(0, 0) = 3.0;
  const auto f = [&](bool grad) {
    const double v = w.value(0, 0);
    if (grad) w.grad(0, 0) = 2 * v;
    return v * v;
  };
  CHECK(finite_diff_check(f, {&w}) < 1e-8);
  CHECK(w.value(0, 0) == 3.0);
}

TEST_CASE("tape gradients agree with finite differences for every op") {
  std::mt19937_64 rng(21);
  GruCell cell("g", 3, 4);
  GatedSum agg("s", 4);
  Param head("head", 3, 4);
  Param bias("bias", 3, 1);
  Param w2("w2", 4, 1);
  Param b2("b2", 1, 1);
  Param proj("proj", 4, 4);
  cell.init(rng);
  agg.init(rng);
  for (Param* p : {&head, &bias, &w2, &b2, &proj}) init_uniform(*p, 2, rng);
  ParamList params;
  cell.collect(params);
  agg.collect(params);
  for (Param* p : {&head, &bias, &w2, &b2, &proj}) params.push_back(p);

  const Vec x0 = random_vec(4, rng);
  const Vec noise = random_vec(4, rng);
  const auto f = [&](bool grad) {
    Tape t;
    const auto h0 = t.input(x0);
    const auto h1 = cell.step_onehot(t, 1, h0);
    const auto h2 = cell.step(t, t.tanh(t.matvec(head, h1)), h1);
    const std::vector<Tape::Id> hs = {h1, h2};
    const auto s = agg.apply(t, hs, 4);
    const auto mu = t.scale(s, 0.7);
    const auto lv = t.one_minus(t.mul(s, s));
    const auto z = t.reparameterize(mu, lv, noise);
    const auto logits = t.add(t.matvec(head, z), t.param(bias));
    const std::vector<Tape::Id> as = {t.matvec(proj, h1), t.matvec(proj, h2), t.sigmoid(z)};
    const auto edges = t.edge_logits(as, z, w2, b2);
    const std::vector<Tape::Id> terms = {
        t.softmax_xent(logits, 2), t.bce_logits(edges, {1, 0, 1}),
        t.expected_abs_error(edges, {0, 1, 1}), t.kl_standard_normal(mu, lv),
        t.bce_logits(t.sum(std::vector<Tape::Id>{t.column(head, 1)}, 3), {0, 1, 0})};
    const auto total = t.sum(terms, 1);
    if (grad) {
      zero_grads(params);
      t.backward(total);
    }
    return t.scalar(total);
  };
  CHECK(finite_diff_check(f, params) < 1e-6);
}

TEST_CASE("checkpoint round trip is bit exact") {
  std::mt19937_64 rng(8);
  GruCell a("cell", 6, 5);
  a.init(rng);
  a.bh.value(0, 0) = 1.0 / 3.0;
  a.bz.value(1, 0) = -0.0;
  a.bz.value(2, 0) = 1e-300;
  ParamList pa;
  a.collect(pa);
  std::stringstream ss;
  write_checkpoint(ss, {pa.begin(), pa.end()});

  GruCell b("cell", 6, 5);
  ParamList pb;
  b.collect(pb);
  read_checkpoint(ss, pb);
  for (std::size_t i = 0; i < pa.size(); ++i) {
    REQUIRE(std::memcmp(pa[i]->value.data(), pb[i]->value.data(),
                        sizeof(double) * pa[i]->value.size()) == 0);
  }

  GruCell wrong("cell", 6, 4);
  ParamList pw;
  wrong.collect(pw);
  std::stringstream again;
  write_checkpoint(again, {pa.begin(), pa.end()});
  CHECK_THROWS_AS(read_checkpoint(again, pw), Error);
  std::stringstream junk("not a checkpoint");
  CHECK_THROWS_AS(read_checkpoint(junk, pb), Error);
}
