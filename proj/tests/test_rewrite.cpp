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

#include <set>

#include "oracles.hpp"
#include "qgae/error.hpp"
#include "qgae/rewrite.hpp"

using namespace qgae;

namespace {

const auto kFwd = Direction::kForward;
const auto kRev = Direction::kReverse;

std::size_t count_cx(const Circuit& c) {
  return static_cast<std::size_t>(std::count_if(c.gates().begin(), c.gates().end(),
                                                [](const Gate& g) { return g.is_cx(); }));
}

// Reverse every CNOT of an all-ones BV circuit and cancel the Hadamards the
// reversal exposes, keeping the final two Hadamard layers.
Circuit optimise_bv_by_templates(const BvSpec& spec) {
  Circuit c = bv_circuit(spec);
  for (int k = spec.n_data - 1; k >= 0; --k) {
    const std::size_t idx = static_cast<std::size_t>(spec.n_data + 1 + k);
    c = apply(c, Action(TemplateKind::kCxRev, kFwd, RevSite{idx}));
  }
  for (;;) {
    // Cancel the first H pair whose first gate is not in the trailing layers.
    const auto sites = find_matches(c, TemplateKind::kHH, kFwd);
    const std::size_t tail = c.size() - static_cast<std::size_t>(spec.n_data + 1);
    bool applied = false;
    for (const Site& s : sites) {
      const auto& p = std::get<PairSite>(s);
      if (p.j < tail) {
        c = apply(c, Action(TemplateKind::kHH, kFwd, s));
        applied = true;
        break;
      }
    }
    if (!applied) break;
  }
  return c;
}

}  // namespace

TEST_CASE("find_matches forward examples") {
  const Circuit hh(1, {Gate::h(0), Gate::h(0)});
  CHECK(find_matches(hh, TemplateKind::kHH, kFwd) == std::vector<Site>{PairSite{0, 1}});

  const Circuit blocked(2, {Gate::h(0), Gate::cx(0, 1), Gate::h(0)});
  CHECK(find_matches(blocked, TemplateKind::kHH, kFwd).empty());

  const Circuit par(3, {Gate::cx(0, 1), Gate::cx(0, 2)});
  CHECK(find_matches(par, TemplateKind::kCxPar, kFwd) == std::vector<Site>{PairSite{0, 1}});

  const Circuit cxcx(2, {Gate::cx(0, 1), Gate::cx(0, 1)});
  CHECK(find_matches(cxcx, TemplateKind::kCxCx, kFwd) == std::vector<Site>{PairSite{0, 1}});

  // Interposed gate on an unrelated wire does not block.
  const Circuit hh_gap(2, {Gate::h(0), Gate::h(1), Gate::h(0)});
  CHECK(find_matches(hh_gap, TemplateKind::kHH, kFwd) == std::vector<Site>{PairSite{0, 2}});

  // CX_PAR: gate j must commute with everything it crosses.
  const Circuit crossing(3, {Gate::cx(0, 1), Gate::h(2), Gate::cx(0, 2)});
  CHECK(find_matches(crossing, TemplateKind::kCxPar, kFwd).empty());
  const Circuit clear(4, {Gate::cx(0, 1), Gate::h(3), Gate::cx(0, 2)});
  CHECK(find_matches(clear, TemplateKind::kCxPar, kFwd) == std::vector<Site>{PairSite{0, 2}});

  CHECK(find_matches(crossing, TemplateKind::kCxRev, kFwd) ==
        std::vector<Site>{RevSite{0}, RevSite{2}});
}

TEST_CASE("apply examples") {
  const Circuit cx(2, {Gate::cx(0, 1)});
  CHECK(apply(cx, Action(TemplateKind::kCxRev, kFwd, RevSite{0})) ==
        Circuit(2, {Gate::h(0), Gate::h(1), Gate::cx(1, 0), Gate::h(0), Gate::h(1)}));

  const Circuit hh(1, {Gate::h(0), Gate::h(0)});
  CHECK(apply(hh, Action(TemplateKind::kHH, kFwd, PairSite{0, 1})).empty());

  const Circuit c(2, {Gate::cx(0, 1), Gate::h(1)});
  const Circuit grown = apply(c, Action(TemplateKind::kHH, kRev, InsertSite{1, -1, 1}));
  CHECK(grown == Circuit(2, {Gate::cx(0, 1), Gate::h(1), Gate::h(1), Gate::h(1)}));
  CHECK(apply(grown, Action(TemplateKind::kHH, kFwd, PairSite{1, 2})) == c);

  const Circuit all = apply(c, Action(TemplateKind::kHH, kRev, AllWiresSite{0}));
  CHECK(all.size() == 6);
  CHECK(oracle::max_abs_diff(unitary(all), unitary(c)) < 1e-12);

  const Circuit par(4, {Gate::cx(0, 1), Gate::h(3), Gate::cx(0, 2)});
  CHECK(apply(par, Action(TemplateKind::kCxPar, kFwd, PairSite{0, 2})) ==
        Circuit(4, {Gate::cx(0, 1), Gate::cx(0, 2), Gate::h(3)}));
}

TEST_CASE("stale and malformed actions") {
  const Circuit c(2, {Gate::h(0), Gate::h(0)});
  CHECK_THROWS_AS(apply(c, Action(TemplateKind::kHH, kFwd, PairSite{0, 2})), Error);
  CHECK_THROWS_AS(apply(Circuit(2, {Gate::h(1)}), Action(TemplateKind::kCxRev, kFwd, RevSite{0})),
                  Error);
  CHECK_THROWS_AS(Action(TemplateKind::kCxPar, kRev, PairSite{0, 1}), Error);
  CHECK_THROWS_AS(Action(TemplateKind::kCxRev, kFwd, PairSite{0, 1}), Error);
  CHECK_THROWS_AS(Action(TemplateKind::kCxCx, kRev, InsertSite{0, -1, 0}), Error);
}

TEST_CASE("action keys") {
  CHECK(Action(TemplateKind::kCxRev, kFwd, RevSite{3}).key() == "CX_REV.fwd@3");
  CHECK(Action(TemplateKind::kHH, kFwd, PairSite{1, 4}).key() == "HH.fwd@1-4");
  CHECK(Action(TemplateKind::kHH, kRev, InsertSite{2, -1, 5}).key() == "HH.rev@2:5");
  CHECK(Action(TemplateKind::kHH, kRev, AllWiresSite{0}).key() == "HH.rev@all:0");
  CHECK(Action(TemplateKind::kCxCx, kRev, InsertSite{0, 1, 2}).key() == "CXCX.rev@0,1:2");
  CHECK(Action(TemplateKind::kCxPar, kFwd, PairSite{0, 1}).key() == "CX_PAR.fwd@0-1");

  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const Circuit c = random_icmh_circuit(3, 8, seed);
    for (const Action& a : enumerate_actions(c)) {
      const auto back = parse_action_key(a.key());
      REQUIRE(back.has_value());
      REQUIRE(*back == a);
    }
  }
  CHECK_FALSE(parse_action_key("CX_PAR.rev@0-1").has_value());
  CHECK_FALSE(parse_action_key("HH.fwd@x").has_value());
  CHECK_FALSE(parse_action_key("FOO.fwd@1").has_value());
}

TEST_CASE("enumerate_actions") {
  const auto empty = enumerate_actions(Circuit(2));
  REQUIRE_FALSE(empty.empty());
  for (const Action& a : empty) {
    CHECK(a.direction() == kRev);
    std::visit(
        [](const auto& s) {
          using S = std::decay_t<decltype(s)>;
          if constexpr (std::is_same_v<S, InsertSite> || std::is_same_v<S, AllWiresSite>) {
            CHECK(s.pos == 0);
          } else {
            FAIL("unexpected site kind");
          }
        },
        a.site());
  }
  // 2 wires HH + AllWires + 2 ordered CNOT pairs.
  CHECK(empty.size() == 5);

  const Circuit bv = bv_circuit({2, 0b11});
  const auto actions = enumerate_actions(bv);
  std::set<std::string> keys;
  for (const Action& a : actions) keys.insert(a.key());
  CHECK(keys.size() == actions.size());
  CHECK(keys.count("CX_REV.fwd@3"));
  CHECK(keys.count("CX_REV.fwd@4"));
  CHECK(find_matches(bv, TemplateKind::kHH, kFwd).empty());
  CHECK(find_matches(bv, TemplateKind::kCxCx, kFwd).empty());
  CHECK(find_matches(bv, TemplateKind::kCxPar, kFwd).empty());

  // Brute-force matcher oracle for the forward HH template: every pair (i, j)
  // of equal H gates with no gate touching the wire strictly between them.
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    const Circuit c = random_icmh_circuit(3, 10, seed);
    std::vector<Site> brute;
    for (std::size_t i = 0; i < c.size(); ++i) {
      for (std::size_t j = i + 1; j < c.size(); ++j) {
        if (!c[i].is_h() || c[j] != c[i]) continue;
        bool clear = true;
        for (std::size_t k = i + 1; k < j; ++k) clear = clear && !c[k].touches(c[i].target);
        if (clear) brute.emplace_back(PairSite{i, j});
      }
    }
    std::sort(brute.begin(), brute.end());
    REQUIRE(find_matches(c, TemplateKind::kHH, kFwd) == brute);
  }
  CHECK(enumerate_actions(bv) == actions);
}

TEST_CASE("template soundness and gate-count effects") {
  for (std::uint64_t seed = 0; seed < 200; ++seed) {
    const int wires = 2 + static_cast<int>(seed % 3);
    const Circuit c = random_icmh_circuit(wires, static_cast<int>(seed % 13), seed);
    const auto u = unitary(c);
    for (const Action& a : enumerate_actions(c)) {
      const Circuit r = apply(c, a);
      REQUIRE_MESSAGE(oracle::max_abs_diff(unitary(r), u) < 1e-9, a.key());
      if (a.direction() == kFwd) {
        switch (a.kind()) {
          case TemplateKind::kHH:
          case TemplateKind::kCxCx: REQUIRE(r.size() + 2 == c.size()); break;
          case TemplateKind::kCxRev: REQUIRE(r.size() == c.size() + 4); break;
          case TemplateKind::kCxPar: {
            REQUIRE(r.size() == c.size());
            auto sorted = [](std::vector<Gate> g) {
              std::sort(g.begin(), g.end(), [](const Gate& x, const Gate& y) {
                return std::tuple(x.kind, x.control, x.target) <
                       std::tuple(y.kind, y.control, y.target);
              });
              return g;
            };
            REQUIRE(sorted(r.gates()) == sorted(c.gates()));
            break;
          }
        }
      }
    }
  }
}

TEST_CASE("reversal of an already reversed CNOT undoes it after cancellations") {
  const Circuit once = apply(Circuit(2, {Gate::cx(0, 1)}),
                             Action(TemplateKind::kCxRev, kFwd, RevSite{0}));
  Circuit twice = apply(once, Action(TemplateKind::kCxRev, kFwd, RevSite{2}));
  while (true) {
    const auto m = find_matches(twice, TemplateKind::kHH, kFwd);
    if (m.empty()) break;
    twice = apply(twice, Action(TemplateKind::kHH, kFwd, m.front()));
  }
  CHECK(twice == Circuit(2, {Gate::cx(0, 1)}));
}

TEST_CASE("optimised BV reaches depth 3 through templates") {
  for (int n = 2; n <= 5; ++n) {
    const BvSpec spec{n, (std::uint64_t{1} << n) - 1};
    const Circuit opt = optimise_bv_by_templates(spec);
    CHECK(depth(opt) == 3);
    CHECK(count_cx(opt) == static_cast<std::size_t>(n));
    CHECK(oracle::max_abs_diff(unitary(opt), unitary(bv_circuit(spec))) < 1e-9);
  }
  // Empty secret: the two Hadamard layers cancel completely.
  Circuit zero = bv_circuit({3, 0});
  while (true) {
    const auto m = find_matches(zero, TemplateKind::kHH, kFwd);
    if (m.empty()) break;
    zero = apply(zero, Action(TemplateKind::kHH, kFwd, m.front()));
  }
  CHECK(depth(zero) == 0);
}

TEST_CASE("BFS reaches depth 3 from BV(2, 11) within 6 actions") {
  const auto r = oracle::bfs_to_depth(bv_circuit({2, 0b11}), 3, 6, enumerate_forward_actions);
  REQUIRE(r.steps >= 0);
  CHECK(r.steps <= 6);
  CHECK(depth(r.reached) <= 3);
  CHECK(oracle::max_abs_diff(unitary(r.reached), unitary(bv_circuit({2, 0b11}))) < 1e-9);
  MESSAGE("BFS optimum: " << r.steps << " actions, reached " << state_string(r.reached));
}
