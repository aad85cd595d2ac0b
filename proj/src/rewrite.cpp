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

#include "qgae/rewrite.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <set>

#include "qgae/error.hpp"

namespace qgae {

namespace {

constexpr std::array<std::string_view, 4> kKindNames = {"HH", "CXCX", "CX_PAR", "CX_REV"};

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

bool site_fits(TemplateKind kind, Direction dir, const Site& site) {
  switch (kind) {
    case TemplateKind::kHH:
      if (dir == Direction::kForward) return std::holds_alternative<PairSite>(site);
      if (const auto* s = std::get_if<InsertSite>(&site)) return s->target < 0;
      return std::holds_alternative<AllWiresSite>(site);
    case TemplateKind::kCxCx:
      if (dir == Direction::kForward) return std::holds_alternative<PairSite>(site);
      if (const auto* s = std::get_if<InsertSite>(&site)) {
        return s->target >= 0 && s->target != s->wire;
      }
      return false;
    case TemplateKind::kCxPar:
      return std::holds_alternative<PairSite>(site);
    case TemplateKind::kCxRev:
      return dir == Direction::kForward && std::holds_alternative<RevSite>(site);
  }
  return false;
}

// Index of the first gate after `from` touching wire `a` (or `b` when >= 0).
std::size_t next_touching(const Circuit& c, std::size_t from, int a, int b = -1) {
  for (std::size_t k = from + 1; k < c.size(); ++k) {
    if (c[k].touches(a) || (b >= 0 && c[k].touches(b))) return k;
  }
  return c.size();
}

// {0} plus both sides of every gate index accepted by `pred`.
template <class Pred>
std::vector<std::size_t> insert_positions(const Circuit& c, Pred pred) {
  std::set<std::size_t> pos{0};
  for (std::size_t i = 0; i < c.size(); ++i) {
    if (pred(c[i])) {
      pos.insert(i);
      pos.insert(i + 1);
    }
  }
  return {pos.begin(), pos.end()};
}

}  // namespace

std::string_view template_name(TemplateKind k) {
  return kKindNames[static_cast<int>(k)];
}

std::string site_text(const Site& s) {
  return std::visit(
      Overloaded{
          [](const PairSite& p) { return std::to_string(p.i) + "-" + std::to_string(p.j); },
          [](const InsertSite& p) {
            std::string w = std::to_string(p.wire);
            if (p.target >= 0) w += "," + std::to_string(p.target);
            return w + ":" + std::to_string(p.pos);
          },
          [](const RevSite& p) { return std::to_string(p.i); },
          [](const AllWiresSite& p) { return "all:" + std::to_string(p.pos); },
      },
      s);
}

Action::Action(TemplateKind kind, Direction dir, Site site)
    : kind_(kind), dir_(dir), site_(site) {
  if (kind == TemplateKind::kCxPar && dir == Direction::kReverse) {
    throw Error(ErrorCode::kInvalidArgument, "CX_PAR has no reverse form");
  }
  if (!site_fits(kind, dir, site)) {
    throw Error(ErrorCode::kInvalidArgument,
                "site '" + site_text(site) + "' does not fit template " +
                    std::string(template_name(kind)));
  }
}

std::string Action::key() const {
  std::string k(template_name(kind_));
  k += dir_ == Direction::kForward ? ".fwd@" : ".rev@";
  k += site_text(site_);
  return k;
}

std::optional<Action> parse_action_key(std::string_view key) {
  const auto dot = key.find('.');
  const auto at = key.find('@');
  if (dot == std::string_view::npos || at == std::string_view::npos || at < dot) {
    return std::nullopt;
  }
  const auto name = key.substr(0, dot);
  const auto dir_text = key.substr(dot + 1, at - dot - 1);
  std::string_view site = key.substr(at + 1);

  std::optional<TemplateKind> kind;
  for (int i = 0; i < 4; ++i) {
    if (kKindNames[i] == name) kind = static_cast<TemplateKind>(i);
  }
  if (!kind || (dir_text != "fwd" && dir_text != "rev")) return std::nullopt;
  const Direction dir = dir_text == "fwd" ? Direction::kForward : Direction::kReverse;

  auto number = [](std::string_view s, auto& out) {
    const auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
    return ec == std::errc() && p == s.data() + s.size();
  };

  Site parsed;
  if (const auto dash = site.find('-'); dash != std::string_view::npos) {
    PairSite p;
    if (!number(site.substr(0, dash), p.i) || !number(site.substr(dash + 1), p.j)) {
      return std::nullopt;
    }
    parsed = p;
  } else if (const auto colon = site.find(':'); colon != std::string_view::npos) {
    const auto lhs = site.substr(0, colon);
    std::size_t pos;
    if (!number(site.substr(colon + 1), pos)) return std::nullopt;
    if (lhs == "all") {
      parsed = AllWiresSite{pos};
    } else {
      InsertSite s;
      s.pos = pos;
      if (const auto comma = lhs.find(','); comma != std::string_view::npos) {
        if (!number(lhs.substr(0, comma), s.wire) ||
            !number(lhs.substr(comma + 1), s.target)) {
          return std::nullopt;
        }
      } else if (!number(lhs, s.wire)) {
        return std::nullopt;
      }
      parsed = s;
    }
  } else {
    RevSite r;
    if (!number(site, r.i)) return std::nullopt;
    parsed = r;
  }
  if (*kind == TemplateKind::kCxPar && dir == Direction::kReverse) return std::nullopt;
  if (!site_fits(*kind, dir, parsed)) return std::nullopt;
  return Action(*kind, dir, parsed);
}

std::vector<Site> find_matches(const Circuit& c, TemplateKind k, Direction dir) {
  std::vector<Site> out;
  const std::size_t n = c.size();
  if (dir == Direction::kForward) {
    switch (k) {
      case TemplateKind::kHH:
        for (std::size_t i = 0; i < n; ++i) {
          if (!c[i].is_h()) continue;
          const std::size_t j = next_touching(c, i, c[i].target);
          if (j < n && c[j] == c[i]) out.emplace_back(PairSite{i, j});
        }
        break;
      case TemplateKind::kCxCx:
        for (std::size_t i = 0; i < n; ++i) {
          if (!c[i].is_cx()) continue;
          const std::size_t j = next_touching(c, i, c[i].control, c[i].target);
          if (j < n && c[j] == c[i]) out.emplace_back(PairSite{i, j});
        }
        break;
      case TemplateKind::kCxPar: {
        std::vector<PairSite> pairs;
        for (std::size_t j = 1; j < n; ++j) {
          const Gate& g = c[j];
          if (!g.is_cx()) continue;
          for (std::size_t k1 = j; k1-- > 0;) {
            const Gate& h = c[k1];
            if (h.is_cx() && h.control == g.control && h.target != g.target) {
              pairs.push_back({k1, j});
            }
            if (!commutes(h, g)) break;
          }
        }
        std::sort(pairs.begin(), pairs.end());
        out.assign(pairs.begin(), pairs.end());
        break;
      }
      case TemplateKind::kCxRev:
        for (std::size_t i = 0; i < n; ++i) {
          if (c[i].is_cx()) out.emplace_back(RevSite{i});
        }
        break;
    }
    return out;
  }

  switch (k) {
    case TemplateKind::kHH:
      for (int q = 0; q < c.n_wires(); ++q) {
        for (std::size_t p : insert_positions(c, [q](const Gate& g) { return g.touches(q); })) {
          out.emplace_back(InsertSite{q, -1, p});
        }
      }
      for (std::size_t p = 0; p <= n; ++p) out.emplace_back(AllWiresSite{p});
      break;
    case TemplateKind::kCxCx:
      for (int a = 0; a < c.n_wires(); ++a) {
        for (int b = 0; b < c.n_wires(); ++b) {
          if (a == b) continue;
          auto on_pair = [a, b](const Gate& g) {
            return g.is_cx() && g.touches(a) && g.touches(b);
          };
          for (std::size_t p : insert_positions(c, on_pair)) {
            out.emplace_back(InsertSite{a, b, p});
          }
        }
      }
      break;
    case TemplateKind::kCxPar:
    case TemplateKind::kCxRev:
      break;
  }
  return out;
}

Circuit apply_unchecked(const Circuit& c, const Action& a) {
  std::vector<Gate> g = c.gates();
  const Site& site = a.site();
  switch (a.kind()) {
    case TemplateKind::kHH:
    case TemplateKind::kCxCx:
      if (a.direction() == Direction::kForward) {
        const auto& p = std::get<PairSite>(site);
        g.erase(g.begin() + static_cast<std::ptrdiff_t>(p.j));
        g.erase(g.begin() + static_cast<std::ptrdiff_t>(p.i));
      } else if (const auto* all = std::get_if<AllWiresSite>(&site)) {
        std::vector<Gate> layer;
        for (int rep = 0; rep < 2; ++rep) {
          for (int q = 0; q < c.n_wires(); ++q) layer.push_back(Gate::h(q));
        }
        g.insert(g.begin() + static_cast<std::ptrdiff_t>(all->pos), layer.begin(), layer.end());
      } else {
        const auto& s = std::get<InsertSite>(site);
        const Gate gate = s.target < 0 ? Gate::h(s.wire) : Gate::cx(s.wire, s.target);
        g.insert(g.begin() + static_cast<std::ptrdiff_t>(s.pos), 2, gate);
      }
      break;
    case TemplateKind::kCxPar: {
      const auto& p = std::get<PairSite>(site);
      const Gate moved = g[p.j];
      g.erase(g.begin() + static_cast<std::ptrdiff_t>(p.j));
      g.insert(g.begin() + static_cast<std::ptrdiff_t>(p.i + 1), moved);
      break;
    }
    case TemplateKind::kCxRev: {
      const std::size_t i = std::get<RevSite>(site).i;
      const Gate cx = g[i];
      const std::array<Gate, 5> rev = {Gate::h(cx.control), Gate::h(cx.target),
                                       Gate::cx(cx.target, cx.control),
                                       Gate::h(cx.control), Gate::h(cx.target)};
      g.erase(g.begin() + static_cast<std::ptrdiff_t>(i));
      g.insert(g.begin() + static_cast<std::ptrdiff_t>(i), rev.begin(), rev.end());
      break;
    }
  }
  return Circuit(c.n_wires(), std::move(g));
}

Circuit apply(const Circuit& c, const Action& a) {
  const auto sites = find_matches(c, a.kind(), a.direction());
  if (std::find(sites.begin(), sites.end(), a.site()) == sites.end()) {
    throw Error(ErrorCode::kStaleAction,
                "action " + a.key() + " does not match the circuit");
  }
  return apply_unchecked(c, a);
}

namespace {

void append(std::vector<Action>& out, const Circuit& c, TemplateKind k, Direction d) {
  for (const Site& s : find_matches(c, k, d)) out.emplace_back(k, d, s);
}

}  // namespace

std::vector<Action> enumerate_forward_actions(const Circuit& c) {
  std::vector<Action> out;
  append(out, c, TemplateKind::kHH, Direction::kForward);
  append(out, c, TemplateKind::kCxCx, Direction::kForward);
  append(out, c, TemplateKind::kCxPar, Direction::kForward);
  append(out, c, TemplateKind::kCxRev, Direction::kForward);
  return out;
}

std::vector<Action> enumerate_actions(const Circuit& c) {
  std::vector<Action> out = enumerate_forward_actions(c);
  append(out, c, TemplateKind::kHH, Direction::kReverse);
  append(out, c, TemplateKind::kCxCx, Direction::kReverse);
  return out;
}

}  // namespace qgae
