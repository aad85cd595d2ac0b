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
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "qgae/circuit.hpp"

namespace qgae {

/// The four rewrite templates: H-H cancellation, CNOT-CNOT cancellation,
/// same-control CNOT parallelisation and CNOT reversal through Hadamards.
enum class TemplateKind : std::uint8_t { kHH, kCxCx, kCxPar, kCxRev };

enum class Direction : std::uint8_t { kForward, kReverse };

std::string_view template_name(TemplateKind k);

/// Two gate indices, i < j.
struct PairSite {
  std::size_t i = 0;
  std::size_t j = 0;
  friend auto operator<=>(const PairSite&, const PairSite&) = default;
};

/// Insert a gate pair before gate-list position `pos`. HH uses `wire` only;
/// CXCX inserts CNOT(wire, target).
struct InsertSite {
  int wire = 0;
  int target = -1;
  std::size_t pos = 0;
  friend auto operator<=>(const InsertSite&, const InsertSite&) = default;
};

struct RevSite {
  std::size_t i = 0;
  friend auto operator<=>(const RevSite&, const RevSite&) = default;
};

/// HH-reverse on every wire at position `pos`.
struct AllWiresSite {
  std::size_t pos = 0;
  friend auto operator<=>(const AllWiresSite&, const AllWiresSite&) = default;
};

using Site = std::variant<PairSite, InsertSite, RevSite, AllWiresSite>;

std::string site_text(const Site& s);

class Action {
 public:
  /// Throws Error(kInvalidArgument) for (CX_PAR, reverse) or a site variant
  /// that does not fit the template.
  Action(TemplateKind kind, Direction dir, Site site);

  TemplateKind kind() const { return kind_; }
  Direction direction() const { return dir_; }
  const Site& site() const { return site_; }

  /// Canonical `<KIND>.<fwd|rev>@<site>` text used as Q-table column key.
  std::string key() const;

  friend bool operator==(const Action&, const Action&) = default;

 private:
  TemplateKind kind_;
  Direction dir_;
  Site site_;
};

std::optional<Action> parse_action_key(std::string_view key);

std::vector<Site> find_matches(const Circuit& c, TemplateKind k, Direction dir);

/// Throws Error(kStaleAction) when the action's site is not a match of `c`.
Circuit apply(const Circuit& c, const Action& a);

/// Applies without re-enumerating matches; `a` must come from
/// enumerate_actions(c).
Circuit apply_unchecked(const Circuit& c, const Action& a);

std::vector<Action> enumerate_actions(const Circuit& c);

/// Forward-direction actions only (the non-inserting subset plus reversal).
std::vector<Action> enumerate_forward_actions(const Circuit& c);

}  // namespace qgae
