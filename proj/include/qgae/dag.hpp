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

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "qgae/circuit.hpp"

namespace qgae {

enum class NodeType : std::uint8_t {
  kInput = 0,
  kOutput = 1,
  kHadamard = 2,
  kCtrlOp = 3,
  kTrgtOp = 4,
  kHelper = 5,
};

inline constexpr int kNumNodeTypes = 6;

std::string_view node_type_name(NodeType t);
std::optional<NodeType> node_type_from_name(std::string_view name);

/// One-hot encoding with fixed indices input=0 .. helper=5.
std::array<double, kNumNodeTypes> node_features(NodeType t);

struct DagNode {
  NodeType type = NodeType::kInput;
  // Wire the node sits on (the fake wire for helpers). Tie-break data only;
  // never fed to the encoder.
  int wire = 0;
  // Program position: -1 for inputs, gate index for gate/helper nodes,
  // kOutputPosition for outputs.
  int position = 0;
};

inline constexpr int kOutputPosition = 1 << 30;

struct DagEdge {
  int src = 0;
  int dst = 0;
  int wire = 0;
  friend bool operator==(const DagEdge&, const DagEdge&) = default;
};

/// Typed-node circuit DAG. Node ids are indices into `nodes`. Real wires are
/// 0..n_wires-1 and the fake wire threading every CNOT is n_wires.
struct CircuitDag {
  int n_wires = 0;
  std::vector<DagNode> nodes;
  std::vector<DagEdge> edges;

  int fake_wire() const { return n_wires; }
  std::size_t size() const { return nodes.size(); }

  std::vector<std::vector<int>> predecessors() const;
  std::vector<std::vector<int>> successors() const;

  int add_node(NodeType type, int wire, int position);
  void add_edge(int src, int dst, int wire);
};

CircuitDag to_dag(const Circuit& c);

/// Empty result means the DAG satisfies every structural invariant.
std::vector<std::string> validate(const CircuitDag& d);

/// Kahn's algorithm; ready nodes ordered by (position, wire, id).
/// Throws Error(kCycle) on a cyclic graph.
std::vector<int> topo_order(const CircuitDag& d);

/// Relabels node ids: node i of `d` becomes node perm[i] of the result.
CircuitDag permute_nodes(const CircuitDag& d, std::span<const int> perm);

bool is_isomorphic(const CircuitDag& a, const CircuitDag& b);

std::size_t count_nodes(const CircuitDag& d, NodeType t);

/// `node <id> <type>` lines followed by `edge <src> <dst> <wire>` lines.
std::string export_dag(const CircuitDag& d);

/// Inverse of export_dag. Wires and positions of nodes are reconstructed
/// from edge labels and longest-path layering.
CircuitDag import_dag(std::string_view text);

/// Blank-line separated export blocks.
std::string export_corpus(std::span<const CircuitDag> dags);
std::vector<CircuitDag> import_corpus(std::string_view text);

}  // namespace qgae
