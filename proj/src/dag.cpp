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

#include "qgae/dag.hpp"

#include <algorithm>
#include <functional>
#include <map>
#include <queue>
#include <set>
#include <sstream>
#include <tuple>

#include "qgae/error.hpp"

namespace qgae {

namespace {
constexpr std::array<std::string_view, kNumNodeTypes> kTypeNames = {
    "input", "output", "hadamard", "ctrl_op", "trgt_op", "helper"};
}

std::string_view node_type_name(NodeType t) {
  return kTypeNames[static_cast<int>(t)];
}

std::optional<NodeType> node_type_from_name(std::string_view name) {
  for (int i = 0; i < kNumNodeTypes; ++i) {
    if (kTypeNames[i] == name) return static_cast<NodeType>(i);
  }
  return std::nullopt;
}

std::array<double, kNumNodeTypes> node_features(NodeType t) {
  std::array<double, kNumNodeTypes> v{};
  v[static_cast<int>(t)] = 1.0;
  return v;
}

std::vector<std::vector<int>> CircuitDag::predecessors() const {
  std::vector<std::vector<int>> out(nodes.size());
  for (const DagEdge& e : edges) out[e.dst].push_back(e.src);
  return out;
}

std::vector<std::vector<int>> CircuitDag::successors() const {
  std::vector<std::vector<int>> out(nodes.size());
  for (const DagEdge& e : edges) out[e.src].push_back(e.dst);
  return out;
}

int CircuitDag::add_node(NodeType type, int wire, int position) {
  nodes.push_back(DagNode{type, wire, position});
  return static_cast<int>(nodes.size()) - 1;
}

void CircuitDag::add_edge(int src, int dst, int wire) {
  edges.push_back(DagEdge{src, dst, wire});
}

CircuitDag to_dag(const Circuit& c) {
  c.validate();
  CircuitDag d;
  d.n_wires = c.n_wires();
  const int fake = d.fake_wire();
  std::vector<int> last(fake + 1);
  for (int w = 0; w <= fake; ++w) last[w] = d.add_node(NodeType::kInput, w, -1);

  for (std::size_t i = 0; i < c.size(); ++i) {
    const Gate& g = c[i];
    const int pos = static_cast<int>(i);
    if (g.is_h()) {
      const int v = d.add_node(NodeType::kHadamard, g.target, pos);
      d.add_edge(last[g.target], v, g.target);
      last[g.target] = v;
      continue;
    }
    // A fake-wire edge into the control node would duplicate the real edge
    // when the previous CNOT's target node is also the control wire's last
    // node; route the fake wire through a helper in that case.
    if (last[fake] == last[g.control]) {
      const int h = d.add_node(NodeType::kHelper, fake, pos);
      d.add_edge(last[fake], h, fake);
      last[fake] = h;
    }
    const int ctrl = d.add_node(NodeType::kCtrlOp, g.control, pos);
    d.add_edge(last[g.control], ctrl, g.control);
    d.add_edge(last[fake], ctrl, fake);
    const int trgt = d.add_node(NodeType::kTrgtOp, g.target, pos);
    d.add_edge(last[g.target], trgt, g.target);
    d.add_edge(ctrl, trgt, fake);
    last[g.control] = ctrl;
    last[g.target] = trgt;
    last[fake] = trgt;
  }

  for (int w = 0; w <= fake; ++w) {
    const int out = d.add_node(NodeType::kOutput, w, kOutputPosition);
    d.add_edge(last[w], out, w);
  }
  return d;
}

std::vector<std::string> validate(const CircuitDag& d) {
  std::vector<std::string> violations;
  const int n = static_cast<int>(d.nodes.size());
  std::vector<int> indeg(n, 0), outdeg(n, 0);
  std::set<std::pair<int, int>> seen;
  bool endpoints_ok = true;
  for (const DagEdge& e : d.edges) {
    if (e.src < 0 || e.src >= n || e.dst < 0 || e.dst >= n) {
      violations.push_back("edge endpoint out of range: " + std::to_string(e.src) +
                           "->" + std::to_string(e.dst));
      endpoints_ok = false;
      continue;
    }
    ++outdeg[e.src];
    ++indeg[e.dst];
    if (e.src == e.dst) {
      violations.push_back("self loop at node " + std::to_string(e.src));
    }
    if (!seen.insert({e.src, e.dst}).second) {
      violations.push_back("parallel edge " + std::to_string(e.src) + "->" +
                           std::to_string(e.dst));
    }
  }

  for (int v = 0; v < n; ++v) {
    const NodeType t = d.nodes[v].type;
    const std::string label =
        "node " + std::to_string(v) + " (" + std::string(node_type_name(t)) + ")";
    if (t == NodeType::kInput) {
      if (indeg[v] != 0 || outdeg[v] != 1) {
        violations.push_back("input arity: " + label + " needs 0 predecessors and 1 successor");
      }
    } else if (t == NodeType::kOutput) {
      if (indeg[v] != 1 || outdeg[v] != 0) {
        violations.push_back("output arity: " + label + " needs 1 predecessor and 0 successors");
      }
    } else if (indeg[v] != outdeg[v]) {
      violations.push_back("degree imbalance: " + label + " has " +
                           std::to_string(indeg[v]) + " predecessors and " +
                           std::to_string(outdeg[v]) + " successors");
    }
  }

  if (endpoints_ok) {
    try {
      topo_order(d);
    } catch (const Error&) {
      violations.push_back("cycle");
    }
  }
  return violations;
}

std::vector<int> topo_order(const CircuitDag& d) {
  const int n = static_cast<int>(d.nodes.size());
  std::vector<int> indeg(n, 0);
  const auto succ = d.successors();
  for (const DagEdge& e : d.edges) ++indeg[e.dst];
  using Key = std::tuple<int, int, int>;
  std::priority_queue<Key, std::vector<Key>, std::greater<>> ready;
  auto push = [&](int v) { ready.emplace(d.nodes[v].position, d.nodes[v].wire, v); };
  for (int v = 0; v < n; ++v) {
    if (indeg[v] == 0) push(v);
  }
  std::vector<int> order;
  order.reserve(n);
  while (!ready.empty()) {
    const int v = std::get<2>(ready.top());
    ready.pop();
    order.push_back(v);
    for (int s : succ[v]) {
      if (--indeg[s] == 0) push(s);
    }
  }
  if (static_cast<int>(order.size()) != n) {
    throw Error(ErrorCode::kCycle, "DAG contains a cycle");
  }
  return order;
}

CircuitDag permute_nodes(const CircuitDag& d, std::span<const int> perm) {
  if (perm.size() != d.nodes.size()) {
    throw Error(ErrorCode::kInvalidArgument, "permutation size mismatch");
  }
  CircuitDag out;
  out.n_wires = d.n_wires;
  out.nodes.resize(d.nodes.size());
  for (std::size_t i = 0; i < d.nodes.size(); ++i) out.nodes[perm[i]] = d.nodes[i];
  out.edges.reserve(d.edges.size());
  for (const DagEdge& e : d.edges) out.edges.push_back({perm[e.src], perm[e.dst], e.wire});
  return out;
}

std::size_t count_nodes(const CircuitDag& d, NodeType t) {
  return static_cast<std::size_t>(std::count_if(
      d.nodes.begin(), d.nodes.end(), [t](const DagNode& v) { return v.type == t; }));
}

// ---------------------------------------------------------------------------
// Isomorphism: joint colour refinement, then backtracking over colour classes.

namespace {

struct Adjacency {
  std::vector<std::vector<int>> pred;
  std::vector<std::vector<int>> succ;
  std::set<std::pair<int, int>> edge_set;
};

Adjacency adjacency(const CircuitDag& d) {
  Adjacency a{d.predecessors(), d.successors(), {}};
  for (const DagEdge& e : d.edges) a.edge_set.insert({e.src, e.dst});
  return a;
}

// Refines colours of both graphs together so colour ids are comparable.
std::pair<std::vector<int>, std::vector<int>> refine(const CircuitDag& a,
                                                     const Adjacency& aa,
                                                     const CircuitDag& b,
                                                     const Adjacency& ab) {
  const std::size_t na = a.nodes.size();
  std::vector<int> colour(na + b.nodes.size());
  for (std::size_t v = 0; v < na; ++v) colour[v] = static_cast<int>(a.nodes[v].type);
  for (std::size_t v = 0; v < b.nodes.size(); ++v) {
    colour[na + v] = static_cast<int>(b.nodes[v].type);
  }
  std::size_t classes = 0;
  for (;;) {
    using Signature = std::tuple<int, std::vector<int>, std::vector<int>>;
    std::map<Signature, int> ids;
    std::vector<int> next(colour.size());
    auto signature = [&](const Adjacency& adj, std::size_t offset, int v) {
      std::vector<int> p, s;
      for (int u : adj.pred[v]) p.push_back(colour[offset + u]);
      for (int u : adj.succ[v]) s.push_back(colour[offset + u]);
      std::sort(p.begin(), p.end());
      std::sort(s.begin(), s.end());
      return Signature{colour[offset + v], std::move(p), std::move(s)};
    };
    std::vector<Signature> sigs;
    sigs.reserve(colour.size());
    for (std::size_t v = 0; v < na; ++v) sigs.push_back(signature(aa, 0, static_cast<int>(v)));
    for (std::size_t v = 0; v < b.nodes.size(); ++v) {
      sigs.push_back(signature(ab, na, static_cast<int>(v)));
    }
    for (const auto& s : sigs) ids.emplace(s, 0);
    int k = 0;
    for (auto& [sig, id] : ids) id = k++;
    for (std::size_t v = 0; v < sigs.size(); ++v) next[v] = ids[sigs[v]];
    colour = std::move(next);
    if (ids.size() == classes) break;
    classes = ids.size();
  }
  return {std::vector<int>(colour.begin(), colour.begin() + na),
          std::vector<int>(colour.begin() + na, colour.end())};
}

class Matcher {
 public:
  Matcher(const Adjacency& a, const Adjacency& b, std::vector<int> ca,
          std::vector<int> cb)
      : a_(a), b_(b), ca_(std::move(ca)), cb_(std::move(cb)),
        map_(ca_.size(), -1), used_(cb_.size(), false) {
    // Visit rare colours first, then neighbours of mapped nodes.
    std::map<int, int> freq;
    for (int c : ca_) ++freq[c];
    order_.resize(ca_.size());
    for (std::size_t i = 0; i < order_.size(); ++i) order_[i] = static_cast<int>(i);
    std::stable_sort(order_.begin(), order_.end(), [&](int x, int y) {
      return std::pair(freq[ca_[x]], ca_[x]) < std::pair(freq[ca_[y]], ca_[y]);
    });
  }

  bool run(std::size_t k = 0) {
    if (k == order_.size()) return true;
    const int v = order_[k];
    for (std::size_t w = 0; w < cb_.size(); ++w) {
      if (used_[w] || cb_[w] != ca_[v] || !consistent(v, static_cast<int>(w))) continue;
      map_[v] = static_cast<int>(w);
      used_[w] = true;
      if (run(k + 1)) return true;
      map_[v] = -1;
      used_[w] = false;
    }
    return false;
  }

 private:
  bool consistent(int v, int w) const {
    for (int u : a_.pred[v]) {
      if (map_[u] >= 0 && !b_.edge_set.count({map_[u], w})) return false;
    }
    for (int u : a_.succ[v]) {
      if (map_[u] >= 0 && !b_.edge_set.count({w, map_[u]})) return false;
    }
    // Reverse direction: mapped neighbours of w must come from neighbours of v.
    for (int x : b_.pred[w]) {
      if (!used_[x]) continue;
      bool found = false;
      for (int u : a_.pred[v]) found = found || map_[u] == x;
      if (!found) return false;
    }
    for (int x : b_.succ[w]) {
      if (!used_[x]) continue;
      bool found = false;
      for (int u : a_.succ[v]) found = found || map_[u] == x;
      if (!found) return false;
    }
    return true;
  }

  const Adjacency& a_;
  const Adjacency& b_;
  std::vector<int> ca_, cb_;
  std::vector<int> map_;
  std::vector<bool> used_;
  std::vector<int> order_;
};

}  // namespace

bool is_isomorphic(const CircuitDag& a, const CircuitDag& b) {
  if (a.nodes.size() != b.nodes.size() || a.edges.size() != b.edges.size()) {
    return false;
  }
  const Adjacency aa = adjacency(a);
  const Adjacency ab = adjacency(b);
  if (aa.edge_set.size() != ab.edge_set.size()) return false;
  auto [ca, cb] = refine(a, aa, b, ab);
  std::vector<int> ha = ca, hb = cb;
  std::sort(ha.begin(), ha.end());
  std::sort(hb.begin(), hb.end());
  if (ha != hb) return false;
  return Matcher(aa, ab, std::move(ca), std::move(cb)).run();
}

// ---------------------------------------------------------------------------
// Text export

std::string export_dag(const CircuitDag& d) {
  std::ostringstream os;
  for (std::size_t v = 0; v < d.nodes.size(); ++v) {
    os << "node " << v << ' ' << node_type_name(d.nodes[v].type) << '\n';
  }
  for (const DagEdge& e : d.edges) {
    os << "edge " << e.src << ' ' << e.dst << ' ' << e.wire << '\n';
  }
  return os.str();
}

CircuitDag import_dag(std::string_view text) {
  std::istringstream in{std::string(text)};
  std::string line;
  int line_no = 0;
  std::map<int, NodeType> types;
  std::vector<DagEdge> edges;
  while (std::getline(in, line)) {
    ++line_no;
    std::istringstream ls(line);
    std::string word;
    if (!(ls >> word)) continue;
    if (word == "node") {
      int id;
      std::string type;
      if (!(ls >> id >> type)) throw ParseError(line_no, 1, "malformed node line");
      const auto t = node_type_from_name(type);
      if (!t) throw ParseError(line_no, 1, "unknown node type '" + type + "'");
      if (!types.emplace(id, *t).second) {
        throw ParseError(line_no, 1, "duplicate node id " + std::to_string(id));
      }
    } else if (word == "edge") {
      DagEdge e;
      if (!(ls >> e.src >> e.dst >> e.wire)) {
        throw ParseError(line_no, 1, "malformed edge line");
      }
      edges.push_back(e);
    } else {
      throw ParseError(line_no, 1, "expected 'node' or 'edge', found '" + word + "'");
    }
  }
  CircuitDag d;
  const int n = static_cast<int>(types.size());
  for (const auto& [id, t] : types) {
    if (id != static_cast<int>(d.nodes.size())) {
      throw ParseError(0, 0, "node ids must be contiguous from 0");
    }
    d.nodes.push_back(DagNode{t, 0, 0});
  }
  for (const DagEdge& e : edges) {
    if (e.src < 0 || e.src >= n || e.dst < 0 || e.dst >= n) {
      throw ParseError(0, 0, "edge references unknown node");
    }
  }
  d.edges = std::move(edges);
  d.n_wires = static_cast<int>(count_nodes(d, NodeType::kInput)) - 1;

  // Reconstruct tie-break attributes: the smallest incident wire label, and
  // the longest-path layer from the sources.
  std::vector<int> wire(n, 1 << 20);
  for (const DagEdge& e : d.edges) {
    wire[e.dst] = std::min(wire[e.dst], e.wire);
    if (d.nodes[e.src].type == NodeType::kInput) {
      wire[e.src] = std::min(wire[e.src], e.wire);
    }
  }
  for (int v = 0; v < n; ++v) d.nodes[v].wire = wire[v] == (1 << 20) ? 0 : wire[v];
  std::vector<int> layer(n, 0);
  for (int v = 0; v < n; ++v) d.nodes[v].position = 0;
  const auto order = topo_order(d);
  const auto pred = d.predecessors();
  for (int v : order) {
    for (int u : pred[v]) layer[v] = std::max(layer[v], layer[u] + 1);
  }
  for (int v = 0; v < n; ++v) {
    switch (d.nodes[v].type) {
      case NodeType::kInput: d.nodes[v].position = -1; break;
      case NodeType::kOutput: d.nodes[v].position = kOutputPosition; break;
      default: d.nodes[v].position = layer[v]; break;
    }
  }
  return d;
}

std::string export_corpus(std::span<const CircuitDag> dags) {
  std::string out;
  for (std::size_t i = 0; i < dags.size(); ++i) {
    if (i) out += '\n';
    out += export_dag(dags[i]);
  }
  return out;
}

std::vector<CircuitDag> import_corpus(std::string_view text) {
  std::vector<CircuitDag> out;
  std::string block;
  std::istringstream in{std::string(text)};
  std::string line;
  auto flush = [&] {
    if (!block.empty()) out.push_back(import_dag(block));
    block.clear();
  };
  while (std::getline(in, line)) {
    if (line.find_first_not_of(" \t\r") == std::string::npos) {
      flush();
    } else {
      block += line;
      block += '\n';
    }
  }
  flush();
  return out;
}

}  // namespace qgae
