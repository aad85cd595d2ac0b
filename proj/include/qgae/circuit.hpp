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

#include <complex>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

namespace qgae {

enum class GateKind : std::uint8_t { kH, kCnot };

/// One H or CNOT gate. For H only `target` is meaningful and `control` is -1.
struct Gate {
  GateKind kind = GateKind::kH;
  int control = -1;
  int target = 0;

  static Gate h(int wire) { return Gate{GateKind::kH, -1, wire}; }
  static Gate cx(int control, int target) {
    return Gate{GateKind::kCnot, control, target};
  }

  bool is_h() const { return kind == GateKind::kH; }
  bool is_cx() const { return kind == GateKind::kCnot; }
  bool touches(int wire) const { return target == wire || control == wire; }

  friend bool operator==(const Gate&, const Gate&) = default;
};

/// True when the two gates may be swapped: disjoint supports, or two CNOTs
/// that share only their control wire.
bool commutes(const Gate& a, const Gate& b);

class Circuit {
 public:
  Circuit() = default;
  explicit Circuit(int n_wires, std::vector<Gate> gates = {});

  int n_wires() const { return n_wires_; }
  const std::vector<Gate>& gates() const { return gates_; }
  std::size_t size() const { return gates_.size(); }
  bool empty() const { return gates_.empty(); }
  const Gate& operator[](std::size_t i) const { return gates_[i]; }

  /// Throws Error(kOutOfRange / kInvalidArgument) on the first bad gate.
  void validate() const;

  friend bool operator==(const Circuit&, const Circuit&) = default;

 private:
  int n_wires_ = 0;
  std::vector<Gate> gates_;
};

/// Hidden-string benchmark definition. The ancilla is wire `n_data`.
struct BvSpec {
  int n_data = 2;
  std::uint64_t secret = 3;

  void validate() const;
};

Circuit parse_qasm(std::string_view text);
std::string serialize_qasm(const Circuit& c);

/// Comma-joined lowercase gate list, e.g. "cx 0 1, h 2".
std::string state_string(const Circuit& c);

/// ASAP schedule length; two CNOTs sharing only their control never conflict.
int depth(const Circuit& c);

inline constexpr int kMaxUnitaryWires = 6;

/// Full 2^n x 2^n unitary, wire 0 is the least significant bit.
Eigen::MatrixXcd unitary(const Circuit& c);

Circuit bv_circuit(const BvSpec& spec);

Circuit random_icmh_circuit(int n_wires, int n_gates, std::uint64_t seed);

}  // namespace qgae
