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

#include "qgae/circuit.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <optional>
#include <random>
#include <sstream>

#include "qgae/error.hpp"

namespace qgae {

bool commutes(const Gate& a, const Gate& b) {
  const bool shared_control = a.is_cx() && b.is_cx() && a.control == b.control;
  if (shared_control) {
    return a.target != b.target;
  }
  auto overlaps = [](const Gate& x, const Gate& y) {
    return y.touches(x.target) || (x.is_cx() && y.touches(x.control));
  };
  return !overlaps(a, b);
}

Circuit::Circuit(int n_wires, std::vector<Gate> gates)
    : n_wires_(n_wires), gates_(std::move(gates)) {}

void Circuit::validate() const {
  if (n_wires_ < 1) {
    throw Error(ErrorCode::kInvalidArgument, "circuit needs at least one wire");
  }
  for (std::size_t i = 0; i < gates_.size(); ++i) {
    const Gate& g = gates_[i];
    auto in_range = [&](int w) { return w >= 0 && w < n_wires_; };
    if (!in_range(g.target) || (g.is_cx() && !in_range(g.control))) {
      throw Error(ErrorCode::kOutOfRange,
                  "gate " + std::to_string(i) + " uses a wire outside 0.." +
                      std::to_string(n_wires_ - 1));
    }
    if (g.is_cx() && g.control == g.target) {
      throw Error(ErrorCode::kInvalidArgument,
                  "gate " + std::to_string(i) + ": control equals target");
    }
  }
}

void BvSpec::validate() const {
  if (n_data < 1 || n_data > 62) {
    throw Error(ErrorCode::kInvalidArgument, "n_data must be in 1..62");
  }
  if (secret >> n_data) {
    throw Error(ErrorCode::kInvalidArgument,
                "secret has more than n_data bits");
  }
}

// ---------------------------------------------------------------------------
// QASM subset

namespace {

struct Token {
  enum Kind { kIdent, kInt, kPunct, kEnd } kind = kEnd;
  std::string text;
  int line = 1;
  int column = 1;
};

class Lexer {
 public:
  explicit Lexer(std::string_view src) : src_(src) {}

  Token next() {
    skip_blank();
    Token t;
    t.line = line_;
    t.column = col_;
    if (pos_ >= src_.size()) return t;
    const char c = src_[pos_];
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      t.kind = Token::kIdent;
      while (pos_ < src_.size() &&
             (std::isalnum(static_cast<unsigned char>(src_[pos_])) ||
              src_[pos_] == '_')) {
        t.text.push_back(advance());
      }
    } else if (std::isdigit(static_cast<unsigned char>(c))) {
      t.kind = Token::kInt;
      while (pos_ < src_.size() &&
             std::isdigit(static_cast<unsigned char>(src_[pos_]))) {
        t.text.push_back(advance());
      }
    } else if (c == '[' || c == ']' || c == ';' || c == ',') {
      t.kind = Token::kPunct;
      t.text.push_back(advance());
    } else {
      throw ParseError(line_, col_, std::string("unexpected character '") + c +
                                        "'");
    }
    return t;
  }

 private:
  char advance() {
    const char c = src_[pos_++];
    if (c == '\n') {
      ++line_;
      col_ = 1;
    } else {
      ++col_;
    }
    return c;
  }

  void skip_blank() {
    while (pos_ < src_.size()) {
      const char c = src_[pos_];
      if (std::isspace(static_cast<unsigned char>(c))) {
        advance();
      } else if (c == '/' && pos_ + 1 < src_.size() && src_[pos_ + 1] == '/') {
        while (pos_ < src_.size() && src_[pos_] != '\n') advance();
      } else {
        break;
      }
    }
  }

  std::string_view src_;
  std::size_t pos_ = 0;
  int line_ = 1;
  int col_ = 1;
};

class QasmParser {
 public:
  explicit QasmParser(std::string_view text) : lex_(text) { tok_ = lex_.next(); }

  Circuit parse() {
    expect_ident("qreg");
    const Token name = take(Token::kIdent, "register name");
    reg_ = name.text;
    expect_punct('[');
    const Token size = take(Token::kInt, "register size");
    const int n = to_int(size);
    if (n < 1) throw ParseError(size.line, size.column, "empty register");
    expect_punct(']');
    expect_punct(';');

    std::vector<Gate> gates;
    while (tok_.kind != Token::kEnd) {
      const Token op = take(Token::kIdent, "gate name");
      if (op.text == "h") {
        const int q = wire(n);
        expect_punct(';');
        gates.push_back(Gate::h(q));
      } else if (op.text == "cx") {
        const Token at = tok_;
        const int c = wire(n);
        expect_punct(',');
        const int t = wire(n);
        expect_punct(';');
        if (c == t) {
          throw ParseError(at.line, at.column, "cx control equals target");
        }
        gates.push_back(Gate::cx(c, t));
      } else {
        throw ParseError(op.line, op.column, "unknown gate '" + op.text + "'");
      }
    }
    return Circuit(n, std::move(gates));
  }

 private:
  int wire(int n) {
    const Token name = take(Token::kIdent, "register name");
    if (name.text != reg_) {
      throw ParseError(name.line, name.column,
                       "unknown register '" + name.text + "'");
    }
    expect_punct('[');
    const Token idx = take(Token::kInt, "wire index");
    const int q = to_int(idx);
    if (q >= n) {
      throw ParseError(idx.line, idx.column,
                       "wire " + idx.text + " out of range for " + reg_ + "[" +
                           std::to_string(n) + "]");
    }
    expect_punct(']');
    return q;
  }

  static int to_int(const Token& t) {
    if (t.text.size() > 9) throw ParseError(t.line, t.column, "integer too large");
    return std::stoi(t.text);
  }

  Token take(Token::Kind kind, const char* what) {
    if (tok_.kind != kind) {
      throw ParseError(tok_.line, tok_.column,
                       std::string("expected ") + what + ", found " + describe(tok_));
    }
    Token t = tok_;
    tok_ = lex_.next();
    return t;
  }

  void expect_ident(const char* word) {
    if (tok_.kind != Token::kIdent || tok_.text != word) {
      throw ParseError(tok_.line, tok_.column,
                       std::string("expected '") + word + "', found " + describe(tok_));
    }
    tok_ = lex_.next();
  }

  void expect_punct(char p) {
    if (tok_.kind != Token::kPunct || tok_.text[0] != p) {
      throw ParseError(tok_.line, tok_.column,
                       std::string("expected '") + p + "', found " + describe(tok_));
    }
    tok_ = lex_.next();
  }

  static std::string describe(const Token& t) {
    return t.kind == Token::kEnd ? "end of input" : "'" + t.text + "'";
  }

  Lexer lex_;
  Token tok_;
  std::string reg_;
};

}  // namespace

Circuit parse_qasm(std::string_view text) { return QasmParser(text).parse(); }

std::string serialize_qasm(const Circuit& c) {
  std::ostringstream os;
  os << "qreg q[" << c.n_wires() << "];\n";
  for (const Gate& g : c.gates()) {
    if (g.is_h()) {
      os << "h q[" << g.target << "];\n";
    } else {
      os << "cx q[" << g.control << "],q[" << g.target << "];\n";
    }
  }
  return os.str();
}

std::string state_string(const Circuit& c) {
  std::string out;
  out.reserve(c.size() * 8);
  for (std::size_t i = 0; i < c.size(); ++i) {
    const Gate& g = c[i];
    if (i) out += ", ";
    if (g.is_h()) {
      out += "h ";
      out += std::to_string(g.target);
    } else {
      out += "cx ";
      out += std::to_string(g.control);
      out += ' ';
      out += std::to_string(g.target);
    }
  }
  return out;
}

int depth(const Circuit& c) {
  // any[w]: latest moment of any gate on w.
  // blocking[w]: latest moment of a gate on w that is not a CNOT controlled by w.
  std::vector<int> any(c.n_wires(), 0);
  std::vector<int> blocking(c.n_wires(), 0);
  int total = 0;
  for (const Gate& g : c.gates()) {
    int m;
    if (g.is_h()) {
      m = 1 + any[g.target];
    } else {
      m = 1 + std::max(blocking[g.control], any[g.target]);
      any[g.control] = std::max(any[g.control], m);
    }
    any[g.target] = std::max(any[g.target], m);
    blocking[g.target] = std::max(blocking[g.target], m);
    total = std::max(total, m);
  }
  return total;
}

Eigen::MatrixXcd unitary(const Circuit& c) {
  const int n = c.n_wires();
  if (n > kMaxUnitaryWires) {
    throw Error(ErrorCode::kDimension,
                "unitary limited to " + std::to_string(kMaxUnitaryWires) +
                    " wires, circuit has " + std::to_string(n));
  }
  const Eigen::Index dim = Eigen::Index{1} << n;
  Eigen::MatrixXcd u = Eigen::MatrixXcd::Identity(dim, dim);
  const double s = 1.0 / std::sqrt(2.0);
  for (const Gate& g : c.gates()) {
    const Eigen::Index tbit = Eigen::Index{1} << g.target;
    if (g.is_h()) {
      for (Eigen::Index r = 0; r < dim; ++r) {
        if (r & tbit) continue;
        const Eigen::Index r1 = r | tbit;
        for (Eigen::Index col = 0; col < dim; ++col) {
          const std::complex<double> a = u(r, col);
          const std::complex<double> b = u(r1, col);
          u(r, col) = s * (a + b);
          u(r1, col) = s * (a - b);
        }
      }
    } else {
      const Eigen::Index cbit = Eigen::Index{1} << g.control;
      for (Eigen::Index r = 0; r < dim; ++r) {
        if ((r & cbit) && !(r & tbit)) u.row(r).swap(u.row(r | tbit));
      }
    }
  }
  return u;
}

Circuit bv_circuit(const BvSpec& spec) {
  spec.validate();
  const int n = spec.n_data + 1;
  std::vector<Gate> gates;
  for (int q = 0; q < n; ++q) gates.push_back(Gate::h(q));
  for (int i = 0; i < spec.n_data; ++i) {
    if ((spec.secret >> i) & 1u) gates.push_back(Gate::cx(i, spec.n_data));
  }
  for (int q = 0; q < n; ++q) gates.push_back(Gate::h(q));
  return Circuit(n, std::move(gates));
}

Circuit random_icmh_circuit(int n_wires, int n_gates, std::uint64_t seed) {
  if (n_wires < 2) {
    throw Error(ErrorCode::kInvalidArgument, "random circuits need >= 2 wires");
  }
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<int> coin(0, 1);
  std::uniform_int_distribution<int> wire(0, n_wires - 1);
  std::uniform_int_distribution<int> other(0, n_wires - 2);
  std::vector<Gate> gates;
  gates.reserve(n_gates);
  for (int i = 0; i < n_gates; ++i) {
    if (coin(rng) == 0) {
      gates.push_back(Gate::h(wire(rng)));
    } else {
      const int c = wire(rng);
      int t = other(rng);
      if (t >= c) ++t;
      gates.push_back(Gate::cx(c, t));
    }
  }
  return Circuit(n_wires, std::move(gates));
}

}  // namespace qgae
