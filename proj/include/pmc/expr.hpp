#pragma once

#include <charconv>
#include <cmath>
#include <memory>
#include <string>
#include <vector>

#include "pmc/error.hpp"

namespace pmc {

/// Closed-form scalar expression over chart coordinates. Immutable; copies
/// share the underlying tree.
class ScalarExpr {
 public:
  enum class Op { Coordinate, Constant, Add, Sub, Mul, Div, Neg, Pow, Sin, Cos, Exp, Sqrt };

  struct Node {
    Op op;
    double constant = 0.0;
    int index = 0;     // coordinate index, or integer exponent for Pow
    std::vector<std::shared_ptr<const Node>> args;
  };

  ScalarExpr() : ScalarExpr(0.0) {}
  ScalarExpr(double c) : node_(make(Op::Constant, c, 0, {})) {}  // NOLINT(implicit)

  static ScalarExpr coordinate(int i) {
    if (i < 0) throw Error(ErrorCode::UnknownCoordinate, "negative coordinate index");
    return ScalarExpr(make(Op::Coordinate, 0.0, i, {}));
  }
  static ScalarExpr constant(double c) { return ScalarExpr(c); }

  Op op() const { return node_->op; }
  double constant_value() const { return node_->constant; }
  int index() const { return node_->index; }
  int exponent() const { return node_->index; }
  std::size_t arity() const { return node_->args.size(); }
  ScalarExpr arg(std::size_t k) const { return ScalarExpr(node_->args.at(k)); }

  bool is_constant() const { return node_->op == Op::Constant; }
  bool is_zero() const { return is_constant() && node_->constant == 0.0; }

  /// Largest coordinate index referenced, or -1 for coordinate-free trees.
  int max_coordinate() const { return max_coordinate(*node_); }

  /// Validates that every coordinate index is below `dim`.
  const ScalarExpr& bind(int dim) const {
    if (max_coordinate() >= dim) {
      throw Error(ErrorCode::UnknownCoordinate, "expression references coordinate " +
                                                    std::to_string(max_coordinate() + 1) +
                                                    " in a chart of dimension " + std::to_string(dim));
    }
    return *this;
  }

  friend bool operator==(const ScalarExpr& a, const ScalarExpr& b) { return equal(*a.node_, *b.node_); }

  friend ScalarExpr operator+(const ScalarExpr& a, const ScalarExpr& b) { return binary(Op::Add, a, b); }
  friend ScalarExpr operator-(const ScalarExpr& a, const ScalarExpr& b) { return binary(Op::Sub, a, b); }
  friend ScalarExpr operator*(const ScalarExpr& a, const ScalarExpr& b) { return binary(Op::Mul, a, b); }
  friend ScalarExpr operator/(const ScalarExpr& a, const ScalarExpr& b) { return binary(Op::Div, a, b); }
  friend ScalarExpr operator-(const ScalarExpr& a) {
    if (a.is_constant()) return ScalarExpr(-a.constant_value());
    return ScalarExpr(make(Op::Neg, 0.0, 0, {a.node_}));
  }
  friend ScalarExpr pow(const ScalarExpr& a, int n) { return ScalarExpr(make(Op::Pow, 0.0, n, {a.node_})); }
  friend ScalarExpr sin(const ScalarExpr& a) { return unary(Op::Sin, a); }
  friend ScalarExpr cos(const ScalarExpr& a) { return unary(Op::Cos, a); }
  friend ScalarExpr exp(const ScalarExpr& a) { return unary(Op::Exp, a); }
  friend ScalarExpr sqrt(const ScalarExpr& a) { return unary(Op::Sqrt, a); }

  /// Fully parenthesized infix text that the chart-file parser reads back to
  /// an identical tree. Constants are printed in shortest round-trip form.
  std::string to_string(const std::vector<std::string>& coord_names) const {
    std::string out;
    print(*node_, coord_names, out);
    return out;
  }

 private:
  explicit ScalarExpr(std::shared_ptr<const Node> n) : node_(std::move(n)) {}

  static std::shared_ptr<const Node> make(Op op, double c, int idx,
                                          std::vector<std::shared_ptr<const Node>> args) {
    auto n = std::make_shared<Node>();
    n->op = op;
    n->constant = c;
    n->index = idx;
    n->args = std::move(args);
    return n;
  }
  static ScalarExpr binary(Op op, const ScalarExpr& a, const ScalarExpr& b) {
    return ScalarExpr(make(op, 0.0, 0, {a.node_, b.node_}));
  }
  static ScalarExpr unary(Op op, const ScalarExpr& a) { return ScalarExpr(make(op, 0.0, 0, {a.node_})); }

  static int max_coordinate(const Node& n) {
    int m = n.op == Op::Coordinate ? n.index : -1;
    for (const auto& a : n.args) m = std::max(m, max_coordinate(*a));
    return m;
  }

  static bool equal(const Node& a, const Node& b) {
    if (&a == &b) return true;
    if (a.op != b.op || a.index != b.index || a.args.size() != b.args.size()) return false;
    if (a.op == Op::Constant && !(a.constant == b.constant)) return false;
    for (std::size_t k = 0; k < a.args.size(); ++k)
      if (!equal(*a.args[k], *b.args[k])) return false;
    return true;
  }

  static void print_number(double v, std::string& out) {
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof(buf), v);
    out.append(buf, res.ptr);
  }

  static void print(const Node& n, const std::vector<std::string>& names, std::string& out) {
    auto sub = [&](int k) { print(*n.args[static_cast<std::size_t>(k)], names, out); };
    auto infix = [&](const char* sym) {
      out += '(';
      sub(0);
      out += sym;
      sub(1);
      out += ')';
    };
    auto call = [&](const char* fn) {
      out += fn;
      out += '(';
      sub(0);
      out += ')';
    };
    switch (n.op) {
      case Op::Coordinate:
        if (n.index < static_cast<int>(names.size()))
          out += names[static_cast<std::size_t>(n.index)];
        else
          out += "x" + std::to_string(n.index + 1);
        break;
      case Op::Constant:
        if (n.constant < 0 || std::signbit(n.constant)) {
          out += '(';
          print_number(n.constant, out);
          out += ')';
        } else {
          print_number(n.constant, out);
        }
        break;
      case Op::Add: infix(" + "); break;
      case Op::Sub: infix(" - "); break;
      case Op::Mul: infix("*"); break;
      case Op::Div: infix("/"); break;
      case Op::Neg:
        out += "(-";
        sub(0);
        out += ')';
        break;
      case Op::Pow:
        out += '(';
        sub(0);
        out += "^";
        if (n.index < 0) out += '(';
        out += std::to_string(n.index);
        if (n.index < 0) out += ')';
        out += ')';
        break;
      case Op::Sin: call("sin"); break;
      case Op::Cos: call("cos"); break;
      case Op::Exp: call("exp"); break;
      case Op::Sqrt: call("sqrt"); break;
    }
  }

  std::shared_ptr<const Node> node_;
};

/// Sum/product helpers that drop literal zeros and ones; used when the
/// library assembles expressions itself (determinants, default volume).
inline ScalarExpr add_folded(const ScalarExpr& a, const ScalarExpr& b) {
  if (a.is_zero()) return b;
  if (b.is_zero()) return a;
  return a + b;
}

inline ScalarExpr mul_folded(const ScalarExpr& a, const ScalarExpr& b) {
  if (a.is_zero() || b.is_zero()) return ScalarExpr(0.0);
  if (a.is_constant() && a.constant_value() == 1.0) return b;
  if (b.is_constant() && b.constant_value() == 1.0) return a;
  return a * b;
}

/// Determinant of a square matrix of expressions by cofactor expansion.
inline ScalarExpr determinant(const std::vector<ScalarExpr>& m, int n) {
  if (n == 1) return m[0];
  ScalarExpr det(0.0);
  for (int col = 0; col < n; ++col) {
    const ScalarExpr& a = m[static_cast<std::size_t>(col)];
    if (a.is_zero()) continue;
    std::vector<ScalarExpr> minor;
    minor.reserve(static_cast<std::size_t>((n - 1) * (n - 1)));
    for (int r = 1; r < n; ++r)
      for (int c = 0; c < n; ++c)
        if (c != col) minor.push_back(m[static_cast<std::size_t>(r * n + c)]);
    ScalarExpr term = mul_folded(a, determinant(minor, n - 1));
    if (term.is_zero()) continue;
    det = (col % 2 == 0) ? add_folded(det, term) : (det.is_zero() ? -term : det - term);
  }
  return det;
}

}  // namespace pmc
