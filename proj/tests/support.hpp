#pragma once

// Test-only oracles: a long double evaluator that walks the expression tree
// independently of the jet engine, central differences with Richardson
// extrapolation, and random smooth expressions.

#include <array>
#include <cmath>
#include <random>
#include <vector>

#include "pmc/pmc.hpp"

namespace testing_support {

using pmc::ScalarExpr;
using Op = ScalarExpr::Op;

inline long double eval_ld(const ScalarExpr& e, const std::vector<long double>& x) {
  switch (e.op()) {
    case Op::Coordinate: return x[static_cast<std::size_t>(e.index())];
    case Op::Constant: return e.constant_value();
    case Op::Add: return eval_ld(e.arg(0), x) + eval_ld(e.arg(1), x);
    case Op::Sub: return eval_ld(e.arg(0), x) - eval_ld(e.arg(1), x);
    case Op::Mul: return eval_ld(e.arg(0), x) * eval_ld(e.arg(1), x);
    case Op::Div: return eval_ld(e.arg(0), x) / eval_ld(e.arg(1), x);
    case Op::Neg: return -eval_ld(e.arg(0), x);
    case Op::Pow: return std::pow(eval_ld(e.arg(0), x), static_cast<long double>(e.exponent()));
    case Op::Sin: return std::sin(eval_ld(e.arg(0), x));
    case Op::Cos: return std::cos(eval_ld(e.arg(0), x));
    case Op::Exp: return std::exp(eval_ld(e.arg(0), x));
    case Op::Sqrt: return std::sqrt(eval_ld(e.arg(0), x));
  }
  return 0.0L;
}

// central stencils with O(h^2) error for derivative orders 0..4, offsets -2..2
inline const std::array<std::array<long double, 5>, 5>& stencils() {
  static const std::array<std::array<long double, 5>, 5> s = {{
      {0, 0, 1, 0, 0},
      {0, -0.5L, 0, 0.5L, 0},
      {0, 1, -2, 1, 0},
      {-0.5L, 1, 0, -1, 0.5L},
      {1, -4, 6, -4, 1},
  }};
  return s;
}

inline long double fd_once(const ScalarExpr& e, const std::vector<double>& p, const std::vector<int>& alpha,
                           long double h) {
  const std::size_t n = p.size();
  long double acc = 0.0L;
  std::vector<int> off(n, -2);
  std::vector<long double> x(n);
  while (true) {
    long double w = 1.0L;
    for (std::size_t i = 0; i < n; ++i) w *= stencils()[static_cast<std::size_t>(alpha[i])][static_cast<std::size_t>(off[i] + 2)];
    if (w != 0.0L) {
      for (std::size_t i = 0; i < n; ++i) x[i] = static_cast<long double>(p[i]) + off[i] * h;
      acc += w * eval_ld(e, x);
    }
    std::size_t k = 0;
    while (k < n && ++off[k] > 2) off[k++] = -2;
    if (k == n) break;
  }
  int deg = 0;
  for (int a : alpha) deg += a;
  return acc / std::pow(h, static_cast<long double>(deg));
}

/// d^alpha e at p by central differences, extrapolated to O(h^6).
inline double finite_difference(const ScalarExpr& e, const std::vector<double>& p, const std::vector<int>& alpha,
                                long double h = 2e-2L) {
  const long double d1 = fd_once(e, p, alpha, h), d2 = fd_once(e, p, alpha, h / 2), d3 = fd_once(e, p, alpha, h / 4);
  const long double r1 = (4 * d2 - d1) / 3, r2 = (4 * d3 - d2) / 3;
  return static_cast<double>((16 * r2 - r1) / 15);
}

/// Random smooth expression in `dim` coordinates, bounded on [-1, 1]^dim.
inline ScalarExpr random_expr(std::mt19937_64& rng, int dim, int depth) {
  std::uniform_int_distribution<int> pick(0, depth <= 0 ? 1 : 9);
  std::uniform_real_distribution<double> coef(-1.5, 1.5);
  std::uniform_int_distribution<int> coord(0, dim - 1);
  switch (pick(rng)) {
    case 0: return ScalarExpr::coordinate(coord(rng));
    case 1: return ScalarExpr(coef(rng)) * ScalarExpr::coordinate(coord(rng)) + ScalarExpr(coef(rng));
    case 2: return random_expr(rng, dim, depth - 1) + random_expr(rng, dim, depth - 1);
    case 3: return random_expr(rng, dim, depth - 1) - random_expr(rng, dim, depth - 1);
    case 4: return random_expr(rng, dim, depth - 1) * random_expr(rng, dim, depth - 1);
    case 5: return sin(random_expr(rng, dim, depth - 1));
    case 6: return cos(random_expr(rng, dim, depth - 1));
    case 7: return exp(ScalarExpr(0.3) * sin(random_expr(rng, dim, depth - 1)));
    case 8: return random_expr(rng, dim, depth - 1) / (ScalarExpr(2.0) + cos(random_expr(rng, dim, depth - 1)));
    default: {
      const auto s = sin(random_expr(rng, dim, depth - 1));
      return std::uniform_int_distribution<int>(0, 1)(rng) ? pow(s, 3) : sqrt(ScalarExpr(1.5) + s);
    }
  }
}

inline std::vector<double> random_point(std::mt19937_64& rng, int dim, double lo = -1.0, double hi = 1.0) {
  std::uniform_real_distribution<double> u(lo, hi);
  std::vector<double> p(static_cast<std::size_t>(dim));
  for (auto& v : p) v = u(rng);
  return p;
}

/// All multi-indices of exact total degree `deg` in `dim` variables.
inline std::vector<std::vector<int>> multi_indices_of_degree(int dim, int deg) {
  std::vector<std::vector<int>> out;
  std::vector<int> cur(static_cast<std::size_t>(dim), 0);
  auto rec = [&](auto&& self, int i, int left) -> void {
    if (i == dim - 1) {
      cur[static_cast<std::size_t>(i)] = left;
      out.push_back(cur);
      return;
    }
    for (int a = left; a >= 0; --a) {
      cur[static_cast<std::size_t>(i)] = a;
      self(self, i + 1, left - a);
    }
  };
  rec(rec, 0, deg);
  return out;
}

inline double rel_err(double got, double want) { return std::abs(got - want) / std::max(1.0, std::abs(want)); }

}  // namespace testing_support
