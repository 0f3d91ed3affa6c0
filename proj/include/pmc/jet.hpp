#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <memory>
#include <mutex>
#include <span>
#include <string>
#include <vector>

#include "pmc/error.hpp"
#include "pmc/expr.hpp"

namespace pmc {

inline constexpr int kMaxOrder = 4;
inline constexpr int kMaxDim = 6;

using MultiIndex = std::array<std::uint8_t, kMaxDim>;

/// Multi-indices of total degree <= kMaxOrder for one dimension.
///
/// Storage order is graded: all indices of degree 0, then degree 1, and so
/// on. Within a degree the exponent tuples are sorted lexicographically in
/// descending order, first coordinate most significant. For dim 2 this gives
///   (0,0) (1,0) (0,1) (2,0) (1,1) (0,2) (3,0) ...
/// A jet of order k therefore occupies exactly the first size(k) slots, and
/// truncation is a prefix copy.
class MultiIndexSet {
 public:
  struct ProductTerm {
    std::uint16_t a, b, c;
    double coef;  // prod_i binom(c_i, a_i)
  };

  explicit MultiIndexSet(int dim) : dim_(dim) {
    for (int deg = 0; deg <= kMaxOrder; ++deg) {
      MultiIndex cur{};
      enumerate(deg, 0, cur);
      prefix_[static_cast<std::size_t>(deg)] = indices_.size();
    }
    std::size_t keys = 1;
    for (int i = 0; i < dim_; ++i) keys *= kMaxOrder + 1;
    lookup_.assign(keys, -1);
    for (std::size_t p = 0; p < indices_.size(); ++p) lookup_[key(indices_[p])] = static_cast<int>(p);

    for (int i = 0; i < dim_; ++i) {
      auto& row = shift_[static_cast<std::size_t>(i)];
      row.assign(indices_.size(), -1);
      for (std::size_t p = 0; p < indices_.size(); ++p) {
        MultiIndex m = indices_[p];
        if (degree(m) == kMaxOrder) continue;
        ++m[static_cast<std::size_t>(i)];
        row[p] = lookup_[key(m)];
      }
    }

    for (std::size_t pa = 0; pa < indices_.size(); ++pa) {
      for (std::size_t pb = 0; pb < indices_.size(); ++pb) {
        const MultiIndex& a = indices_[pa];
        const MultiIndex& b = indices_[pb];
        if (degree(a) + degree(b) > kMaxOrder) continue;
        MultiIndex c{};
        double coef = 1.0;
        for (int i = 0; i < dim_; ++i) {
          auto k = static_cast<std::size_t>(i);
          c[k] = static_cast<std::uint8_t>(a[k] + b[k]);
          coef *= binomial(c[k], a[k]);
        }
        products_.push_back({static_cast<std::uint16_t>(pa), static_cast<std::uint16_t>(pb),
                             static_cast<std::uint16_t>(lookup_[key(c)]), coef});
      }
    }
    std::stable_sort(products_.begin(), products_.end(),
                     [](const ProductTerm& x, const ProductTerm& y) { return x.c < y.c; });
    for (int k = 0; k <= kMaxOrder; ++k) {
      const auto limit = prefix_[static_cast<std::size_t>(k)];
      product_prefix_[static_cast<std::size_t>(k)] = static_cast<std::size_t>(
          std::find_if(products_.begin(), products_.end(), [&](const ProductTerm& t) { return t.c >= limit; }) -
          products_.begin());
    }
  }

  int dim() const { return dim_; }
  std::size_t size(int order) const { return prefix_[static_cast<std::size_t>(order)]; }
  const MultiIndex& at(std::size_t pos) const { return indices_[pos]; }
  int degree_at(std::size_t pos) const { return degree(indices_[pos]); }

  /// Position of a multi-index, or -1 if its degree exceeds kMaxOrder.
  int position(std::span<const int> alpha) const {
    MultiIndex m{};
    int deg = 0;
    for (std::size_t i = 0; i < alpha.size(); ++i) {
      if (alpha[i] < 0) return -1;
      deg += alpha[i];
      if (deg > kMaxOrder) return -1;
      m[i] = static_cast<std::uint8_t>(alpha[i]);
    }
    return lookup_[key(m)];
  }

  /// Position of alpha + e_i, or -1.
  int shifted(int i, std::size_t pos) const { return shift_[static_cast<std::size_t>(i)][pos]; }

  std::span<const ProductTerm> products(int order) const {
    return {products_.data(), product_prefix_[static_cast<std::size_t>(order)]};
  }

  static int degree(const MultiIndex& m) {
    int d = 0;
    for (auto v : m) d += v;
    return d;
  }

 private:
  void enumerate(int remaining, int coord, MultiIndex& cur) {
    if (coord == dim_ - 1) {
      cur[static_cast<std::size_t>(coord)] = static_cast<std::uint8_t>(remaining);
      indices_.push_back(cur);
      cur[static_cast<std::size_t>(coord)] = 0;
      return;
    }
    for (int e = remaining; e >= 0; --e) {
      cur[static_cast<std::size_t>(coord)] = static_cast<std::uint8_t>(e);
      enumerate(remaining - e, coord + 1, cur);
    }
    cur[static_cast<std::size_t>(coord)] = 0;
  }

  std::size_t key(const MultiIndex& m) const {
    std::size_t k = 0;
    for (int i = 0; i < dim_; ++i) k = k * (kMaxOrder + 1) + m[static_cast<std::size_t>(i)];
    return k;
  }

  static double binomial(int n, int k) {
    double r = 1.0;
    for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
    return r;
  }

  int dim_;
  std::vector<MultiIndex> indices_;
  std::array<std::size_t, kMaxOrder + 1> prefix_{};
  std::vector<int> lookup_;
  std::array<std::vector<int>, kMaxDim> shift_;
  std::vector<ProductTerm> products_;
  std::array<std::size_t, kMaxOrder + 1> product_prefix_{};
};

/// Shared, lazily built table for `dim` in [1, kMaxDim].
inline const MultiIndexSet& multi_indices(int dim) {
  if (dim < 1 || dim > kMaxDim)
    throw Error(ErrorCode::DimensionMismatch, "chart dimension must be in [1, 6], got " + std::to_string(dim));
  static std::array<std::unique_ptr<MultiIndexSet>, kMaxDim + 1> tables;
  static std::array<std::once_flag, kMaxDim + 1> flags;
  auto d = static_cast<std::size_t>(dim);
  std::call_once(flags[d], [&] { tables[d] = std::make_unique<MultiIndexSet>(dim); });
  return *tables[d];
}

/// Truncated multivariate Taylor expansion of a scalar at a point.
///
/// Coefficients are raw partial derivatives (not divided by factorials),
/// stored in the order defined by MultiIndexSet. A jet with dim() == 0 is a
/// plain constant that combines with jets of any dimension and order.
class Jet {
 public:
  Jet() : Jet(0.0) {}
  Jet(double c) : dim_(0), order_(kMaxOrder), c_{c} {}  // NOLINT(implicit)

  static Jet constant(int dim, int order, double c) {
    Jet j(dim, order);
    j.c_[0] = c;
    return j;
  }

  /// The coordinate function x^i expanded at a point whose i-th entry is `at`.
  static Jet variable(int dim, int order, int i, double at) {
    Jet j = constant(dim, order, at);
    if (order >= 1) j.c_[static_cast<std::size_t>(1 + i)] = 1.0;
    return j;
  }

  /// Jet from raw coefficients in storage order.
  static Jet from_coefficients(int dim, int order, std::vector<double> coeffs) {
    Jet j(dim, order);
    if (coeffs.size() != j.c_.size())
      throw Error(ErrorCode::DimensionMismatch, "coefficient count does not match (dim, order)");
    j.c_ = std::move(coeffs);
    return j;
  }

  int dim() const { return dim_; }
  int order() const { return order_; }
  bool is_constant() const { return dim_ == 0; }
  double value() const { return c_[0]; }
  std::span<const double> coefficients() const { return c_; }

  /// Raw partial derivative d^alpha at the expansion point.
  double partial(std::span<const int> alpha) const {
    int deg = 0;
    for (int a : alpha) deg += a;
    if (deg == 0) return c_[0];
    if (dim_ == 0) return 0.0;
    if (static_cast<int>(alpha.size()) != dim_)
      throw Error(ErrorCode::DimensionMismatch, "multi-index length does not match jet dimension");
    if (deg > order_)
      throw Error(ErrorCode::IndexOutOfOrder, "multi-index degree " + std::to_string(deg) +
                                                  " exceeds jet order " + std::to_string(order_));
    return c_[static_cast<std::size_t>(multi_indices(dim_).position(alpha))];
  }
  double partial(std::initializer_list<int> alpha) const {
    return partial(std::span<const int>(alpha.begin(), alpha.size()));
  }

  /// d/dx^i as a jet of one lower order.
  Jet derivative(int i) const {
    if (dim_ == 0) return Jet(0.0);
    if (order_ == 0) throw Error(ErrorCode::IndexOutOfOrder, "cannot differentiate an order-0 jet");
    const auto& t = multi_indices(dim_);
    Jet r(dim_, order_ - 1);
    for (std::size_t p = 0; p < r.c_.size(); ++p) r.c_[p] = c_[static_cast<std::size_t>(t.shifted(i, p))];
    return r;
  }

  Jet truncated(int order) const {
    if (dim_ == 0 || order >= order_) return *this;
    Jet r(dim_, order);
    std::copy_n(c_.begin(), r.c_.size(), r.c_.begin());
    return r;
  }

  double max_abs() const {
    double m = 0.0;
    for (double v : c_) m = std::max(m, std::abs(v));
    return m;
  }

  Jet& operator+=(const Jet& o) { return *this = *this + o; }
  Jet& operator-=(const Jet& o) { return *this = *this - o; }
  Jet& operator*=(const Jet& o) { return *this = *this * o; }

  friend Jet operator+(const Jet& a, const Jet& b) { return combine(a, b, 1.0); }
  friend Jet operator-(const Jet& a, const Jet& b) { return combine(a, b, -1.0); }
  friend Jet operator-(const Jet& a) {
    Jet r = a;
    for (double& v : r.c_) v = -v;
    return r;
  }

  friend Jet operator*(const Jet& a, const Jet& b) {
    if (a.dim_ == 0) return b.scaled(a.c_[0]);
    if (b.dim_ == 0) return a.scaled(b.c_[0]);
    check_dims(a, b);
    Jet r(a.dim_, std::min(a.order_, b.order_));
    for (const auto& t : multi_indices(a.dim_).products(r.order_)) r.c_[t.c] += t.coef * a.c_[t.a] * b.c_[t.b];
    return r;
  }

  friend Jet operator/(const Jet& a, const Jet& b) { return a * reciprocal(b); }

  /// F(u) from the derivatives F(u0), F'(u0), ..., F^(k)(u0) with u0 = u.value().
  friend Jet compose(const Jet& u, std::span<const double> derivs) {
    const int needed = u.dim_ == 0 ? 0 : std::min<int>(u.order_, static_cast<int>(derivs.size()) - 1);
    for (int k = 0; k <= needed; ++k)
      if (!std::isfinite(derivs[static_cast<std::size_t>(k)]))
        throw Error(ErrorCode::NonFinite, "non-finite derivative in composition");
    if (u.dim_ == 0) return Jet(derivs[0]);
    Jet du = u;
    du.c_[0] = 0.0;
    Jet r = constant(u.dim_, u.order_, derivs[0]);
    Jet power = constant(u.dim_, u.order_, 1.0);
    double factorial = 1.0;
    for (int k = 1; k <= u.order_ && k < static_cast<int>(derivs.size()); ++k) {
      power = power * du;
      factorial *= k;
      r = r + power.scaled(derivs[static_cast<std::size_t>(k)] / factorial);
    }
    return r;
  }

  friend Jet reciprocal(const Jet& u) {
    const double v = u.value();
    if (v == 0.0 || !std::isfinite(v)) throw Error(ErrorCode::NonFinite, "division by zero");
    std::array<double, kMaxOrder + 1> d{};
    double p = 1.0 / v;
    double sign = 1.0, fact = 1.0;
    for (int k = 0; k <= kMaxOrder; ++k) {
      if (k > 0) fact *= k;
      d[static_cast<std::size_t>(k)] = sign * fact * p;
      p /= v;
      sign = -sign;
    }
    return compose(u, d);
  }

  friend Jet sin(const Jet& u) {
    const double s = std::sin(u.value()), c = std::cos(u.value());
    const std::array<double, kMaxOrder + 1> d{s, c, -s, -c, s};
    return compose(u, d);
  }
  friend Jet cos(const Jet& u) {
    const double s = std::sin(u.value()), c = std::cos(u.value());
    const std::array<double, kMaxOrder + 1> d{c, -s, -c, s, c};
    return compose(u, d);
  }
  friend Jet exp(const Jet& u) {
    const double e = std::exp(u.value());
    if (!std::isfinite(e)) throw Error(ErrorCode::NonFinite, "exp overflow");
    const std::array<double, kMaxOrder + 1> d{e, e, e, e, e};
    return compose(u, d);
  }
  friend Jet sqrt(const Jet& u) {
    const double v = u.value();
    if (v < 0.0 || (v == 0.0 && !u.is_constant() && u.order_ > 0))
      throw Error(ErrorCode::NonFinite, "sqrt of non-positive value");
    std::array<double, kMaxOrder + 1> d{};
    double coef = 1.0, e = 0.5;
    for (int k = 0; k <= kMaxOrder; ++k) {
      d[static_cast<std::size_t>(k)] = coef * std::pow(v, e);
      coef *= e;
      e -= 1.0;
    }
    return compose(u, d);
  }

  /// Integer power; negative exponents require a nonzero base value.
  friend Jet pow(const Jet& u, int n) {
    if (n >= 0) {
      Jet r = u.dim_ == 0 ? Jet(1.0) : constant(u.dim_, u.order_, 1.0);
      Jet base = u;
      for (int e = n; e > 0; e >>= 1) {
        if (e & 1) r = r * base;
        if (e > 1) base = base * base;
      }
      return r;
    }
    return pow(reciprocal(u), -n);
  }

 private:
  Jet(int dim, int order) : dim_(dim), order_(order), c_(multi_indices(dim).size(order), 0.0) {}

  Jet scaled(double s) const {
    Jet r = *this;
    for (double& v : r.c_) v *= s;
    return r;
  }

  static void check_dims(const Jet& a, const Jet& b) {
    if (a.dim_ != b.dim_) throw Error(ErrorCode::DimensionMismatch, "jets of different dimension combined");
  }

  static Jet combine(const Jet& a, const Jet& b, double sb) {
    if (a.dim_ == 0 && b.dim_ == 0) return Jet(a.c_[0] + sb * b.c_[0]);
    if (a.dim_ == 0) {
      Jet r = b.scaled(sb);
      r.c_[0] += a.c_[0];
      return r;
    }
    if (b.dim_ == 0) {
      Jet r = a;
      r.c_[0] += sb * b.c_[0];
      return r;
    }
    check_dims(a, b);
    Jet r(a.dim_, std::min(a.order_, b.order_));
    for (std::size_t p = 0; p < r.c_.size(); ++p) r.c_[p] = a.c_[p] + sb * b.c_[p];
    return r;
  }

  int dim_;
  int order_;
  std::vector<double> c_;
};

namespace detail {

inline Jet eval_node(const ScalarExpr& e, const std::vector<Jet>& vars) {
  using Op = ScalarExpr::Op;
  switch (e.op()) {
    case Op::Coordinate: return vars[static_cast<std::size_t>(e.index())];
    case Op::Constant: return Jet(e.constant_value());
    case Op::Add: return eval_node(e.arg(0), vars) + eval_node(e.arg(1), vars);
    case Op::Sub: return eval_node(e.arg(0), vars) - eval_node(e.arg(1), vars);
    case Op::Mul: return eval_node(e.arg(0), vars) * eval_node(e.arg(1), vars);
    case Op::Div: return eval_node(e.arg(0), vars) / eval_node(e.arg(1), vars);
    case Op::Neg: return -eval_node(e.arg(0), vars);
    case Op::Pow: return pow(eval_node(e.arg(0), vars), e.exponent());
    case Op::Sin: return sin(eval_node(e.arg(0), vars));
    case Op::Cos: return cos(eval_node(e.arg(0), vars));
    case Op::Exp: return exp(eval_node(e.arg(0), vars));
    case Op::Sqrt: return sqrt(eval_node(e.arg(0), vars));
  }
  throw Error(ErrorCode::InvalidInput, "unknown expression node");
}

}  // namespace detail

/// Jet of `expr` at `point` up to total degree `order`. The result always has
/// the chart dimension, even for coordinate-free expressions.
inline Jet eval_jet(const ScalarExpr& expr, std::span<const double> point, int order) {
  if (order > kMaxOrder || order < 0)
    throw Error(ErrorCode::OrderTooHigh, "jet order " + std::to_string(order) + " outside [0, 4]");
  const int dim = static_cast<int>(point.size());
  expr.bind(dim);
  std::vector<Jet> vars;
  vars.reserve(point.size());
  for (int i = 0; i < dim; ++i) vars.push_back(Jet::variable(dim, order, i, point[static_cast<std::size_t>(i)]));
  Jet r = detail::eval_node(expr, vars);
  if (r.is_constant() && dim > 0) r = Jet::constant(dim, order, r.value());
  for (double c : r.coefficients())
    if (!std::isfinite(c)) throw Error(ErrorCode::NonFinite, "expression is not finite at the point");
  return r;
}

/// Stored raw partial derivative; alias for Jet::partial.
inline double jet_partial(const Jet& jet, std::span<const int> alpha) { return jet.partial(alpha); }

/// Plain value of an expression at a point.
inline double evaluate(const ScalarExpr& expr, std::span<const double> point) {
  return eval_jet(expr, point, 0).value();
}

}  // namespace pmc
