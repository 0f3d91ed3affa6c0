#pragma once

#include <algorithm>
#include <array>
#include <bit>
#include <cmath>
#include <cstdint>
#include <mutex>
#include <span>
#include <string>
#include <vector>

#include "pmc/error.hpp"
#include "pmc/expr.hpp"
#include "pmc/jet.hpp"

namespace pmc {

/// Increasing index tuples of length p drawn from {0..n-1}, in lexicographic
/// order, addressed by bitmask.
class IndexCombos {
 public:
  IndexCombos(int n, int p) : n_(n), p_(p) {
    position_.fill(-1);
    std::vector<int> cur;
    build(0, cur);
  }

  std::size_t size() const { return tuples_.size(); }
  std::span<const int> tuple(std::size_t k) const { return tuples_[k]; }
  std::uint32_t mask(std::size_t k) const { return masks_[k]; }
  int position(std::uint32_t mask) const { return position_[mask]; }

 private:
  void build(int start, std::vector<int>& cur) {
    if (static_cast<int>(cur.size()) == p_) {
      std::uint32_t m = 0;
      for (int i : cur) m |= 1u << i;
      position_[m] = static_cast<int>(tuples_.size());
      tuples_.push_back(cur);
      masks_.push_back(m);
      return;
    }
    for (int i = start; i < n_; ++i) {
      cur.push_back(i);
      build(i + 1, cur);
      cur.pop_back();
    }
  }

  int n_, p_;
  std::vector<std::vector<int>> tuples_;
  std::vector<std::uint32_t> masks_;
  std::array<int, 1u << kMaxDim> position_{};
};

inline const IndexCombos& index_combos(int n, int p) {
  if (n < 1 || n > kMaxDim || p < 0 || p > kMaxDim)
    throw Error(ErrorCode::DegreeOverflow, "no degree-" + std::to_string(p) + " components in dimension " +
                                               std::to_string(n));
  static std::array<std::array<std::unique_ptr<IndexCombos>, kMaxDim + 1>, kMaxDim + 1> tables;
  static std::array<std::array<std::once_flag, kMaxDim + 1>, kMaxDim + 1> flags;
  auto un = static_cast<std::size_t>(n), up = static_cast<std::size_t>(p);
  std::call_once(flags[un][up], [&] { tables[un][up] = std::make_unique<IndexCombos>(n, p); });
  return *tables[un][up];
}

/// Sign of the permutation sorting `idx`, or 0 if an index repeats. Writes
/// the bitmask of the index set to `mask`.
inline int permutation_sign(std::span<const int> idx, std::uint32_t& mask) {
  mask = 0;
  int inversions = 0;
  for (std::size_t a = 0; a < idx.size(); ++a) {
    const std::uint32_t bit = 1u << idx[a];
    if (mask & bit) return 0;
    mask |= bit;
    for (std::size_t b = a + 1; b < idx.size(); ++b)
      if (idx[a] > idx[b]) ++inversions;
  }
  return inversions % 2 == 0 ? 1 : -1;
}

enum class Variance { Covariant, Contravariant };

/// Totally antisymmetric tensor of one variance: a differential form or a
/// multivector, at a point (T = double), as jets (T = Jet), or as
/// expressions (T = ScalarExpr). Only the increasing-index components are
/// stored; any other index order is reached through `at` with its sign.
template <class T, Variance V>
class Alternating {
 public:
  Alternating() = default;
  Alternating(int dim, int degree, T zero = T{})
      : dim_(dim), degree_(degree), comps_(index_combos(dim, degree).size(), zero) {}

  /// Builds from all n^p components (row-major in the index tuple),
  /// rejecting input that is not antisymmetric to within `tol`.
  static Alternating from_dense(int dim, int degree, std::span<const T> dense, double tol = 1e-12)
    requires std::is_floating_point_v<T>
  {
    std::size_t total = 1;
    for (int k = 0; k < degree; ++k) total *= static_cast<std::size_t>(dim);
    if (dense.size() != total) throw Error(ErrorCode::DimensionMismatch, "dense component count mismatch");
    Alternating out(dim, degree);
    std::vector<int> idx(static_cast<std::size_t>(degree));
    for (std::size_t flat = 0; flat < total; ++flat) {
      std::size_t rem = flat;
      for (int k = degree - 1; k >= 0; --k) {
        idx[static_cast<std::size_t>(k)] = static_cast<int>(rem % static_cast<std::size_t>(dim));
        rem /= static_cast<std::size_t>(dim);
      }
      std::uint32_t mask = 0;
      const int sign = permutation_sign(idx, mask);
      const T v = dense[flat];
      if (sign == 0) {
        if (std::abs(v) > tol) throw Error(ErrorCode::NotAntisymmetric, "nonzero component with repeated index");
        continue;
      }
      T& slot = out.comps_[static_cast<std::size_t>(index_combos(dim, degree).position(mask))];
      const bool sorted = std::is_sorted(idx.begin(), idx.end());
      if (sorted) {
        slot = v;
      }
    }
    // second pass: every permutation must agree with the sorted entry
    for (std::size_t flat = 0; flat < total; ++flat) {
      std::size_t rem = flat;
      for (int k = degree - 1; k >= 0; --k) {
        idx[static_cast<std::size_t>(k)] = static_cast<int>(rem % static_cast<std::size_t>(dim));
        rem /= static_cast<std::size_t>(dim);
      }
      const T expected = out.at(idx);
      if (std::abs(expected - dense[flat]) > tol)
        throw Error(ErrorCode::NotAntisymmetric, "components are not antisymmetric under index transposition");
    }
    return out;
  }

  int dim() const { return dim_; }
  int degree() const { return degree_; }
  std::size_t size() const { return comps_.size(); }
  std::span<const int> indices(std::size_t k) const { return index_combos(dim_, degree_).tuple(k); }

  T& operator[](std::size_t k) { return comps_[k]; }
  const T& operator[](std::size_t k) const { return comps_[k]; }

  /// Component for an arbitrary index tuple (signed, zero on repeats).
  T at(std::span<const int> idx) const {
    std::uint32_t mask = 0;
    const int sign = permutation_sign(idx, mask);
    if (sign == 0) return T{};
    const T& v = comps_[static_cast<std::size_t>(index_combos(dim_, degree_).position(mask))];
    return sign > 0 ? v : T{} - v;
  }
  T at(std::initializer_list<int> idx) const { return at(std::span<const int>(idx.begin(), idx.size())); }

  /// Assigns the component for an arbitrary (non-repeating) index tuple.
  void set(std::span<const int> idx, const T& value) {
    std::uint32_t mask = 0;
    const int sign = permutation_sign(idx, mask);
    if (sign == 0) throw Error(ErrorCode::NotAntisymmetric, "cannot set a component with a repeated index");
    comps_[static_cast<std::size_t>(index_combos(dim_, degree_).position(mask))] = sign > 0 ? value : T{} - value;
  }
  void set(std::initializer_list<int> idx, const T& value) {
    set(std::span<const int>(idx.begin(), idx.size()), value);
  }

  Alternating& operator+=(const Alternating& o) {
    check_same(o);
    for (std::size_t k = 0; k < comps_.size(); ++k) comps_[k] = comps_[k] + o.comps_[k];
    return *this;
  }
  Alternating& operator-=(const Alternating& o) {
    check_same(o);
    for (std::size_t k = 0; k < comps_.size(); ++k) comps_[k] = comps_[k] - o.comps_[k];
    return *this;
  }
  friend Alternating operator+(Alternating a, const Alternating& b) { return a += b; }
  friend Alternating operator-(Alternating a, const Alternating& b) { return a -= b; }
  friend Alternating operator*(const T& s, Alternating a) {
    for (auto& c : a.comps_) c = s * c;
    return a;
  }

 private:
  void check_same(const Alternating& o) const {
    if (dim_ != o.dim_ || degree_ != o.degree_)
      throw Error(ErrorCode::DegreeMismatch, "adding tensors of different degree or dimension");
  }

  int dim_ = 1;
  int degree_ = 0;
  std::vector<T> comps_ = std::vector<T>(1);
};

template <class T>
using Form = Alternating<T, Variance::Covariant>;
template <class T>
using Multivector = Alternating<T, Variance::Contravariant>;

using FormValue = Form<double>;
using MultivectorValue = Multivector<double>;
using FormJet = Form<Jet>;
using MultivectorJet = Multivector<Jet>;
using FormField = Form<ScalarExpr>;
using MultivectorField = Multivector<ScalarExpr>;

/// Constant basis 1-form dx^i (or basis vector d_i).
template <class T, Variance V>
Alternating<T, V> basis(int dim, int i) {
  Alternating<T, V> b(dim, 1);
  b[static_cast<std::size_t>(i)] = T(1.0);
  return b;
}

/// Wedge product of two forms (or two multivectors) of the same variance.
template <class T, Variance V>
Alternating<T, V> wedge(const Alternating<T, V>& a, const Alternating<T, V>& b) {
  if (a.dim() != b.dim()) throw Error(ErrorCode::DimensionMismatch, "wedge of tensors on different charts");
  const int n = a.dim(), p = a.degree(), q = b.degree();
  if (p + q > n) throw Error(ErrorCode::DegreeOverflow, "wedge degree exceeds chart dimension");
  Alternating<T, V> out(n, p + q);
  const auto& combos = index_combos(n, p + q);
  std::vector<int> concat(static_cast<std::size_t>(p + q));
  for (std::size_t k = 0; k < combos.size(); ++k) {
    const auto idx = combos.tuple(k);
    T acc{};
    // iterate over subsets J of size p (as bit patterns over positions)
    const std::uint32_t full = (1u << (p + q)) - 1u;
    for (std::uint32_t sel = 0; sel <= full; ++sel) {
      if (std::popcount(sel) != p) continue;
      std::size_t w = 0;
      for (int r = 0; r < p + q; ++r)
        if (sel & (1u << r)) concat[w++] = idx[static_cast<std::size_t>(r)];
      for (int r = 0; r < p + q; ++r)
        if (!(sel & (1u << r))) concat[w++] = idx[static_cast<std::size_t>(r)];
      std::uint32_t mask = 0;
      const int sign = permutation_sign(concat, mask);
      const T term = a.at(std::span<const int>(concat.data(), static_cast<std::size_t>(p))) *
                     b.at(std::span<const int>(concat.data() + p, static_cast<std::size_t>(q)));
      acc = sign > 0 ? acc + term : acc - term;
    }
    out[k] = acc;
  }
  return out;
}

/// Interior product of a q-vector into a p-form:
/// (P -| sigma)_K = sum_{I increasing} P^I sigma_{IK}.
template <class T>
Form<T> contract(const Multivector<T>& mv, const Form<T>& form) {
  if (mv.dim() != form.dim()) throw Error(ErrorCode::DimensionMismatch, "contraction on different charts");
  const int n = form.dim(), q = mv.degree(), p = form.degree();
  if (q > p) throw Error(ErrorCode::DegreeMismatch, "cannot contract a " + std::to_string(q) +
                                                        "-vector into a " + std::to_string(p) + "-form");
  Form<T> out(n, p - q);
  const auto& rest = index_combos(n, p - q);
  const auto& lead = index_combos(n, q);
  std::vector<int> concat(static_cast<std::size_t>(p));
  for (std::size_t k = 0; k < rest.size(); ++k) {
    T acc{};
    for (std::size_t i = 0; i < lead.size(); ++i) {
      if (lead.mask(i) & rest.mask(k)) continue;
      std::copy(lead.tuple(i).begin(), lead.tuple(i).end(), concat.begin());
      std::copy(rest.tuple(k).begin(), rest.tuple(k).end(), concat.begin() + q);
      acc = acc + mv[i] * form.at(concat);
    }
    out[k] = acc;
  }
  return out;
}

/// Component-wise conversion between scalar types (e.g. jets to values).
template <class To, class From, Variance V, class Fn>
Alternating<To, V> transform(const Alternating<From, V>& a, Fn fn) {
  Alternating<To, V> out(a.dim(), a.degree());
  for (std::size_t k = 0; k < a.size(); ++k) out[k] = fn(a[k]);
  return out;
}

template <Variance V>
Alternating<double, V> values(const Alternating<Jet, V>& a) {
  return transform<double>(a, [](const Jet& j) { return j.value(); });
}

template <Variance V>
Alternating<Jet, V> jets(const Alternating<ScalarExpr, V>& a, std::span<const double> point, int order) {
  return transform<Jet>(a, [&](const ScalarExpr& e) { return eval_jet(e, point, order); });
}

template <Variance V>
Alternating<Jet, V> truncated(const Alternating<Jet, V>& a, int order) {
  return transform<Jet>(a, [&](const Jet& j) { return j.truncated(order); });
}

/// Largest component magnitude of a value tensor.
template <Variance V>
double max_abs(const Alternating<double, V>& a) {
  double m = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) m = std::max(m, std::abs(a[k]));
  return m;
}

/// Lowest jet order among the components (constants count as kMaxOrder).
template <Variance V>
int min_order(const Alternating<Jet, V>& a) {
  int o = kMaxOrder;
  for (std::size_t k = 0; k < a.size(); ++k) o = std::min(o, a[k].order());
  return o;
}

/// Exterior derivative; the result has one jet order less than the input.
inline FormJet exterior_d(const FormJet& sigma) {
  const int n = sigma.dim(), p = sigma.degree();
  if (p >= n) throw Error(ErrorCode::DegreeOverflow, "exterior derivative of a top-degree form");
  FormJet out(n, p + 1);
  const auto& combos = index_combos(n, p + 1);
  std::vector<int> sub(static_cast<std::size_t>(p));
  for (std::size_t k = 0; k < combos.size(); ++k) {
    const auto idx = combos.tuple(k);
    Jet acc;
    for (int r = 0; r <= p; ++r) {
      std::size_t w = 0;
      for (int s = 0; s <= p; ++s)
        if (s != r) sub[w++] = idx[static_cast<std::size_t>(s)];
      const Jet term = sigma.at(sub).derivative(idx[static_cast<std::size_t>(r)]);
      acc = (r % 2 == 0) ? acc + term : acc - term;
    }
    out[k] = acc;
  }
  return out;
}

/// Exterior derivative of a function, as a 1-form.
inline FormJet exterior_d(const Jet& f, int dim) {
  FormJet out(dim, 1);
  for (int i = 0; i < dim; ++i) out[static_cast<std::size_t>(i)] = f.derivative(i);
  return out;
}

/// Degree-0 form holding a function.
inline FormJet scalar_form(const Jet& f, int dim) {
  FormJet out(dim, 0);
  out[0] = f;
  return out;
}

/// Lie derivative of a form along a vector field, by the coordinate formula
/// (L_X s)_I = X^k d_k s_I + sum_r d_{i_r} X^k s_{I[i_r -> k]}.
inline FormJet lie_derivative(const MultivectorJet& x, const FormJet& sigma) {
  if (x.degree() != 1) throw Error(ErrorCode::DegreeMismatch, "Lie derivative needs a vector field");
  const int n = sigma.dim(), p = sigma.degree();
  FormJet out(n, p);
  const auto& combos = index_combos(n, p);
  std::vector<int> idx(static_cast<std::size_t>(p));
  for (std::size_t c = 0; c < combos.size(); ++c) {
    Jet acc;
    for (int k = 0; k < n; ++k) acc = acc + x[static_cast<std::size_t>(k)] * sigma[c].derivative(k);
    for (int r = 0; r < p; ++r) {
      for (int k = 0; k < n; ++k) {
        std::copy(combos.tuple(c).begin(), combos.tuple(c).end(), idx.begin());
        const int ir = idx[static_cast<std::size_t>(r)];
        idx[static_cast<std::size_t>(r)] = k;
        acc = acc + x[static_cast<std::size_t>(k)].derivative(ir) * sigma.at(idx);
      }
    }
    out[c] = acc;
  }
  return out;
}

/// Lie derivative of a multivector field:
/// (L_X P)^I = X^k d_k P^I - sum_r d_k X^{i_r} P^{I[i_r -> k]}.
inline MultivectorJet lie_derivative(const MultivectorJet& x, const MultivectorJet& mv) {
  if (x.degree() != 1) throw Error(ErrorCode::DegreeMismatch, "Lie derivative needs a vector field");
  const int n = mv.dim(), q = mv.degree();
  MultivectorJet out(n, q);
  const auto& combos = index_combos(n, q);
  std::vector<int> idx(static_cast<std::size_t>(q));
  for (std::size_t c = 0; c < combos.size(); ++c) {
    Jet acc;
    for (int k = 0; k < n; ++k) acc = acc + x[static_cast<std::size_t>(k)] * mv[c].derivative(k);
    for (int r = 0; r < q; ++r) {
      for (int k = 0; k < n; ++k) {
        std::copy(combos.tuple(c).begin(), combos.tuple(c).end(), idx.begin());
        const int ir = idx[static_cast<std::size_t>(r)];
        idx[static_cast<std::size_t>(r)] = k;
        acc = acc - x[static_cast<std::size_t>(ir)].derivative(k) * mv.at(idx);
      }
    }
    out[c] = acc;
  }
  return out;
}

/// Lie bracket of vector fields [X,Y] = L_X Y.
inline MultivectorJet lie_bracket(const MultivectorJet& x, const MultivectorJet& y) { return lie_derivative(x, y); }

/// Directional derivative X(f).
inline Jet apply(const MultivectorJet& x, const Jet& f) {
  Jet acc;
  for (int k = 0; k < x.dim(); ++k) acc = acc + x[static_cast<std::size_t>(k)] * f.derivative(k);
  return acc;
}

}  // namespace pmc
