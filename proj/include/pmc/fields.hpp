#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <optional>
#include <random>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "pmc/error.hpp"
#include "pmc/expr.hpp"
#include "pmc/forms.hpp"
#include "pmc/jet.hpp"

namespace pmc {

using Point = std::vector<double>;

/// A scale-free "is it zero" measure: the raw deviation together with the
/// largest magnitude among the terms that produced it.
struct Residual {
  double raw = 0.0;
  double scale = 0.0;

  double normalized() const { return raw / std::max(1.0, scale); }

  void track(double deviation) { raw = std::max(raw, std::abs(deviation)); }
  void see(double term) { scale = std::max(scale, std::abs(term)); }

  /// Keeps whichever residual is worse after normalization.
  void merge(const Residual& o) {
    if (o.normalized() > normalized()) *this = o;
  }
};

/// Coordinate chart with the points the checks are evaluated at.
struct Chart {
  int dim = 0;
  std::vector<std::string> coord_names;
  std::vector<Point> sample_points;
  std::vector<std::array<double, 2>> sample_box;  // empty, or one [lo, hi] per coordinate
  std::optional<std::uint64_t> seed;

  void validate() const {
    if (dim < 1 || dim > kMaxDim)
      throw Error(ErrorCode::DimensionMismatch, "chart dimension must be in [1, 6], got " + std::to_string(dim));
    if (static_cast<int>(coord_names.size()) != dim)
      throw Error(ErrorCode::DimensionMismatch, "chart declares " + std::to_string(coord_names.size()) +
                                                    " coordinate names for dimension " + std::to_string(dim));
    if (std::set<std::string>(coord_names.begin(), coord_names.end()).size() != coord_names.size())
      throw Error(ErrorCode::InvalidInput, "coordinate names must be distinct");
    for (const auto& p : sample_points)
      if (static_cast<int>(p.size()) != dim)
        throw Error(ErrorCode::DimensionMismatch, "sample point has the wrong number of coordinates");
    if (!sample_box.empty() && static_cast<int>(sample_box.size()) != dim)
      throw Error(ErrorCode::DimensionMismatch, "sample box needs one interval per coordinate");
    for (const auto& iv : sample_box)
      if (!(iv[0] <= iv[1])) throw Error(ErrorCode::InvalidInput, "sample box interval has lo > hi");
    if (sample_points.empty() && sample_box.empty())
      throw Error(ErrorCode::InvalidInput, "chart needs at least one sample point or a sample box");
  }

  /// Declared points followed by `random_count` uniform points from the box
  /// (none when no box is declared).
  std::vector<Point> points(int random_count, std::uint64_t rng_seed) const {
    std::vector<Point> out = sample_points;
    if (sample_box.empty() || random_count <= 0) return out;
    std::mt19937_64 rng(rng_seed);
    for (int k = 0; k < random_count; ++k) {
      Point p(static_cast<std::size_t>(dim));
      for (int i = 0; i < dim; ++i) {
        const auto& iv = sample_box[static_cast<std::size_t>(i)];
        std::uniform_real_distribution<double> u(iv[0], iv[1]);
        p[static_cast<std::size_t>(i)] = u(rng);
      }
      out.push_back(std::move(p));
    }
    return out;
  }

  friend bool operator==(const Chart&, const Chart&) = default;
};

/// Dense n x n matrix of jets.
struct JetMatrix {
  int n = 0;
  std::vector<Jet> a;

  JetMatrix() = default;
  explicit JetMatrix(int dim) : n(dim), a(static_cast<std::size_t>(dim * dim), Jet(0.0)) {}

  Jet& operator()(int i, int j) { return a[static_cast<std::size_t>(i * n + j)]; }
  const Jet& operator()(int i, int j) const { return a[static_cast<std::size_t>(i * n + j)]; }

  std::vector<double> values() const {
    std::vector<double> v(a.size());
    for (std::size_t k = 0; k < a.size(); ++k) v[k] = a[k].value();
    return v;
  }
};

/// Inverse of a jet matrix by Gauss-Jordan elimination with partial pivoting
/// on the point values.
inline JetMatrix inverse(const JetMatrix& m) {
  const int n = m.n;
  JetMatrix work = m;
  JetMatrix inv(n);
  for (int i = 0; i < n; ++i) inv(i, i) = Jet(1.0);
  double scale = 0.0;
  for (const auto& j : m.a) scale = std::max(scale, std::abs(j.value()));
  for (int col = 0; col < n; ++col) {
    int piv = col;
    for (int r = col + 1; r < n; ++r)
      if (std::abs(work(r, col).value()) > std::abs(work(piv, col).value())) piv = r;
    if (!(std::abs(work(piv, col).value()) > 1e-14 * std::max(scale, 1e-300)))
      throw Error(ErrorCode::SingularMetric, "matrix is singular at the point");
    if (piv != col)
      for (int c = 0; c < n; ++c) {
        std::swap(work(piv, c), work(col, c));
        std::swap(inv(piv, c), inv(col, c));
      }
    const Jet p = reciprocal(work(col, col));
    for (int c = 0; c < n; ++c) {
      work(col, c) = work(col, c) * p;
      inv(col, c) = inv(col, c) * p;
    }
    for (int r = 0; r < n; ++r) {
      if (r == col) continue;
      const Jet f = work(r, col);
      if (f.is_constant() && f.value() == 0.0) continue;
      for (int c = 0; c < n; ++c) {
        work(r, c) = work(r, c) - f * work(col, c);
        inv(r, c) = inv(r, c) - f * inv(col, c);
      }
    }
  }
  return inv;
}

/// Inverse of a dense matrix of values.
inline std::vector<double> inverse(std::span<const double> m, int n) {
  JetMatrix jm(n);
  for (std::size_t k = 0; k < m.size(); ++k) jm.a[k] = Jet(m[k]);
  return inverse(jm).values();
}

/// Riemannian metric g_ij; only the upper triangle is stored.
class MetricField {
 public:
  MetricField() = default;
  explicit MetricField(int dim) : dim_(dim), upper_(static_cast<std::size_t>(dim * (dim + 1) / 2), ScalarExpr(0.0)) {}

  static MetricField identity(int dim) {
    MetricField g(dim);
    for (int i = 0; i < dim; ++i) g.set(i, i, ScalarExpr(1.0));
    return g;
  }

  int dim() const { return dim_; }
  const ScalarExpr& operator()(int i, int j) const { return upper_[slot(i, j)]; }
  void set(int i, int j, ScalarExpr e) { upper_[slot(i, j)] = std::move(e); }

  JetMatrix jets(std::span<const double> point, int order) const {
    check_point(point);
    JetMatrix m(dim_);
    for (int i = 0; i < dim_; ++i)
      for (int j = i; j < dim_; ++j) m(i, j) = m(j, i) = eval_jet((*this)(i, j), point, order);
    return m;
  }

  /// Throws SingularMetric unless every leading principal minor is positive.
  void check_positive_definite(std::span<const double> point) const {
    const auto v = jets(point, 0).values();
    // Cholesky on the values
    std::vector<double> l(v.size(), 0.0);
    const auto n = static_cast<std::size_t>(dim_);
    for (std::size_t j = 0; j < n; ++j) {
      double d = v[j * n + j];
      for (std::size_t k = 0; k < j; ++k) d -= l[j * n + k] * l[j * n + k];
      if (!(d > 0.0)) throw Error(ErrorCode::SingularMetric, "metric is not positive definite at the point");
      l[j * n + j] = std::sqrt(d);
      for (std::size_t i = j + 1; i < n; ++i) {
        double s = v[i * n + j];
        for (std::size_t k = 0; k < j; ++k) s -= l[i * n + k] * l[j * n + k];
        l[i * n + j] = s / l[j * n + j];
      }
    }
  }

  /// Expression for det g (cofactor expansion).
  ScalarExpr determinant() const {
    std::vector<ScalarExpr> m;
    for (int i = 0; i < dim_; ++i)
      for (int j = 0; j < dim_; ++j) m.push_back((*this)(i, j));
    return pmc::determinant(m, dim_);
  }

  friend bool operator==(const MetricField&, const MetricField&) = default;

 private:
  std::size_t slot(int i, int j) const {
    if (i > j) std::swap(i, j);
    if (i < 0 || j >= dim_) throw Error(ErrorCode::DimensionMismatch, "metric index out of range");
    return static_cast<std::size_t>(i * dim_ - i * (i - 1) / 2 + (j - i));
  }
  void check_point(std::span<const double> point) const {
    if (static_cast<int>(point.size()) != dim_)
      throw Error(ErrorCode::DimensionMismatch, "point dimension does not match the metric");
  }

  int dim_ = 0;
  std::vector<ScalarExpr> upper_;
};

/// Poisson bivector pi^ij; only the strict upper triangle is stored.
class PoissonField {
 public:
  PoissonField() = default;
  explicit PoissonField(int dim) : field_(dim, 2, ScalarExpr(0.0)) {}

  int dim() const { return field_.dim(); }

  /// pi^ij for any i, j (negated below the diagonal, zero on it).
  ScalarExpr operator()(int i, int j) const {
    if (i == j) return ScalarExpr(0.0);
    const int idx[2] = {i, j};
    return field_.at(idx);
  }
  void set(int i, int j, ScalarExpr e) {
    if (i == j) throw Error(ErrorCode::NotAntisymmetric, "Poisson bivector has no diagonal entries");
    if (i < j) {
      field_.set({i, j}, e);
    } else {
      field_.set({j, i}, -e);
    }
  }

  const MultivectorField& field() const { return field_; }

  MultivectorJet jets(std::span<const double> point, int order) const {
    if (static_cast<int>(point.size()) != dim())
      throw Error(ErrorCode::DimensionMismatch, "point dimension does not match the Poisson bivector");
    return pmc::jets(field_, point, order);
  }

  JetMatrix jet_matrix(std::span<const double> point, int order) const {
    const auto mv = jets(point, order);
    JetMatrix m(dim());
    for (std::size_t k = 0; k < mv.size(); ++k) {
      const auto idx = mv.indices(k);
      m(idx[0], idx[1]) = mv[k];
      m(idx[1], idx[0]) = -mv[k];
    }
    return m;
  }

  friend bool operator==(const PoissonField& a, const PoissonField& b) {
    if (a.dim() != b.dim()) return false;
    for (std::size_t k = 0; k < a.field_.size(); ++k)
      if (!(a.field_[k] == b.field_[k])) return false;
    return true;
  }

 private:
  MultivectorField field_ = MultivectorField(1, 0, ScalarExpr(0.0));
};

/// Volume form eps = rho dx^1 ^ ... ^ dx^n.
struct VolumeField {
  ScalarExpr density = ScalarExpr(1.0);
  bool riemannian = false;  // density was derived as sqrt(det g)

  static VolumeField from_metric(const MetricField& g) { return {sqrt(g.determinant()), true}; }

  FormJet jets(std::span<const double> point, int order) const {
    const int n = static_cast<int>(point.size());
    FormJet eps(n, n);
    eps[0] = eval_jet(density, point, order);
    if (eps[0].value() == 0.0) throw Error(ErrorCode::NonFinite, "volume density vanishes at the point");
    return eps;
  }

  friend bool operator==(const VolumeField& a, const VolumeField& b) {
    return a.riemannian == b.riemannian && a.density == b.density;
  }
};

inline MultivectorJet to_multivector(const JetMatrix& pi) {
  MultivectorJet mv(pi.n, 2);
  for (std::size_t k = 0; k < mv.size(); ++k) {
    const auto idx = mv.indices(k);
    mv[k] = pi(idx[0], idx[1]);
  }
  return mv;
}

// ---- anchor and brackets ---------------------------------------------------

/// (#alpha)^i = pi^{ji} alpha_j on jets.
inline MultivectorJet sharp(const JetMatrix& pi, const FormJet& alpha) {
  if (alpha.degree() != 1) throw Error(ErrorCode::DegreeMismatch, "sharp needs a 1-form");
  MultivectorJet v(pi.n, 1);
  for (int i = 0; i < pi.n; ++i) {
    Jet acc;
    for (int j = 0; j < pi.n; ++j) acc += pi(j, i) * alpha[static_cast<std::size_t>(j)];
    v[static_cast<std::size_t>(i)] = acc;
  }
  return v;
}

inline MultivectorValue sharp(const PoissonField& pi, const FormValue& alpha, std::span<const double> point) {
  if (alpha.degree() != 1) throw Error(ErrorCode::DegreeMismatch, "sharp needs a 1-form");
  const auto p = pi.jet_matrix(point, 0);
  MultivectorValue v(pi.dim(), 1);
  for (int i = 0; i < pi.dim(); ++i)
    for (int j = 0; j < pi.dim(); ++j) v[static_cast<std::size_t>(i)] += p(j, i).value() * alpha[static_cast<std::size_t>(j)];
  return v;
}

/// {f,g} = pi^{ij} d_i f d_j g on jets.
inline Jet poisson_bracket(const JetMatrix& pi, const Jet& f, const Jet& g) {
  Jet acc;
  for (int i = 0; i < pi.n; ++i)
    for (int j = 0; j < pi.n; ++j) {
      if (i == j) continue;
      acc += pi(i, j) * f.derivative(i) * g.derivative(j);
    }
  return acc;
}

inline double poisson_bracket(const PoissonField& pi, const ScalarExpr& f, const ScalarExpr& g,
                              std::span<const double> point) {
  return poisson_bracket(pi.jet_matrix(point, 1), eval_jet(f, point, 1), eval_jet(g, point, 1)).value();
}

/// Jacobi cyclic sum pi^{il} d_l pi^{jk} + cyclic, maximized over (i,j,k).
inline Residual jacobi_residual(const JetMatrix& pi) {
  const int n = pi.n;
  Residual r;
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j)
      for (int k = j + 1; k < n; ++k) {
        double sum = 0.0;
        const int t[3][3] = {{i, j, k}, {j, k, i}, {k, i, j}};
        for (const auto& c : t)
          for (int l = 0; l < n; ++l) {
            const double term = pi(c[0], l).value() * pi(c[1], c[2]).derivative(l).value();
            r.see(term);
            sum += term;
          }
        r.track(sum);
      }
  return r;
}

inline Residual jacobi_residual(const PoissonField& pi, std::span<const double> point) {
  return jacobi_residual(pi.jet_matrix(point, 1));
}

/// Raw maximal Jacobi defect at a point.
inline double check_jacobi(const PoissonField& pi, std::span<const double> point) {
  return jacobi_residual(pi, point).raw;
}

/// Koszul bracket of 1-forms on jets:
/// [a,b]_k = a_i b_j d_k pi^{ij} + a_i pi^{il} d_l b_k - b_j pi^{jl} d_l a_k.
inline FormJet koszul_bracket(const JetMatrix& pi, const FormJet& a, const FormJet& b) {
  if (a.degree() != 1 || b.degree() != 1) throw Error(ErrorCode::DegreeMismatch, "Koszul bracket needs 1-forms");
  const int n = pi.n;
  FormJet out(n, 1);
  for (int k = 0; k < n; ++k) {
    Jet acc;
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        if (i != j) acc += a[static_cast<std::size_t>(i)] * b[static_cast<std::size_t>(j)] * pi(i, j).derivative(k);
    for (int i = 0; i < n; ++i)
      for (int l = 0; l < n; ++l) {
        if (i == l) continue;
        acc += a[static_cast<std::size_t>(i)] * pi(i, l) * b[static_cast<std::size_t>(k)].derivative(l);
        acc -= b[static_cast<std::size_t>(i)] * pi(i, l) * a[static_cast<std::size_t>(k)].derivative(l);
      }
    out[static_cast<std::size_t>(k)] = acc;
  }
  return out;
}

inline FormValue koszul_bracket(const PoissonField& pi, const FormField& a, const FormField& b,
                                std::span<const double> point) {
  if (a.degree() != 1 || b.degree() != 1) throw Error(ErrorCode::DegreeMismatch, "Koszul bracket needs 1-forms");
  return values(koszul_bracket(pi.jet_matrix(point, 1), jets(a, point, 1), jets(b, point, 1)));
}

// ---- exterior calculus on fields -------------------------------------------

inline FormValue exterior_d(const FormField& sigma, std::span<const double> point) {
  return values(exterior_d(jets(sigma, point, 1)));
}

/// Lie derivative of a form field along a vector field, at a point.
inline FormValue lie_derivative(const MultivectorField& x, const FormField& sigma, std::span<const double> point) {
  return values(lie_derivative(jets(x, point, 1), jets(sigma, point, 1)));
}

/// Lie derivative of a multivector field along a vector field, at a point.
inline MultivectorValue lie_derivative(const MultivectorField& x, const MultivectorField& mv,
                                       std::span<const double> point) {
  return values(lie_derivative(jets(x, point, 1), jets(mv, point, 1)));
}

/// (L_X g)_{ij} = X^k d_k g_ij + g_kj d_i X^k + g_ik d_j X^k on jets.
inline JetMatrix lie_derivative(const MultivectorJet& x, const JetMatrix& g) {
  const int n = g.n;
  JetMatrix out(n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      Jet acc;
      for (int k = 0; k < n; ++k) {
        const auto uk = static_cast<std::size_t>(k);
        acc += x[uk] * g(i, j).derivative(k);
        acc += g(k, j) * x[uk].derivative(i);
        acc += g(i, k) * x[uk].derivative(j);
      }
      out(i, j) = acc;
    }
  return out;
}

/// L_X g at a point, as a dense symmetric matrix.
inline std::vector<double> lie_derivative(const MultivectorField& x, const MetricField& g,
                                          std::span<const double> point) {
  return lie_derivative(jets(x, point, 1), g.jets(point, 1)).values();
}

}  // namespace pmc
