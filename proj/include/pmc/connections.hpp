#pragma once

#include <cmath>
#include <span>
#include <vector>

#include "pmc/error.hpp"
#include "pmc/fields.hpp"
#include "pmc/forms.hpp"
#include "pmc/jet.hpp"

namespace pmc {

/// Rank-3 array of jets indexed [i][j][k].
struct JetTensor3 {
  int n = 0;
  std::vector<Jet> a;

  JetTensor3() = default;
  explicit JetTensor3(int dim) : n(dim), a(static_cast<std::size_t>(dim * dim * dim), Jet(0.0)) {}

  Jet& operator()(int i, int j, int k) { return a[static_cast<std::size_t>((i * n + j) * n + k)]; }
  const Jet& operator()(int i, int j, int k) const { return a[static_cast<std::size_t>((i * n + j) * n + k)]; }
};

/// Levi-Civita symbols Gamma^k_ij stored as (k, i, j), with their jets.
struct Christoffel {
  JetTensor3 gamma;

  double operator()(int k, int i, int j) const { return gamma(k, i, j).value(); }
};

inline Christoffel levi_civita(const JetMatrix& g) {
  const int n = g.n;
  const JetMatrix ginv = inverse(g);
  Christoffel c{JetTensor3(n)};
  for (int k = 0; k < n; ++k)
    for (int i = 0; i < n; ++i)
      for (int j = i; j < n; ++j) {
        Jet acc;
        for (int l = 0; l < n; ++l)
          acc += ginv(k, l) * (g(j, l).derivative(i) + g(i, l).derivative(j) - g(i, j).derivative(l));
        acc = Jet(0.5) * acc;
        c.gamma(k, i, j) = acc;
        c.gamma(k, j, i) = acc;
      }
  return c;
}

inline Christoffel levi_civita(const MetricField& g, std::span<const double> point, int order = 1) {
  g.check_positive_definite(point);
  return levi_civita(g.jets(point, order));
}

/// Scalar curvature R = g^{jk} R^i_{ijk} from order-2 metric jets.
inline double scalar_curvature(const JetMatrix& g) {
  const int n = g.n;
  const JetMatrix ginv = inverse(g);
  const auto c = levi_civita(g).gamma;
  double r = 0.0;
  for (int j = 0; j < n; ++j)
    for (int k = 0; k < n; ++k) {
      // Ric_jk = R^i_{ijk} = d_i G^i_jk - d_j G^i_ik + G^i_im G^m_jk - G^i_jm G^m_ik
      double ric = 0.0;
      for (int i = 0; i < n; ++i) {
        ric += c(i, j, k).derivative(i).value() - c(i, i, k).derivative(j).value();
        for (int m = 0; m < n; ++m)
          ric += c(i, i, m).value() * c(m, j, k).value() - c(i, j, m).value() * c(m, i, k).value();
      }
      r += ginv(j, k).value() * ric;
    }
  return r;
}

inline double scalar_curvature(const MetricField& g, std::span<const double> point) {
  g.check_positive_definite(point);
  return scalar_curvature(g.jets(point, 2));
}

/// Christoffel-type symbols of a contravariant connection, D_{dx^i} dx^j =
/// Gamma^{ij}_k dx^k, kept as jets together with the Poisson jets they were
/// built against.
class ContraChristoffel {
 public:
  ContraChristoffel() = default;

  /// Wraps given symbols (e.g. a perturbed or Killing-induced connection).
  ContraChristoffel(JetMatrix pi, JetTensor3 gamma) : pi_(std::move(pi)), gamma_(std::move(gamma)) {
    if (pi_.n != gamma_.n) throw Error(ErrorCode::DimensionMismatch, "Poisson and connection dimensions differ");
  }

  int dim() const { return pi_.n; }
  const JetMatrix& pi() const { return pi_; }
  const JetTensor3& symbols() const { return gamma_; }
  const Jet& gamma(int i, int j, int k) const { return gamma_(i, j, k); }
  double operator()(int i, int j, int k) const { return gamma_(i, j, k).value(); }

  /// #dx^i applied to a function: pi^{ia} d_a f.
  Jet anchor(int i, const Jet& f) const {
    Jet acc;
    for (int a = 0; a < dim(); ++a)
      if (a != i) acc += pi_(i, a) * f.derivative(a);
    return acc;
  }

  /// D_{dx^i} of a form:
  /// (D_i s)_K = pi^{ia} d_a s_K + sum_r Gamma^{ij}_{k_r} s_{K[k_r -> j]}.
  FormJet derivative(int i, const FormJet& s) const {
    const int n = dim(), p = s.degree();
    FormJet out(n, p);
    std::vector<int> idx(static_cast<std::size_t>(p));
    for (std::size_t c = 0; c < s.size(); ++c) {
      Jet acc = anchor(i, s[c]);
      const auto k = s.indices(c);
      for (int r = 0; r < p; ++r)
        for (int j = 0; j < n; ++j) {
          std::copy(k.begin(), k.end(), idx.begin());
          idx[static_cast<std::size_t>(r)] = j;
          const Jet sv = s.at(idx);
          if (sv.is_constant() && sv.value() == 0.0) continue;
          acc += gamma_(i, j, k[static_cast<std::size_t>(r)]) * sv;
        }
      out[c] = acc;
    }
    return out;
  }

  /// D_{dx^i} of a multivector:
  /// (D_i V)^K = pi^{ia} d_a V^K - sum_r Gamma^{i k_r}_j V^{K[k_r -> j]}.
  MultivectorJet derivative(int i, const MultivectorJet& v) const {
    const int n = dim(), q = v.degree();
    MultivectorJet out(n, q);
    std::vector<int> idx(static_cast<std::size_t>(q));
    for (std::size_t c = 0; c < v.size(); ++c) {
      Jet acc = anchor(i, v[c]);
      const auto k = v.indices(c);
      for (int r = 0; r < q; ++r)
        for (int j = 0; j < n; ++j) {
          std::copy(k.begin(), k.end(), idx.begin());
          idx[static_cast<std::size_t>(r)] = j;
          const Jet vv = v.at(idx);
          if (vv.is_constant() && vv.value() == 0.0) continue;
          acc -= gamma_(i, k[static_cast<std::size_t>(r)], j) * vv;
        }
      out[c] = acc;
    }
    return out;
  }

  /// D_alpha s = alpha_i D_{dx^i} s.
  FormJet derivative(const FormJet& alpha, const FormJet& s) const {
    FormJet out(dim(), s.degree());
    for (int i = 0; i < dim(); ++i) {
      const Jet& ai = alpha[static_cast<std::size_t>(i)];
      if (ai.is_constant() && ai.value() == 0.0) continue;
      out += ai * derivative(i, s);
    }
    return out;
  }

 private:
  JetMatrix pi_;
  JetTensor3 gamma_;
};

/// Torsion T^{ij}_k = Gamma^{ij}_k - Gamma^{ji}_k - d_k pi^{ij}, at the point.
struct TorsionTensor {
  int n = 0;
  std::vector<double> t;  // [i][j][k]
  Residual residual;

  double operator()(int i, int j, int k) const { return t[static_cast<std::size_t>((i * n + j) * n + k)]; }
};

inline TorsionTensor contra_torsion(const ContraChristoffel& conn) {
  const int n = conn.dim();
  TorsionTensor out{n, std::vector<double>(static_cast<std::size_t>(n * n * n), 0.0), {}};
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k) {
        const double a = conn(i, j, k), b = conn(j, i, k), c = conn.pi()(i, j).derivative(k).value();
        const double t = a - b - c;
        out.t[static_cast<std::size_t>((i * n + j) * n + k)] = t;
        out.residual.see(a);
        out.residual.see(b);
        out.residual.see(c);
        out.residual.track(t);
      }
  return out;
}

/// Metric compatibility: pi^{il} d_l g^{jk} - Gamma^{ij}_m g^{mk} - Gamma^{ik}_m g^{jm}.
inline Residual metric_compatibility_residual(const ContraChristoffel& conn, const JetMatrix& ginv) {
  const int n = conn.dim();
  Residual r;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int k = j; k < n; ++k) {
        const double lhs = conn.anchor(i, ginv(j, k)).value();
        double rhs = 0.0;
        r.see(lhs);
        for (int m = 0; m < n; ++m) {
          const double t1 = conn(i, j, m) * ginv(m, k).value();
          const double t2 = conn(i, k, m) * ginv(j, m).value();
          r.see(t1);
          r.see(t2);
          rhs += t1 + t2;
        }
        r.track(lhs - rhs);
      }
  return r;
}

/// Tolerance for the construction postconditions of the metric connection.
inline constexpr double kConstructionTolerance = 1e-9;

/// The torsion-free metric contravariant connection, from the contravariant
/// Koszul formula on co-frames with the cometric g^{ij}:
/// 2 Gamma^{ijk} = pi^{il} d_l g^{jk} + pi^{jl} d_l g^{ik} - pi^{kl} d_l g^{ij}
///               + d_m pi^{ij} g^{mk} - d_m pi^{jk} g^{mi} + d_m pi^{ki} g^{mj},
/// lowered with g_mk. Symbols carry one jet order less than the inputs.
inline ContraChristoffel metric_contra_connection(const JetMatrix& g, const JetMatrix& pi) {
  const int n = g.n;
  if (pi.n != n) throw Error(ErrorCode::DimensionMismatch, "metric and Poisson dimensions differ");
  const JetMatrix ginv = inverse(g);
  auto anchor = [&](int i, const Jet& f) {
    Jet acc;
    for (int l = 0; l < n; ++l)
      if (l != i) acc += pi(i, l) * f.derivative(l);
    return acc;
  };
  auto bracket_pair = [&](int i, int j, int k) {  // <d pi^{ij}, dx^k>
    Jet acc;
    if (i == j) return acc;
    for (int m = 0; m < n; ++m) acc += pi(i, j).derivative(m) * ginv(m, k);
    return acc;
  };
  JetTensor3 upper(n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k) {
        Jet acc = anchor(i, ginv(j, k)) + anchor(j, ginv(i, k)) - anchor(k, ginv(i, j)) + bracket_pair(i, j, k) -
                  bracket_pair(j, k, i) + bracket_pair(k, i, j);
        upper(i, j, k) = Jet(0.5) * acc;
      }
  JetTensor3 gamma(n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k) {
        Jet acc;
        for (int m = 0; m < n; ++m) acc += upper(i, j, m) * g(m, k);
        gamma(i, j, k) = acc;
      }
  ContraChristoffel conn(pi, std::move(gamma));

  const Residual torsion = contra_torsion(conn).residual;
  if (torsion.normalized() > kConstructionTolerance)
    throw Error(ErrorCode::PostconditionFailed,
                "metric contravariant connection has torsion " + std::to_string(torsion.normalized()));
  const Residual compat = metric_compatibility_residual(conn, ginv);
  if (compat.normalized() > kConstructionTolerance)
    throw Error(ErrorCode::PostconditionFailed,
                "metric contravariant connection is not metric " + std::to_string(compat.normalized()));
  return conn;
}

inline ContraChristoffel metric_contra_connection(const MetricField& g, const PoissonField& pi,
                                                  std::span<const double> point, int order = 1) {
  g.check_positive_definite(point);
  return metric_contra_connection(g.jets(point, order), pi.jet_matrix(point, order));
}

/// Curvature K(dx^i,dx^j)dx^k = R^{ijk}_l dx^l, stored [i][j][k][l] as jets
/// two orders below the inputs of the connection.
struct ContraCurvature {
  int n = 0;
  std::vector<Jet> r;
  Residual residual;  // largest component against the terms that built it

  const Jet& operator()(int i, int j, int k, int l) const {
    return r[static_cast<std::size_t>(((i * n + j) * n + k) * n + l)];
  }
};

inline ContraCurvature contra_curvature(const ContraChristoffel& conn) {
  const int n = conn.dim();
  const auto& pi = conn.pi();
  ContraCurvature out{n, std::vector<Jet>(static_cast<std::size_t>(n * n * n * n), Jet(0.0)), {}};
  auto at = [&](int i, int j, int k, int l) -> Jet& {
    return out.r[static_cast<std::size_t>(((i * n + j) * n + k) * n + l)];
  };
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j)
      for (int k = 0; k < n; ++k)
        for (int l = 0; l < n; ++l) {
          std::array<Jet, 4> terms;
          terms[0] = conn.anchor(i, conn.gamma(j, k, l));
          terms[1] = -conn.anchor(j, conn.gamma(i, k, l));
          Jet quad, lower;
          for (int m = 0; m < n; ++m) {
            quad += conn.gamma(j, k, m) * conn.gamma(i, m, l) - conn.gamma(i, k, m) * conn.gamma(j, m, l);
            lower -= pi(i, j).derivative(m) * conn.gamma(m, k, l);
          }
          terms[2] = quad;
          terms[3] = lower;
          Jet sum = terms[0] + terms[1] + terms[2] + terms[3];
          for (int t = 0; t < 4; ++t) out.residual.see(terms[static_cast<std::size_t>(t)].value());
          out.residual.track(sum.value());
          at(i, j, k, l) = sum;
          at(j, i, k, l) = -sum;
        }
  return out;
}

inline ContraCurvature contra_curvature(const MetricField& g, const PoissonField& pi, std::span<const double> point,
                                        int order = 2) {
  return contra_curvature(metric_contra_connection(g, pi, point, order));
}

// ---- cotangent geodesics -----------------------------------------------------

struct CotangentState {
  Point u;
  std::vector<double> xi;
};

/// |xi|^2 = g^{ij} xi_i xi_j at u.
inline double cotangent_norm(const MetricField& g, const CotangentState& s) {
  const auto ginv = inverse(g.jets(s.u, 0));
  double acc = 0.0;
  const int n = g.dim();
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      acc += ginv(i, j).value() * s.xi[static_cast<std::size_t>(i)] * s.xi[static_cast<std::size_t>(j)];
  return std::sqrt(acc);
}

namespace detail {

inline void geodesic_rhs(const MetricField& g, const PoissonField& pi, const Point& u, const std::vector<double>& xi,
                         Point& du, std::vector<double>& dxi) {
  const int n = g.dim();
  try {
    for (double v : u)
      if (!std::isfinite(v)) throw Error(ErrorCode::NonFinite, "state left the finite range");
    g.check_positive_definite(u);
    const auto conn = metric_contra_connection(g.jets(u, 1), pi.jet_matrix(u, 1));
    du.assign(static_cast<std::size_t>(n), 0.0);
    dxi.assign(static_cast<std::size_t>(n), 0.0);
    for (int a = 0; a < n; ++a)
      for (int i = 0; i < n; ++i) du[static_cast<std::size_t>(a)] += conn.pi()(i, a).value() * xi[static_cast<std::size_t>(i)];
    for (int k = 0; k < n; ++k)
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
          dxi[static_cast<std::size_t>(k)] -= conn(i, j, k) * xi[static_cast<std::size_t>(i)] * xi[static_cast<std::size_t>(j)];
  } catch (const Error& e) {
    if (e.code() == ErrorCode::SingularMetric || e.code() == ErrorCode::NonFinite)
      throw Error(ErrorCode::LeftChartDomain, e.what());
    throw;
  }
}

}  // namespace detail

/// One classical RK4 step of u' = #xi, xi'_k = -Gamma^{ij}_k xi_i xi_j.
inline CotangentState geodesic_step(const MetricField& g, const PoissonField& pi, const CotangentState& s, double dt) {
  if (!(dt > 0.0)) throw Error(ErrorCode::InvalidInput, "geodesic step needs dt > 0");
  const auto n = static_cast<std::size_t>(g.dim());
  if (s.u.size() != n || s.xi.size() != n)
    throw Error(ErrorCode::DimensionMismatch, "cotangent state does not match the chart dimension");
  std::array<Point, 4> ku, kx;
  auto offset = [&](const std::vector<double>& base, const std::vector<double>& d, double h) {
    std::vector<double> out(base);
    for (std::size_t i = 0; i < n; ++i) out[i] += h * d[i];
    return out;
  };
  detail::geodesic_rhs(g, pi, s.u, s.xi, ku[0], kx[0]);
  detail::geodesic_rhs(g, pi, offset(s.u, ku[0], dt / 2), offset(s.xi, kx[0], dt / 2), ku[1], kx[1]);
  detail::geodesic_rhs(g, pi, offset(s.u, ku[1], dt / 2), offset(s.xi, kx[1], dt / 2), ku[2], kx[2]);
  detail::geodesic_rhs(g, pi, offset(s.u, ku[2], dt), offset(s.xi, kx[2], dt), ku[3], kx[3]);
  CotangentState out = s;
  for (std::size_t i = 0; i < n; ++i) {
    out.u[i] += dt / 6 * (ku[0][i] + 2 * ku[1][i] + 2 * ku[2][i] + ku[3][i]);
    out.xi[i] += dt / 6 * (kx[0][i] + 2 * kx[1][i] + 2 * kx[2][i] + kx[3][i]);
  }
  for (std::size_t i = 0; i < n; ++i)
    if (!std::isfinite(out.u[i]) || !std::isfinite(out.xi[i]))
      throw Error(ErrorCode::LeftChartDomain, "geodesic state became non-finite");
  return out;
}

}  // namespace pmc
