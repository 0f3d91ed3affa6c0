#pragma once

#include <array>
#include <cmath>
#include <span>
#include <vector>

#include "pmc/connections.hpp"
#include "pmc/conventions.hpp"
#include "pmc/error.hpp"
#include "pmc/fields.hpp"
#include "pmc/forms.hpp"

namespace pmc {

/// Generalized Poisson bracket induced by a flat torsion-free contravariant
/// connection: {f,s} = D_{df} s, {dx^i,dx^j} = d(Gamma^{ij}_k dx^k), extended
/// to 1-forms by the product rule.
class ConnectionBrackets {
 public:
  explicit ConnectionBrackets(const ContraChristoffel& conn) : conn_(conn), n_(conn.dim()) {
    fundamental_.reserve(static_cast<std::size_t>(n_ * n_));
    for (int i = 0; i < n_; ++i)
      for (int j = 0; j < n_; ++j) {
        FormJet d(n_, 1);
        for (int k = 0; k < n_; ++k) d[static_cast<std::size_t>(k)] = conn.gamma(i, j, k);
        fundamental_.push_back(exterior_d(d));
      }
  }

  int dim() const { return n_; }
  const ContraChristoffel& connection() const { return conn_; }

  /// {x^i, s}.
  FormJet fn_form(int i, const FormJet& s) const { return conn_.derivative(i, s); }

  /// {f, s} for a function jet f.
  FormJet fn_form(const Jet& f, const FormJet& s) const { return conn_.derivative(exterior_d(f, n_), s); }

  /// {dx^i, dx^j}.
  const FormJet& fundamental(int i, int j) const { return fundamental_[static_cast<std::size_t>(i * n_ + j)]; }

  /// {a,b} = a_i b_j {dx^j,dx^i} + a_i dx^j ^ (d_c b_j Gamma^{ci}_k dx^k) + dx^i ^ (d_c a_i D_{dx^c} b).
  FormJet one_forms(const FormJet& a, const FormJet& b) const {
    if (a.degree() != 1 || b.degree() != 1) throw Error(ErrorCode::DegreeMismatch, "bracket of 1-forms");
    FormJet out(n_, 2);
    for (int i = 0; i < n_; ++i) {
      const Jet& ai = a[static_cast<std::size_t>(i)];
      if (is_zero(ai)) continue;
      for (int j = 0; j < n_; ++j) {
        const Jet& bj = b[static_cast<std::size_t>(j)];
        if (!is_zero(bj)) out += (ai * bj) * fundamental(j, i);
        // d_c b_j Gamma^{ci}_k dx^k
        if (bj.is_constant()) continue;
        FormJet v(n_, 1);
        for (int k = 0; k < n_; ++k) {
          Jet acc;
          for (int c = 0; c < n_; ++c) acc += bj.derivative(c) * conn_.gamma(c, i, k);
          v[static_cast<std::size_t>(k)] = acc;
        }
        out += ai * wedge(basis<Jet, Variance::Covariant>(n_, j), v);
      }
    }
    for (int i = 0; i < n_; ++i) {
      const Jet& ai = a[static_cast<std::size_t>(i)];
      if (ai.is_constant()) continue;
      FormJet v(n_, 1);
      for (int c = 0; c < n_; ++c) v += ai.derivative(c) * conn_.derivative(c, b);
      out += wedge(basis<Jet, Variance::Covariant>(n_, i), v);
    }
    return out;
  }

 private:
  static bool is_zero(const Jet& j) { return j.is_constant() && j.value() == 0.0; }

  const ContraChristoffel& conn_;
  int n_;
  std::vector<FormJet> fundamental_;
};

/// Rank-5 metacurvature M^{ijk}_{lm}. `raw` holds the jets as assembled for
/// every ordered (i,j,k); `sym` holds the average over permutations of
/// (i,j,k), which is what all accessors return.
struct MetaTensor {
  int n = 0;
  std::vector<FormJet> raw;
  std::vector<FormJet> sym;
  Residual magnitude;        // largest |M| against the bracket terms
  double symmetry_defect = 0.0;  // raw deviation from total symmetry, scale-free

  const FormJet& jets(int i, int j, int k) const { return sym[static_cast<std::size_t>((i * n + j) * n + k)]; }
  double operator()(int i, int j, int k, int l, int m) const {
    const int idx[2] = {l, m};
    return jets(i, j, k).at(idx).value();
  }
  double max_abs() const {
    double v = 0.0;
    for (const auto& f : sym)
      for (std::size_t c = 0; c < f.size(); ++c) v = std::max(v, std::abs(f[c].value()));
    return v;
  }
};

/// Dense values of M^{ijk}_{lm}, [i][j][k][l][m].
struct MetaValues {
  int n = 0;
  std::vector<double> m;

  double operator()(int i, int j, int k, int l, int mm) const {
    return m[static_cast<std::size_t>((((i * n + j) * n + k) * n + l) * n + mm)];
  }
  double& operator()(int i, int j, int k, int l, int mm) {
    return m[static_cast<std::size_t>((((i * n + j) * n + k) * n + l) * n + mm)];
  }
  double max_abs() const {
    double v = 0.0;
    for (double x : m) v = std::max(v, std::abs(x));
    return v;
  }
};

inline MetaValues values(const MetaTensor& t) {
  const int n = t.n;
  MetaValues out{n, std::vector<double>(static_cast<std::size_t>(n * n * n * n * n), 0.0)};
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k)
        for (int l = 0; l < n; ++l)
          for (int m = 0; m < n; ++m) out(i, j, k, l, m) = t(i, j, k, l, m);
  return out;
}

/// Largest entry-wise relative disagreement, |a - b| / max(1, |a|, |b|).
inline double relative_disagreement(const MetaValues& a, const MetaValues& b) {
  if (a.n != b.n) throw Error(ErrorCode::DimensionMismatch, "metacurvature tensors of different dimension");
  double worst = 0.0;
  for (std::size_t k = 0; k < a.m.size(); ++k) {
    const double s = std::max({1.0, std::abs(a.m[k]), std::abs(b.m[k])});
    worst = std::max(worst, std::abs(a.m[k] - b.m[k]) / s);
  }
  return worst;
}

/// M(dx^i,dx^j,dx^k) = {x^i,{dx^j,dx^k}} - {{x^i,dx^j},dx^k} - {{x^i,dx^k},dx^j}
/// for any bracket provider with fn_form(i, form) and one_forms(a, b).
template <class Brackets>
MetaTensor assemble_metacurvature(const Brackets& br) {
  const int n = br.dim();
  const auto un = static_cast<std::size_t>(n);
  std::vector<FormJet> jk(un * un), ij(un * un);
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b) {
      const auto cov = [&](int i) { return basis<Jet, Variance::Covariant>(n, i); };
      jk[static_cast<std::size_t>(a * n + b)] = br.one_forms(cov(a), cov(b));
      ij[static_cast<std::size_t>(a * n + b)] = br.fn_form(a, cov(b));
    }
  MetaTensor t;
  t.n = n;
  t.raw.resize(un * un * un);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k) {
        const FormJet t1 = br.fn_form(i, jk[static_cast<std::size_t>(j * n + k)]);
        const FormJet t2 = br.one_forms(ij[static_cast<std::size_t>(i * n + j)], basis<Jet, Variance::Covariant>(n, k));
        const FormJet t3 = br.one_forms(ij[static_cast<std::size_t>(i * n + k)], basis<Jet, Variance::Covariant>(n, j));
        for (const FormJet* f : {&t1, &t2, &t3})
          for (std::size_t c = 0; c < f->size(); ++c) t.magnitude.see((*f)[c].value());
        FormJet m = t1 - t2 - t3;
        for (std::size_t c = 0; c < m.size(); ++c) t.magnitude.track(m[c].value());
        t.raw[static_cast<std::size_t>((i * n + j) * n + k)] = std::move(m);
      }
  // symmetrize over (i,j,k) and record how far the raw assembly was from it
  t.sym.resize(t.raw.size());
  Residual defect;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k) {
        const int perms[6][3] = {{i, j, k}, {i, k, j}, {j, i, k}, {j, k, i}, {k, i, j}, {k, j, i}};
        FormJet acc(n, 2);
        for (const auto& p : perms) acc += t.raw[static_cast<std::size_t>((p[0] * n + p[1]) * n + p[2])];
        acc = Jet(1.0 / 6.0) * acc;
        const FormJet& r = t.raw[static_cast<std::size_t>((i * n + j) * n + k)];
        for (std::size_t c = 0; c < acc.size(); ++c) {
          defect.see(r[c].value());
          defect.track(r[c].value() - acc[c].value());
        }
        t.sym[static_cast<std::size_t>((i * n + j) * n + k)] = std::move(acc);
      }
  defect.scale = std::max(defect.scale, t.magnitude.scale);
  t.symmetry_defect = defect.normalized();
  return t;
}

/// Metacurvature from the bracket definition. Requires a torsion-free flat
/// connection; symbols must carry jets of order >= 2 (inputs of order >= 3).
inline MetaTensor metacurvature_def(const ContraChristoffel& conn, double tol = kDefaultTolerance) {
  const double torsion = contra_torsion(conn).residual.normalized();
  if (torsion > tol) throw Error(ErrorCode::HasTorsion, "torsion residual " + std::to_string(torsion));
  const double curvature = contra_curvature(conn).residual.normalized();
  if (curvature > tol) throw Error(ErrorCode::NotFlat, "curvature residual " + std::to_string(curvature));
  return assemble_metacurvature(ConnectionBrackets(conn));
}

inline MetaTensor metacurvature_def(const MetricField& g, const PoissonField& pi, std::span<const double> point,
                                    double tol = kDefaultTolerance, int order = 3) {
  return metacurvature_def(metric_contra_connection(g, pi, point, order), tol);
}

/// omega = matrix inverse of pi at the point; DegeneratePoisson if singular.
inline std::vector<double> symplectic_form(const JetMatrix& pi) {
  try {
    return inverse(pi.values(), pi.n);
  } catch (const Error& e) {
    if (e.code() == ErrorCode::SingularMetric) throw Error(ErrorCode::DegeneratePoisson, "Poisson bivector is not invertible");
    throw;
  }
}

/// Residual of the flat-frame condition for chart coordinates:
/// Gamma^{ij}_k = pi^{ia} d_a pi^{jl} omega_{lk}.
inline Residual flat_frame_residual(const ContraChristoffel& conn) {
  const int n = conn.dim();
  const auto& pi = conn.pi();
  const auto omega = symplectic_form(pi);
  Residual r;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k) {
        double expected = 0.0;
        for (int l = 0; l < n; ++l)
          expected += conn.anchor(i, pi(j, l)).value() * omega[static_cast<std::size_t>(l * n + k)];
        r.see(expected);
        r.see(conn(i, j, k));
        r.track(conn(i, j, k) - expected);
      }
  return r;
}

/// Metacurvature from third derivatives of pi in a flat affine frame (the
/// chart coordinates): M = -kCovariantMetaSign * pi^{ai} pi^{bj} pi^{ck}
/// omega_{dl} omega_{em} d_a d_b d_c pi^{de}. Needs pi jets of order >= 3.
inline MetaValues metacurvature_symplectic_oracle(const ContraChristoffel& conn, double tol = kDefaultTolerance) {
  const int n = conn.dim();
  const auto& pi = conn.pi();
  const auto omega = symplectic_form(pi);
  const Residual frame = flat_frame_residual(conn);
  if (frame.normalized() > tol)
    throw Error(ErrorCode::NoFlatFrame,
                "chart coordinates are not affine for the connection (residual " + std::to_string(frame.normalized()) + ")");
  const auto un = static_cast<std::size_t>(n);
  auto idx5 = [&](int a, int b, int c, int d, int e) {
    return static_cast<std::size_t>((((a * n + b) * n + c) * n + d) * n + e);
  };
  std::vector<double> t(un * un * un * un * un, 0.0), u(t.size(), 0.0);
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b)
      for (int c = 0; c < n; ++c)
        for (int d = 0; d < n; ++d)
          for (int e = 0; e < n; ++e) {
            if (d == e) continue;
            t[idx5(a, b, c, d, e)] = pi(d, e).derivative(a).derivative(b).derivative(c).value();
          }
  auto pv = [&](int x, int y) { return pi(x, y).value(); };
  auto w = [&](int x, int y) { return omega[static_cast<std::size_t>(x * n + y)]; };
  // raise each derivative slot with pi^{a i}
  for (int slot = 0; slot < 3; ++slot) {
    std::fill(u.begin(), u.end(), 0.0);
    for (int a = 0; a < n; ++a)
      for (int b = 0; b < n; ++b)
        for (int c = 0; c < n; ++c)
          for (int d = 0; d < n; ++d)
            for (int e = 0; e < n; ++e) {
              const double v = t[idx5(a, b, c, d, e)];
              if (v == 0.0) continue;
              const int old = slot == 0 ? a : slot == 1 ? b : c;
              for (int x = 0; x < n; ++x) {
                const int na = slot == 0 ? x : a, nb = slot == 1 ? x : b, nc = slot == 2 ? x : c;
                u[idx5(na, nb, nc, d, e)] += pv(old, x) * v;
              }
            }
    std::swap(t, u);
  }
  MetaValues out{n, std::vector<double>(t.size(), 0.0)};
  const double sign = -kCovariantMetaSign;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k)
        for (int l = 0; l < n; ++l)
          for (int m = 0; m < n; ++m) {
            double acc = 0.0;
            for (int d = 0; d < n; ++d)
              for (int e = 0; e < n; ++e) acc += w(d, l) * w(e, m) * t[idx5(i, j, k, d, e)];
            out(i, j, k, l, m) = sign * acc;
          }
  return out;
}

inline MetaValues metacurvature_symplectic_oracle(const MetricField& g, const PoissonField& pi,
                                                  std::span<const double> point, double tol = kDefaultTolerance) {
  return metacurvature_symplectic_oracle(metric_contra_connection(g, pi, point, 3), tol);
}

/// max |D^i M^{jkl}_{mn} - D^j M^{ikl}_{mn}|, scale-free. The connection must
/// carry symbols of order >= 3 (inputs of order 4).
inline Residual meta_bianchi_residual(const ContraChristoffel& conn, const MetaTensor& m) {
  const int n = conn.dim();
  const auto un = static_cast<std::size_t>(n);
  // dm[i][j][k][l] = D^i M^{jkl} (2-form values)
  std::vector<FormValue> dm(un * un * un * un);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k)
        for (int l = 0; l < n; ++l) {
          FormJet acc = conn.derivative(i, m.jets(j, k, l));
          for (int p = 0; p < n; ++p) {
            acc -= conn.gamma(i, j, p) * m.jets(p, k, l);
            acc -= conn.gamma(i, k, p) * m.jets(j, p, l);
            acc -= conn.gamma(i, l, p) * m.jets(j, k, p);
          }
          dm[static_cast<std::size_t>(((i * n + j) * n + k) * n + l)] = values(acc);
        }
  Residual r;
  for (const auto& f : dm)
    for (std::size_t c = 0; c < f.size(); ++c) r.see(f[c]);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k)
        for (int l = 0; l < n; ++l) {
          const auto& a = dm[static_cast<std::size_t>(((i * n + j) * n + k) * n + l)];
          const auto& b = dm[static_cast<std::size_t>(((j * n + i) * n + k) * n + l)];
          for (std::size_t c = 0; c < a.size(); ++c) r.track(a[c] - b[c]);
        }
  return r;
}

inline Residual meta_bianchi_residual(const ContraChristoffel& conn, double tol = kDefaultTolerance) {
  return meta_bianchi_residual(conn, metacurvature_def(conn, tol));
}

inline Residual meta_bianchi_residual(const MetricField& g, const PoissonField& pi, std::span<const double> point,
                                      double tol = kDefaultTolerance) {
  return meta_bianchi_residual(metric_contra_connection(g, pi, point, 4), tol);
}

/// {f, sigma} = D_{df} sigma at a point.
inline FormValue bracket_fn_form(const MetricField& g, const PoissonField& pi, const ScalarExpr& f,
                                 const FormField& sigma, std::span<const double> point) {
  const auto conn = metric_contra_connection(g, pi, point, 1);
  return values(conn.derivative(exterior_d(eval_jet(f, point, 1), conn.dim()), jets(sigma, point, 1)));
}

/// {alpha, beta} for 1-form fields at a point.
inline FormValue bracket_one_forms(const MetricField& g, const PoissonField& pi, const FormField& alpha,
                                   const FormField& beta, std::span<const double> point) {
  if (alpha.degree() != 1 || beta.degree() != 1) throw Error(ErrorCode::DegreeMismatch, "bracket of 1-forms");
  const auto conn = metric_contra_connection(g, pi, point, 2);
  const ConnectionBrackets br(conn);
  return values(br.one_forms(jets(alpha, point, 1), jets(beta, point, 1)));
}

}  // namespace pmc
