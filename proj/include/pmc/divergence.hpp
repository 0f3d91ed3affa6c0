#pragma once

#include <random>
#include <span>
#include <vector>

#include "pmc/connections.hpp"
#include "pmc/error.hpp"
#include "pmc/fields.hpp"
#include "pmc/forms.hpp"

namespace pmc {

/// delta s = pi -| ds - d(pi -| s). Output loses one jet order.
inline FormJet koszul_brylinski(const JetMatrix& pi, const FormJet& sigma) {
  const int n = pi.n, p = sigma.degree();
  if (p < 1) throw Error(ErrorCode::DegreeMismatch, "Koszul-Brylinski operator needs a form of degree >= 1");
  const auto bivector = to_multivector(pi);
  FormJet out(n, p - 1);
  if (p < n) out += contract(bivector, exterior_d(sigma));
  if (p >= 2) out -= exterior_d(contract(bivector, sigma));
  return out;
}

inline FormValue koszul_brylinski(const PoissonField& pi, const FormField& sigma, std::span<const double> point) {
  if (sigma.degree() < 1) throw Error(ErrorCode::DegreeMismatch, "Koszul-Brylinski operator needs a form of degree >= 1");
  return values(koszul_brylinski(pi.jet_matrix(point, 1), jets(sigma, point, 1)));
}

/// (D.s)_K = (D_{dx^i} s)_{iK}.
inline FormJet contra_divergence(const ContraChristoffel& conn, const FormJet& sigma) {
  const int n = conn.dim(), p = sigma.degree();
  if (p < 1) throw Error(ErrorCode::DegreeMismatch, "divergence needs a form of degree >= 1");
  FormJet out(n, p - 1);
  std::vector<int> idx(static_cast<std::size_t>(p));
  for (int i = 0; i < n; ++i) {
    const FormJet d = conn.derivative(i, sigma);
    for (std::size_t c = 0; c < out.size(); ++c) {
      const auto k = out.indices(c);
      idx[0] = i;
      std::copy(k.begin(), k.end(), idx.begin() + 1);
      out[c] += d.at(idx);
    }
  }
  return out;
}

inline FormValue contra_divergence(const MetricField& g, const PoissonField& pi, const FormField& sigma,
                                   std::span<const double> point) {
  const auto conn = metric_contra_connection(g, pi, point, 1);
  return values(contra_divergence(conn, jets(sigma, point, 1)));
}

/// phi^j = D.dx^j = Gamma^{ij}_i, with the jets of the symbols.
inline MultivectorJet modular_vector_jets(const ContraChristoffel& conn) {
  const int n = conn.dim();
  MultivectorJet phi(n, 1);
  for (int j = 0; j < n; ++j) {
    Jet acc;
    for (int i = 0; i < n; ++i) acc += conn.gamma(i, j, i);
    phi[static_cast<std::size_t>(j)] = acc;
  }
  return phi;
}

/// Residual of D.s = phi -| s - delta s for one form.
inline Residual divergence_identity_residual(const ContraChristoffel& conn, const FormJet& sigma) {
  const auto phi = modular_vector_jets(conn);
  const FormJet lhs = contra_divergence(conn, sigma);
  const FormJet a = contract(phi, sigma);
  const FormJet b = koszul_brylinski(conn.pi(), sigma);
  Residual r;
  for (std::size_t c = 0; c < lhs.size(); ++c) {
    r.see(lhs[c].value());
    r.see(a[c].value());
    r.see(b[c].value());
    r.track(lhs[c].value() - a[c].value() + b[c].value());
  }
  return r;
}

/// Random polynomial-coefficient form jet of the given degree at the
/// expansion point (coefficients of order 1 are enough for the identities).
inline FormJet random_form_jet(int dim, int degree, int order, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  FormJet f(dim, degree);
  const std::size_t ncoef = multi_indices(dim).size(order);
  for (std::size_t c = 0; c < f.size(); ++c) {
    std::vector<double> coeffs(ncoef);
    for (auto& x : coeffs) x = u(rng);
    f[c] = Jet::from_coefficients(dim, order, std::move(coeffs));
  }
  return f;
}

/// Postcondition tolerance for the modular vector identity.
inline constexpr double kModularTolerance = 1e-9;

/// phi at the point; verified against D.a = phi -| a - pi -| da on ten
/// random 1-forms (PostconditionFailed otherwise).
inline MultivectorValue modular_vector(const ContraChristoffel& conn, std::uint64_t seed = 42) {
  const int n = conn.dim();
  std::mt19937_64 rng(seed);
  for (int t = 0; t < 10; ++t) {
    const Residual r = divergence_identity_residual(conn, random_form_jet(n, 1, 1, rng));
    if (r.normalized() > kModularTolerance)
      throw Error(ErrorCode::PostconditionFailed, "modular vector identity residual " + std::to_string(r.normalized()));
  }
  return values(modular_vector_jets(conn));
}

inline MultivectorValue modular_vector(const MetricField& g, const PoissonField& pi, std::span<const double> point) {
  return modular_vector(metric_contra_connection(g, pi, point, 1));
}

/// d(pi -| eps), scale-free against eps, pi -| eps and its derivatives.
inline Residual volume_compat(const JetMatrix& pi, const FormJet& eps) {
  if (eps.degree() < 2) return Residual{0.0, std::abs(eps[0].value())};  // pi -| eps has negative degree
  const FormJet inner = contract(to_multivector(pi), eps);
  Residual r;
  r.see(eps[0].value());
  for (std::size_t c = 0; c < inner.size(); ++c) r.see(inner[c].value());
  if (inner.degree() < inner.dim()) {
    const FormJet d = exterior_d(inner);
    for (std::size_t c = 0; c < d.size(); ++c) {
      r.see(d[c].value());
      r.track(d[c].value());
    }
  }
  return r;
}

inline Residual volume_compat(const PoissonField& pi, const VolumeField& eps, std::span<const double> point) {
  return volume_compat(pi.jet_matrix(point, 1), eps.jets(point, 1));
}

/// Largest component of D_{dx^i} eps over all co-frame directions.
inline Residual check_D_epsilon(const ContraChristoffel& conn, const FormJet& eps) {
  Residual r;
  r.see(eps[0].value());
  for (int i = 0; i < conn.dim(); ++i) {
    const FormJet d = conn.derivative(i, eps);
    r.see(conn.anchor(i, eps[0]).value());
    r.track(d[0].value());
  }
  return r;
}

inline Residual check_D_epsilon(const MetricField& g, const PoissonField& pi, const VolumeField& eps,
                                std::span<const double> point) {
  return check_D_epsilon(metric_contra_connection(g, pi, point, 1), eps.jets(point, 1));
}

/// phi -| eps + d(pi -| eps); vanishes whenever D eps = 0.
inline Residual modular_volume_residual(const ContraChristoffel& conn, const FormJet& eps) {
  if (conn.dim() < 2) return {};  // pi = 0, so phi = 0 too
  const FormValue a = values(contract(modular_vector_jets(conn), eps));
  const FormValue b = values(exterior_d(contract(to_multivector(conn.pi()), eps)));
  Residual r;
  for (std::size_t c = 0; c < a.size(); ++c) {
    r.see(a[c]);
    r.see(b[c]);
    r.track(a[c] + b[c]);
  }
  return r;
}

}  // namespace pmc
