#pragma once

#include <cmath>
#include <span>
#include <string>
#include <vector>

#include "pmc/connections.hpp"
#include "pmc/conventions.hpp"
#include "pmc/divergence.hpp"
#include "pmc/error.hpp"
#include "pmc/fields.hpp"
#include "pmc/forms.hpp"
#include "pmc/metacurvature.hpp"

namespace pmc {

/// Vector fields X_A with a constant antisymmetric matrix Pi^{AB}, meant to
/// give pi = 1/2 Pi^{AB} X_A ^ X_B.
struct KillingSystem {
  std::vector<MultivectorField> vectors;
  std::vector<double> Pi;  // r x r, row-major

  int rank() const { return static_cast<int>(vectors.size()); }
  double pi(int a, int b) const { return Pi[static_cast<std::size_t>(a * rank() + b)]; }

  void validate(int dim) const {
    const auto r = vectors.size();
    if (Pi.size() != r * r) throw Error(ErrorCode::DimensionMismatch, "Killing Pi matrix must be r x r");
    for (const auto& x : vectors) {
      if (x.dim() != dim || x.degree() != 1)
        throw Error(ErrorCode::DimensionMismatch, "Killing vector does not match the chart dimension");
      for (std::size_t c = 0; c < x.size(); ++c) x[c].bind(dim);
    }
    for (int a = 0; a < rank(); ++a)
      for (int b = 0; b < rank(); ++b)
        if (pi(a, b) != -pi(b, a)) throw Error(ErrorCode::NotAntisymmetric, "Killing Pi matrix must be antisymmetric");
  }

  std::vector<MultivectorJet> jets(std::span<const double> point, int order) const {
    std::vector<MultivectorJet> out;
    out.reserve(vectors.size());
    for (const auto& x : vectors) out.push_back(pmc::jets(x, point, order));
    return out;
  }

  friend bool operator==(const KillingSystem& a, const KillingSystem& b) {
    if (a.Pi != b.Pi || a.vectors.size() != b.vectors.size()) return false;
    for (std::size_t k = 0; k < a.vectors.size(); ++k)
      for (std::size_t c = 0; c < a.vectors[k].size(); ++c)
        if (!(a.vectors[k][c] == b.vectors[k][c])) return false;
    return true;
  }
};

/// max |L_X g|, scale-free against the terms of the coordinate formula.
inline Residual killing_residual(const MultivectorJet& x, const JetMatrix& g) {
  const int n = g.n;
  Residual r;
  const JetMatrix l = lie_derivative(x, g);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      for (int k = 0; k < n; ++k) {
        const auto uk = static_cast<std::size_t>(k);
        r.see(x[uk].value() * g(i, j).derivative(k).value());
        r.see(g(k, j).value() * x[uk].derivative(i).value());
        r.see(g(i, k).value() * x[uk].derivative(j).value());
      }
      r.track(l(i, j).value());
    }
  return r;
}

inline Residual killing_residual(const MetricField& g, const MultivectorField& x, std::span<const double> point) {
  return killing_residual(jets(x, point, 1), g.jets(point, 1));
}

/// pi^{ij} = Pi^{AB} X_A^i X_B^j on jets.
inline JetMatrix reconstruct_pi(const KillingSystem& ks, const std::vector<MultivectorJet>& x, int n) {
  JetMatrix out(n);
  for (int a = 0; a < ks.rank(); ++a)
    for (int b = 0; b < ks.rank(); ++b) {
      const double c = ks.pi(a, b);
      if (c == 0.0) continue;
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
          out(i, j) += Jet(c) * x[static_cast<std::size_t>(a)][static_cast<std::size_t>(i)] *
                       x[static_cast<std::size_t>(b)][static_cast<std::size_t>(j)];
    }
  return out;
}

inline MultivectorValue reconstruct_pi(const KillingSystem& ks, std::span<const double> point) {
  const int n = static_cast<int>(point.size());
  return values(to_multivector(reconstruct_pi(ks, ks.jets(point, 0), n)));
}

/// Largest deviation between the reconstructed and a declared bivector.
inline Residual reconstruction_residual(const KillingSystem& ks, const PoissonField& pi, std::span<const double> point) {
  const auto rec = reconstruct_pi(ks, point);
  const auto decl = values(pi.jets(point, 0));
  Residual r;
  for (std::size_t c = 0; c < rec.size(); ++c) {
    r.see(rec[c]);
    r.see(decl[c]);
    r.track(rec[c] - decl[c]);
  }
  return r;
}

/// Largest |[X_A, X_B]| component over all pairs.
inline Residual commutator_residual(const std::vector<MultivectorJet>& x) {
  Residual r;
  for (std::size_t a = 0; a < x.size(); ++a)
    for (std::size_t b = a + 1; b < x.size(); ++b) {
      const auto v = values(lie_bracket(x[a], x[b]));
      for (std::size_t c = 0; c < v.size(); ++c) r.track(v[c]);
      for (const auto* y : {&x[a], &x[b]})
        for (std::size_t c = 0; c < y->size(); ++c)
          for (int k = 0; k < y->dim(); ++k) r.see((*y)[c].derivative(k).value());
    }
  return r;
}

/// Bracket provider from Killing data: {x^i, s} = Pi^{AB} X_A^i L_{X_B} s,
/// {a, b} = Pi^{AB} L_{X_A} a ^ L_{X_B} b.
class KillingBrackets {
 public:
  KillingBrackets(const KillingSystem& ks, std::vector<MultivectorJet> x, int n) : ks_(ks), x_(std::move(x)), n_(n) {}

  int dim() const { return n_; }

  FormJet fn_form(int i, const FormJet& s) const {
    FormJet out(n_, s.degree());
    for (int b = 0; b < ks_.rank(); ++b) {
      Jet coef;
      for (int a = 0; a < ks_.rank(); ++a)
        if (ks_.pi(a, b) != 0.0) coef += Jet(ks_.pi(a, b)) * x_[static_cast<std::size_t>(a)][static_cast<std::size_t>(i)];
      if (coef.is_constant() && coef.value() == 0.0) continue;
      out += coef * lie_derivative(x_[static_cast<std::size_t>(b)], s);
    }
    return out;
  }

  FormJet one_forms(const FormJet& a, const FormJet& b) const {
    if (a.degree() != 1 || b.degree() != 1) throw Error(ErrorCode::DegreeMismatch, "bracket of 1-forms");
    std::vector<FormJet> la, lb;
    for (const auto& x : x_) {
      la.push_back(lie_derivative(x, a));
      lb.push_back(lie_derivative(x, b));
    }
    FormJet out(n_, 2);
    for (int p = 0; p < ks_.rank(); ++p)
      for (int q = 0; q < ks_.rank(); ++q)
        if (ks_.pi(p, q) != 0.0)
          out += Jet(ks_.pi(p, q)) * wedge(la[static_cast<std::size_t>(p)], lb[static_cast<std::size_t>(q)]);
    return out;
  }

 private:
  const KillingSystem& ks_;
  std::vector<MultivectorJet> x_;
  int n_;
};

/// Gamma_K^{ij}_k = Pi^{AB} X_A^i d_k X_B^j, wrapped with the reconstructed pi.
/// Killing vector jets of order K give symbols of order K - 1.
inline ContraChristoffel killing_connection(const KillingSystem& ks, const std::vector<MultivectorJet>& x, int n) {
  JetTensor3 gamma(n);
  for (int a = 0; a < ks.rank(); ++a)
    for (int b = 0; b < ks.rank(); ++b) {
      const double c = ks.pi(a, b);
      if (c == 0.0) continue;
      const auto& xa = x[static_cast<std::size_t>(a)];
      const auto& xb = x[static_cast<std::size_t>(b)];
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
          for (int k = 0; k < n; ++k)
            gamma(i, j, k) += Jet(c) * xa[static_cast<std::size_t>(i)] * xb[static_cast<std::size_t>(j)].derivative(k);
    }
  return ContraChristoffel(reconstruct_pi(ks, x, n), std::move(gamma));
}

/// D_a b = Pi^{AB} (X_A -| a) L_{X_B} b at a point.
inline FormValue killing_connection(const KillingSystem& ks, const FormField& alpha, const FormField& beta,
                                    std::span<const double> point) {
  const int n = static_cast<int>(point.size());
  const auto x = ks.jets(point, 1);
  const FormJet a = jets(alpha, point, 1), b = jets(beta, point, 1);
  FormJet out(n, b.degree());
  for (int p = 0; p < ks.rank(); ++p)
    for (int q = 0; q < ks.rank(); ++q) {
      const double c = ks.pi(p, q);
      if (c == 0.0) continue;
      const Jet xa = contract(x[static_cast<std::size_t>(p)], a)[0];
      out += (Jet(c) * xa) * lie_derivative(x[static_cast<std::size_t>(q)], b);
    }
  return values(out);
}

/// {a, b} = Pi^{AB} L_{X_A} a ^ L_{X_B} b at a point.
inline FormValue killing_form_bracket(const KillingSystem& ks, const FormField& alpha, const FormField& beta,
                                      std::span<const double> point) {
  const int n = static_cast<int>(point.size());
  const KillingBrackets br(ks, ks.jets(point, 1), n);
  return values(br.one_forms(jets(alpha, point, 1), jets(beta, point, 1)));
}

/// Largest deviation between two sets of connection symbols at the point.
inline Residual connection_disagreement(const ContraChristoffel& a, const ContraChristoffel& b) {
  Residual r;
  const int n = a.dim();
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k) {
        r.see(a(i, j, k));
        r.see(b(i, j, k));
        r.track(a(i, j, k) - b(i, j, k));
      }
  return r;
}

/// d(pi -| eps) through Killing data:
/// Pi^{AB} X_A -| L_{X_B} eps - 1/2 Pi^{AB} [X_A, X_B] -| eps.
inline Residual killing_volume_residual(const KillingSystem& ks, const std::vector<MultivectorJet>& x,
                                        const FormJet& eps) {
  const int n = eps.dim();
  FormJet acc(n, n - 1);
  Residual r;
  r.see(eps[0].value());
  for (int a = 0; a < ks.rank(); ++a)
    for (int b = 0; b < ks.rank(); ++b) {
      const double c = ks.pi(a, b);
      if (c == 0.0) continue;
      const auto& xa = x[static_cast<std::size_t>(a)];
      const auto& xb = x[static_cast<std::size_t>(b)];
      const FormJet t1 = Jet(c) * contract(xa, lie_derivative(xb, eps));
      const FormJet t2 = Jet(-0.5 * c) * contract(lie_bracket(xa, xb), eps);
      for (const FormJet* t : {&t1, &t2})
        for (std::size_t k = 0; k < t->size(); ++k) r.see((*t)[k].value());
      acc += t1;
      acc += t2;
    }
  for (std::size_t k = 0; k < acc.size(); ++k) r.track(acc[k].value());
  return r;
}

/// Outcome of checking the compatibility conditions through Killing data only.
struct KillingVerification {
  Residual killing;         // max |L_{X_A} g|
  Residual commutators;     // max |[X_A, X_B]|
  Residual reconstruction;  // reconstructed vs declared pi
  Residual torsion;
  Residual curvature;
  Residual metacurvature;
  Residual volume;           // d(pi -| eps) from the Killing formula
  Residual connection;       // Killing connection vs metric connection

  bool all_pass(double tol) const {
    for (const auto* r : {&killing, &commutators, &reconstruction, &torsion, &curvature, &metacurvature, &volume,
                          &connection})
      if (r->normalized() > tol) return false;
    return true;
  }
};

/// Verifies torsion, curvature, metacurvature and the divergence condition
/// from the Killing formulas at one point. ReconstructionMismatch if the
/// system does not reproduce the declared pi.
inline KillingVerification verify_compatible_via_killing(const MetricField& g, const PoissonField& pi,
                                                         const VolumeField& eps, const KillingSystem& ks,
                                                         std::span<const double> point, double tol = kDefaultTolerance,
                                                         int order = 3) {
  const int n = g.dim();
  ks.validate(n);
  KillingVerification v;
  v.reconstruction = reconstruction_residual(ks, pi, point);
  if (v.reconstruction.normalized() > tol)
    throw Error(ErrorCode::ReconstructionMismatch,
                "Killing system does not reproduce pi (residual " + std::to_string(v.reconstruction.normalized()) + ")");
  const auto x = ks.jets(point, order);
  const JetMatrix gj = g.jets(point, order);
  for (const auto& xa : x) v.killing.merge(killing_residual(xa, gj));
  v.commutators = commutator_residual(x);
  const ContraChristoffel kc = killing_connection(ks, x, n);
  v.torsion = contra_torsion(kc).residual;
  v.curvature = contra_curvature(kc).residual;
  const MetaTensor m = assemble_metacurvature(KillingBrackets(ks, x, n));
  v.metacurvature = m.magnitude;
  v.volume = killing_volume_residual(ks, x, eps.jets(point, order));
  v.connection = connection_disagreement(kc, metric_contra_connection(gj, pi.jet_matrix(point, order)));
  return v;
}

}  // namespace pmc
