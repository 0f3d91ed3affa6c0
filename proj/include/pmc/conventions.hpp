#pragma once

/// Sign and normalization conventions used throughout the library.
///
/// Every coordinate formula elsewhere is written against this table; change
/// nothing here without re-running the full test suite.
///
///  quantity              convention
///  --------------------  ---------------------------------------------------
///  Poisson bracket       {f,g} = pi^{ij} d_i f d_j g
///  anchor (sharp)        (#alpha)^i = pi^{ji} alpha_j, so (#df)(g) = {f,g}
///  form components       sigma = sum_{i1<...<ip} sigma_{i1...ip} dx^{i1}^...^dx^{ip};
///                        sigma(d_{i1},...,d_{ip}) = sigma_{i1...ip}
///  wedge                 (a^b)_I = sum over (p,q)-shuffles J|K of I of sign(J,K) a_J b_K,
///                        so (dx^dy)_{12} = 1 and (a^b)(X,Y) = a(X)b(Y) - a(Y)b(X) for 1-forms
///  multivectors          same storage as forms: pi = sum_{i<j} pi^{ij} d_i ^ d_j
///  interior product      (X -| sigma)_K = X^i sigma_{iK}; for a q-vector P,
///                        (P -| sigma)_K = sum_{I increasing} P^I sigma_{IK},
///                        hence (X^Y) -| eps = Y -| (X -| eps) = eps(X,Y,...)
///                        and pi -| (df^dg) = {f,g}
///  exterior derivative   (d sigma)_{i0...ip} = sum_r (-1)^r d_{i_r} sigma_{i0..^i_r..ip},
///                        no factorial normalization
///  Koszul bracket        [a,b]_k = a_i b_j d_k pi^{ij} + a_i pi^{il} d_l b_k - b_j pi^{jl} d_l a_k,
///                        so [df,dg] = d{f,g}
///  contravariant conn.   D_{dx^i} dx^j = Gamma^{ij}_k dx^k;
///                        (D_i sigma)_K = pi^{ia} d_a sigma_K + sum_r Gamma^{ij}_{k_r} sigma_{K[k_r -> j]}
///                        (D_i V)^K    = pi^{ia} d_a V^K    - sum_r Gamma^{i k_r}_j V^{K[k_r -> j]}
///  torsion               T^{ij}_k = Gamma^{ij}_k - Gamma^{ji}_k - d_k pi^{ij}
///  curvature             K(dx^i,dx^j) dx^k = R^{ijk}_l dx^l with
///                        R^{ijk}_l = pi^{ia} d_a Gamma^{jk}_l - pi^{ja} d_a Gamma^{ik}_l
///                                  + Gamma^{jk}_m Gamma^{im}_l - Gamma^{ik}_m Gamma^{jm}_l
///                                  - d_a pi^{ij} Gamma^{ak}_l
///  Riemann               R^l_{ijk} = d_i Gamma^l_{jk} - d_j Gamma^l_{ik} + Gamma^l_{im} Gamma^m_{jk}
///                                  - Gamma^l_{jm} Gamma^m_{ik};  Ric_{jk} = R^i_{ijk}; R = g^{jk} Ric_{jk}
///  symplectic form       omega = matrix inverse of pi, pi^{ik} omega_{kj} = delta^i_j (so #omega = -pi)
///  metacurvature         M^{ijk}_{lm} = M(dx^i,dx^j,dx^k)_{lm} with
///                        M(df,b,c) = {f,{b,c}} - {{f,b},c} - {{f,c},b}
///  modular vector        phi^j = (D.dx^j) = Gamma^{ij}_i
///  contravariant div.    (D.sigma)_K = (D_i sigma)_{iK}
///  Koszul-Brylinski      delta sigma = pi -| d sigma - d(pi -| sigma)
///  scale-free residual   |r| / max(1, s), s = largest magnitude among the terms entering r
namespace pmc {

/// Sign relating the covariant (flat-frame) metacurvature formula to the
/// bracket definition: M = kCovariantMetaSign * (-pi pi pi omega omega d^3 pi).
inline constexpr double kCovariantMetaSign = -1.0;

/// Default absolute threshold for scale-free "is zero" decisions.
inline constexpr double kDefaultTolerance = 1e-8;

}  // namespace pmc
