#include <gtest/gtest.h>

#include "support.hpp"

using namespace pmc;
using namespace testing_support;

namespace {

double h_cubic(const Point& p, double c3 = 1.0) { return 1.0 + c3 * p[0] * p[0] * p[0]; }

}  // namespace

// With pi^{12} = h and only d_x^3 h = 6 nonzero, the symplectic formula has a
// single term: pi^{12} pi^{12} pi^{12} omega_{21} omega_{12} d^3 pi^{21}
// = h^3 (1/h)(-1/h)(-6) = 6h in magnitude.
TEST(Metacurvature, ConformalCubicHandValue) {
  const auto b = conformal_cubic().bundle;
  for (const auto& p : b.chart.points(10, 41)) {
    const auto m = metacurvature_def(b.metric, b.poisson, p);
    EXPECT_LE(rel_err(m(1, 1, 1, 0, 1), 6.0 * h_cubic(p)), 1e-9);
    EXPECT_LE(rel_err(m(1, 1, 1, 1, 0), -6.0 * h_cubic(p)), 1e-9);
    // every other contravariant triple vanishes
    for (int i = 0; i < 2; ++i)
      for (int j = 0; j < 2; ++j)
        for (int k = 0; k < 2; ++k)
          if (i + j + k < 3) {
            EXPECT_NEAR(m(i, j, k, 0, 1), 0.0, 1e-9);
          }
  }
}

TEST(Metacurvature, AgreesWithSymplecticOracle) {
  for (const char* name : {"conformal-cubic", "podles-sphere", "flat-torus-2d", "four-torus-z4-cover"}) {
    const auto b = name == std::string("conformal-cubic") ? conformal_cubic().bundle : get_entry(name).bundle;
    for (const auto& p : b.chart.points(10, 42)) {
      const auto conn = metric_contra_connection(b.metric, b.poisson, p, 3);
      const auto m = metacurvature_def(conn);
      EXPECT_LE(relative_disagreement(values(m), metacurvature_symplectic_oracle(conn)), 1e-7) << name;
    }
  }
}

TEST(Metacurvature, VanishesExactlyForQuadraticPoisson) {
  for (double c3 : {0.0, 0.1, 1.0}) {
    const auto b = conformal_cubic(c3).bundle;
    double worst = 0.0;
    for (const auto& p : b.chart.points(10, 43))
      worst = std::max(worst, metacurvature_def(b.metric, b.poisson, p).max_abs());
    if (c3 == 0.0) {
      EXPECT_LE(worst, 1e-9);
    } else {
      EXPECT_GT(worst, 1e-3) << c3;
    }
  }
}

TEST(Metacurvature, TotallySymmetricBeforeSymmetrization) {
  for (const char* name : {"conformal-cubic", "podles-sphere", "heisenberg-nil3"}) {
    const auto b = get_entry(name).bundle;
    for (const auto& p : b.chart.points(5, 44))
      EXPECT_LE(metacurvature_def(b.metric, b.poisson, p).symmetry_defect, 1e-9) << name;
  }
}

TEST(Metacurvature, BianchiSymmetry) {
  const auto b = conformal_cubic().bundle;
  for (const auto& p : b.chart.points(10, 45))
    EXPECT_LE(meta_bianchi_residual(b.metric, b.poisson, p).normalized(), 1e-7);
}

// {f, dx^j} is C-infinity linear in f's differential: {f,s} = D_{df} s
TEST(Brackets, FunctionFormBracketIsDerivativeAlongDf) {
  const auto b = conformal_cubic().bundle;
  const std::vector<double> p{0.5, 0.5};
  const auto x = ScalarExpr::coordinate(0), y = ScalarExpr::coordinate(1);
  FormField dy(2, 1);
  dy[1] = ScalarExpr(1.0);
  const auto conn = metric_contra_connection(b.metric, b.poisson, p, 1);
  // f = x y: df = y dx + x dy
  const auto got = bracket_fn_form(b.metric, b.poisson, x * y, dy, p);
  const auto want = values(Jet(0.5) * conn.derivative(0, basis<Jet, Variance::Covariant>(2, 1)) +
                           Jet(0.5) * conn.derivative(1, basis<Jet, Variance::Covariant>(2, 1)));
  for (std::size_t k = 0; k < got.size(); ++k) EXPECT_NEAR(got[k], want[k], 1e-14);
}

TEST(Brackets, OneFormBracketOfCoordinatesIsDOfSymbols) {
  const auto b = conformal_cubic().bundle;
  const std::vector<double> p{0.7, -0.2};
  FormField dx(2, 1), dy(2, 1);
  dx[0] = ScalarExpr(1.0);
  dy[1] = ScalarExpr(1.0);
  const auto conn = metric_contra_connection(b.metric, b.poisson, p, 2);
  const auto got = bracket_one_forms(b.metric, b.poisson, dx, dy, p);
  FormJet g(2, 1);
  for (int k = 0; k < 2; ++k) g[static_cast<std::size_t>(k)] = conn.gamma(0, 1, k);
  EXPECT_NEAR(got[0], values(exterior_d(g))[0], 1e-13);
}

TEST(Metacurvature, Preconditions) {
  // g = diag(1 + x^2, 1) with constant pi has curvature
  const auto x = ScalarExpr::coordinate(0);
  MetricField g(2);
  g.set(0, 0, ScalarExpr(1.0) + pow(x, 2));
  g.set(1, 1, ScalarExpr(1.0));
  PoissonField pi(2);
  pi.set(0, 1, ScalarExpr(1.0));
  const std::vector<double> p{0.3, 0.2};
  try {
    metacurvature_def(g, pi, p);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::NotFlat);
  }
  const auto conn = metric_contra_connection(g, pi, p, 3);
  JetTensor3 s = conn.symbols();
  s(0, 1, 1) += Jet(1.0);
  try {
    metacurvature_def(ContraChristoffel(conn.pi(), s));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::HasTorsion);
  }
  const auto su2 = get_entry("r3-su2").bundle;
  const std::vector<double> q{1.0, 2.0, 3.0};
  try {
    metacurvature_symplectic_oracle(su2.metric, su2.poisson, q);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::DegeneratePoisson);
  }
}

// Flat torus, pi = d_x^d_y, metric written in the coordinates (x, y + x^2/2)
// is not affine for D, so the oracle refuses it.
TEST(Metacurvature, OracleNeedsAffineCoordinates) {
  const auto x = ScalarExpr::coordinate(0);
  // pull back delta along (x, y) -> (x, y + x^2/2): g = [[1 + x^2, x], [x, 1]]
  MetricField g(2);
  g.set(0, 0, ScalarExpr(1.0) + pow(x, 2));
  g.set(0, 1, x);
  g.set(1, 1, ScalarExpr(1.0));
  PoissonField pi(2);
  pi.set(0, 1, ScalarExpr(1.0));
  const std::vector<double> p{0.5, 0.1};
  const auto conn = metric_contra_connection(g, pi, p, 3);
  ASSERT_LE(contra_curvature(conn).residual.normalized(), 1e-12);
  EXPECT_LE(metacurvature_def(conn).max_abs(), 1e-12);
  try {
    metacurvature_symplectic_oracle(conn);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::NoFlatFrame);
  }
}
