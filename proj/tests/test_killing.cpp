#include <gtest/gtest.h>

#include "support.hpp"

using namespace pmc;
using namespace testing_support;

namespace {

MultivectorField vector_field(std::vector<ScalarExpr> c) {
  MultivectorField v(static_cast<int>(c.size()), 1);
  for (std::size_t k = 0; k < c.size(); ++k) v[k] = c[k];
  return v;
}

}  // namespace

TEST(Killing, CatalogSystemsVerify) {
  for (const char* name : {"heisenberg-nil3", "flat-torus-n", "flat-torus-2d", "four-torus-z4-cover"}) {
    const auto b = get_entry(name).bundle;
    ASSERT_TRUE(b.killing.has_value());
    for (const auto& x : b.chart.points(10, 61)) {
      const auto v = verify_compatible_via_killing(b.metric, b.poisson, b.volume, *b.killing, x);
      EXPECT_TRUE(v.all_pass(1e-9)) << name;
      EXPECT_LE(v.connection.normalized(), 1e-9) << name;
      EXPECT_LE(reconstruction_residual(*b.killing, b.poisson, x).normalized(), 1e-12) << name;
    }
  }
}

TEST(Killing, Nil3VectorsAreKillingAndCommute) {
  const auto b = get_entry("heisenberg-nil3").bundle;
  const std::vector<double> x{0.3, -1.2, 2.0};
  for (const auto& k : b.killing->vectors)
    for (double v : lie_derivative(k, b.metric, x)) EXPECT_NEAR(v, 0.0, 1e-14);
  EXPECT_LE(commutator_residual(b.killing->jets(x, 2)).normalized(), 1e-14);
}

TEST(Killing, NonKillingFieldIsDetected) {
  const auto g = MetricField::identity(2);
  const auto x = ScalarExpr::coordinate(0);
  const std::vector<double> p{0.5, 0.5};
  EXPECT_GT(killing_residual(g, vector_field({x, ScalarExpr(0.0)}), p).normalized(), 0.1);
  EXPECT_EQ(killing_residual(g, vector_field({-ScalarExpr::coordinate(1), x}), p).normalized(), 0.0);
}

TEST(Killing, ReconstructedBivector) {
  const auto b = get_entry("flat-torus-n").bundle;
  const std::vector<double> x{0.1, 0.2, 0.3};
  const auto pi = reconstruct_pi(*b.killing, x);
  EXPECT_DOUBLE_EQ(pi.at({0, 1}), 1.0);
  EXPECT_DOUBLE_EQ(pi.at({0, 2}), std::sqrt(2.0));
  EXPECT_DOUBLE_EQ(pi.at({1, 2}), 0.0);
}

TEST(Killing, MismatchedSystemIsRejected) {
  auto b = get_entry("flat-torus-n").bundle;
  KillingSystem ks = *b.killing;
  ks.Pi = {0.0, 2.0, -2.0, 0.0};
  const std::vector<double> x{0.0, 0.0, 0.0};
  try {
    verify_compatible_via_killing(b.metric, b.poisson, b.volume, ks, x);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::ReconstructionMismatch);
  }
  ks.Pi = {0.0, 1.0, 1.0, 0.0};
  EXPECT_THROW(ks.validate(3), Error);
}

TEST(Killing, FormBracketMatchesConnectionBracket) {
  std::mt19937_64 rng(62);
  const auto b = get_entry("heisenberg-nil3").bundle;
  for (int trial = 0; trial < 5; ++trial) {
    const auto x = random_point(rng, 3);
    FormField a(3, 1), c(3, 1);
    for (std::size_t k = 0; k < 3; ++k) {
      a[k] = random_expr(rng, 3, 2);
      c[k] = random_expr(rng, 3, 2);
    }
    const auto kb = killing_form_bracket(*b.killing, a, c, x);
    const auto cb = bracket_one_forms(b.metric, b.poisson, a, c, x);
    for (std::size_t k = 0; k < kb.size(); ++k) EXPECT_NEAR(kb[k], cb[k], 1e-10 * std::max(1.0, std::abs(cb[k])));
    const auto kd = killing_connection(*b.killing, a, c, x);
    const auto conn = metric_contra_connection(b.metric, b.poisson, x, 1);
    const auto md = values(conn.derivative(jets(a, x, 1), jets(c, x, 1)));
    for (std::size_t k = 0; k < kd.size(); ++k) EXPECT_NEAR(kd[k], md[k], 1e-10 * std::max(1.0, std::abs(md[k])));
  }
}

TEST(Killing, MetacurvatureFromKillingDataVanishes) {
  const auto b = get_entry("heisenberg-nil3").bundle;
  const std::vector<double> x{0.5, 0.25, -0.75};
  const auto m = assemble_metacurvature(KillingBrackets(*b.killing, b.killing->jets(x, 3), 3));
  EXPECT_LE(m.max_abs(), 1e-12);
  EXPECT_LE(m.magnitude.normalized(), 1e-12);
}

// d(pi -| eps) = Pi^{AB} X_A -| L_{X_B} eps - 1/2 Pi^{AB} [X_A, X_B] -| eps holds
// for any vector fields, commuting or not.
TEST(Killing, VolumeFormulaAgreesWithDirectDifferential) {
  std::mt19937_64 rng(63);
  for (int n = 2; n <= 4; ++n) {
    const auto x = random_point(rng, n);
    KillingSystem ks;
    const int r = 3;
    for (int a = 0; a < r; ++a) {
      std::vector<ScalarExpr> c;
      for (int i = 0; i < n; ++i) c.push_back(random_expr(rng, n, 2));
      ks.vectors.push_back(vector_field(c));
    }
    ks.Pi = {0.0, 1.0, -0.5, -1.0, 0.0, 2.0, 0.5, -2.0, 0.0};
    const auto xj = ks.jets(x, 2);
    FormJet eps(n, n);
    eps[0] = eval_jet(exp(ScalarExpr(0.2) * random_expr(rng, n, 2)), x, 2);
    FormJet rhs(n, n - 1);
    for (int a = 0; a < r; ++a)
      for (int b = 0; b < r; ++b) {
        const double c = ks.pi(a, b);
        if (c == 0.0) continue;
        rhs += Jet(c) * contract(xj[static_cast<std::size_t>(a)], lie_derivative(xj[static_cast<std::size_t>(b)], eps));
        rhs -= Jet(0.5 * c) * contract(lie_bracket(xj[static_cast<std::size_t>(a)], xj[static_cast<std::size_t>(b)]), eps);
      }
    const auto lhs = values(exterior_d(contract(to_multivector(reconstruct_pi(ks, xj, n)), eps)));
    const auto rv = values(rhs);
    for (std::size_t k = 0; k < lhs.size(); ++k) EXPECT_NEAR(lhs[k], rv[k], 1e-10 * std::max(1.0, std::abs(rv[k])));
    // and the library residual is exactly |rhs|
    double mx = 0.0;
    for (std::size_t k = 0; k < rv.size(); ++k) mx = std::max(mx, std::abs(rv[k]));
    EXPECT_NEAR(killing_volume_residual(ks, xj, eps).raw, mx, 1e-12 * std::max(1.0, mx));
  }
}
