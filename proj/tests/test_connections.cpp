#include <gtest/gtest.h>

#include "support.hpp"

using namespace pmc;
using namespace testing_support;

namespace {

const ScalarExpr X = ScalarExpr::coordinate(0), Y = ScalarExpr::coordinate(1);

// g = diag(1 + x^2, 1), pi = d_x ^ d_y: a connection with curvature
Bundle curved_plane() {
  Bundle b;
  b.name = "curved-plane";
  b.chart.dim = 2;
  b.chart.coord_names = {"x", "y"};
  b.chart.sample_points = {{0.3, 0.2}};
  b.metric = MetricField(2);
  b.metric.set(0, 0, ScalarExpr(1.0) + pow(X, 2));
  b.metric.set(1, 1, ScalarExpr(1.0));
  b.poisson = PoissonField(2);
  b.poisson.set(0, 1, ScalarExpr(1.0));
  b.volume = VolumeField::from_metric(b.metric);
  return b;
}

FormJet random_one_form(std::mt19937_64& rng, int n, std::span<const double> p, int order) {
  FormField f(n, 1);
  for (std::size_t k = 0; k < f.size(); ++k) f[k] = random_expr(rng, n, 2);
  return jets(f, p, order);
}

double pairing(const JetMatrix& ginv, const FormJet& a, const FormJet& b) {
  double acc = 0.0;
  for (int i = 0; i < ginv.n; ++i)
    for (int j = 0; j < ginv.n; ++j)
      acc += ginv(i, j).value() * a[static_cast<std::size_t>(i)].value() * b[static_cast<std::size_t>(j)].value();
  return acc;
}

}  // namespace

TEST(LeviCivita, PolarCoordinates) {
  MetricField g(2);
  g.set(0, 0, ScalarExpr(1.0));
  g.set(1, 1, pow(X, 2));
  const std::vector<double> p{2.0, 0.5};
  const auto c = levi_civita(g, p);
  EXPECT_DOUBLE_EQ(c(0, 1, 1), -2.0);   // Gamma^r_{theta theta} = -r
  EXPECT_DOUBLE_EQ(c(1, 0, 1), 0.5);    // Gamma^theta_{r theta} = 1/r
  EXPECT_DOUBLE_EQ(c(1, 1, 0), 0.5);
  EXPECT_DOUBLE_EQ(c(0, 0, 0), 0.0);
  EXPECT_NEAR(scalar_curvature(g, p), 0.0, 1e-14);
}

TEST(LeviCivita, PodlesGaussianCurvatureIsFourAB) {
  std::mt19937_64 rng(31);
  std::uniform_real_distribution<double> ab(0.2, 3.0);
  for (int trial = 0; trial < 5; ++trial) {
    const double a = ab(rng), b = ab(rng);
    const auto e = podles_sphere(a, b);
    for (const auto& p : e.bundle.chart.points(10, rng())) {
      const double k = scalar_curvature(e.bundle.metric, p) / 2.0;
      EXPECT_LE(rel_err(k, 4 * a * b), 1e-8);
    }
  }
}

TEST(ContraConnection, ConstantDataGiveZeroSymbols) {
  const auto b = get_entry("flat-torus-2d").bundle;
  const std::vector<double> p{0.1, 0.2};
  const auto conn = metric_contra_connection(b.metric, b.poisson, p);
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j)
      for (int k = 0; k < 2; ++k) EXPECT_EQ(conn(i, j, k), 0.0);
}

// The metric contravariant connection is characterised by D_a b - D_b a = [a,b]
// and #a <b,c> = <D_a b, c> + <b, D_a c>; both are checked against the
// separately tested Koszul bracket.
TEST(ContraConnection, TorsionFreeAndMetricOnRandomForms) {
  std::mt19937_64 rng(32);
  for (const char* name : {"podles-sphere", "conformal-cubic", "heisenberg-nil3", "r3-su2"}) {
    const auto b = get_entry(name).bundle;
    const int n = b.chart.dim;
    for (int trial = 0; trial < 3; ++trial) {
      const auto p = random_point(rng, n, -0.4, 0.4);
      const auto conn = metric_contra_connection(b.metric, b.poisson, p, 2);
      const auto a = random_one_form(rng, n, p, 2), c = random_one_form(rng, n, p, 2), e = random_one_form(rng, n, p, 2);
      const auto lhs = values(conn.derivative(a, c) - conn.derivative(c, a));
      const auto rhs = values(koszul_bracket(conn.pi(), a, c));
      for (std::size_t k = 0; k < lhs.size(); ++k) EXPECT_NEAR(lhs[k], rhs[k], 1e-11 * std::max(1.0, std::abs(rhs[k])));

      const JetMatrix ginv = inverse(b.metric.jets(p, 2));
      // #a <c,e> as the anchor of the pairing jet
      Jet pair;
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) pair += ginv(i, j) * c[static_cast<std::size_t>(i)] * e[static_cast<std::size_t>(j)];
      double anchor = 0.0;
      for (int i = 0; i < n; ++i) anchor += a[static_cast<std::size_t>(i)].value() * conn.anchor(i, pair).value();
      const double rhs2 = pairing(ginv, conn.derivative(a, c), e) + pairing(ginv, c, conn.derivative(a, e));
      EXPECT_NEAR(anchor, rhs2, 1e-11 * std::max(1.0, std::abs(rhs2))) << name;
    }
  }
}

TEST(ContraConnection, LeibnizInTheFormArgument) {
  std::mt19937_64 rng(33);
  const auto b = get_entry("podles-sphere").bundle;
  const std::vector<double> p{0.4, -0.2};
  const auto conn = metric_contra_connection(b.metric, b.poisson, p, 2);
  const Jet f = eval_jet(random_expr(rng, 2, 3), p, 2);
  const auto s = random_one_form(rng, 2, p, 2);
  for (int i = 0; i < 2; ++i) {
    const auto lhs = values(conn.derivative(i, f * s));
    const auto rhs = values(f * conn.derivative(i, s) + conn.anchor(i, f) * s);
    for (std::size_t k = 0; k < lhs.size(); ++k) EXPECT_NEAR(lhs[k], rhs[k], 1e-12);
  }
}

TEST(ContraCurvature, MatchesCommutatorOfCovariantDerivatives) {
  for (const Bundle& b : {curved_plane(), get_entry("podles-sphere").bundle, get_entry("heisenberg-nil3").bundle}) {
    const int n = b.chart.dim;
    const auto p = b.chart.sample_points.front();
    const auto conn = metric_contra_connection(b.metric, b.poisson, p, 3);
    const auto curv = contra_curvature(conn);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        for (int k = 0; k < n; ++k) {
          const auto dk = basis<Jet, Variance::Covariant>(n, k);
          FormJet r = conn.derivative(i, conn.derivative(j, dk)) - conn.derivative(j, conn.derivative(i, dk));
          for (int m = 0; m < n; ++m) r -= conn.pi()(i, j).derivative(m) * conn.derivative(m, dk);
          for (int l = 0; l < n; ++l)
            EXPECT_NEAR(curv(i, j, k, l).value(), r[static_cast<std::size_t>(l)].value(), 1e-11) << b.name;
        }
  }
}

TEST(ContraCurvature, FlatForPodlesButNotForCurvedPlane) {
  const auto pod = get_entry("podles-sphere").bundle;
  for (const auto& p : pod.chart.points(10, 3))
    EXPECT_LE(contra_curvature(pod.metric, pod.poisson, p).residual.normalized(), 1e-12);
  const auto cp = curved_plane();
  EXPECT_GT(contra_curvature(cp.metric, cp.poisson, cp.chart.sample_points.front()).residual.normalized(), 0.1);
}

TEST(ContraTorsion, PerturbedSymbolFailsTorsion) {
  const auto b = get_entry("podles-sphere").bundle;
  const std::vector<double> p{1.0, 0.0};
  const auto conn = metric_contra_connection(b.metric, b.poisson, p, 2);
  EXPECT_LE(contra_torsion(conn).residual.normalized(), 1e-12);
  JetTensor3 g = conn.symbols();
  g(0, 1, 0) += Jet(0.5);
  const ContraChristoffel bad(conn.pi(), g);
  EXPECT_GT(contra_torsion(bad).residual.normalized(), 0.1);
}

TEST(Geodesic, ZeroBivectorIsStationary) {
  const auto g = MetricField::identity(2);
  const PoissonField pi(2);
  CotangentState s{{0.3, 0.4}, {1.0, -2.0}};
  for (int k = 0; k < 10; ++k) s = geodesic_step(g, pi, s, 0.1);
  EXPECT_EQ(s.u, (Point{0.3, 0.4}));
  EXPECT_EQ(s.xi, (std::vector<double>{1.0, -2.0}));
}

TEST(Geodesic, FlatTorusMovesOnAStraightLine) {
  const auto b = get_entry("flat-torus-2d").bundle;
  const double r2 = std::sqrt(2.0);
  const auto run = run_geodesic(b, {{0.0, 0.0}, {1.0, 2.0}}, 100, 0.01);
  // u' = #xi, (#xi)^i = pi^{ji} xi_j, so u' = (-sqrt2 xi_2, sqrt2 xi_1)
  const auto& end = run.states.back();
  EXPECT_NEAR(end.u[0], -2.0 * r2, 1e-12);
  EXPECT_NEAR(end.u[1], r2, 1e-12);
  EXPECT_EQ(end.xi, (std::vector<double>{1.0, 2.0}));
  EXPECT_EQ(run.max_drift, 0.0);
}

TEST(Geodesic, PodlesConservesNorm) {
  const auto b = get_entry("podles-sphere").bundle;
  const auto run = run_geodesic(b, {{0.5, -0.3}, {0.7, 1.1}}, 1000, 1e-3);
  EXPECT_LE(run.max_drift, 1e-6);
}

TEST(Geodesic, Errors) {
  const auto b = get_entry("podles-sphere").bundle;
  EXPECT_THROW(geodesic_step(b.metric, b.poisson, {{0.0, 0.0}, {1.0, 0.0}}, 0.0), Error);
  // h = 1 - x^2 - y^2 vanishes on the unit circle; a long step leaves the domain
  auto e = podles_sphere(1.0, -1.0);
  try {
    CotangentState s{{0.0, 0.0}, {50.0, 0.0}};
    for (int k = 0; k < 2000; ++k) s = geodesic_step(e.bundle.metric, e.bundle.poisson, s, 0.05);
    FAIL() << "expected the trajectory to leave the chart";
  } catch (const Error& err) {
    EXPECT_EQ(err.code(), ErrorCode::LeftChartDomain);
  }
}
