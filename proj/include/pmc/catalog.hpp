#pragma once

#include <array>
#include <cmath>
#include <string>
#include <string_view>
#include <vector>

#include "pmc/bundle.hpp"
#include "pmc/error.hpp"

namespace pmc {

struct ExpectedVerdicts {
  Verdict jacobi = Verdict::Pass;
  Verdict torsion = Verdict::Pass;
  Verdict flatness = Verdict::Pass;
  Verdict metacurvature = Verdict::Pass;
  Verdict divergence = Verdict::Pass;
  bool compatible = true;
};

struct CatalogEntry {
  std::string name;
  std::string description;
  Bundle bundle;
  ExpectedVerdicts expected;
};

namespace catalog_detail {

inline ScalarExpr coord(int i) { return ScalarExpr::coordinate(i); }

inline Chart chart(std::vector<std::string> names, std::vector<Point> points,
                   std::vector<std::array<double, 2>> box) {
  Chart c;
  c.dim = static_cast<int>(names.size());
  c.coord_names = std::move(names);
  c.sample_points = std::move(points);
  c.sample_box = std::move(box);
  return c;
}

inline MultivectorField vector_field(std::vector<ScalarExpr> comps) {
  MultivectorField v(static_cast<int>(comps.size()), 1);
  for (std::size_t k = 0; k < comps.size(); ++k) v[k] = comps[k];
  return v;
}

/// Coordinate frame d_1..d_n with constant Pi equal to a constant pi.
inline KillingSystem coordinate_frame(int n, const std::vector<double>& pi) {
  KillingSystem ks;
  for (int a = 0; a < n; ++a) {
    std::vector<ScalarExpr> comps(static_cast<std::size_t>(n), ScalarExpr(0.0));
    comps[static_cast<std::size_t>(a)] = ScalarExpr(1.0);
    ks.vectors.push_back(vector_field(comps));
  }
  ks.Pi = pi;
  return ks;
}

/// g = h^-2 delta, pi = h d_x ^ d_y in the plane.
inline Bundle conformal_plane(std::string name, const ScalarExpr& h, std::vector<Point> points,
                              std::vector<std::array<double, 2>> box) {
  Bundle b;
  b.name = std::move(name);
  b.chart = chart({"x", "y"}, std::move(points), std::move(box));
  b.metric = MetricField(2);
  b.metric.set(0, 0, pow(h, -2));
  b.metric.set(1, 1, pow(h, -2));
  b.poisson = PoissonField(2);
  b.poisson.set(0, 1, h);
  b.volume = VolumeField::from_metric(b.metric);
  b.flat_frame = true;
  return b;
}

}  // namespace catalog_detail

inline const std::vector<std::string>& catalog_names() {
  static const std::vector<std::string> names = {"flat-torus-2d",       "flat-torus-n", "podles-sphere",
                                                 "conformal-cubic",     "heisenberg-nil3", "r3-su2",
                                                 "four-torus-z4-cover", "broken-jacobi"};
  return names;
}

/// Podles sphere chart: h = a + b(x^2 + y^2), curvature 4ab.
inline CatalogEntry podles_sphere(double a, double b) {
  using namespace catalog_detail;
  const auto x = coord(0), y = coord(1);
  const ScalarExpr h = ScalarExpr(a) + ScalarExpr(b) * (pow(x, 2) + pow(y, 2));
  CatalogEntry e;
  e.name = "podles-sphere";
  e.description = "Podles standard sphere: g = h^-2 (dx^2 + dy^2), pi = h d_x^d_y, h = a + b(x^2+y^2)";
  e.bundle = conformal_plane(e.name, h, {{1.0, 0.0}, {0.0, 0.0}, {0.5, -0.3}}, {{{-2.0, 2.0}}, {{-2.0, 2.0}}});
  e.expected.divergence = Verdict::Fail;
  e.expected.compatible = false;
  return e;
}

/// Conformal chart with h = 1 + c3 x^3.
inline CatalogEntry conformal_cubic(double c3 = 1.0) {
  using namespace catalog_detail;
  const auto x = coord(0);
  const ScalarExpr h = c3 == 1.0 ? ScalarExpr(1.0) + pow(x, 3) : ScalarExpr(1.0) + ScalarExpr(c3) * pow(x, 3);
  CatalogEntry e;
  e.name = "conformal-cubic";
  e.description = "conformal chart g = h^-2 (dx^2 + dy^2), pi = h d_x^d_y with h = 1 + x^3";
  e.bundle = conformal_plane(e.name, h, {{1.0, 1.0}, {0.0, 0.5}}, {{{-0.5, 1.5}}, {{-1.0, 1.0}}});
  if (c3 != 0.0) {
    e.expected.metacurvature = Verdict::Fail;
    e.expected.divergence = Verdict::Fail;
    e.expected.compatible = false;
  }
  return e;
}

inline CatalogEntry get_entry(std::string_view name) {
  using namespace catalog_detail;
  const double sqrt2 = std::sqrt(2.0);
  const auto x = coord(0), y = coord(1);
  CatalogEntry e;
  e.name = std::string(name);
  Bundle& b = e.bundle;
  b.name = e.name;

  if (name == "flat-torus-2d") {
    e.description = "flat 2-torus with constant metric and constant Poisson bivector";
    b.chart = chart({"x", "y"}, {{0.0, 0.0}, {0.25, 0.75}}, {{{0.0, 1.0}}, {{0.0, 1.0}}});
    b.metric = MetricField::identity(2);
    b.poisson = PoissonField(2);
    b.poisson.set(0, 1, ScalarExpr(sqrt2));
    b.volume = VolumeField::from_metric(b.metric);
    b.killing = coordinate_frame(2, {0.0, sqrt2, -sqrt2, 0.0});
    b.flat_frame = true;
    return e;
  }
  if (name == "flat-torus-n") {
    e.description = "flat 3-torus with pi = d_x ^ (d_y + sqrt(2) d_z)";
    b.chart = chart({"x", "y", "z"}, {{0.0, 0.0, 0.0}, {0.5, 0.25, 0.75}}, {{{0.0, 1.0}}, {{0.0, 1.0}}, {{0.0, 1.0}}});
    b.metric = MetricField::identity(3);
    b.poisson = PoissonField(3);
    b.poisson.set(0, 1, ScalarExpr(1.0));
    b.poisson.set(0, 2, ScalarExpr(sqrt2));
    b.volume = VolumeField::from_metric(b.metric);
    KillingSystem ks;
    ks.vectors.push_back(vector_field({1.0, 0.0, 0.0}));
    ks.vectors.push_back(vector_field({0.0, 1.0, sqrt2}));
    ks.Pi = {0.0, 1.0, -1.0, 0.0};
    b.killing = ks;
    return e;
  }
  if (name == "podles-sphere") return podles_sphere(1.0, 1.0);
  if (name == "conformal-cubic") return conformal_cubic(1.0);
  if (name == "heisenberg-nil3") {
    // right-invariant metric dx^2 + dy^2 + (dz - y dx)^2
    e.description = "Heisenberg nilmanifold with right-invariant metric and pi = (d_x + sqrt(2) d_y) ^ d_z";
    b.chart = chart({"x", "y", "z"}, {{0.0, 0.0, 0.0}, {1.0, 2.0, 3.0}},
                    {{{-1.0, 1.0}}, {{-1.0, 1.0}}, {{-1.0, 1.0}}});
    b.metric = MetricField(3);
    b.metric.set(0, 0, ScalarExpr(1.0) + pow(y, 2));
    b.metric.set(0, 2, -y);
    b.metric.set(1, 1, ScalarExpr(1.0));
    b.metric.set(2, 2, ScalarExpr(1.0));
    b.poisson = PoissonField(3);
    b.poisson.set(0, 2, ScalarExpr(1.0));
    b.poisson.set(1, 2, ScalarExpr(sqrt2));
    b.volume = VolumeField::from_metric(b.metric);
    KillingSystem ks;
    ks.vectors.push_back(vector_field({1.0, sqrt2, ScalarExpr(sqrt2) * x}));
    ks.vectors.push_back(vector_field({0.0, 0.0, 1.0}));
    ks.Pi = {0.0, 1.0, -1.0, 0.0};
    b.killing = ks;
    return e;
  }
  if (name == "r3-su2") {
    e.description = "R^3 with Euclidean metric and {x,y} = 1, {x,z} = y, {y,z} = -x";
    b.chart = chart({"x", "y", "z"}, {{1.0, 2.0, 3.0}, {1.0, 1.0, 1.0}},
                    {{{-2.0, 2.0}}, {{-2.0, 2.0}}, {{-2.0, 2.0}}});
    b.metric = MetricField::identity(3);
    b.poisson = PoissonField(3);
    b.poisson.set(0, 1, ScalarExpr(1.0));
    b.poisson.set(0, 2, y);
    b.poisson.set(1, 2, -x);
    b.volume = VolumeField::from_metric(b.metric);
    return e;
  }
  if (name == "four-torus-z4-cover") {
    e.description = "flat 4-torus with pi inverse to omega = dx1^dy1 + dx2^dy2";
    b.chart = chart({"x1", "x2", "y1", "y2"}, {{0.0, 0.0, 0.0, 0.0}, {0.5, 0.25, 0.75, 0.125}},
                    {{{0.0, 1.0}}, {{0.0, 1.0}}, {{0.0, 1.0}}, {{0.0, 1.0}}});
    b.metric = MetricField::identity(4);
    std::vector<double> omega(16, 0.0);
    omega[0 * 4 + 2] = 1.0;
    omega[2 * 4 + 0] = -1.0;
    omega[1 * 4 + 3] = 1.0;
    omega[3 * 4 + 1] = -1.0;
    const auto pi = inverse(omega, 4);
    b.poisson = PoissonField(4);
    for (int i = 0; i < 4; ++i)
      for (int j = i + 1; j < 4; ++j)
        if (pi[static_cast<std::size_t>(i * 4 + j)] != 0.0)
          b.poisson.set(i, j, ScalarExpr(pi[static_cast<std::size_t>(i * 4 + j)]));
    b.volume = VolumeField::from_metric(b.metric);
    b.killing = coordinate_frame(4, pi);
    b.flat_frame = true;
    return e;
  }
  if (name == "broken-jacobi") {
    e.description = "R^3 with pi = d_x^d_y + x d_x^d_z, which violates the Jacobi identity";
    b.chart = chart({"x", "y", "z"}, {{1.0, 1.0, 1.0}}, {{{-1.0, 1.0}}, {{-1.0, 1.0}}, {{-1.0, 1.0}}});
    b.metric = MetricField::identity(3);
    b.poisson = PoissonField(3);
    b.poisson.set(0, 1, ScalarExpr(1.0));
    b.poisson.set(0, 2, x);
    b.volume = VolumeField::from_metric(b.metric);
    e.expected = {Verdict::Fail, Verdict::Undefined, Verdict::Undefined, Verdict::Undefined, Verdict::Undefined, false};
    return e;
  }
  throw Error(ErrorCode::UnknownEntry, "no catalog entry named '" + std::string(name) + "'");
}

}  // namespace pmc
