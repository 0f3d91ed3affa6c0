// Acceptance run: one PASS/FAIL line per criterion, nonzero exit if any fail.

#include <chrono>
#include <cstdio>
#include <functional>
#include <sstream>
#include <string>

#include "support.hpp"

using namespace pmc;
using namespace testing_support;

namespace {

struct Outcome {
  bool ok = true;
  std::ostringstream detail;
  void require(bool cond, const std::string& what) {
    if (!cond && ok) detail << "first failure: " << what << "; ";
    ok = ok && cond;
  }
};

int failures = 0;

void criterion(int id, const char* title, const std::function<void(Outcome&)>& body) {
  Outcome o;
  try {
    body(o);
  } catch (const std::exception& e) {
    o.ok = false;
    o.detail << "exception: " << e.what();
  }
  if (!o.ok) ++failures;
  std::printf("%s %2d %s%s%s\n", o.ok ? "PASS" : "FAIL", id, title, o.detail.str().empty() ? "" : " | ",
              o.detail.str().c_str());
}

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.3e", v);
  return buf;
}

}  // namespace

int main() {
  criterion(1, "Podles Gaussian curvature is 4ab", [](Outcome& o) {
    const auto t0 = std::chrono::steady_clock::now();
    std::mt19937_64 rng(1);
    std::uniform_real_distribution<double> ab(0.1, 3.0);
    double worst = 0.0;
    for (int trial = 0; trial < 5; ++trial) {
      const double a = ab(rng), b = ab(rng);
      const auto e = podles_sphere(a, b);
      for (const auto& p : e.bundle.chart.points(10, rng())) {
        worst = std::max(worst, std::abs(scalar_curvature(e.bundle.metric, p) / 2.0 - 4 * a * b) / (4 * a * b));
      }
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    o.require(worst <= 1e-8, "relative error " + num(worst));
    o.require(secs < 1.0, "took " + num(secs) + " s");
    o.detail << "worst relative error " << num(worst) << ", " << num(secs) << " s";
  });

  criterion(2, "Podles verdicts and divergence residual at (1,0)", [](Outcome& o) {
    const auto b = get_entry("podles-sphere").bundle;
    const auto r = run_check(b);
    for (const char* name : {"jacobi", "torsion", "flatness", "metacurvature"})
      o.require(r.condition(name).verdict == Verdict::Pass, std::string(name) + " not pass");
    o.require(r.condition("divergence").verdict == Verdict::Fail, "divergence not fail");
    const std::vector<double> x{1.0, 0.0};
    const double res = volume_compat(b.poisson, b.volume, x).normalized();
    o.require(std::abs(res - 0.5) <= 1e-12, "residual " + num(res));
    o.require(r.exit_code == 1, "exit code " + std::to_string(r.exit_code));
    o.detail << "residual at (1,0) " << num(res);
  });

  criterion(3, "r3-su2 compatible at 10 seeded points", [](Outcome& o) {
    CheckOptions opt;
    opt.seed = 3;
    const auto r = run_check(get_entry("r3-su2").bundle, opt);
    o.require(r.random_points == 10, "random points " + std::to_string(r.random_points));
    o.require(r.compatible && r.summary == "compatible", r.summary);
  });

  criterion(4, "conformal-cubic metacurvature matches oracle, M^{222}_{12} = +6h", [](Outcome& o) {
    const auto b = conformal_cubic().bundle;
    double disagree = 0.0, hand = 0.0;
    for (const auto& p : b.chart.points(10, 4)) {
      const auto conn = metric_contra_connection(b.metric, b.poisson, p, 3);
      const auto m = metacurvature_def(conn);
      disagree = std::max(disagree, relative_disagreement(values(m), metacurvature_symplectic_oracle(conn)));
      const double h = 1.0 + p[0] * p[0] * p[0];
      hand = std::max(hand, rel_err(m(1, 1, 1, 0, 1), 6.0 * h));
    }
    o.require(disagree <= 1e-7, "oracle disagreement " + num(disagree));
    o.require(hand <= 1e-9, "hand value error " + num(hand));
    o.detail << "oracle disagreement " << num(disagree) << ", hand value error " << num(hand);
  });

  criterion(5, "metacurvature vanishes iff c3 = 0", [](Outcome& o) {
    for (double c3 : {0.0, 0.1, 1.0}) {
      const auto b = conformal_cubic(c3).bundle;
      double worst = 0.0;
      for (const auto& p : b.chart.points(10, 5))
        worst = std::max(worst, metacurvature_def(b.metric, b.poisson, p).max_abs());
      const bool zero = worst <= 1e-9;
      o.require(zero == (c3 == 0.0), "c3 = " + num(c3) + " max |M| " + num(worst));
      o.detail << "c3=" << c3 << ": " << num(worst) << " ";
    }
  });

  criterion(6, "divergence identity for 20 random forms on every catalog chart", [](Outcome& o) {
    std::mt19937_64 rng(6);
    double worst = 0.0;
    for (const auto& name : catalog_names()) {
      const auto b = get_entry(name).bundle;
      const int n = b.chart.dim;
      const auto pts = b.chart.points(5, 6);
      for (int k = 0; k < 20; ++k) {
        const auto& x = pts[static_cast<std::size_t>(k) % pts.size()];
        const auto conn = metric_contra_connection(b.metric, b.poisson, x, 2);
        const double r = divergence_identity_residual(conn, random_form_jet(n, 1 + k % n, 1, rng)).normalized();
        o.require(r <= 1e-9, name + " residual " + num(r));
        worst = std::max(worst, r);
      }
    }
    o.detail << "worst residual " << num(worst);
  });

  criterion(7, "Killing route on nil3 and flat-torus-n", [](Outcome& o) {
    for (const char* name : {"heisenberg-nil3", "flat-torus-n"}) {
      const auto b = get_entry(name).bundle;
      double conn = 0.0, rec = 0.0;
      for (const auto& x : b.chart.points(10, 7)) {
        const auto v = verify_compatible_via_killing(b.metric, b.poisson, b.volume, *b.killing, x);
        conn = std::max(conn, v.connection.normalized());
        rec = std::max(rec, reconstruction_residual(*b.killing, b.poisson, x).normalized());
        o.require(v.all_pass(kDefaultTolerance), std::string(name) + " Killing verification");
      }
      o.require(conn <= 1e-9, std::string(name) + " connection " + num(conn));
      o.require(rec <= 1e-12, std::string(name) + " reconstruction " + num(rec));
      const auto r = run_check(b);
      o.require(r.compatible, std::string(name) + " " + r.summary);
      o.require(r.condition("killing").verdict == Verdict::Pass, std::string(name) + " killing cross-check");
      o.detail << name << ": connection " << num(conn) << ", reconstruction " << num(rec) << " ";
    }
  });

  criterion(8, "Bianchi-type symmetry on conformal-cubic", [](Outcome& o) {
    const auto b = conformal_cubic().bundle;
    double worst = 0.0;
    for (const auto& p : b.chart.points(10, 8))
      worst = std::max(worst, meta_bianchi_residual(b.metric, b.poisson, p).normalized());
    o.require(worst <= 1e-7, "residual " + num(worst));
    o.detail << "worst residual " << num(worst);
  });

  criterion(9, "Podles geodesic conserves |xi|", [](Outcome& o) {
    const auto b = get_entry("podles-sphere").bundle;
    const auto run = run_geodesic(b, {{0.4, -0.2}, {0.8, 0.5}}, 1000, 1e-3, 100);
    o.require(run.max_drift <= 1e-6, "drift " + num(run.max_drift));
    o.detail << "max relative drift " << num(run.max_drift);
  });

  criterion(10, "negative controls", [](Outcome& o) {
    const auto broken = run_check(get_entry("broken-jacobi").bundle);
    o.require(broken.exit_code == 2, "broken-jacobi exit " + std::to_string(broken.exit_code));
    o.require(broken.condition("jacobi").worst.normalized() > 0.1, "jacobi residual too small");

    auto torus = get_entry("flat-torus-2d").bundle;
    torus.volume = VolumeField{exp(ScalarExpr::coordinate(0)), false};
    const std::vector<double> x{0.2, 0.4};
    const double de = check_D_epsilon(torus.metric, torus.poisson, torus.volume, x).normalized();
    o.require(de > 0.1, "D eps residual " + num(de));

    const auto pod = get_entry("podles-sphere").bundle;
    const std::vector<double> p{0.3, 0.6};
    const auto conn = metric_contra_connection(pod.metric, pod.poisson, p, 2);
    JetTensor3 g = conn.symbols();
    g(0, 1, 0) += Jet(0.5);
    const double tors = contra_torsion(ContraChristoffel(conn.pi(), g)).residual.normalized();
    o.require(tors > 0.1, "torsion residual " + num(tors));
    o.detail << "jacobi " << num(broken.condition("jacobi").worst.normalized()) << ", D eps " << num(de)
             << ", torsion " << num(tors);
  });

  criterion(11, "jets agree with finite differences and are exact on polynomials", [](Outcome& o) {
    std::mt19937_64 rng(11);
    double worst_fd = 0.0;
    for (int trial = 0; trial < 100; ++trial) {
      const int dim = 1 + trial % 3;
      const auto e = random_expr(rng, dim, 4);
      const auto p = random_point(rng, dim, -0.8, 0.8);
      const Jet j = eval_jet(e, p, 4);
      for (int deg = 1; deg <= 4; ++deg)
        for (const auto& alpha : multi_indices_of_degree(dim, deg))
          worst_fd = std::max(worst_fd, rel_err(j.partial(alpha), finite_difference(e, p, alpha)));
    }
    o.require(worst_fd <= 1e-5, "finite difference error " + num(worst_fd));

    // (1 + 2x - y)^2 (x + 3y)^2, partials by hand
    double worst_poly = 0.0;
    const auto X = ScalarExpr::coordinate(0), Y = ScalarExpr::coordinate(1);
    const auto u = ScalarExpr(1.0) + ScalarExpr(2.0) * X - Y, v = X + ScalarExpr(3.0) * Y;
    const auto e = pow(u, 2) * pow(v, 2);
    for (int trial = 0; trial < 20; ++trial) {
      const auto p = random_point(rng, 2, -2.0, 2.0);
      const double U = 1 + 2 * p[0] - p[1], V = p[0] + 3 * p[1];
      const Jet j = eval_jet(e, p, 4);
      // f = U^2 V^2 with U_x = 2, U_y = -1, V_x = 1, V_y = 3
      const double fx = 2 * U * 2 * V * V + U * U * 2 * V * 1;
      const double fxx = 2 * 4 * V * V + 2 * (2 * U * 2) * (2 * V) + U * U * 2;
      // fourth derivative of a product of two quadratics: C(4,2) * 2a^2 * 2b^2
      const double f4x = 6.0 * (2 * 4) * (2 * 1), f4y = 6.0 * (2 * 1) * (2 * 9);
      for (auto [alpha, want] : std::vector<std::pair<std::vector<int>, double>>{
               {{0, 0}, U * U * V * V}, {{1, 0}, fx}, {{2, 0}, fxx}, {{4, 0}, f4x}, {{0, 4}, f4y}})
        worst_poly = std::max(worst_poly, rel_err(j.partial(alpha), want));
    }
    o.require(worst_poly <= 1e-12, "polynomial error " + num(worst_poly));
    o.detail << "finite difference " << num(worst_fd) << ", polynomial " << num(worst_poly);
  });

  std::printf("%s\n", failures ? "acceptance: FAILED" : "acceptance: all criteria pass");
  return failures ? 1 : 0;
}
