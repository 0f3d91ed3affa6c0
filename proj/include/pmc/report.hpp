#pragma once

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <future>
#include <optional>
#include <random>
#include <string>
#include <string_view>
#include <vector>

#include "pmc/bundle.hpp"
#include "pmc/connections.hpp"
#include "pmc/conventions.hpp"
#include "pmc/divergence.hpp"
#include "pmc/error.hpp"
#include "pmc/killing.hpp"
#include "pmc/metacurvature.hpp"

namespace pmc {

struct CheckOptions {
  double tol = kDefaultTolerance;
  int points = 10;                     // random points drawn from the sample box
  std::optional<std::uint64_t> seed;   // falls back to the chart's seed, then 42
  int order = kMaxOrder;
  bool parallel = true;
};

/// Agreement threshold for the dual-pipeline and Bianchi cross-checks.
inline constexpr double kCrossCheckTolerance = 1e-7;

struct ConditionRecord {
  std::string name;
  Verdict verdict = Verdict::Undefined;
  Residual worst;
  int worst_point = -1;
  std::string note;
  std::vector<std::optional<Residual>> per_point;  // indexed like CompatReport::points

  double residual() const { return worst.normalized(); }
};

struct CompatReport {
  std::string chart;
  int dim = 0;
  double tol = 0.0;
  std::uint64_t seed = 0;
  int order = 0;
  int random_points = 0;
  std::vector<Point> points;
  std::vector<ConditionRecord> conditions;    // jacobi, torsion, flatness, metacurvature, divergence, volume_parallel
  std::vector<ConditionRecord> cross_checks;
  bool poisson = false;
  bool compatible = false;
  std::string summary;
  int exit_code = 1;

  const ConditionRecord& condition(std::string_view name) const {
    for (const auto& c : conditions)
      if (c.name == name) return c;
    for (const auto& c : cross_checks)
      if (c.name == name) return c;
    throw Error(ErrorCode::InvalidInput, "no report record named '" + std::string(name) + "'");
  }
};

namespace report_detail {

inline ConditionRecord named_record(std::string name) {
  ConditionRecord r;
  r.name = std::move(name);
  return r;
}

inline std::string point_label(std::size_t index, const Point& p) {
  std::string s = "point " + std::to_string(index) + " (";
  for (std::size_t k = 0; k < p.size(); ++k) {
    if (k) s += ", ";
    char buf[32];
    const auto res = std::to_chars(buf, buf + sizeof(buf), p[k]);
    s.append(buf, res.ptr);
  }
  return s + ")";
}

/// Evaluates f(index, point) for every point, in parallel when asked; results
/// keep the point order. Errors are re-raised with the failing point attached.
template <class F>
auto map_points(const std::vector<Point>& pts, bool parallel, F f) {
  using R = decltype(f(std::size_t{0}, pts[0]));
  auto guarded = [&](std::size_t k) -> R {
    try {
      return f(k, pts[k]);
    } catch (const Error& e) {
      std::string what = e.what();
      const auto prefix = std::string(to_string(e.code())) + ": ";
      if (what.rfind(prefix, 0) == 0) what = what.substr(prefix.size());
      throw Error(e.code(), point_label(k, pts[k]) + ": " + what);
    }
  };
  std::vector<R> out;
  out.reserve(pts.size());
  if (!parallel) {
    for (std::size_t k = 0; k < pts.size(); ++k) out.push_back(guarded(k));
    return out;
  }
  std::vector<std::future<R>> futures;
  futures.reserve(pts.size());
  for (std::size_t k = 0; k < pts.size(); ++k) futures.push_back(std::async(std::launch::async, guarded, k));
  for (auto& fu : futures) out.push_back(fu.get());
  return out;
}

/// Folds per-point residuals into a record; the first worst point wins ties.
inline void fold(ConditionRecord& rec, const Residual& r, std::size_t point) {
  if (rec.per_point.size() <= point) rec.per_point.resize(point + 1);
  rec.per_point[point] = r;
  if (rec.worst_point < 0 || r.normalized() > rec.worst.normalized()) {
    rec.worst = r;
    rec.worst_point = static_cast<int>(point);
  }
}

inline void decide(ConditionRecord& rec, double tol) {
  rec.verdict = rec.worst_point < 0 ? Verdict::Undefined : (rec.worst.normalized() <= tol ? Verdict::Pass : Verdict::Fail);
}

struct StageTwo {
  Residual torsion, curvature, divergence, volume_parallel, divergence_identity;
  std::optional<Residual> modular_volume;
  std::optional<Residual> killing;
  std::string killing_note;
};

struct StageThree {
  Residual metacurvature;
  std::optional<Residual> oracle;
  std::string oracle_note;
  std::optional<Residual> bianchi;
};

}  // namespace report_detail

/// Runs every check of the compatibility definition on a bundle, in the
/// order Jacobi, torsion, flatness, metacurvature, divergence. Conditions
/// whose prerequisites failed are reported as undefined.
inline CompatReport run_check(const Bundle& bundle, const CheckOptions& opt = {}) {
  using namespace report_detail;
  bundle.validate();
  if (opt.order < 2 || opt.order > kMaxOrder)
    throw Error(ErrorCode::OrderTooHigh, "jet order must be in [2, 4] for a check run");
  if (!(opt.tol > 0.0)) throw Error(ErrorCode::InvalidInput, "tolerance must be positive");
  if (opt.points < 0) throw Error(ErrorCode::InvalidInput, "random point count must be non-negative");

  CompatReport rep;
  rep.chart = bundle.name;
  rep.dim = bundle.chart.dim;
  rep.tol = opt.tol;
  rep.seed = opt.seed.value_or(bundle.chart.seed.value_or(42));
  rep.order = opt.order;
  rep.random_points = bundle.chart.sample_box.empty() ? 0 : opt.points;
  rep.points = bundle.chart.points(opt.points, rep.seed);
  const int n = rep.dim, order = opt.order;

  for (const char* name : {"jacobi", "torsion", "flatness", "metacurvature", "divergence", "volume_parallel"})
    rep.conditions.push_back(named_record(name));
  auto cond = [&](std::string_view name) -> ConditionRecord& {
    for (auto& c : rep.conditions)
      if (c.name == name) return c;
    throw Error(ErrorCode::InvalidInput, "unknown condition");
  };

  // Jacobi
  const auto jac = map_points(rep.points, opt.parallel,
                              [&](std::size_t, const Point& p) { return jacobi_residual(bundle.poisson, p); });
  for (std::size_t k = 0; k < jac.size(); ++k) fold(cond("jacobi"), jac[k], k);
  decide(cond("jacobi"), opt.tol);
  rep.poisson = cond("jacobi").verdict == Verdict::Pass;
  if (!rep.poisson) {
    for (auto& c : rep.conditions)
      if (c.name != "jacobi") c.note = "requires a Poisson bivector";
    rep.summary = "not a Poisson structure";
    rep.exit_code = 2;
    return rep;
  }

  // torsion, flatness, divergence and the cross-checks that need only D
  const auto two = map_points(rep.points, opt.parallel, [&](std::size_t k, const Point& p) {
    StageTwo s;
    bundle.metric.check_positive_definite(p);
    const auto conn = metric_contra_connection(bundle.metric.jets(p, order), bundle.poisson.jet_matrix(p, order));
    const FormJet eps = bundle.volume.jets(p, order);
    s.torsion = contra_torsion(conn).residual;
    s.curvature = contra_curvature(conn).residual;
    s.divergence = volume_compat(conn.pi(), eps);
    s.volume_parallel = check_D_epsilon(conn, eps);
    std::mt19937_64 rng(rep.seed + 7919 * (k + 1));
    for (int deg = 1; deg <= n; ++deg)
      s.divergence_identity.merge(divergence_identity_residual(conn, random_form_jet(n, deg, 1, rng)));
    if (s.volume_parallel.normalized() <= opt.tol) s.modular_volume = modular_volume_residual(conn, eps);
    if (bundle.killing) {
      try {
        const auto v = verify_compatible_via_killing(bundle.metric, bundle.poisson, bundle.volume, *bundle.killing, p,
                                                     opt.tol, std::min(order, 3));
        Residual worst;
        for (const auto* r : {&v.killing, &v.commutators, &v.reconstruction, &v.torsion, &v.curvature,
                              &v.metacurvature, &v.volume, &v.connection})
          worst.merge(*r);
        s.killing = worst;
      } catch (const Error& e) {
        if (e.code() != ErrorCode::ReconstructionMismatch) throw;
        s.killing = Residual{1.0, 0.0};
        s.killing_note = e.what();
      }
    }
    return s;
  });

  ConditionRecord identity = named_record("divergence_identity");
  ConditionRecord modular = named_record("modular_volume");
  ConditionRecord killing = named_record("killing");
  for (std::size_t k = 0; k < two.size(); ++k) {
    fold(cond("torsion"), two[k].torsion, k);
    fold(cond("flatness"), two[k].curvature, k);
    fold(cond("divergence"), two[k].divergence, k);
    fold(cond("volume_parallel"), two[k].volume_parallel, k);
    fold(identity, two[k].divergence_identity, k);
    if (two[k].modular_volume) fold(modular, *two[k].modular_volume, k);
    if (two[k].killing) {
      fold(killing, *two[k].killing, k);
      if (!two[k].killing_note.empty() && killing.note.empty()) killing.note = two[k].killing_note;
    }
  }
  for (const char* name : {"torsion", "flatness", "divergence", "volume_parallel"}) decide(cond(name), opt.tol);
  if (cond("torsion").verdict != Verdict::Pass) {
    cond("flatness").verdict = Verdict::Undefined;
    cond("flatness").note = "requires a torsion-free connection";
  }
  decide(identity, opt.tol);
  decide(modular, opt.tol);
  if (modular.worst_point < 0) modular.note = "volume form is not parallel at any point";
  decide(killing, opt.tol);
  if (!bundle.killing) killing.note = "no Killing system declared";

  // metacurvature and its cross-checks
  ConditionRecord oracle = named_record("symplectic_oracle");
  ConditionRecord bianchi = named_record("meta_bianchi");
  auto& meta = cond("metacurvature");
  if (cond("torsion").verdict != Verdict::Pass || cond("flatness").verdict != Verdict::Pass) {
    meta.note = "requires a flat torsion-free connection";
    oracle.note = bianchi.note = meta.note;
  } else if (order < 3) {
    meta.note = "requires jet order >= 3";
    oracle.note = bianchi.note = meta.note;
  } else if (rep.dim < 2) {
    // no nonzero 2-forms, so M vanishes identically
    for (std::size_t k = 0; k < rep.points.size(); ++k) fold(meta, Residual{}, k);
    decide(meta, opt.tol);
    meta.note = oracle.note = bianchi.note = "vanishes identically in dimension 1";
  } else {
    const auto three = map_points(rep.points, opt.parallel, [&](std::size_t, const Point& p) {
      StageThree s;
      const auto conn = metric_contra_connection(bundle.metric.jets(p, order), bundle.poisson.jet_matrix(p, order));
      const MetaTensor m = metacurvature_def(conn, opt.tol);
      s.metacurvature = m.magnitude;
      if (bundle.flat_frame) {
        try {
          const double d = relative_disagreement(values(m), metacurvature_symplectic_oracle(conn, opt.tol));
          s.oracle = Residual{d, 0.0};
        } catch (const Error& e) {
          if (e.code() != ErrorCode::NoFlatFrame && e.code() != ErrorCode::DegeneratePoisson) throw;
          s.oracle = Residual{1.0, 0.0};
          s.oracle_note = e.what();
        }
      }
      if (order >= 4) s.bianchi = meta_bianchi_residual(conn, m);
      return s;
    });
    for (std::size_t k = 0; k < three.size(); ++k) {
      fold(meta, three[k].metacurvature, k);
      if (three[k].oracle) fold(oracle, *three[k].oracle, k);
      if (!three[k].oracle_note.empty() && oracle.note.empty()) oracle.note = three[k].oracle_note;
      if (three[k].bianchi) fold(bianchi, *three[k].bianchi, k);
    }
    decide(meta, opt.tol);
    decide(oracle, kCrossCheckTolerance);
    decide(bianchi, kCrossCheckTolerance);
    if (!bundle.flat_frame) oracle.note = "no flat frame declared";
    if (order < 4) bianchi.note = "requires jet order 4";
  }
  rep.cross_checks = {oracle, bianchi, identity, modular, killing};

  std::vector<std::string> failed, undefined;
  for (const char* name : {"torsion", "flatness", "metacurvature", "divergence"}) {
    const Verdict v = cond(name).verdict;
    if (v == Verdict::Fail) failed.emplace_back(name);
    if (v == Verdict::Undefined) undefined.emplace_back(name);
  }
  auto join = [](const std::vector<std::string>& v) {
    std::string s;
    for (std::size_t k = 0; k < v.size(); ++k) s += (k ? ", " : "") + v[k];
    return s;
  };
  rep.compatible = failed.empty() && undefined.empty();
  if (rep.compatible) {
    rep.summary = "compatible";
    rep.exit_code = 0;
  } else {
    rep.summary = "not compatible: ";
    if (!failed.empty()) rep.summary += join(failed) + (failed.size() == 1 ? " condition fails" : " conditions fail");
    if (!undefined.empty()) rep.summary += (failed.empty() ? "" : "; ") + join(undefined) + " undefined";
    rep.exit_code = 1;
  }
  return rep;
}

struct GeodesicRun {
  std::vector<double> times;
  std::vector<CotangentState> states;
  std::vector<double> norms;
  double max_drift = 0.0;  // max relative change of |xi|
};

/// Integrates a cotangent geodesic; every `record_every`-th state is kept.
inline GeodesicRun run_geodesic(const Bundle& bundle, const CotangentState& start, int steps, double dt,
                                int record_every = 1) {
  bundle.validate();
  if (steps < 0) throw Error(ErrorCode::InvalidInput, "step count must be non-negative");
  if (record_every < 1) record_every = 1;
  GeodesicRun run;
  CotangentState s = start;
  const double n0 = cotangent_norm(bundle.metric, s);
  auto record = [&](int step) {
    const double nrm = cotangent_norm(bundle.metric, s);
    run.max_drift = std::max(run.max_drift, n0 > 0.0 ? std::abs(nrm - n0) / n0 : std::abs(nrm));
    if (step % record_every == 0 || step == steps) {
      run.times.push_back(step * dt);
      run.states.push_back(s);
      run.norms.push_back(nrm);
    }
  };
  record(0);
  for (int k = 1; k <= steps; ++k) {
    s = geodesic_step(bundle.metric, bundle.poisson, s, dt);
    record(k);
  }
  return run;
}

}  // namespace pmc
