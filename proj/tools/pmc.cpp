// pmc: command-line front end for the compatibility checks.

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "pmc/pmc.hpp"
#include "pmc/report_io.hpp"

namespace {

constexpr int kExitInputError = 3;

struct Globals {
  double tol = pmc::kDefaultTolerance;
  int points = 10;
  std::optional<std::uint64_t> seed;
  int order = pmc::kMaxOrder;
  bool json = false;
  bool quiet = false;
  bool serial = false;
};

pmc::Bundle load(const std::string& source) {
  if (std::filesystem::exists(source)) return pmc::load_chart_file(source);
  const auto& names = pmc::catalog_names();
  if (std::find(names.begin(), names.end(), source) != names.end()) return pmc::get_entry(source).bundle;
  throw pmc::Error(pmc::ErrorCode::InvalidInput, "'" + source + "' is neither a chart file nor a catalog entry");
}

int emit_check(const pmc::Bundle& b, const Globals& g) {
  pmc::CheckOptions opt;
  opt.tol = g.tol;
  opt.points = g.points;
  opt.seed = g.seed;
  opt.order = g.order;
  opt.parallel = !g.serial;
  const auto rep = pmc::run_check(b, opt);
  if (g.json)
    std::cout << pmc::to_json(rep).dump(2) << "\n";
  else if (g.quiet)
    std::cout << rep.summary << "\n";
  else
    std::cout << pmc::to_text(rep);
  return rep.exit_code;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Check compatibility of a Riemannian metric with a Poisson bivector"};
  app.require_subcommand(1);
  app.fallthrough();
  Globals g;
  app.add_option("--tol", g.tol, "scale-free tolerance")->check(CLI::PositiveNumber);
  app.add_option("--points", g.points, "random sample points drawn from the chart box")->check(CLI::NonNegativeNumber);
  app.add_option("--seed", g.seed, "seed for the random sample points (default: chart seed, then 42)");
  app.add_option("--order", g.order, "jet order")->check(CLI::Range(2, pmc::kMaxOrder));
  app.add_flag("--json", g.json, "machine-readable output");
  app.add_flag("--quiet", g.quiet, "print only the overall verdict");
  app.add_flag("--serial", g.serial, "evaluate sample points one after another");

  std::string file, entry, geo_source;
  auto* check = app.add_subcommand("check", "run all checks on a chart file");
  check->add_option("file", file, "chart file")->required();
  auto* example = app.add_subcommand("example", "run all checks on a catalog entry");
  example->add_option("name", entry, "catalog entry")->required();
  auto* list = app.add_subcommand("list-examples", "list catalog entries");
  auto* exporter = app.add_subcommand("export-example", "print a catalog entry as a chart file");
  exporter->add_option("name", entry, "catalog entry")->required();

  std::vector<double> u, xi;
  int steps = 1000, every = 1;
  double dt = 1e-3;
  auto* geo = app.add_subcommand("geodesic", "integrate a cotangent geodesic");
  geo->add_option("source", geo_source, "chart file or catalog entry")->required();
  geo->add_option("--u", u, "initial point (default: first declared sample point)");
  geo->add_option("--xi", xi, "initial covector")->required();
  geo->add_option("--steps", steps, "number of RK4 steps")->check(CLI::NonNegativeNumber);
  geo->add_option("--dt", dt, "step size")->check(CLI::PositiveNumber);
  geo->add_option("--every", every, "record every n-th step")->check(CLI::PositiveNumber);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : kExitInputError;
  }

  try {
    if (*list) {
      for (const auto& name : pmc::catalog_names()) {
        if (g.quiet)
          std::cout << name << "\n";
        else
          std::cout << name << "  " << pmc::get_entry(name).description << "\n";
      }
      return 0;
    }
    if (*exporter) {
      std::cout << pmc::export_chart_file(pmc::get_entry(entry).bundle);
      return 0;
    }
    if (*check) return emit_check(pmc::load_chart_file(file), g);
    if (*example) return emit_check(pmc::get_entry(entry).bundle, g);
    if (*geo) {
      const auto b = load(geo_source);
      b.validate();
      pmc::CotangentState s;
      if (u.empty()) {
        if (b.chart.sample_points.empty())
          throw pmc::Error(pmc::ErrorCode::InvalidInput, "no --u given and the chart declares no sample points");
        u = b.chart.sample_points.front();
      }
      s.u = u;
      s.xi = xi;
      const auto run = pmc::run_geodesic(b, s, steps, dt, every);
      if (g.json)
        std::cout << pmc::to_json(run).dump(2) << "\n";
      else if (g.quiet)
        std::printf("%.6e\n", run.max_drift);
      else
        std::cout << pmc::to_text(run);
      return 0;
    }
  } catch (const pmc::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInputError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInputError;
  }
  return 0;
}
