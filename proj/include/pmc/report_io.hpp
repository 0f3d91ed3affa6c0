#pragma once

#include <cstdio>
#include <string>

#include <json.hpp>

#include "pmc/report.hpp"

namespace pmc {

inline constexpr const char* kReportSchema = "pmc-report/1";

namespace report_io_detail {

inline nlohmann::ordered_json residual_json(const std::optional<Residual>& r) {
  if (!r) return nullptr;
  return {{"residual", r->normalized()}, {"raw", r->raw}, {"scale", r->scale}};
}

inline nlohmann::ordered_json record_json(const ConditionRecord& c) {
  nlohmann::ordered_json j;
  j["name"] = c.name;
  j["verdict"] = std::string(to_string(c.verdict));
  if (c.worst_point < 0) {
    j["residual"] = nullptr;
    j["worst_point"] = nullptr;
  } else {
    j["residual"] = c.worst.normalized();
    j["raw"] = c.worst.raw;
    j["scale"] = c.worst.scale;
    j["worst_point"] = c.worst_point;
  }
  auto per = nlohmann::ordered_json::array();
  for (const auto& r : c.per_point) per.push_back(r ? nlohmann::ordered_json(r->normalized()) : nullptr);
  j["per_point"] = per;
  if (!c.note.empty()) j["note"] = c.note;
  return j;
}

inline const char* symbol(Verdict v) {
  switch (v) {
    case Verdict::Pass: return "✓";
    case Verdict::Fail: return "✗";
    case Verdict::Undefined: return "—";
  }
  return "?";
}

inline std::string sci(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.3e", v);
  return buf;
}

}  // namespace report_io_detail

/// Machine-readable report; identical inputs give identical output.
inline nlohmann::ordered_json to_json(const CompatReport& r) {
  using namespace report_io_detail;
  nlohmann::ordered_json j;
  j["schema"] = kReportSchema;
  j["chart"] = r.chart;
  j["dimension"] = r.dim;
  j["engine"] = {{"tolerance", r.tol},
                 {"cross_check_tolerance", kCrossCheckTolerance},
                 {"seed", r.seed},
                 {"jet_order", r.order},
                 {"random_points", r.random_points}};
  j["points"] = r.points;
  auto conds = nlohmann::ordered_json::array();
  for (const auto& c : r.conditions) conds.push_back(record_json(c));
  j["conditions"] = conds;
  auto cross = nlohmann::ordered_json::array();
  for (const auto& c : r.cross_checks) cross.push_back(record_json(c));
  j["cross_checks"] = cross;
  j["overall"] = {{"poisson", r.poisson}, {"compatible", r.compatible}, {"summary", r.summary},
                  {"exit_code", r.exit_code}};
  return j;
}

/// Human-readable table with one row per condition and cross-check.
inline std::string to_text(const CompatReport& r) {
  using namespace report_io_detail;
  std::string out;
  out += "chart " + (r.chart.empty() ? std::string() : r.chart + " ") + "(dim " + std::to_string(r.dim) + "), " + std::to_string(r.points.size()) +
         " points, seed " + std::to_string(r.seed) + ", jet order " + std::to_string(r.order) + ", tol " +
         sci(r.tol) + "\n\n";
  auto rows = [&](const std::vector<ConditionRecord>& recs) {
    for (const auto& c : recs) {
      char line[160];
      const std::string res = c.worst_point < 0 ? "-" : sci(c.worst.normalized());
      const std::string at = c.worst_point < 0 ? "-" : std::to_string(c.worst_point);
      std::snprintf(line, sizeof(line), "  %s %-20s %-10s %-6s", symbol(c.verdict), c.name.c_str(), res.c_str(),
                    at.c_str());
      out += line;
      if (!c.note.empty()) out += " " + c.note;
      while (!out.empty() && out.back() == ' ') out.pop_back();
      out += "\n";
    }
  };
  out += "  condition              residual   point\n";
  rows(r.conditions);
  if (!r.cross_checks.empty()) {
    out += "\n  cross-check\n";
    rows(r.cross_checks);
  }
  out += "\n" + r.summary + "\n";
  return out;
}

inline nlohmann::ordered_json to_json(const GeodesicRun& run) {
  nlohmann::ordered_json j;
  j["schema"] = "pmc-geodesic/1";
  auto rows = nlohmann::ordered_json::array();
  for (std::size_t k = 0; k < run.states.size(); ++k)
    rows.push_back({{"t", run.times[k]}, {"u", run.states[k].u}, {"xi", run.states[k].xi}, {"norm", run.norms[k]}});
  j["trajectory"] = rows;
  j["max_relative_drift"] = run.max_drift;
  return j;
}

inline std::string to_text(const GeodesicRun& run) {
  std::string out = "t u xi |xi|\n";
  for (std::size_t k = 0; k < run.states.size(); ++k) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.6g", run.times[k]);
    out += buf;
    for (const auto* v : {&run.states[k].u, &run.states[k].xi})
      for (double x : *v) {
        std::snprintf(buf, sizeof(buf), " %.12g", x);
        out += buf;
      }
    std::snprintf(buf, sizeof(buf), " %.15g\n", run.norms[k]);
    out += buf;
  }
  out += "max relative |xi| drift " + report_io_detail::sci(run.max_drift) + "\n";
  return out;
}

}  // namespace pmc
