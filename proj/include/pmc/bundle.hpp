#pragma once

#include <optional>
#include <string>
#include <string_view>

#include "pmc/fields.hpp"
#include "pmc/killing.hpp"

namespace pmc {

enum class Verdict { Pass, Fail, Undefined };

constexpr std::string_view to_string(Verdict v) {
  switch (v) {
    case Verdict::Pass: return "pass";
    case Verdict::Fail: return "fail";
    case Verdict::Undefined: return "undefined";
  }
  return "undefined";
}

/// Everything a check run needs: chart, metric, Poisson bivector, volume
/// form, and the optional Killing system and flat-frame declaration.
struct Bundle {
  std::string name;
  Chart chart;
  MetricField metric;
  PoissonField poisson;
  VolumeField volume;
  std::optional<KillingSystem> killing;
  bool flat_frame = false;  // chart coordinates are affine for the flat connection

  void validate() const {
    chart.validate();
    const int n = chart.dim;
    if (metric.dim() != n || poisson.dim() != n)
      throw Error(ErrorCode::DimensionMismatch, "metric or Poisson bivector does not match the chart dimension");
    for (int i = 0; i < n; ++i)
      for (int j = i; j < n; ++j) metric(i, j).bind(n);
    for (std::size_t k = 0; k < poisson.field().size(); ++k) poisson.field()[k].bind(n);
    volume.density.bind(n);
    if (killing) killing->validate(n);
  }

  friend bool operator==(const Bundle&, const Bundle&) = default;
};

}  // namespace pmc
