#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "elicit/curve.hpp"
#include "elicit/expert.hpp"
#include "elicit/maxrisk.hpp"

namespace elicit {

/// One runnable configuration: the event, the principal's curve, the expert
/// pool and the simulation knobs. Seeds are always explicit; nothing is ever
/// seeded from the clock.
struct Scenario {
  std::string name;
  Prior prior;
  PreferenceCurve curve;
  std::vector<Expert> experts;
  double reserve = 0.0;
  std::optional<RiskLimits> limits = std::nullopt;
  std::uint64_t seed = 0;
  std::size_t samples = 100000;

  std::size_t outcomes() const { return prior.value.size(); }
};

}  // namespace elicit
