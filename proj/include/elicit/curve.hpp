#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "elicit/simplex.hpp"

namespace elicit {

/// The principal's base utility surface P(.), normalized so P(prior) = 0.
/// Families evaluate on the whole nonnegative orthant, not just the simplex,
/// so numerical probes can step off it. Value type; cheap to copy.
class PreferenceCurve {
 public:
  double eval(const Posterior& rho) const { return eval_ambient(rho.probs()); }
  std::vector<double> gradient(const Posterior& rho) const { return gradient_ambient(rho.probs()); }

  double eval_ambient(std::span<const double> x) const;
  std::vector<double> gradient_ambient(std::span<const double> x) const;

  std::size_t dimension() const;
  const Posterior& prior() const;
  // true when the surface has a unique supporting hyperplane everywhere
  bool differentiable() const;
  std::string_view family() const;

  // Brier-style bowl: sum of squared coordinates, zeroed at the prior.
  static PreferenceCurve quadratic(const Prior& prior);
  // Max over linear action payoffs, zeroed at the prior. Convex with kinks.
  static PreferenceCurve action_set(std::vector<std::vector<double>> actions, const Prior& prior);
  // Intentionally concave; exists so convexity audits can be self-tested.
  static PreferenceCurve concave_probe(const Prior& prior);

  struct Impl;

 private:
  explicit PreferenceCurve(std::shared_ptr<const Impl> impl) : impl_(std::move(impl)) {}
  std::shared_ptr<const Impl> impl_;
};

PreferenceCurve from_action_set(std::vector<std::vector<double>> actions, const Prior& prior);

/// P_beta: the base curve lowered by a constant price cut beta >= 0.
/// The gradient does not depend on beta.
struct ShiftedCurve {
  PreferenceCurve base;
  double beta = 0.0;

  double eval(const Posterior& rho) const { return base.eval(rho) - beta; }
  std::vector<double> gradient(const Posterior& rho) const { return base.gradient(rho); }
};

ShiftedCurve shift(PreferenceCurve base, double beta);

struct ConvexityReport {
  bool pass = true;
  // max over sampled triples of P(mix) - [t P(a) + (1-t) P(b)]; > 0 means bent the wrong way
  double worst_violation = 0.0;
  std::vector<double> witness_a, witness_b;
  double witness_t = 0.0;
};

ConvexityReport check_convexity(const PreferenceCurve& curve, int samples, std::uint64_t seed);

}  // namespace elicit
