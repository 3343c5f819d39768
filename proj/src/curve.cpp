#include "elicit/curve.hpp"

#include <cmath>
#include <limits>

#include "elicit/rng.hpp"

namespace elicit {

struct PreferenceCurve::Impl {
  explicit Impl(Posterior prior) : prior(std::move(prior)) {}
  virtual ~Impl() = default;
  virtual double value(std::span<const double> x) const = 0;
  virtual std::vector<double> grad(std::span<const double> x) const = 0;
  virtual bool differentiable() const = 0;
  virtual std::string_view family() const = 0;
  Posterior prior;
};

namespace {

struct QuadraticImpl final : PreferenceCurve::Impl {
  explicit QuadraticImpl(Posterior p) : Impl(std::move(p)) {
    for (double q : prior.probs()) prior_norm += q * q;
  }
  double value(std::span<const double> x) const override {
    double s = 0.0;
    for (double v : x) s += v * v;
    return s - prior_norm;
  }
  std::vector<double> grad(std::span<const double> x) const override {
    std::vector<double> g(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) g[i] = 2.0 * x[i];
    return g;
  }
  bool differentiable() const override { return true; }
  std::string_view family() const override { return "quadratic"; }
  double prior_norm = 0.0;
};

struct ActionSetImpl final : PreferenceCurve::Impl {
  ActionSetImpl(std::vector<std::vector<double>> acts, Posterior p)
      : Impl(std::move(p)), actions(std::move(acts)) {
    normalizer = best(prior.probs()).second;
  }
  // maximizing action and its raw payoff; ties keep the lowest index
  std::pair<std::size_t, double> best(std::span<const double> x) const {
    std::size_t arg = 0;
    double top = dot(x, actions[0]);
    for (std::size_t i = 1; i < actions.size(); ++i) {
      const double v = dot(x, actions[i]);
      if (v > top) {
        top = v;
        arg = i;
      }
    }
    return {arg, top};
  }
  double value(std::span<const double> x) const override { return best(x).second - normalizer; }
  std::vector<double> grad(std::span<const double> x) const override {
    return actions[best(x).first];
  }
  bool differentiable() const override { return false; }
  std::string_view family() const override { return "action_set"; }
  std::vector<std::vector<double>> actions;
  double normalizer = 0.0;
};

struct ConcaveProbeImpl final : PreferenceCurve::Impl {
  explicit ConcaveProbeImpl(Posterior p) : Impl(std::move(p)) {}
  double value(std::span<const double> x) const override {
    double s = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
      const double d = x[i] - prior[i];
      s -= d * d;
    }
    return s;
  }
  std::vector<double> grad(std::span<const double> x) const override {
    std::vector<double> g(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) g[i] = -2.0 * (x[i] - prior[i]);
    return g;
  }
  bool differentiable() const override { return true; }
  std::string_view family() const override { return "concave_probe"; }
};

}  // namespace

double PreferenceCurve::eval_ambient(std::span<const double> x) const {
  if (x.size() != dimension()) {
    throw Error(Errc::DimensionMismatch, "curve evaluated at a point of the wrong dimension");
  }
  return impl_->value(x);
}

std::vector<double> PreferenceCurve::gradient_ambient(std::span<const double> x) const {
  if (x.size() != dimension()) {
    throw Error(Errc::DimensionMismatch, "curve gradient asked at a point of the wrong dimension");
  }
  return impl_->grad(x);
}

std::size_t PreferenceCurve::dimension() const { return impl_->prior.size(); }
const Posterior& PreferenceCurve::prior() const { return impl_->prior; }
bool PreferenceCurve::differentiable() const { return impl_->differentiable(); }
std::string_view PreferenceCurve::family() const { return impl_->family(); }

PreferenceCurve PreferenceCurve::quadratic(const Prior& prior) {
  return PreferenceCurve(std::make_shared<QuadraticImpl>(prior.value));
}

PreferenceCurve PreferenceCurve::action_set(std::vector<std::vector<double>> actions,
                                            const Prior& prior) {
  if (actions.empty()) throw Error(Errc::EmptyActionSet, "action set must contain an action");
  for (std::size_t i = 0; i < actions.size(); ++i) {
    if (actions[i].size() != prior.value.size()) {
      throw Error(Errc::DimensionMismatch,
                  "action " + std::to_string(i) + " has the wrong number of payoffs");
    }
    for (double v : actions[i]) {
      if (!std::isfinite(v)) {
        throw Error(Errc::InvalidArgument, "action " + std::to_string(i) + " has a non-finite payoff");
      }
    }
  }
  return PreferenceCurve(std::make_shared<ActionSetImpl>(std::move(actions), prior.value));
}

PreferenceCurve PreferenceCurve::concave_probe(const Prior& prior) {
  return PreferenceCurve(std::make_shared<ConcaveProbeImpl>(prior.value));
}

PreferenceCurve from_action_set(std::vector<std::vector<double>> actions, const Prior& prior) {
  return PreferenceCurve::action_set(std::move(actions), prior);
}

ShiftedCurve shift(PreferenceCurve base, double beta) {
  if (!(beta >= 0.0) || !std::isfinite(beta)) {
    throw Error(Errc::InvalidArgument, "curve shift must be a nonnegative finite number");
  }
  return ShiftedCurve{std::move(base), beta};
}

namespace {

// uniform on the simplex via normalized exponentials
std::vector<double> random_simplex_point(std::size_t n, Rng& rng) {
  std::vector<double> x(n);
  double sum = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    x[i] = -std::log(1.0 - rng.uniform01());
    sum += x[i];
  }
  for (double& v : x) v /= sum;
  return x;
}

}  // namespace

ConvexityReport check_convexity(const PreferenceCurve& curve, int samples, std::uint64_t seed) {
  if (samples < 1) throw Error(Errc::InvalidArgument, "check_convexity needs samples >= 1");
  constexpr double kTolerance = 1e-9;
  const std::size_t n = curve.dimension();
  Rng rng(seed);
  ConvexityReport report;
  report.worst_violation = -std::numeric_limits<double>::infinity();
  std::vector<double> mix(n);
  for (int s = 0; s < samples; ++s) {
    const std::vector<double> a = random_simplex_point(n, rng);
    const std::vector<double> b = random_simplex_point(n, rng);
    const double t = rng.uniform01();
    for (std::size_t i = 0; i < n; ++i) mix[i] = t * a[i] + (1.0 - t) * b[i];
    const double chord = t * curve.eval_ambient(a) + (1.0 - t) * curve.eval_ambient(b);
    const double violation = curve.eval_ambient(mix) - chord;
    if (violation > report.worst_violation) {
      report.worst_violation = violation;
      report.witness_a = a;
      report.witness_b = b;
      report.witness_t = t;
    }
  }
  report.pass = report.worst_violation <= kTolerance;
  return report;
}

}  // namespace elicit
