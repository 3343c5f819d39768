#include "elicit/oracle.hpp"

#include <algorithm>
#include <cmath>

namespace elicit::oracle {

namespace {

// tangent-hyperplane payments, written out again on purpose
std::vector<double> raw_payments(const ShiftedCurve& curve, const Posterior& report) {
  const double value = curve.base.eval(report) - curve.beta;
  const std::vector<double> grad = curve.base.gradient(report);
  double grad_dot = 0.0;
  for (std::size_t i = 0; i < report.size(); ++i) grad_dot += grad[i] * report[i];
  std::vector<double> pay(report.size());
  for (std::size_t i = 0; i < report.size(); ++i) pay[i] = value - grad_dot + grad[i];
  return pay;
}

}  // namespace

BestReport brute_force_best_report(const PaymentFn& payments, const Posterior& belief,
                                   double grid_step) {
  const std::vector<Posterior> grid = simplex_grid(belief.size(), grid_step);
  bool have = false;
  BestReport best{belief, 0.0};
  double best_distance = 0.0;
  for (const Posterior& report : grid) {
    const std::vector<double> pay = payments(report);
    double expected = 0.0;
    for (std::size_t i = 0; i < belief.size(); ++i) expected += belief[i] * pay[i];
    double distance = 0.0;
    for (std::size_t i = 0; i < belief.size(); ++i) {
      distance = std::max(distance, std::fabs(report[i] - belief[i]));
    }
    const bool better = !have || expected > best.expected_payment + 1e-12 ||
                        (expected > best.expected_payment - 1e-12 && distance < best_distance);
    if (better) {
      have = true;
      best = BestReport{report, expected};
      best_distance = distance;
    }
  }
  return best;
}

BestReport brute_force_best_report(const ShiftedCurve& curve, const Posterior& belief,
                                   double grid_step) {
  return brute_force_best_report(
      [&curve](const Posterior& report) { return raw_payments(curve, report); }, belief,
      grid_step);
}

ExpertValue brute_force_expert_value(const Expert& expert, const PreferenceCurve& curve) {
  if (expert.technologies.empty()) {
    throw Error(Errc::InvalidArgument, "expert " + expert.id + " has no technologies");
  }
  bool have = false;
  ExpertValue best;
  for (std::size_t t = 0; t < expert.technologies.size(); ++t) {
    const Technology& mu = expert.technologies[t];
    double expected = 0.0;
    for (const auto& [rho, w] : mu.support) expected += w * curve.eval(rho);
    const double value = expected - mu.cost;
    if (!have || value > best.u) {
      have = true;
      best = ExpertValue{value, t};
    }
  }
  return best;
}

std::vector<double> finite_difference_gradient(const PreferenceCurve& curve, const Posterior& rho,
                                               double h) {
  if (!(h > 0.0)) throw Error(Errc::InvalidArgument, "step h must be positive");
  for (double v : rho.probs()) {
    if (v < h) {
      throw Error(Errc::BoundaryPoint, "point is too close to the orthant boundary for step h");
    }
  }
  std::vector<double> x(rho.probs().begin(), rho.probs().end());
  std::vector<double> grad(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double keep = x[i];
    x[i] = keep + h;
    const double up = curve.eval_ambient(x);
    x[i] = keep - h;
    const double down = curve.eval_ambient(x);
    x[i] = keep;
    grad[i] = (up - down) / (2.0 * h);
  }
  return grad;
}

ReportInterval brute_force_report_bounds(const PreferenceCurve& curve, double beta,
                                         const RiskLimits& limits, double grid_step) {
  if (curve.dimension() != 2) {
    throw Error(Errc::NotBinary, "report bounds are only defined for binary events");
  }
  const auto steps = static_cast<std::size_t>(std::llround(1.0 / grid_step));
  constexpr double kTolerance = 1e-9;
  const ShiftedCurve shifted{curve, beta};

  bool any = false;
  double lo = 0.0, hi = 0.0;
  for (std::size_t i = 0; i <= steps; ++i) {
    const double rho = static_cast<double>(i) * grid_step;
    const Posterior report = Posterior::trusted({rho, 1.0 - rho});
    bool ok = true;
    for (double pay : raw_payments(shifted, report)) {
      if (pay < -limits.phi_e - kTolerance || pay > limits.phi_p + kTolerance) {
        ok = false;
        break;
      }
    }
    if (!ok) continue;
    if (!any) {
      any = true;
      lo = rho;
    }
    hi = rho;
  }
  if (!any) return ReportInterval{true, 0.0, 0.0};
  return ReportInterval{false, lo, hi};
}

}  // namespace elicit::oracle
