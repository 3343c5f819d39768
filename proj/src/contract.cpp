#include "elicit/contract.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>

namespace elicit {

PaymentVector payment_vector(const Contract& contract, const Posterior& report) {
  const double value = contract.curve.eval(report);
  const std::vector<double> grad = contract.curve.gradient(report);
  const double grad_dot_report = dot(grad, report.probs());
  std::vector<double> payments(report.size());
  for (std::size_t i = 0; i < report.size(); ++i) {
    payments[i] = value - grad_dot_report + grad[i];
  }
  return PaymentVector{std::move(payments), report};
}

double expected_payment(const PaymentVector& pv, const Posterior& belief) {
  if (belief.size() != pv.payments.size()) {
    throw Error(Errc::DimensionMismatch, "belief dimension does not match the payment vector");
  }
  return dot(belief.probs(), pv.payments);
}

double tangent_value(const Contract& contract, const Posterior& report, const Posterior& at) {
  // The tangent hyperplane is affine, so on the simplex it equals the
  // payment-weighted average of its vertex values; at a vertex this is the
  // outcome payment, exactly.
  const PaymentVector pv = payment_vector(contract, report);
  return dot(at.probs(), pv.payments);
}

PropernessReport audit_properness(const ShiftedCurve& curve, const PaymentRule& payments,
                                  double grid_step) {
  constexpr double kTolerance = 1e-9;
  const std::vector<Posterior> grid = simplex_grid(curve.base.dimension(), grid_step);

  std::vector<std::vector<double>> pay(grid.size());
  for (std::size_t r = 0; r < grid.size(); ++r) pay[r] = payments(grid[r]);

  PropernessReport report;
  report.worst_violation = -std::numeric_limits<double>::infinity();
  for (std::size_t b = 0; b < grid.size(); ++b) {
    const double truthful = curve.eval(grid[b]);
    for (std::size_t r = 0; r < grid.size(); ++r) {
      const double gain = dot(grid[b].probs(), pay[r]) - truthful;
      if (gain > report.worst_violation) {
        report.worst_violation = gain;
        report.witness_belief = grid[b];
        report.witness_report = grid[r];
      }
      if (r == b) {
        report.worst_identity_gap = std::max(report.worst_identity_gap, std::fabs(gain));
      }
    }
  }
  report.pass = report.worst_violation <= kTolerance && report.worst_identity_gap <= kTolerance;
  return report;
}

PropernessReport check_properness(const Contract& contract, double grid_step) {
  return audit_properness(
      contract.curve,
      [&contract](const Posterior& report) { return payment_vector(contract, report).payments; },
      grid_step);
}

UniquenessResult verify_uniqueness(const Contract& contract, const Posterior& report,
                                   std::span<const double> alt, double grid_step) {
  constexpr double kTolerance = 1e-9;
  if (alt.size() != report.size()) {
    throw Error(Errc::DimensionMismatch, "alternative payments have the wrong dimension");
  }
  const double expected_at_report = dot(report.probs(), alt);
  const double curve_at_report = contract.curve.eval(report);
  if (std::fabs(expected_at_report - curve_at_report) > kTolerance) {
    char buf[160];
    std::snprintf(buf, sizeof(buf),
                  "alternative payments expect %.17g at the report, the curve pays %.17g",
                  expected_at_report, curve_at_report);
    throw Error(Errc::ExpectedPaymentMismatch, buf);
  }

  const PaymentVector tangent = payment_vector(contract, report);
  if (linf_distance(alt, tangent.payments) <= kTolerance) {
    return UniquenessResult{UniquenessResult::Kind::EqualsTangent, std::nullopt, 0.0};
  }

  // A distinct hyperplane through the same point must rise above the curve
  // somewhere; search the grid for a belief that strictly gains by
  // misreporting `report` under the alternative payments.
  UniquenessResult result;
  result.kind = UniquenessResult::Kind::NoneFoundAtResolution;
  for (const Posterior& belief : simplex_grid(report.size(), grid_step)) {
    const double gain = dot(belief.probs(), alt) - contract.curve.eval(belief);
    if (gain > kTolerance && gain > result.gain) {
      result.kind = UniquenessResult::Kind::Counterexample;
      result.belief = belief;
      result.gain = gain;
    }
  }
  return result;
}

}  // namespace elicit
