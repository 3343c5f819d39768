#include "elicit/maxrisk.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <functional>

namespace elicit {

namespace {

constexpr double kRiskTolerance = 1e-9;

bool payments_within(std::span<const double> payments, const RiskLimits& limits) {
  for (double p : payments) {
    if (p < -limits.phi_e - kRiskTolerance) return false;
    if (p > limits.phi_p + kRiskTolerance) return false;
  }
  return true;
}

void require_limits(const RiskLimits& limits) {
  if (!(limits.phi_e >= 0.0) || !(limits.phi_p >= 0.0)) {
    throw Error(Errc::InvalidArgument, "risk limits must be nonnegative");
  }
}

}  // namespace

bool is_report_allowed(const ShiftedCurve& curve, const Posterior& report,
                       const RiskLimits& limits) {
  require_limits(limits);
  const PaymentVector pv = payment_vector(Contract{curve}, report);
  return payments_within(pv.payments, limits);
}

std::vector<std::size_t> restricted_technologies(const Expert& expert, const PreferenceCurve& curve,
                                                 double beta, const RiskLimits& limits) {
  const ShiftedCurve shifted = shift(curve, beta);
  std::vector<std::size_t> allowed;
  for (std::size_t i = 0; i < expert.technologies.size(); ++i) {
    bool ok = true;
    for (const auto& [rho, w] : expert.technologies[i].support) {
      if (!is_report_allowed(shifted, rho, limits)) {
        ok = false;
        break;
      }
    }
    if (ok) allowed.push_back(i);
  }
  return allowed;
}

namespace {

// outcome payments of the contract at scalar report rho (binary case)
std::array<double, 2> binary_payments(const ShiftedCurve& curve, double rho) {
  const Posterior report = Posterior::trusted({rho, 1.0 - rho});
  const double value = curve.eval(report);
  const std::vector<double> grad = curve.gradient(report);
  const double grad_dot = grad[0] * rho + grad[1] * (1.0 - rho);
  return {value - grad_dot + grad[0], value - grad_dot + grad[1]};
}

// Boundary of a monotone predicate on [0, 1]: `ok` holds on one side of the
// root and fails on the other. lo_side must satisfy `ok`, hi_side must not.
double bisect_boundary(const std::function<bool(double)>& ok, double ok_side, double bad_side) {
  if (!ok(ok_side) || ok(bad_side)) {
    throw Error(Errc::NoBracket, "constraint boundary is not bracketed");
  }
  while (std::fabs(bad_side - ok_side) > 1e-10) {
    const double mid = 0.5 * (ok_side + bad_side);
    (ok(mid) ? ok_side : bad_side) = mid;
  }
  return ok_side;
}

}  // namespace

ReportInterval binary_report_bounds(const PreferenceCurve& curve, double beta,
                                    const RiskLimits& limits) {
  if (curve.dimension() != 2) {
    throw Error(Errc::NotBinary, "report bounds are only defined for binary events");
  }
  require_limits(limits);
  const ShiftedCurve shifted = shift(curve, beta);

  // The four cap constraints are monotone in rho because the curve is convex:
  // the outcome-1 payment rises with rho, the outcome-2 payment falls.
  const auto pay1 = [&](double rho) { return binary_payments(shifted, rho)[0]; };
  const auto pay2 = [&](double rho) { return binary_payments(shifted, rho)[1]; };

  double lo = 0.0;
  double hi = 1.0;

  // constraints satisfied on a left interval [0, r]: tighten hi
  for (const auto& ok : {std::function<bool(double)>(
                             [&](double r) { return pay1(r) <= limits.phi_p + kRiskTolerance; }),
                         std::function<bool(double)>(
                             [&](double r) { return pay2(r) >= -limits.phi_e - kRiskTolerance; })}) {
    if (ok(1.0)) continue;            // never binds
    if (!ok(0.0)) return ReportInterval{true, 0.0, 0.0};
    hi = std::min(hi, bisect_boundary(ok, 0.0, 1.0));
  }
  // constraints satisfied on a right interval [r, 1]: tighten lo
  for (const auto& ok : {std::function<bool(double)>(
                             [&](double r) { return pay1(r) >= -limits.phi_e - kRiskTolerance; }),
                         std::function<bool(double)>(
                             [&](double r) { return pay2(r) <= limits.phi_p + kRiskTolerance; })}) {
    if (ok(0.0)) continue;
    if (!ok(1.0)) return ReportInterval{true, 0.0, 0.0};
    lo = std::max(lo, bisect_boundary(ok, 1.0, 0.0));
  }

  if (lo > hi) return ReportInterval{true, 0.0, 0.0};
  return ReportInterval{false, lo, hi};
}

namespace {

struct RestrictedValue {
  bool feasible = false;
  double value = 0.0;
  std::size_t technology = 0;
};

RestrictedValue restricted_value_at(const Expert& expert, const PreferenceCurve& curve, double beta,
                                    const RiskLimits& limits,
                                    std::span<const double> base_values) {
  RestrictedValue best;
  for (std::size_t index : restricted_technologies(expert, curve, beta, limits)) {
    const double value = base_values[index] - beta;
    if (!best.feasible || value > best.value) {
      best = RestrictedValue{true, value, index};
    }
  }
  return best;
}

}  // namespace

RestrictedBid restricted_bid(const Expert& expert, const PreferenceCurve& curve,
                             const RiskLimits& limits, std::span<const double> beta_grid,
                             BidRule rule) {
  if (beta_grid.empty() || !std::is_sorted(beta_grid.begin(), beta_grid.end()) ||
      std::find(beta_grid.begin(), beta_grid.end(), 0.0) == beta_grid.end()) {
    throw Error(Errc::InvalidArgument, "beta grid must be sorted ascending and include 0");
  }
  std::vector<double> base_values;
  base_values.reserve(expert.technologies.size());
  for (const Technology& mu : expert.technologies) {
    base_values.push_back(technology_value(curve, mu));
  }

  if (rule == BidRule::BreakEven) {
    for (std::size_t i = beta_grid.size(); i-- > 0;) {
      const RestrictedValue rv =
          restricted_value_at(expert, curve, beta_grid[i], limits, base_values);
      if (rv.feasible && rv.value >= -1e-12) {
        return RestrictedBid{beta_grid[i], rv.technology};
      }
    }
    throw Error(Errc::EmptyFeasibleSet,
                "expert " + expert.id + " has no break-even bid on the grid");
  }

  bool any = false;
  RestrictedBid bid;
  double best_value = 0.0;
  for (double beta : beta_grid) {
    const RestrictedValue rv = restricted_value_at(expert, curve, beta, limits, base_values);
    if (!rv.feasible) continue;
    if (!any || rv.value > best_value) {
      any = true;
      best_value = rv.value;
      bid = RestrictedBid{beta, rv.technology};
    }
  }
  if (!any) {
    throw Error(Errc::EmptyFeasibleSet, "expert " + expert.id + " has no feasible bid on the grid");
  }
  return bid;
}

double min_beta_reserve(const PreferenceCurve& curve, double phi_p) {
  if (!std::isfinite(phi_p)) {
    throw Error(Errc::InvalidArgument, "min_beta_reserve needs a finite payment cap");
  }
  const std::size_t n = curve.dimension();
  double worst_vertex = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < n; ++i) {
    worst_vertex = std::max(worst_vertex, curve.eval(Posterior::vertex(n, i)));
  }
  return std::max(0.0, worst_vertex - phi_p);
}

}  // namespace elicit
