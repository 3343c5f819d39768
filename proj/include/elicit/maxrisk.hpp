#pragma once

#include <limits>
#include <span>
#include <vector>

#include "elicit/contract.hpp"
#include "elicit/expert.hpp"

namespace elicit {

/// Hard budget caps. phi_p bounds what the principal can ever pay out for one
/// outcome; phi_e bounds what the expert can ever be charged. Either side may
/// be unlimited (infinity).
struct RiskLimits {
  double phi_p = std::numeric_limits<double>::infinity();
  double phi_e = std::numeric_limits<double>::infinity();
};

/// Admissible reports for a binary event, as bounds on the outcome-1
/// probability. May be empty when the caps exclude every report.
struct ReportInterval {
  bool empty = false;
  double rho_min = 0.0;
  double rho_max = 1.0;
};

struct RestrictedBid {
  double beta = 0.0;
  std::size_t technology = 0;  // menu index attaining the restricted value
};

enum class BidRule {
  BreakEven,      // largest shift the expert can absorb without expected loss
  LiteralArgmax,  // shift maximizing the restricted expected profit
};

// true iff every outcome payment of the report's contract stays in
// [-phi_e, phi_p] (with a 1e-9 boundary allowance)
bool is_report_allowed(const ShiftedCurve& curve, const Posterior& report,
                       const RiskLimits& limits);

// indices of technologies whose entire support stays admissible under the
// shifted curve
std::vector<std::size_t> restricted_technologies(const Expert& expert, const PreferenceCurve& curve,
                                                 double beta, const RiskLimits& limits);

// binary case only: solves the tangency conditions for the admissible report
// range by bisection (to 1e-10)
ReportInterval binary_report_bounds(const PreferenceCurve& curve, double beta,
                                    const RiskLimits& limits);

// the expert's best affordable bid over a beta grid, honoring the caps
RestrictedBid restricted_bid(const Expert& expert, const PreferenceCurve& curve,
                             const RiskLimits& limits, std::span<const double> beta_grid,
                             BidRule rule = BidRule::BreakEven);

// smallest reserve that keeps every issuable contract's payments at or below
// phi_p: shift the curve until its vertex values fit under the cap
double min_beta_reserve(const PreferenceCurve& curve, double phi_p);

}  // namespace elicit
