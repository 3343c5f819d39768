#pragma once

#include <functional>
#include <vector>

#include "elicit/expert.hpp"
#include "elicit/maxrisk.hpp"

namespace elicit::oracle {

// Brute-force ground truth. Everything here recomputes payments and values
// with its own arithmetic instead of calling the modules it is used to check,
// so a shared bug cannot hide.

struct BestReport {
  Posterior report;
  double expected_payment = 0.0;
};

using PaymentFn = std::function<std::vector<double>(const Posterior& report)>;

// exhaustively maximizes the belief's expected payment over grid reports;
// value ties (within 1e-12) resolve to the report nearest the belief
BestReport brute_force_best_report(const PaymentFn& payments, const Posterior& belief,
                                   double grid_step);
BestReport brute_force_best_report(const ShiftedCurve& curve, const Posterior& belief,
                                   double grid_step);

// direct enumeration of the expert's best technology
ExpertValue brute_force_expert_value(const Expert& expert, const PreferenceCurve& curve);

// central differences per ambient coordinate; the point must sit at least h
// away from the orthant boundary
std::vector<double> finite_difference_gradient(const PreferenceCurve& curve, const Posterior& rho,
                                               double h);

// scans the scalar grid for admissible binary reports and returns their hull
ReportInterval brute_force_report_bounds(const PreferenceCurve& curve, double beta,
                                         const RiskLimits& limits, double grid_step);

}  // namespace elicit::oracle
