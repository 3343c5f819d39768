#pragma once

#include <functional>
#include <optional>
#include <span>

#include "elicit/curve.hpp"

namespace elicit {

/// The scoring contract tied to one shifted preference curve. Payments are a
/// pure function of (curve, report): the tangent hyperplane at the report,
/// read off at the outcome vertices.
struct Contract {
  ShiftedCurve curve;
};

struct PaymentVector {
  std::vector<double> payments;  // money paid to the expert per realized outcome
  Posterior report;
};

PaymentVector payment_vector(const Contract& contract, const Posterior& report);

double expected_payment(const PaymentVector& pv, const Posterior& belief);

// value of the report's tangent hyperplane at `at`; at a vertex this is the
// outcome payment
double tangent_value(const Contract& contract, const Posterior& report, const Posterior& at);

struct PropernessReport {
  bool pass = true;
  // max over (belief, report) grid pairs of: expected payment of the report
  // minus the truthful expected payment
  double worst_violation = 0.0;
  // max over grid reports of |<report, payments(report)> - P_beta(report)|
  double worst_identity_gap = 0.0;
  std::optional<Posterior> witness_belief;
  std::optional<Posterior> witness_report;
};

using PaymentRule = std::function<std::vector<double>(const Posterior& report)>;

PropernessReport audit_properness(const ShiftedCurve& curve, const PaymentRule& payments,
                                  double grid_step);
PropernessReport check_properness(const Contract& contract, double grid_step);

struct UniquenessResult {
  enum class Kind {
    EqualsTangent,            // alt matches the tangent payments coordinatewise
    Counterexample,           // a belief that strictly gains by misreporting under alt
    NoneFoundAtResolution,    // alt differs but the grid exposed no strict gain
  };
  Kind kind = Kind::EqualsTangent;
  std::optional<Posterior> belief;
  double gain = 0.0;
};

UniquenessResult verify_uniqueness(const Contract& contract, const Posterior& report,
                                   std::span<const double> alt, double grid_step);

}  // namespace elicit
