#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "elicit/error.hpp"

namespace elicit {

inline constexpr double kSumTolerance = 1e-9;   // |sum(probs) - 1| bound
inline constexpr double kMeanTolerance = 1e-7;  // mean-preservation bound

/// A probability distribution over the n outcomes of the forecast event.
/// Immutable after construction; construction through checked() enforces the
/// simplex invariants (use make_posterior for the throwing factory).
class Posterior {
 public:
  static Posterior checked(std::vector<double> probs);
  // For values derived from already-validated inputs (weighted means, grid
  // lattice points); skips validation.
  static Posterior trusted(std::vector<double> probs) { return Posterior(std::move(probs)); }
  static Posterior vertex(std::size_t n, std::size_t index);
  static Posterior uniform(std::size_t n);

  std::size_t size() const { return probs_.size(); }
  double operator[](std::size_t i) const { return probs_[i]; }
  std::span<const double> probs() const { return probs_; }
  const std::vector<double>& values() const { return probs_; }

  friend bool operator==(const Posterior&, const Posterior&) = default;

 private:
  explicit Posterior(std::vector<double> probs) : probs_(std::move(probs)) {}
  std::vector<double> probs_;
};

Posterior make_posterior(std::vector<double> values);

/// The common public belief before any research is done.
struct Prior {
  Posterior value;
};

struct WeightedPosterior {
  Posterior posterior;
  double weight = 0.0;
};

/// A research test: a finite distribution over posteriors whose mean must be
/// the prior, plus the money cost of running it.
struct Technology {
  std::vector<WeightedPosterior> support;
  double cost = 0.0;
};

// the free do-nothing test when rho is the prior and cost is 0
Technology point_mass(const Posterior& rho, double cost = 0.0);
bool is_null_technology(const Technology& mu, const Prior& prior);

Posterior technology_mean(const Technology& mu);

struct TechnologyReport {
  bool pass = true;
  std::vector<std::string> problems;
};

/// Checks weight, support and mean-preservation invariants; never throws.
TechnologyReport validate_technology(const Technology& mu, const Prior& prior);

/// All simplex lattice points with coordinates that are multiples of `step`.
/// step must divide 1 into a whole number of parts.
std::vector<Posterior> simplex_grid(std::size_t n, double step);

double dot(std::span<const double> a, std::span<const double> b);
double linf_distance(std::span<const double> a, std::span<const double> b);

}  // namespace elicit
