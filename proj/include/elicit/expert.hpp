#pragma once

#include <string>
#include <vector>

#include "elicit/curve.hpp"
#include "elicit/rng.hpp"
#include "elicit/simplex.hpp"

namespace elicit {

/// A forecaster with a private menu of research tests. The free do-nothing
/// test is always on the menu, so an expert's value is never negative.
struct Expert {
  std::string id;
  std::vector<Technology> technologies;
};

// Validates every technology against the prior and appends the free
// do-nothing test if the menu lacks one.
Expert make_expert(std::string id, std::vector<Technology> technologies, const Prior& prior);

struct ExpertValue {
  double u = 0.0;         // best expected curve value minus cost
  std::size_t best = 0;   // index of the maximizing technology
};

// expected curve value of the test's outcomes minus its cost
double technology_value(const PreferenceCurve& curve, const Technology& mu);

// maximum over the menu; ties keep the lowest index
ExpertValue expert_value(const Expert& expert, const PreferenceCurve& curve);

// what the expert should bid in the auction: exactly her value
double truthful_bid(const Expert& expert, const PreferenceCurve& curve);

// sample one posterior from the chosen test
Posterior realize_posterior(const Expert& expert, std::size_t technology_index, Rng& rng);

}  // namespace elicit
