#include "elicit/expert.hpp"

#include <utility>

namespace elicit {

Expert make_expert(std::string id, std::vector<Technology> technologies, const Prior& prior) {
  for (std::size_t i = 0; i < technologies.size(); ++i) {
    const TechnologyReport report = validate_technology(technologies[i], prior);
    if (!report.pass) {
      throw Error(Errc::ValidationError,
                  "expert " + id + ": technologies[" + std::to_string(i) + "]: " + report.problems[0]);
    }
  }
  bool has_null = false;
  for (const Technology& mu : technologies) {
    if (is_null_technology(mu, prior)) {
      has_null = true;
      break;
    }
  }
  if (!has_null) technologies.push_back(point_mass(prior.value));
  return Expert{std::move(id), std::move(technologies)};
}

double technology_value(const PreferenceCurve& curve, const Technology& mu) {
  double expected = 0.0;
  for (const auto& [rho, w] : mu.support) expected += w * curve.eval(rho);
  return expected - mu.cost;
}

ExpertValue expert_value(const Expert& expert, const PreferenceCurve& curve) {
  if (expert.technologies.empty()) {
    throw Error(Errc::InvalidArgument, "expert " + expert.id + " has no technologies");
  }
  ExpertValue best{technology_value(curve, expert.technologies[0]), 0};
  for (std::size_t i = 1; i < expert.technologies.size(); ++i) {
    const double value = technology_value(curve, expert.technologies[i]);
    if (value > best.u) best = ExpertValue{value, i};
  }
  return best;
}

double truthful_bid(const Expert& expert, const PreferenceCurve& curve) {
  return expert_value(expert, curve).u;
}

Posterior realize_posterior(const Expert& expert, std::size_t technology_index, Rng& rng) {
  if (technology_index >= expert.technologies.size()) {
    throw Error(Errc::IndexOutOfRange,
                "expert " + expert.id + " has no technology " + std::to_string(technology_index));
  }
  const Technology& mu = expert.technologies[technology_index];
  std::vector<double> weights;
  weights.reserve(mu.support.size());
  for (const auto& point : mu.support) weights.push_back(point.weight);
  return mu.support[rng.pick_weighted(weights)].posterior;
}

}  // namespace elicit
