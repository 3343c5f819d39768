#include "elicit/simplex.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

namespace elicit {

namespace {

std::string format_index(const char* what, std::size_t i) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%s[%zu]", what, i);
  return buf;
}

}  // namespace

Posterior Posterior::checked(std::vector<double> probs) {
  if (probs.size() < 2) {
    throw Error(Errc::TooFewOutcomes, "posterior needs at least 2 outcomes");
  }
  double sum = 0.0;
  for (std::size_t i = 0; i < probs.size(); ++i) {
    if (!(probs[i] >= 0.0)) {
      throw Error(Errc::NegativeEntry, format_index("negative or non-finite entry at probs", i));
    }
    sum += probs[i];
  }
  if (!(std::fabs(sum - 1.0) <= kSumTolerance)) {
    char buf[96];
    std::snprintf(buf, sizeof(buf), "posterior entries sum to %.17g, expected 1", sum);
    throw Error(Errc::SumNotOne, buf);
  }
  return Posterior(std::move(probs));
}

Posterior Posterior::vertex(std::size_t n, std::size_t index) {
  std::vector<double> v(n, 0.0);
  v.at(index) = 1.0;
  return Posterior(std::move(v));
}

Posterior Posterior::uniform(std::size_t n) {
  return Posterior(std::vector<double>(n, 1.0 / static_cast<double>(n)));
}

Posterior make_posterior(std::vector<double> values) {
  return Posterior::checked(std::move(values));
}

Technology point_mass(const Posterior& rho, double cost) {
  return Technology{{WeightedPosterior{rho, 1.0}}, cost};
}

bool is_null_technology(const Technology& mu, const Prior& prior) {
  return mu.cost == 0.0 && mu.support.size() == 1 && mu.support[0].weight == 1.0 &&
         linf_distance(mu.support[0].posterior.probs(), prior.value.probs()) <= 1e-12;
}

Posterior technology_mean(const Technology& mu) {
  if (mu.support.empty()) {
    throw Error(Errc::InvalidArgument, "technology_mean: empty support");
  }
  const std::size_t n = mu.support[0].posterior.size();
  std::vector<double> mean(n, 0.0);
  for (const auto& [rho, w] : mu.support) {
    for (std::size_t i = 0; i < n; ++i) mean[i] += w * rho[i];
  }
  return Posterior::trusted(std::move(mean));
}

TechnologyReport validate_technology(const Technology& mu, const Prior& prior) {
  TechnologyReport report;
  auto flag = [&report](std::string problem) {
    report.pass = false;
    report.problems.push_back(std::move(problem));
  };

  if (mu.support.empty()) {
    flag("support is empty");
    return report;
  }
  if (!(mu.cost >= 0.0) || !std::isfinite(mu.cost)) {
    flag("cost must be a nonnegative finite number");
  }

  const std::size_t n = prior.value.size();
  double weight_sum = 0.0;
  for (std::size_t i = 0; i < mu.support.size(); ++i) {
    const auto& [rho, w] = mu.support[i];
    if (rho.size() != n) flag(format_index("posterior dimension mismatch at support", i));
    if (!(w >= 0.0)) flag(format_index("negative weight at support", i));
    weight_sum += w;
  }
  if (!(std::fabs(weight_sum - 1.0) <= kSumTolerance)) {
    char buf[96];
    std::snprintf(buf, sizeof(buf), "weights sum to %.17g, expected 1", weight_sum);
    flag(buf);
  }
  for (std::size_t i = 0; i < mu.support.size(); ++i) {
    for (std::size_t j = i + 1; j < mu.support.size(); ++j) {
      if (mu.support[i].posterior.size() == mu.support[j].posterior.size() &&
          linf_distance(mu.support[i].posterior.probs(), mu.support[j].posterior.probs()) <= 1e-12) {
        char buf[96];
        std::snprintf(buf, sizeof(buf), "duplicate support points at indices %zu and %zu", i, j);
        flag(buf);
      }
    }
  }
  if (report.pass) {
    const Posterior mean = technology_mean(mu);
    for (std::size_t i = 0; i < n; ++i) {
      if (std::fabs(mean[i] - prior.value[i]) > kMeanTolerance) {
        char buf[128];
        std::snprintf(buf, sizeof(buf), "not mean-preserving: mean[%zu] = %.17g, prior[%zu] = %.17g",
                      i, mean[i], i, prior.value[i]);
        flag(buf);
        break;
      }
    }
  }
  return report;
}

namespace {

void fill_grid(std::size_t coordinate, std::size_t n, std::size_t remaining, double step,
               std::vector<double>& point, std::vector<Posterior>& out) {
  if (coordinate + 1 == n) {
    point[coordinate] = static_cast<double>(remaining) * step;
    out.push_back(Posterior::trusted(point));
    return;
  }
  for (std::size_t units = 0; units <= remaining; ++units) {
    point[coordinate] = static_cast<double>(units) * step;
    fill_grid(coordinate + 1, n, remaining - units, step, point, out);
  }
}

}  // namespace

std::vector<Posterior> simplex_grid(std::size_t n, double step) {
  if (n < 2) throw Error(Errc::TooFewOutcomes, "simplex_grid needs n >= 2");
  if (!(step > 0.0) || step > 1.0) throw Error(Errc::InvalidStep, "step must be in (0, 1]");
  const auto parts = static_cast<std::size_t>(std::llround(1.0 / step));
  if (parts < 1 || std::fabs(static_cast<double>(parts) * step - 1.0) > kSumTolerance) {
    throw Error(Errc::InvalidStep, "step must divide 1 into a whole number of parts");
  }
  std::vector<Posterior> out;
  std::vector<double> point(n, 0.0);
  fill_grid(0, n, parts, step, point, out);
  return out;
}

double dot(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

double linf_distance(std::span<const double> a, std::span<const double> b) {
  double d = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) d = std::max(d, std::fabs(a[i] - b[i]));
  return d;
}

}  // namespace elicit
