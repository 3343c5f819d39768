#include "elicit/auction.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace elicit {

namespace {

// named sub-streams so every random draw can be replayed in isolation
constexpr std::uint64_t kTieStream = 0x7469650aULL;
constexpr std::uint64_t kPosteriorStream = 0x72686f0aULL;
constexpr std::uint64_t kOutcomeStream = 0x6f75740aULL;

}  // namespace

AuctionOutcome run_second_price(std::span<const Bid> bids, double reserve, Rng& rng) {
  if (!std::isfinite(reserve)) {
    throw Error(Errc::InvalidArgument, "reserve must be finite");
  }
  for (const Bid& b : bids) {
    if (!std::isfinite(b.amount)) {
      throw Error(Errc::InvalidArgument, "bid from " + b.expert + " is not finite");
    }
  }

  AuctionOutcome outcome;
  outcome.price_setter = Bid{"", reserve};
  if (bids.empty()) return outcome;

  double top = bids[0].amount;
  for (const Bid& b : bids) top = std::max(top, b.amount);
  if (top < reserve) return outcome;  // the virtual bid wins: no sale

  std::vector<std::size_t> tied;
  for (std::size_t i = 0; i < bids.size(); ++i) {
    if (bids[i].amount == top) tied.push_back(i);
  }
  const std::size_t winner = tied.size() == 1 ? tied[0] : tied[rng.uniform_below(tied.size())];

  double price = reserve;
  std::optional<std::size_t> setter;
  for (std::size_t i = 0; i < bids.size(); ++i) {
    if (i == winner) continue;
    if (bids[i].amount >= price) {
      price = bids[i].amount;
      setter = i;
    }
  }

  outcome.winner = winner;
  outcome.contract_beta = price;
  if (setter) outcome.price_setter = bids[*setter];
  return outcome;
}

MechanismResult run_mechanism(const Scenario& scenario, Rng& rng) {
  if (scenario.experts.empty()) {
    throw Error(Errc::ValidationError, "scenario has no experts");
  }

  MechanismResult result;
  result.bids.reserve(scenario.experts.size());
  for (const Expert& expert : scenario.experts) {
    result.bids.push_back(Bid{expert.id, truthful_bid(expert, scenario.curve)});
  }

  Rng tie_rng = rng.fork(kTieStream);
  result.outcome = run_second_price(result.bids, scenario.reserve, tie_rng);
  if (!result.outcome.sale()) return result;

  const Expert& winner = scenario.experts[*result.outcome.winner];
  const ExpertValue choice = expert_value(winner, scenario.curve);
  result.technology = choice.best;

  Rng posterior_rng = rng.fork(kPosteriorStream);
  const Posterior rho = realize_posterior(winner, choice.best, posterior_rng);
  result.report = rho;

  const Contract contract{shift(scenario.curve, result.outcome.contract_beta)};
  const PaymentVector pv = payment_vector(contract, rho);

  Rng outcome_rng = rng.fork(kOutcomeStream);
  const std::size_t realized = outcome_rng.pick_weighted(rho.probs());
  result.event_outcome = realized;

  result.payment = pv.payments[realized];
  result.expert_profit_sample = result.payment - winner.technologies[choice.best].cost;
  result.principal_utility_sample = scenario.curve.eval(rho) - result.payment;
  return result;
}

UtilityEstimate estimate_principal_utility(const Scenario& scenario, std::size_t samples,
                                           const Rng& master) {
  if (samples < 1) throw Error(Errc::InvalidArgument, "need at least one sample");

  // compensated sums keep the aggregate independent of accumulation order
  double sum = 0.0, sum_c = 0.0;
  double sq = 0.0, sq_c = 0.0;
  auto add = [](double& acc, double& carry, double x) {
    const double y = x - carry;
    const double t = acc + y;
    carry = (t - acc) - y;
    acc = t;
  };
  for (std::size_t i = 0; i < samples; ++i) {
    Rng run_rng = master.fork(i);
    const MechanismResult run = run_mechanism(scenario, run_rng);
    add(sum, sum_c, run.principal_utility_sample);
    add(sq, sq_c, run.principal_utility_sample * run.principal_utility_sample);
  }

  const double n = static_cast<double>(samples);
  const double mean = sum / n;
  const double variance = samples > 1 ? std::max(0.0, (sq - n * mean * mean) / (n - 1.0)) : 0.0;
  constexpr double kZ99 = 2.5758293035489004;  // two-sided 99% normal quantile
  return UtilityEstimate{mean, kZ99 * std::sqrt(variance / n), samples};
}

double exact_expected_profit(double value, double bid, std::span<const double> other_bids,
                             double reserve) {
  double top_other = reserve;
  std::size_t tied_bids = 0;  // other *bids* at top_other (the reserve never ties)
  for (double b : other_bids) {
    if (b > top_other) {
      top_other = b;
      tied_bids = 1;
    } else if (b == top_other) {
      tied_bids += 1;
    }
  }
  if (bid < top_other) return 0.0;
  if (bid > top_other) return value - top_other;
  if (tied_bids == 0) return value - top_other;  // alone at the reserve: still a sale
  return (value - top_other) / static_cast<double>(tied_bids + 1);
}

double check_dominant_strategy(const Scenario& scenario, std::size_t expert_index,
                               std::span<const double> bid_grid) {
  if (bid_grid.empty()) throw Error(Errc::InvalidArgument, "bid grid is empty");
  if (expert_index >= scenario.experts.size()) {
    throw Error(Errc::IndexOutOfRange, "no expert at index " + std::to_string(expert_index));
  }
  const double value = truthful_bid(scenario.experts[expert_index], scenario.curve);
  const std::size_t opponents = scenario.experts.size() - 1;

  double profiles = 1.0;
  for (std::size_t i = 0; i < opponents; ++i) profiles *= static_cast<double>(bid_grid.size());
  if (profiles > 2e6) {
    throw Error(Errc::InvalidArgument, "opponent profile space is too large to enumerate");
  }

  double max_gain = -std::numeric_limits<double>::infinity();
  std::vector<double> profile(opponents, 0.0);
  std::vector<std::size_t> pick(opponents, 0);
  while (true) {
    for (std::size_t i = 0; i < opponents; ++i) profile[i] = bid_grid[pick[i]];
    const double truthful = exact_expected_profit(value, value, profile, scenario.reserve);
    for (double deviation : bid_grid) {
      const double gain =
          exact_expected_profit(value, deviation, profile, scenario.reserve) - truthful;
      max_gain = std::max(max_gain, gain);
    }
    std::size_t digit = 0;
    while (digit < opponents && ++pick[digit] == bid_grid.size()) {
      pick[digit] = 0;
      ++digit;
    }
    if (digit == opponents) break;
  }
  return max_gain;
}

}  // namespace elicit
