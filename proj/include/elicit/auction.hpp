#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "elicit/contract.hpp"
#include "elicit/rng.hpp"
#include "elicit/scenario.hpp"

namespace elicit {

struct Bid {
  std::string expert;
  double amount = 0.0;  // the curve shift the bidder is asking for
};

struct AuctionOutcome {
  std::optional<std::size_t> winner;  // index into the bid list; empty means no sale
  double contract_beta = 0.0;         // meaningful only on a sale
  Bid price_setter;                   // the bid that set the price; empty id = the reserve
  bool sale() const { return winner.has_value(); }
};

// Highest bid wins and pays the second-highest of (bids, reserve). Ties among
// top bidders are broken uniformly; no sale only when the reserve strictly
// exceeds every bid.
AuctionOutcome run_second_price(std::span<const Bid> bids, double reserve, Rng& rng);

struct MechanismResult {
  AuctionOutcome outcome;
  std::vector<Bid> bids;                   // the truthful bids that were placed
  std::optional<std::size_t> technology;   // winner's chosen research test
  std::optional<Posterior> report;
  std::optional<std::size_t> event_outcome;
  double payment = 0.0;
  double expert_profit_sample = 0.0;       // payment minus research cost
  double principal_utility_sample = 0.0;   // curve value of the report minus payment
};

// One full pass: solicit truthful bids, clear the auction, let the winner
// research, report and get paid against the realized outcome.
MechanismResult run_mechanism(const Scenario& scenario, Rng& rng);

struct UtilityEstimate {
  double mean = 0.0;
  double ci_half_width = 0.0;  // 99% normal-approximation half width
  std::size_t samples = 0;
};

UtilityEstimate estimate_principal_utility(const Scenario& scenario, std::size_t samples,
                                           const Rng& master);

// Expert's exact expected profit from bidding `bid` when her best achievable
// value is `value`, against fixed opponent bids and reserve. Tie wins are
// averaged.
double exact_expected_profit(double value, double bid, std::span<const double> other_bids,
                             double reserve);

// Max over opponent-bid profiles (drawn exhaustively from the grid) and own
// deviations of the profit gained over truthful bidding. Exact expectations,
// no sampling.
double check_dominant_strategy(const Scenario& scenario, std::size_t expert_index,
                               std::span<const double> bid_grid);

}  // namespace elicit
