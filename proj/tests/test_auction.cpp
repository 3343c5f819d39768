#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <algorithm>
#include <cmath>

#include "elicit/auction.hpp"

using namespace elicit;

namespace {

const Prior kUniform{make_posterior({0.5, 0.5})};

Technology spread(double high, double cost) {
  return Technology{
      {{make_posterior({high, 1.0 - high}), 0.5}, {make_posterior({1.0 - high, high}), 0.5}},
      cost};
}

Scenario two_expert_scenario(double reserve = 0.0) {
  return Scenario{"two_experts",
                  kUniform,
                  PreferenceCurve::quadratic(kUniform),
                  {make_expert("A", {point_mass(kUniform.value), spread(0.9, 0.2)}, kUniform),
                   make_expert("B", {point_mass(kUniform.value), spread(0.8, 0.05)}, kUniform)},
                  reserve,
                  std::nullopt,
                  42,
                  100000};
}

Scenario idle_scenario() {
  return Scenario{"idle",
                  kUniform,
                  PreferenceCurve::quadratic(kUniform),
                  {make_expert("only", {}, kUniform)},
                  0.0,
                  std::nullopt,
                  5,
                  100000};
}

}  // namespace

TEST_CASE("second-price clearing") {
  Rng rng(1);

  const std::vector<Bid> plain = {{"x", 5.0}, {"y", 3.0}, {"z", 2.0}};
  const AuctionOutcome first = run_second_price(plain, 0.0, rng);
  REQUIRE(first.sale());
  CHECK(*first.winner == 0);
  CHECK(first.contract_beta == 3.0);
  CHECK(first.price_setter.expert == "y");

  const std::vector<Bid> close = {{"B", 0.13}, {"A", 0.12}};
  const AuctionOutcome second = run_second_price(close, 0.0, rng);
  REQUIRE(second.sale());
  CHECK(*second.winner == 0);
  CHECK(second.contract_beta == doctest::Approx(0.12));

  const AuctionOutcome no_sale = run_second_price(close, 0.2, rng);
  CHECK_FALSE(no_sale.sale());

  CHECK_FALSE(run_second_price({}, 0.0, rng).sale());
}

TEST_CASE("a bid meeting the reserve still clears, at the reserve price") {
  Rng rng(1);
  const std::vector<Bid> bids = {{"solo", 0.2}};
  const AuctionOutcome outcome = run_second_price(bids, 0.2, rng);
  REQUIRE(outcome.sale());
  CHECK(outcome.contract_beta == 0.2);
  CHECK(outcome.price_setter.expert.empty());
}

TEST_CASE("top-bid ties are broken uniformly by the stream") {
  const std::vector<Bid> bids = {{"x", 0.4}, {"y", 0.4}};
  std::size_t first_wins = 0;
  for (std::uint64_t seed = 0; seed < 1000; ++seed) {
    Rng rng(seed);
    const AuctionOutcome outcome = run_second_price(bids, 0.0, rng);
    REQUIRE(outcome.sale());
    CHECK(outcome.contract_beta == 0.4);
    if (*outcome.winner == 0) ++first_wins;
  }
  CHECK(first_wins > 400);
  CHECK(first_wins < 600);
}

TEST_CASE("price equals the second order statistic of bids plus reserve") {
  Rng value_rng(77);
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<Bid> bids;
    const std::size_t count = 1 + value_rng.uniform_below(4);
    for (std::size_t i = 0; i < count; ++i) {
      bids.push_back(Bid{"e" + std::to_string(i),
                         0.1 * static_cast<double>(value_rng.uniform_below(6))});
    }
    const double reserve = 0.1 * static_cast<double>(value_rng.uniform_below(4));

    Rng tie_rng(trial);
    const AuctionOutcome outcome = run_second_price(bids, reserve, tie_rng);

    std::vector<double> all{reserve};
    for (const Bid& b : bids) all.push_back(b.amount);
    std::sort(all.begin(), all.end(), std::greater<>());

    const double top_bid =
        std::max_element(bids.begin(), bids.end(), [](const Bid& a, const Bid& b) {
          return a.amount < b.amount;
        })->amount;
    if (top_bid < reserve) {
      CHECK_FALSE(outcome.sale());
    } else {
      REQUIRE(outcome.sale());
      CHECK(outcome.contract_beta == all[1]);
      CHECK(bids[*outcome.winner].amount >= outcome.contract_beta);
    }
  }
}

TEST_CASE("run_mechanism clears the fixture at the second value") {
  const Scenario scenario = two_expert_scenario();
  Rng rng(123);
  const MechanismResult result = run_mechanism(scenario, rng);

  REQUIRE(result.outcome.sale());
  CHECK(scenario.experts[*result.outcome.winner].id == "B");
  CHECK(result.outcome.contract_beta == doctest::Approx(0.12).epsilon(1e-12));
  CHECK(*result.technology == 1);
  REQUIRE(result.report.has_value());
  const Technology& chosen = scenario.experts[*result.outcome.winner].technologies[1];
  bool from_support = false;
  for (const auto& [rho, weight] : chosen.support) {
    from_support = from_support || *result.report == rho;
  }
  CHECK(from_support);

  const Contract issued{shift(scenario.curve, result.outcome.contract_beta)};
  CHECK(result.payment == payment_vector(issued, *result.report).payments[*result.event_outcome]);
  CHECK(result.principal_utility_sample ==
        scenario.curve.eval(*result.report) - result.payment);
}

TEST_CASE("the winner's average profit converges to value minus price") {
  const Scenario scenario = two_expert_scenario();
  const Rng master(scenario.seed);
  double total_profit = 0.0;
  const std::size_t kRuns = 100000;
  for (std::size_t i = 0; i < kRuns; ++i) {
    Rng rng = master.fork(i);
    total_profit += run_mechanism(scenario, rng).expert_profit_sample;
  }
  // B clears at A's value: 0.13 - 0.12
  CHECK(std::fabs(total_profit / kRuns - 0.01) <= 0.005);
}

TEST_CASE("degenerate runs") {
  Rng rng(9);
  const MechanismResult idle = run_mechanism(idle_scenario(), rng);
  REQUIRE(idle.outcome.sale());
  CHECK(idle.outcome.contract_beta == 0.0);
  CHECK(*idle.report == kUniform.value);
  CHECK(idle.payment == 0.0);
  CHECK(idle.principal_utility_sample == 0.0);

  Rng rng2(9);
  const MechanismResult reserved = run_mechanism(two_expert_scenario(0.2), rng2);
  CHECK_FALSE(reserved.outcome.sale());
  CHECK(reserved.principal_utility_sample == 0.0);
  CHECK(reserved.payment == 0.0);
}

TEST_CASE("principal utility estimate matches the second-best value") {
  const Scenario scenario = two_expert_scenario();
  const UtilityEstimate estimate = estimate_principal_utility(scenario, 100000, Rng(scenario.seed));
  CHECK(std::fabs(estimate.mean - 0.12) <= estimate.ci_half_width);
  CHECK(estimate.ci_half_width < 0.01);

  const UtilityEstimate zero = estimate_principal_utility(idle_scenario(), 2000, Rng(5));
  CHECK(zero.mean == 0.0);
  CHECK(zero.ci_half_width == 0.0);

  const UtilityEstimate no_sale =
      estimate_principal_utility(two_expert_scenario(0.2), 2000, Rng(5));
  CHECK(no_sale.mean == 0.0);
  CHECK(no_sale.ci_half_width == 0.0);
}

TEST_CASE("identical seeds replay bit-identical runs") {
  const Scenario scenario = two_expert_scenario();
  for (std::uint64_t seed : {1ULL, 99ULL, 31337ULL}) {
    Rng r1(seed), r2(seed);
    const MechanismResult a = run_mechanism(scenario, r1);
    const MechanismResult b = run_mechanism(scenario, r2);
    CHECK(a.outcome.winner == b.outcome.winner);
    CHECK(a.outcome.contract_beta == b.outcome.contract_beta);
    CHECK(a.technology == b.technology);
    CHECK(*a.report == *b.report);
    CHECK(a.event_outcome == b.event_outcome);
    CHECK(a.payment == b.payment);
    CHECK(a.expert_profit_sample == b.expert_profit_sample);
    CHECK(a.principal_utility_sample == b.principal_utility_sample);
  }
}

TEST_CASE("per-run accounting decomposes into the curve value minus cost") {
  const Scenario scenario = two_expert_scenario();
  const Rng master(7);
  for (std::size_t i = 0; i < 2000; ++i) {
    Rng rng = master.fork(i);
    const MechanismResult run = run_mechanism(scenario, rng);
    REQUIRE(run.outcome.sale());
    const double cost =
        scenario.experts[*run.outcome.winner].technologies[*run.technology].cost;
    const double total = run.expert_profit_sample + run.principal_utility_sample;
    CHECK(total == doctest::Approx(scenario.curve.eval(*run.report) - cost).epsilon(1e-12));
  }
}

TEST_CASE("with no reserve the best expert always wins") {
  const Scenario scenario = two_expert_scenario();
  const Rng master(11);
  for (std::size_t i = 0; i < 200; ++i) {
    Rng rng = master.fork(i);
    const MechanismResult run = run_mechanism(scenario, rng);
    CHECK(scenario.experts[*run.outcome.winner].id == "B");
  }
}

TEST_CASE("exact expected profits follow the case analysis") {
  // value above the field: win at the second price
  CHECK(exact_expected_profit(0.12, 0.12, std::vector<double>{0.05}, 0.0) ==
        doctest::Approx(0.07).epsilon(1e-12));
  // value below the field: truthful loses, overbidding buys a loss
  CHECK(exact_expected_profit(0.12, 0.12, std::vector<double>{0.2}, 0.0) == 0.0);
  CHECK(exact_expected_profit(0.12, 0.3, std::vector<double>{0.2}, 0.0) ==
        doctest::Approx(-0.08).epsilon(1e-12));
  // tie at the top: the win averages over the tied bidders
  CHECK(exact_expected_profit(0.3, 0.2, std::vector<double>{0.2}, 0.0) ==
        doctest::Approx(0.05).epsilon(1e-12));
}

TEST_CASE("no bid beats truthful bidding on the fixture grid") {
  const Scenario scenario = two_expert_scenario();
  const std::vector<double> grid = {0.0, 0.05, 0.12, 0.13, 0.2, 1.0};
  for (std::size_t i = 0; i < scenario.experts.size(); ++i) {
    CHECK(check_dominant_strategy(scenario, i, grid) <= 1e-9);
  }
}

TEST_CASE("truthful play keeps everyone at or above zero") {
  for (double reserve : {0.0, 0.05, 0.125, 0.2}) {
    const Scenario scenario = two_expert_scenario(reserve);
    const UtilityEstimate principal =
        estimate_principal_utility(scenario, 5000, Rng(scenario.seed));
    CHECK(principal.mean >= -1e-12);

    Rng rng(3);
    const MechanismResult run = run_mechanism(scenario, rng);
    if (run.outcome.sale()) {
      const double winner_value = truthful_bid(scenario.experts[*run.outcome.winner],
                                               scenario.curve);
      CHECK(winner_value - run.outcome.contract_beta >= -1e-12);
    }
  }
}
