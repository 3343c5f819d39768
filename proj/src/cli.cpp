#include "elicit/cli.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <set>

#include "CLI11.hpp"
#include "elicit/auction.hpp"
#include "elicit/oracle.hpp"
#include "elicit/scenario_io.hpp"

namespace elicit::cli {

namespace {

constexpr double kTolerance = 1e-9;

std::string g17(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::string g6(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.6g", v);
  return buf;
}

double default_grid_step(std::size_t n) {
  if (n == 2) return 0.01;
  if (n == 3) return 0.05;
  return 0.1;
}

std::ofstream open_out(const std::string& path) {
  std::ofstream out(path);
  if (!out) throw Error(Errc::ValidationError, path + ": cannot open for writing");
  return out;
}

struct CommonFlags {
  std::string scenario_path;
  std::optional<std::uint64_t> seed;
  std::optional<std::uint64_t> samples;
  std::optional<double> grid_step;
  std::string out_path;
};

Scenario load(const CommonFlags& flags) {
  Scenario scenario = load_scenario(flags.scenario_path);
  if (flags.seed) scenario.seed = *flags.seed;
  if (flags.samples) scenario.samples = *flags.samples;
  return scenario;
}

// ---------------------------------------------------------------- auction --

void write_run_records(const Scenario& scenario, std::ostream& out) {
  const std::size_t n = scenario.outcomes();
  out << "# elicit auction records v1\n";
  out << "run,winner,beta,technology";
  for (std::size_t i = 1; i <= n; ++i) out << ",rho_" << i;
  out << ",outcome,payment,expert_profit,principal_utility\n";

  const Rng master(scenario.seed);
  for (std::size_t i = 0; i < scenario.samples; ++i) {
    Rng run_rng = master.fork(i);
    const MechanismResult run = run_mechanism(scenario, run_rng);
    out << i << ',';
    if (run.outcome.sale()) {
      out << scenario.experts[*run.outcome.winner].id << ',' << g17(run.outcome.contract_beta)
          << ',' << *run.technology;
      for (std::size_t k = 0; k < n; ++k) out << ',' << g17((*run.report)[k]);
      out << ',' << *run.event_outcome;
    } else {
      out << ",,";
      for (std::size_t k = 0; k < n; ++k) out << ',';
      out << ',';
    }
    out << ',' << g17(run.payment) << ',' << g17(run.expert_profit_sample) << ','
        << g17(run.principal_utility_sample) << '\n';
  }
}

int cmd_auction(const CommonFlags& flags) {
  const Scenario scenario = load(flags);

  std::cout << "scenario: " << (scenario.name.empty() ? flags.scenario_path : scenario.name)
            << " (seed " << scenario.seed << ", " << scenario.samples << " runs)\n";

  std::cout << "expert values:";
  for (const Expert& expert : scenario.experts) {
    std::cout << ' ' << expert.id << '=' << g6(expert_value(expert, scenario.curve).u);
  }
  std::cout << '\n';

  const Rng master(scenario.seed);
  Rng first_rng = master.fork(0);
  const MechanismResult first = run_mechanism(scenario, first_rng);

  if (first.outcome.sale()) {
    const std::string& setter = first.outcome.price_setter.expert;
    std::cout << "winner: " << scenario.experts[*first.outcome.winner].id
              << "  contract beta: " << g6(first.outcome.contract_beta) << "  price set by: "
              << (setter.empty() ? std::string("reserve") : setter) << '\n';
  } else {
    std::cout << "no sale: reserve " << g6(scenario.reserve) << " exceeds every bid\n";
  }

  const double predicted = first.outcome.sale() ? first.outcome.contract_beta : 0.0;
  std::cout << "predicted principal utility: " << g6(predicted) << '\n';

  const UtilityEstimate estimate =
      estimate_principal_utility(scenario, scenario.samples, master);
  std::cout << "empirical principal utility: " << g6(estimate.mean) << " +/- "
            << g6(estimate.ci_half_width) << " (99% CI, " << estimate.samples << " runs)\n";

  if (!flags.out_path.empty()) {
    std::ofstream out = open_out(flags.out_path);
    write_run_records(scenario, out);
    std::cout << "wrote " << scenario.samples << " run records to " << flags.out_path << '\n';
  }
  return 0;
}

// ----------------------------------------------------------------- verify --

struct SuiteResult {
  bool pass = true;
  std::string detail;
};

SuiteResult suite_convexity(const Scenario& scenario) {
  const ConvexityReport report =
      check_convexity(scenario.curve, 10000, Rng(scenario.seed).fork(0x636e7678).seed());
  return {report.pass, "worst violation " + g6(report.worst_violation) + " over 10000 triples"};
}

SuiteResult suite_identity(const Scenario& scenario, double step) {
  double worst = 0.0;
  const std::vector<Posterior> grid = simplex_grid(scenario.outcomes(), step);
  for (double beta : {0.0, 0.1, 0.37}) {
    const Contract contract{shift(scenario.curve, beta)};
    for (const Posterior& report : grid) {
      const PaymentVector pv = payment_vector(contract, report);
      worst = std::max(worst,
                       std::fabs(expected_payment(pv, report) - contract.curve.eval(report)));
    }
  }
  return {worst <= kTolerance, "worst expected-payment gap " + g6(worst)};
}

SuiteResult suite_properness(const Scenario& scenario, double step) {
  const Contract contract{shift(scenario.curve, 0.0)};
  const PropernessReport report = check_properness(contract, step);
  if (!report.pass) {
    return {false, "misreport gains " + g6(report.worst_violation)};
  }
  // cross-check: brute force must steer every grid belief back to itself
  double worst_distance = 0.0;
  for (const Posterior& belief : simplex_grid(scenario.outcomes(), step)) {
    const oracle::BestReport best = oracle::brute_force_best_report(contract.curve, belief, step);
    worst_distance = std::max(worst_distance, linf_distance(best.report.probs(), belief.probs()));
  }
  if (worst_distance > step / 2.0 + 1e-12) {
    return {false, "brute-force best report drifted " + g6(worst_distance) + " from the belief"};
  }
  return {true, "worst misreport gain " + g6(report.worst_violation) + ", oracle agrees"};
}

SuiteResult suite_dominant_strategy(const Scenario& scenario) {
  std::set<double> grid{0.0, 1.0};
  double top = 0.0;
  for (const Expert& expert : scenario.experts) {
    const double u = expert_value(expert, scenario.curve).u;
    grid.insert(u);
    grid.insert(u / 2.0);
    grid.insert(u + 0.07);
    top = std::max(top, u);
  }
  grid.insert(2.0 * top + 0.1);
  grid.insert(scenario.reserve);
  const std::vector<double> bids(grid.begin(), grid.end());

  double worst = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < scenario.experts.size(); ++i) {
    worst = std::max(worst, check_dominant_strategy(scenario, i, bids));
  }
  return {worst <= kTolerance,
          "max deviation gain " + g6(worst) + " over " + std::to_string(bids.size()) + " bids"};
}

SuiteResult suite_uniqueness(const Scenario& scenario, double step) {
  if (!scenario.curve.differentiable()) {
    return {true, "skipped: kinked curve, supporting hyperplanes are not unique"};
  }
  const std::size_t n = scenario.outcomes();
  // an interior report half way between the prior and a vertex
  std::vector<double> mix(n);
  for (std::size_t i = 0; i < n; ++i) {
    mix[i] = 0.5 * scenario.prior.value[i] + (i == 0 ? 0.5 : 0.0);
  }
  const Posterior report = make_posterior(mix);
  const Contract contract{shift(scenario.curve, 0.0)};
  const PaymentVector tangent = payment_vector(contract, report);
  const double search_step = std::min(step, 0.01);

  Rng rng = Rng(scenario.seed).fork(0x756e6971);
  const int kAlternatives = 20;
  for (int k = 0; k < kAlternatives; ++k) {
    // random direction orthogonal to the report, scaled to land well away
    // from the tangent payments
    std::vector<double> direction(n);
    double norm = 0.0;
    do {
      for (double& d : direction) d = rng.uniform01() - 0.5;
      const double along = dot(direction, report.probs()) / dot(report.probs(), report.probs());
      norm = 0.0;
      for (std::size_t i = 0; i < n; ++i) {
        direction[i] -= along * report[i];
        norm = std::max(norm, std::fabs(direction[i]));
      }
    } while (norm < 1e-3);
    const double scale = (0.1 + 0.5 * rng.uniform01()) / norm;
    std::vector<double> alt(n);
    for (std::size_t i = 0; i < n; ++i) alt[i] = tangent.payments[i] + scale * direction[i];

    const UniquenessResult result = verify_uniqueness(contract, report, alt, search_step);
    if (result.kind != UniquenessResult::Kind::Counterexample) {
      return {false, "alternative " + std::to_string(k) + " was not refuted"};
    }
  }
  return {true, std::to_string(kAlternatives) + "/" + std::to_string(kAlternatives) +
                    " twisted payment vectors refuted"};
}

SuiteResult suite_maxrisk_bounds(const Scenario& scenario) {
  if (scenario.outcomes() != 2) return {true, "skipped: bounds are binary-only"};
  // the tangency solver leans on convexity; a curve that flunks that audit
  // has nothing meaningful to agree about
  if (!check_convexity(scenario.curve, 2000, Rng(scenario.seed).fork(0x70726570).seed()).pass) {
    return {true, "skipped: curve is not convex"};
  }
  Rng rng = Rng(scenario.seed).fork(0x6d726973);
  constexpr double kStep = 1e-4;
  const int kConfigs = 20;
  double worst = 0.0;
  for (int k = 0; k < kConfigs; ++k) {
    const double beta = 0.4 * rng.uniform01();
    RiskLimits limits;
    if (rng.uniform01() < 0.8) limits.phi_e = 2.0 * rng.uniform01();
    if (rng.uniform01() < 0.5) limits.phi_p = 0.05 + 1.95 * rng.uniform01();
    const ReportInterval solved = binary_report_bounds(scenario.curve, beta, limits);
    const ReportInterval scanned =
        oracle::brute_force_report_bounds(scenario.curve, beta, limits, kStep);
    if (solved.empty || scanned.empty) {
      // a sliver narrower than the scan step can legitimately vanish from the scan
      const bool agree = (solved.empty && scanned.empty) ||
                         (scanned.empty && solved.rho_max - solved.rho_min <= 2.0 * kStep);
      if (!agree) return {false, "config " + std::to_string(k) + ": emptiness disagrees"};
      continue;
    }
    worst = std::max({worst, std::fabs(solved.rho_min - scanned.rho_min),
                      std::fabs(solved.rho_max - scanned.rho_max)});
  }
  if (worst > kStep + 1e-9) {
    return {false, "bounds disagree by " + g6(worst)};
  }
  return {true, "root solver and scan agree within " + g6(kStep) + " on " +
                    std::to_string(kConfigs) + " configs"};
}

int cmd_verify(const CommonFlags& flags, const std::string& suite_filter) {
  const Scenario scenario = load(flags);
  const double step = flags.grid_step.value_or(default_grid_step(scenario.outcomes()));

  const std::vector<std::pair<std::string, std::function<SuiteResult()>>> suites = {
      {"convexity", [&] { return suite_convexity(scenario); }},
      {"identity", [&] { return suite_identity(scenario, step); }},
      {"properness", [&] { return suite_properness(scenario, step); }},
      {"dominant-strategy", [&] { return suite_dominant_strategy(scenario); }},
      {"uniqueness", [&] { return suite_uniqueness(scenario, step); }},
      {"maxrisk-bounds", [&] { return suite_maxrisk_bounds(scenario); }},
  };

  if (!suite_filter.empty() &&
      std::none_of(suites.begin(), suites.end(),
                   [&](const auto& s) { return s.first == suite_filter; })) {
    std::cerr << "unknown suite \"" << suite_filter << "\"\n";
    return 2;
  }

  bool all_pass = true;
  for (const auto& [name, runner] : suites) {
    if (!suite_filter.empty() && name != suite_filter) continue;
    const SuiteResult result = runner();
    all_pass = all_pass && result.pass;
    std::cout << name << std::string(name.size() < 18 ? 18 - name.size() : 1, ' ')
              << (result.pass ? "pass" : "FAIL") << "  " << result.detail << '\n';
  }
  return all_pass ? 0 : 1;
}

// ------------------------------------------------------------------- plot --

int cmd_plot(const CommonFlags& flags, const std::string& what, std::vector<double> betas,
             std::optional<double> report_prob) {
  const Scenario scenario = load(flags);
  if (flags.out_path.empty()) {
    throw Error(Errc::ValidationError, "plot needs --out PATH");
  }
  if (scenario.outcomes() != 2) {
    throw Error(Errc::UnsupportedForN, "scalar sweeps need a binary scenario");
  }
  if (betas.empty()) betas.push_back(0.0);
  const double step = flags.grid_step.value_or(0.01);
  const auto points = static_cast<std::size_t>(std::llround(1.0 / step));

  std::ofstream out = open_out(flags.out_path);
  const auto at = [](double rho) { return Posterior::trusted({rho, 1.0 - rho}); };

  if (what == "curves") {
    out << "# elicit plot curves v1\nrho";
    for (double beta : betas) out << ",P_" << g6(beta);
    out << '\n';
    for (std::size_t i = 0; i <= points; ++i) {
      const double rho = static_cast<double>(i) * step;
      out << g17(rho);
      for (double beta : betas) out << ',' << g17(scenario.curve.eval(at(rho)) - beta);
      out << '\n';
    }
    return 0;
  }

  if (what == "payments") {
    if (!report_prob) throw Error(Errc::ValidationError, "plot payments needs --report");
    const Contract contract{shift(scenario.curve, betas.front())};
    const Posterior report = make_posterior({*report_prob, 1.0 - *report_prob});
    out << "# elicit plot payments v1\nrho,payment\n";
    for (std::size_t i = 0; i <= points; ++i) {
      const double rho = static_cast<double>(i) * step;
      out << g17(rho) << ',' << g17(tangent_value(contract, report, at(rho))) << '\n';
    }
    return 0;
  }

  if (what == "maxrisk") {
    if (!scenario.limits) throw Error(Errc::ValidationError, "scenario has no risk_limits");
    const ShiftedCurve curve = shift(scenario.curve, betas.front());
    out << "# elicit plot maxrisk v1\nrho,payment_outcome1,payment_outcome2,allowed\n";
    for (std::size_t i = 0; i <= points; ++i) {
      const double rho = static_cast<double>(i) * step;
      const PaymentVector pv = payment_vector(Contract{curve}, at(rho));
      const bool allowed = is_report_allowed(curve, at(rho), *scenario.limits);
      out << g17(rho) << ',' << g17(pv.payments[0]) << ',' << g17(pv.payments[1]) << ','
          << (allowed ? 1 : 0) << '\n';
    }
    return 0;
  }

  throw Error(Errc::ValidationError, "unknown plot kind \"" + what + "\"");
}

// ---------------------------------------------------------------- maxrisk --

int cmd_maxrisk(const CommonFlags& flags, double beta, const std::string& rule_name) {
  const Scenario scenario = load(flags);
  if (!scenario.limits) {
    throw Error(Errc::ValidationError, "scenario has no risk_limits");
  }
  const RiskLimits& limits = *scenario.limits;
  const BidRule rule = rule_name == "argmax" ? BidRule::LiteralArgmax : BidRule::BreakEven;

  std::cout << "risk limits: phi_p=" << g6(limits.phi_p) << " phi_e=" << g6(limits.phi_e) << '\n';

  if (scenario.outcomes() == 2) {
    const ReportInterval interval = binary_report_bounds(scenario.curve, beta, limits);
    if (interval.empty) {
      std::cout << "allowed reports at beta " << g6(beta) << ": none\n";
    } else {
      std::cout << "allowed reports at beta " << g6(beta) << ": [" << g6(interval.rho_min) << ", "
                << g6(interval.rho_max) << "]\n";
    }
  }

  double vertex_top = 0.0;
  const std::size_t n = scenario.outcomes();
  for (std::size_t i = 0; i < n; ++i) {
    vertex_top = std::max(vertex_top, scenario.curve.eval(Posterior::vertex(n, i)));
  }
  const double grid_step = flags.grid_step.value_or(0.005);
  std::vector<double> beta_grid;
  for (double b = 0.0; b <= vertex_top + grid_step; b += grid_step) beta_grid.push_back(b);

  for (const Expert& expert : scenario.experts) {
    const double unrestricted = expert_value(expert, scenario.curve).u;
    const RestrictedBid bid = restricted_bid(expert, scenario.curve, limits, beta_grid, rule);
    std::cout << "expert " << expert.id << ": unrestricted bid " << g6(unrestricted)
              << ", restricted bid " << g6(bid.beta) << " (technology " << bid.technology
              << ")\n";
  }

  if (!flags.out_path.empty()) {
    if (scenario.outcomes() != 2) {
      throw Error(Errc::UnsupportedForN, "the bounds sweep needs a binary scenario");
    }
    std::ofstream out = open_out(flags.out_path);
    out << "# elicit maxrisk sweep v1\nbeta,rho_min,rho_max\n";
    for (double b : beta_grid) {
      const ReportInterval interval = binary_report_bounds(scenario.curve, b, limits);
      if (interval.empty) {
        out << g17(b) << ",,\n";
      } else {
        out << g17(b) << ',' << g17(interval.rho_min) << ',' << g17(interval.rho_max) << '\n';
      }
    }
    std::cout << "wrote bounds sweep to " << flags.out_path << '\n';
  }
  return 0;
}

// --------------------------------------------------------------- contract --

int cmd_contract(const CommonFlags& flags, const std::vector<double>& report_values, double beta) {
  const Scenario scenario = load(flags);
  Posterior report = make_posterior(report_values);
  if (report.size() != scenario.outcomes()) {
    throw Error(Errc::ValidationError, "--report length does not match the scenario outcomes");
  }
  const Contract contract{shift(scenario.curve, beta)};
  const PaymentVector pv = payment_vector(contract, report);
  std::cout << "contract at beta " << g6(beta) << ", report (";
  for (std::size_t i = 0; i < report.size(); ++i) {
    std::cout << (i ? ", " : "") << g6(report[i]);
  }
  std::cout << ")\n";
  for (std::size_t i = 0; i < pv.payments.size(); ++i) {
    std::cout << "payment if outcome " << i + 1 << ": " << g17(pv.payments[i]) << '\n';
  }
  std::cout << "expected payment at the report: " << g17(expected_payment(pv, report)) << '\n';
  return 0;
}

}  // namespace

int run(int argc, const char* const* argv) {
  CLI::App app{"auction-backed forecasting contracts simulator"};
  app.require_subcommand(1);

  CommonFlags flags;
  std::string suite_filter;
  std::string plot_what;
  std::vector<double> betas;
  std::optional<double> report_prob;
  std::vector<double> report_values;
  double beta = 0.0;
  std::string rule_name = "break-even";

  const auto add_common = [&flags](CLI::App* cmd) {
    cmd->add_option("--scenario", flags.scenario_path, "scenario file (JSON)")
        ->required()
        ->check(CLI::ExistingFile);
    cmd->add_option("--seed", flags.seed, "override the scenario seed");
    cmd->add_option("--samples", flags.samples, "override the scenario sample count")
        ->check(CLI::PositiveNumber);
    cmd->add_option("--grid-step", flags.grid_step, "grid resolution for sweeps and audits")
        ->check(CLI::PositiveNumber);
    cmd->add_option("--out", flags.out_path, "CSV output path");
  };

  CLI::App* auction = app.add_subcommand("auction", "run the mechanism end to end");
  add_common(auction);

  CLI::App* verify = app.add_subcommand("verify", "run the property audit suites");
  add_common(verify);
  verify->add_option("--suite", suite_filter,
                     "run one suite: convexity, identity, properness, dominant-strategy, "
                     "uniqueness, maxrisk-bounds");

  CLI::App* plot = app.add_subcommand("plot", "emit CSV sweeps for plotting");
  add_common(plot);
  plot->add_option("what", plot_what, "curves, payments or maxrisk")->required();
  plot->add_option("--beta", betas, "curve shifts")->delimiter(',');
  plot->add_option("--report", report_prob, "outcome-1 probability of the plotted report");

  CLI::App* maxrisk = app.add_subcommand("maxrisk", "report ranges and restricted bids");
  add_common(maxrisk);
  maxrisk->add_option("--beta", beta, "contract shift for the report range");
  maxrisk->add_option("--rule", rule_name, "restricted bid rule: break-even or argmax")
      ->check(CLI::IsMember({"break-even", "argmax"}));

  CLI::App* contract = app.add_subcommand("contract", "print the payments for one report");
  add_common(contract);
  contract->add_option("--report", report_values, "reported posterior, comma separated")
      ->required()
      ->delimiter(',');
  contract->add_option("--beta", beta, "contract shift");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    if (auction->parsed()) return cmd_auction(flags);
    if (verify->parsed()) return cmd_verify(flags, suite_filter);
    if (plot->parsed()) return cmd_plot(flags, plot_what, betas, report_prob);
    if (maxrisk->parsed()) return cmd_maxrisk(flags, beta, rule_name);
    if (contract->parsed()) return cmd_contract(flags, report_values, beta);
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  return 2;
}

int run(const std::vector<std::string>& args) {
  std::vector<const char*> argv;
  argv.reserve(args.size() + 1);
  argv.push_back("elicit");
  for (const std::string& a : args) argv.push_back(a.c_str());
  return run(static_cast<int>(argv.size()), argv.data());
}

}  // namespace elicit::cli
