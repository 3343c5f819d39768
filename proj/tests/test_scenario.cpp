#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "elicit/auction.hpp"
#include "elicit/cli.hpp"
#include "elicit/scenario_io.hpp"

using namespace elicit;

namespace {

std::string scenario_path(const std::string& name) {
  return std::string(SCENARIO_DIR) + "/" + name;
}

std::string data_path(const std::string& name) {
  return std::string(TEST_DATA_DIR) + "/" + name;
}

std::string slurp(const std::filesystem::path& path) {
  std::ifstream in(path);
  REQUIRE(in);
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

Errc parse_failure(const std::string& text, std::string* message = nullptr) {
  try {
    parse_scenario(text, "test");
  } catch (const Error& e) {
    if (message) *message = e.what();
    return e.code();
  }
  FAIL("expected a scenario error");
  return Errc::ParseError;
}

std::string valid_scenario_text() { return slurp(scenario_path("two_experts.json")); }

std::string replace_once(std::string text, const std::string& from, const std::string& to) {
  const auto pos = text.find(from);
  REQUIRE(pos != std::string::npos);
  text.replace(pos, from.size(), to);
  return text;
}

std::string drop_key(const std::string& text, const std::string& line_fragment) {
  std::istringstream in(text);
  std::ostringstream out;
  std::string line;
  while (std::getline(in, line)) {
    if (line.find(line_fragment) != std::string::npos) continue;
    out << line << '\n';
  }
  return out.str();
}

struct CaptureStdout {
  CaptureStdout() : old(std::cout.rdbuf(buffer.rdbuf())) {}
  ~CaptureStdout() { std::cout.rdbuf(old); }
  std::string text() const { return buffer.str(); }
  std::ostringstream buffer;
  std::streambuf* old;
};

}  // namespace

TEST_CASE("the bundled two-expert scenario loads with the documented values") {
  const Scenario scenario = load_scenario(scenario_path("two_experts.json"));
  CHECK(scenario.outcomes() == 2);
  CHECK(scenario.seed == 42);
  CHECK(scenario.samples == 100000);
  CHECK(scenario.reserve == 0.0);
  REQUIRE(scenario.experts.size() == 2);
  CHECK(scenario.experts[0].id == "A");
  CHECK(scenario.experts[1].id == "B");
  CHECK(expert_value(scenario.experts[0], scenario.curve).u ==
        doctest::Approx(0.12).epsilon(1e-12));
  CHECK(expert_value(scenario.experts[1], scenario.curve).u ==
        doctest::Approx(0.13).epsilon(1e-12));
  CHECK_FALSE(scenario.limits.has_value());
}

TEST_CASE("validation errors carry the offending path") {
  std::string message;

  std::string text = replace_once(valid_scenario_text(), "\"posterior\": [0.9, 0.1]",
                                  "\"posterior\": [0.9, 0.2]");
  CHECK(parse_failure(text, &message) == Errc::ValidationError);
  CHECK(message.find("experts[0].technologies[1].support[0].posterior") != std::string::npos);

  CHECK(parse_failure(drop_key(valid_scenario_text(), "\"seed\""), &message) ==
        Errc::ValidationError);
  CHECK(message.find("seed") != std::string::npos);

  CHECK(parse_failure(drop_key(valid_scenario_text(), "\"format_version\""), &message) ==
        Errc::ValidationError);
  CHECK(message.find("format_version") != std::string::npos);

  text = replace_once(valid_scenario_text(), "\"reserve\"", "\"resreve\"");
  CHECK(parse_failure(text, &message) == Errc::ValidationError);
  CHECK(message.find("resreve") != std::string::npos);

  CHECK(parse_failure("{ not json", &message) == Errc::ParseError);
}

TEST_CASE("scenario field validation") {
  const std::string base = R"({
    "format_version": 1,
    "prior": [0.5, 0.5],
    "curve": {"family": "quadratic"},
    "experts": [{"id": "A", "technologies": []}],
    "seed": 1
  })";
  CHECK(parse_scenario(base, "test").experts.size() == 1);

  const std::string one_expert = "[{\"id\": \"A\", \"technologies\": []}]";

  std::string message;
  std::string text = replace_once(base, "\"quadratic\"", "\"cubic\"");
  CHECK(parse_failure(text, &message) == Errc::ValidationError);
  CHECK(message.find("curve.family") != std::string::npos);

  CHECK(parse_failure(replace_once(base, one_expert, "[]")) == Errc::ValidationError);

  CHECK(parse_failure(replace_once(base, "\"seed\": 1", "\"seed\": -4")) ==
        Errc::ValidationError);

  text = replace_once(base, "\"seed\": 1", "\"seed\": 1, \"samples\": 0");
  CHECK(parse_failure(text, &message) == Errc::ValidationError);
  CHECK(message.find("samples") != std::string::npos);

  CHECK(parse_failure(replace_once(base, "\"seed\": 1", "\"seed\": 1, \"reserve\": -0.5")) ==
        Errc::ValidationError);

  text = replace_once(base, "\"seed\": 1", "\"seed\": 1, \"risk_limits\": {\"phi_e\": -1}");
  CHECK(parse_failure(text, &message) == Errc::ValidationError);
  CHECK(message.find("risk_limits.phi_e") != std::string::npos);

  text = replace_once(base, "\"seed\": 1",
                      "\"seed\": 1, \"risk_limits\": {\"phi_e\": \"inf\", \"phi_p\": 0.3}");
  const Scenario limited = parse_scenario(text, "test");
  REQUIRE(limited.limits.has_value());
  CHECK(std::isinf(limited.limits->phi_e));
  CHECK(limited.limits->phi_p == 0.3);

  text = replace_once(
      base, one_expert,
      "[{\"id\": \"A\", \"technologies\": []}, {\"id\": \"A\", \"technologies\": []}]");
  CHECK(parse_failure(text, &message) == Errc::ValidationError);
  CHECK(message.find("experts[1].id") != std::string::npos);

  text = replace_once(base, "{\"family\": \"quadratic\"}",
                      "{\"family\": \"action_set\", \"actions\": [[1, 0, 0]]}");
  CHECK(parse_failure(text, &message) == Errc::ValidationError);
  CHECK(message.find("curve.actions[0]") != std::string::npos);
}

TEST_CASE("every bundled scenario passes the verify command") {
  for (const std::string name :
       {"two_experts.json", "two_experts_reserve.json", "maxrisk_demo.json",
        "three_outcomes.json"}) {
    CaptureStdout capture;
    const int code = cli::run({"verify", "--scenario", scenario_path(name)});
    CHECK(code == 0);
  }
}

TEST_CASE("the concave probe fixture trips the convexity suite") {
  CaptureStdout capture;
  CHECK(cli::run({"verify", "--scenario", data_path("concave_probe.json")}) == 1);
  CHECK(cli::run({"verify", "--scenario", data_path("concave_probe.json"), "--suite",
                  "convexity"}) == 1);
  // the payment identity is curve-shape independent
  CHECK(cli::run({"verify", "--scenario", data_path("concave_probe.json"), "--suite",
                  "identity"}) == 0);
  CHECK(capture.text().find("FAIL") != std::string::npos);
}

TEST_CASE("single-suite selection rejects unknown names") {
  CaptureStdout capture;
  CHECK(cli::run({"verify", "--scenario", scenario_path("two_experts.json"), "--suite",
                  "nonsense"}) == 2);
}

TEST_CASE("auction command reports the fixture outcome") {
  CaptureStdout capture;
  const int code = cli::run({"auction", "--scenario", scenario_path("two_experts.json"),
                             "--samples", "2000"});
  CHECK(code == 0);
  const std::string text = capture.text();
  CHECK(text.find("winner: B") != std::string::npos);
  CHECK(text.find("contract beta: 0.12") != std::string::npos);
  CHECK(text.find("A=0.12") != std::string::npos);
  CHECK(text.find("B=0.13") != std::string::npos);
}

TEST_CASE("auction command reports a reserve that beats every bid") {
  CaptureStdout capture;
  const std::string out = "/tmp/elicit_nosale.csv";
  CHECK(cli::run({"auction", "--scenario", scenario_path("two_experts_reserve.json"),
                  "--samples", "500", "--out", out}) == 0);
  CHECK(capture.text().find("no sale") != std::string::npos);

  // no-sale rows keep the column count, with the sale fields blank
  const auto split = [](const std::string& row) {
    std::vector<std::string> parts;
    std::string part;
    std::istringstream stream(row);
    while (std::getline(stream, part, ',')) parts.push_back(part);
    if (!row.empty() && row.back() == ',') parts.push_back("");
    return parts;
  };
  std::ifstream in(out);
  std::string line;
  std::getline(in, line);
  std::getline(in, line);
  const std::size_t header_columns = split(line).size();
  std::getline(in, line);
  const std::vector<std::string> row = split(line);
  REQUIRE(row.size() == header_columns);
  CHECK(row[0] == "0");
  for (std::size_t i = 1; i <= 6; ++i) CHECK(row[i].empty());
  CHECK(row[row.size() - 3] == "0");  // payment
  CHECK(row[row.size() - 2] == "0");  // expert profit
  CHECK(row[row.size() - 1] == "0");  // principal utility
}

TEST_CASE("a three-outcome scenario runs end to end") {
  CaptureStdout capture;
  const std::string out = "/tmp/elicit_n3.csv";
  CHECK(cli::run({"auction", "--scenario", scenario_path("three_outcomes.json"), "--samples",
                  "200", "--out", out}) == 0);
  CHECK(capture.text().find("winner: lab") != std::string::npos);

  std::ifstream in(out);
  std::string line;
  std::getline(in, line);
  std::getline(in, line);
  CHECK(line ==
        "run,winner,beta,technology,rho_1,rho_2,rho_3,outcome,payment,expert_profit,"
        "principal_utility");
}

TEST_CASE("usage errors exit with code 2") {
  CaptureStdout capture;
  CHECK(cli::run({"auction", "--scenario", scenario_path("two_experts.json"), "--samples",
                  "0"}) == 2);
  CHECK(cli::run({"auction", "--scenario", "/nonexistent/file.json"}) == 2);
  CHECK(cli::run({"plot", "curves", "--scenario", scenario_path("three_outcomes.json"),
                  "--out", "/tmp/elicit_plot_n3.csv"}) == 2);
}

TEST_CASE("auction runs are byte-identical across invocations") {
  const std::string out1 = "/tmp/elicit_det_1.csv";
  const std::string out2 = "/tmp/elicit_det_2.csv";
  CaptureStdout capture;
  REQUIRE(cli::run({"auction", "--scenario", scenario_path("two_experts.json"), "--samples",
                    "500", "--out", out1}) == 0);
  REQUIRE(cli::run({"auction", "--scenario", scenario_path("two_experts.json"), "--samples",
                    "500", "--out", out2}) == 0);
  CHECK(slurp(out1) == slurp(out2));
  CHECK(slurp(out1).find("# elicit auction records v1") == 0);

  // a different seed changes the realized records
  const std::string out3 = "/tmp/elicit_det_3.csv";
  REQUIRE(cli::run({"auction", "--scenario", scenario_path("two_experts.json"), "--samples",
                    "500", "--seed", "43", "--out", out3}) == 0);
  CHECK(slurp(out1) != slurp(out3));
}

TEST_CASE("plot emits the documented sweeps") {
  CaptureStdout capture;
  const std::string curves_csv = "/tmp/elicit_plot_curves.csv";
  REQUIRE(cli::run({"plot", "curves", "--scenario", scenario_path("two_experts.json"), "--beta",
                    "0,0.1,0.2", "--out", curves_csv}) == 0);
  std::ifstream in(curves_csv);
  std::string line;
  std::getline(in, line);
  CHECK(line == "# elicit plot curves v1");
  std::getline(in, line);
  CHECK(line == "rho,P_0,P_0.1,P_0.2");
  std::size_t rows = 0;
  while (std::getline(in, line)) {
    double rho = 0.0, p0 = 0.0, p1 = 0.0, p2 = 0.0;
    REQUIRE(std::sscanf(line.c_str(), "%lf,%lf,%lf,%lf", &rho, &p0, &p1, &p2) == 4);
    CHECK(std::fabs((p0 - p1) - 0.1) <= 1e-13);
    CHECK(std::fabs((p0 - p2) - 0.2) <= 1e-13);
    ++rows;
  }
  CHECK(rows == 101);

  const std::string pay_csv = "/tmp/elicit_plot_payments.csv";
  REQUIRE(cli::run({"plot", "payments", "--scenario", scenario_path("two_experts.json"),
                    "--report", "0.9", "--out", pay_csv}) == 0);
  std::ifstream pin(pay_csv);
  std::getline(pin, line);
  std::getline(pin, line);
  double first_payment = 0.0, last_payment = 0.0, rho = 0.0;
  while (std::getline(pin, line)) {
    double payment = 0.0;
    REQUIRE(std::sscanf(line.c_str(), "%lf,%lf", &rho, &payment) == 2);
    if (rho == 0.0) first_payment = payment;
    if (rho == 1.0) last_payment = payment;
  }
  CHECK(first_payment == doctest::Approx(-1.12).epsilon(1e-9));
  CHECK(last_payment == doctest::Approx(0.48).epsilon(1e-9));

  const std::string risk_csv = "/tmp/elicit_plot_maxrisk.csv";
  REQUIRE(cli::run({"plot", "maxrisk", "--scenario", scenario_path("maxrisk_demo.json"), "--out",
                    risk_csv}) == 0);
  std::ifstream rin(risk_csv);
  std::getline(rin, line);
  std::getline(rin, line);
  double lo = 2.0, hi = -1.0;
  while (std::getline(rin, line)) {
    double p1 = 0.0, p2 = 0.0;
    int allowed = 0;
    REQUIRE(std::sscanf(line.c_str(), "%lf,%lf,%lf,%d", &rho, &p1, &p2, &allowed) == 4);
    if (allowed == 1) {
      lo = std::min(lo, rho);
      hi = std::max(hi, rho);
    }
  }
  CHECK(std::fabs(lo - 0.2929) <= 0.011);
  CHECK(std::fabs(hi - 0.7071) <= 0.011);
}

TEST_CASE("contract command prints the tangent payments") {
  CaptureStdout capture;
  REQUIRE(cli::run({"contract", "--scenario", scenario_path("two_experts.json"), "--report",
                    "0.9,0.1"}) == 0);
  std::istringstream lines(capture.text());
  std::string line;
  double pay1 = 0.0, pay2 = 0.0;
  while (std::getline(lines, line)) {
    std::sscanf(line.c_str(), "payment if outcome 1: %lf", &pay1);
    std::sscanf(line.c_str(), "payment if outcome 2: %lf", &pay2);
  }
  CHECK(pay1 == doctest::Approx(0.48).epsilon(1e-9));
  CHECK(pay2 == doctest::Approx(-1.12).epsilon(1e-9));
}

TEST_CASE("maxrisk command prints the admissible range and restricted bids") {
  CaptureStdout capture;
  REQUIRE(cli::run({"maxrisk", "--scenario", scenario_path("maxrisk_demo.json")}) == 0);
  const std::string text = capture.text();
  CHECK(text.find("0.292893") != std::string::npos);
  CHECK(text.find("0.707107") != std::string::npos);
  CHECK(text.find("restricted bid 0") != std::string::npos);
}
