#include "elicit/scenario_io.hpp"

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "json.hpp"

namespace elicit {

namespace {

using nlohmann::json;

[[noreturn]] void fail(const std::string& path, const std::string& message) {
  throw Error(Errc::ValidationError, path.empty() ? message : path + ": " + message);
}

void reject_unknown_keys(const json& j, const std::string& path,
                         const std::set<std::string>& allowed) {
  for (const auto& [key, value] : j.items()) {
    if (!allowed.contains(key)) {
      fail(path.empty() ? key : path + "." + key, "unknown key");
    }
  }
}

double require_number(const json& j, const std::string& path) {
  if (!j.is_number()) fail(path, "expected a number");
  return j.get<double>();
}

std::vector<double> require_number_array(const json& j, const std::string& path) {
  if (!j.is_array()) fail(path, "expected an array of numbers");
  std::vector<double> out;
  out.reserve(j.size());
  for (std::size_t i = 0; i < j.size(); ++i) {
    out.push_back(require_number(j[i], path + "[" + std::to_string(i) + "]"));
  }
  return out;
}

Posterior require_posterior(const json& j, const std::string& path) {
  std::vector<double> values = require_number_array(j, path);
  try {
    return make_posterior(std::move(values));
  } catch (const Error& e) {
    fail(path, e.what());
  }
}

double parse_limit(const json& j, const std::string& path) {
  if (j.is_string() && (j == "inf" || j == "infinity")) {
    return std::numeric_limits<double>::infinity();
  }
  const double v = require_number(j, path);
  if (!(v >= 0.0)) fail(path, "limit must be nonnegative (or \"inf\")");
  return v;
}

PreferenceCurve parse_curve(const json& j, const Prior& prior, const std::string& path) {
  if (!j.is_object()) fail(path, "expected an object");
  reject_unknown_keys(j, path, {"family", "actions"});
  if (!j.contains("family") || !j["family"].is_string()) {
    fail(path + ".family", "expected a string");
  }
  const std::string family = j["family"].get<std::string>();
  if (family == "quadratic") {
    return PreferenceCurve::quadratic(prior);
  }
  if (family == "concave_probe") {
    return PreferenceCurve::concave_probe(prior);
  }
  if (family == "action_set") {
    if (!j.contains("actions") || !j["actions"].is_array() || j["actions"].empty()) {
      fail(path + ".actions", "expected a nonempty array of payoff vectors");
    }
    std::vector<std::vector<double>> actions;
    for (std::size_t i = 0; i < j["actions"].size(); ++i) {
      const std::string action_path = path + ".actions[" + std::to_string(i) + "]";
      actions.push_back(require_number_array(j["actions"][i], action_path));
      if (actions.back().size() != prior.value.size()) {
        fail(action_path, "payoff vector length does not match the outcome count");
      }
    }
    return PreferenceCurve::action_set(std::move(actions), prior);
  }
  fail(path + ".family", "unknown curve family \"" + family + "\"");
}

Technology parse_technology(const json& j, const Prior& prior, const std::string& path) {
  if (!j.is_object()) fail(path, "expected an object");
  reject_unknown_keys(j, path, {"support", "cost"});
  if (!j.contains("support") || !j["support"].is_array() || j["support"].empty()) {
    fail(path + ".support", "expected a nonempty array of weighted posteriors");
  }
  Technology mu;
  for (std::size_t i = 0; i < j["support"].size(); ++i) {
    const std::string point_path = path + ".support[" + std::to_string(i) + "]";
    const json& point = j["support"][i];
    if (!point.is_object()) fail(point_path, "expected an object");
    reject_unknown_keys(point, point_path, {"posterior", "weight"});
    if (!point.contains("posterior")) fail(point_path + ".posterior", "missing");
    if (!point.contains("weight")) fail(point_path + ".weight", "missing");
    mu.support.push_back(
        WeightedPosterior{require_posterior(point["posterior"], point_path + ".posterior"),
                          require_number(point["weight"], point_path + ".weight")});
  }
  mu.cost = j.contains("cost") ? require_number(j["cost"], path + ".cost") : 0.0;
  const TechnologyReport report = validate_technology(mu, prior);
  if (!report.pass) fail(path, report.problems[0]);
  return mu;
}

}  // namespace

Scenario parse_scenario(const std::string& text, const std::string& origin) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw Error(Errc::ParseError, origin + ": " + e.what());
  }
  if (!j.is_object()) throw Error(Errc::ParseError, origin + ": top level must be an object");

  reject_unknown_keys(j, "", {"format_version", "name", "outcomes", "prior", "curve", "experts",
                              "reserve", "risk_limits", "seed", "samples"});

  if (!j.contains("format_version") || !j["format_version"].is_number_integer() ||
      j["format_version"] != 1) {
    fail("format_version", "expected the integer 1");
  }
  if (!j.contains("prior")) fail("prior", "missing");
  Prior prior{require_posterior(j["prior"], "prior")};
  const std::size_t n = prior.value.size();

  if (j.contains("outcomes")) {
    if (!j["outcomes"].is_number_unsigned() || j["outcomes"].get<std::size_t>() != n) {
      fail("outcomes", "must match the prior's length");
    }
  }

  if (!j.contains("curve")) fail("curve", "missing");
  PreferenceCurve curve = parse_curve(j["curve"], prior, "curve");

  if (!j.contains("experts") || !j["experts"].is_array() || j["experts"].empty()) {
    fail("experts", "expected a nonempty array");
  }
  std::vector<Expert> experts;
  std::set<std::string> ids;
  for (std::size_t e = 0; e < j["experts"].size(); ++e) {
    const std::string expert_path = "experts[" + std::to_string(e) + "]";
    const json& je = j["experts"][e];
    if (!je.is_object()) fail(expert_path, "expected an object");
    reject_unknown_keys(je, expert_path, {"id", "technologies"});
    if (!je.contains("id") || !je["id"].is_string() || je["id"].get<std::string>().empty()) {
      fail(expert_path + ".id", "expected a nonempty string");
    }
    const std::string id = je["id"].get<std::string>();
    if (!ids.insert(id).second) fail(expert_path + ".id", "duplicate expert id \"" + id + "\"");

    std::vector<Technology> technologies;
    if (je.contains("technologies")) {
      if (!je["technologies"].is_array()) fail(expert_path + ".technologies", "expected an array");
      for (std::size_t t = 0; t < je["technologies"].size(); ++t) {
        technologies.push_back(parse_technology(
            je["technologies"][t], prior, expert_path + ".technologies[" + std::to_string(t) + "]"));
      }
    }
    experts.push_back(make_expert(id, std::move(technologies), prior));
  }

  std::string name;
  if (j.contains("name")) {
    if (!j["name"].is_string()) fail("name", "expected a string");
    name = j["name"].get<std::string>();
  }
  Scenario scenario{std::move(name), std::move(prior), std::move(curve), std::move(experts)};

  if (j.contains("reserve")) {
    scenario.reserve = require_number(j["reserve"], "reserve");
    if (!(scenario.reserve >= 0.0) || !std::isfinite(scenario.reserve)) {
      fail("reserve", "must be a nonnegative finite number");
    }
  }
  if (j.contains("risk_limits")) {
    const json& jl = j["risk_limits"];
    if (!jl.is_object()) fail("risk_limits", "expected an object");
    reject_unknown_keys(jl, "risk_limits", {"phi_p", "phi_e"});
    RiskLimits limits;
    if (jl.contains("phi_p")) limits.phi_p = parse_limit(jl["phi_p"], "risk_limits.phi_p");
    if (jl.contains("phi_e")) limits.phi_e = parse_limit(jl["phi_e"], "risk_limits.phi_e");
    scenario.limits = limits;
  }
  if (!j.contains("seed") || !j["seed"].is_number_unsigned()) {
    fail("seed", "expected an unsigned integer (scenarios are never clock-seeded)");
  }
  scenario.seed = j["seed"].get<std::uint64_t>();
  if (j.contains("samples")) {
    if (!j["samples"].is_number_unsigned() || j["samples"].get<std::size_t>() < 1) {
      fail("samples", "expected a positive integer");
    }
    scenario.samples = j["samples"].get<std::size_t>();
  }
  return scenario;
}

Scenario load_scenario(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) {
    throw Error(Errc::ParseError, path.string() + ": cannot open file");
  }
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return parse_scenario(buffer.str(), path.string());
}

}  // namespace elicit
