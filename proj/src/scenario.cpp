#include "macopt/scenario.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "macopt/errors.hpp"

namespace macopt {
namespace {

using nlohmann::json;

[[noreturn]] void bad(const std::string& where, const std::string& what) {
  throw Error(ErrorCode::InvalidConfig, where + ": " + what);
}

void only_keys(const json& obj, const std::string& where, const std::set<std::string>& allowed) {
  if (!obj.is_object()) bad(where, "expected an object");
  for (const auto& [key, value] : obj.items()) {
    if (!allowed.count(key)) bad(where, "unknown key \"" + key + "\"");
  }
}

double number(const json& obj, const std::string& key, const std::string& where) {
  if (!obj.contains(key)) bad(where, "missing \"" + key + "\"");
  const json& v = obj.at(key);
  if (!v.is_number()) bad(where + "." + key, "expected a number");
  const double x = v.get<double>();
  if (!std::isfinite(x)) bad(where + "." + key, "must be finite");
  return x;
}

DischargeModel parse_model(const json& m, const std::string& where) {
  only_keys(m, where, {"kind", "resistance", "coefficient", "samples"});
  if (!m.contains("kind") || !m.at("kind").is_string()) bad(where, "missing string \"kind\"");
  const std::string kind = m.at("kind").get<std::string>();
  if (kind == "ideal" || kind == "Ideal") {
    if (m.contains("samples")) bad(where, "\"samples\" only applies to tabulated models");
    return DischargeModel::ideal();
  }
  if (kind == "quadratic" || kind == "Quadratic") {
    if (m.contains("samples")) bad(where, "\"samples\" only applies to tabulated models");
    const double r = number(m, "resistance", where);
    const double k = m.contains("coefficient") ? number(m, "coefficient", where)
                                               : kDefaultLossCoefficient;
    try {
      return DischargeModel::quadratic(r, k);
    } catch (const Error& e) {
      bad(where, e.what());
    }
  }
  if (kind == "tabulated" || kind == "Tabulated") {
    if (m.contains("resistance") || m.contains("coefficient")) {
      bad(where, "tabulated models take only \"samples\"");
    }
    if (!m.contains("samples") || !m.at("samples").is_array()) bad(where, "missing \"samples\"");
    std::vector<DischargeSample> samples;
    for (const auto& s : m.at("samples")) {
      if (!s.is_array() || s.size() != 2 || !s[0].is_number() || !s[1].is_number()) {
        bad(where + ".samples", "each sample is a [drawn, delivered] pair");
      }
      samples.push_back({s[0].get<double>(), s[1].get<double>()});
    }
    try {
      return DischargeModel::tabulated(std::move(samples));
    } catch (const Error& e) {
      bad(where, e.what());
    }
  }
  bad(where + ".kind", "unknown model kind \"" + kind + "\"");
}

}  // namespace

MultiUserInstance ScenarioConfig::multi_user() const {
  MultiUserInstance inst;
  inst.users = users;
  inst.horizon = horizon;
  return inst;
}

TwoUserInstance ScenarioConfig::two_user() const {
  if (users.size() != 2) {
    throw Error(ErrorCode::InvalidConfig, "this command needs exactly 2 users");
  }
  return {{users[0], users[1]}, horizon};
}

SingleUserProblem ScenarioConfig::single_user() const {
  if (users.size() != 1) {
    throw Error(ErrorCode::InvalidConfig, "this command needs exactly 1 user");
  }
  return {users[0], horizon};
}

ScenarioConfig ScenarioConfig::with_resistance(double resistance) const {
  ScenarioConfig out = *this;
  for (auto& u : out.users) {
    const double k = u.model.kind() == DischargeKind::Quadratic ? u.model.coefficient()
                                                                : kDefaultLossCoefficient;
    u.model = DischargeModel::quadratic(resistance, k);
  }
  return out;
}

ScenarioConfig parse_scenario(const std::string& json_text) {
  json doc;
  try {
    doc = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw Error(ErrorCode::InvalidConfig, std::string("malformed JSON: ") + e.what());
  }
  only_keys(doc, "config", {"users", "horizon", "strategy", "rate_unit", "solver"});
  ScenarioConfig cfg;
  if (!doc.contains("users") || !doc.at("users").is_array() || doc.at("users").empty()) {
    bad("config", "\"users\" must be a non-empty array");
  }
  std::size_t k = 0;
  for (const auto& u : doc.at("users")) {
    const std::string where = "users[" + std::to_string(k++) + "]";
    only_keys(u, where, {"battery_energy", "circuit_cost", "model"});
    UserParams p;
    p.battery_energy = number(u, "battery_energy", where);
    p.circuit_cost = u.contains("circuit_cost") ? number(u, "circuit_cost", where) : 0.0;
    p.model = u.contains("model") ? parse_model(u.at("model"), where + ".model")
                                  : DischargeModel::ideal();
    try {
      p.validate();
    } catch (const Error& e) {
      bad(where, e.what());
    }
    cfg.users.push_back(p);
  }
  cfg.horizon = number(doc, "horizon", "config");
  if (!(cfg.horizon > 0.0)) bad("config.horizon", "must be > 0");

  if (doc.contains("strategy")) {
    const auto& s = doc.at("strategy");
    const std::string v = s.is_string() ? s.get<std::string>() : "";
    if (v == "noma") cfg.strategy = StrategyChoice::Noma;
    else if (v == "tdma") cfg.strategy = StrategyChoice::Tdma;
    else if (v == "hybrid") cfg.strategy = StrategyChoice::Hybrid;
    else if (v == "all") cfg.strategy = StrategyChoice::All;
    else bad("config.strategy", "expected noma, tdma, hybrid or all");
  }
  if (doc.contains("rate_unit")) {
    const auto& s = doc.at("rate_unit");
    const std::string v = s.is_string() ? s.get<std::string>() : "";
    if (v == "bits") cfg.unit = RateUnit::Bits;
    else if (v == "nats") cfg.unit = RateUnit::Nats;
    else bad("config.rate_unit", "expected bits or nats");
  }
  if (doc.contains("solver")) {
    const auto& s = doc.at("solver");
    only_keys(s, "config.solver", {"tolerance", "max_iter"});
    if (s.contains("tolerance")) {
      cfg.solver.tolerance = number(s, "tolerance", "config.solver");
      if (!(cfg.solver.tolerance > 0.0)) bad("config.solver.tolerance", "must be > 0");
    }
    if (s.contains("max_iter")) {
      if (!s.at("max_iter").is_number_integer() || s.at("max_iter").get<long>() < 1) {
        bad("config.solver.max_iter", "expected a positive integer");
      }
      cfg.solver.max_iter = s.at("max_iter").get<long>();
    }
  }
  return cfg;
}

ScenarioConfig load_scenario(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::InvalidConfig, "cannot read " + path);
  std::ostringstream text;
  text << in.rdbuf();
  return parse_scenario(text.str());
}

const char* to_string(RateUnit unit) noexcept { return unit == RateUnit::Bits ? "bits" : "nats"; }

const char* to_string(StrategyChoice choice) noexcept {
  switch (choice) {
    case StrategyChoice::Noma: return "noma";
    case StrategyChoice::Tdma: return "tdma";
    case StrategyChoice::Hybrid: return "hybrid";
    case StrategyChoice::All: return "all";
  }
  return "unknown";
}

double in_unit(double nats, RateUnit unit) {
  return unit == RateUnit::Bits ? nats / std::log(2.0) : nats;
}

std::string format_number(double value) {
  if (std::isnan(value)) return "nan";
  if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, value, std::chars_format::general, 9);
  return std::string(buf, res.ptr);
}

}  // namespace macopt
