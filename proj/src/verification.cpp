#include "macopt/verification.hpp"

#include <chrono>
#include <cmath>
#include <functional>
#include <map>
#include <sstream>

#include <json.hpp>

#include "macopt/errors.hpp"
#include "macopt/scenario.hpp"

namespace macopt {
namespace {

const double kLn2 = std::log(2.0);

std::string fmt(double x) { return format_number(x); }

void lemma1(SuiteReport& rep) {
  std::mt19937_64 rng(kSuiteSeed);
  for (int k = 0; k < 50; ++k) {
    const auto p = random_single_user(rng);
    const auto fast = solve_p2(p);
    const auto grid = brute_force_p1(p, 2000);
    const double gap = std::abs(fast.rate - grid.rate);
    rep.checks.push_back({"instance " + std::to_string(k),
                          fast.feasible == grid.feasible && gap <= 2e-3 &&
                              grid.rate <= fast.rate + 1e-12,
                          "solve_p2 " + fmt(fast.rate) + " nats, grid " + fmt(grid.rate)});
  }
}

void prop1(SuiteReport& rep) {
  SingleUserProblem p{{1.0, 0.5, DischargeModel::ideal()}, 10.0};
  const auto r = check_linearity_in_B(p, {0.5, 1.0, 1.5, 2.0});
  std::string ratios;
  for (const auto& e : r.entries) ratios += fmt(e.ratio) + " ";
  rep.checks.push_back({"optimal drain constant in B", r.passed,
                        "ratios " + ratios + "spread " + fmt(r.relative_spread) + " " + r.note});
}

void witnesses(SuiteReport& rep, int users) {
  for (int k = 1; k <= 10; ++k) {
    const double r = 0.1 * k;
    const auto w = strategy_rates(identical_users(users, 1.25, r));
    const double margin = (w.noma - w.tdma) / kLn2;
    rep.checks.push_back({"U=" + std::to_string(users) + " r=" + fmt(r),
                          margin > 1e-4 && w.hybrid >= w.noma - 1e-9,
                          "tdma " + fmt(w.tdma / kLn2) + " noma " + fmt(w.noma / kLn2) +
                              " hybrid " + fmt(w.hybrid / kLn2) + " bits"});
  }
}

void lemma2(SuiteReport& rep) {
  witnesses(rep, 2);
  // Zero resistance with a circuit cost: time sharing is at least as good.
  const auto inst = as_two_user(identical_users(2, 1.25, 0.0, 0.5));
  const double t = tdma_sum_rate(inst).rate, n = noma_sum_rate(inst).rate;
  rep.checks.push_back({"ideal battery with circuit cost", t >= n - 1e-12,
                        "tdma " + fmt(t / kLn2) + " noma " + fmt(n / kLn2) + " bits"});
}

void theorem1(SuiteReport& rep) {
  witnesses(rep, 3);
  const auto w = theorem1_witness(2, 1.25, 0.3, kDefaultLossCoefficient, 1.0);
  rep.checks.push_back({"U=2 B=1.25 r=0.3", w.tdma < w.noma && w.noma <= w.hybrid + 1e-9,
                        "tdma " + fmt(w.tdma / kLn2) + " noma " + fmt(w.noma / kLn2) + " bits"});
}

void prop2(SuiteReport& rep) {
  std::mt19937_64 rng(kSuiteSeed + 2);
  for (int k = 0; k < 10; ++k) {
    const int users = 2 + k % 2;
    const auto inst = random_channel(rng, users);
    const auto h = hybrid_sum_rate_multi(inst);
    const auto profile = active_phase_profile(h.allocation, 1e-6 * inst.horizon);
    std::string sizes;
    for (int s : profile) sizes += std::to_string(s) + " ";
    rep.checks.push_back({"U=" + std::to_string(users) + " instance " + std::to_string(k),
                          is_adjacent_profile(profile), "active sizes " + sizes});
  }
}

void oracle(SuiteReport& rep) {
  std::mt19937_64 rng(kSuiteSeed + 3);
  for (int k = 0; k < 3; ++k) {
    const auto inst = as_two_user(random_channel(rng, 2));
    const double h = hybrid_sum_rate(inst).rate / kLn2;
    const double g = brute_force_hybrid(inst, 20) / kLn2;
    rep.checks.push_back({"instance " + std::to_string(k), g <= h + 1e-6 && h - g <= 5e-3,
                          "hybrid " + fmt(h) + " grid " + fmt(g) + " bits"});
  }
}

}  // namespace

bool SuiteReport::passed() const {
  for (const auto& c : checks) {
    if (!c.passed) return false;
  }
  return !checks.empty();
}

std::string SuiteReport::to_json() const {
  nlohmann::json j;
  j["suite"] = suite;
  j["passed"] = passed();
  j["seconds"] = seconds;
  j["checks"] = nlohmann::json::array();
  for (const auto& c : checks) {
    j["checks"].push_back({{"name", c.name}, {"passed", c.passed}, {"detail", c.detail}});
  }
  return j.dump(2);
}

const std::vector<std::string>& suite_names() {
  static const std::vector<std::string> names{"lemma1", "prop1",  "lemma2",
                                              "theorem1", "prop2", "oracle"};
  return names;
}

SuiteReport run_suite(const std::string& name) {
  static const std::map<std::string, std::function<void(SuiteReport&)>> suites{
      {"lemma1", lemma1}, {"prop1", prop1},   {"lemma2", lemma2},
      {"theorem1", theorem1}, {"prop2", prop2}, {"oracle", oracle}};
  const auto it = suites.find(name);
  if (it == suites.end()) throw Error(ErrorCode::InvalidParameters, "unknown suite " + name);
  SuiteReport rep;
  rep.suite = name;
  const auto start = std::chrono::steady_clock::now();
  try {
    it->second(rep);
  } catch (const Error& e) {
    rep.checks.push_back({"exception", false, e.what()});
  }
  rep.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return rep;
}

SingleUserProblem random_single_user(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> r(0.0, 1.0), b(0.1, 5.0), g(0.0, 1.0), t(0.5, 2.0);
  SingleUserProblem p;
  p.user.model = DischargeModel::quadratic(r(rng));
  p.user.battery_energy = b(rng);
  p.user.circuit_cost = g(rng);
  p.horizon = t(rng);
  return p;
}

MultiUserInstance random_channel(std::mt19937_64& rng, int users) {
  std::uniform_real_distribution<double> r(0.05, 1.0), b(0.3, 2.0), g(0.05, 1.0);
  MultiUserInstance inst;
  inst.horizon = 1.0;
  while (static_cast<int>(inst.users.size()) < users) {
    UserParams u{b(rng), g(rng), DischargeModel::quadratic(r(rng))};
    if (can_power_circuit(u)) inst.users.push_back(u);
  }
  return inst;
}

MultiUserInstance identical_users(int users, double battery_energy, double resistance,
                                  double circuit_cost, double horizon) {
  MultiUserInstance inst;
  inst.horizon = horizon;
  for (int u = 0; u < users; ++u) {
    inst.users.push_back({battery_energy, circuit_cost, DischargeModel::quadratic(resistance)});
  }
  return inst;
}

TwoUserInstance as_two_user(const MultiUserInstance& instance) {
  if (instance.users.size() != 2) {
    throw Error(ErrorCode::InvalidParameters, "expected exactly two users");
  }
  return {{instance.users[0], instance.users[1]}, instance.horizon};
}

}  // namespace macopt
