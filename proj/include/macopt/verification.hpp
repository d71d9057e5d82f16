#pragma once

#include <random>
#include <string>
#include <vector>

#include "macopt/mac_multi_user.hpp"
#include "macopt/mac_two_user.hpp"
#include "macopt/single_user.hpp"

namespace macopt {

struct CheckResult {
  std::string name;
  bool passed = false;
  std::string detail;
};

struct SuiteReport {
  std::string suite;
  std::vector<CheckResult> checks;
  double seconds = 0.0;

  bool passed() const;
  /// {"suite": ..., "passed": ..., "seconds": ..., "checks": [{name, passed, detail}]}
  std::string to_json() const;
};

/// lemma1, prop1, lemma2, theorem1, prop2, oracle.
const std::vector<std::string>& suite_names();

/// Runs a built-in property suite. Throws InvalidParameters for unknown names.
SuiteReport run_suite(const std::string& name);

/// Fixed seed used by the built-in suites.
inline constexpr unsigned long long kSuiteSeed = 20240611ULL;

/// Single-user problems with r in [0, 1], B in [0.1, 5], gamma in [0, 1],
/// T in [0.5, 2] and the default loss coefficient.
SingleUserProblem random_single_user(std::mt19937_64& rng);

/// U users with r in [0.05, 1], B in [0.3, 2], gamma in [0.05, 1], T = 1.
/// Draws are repeated until every user can power its circuit.
MultiUserInstance random_channel(std::mt19937_64& rng, int users);

/// U identical users with zero circuit cost and a quadratic battery.
MultiUserInstance identical_users(int users, double battery_energy, double resistance,
                                  double circuit_cost = 0.0, double horizon = 1.0);

TwoUserInstance as_two_user(const MultiUserInstance& instance);

}  // namespace macopt
