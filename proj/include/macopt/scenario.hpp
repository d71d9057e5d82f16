#pragma once

#include <string>
#include <vector>

#include "macopt/battery_model.hpp"
#include "macopt/mac_multi_user.hpp"
#include "macopt/mac_two_user.hpp"
#include "macopt/single_user.hpp"

namespace macopt {

enum class RateUnit { Bits, Nats };
enum class StrategyChoice { Noma, Tdma, Hybrid, All };

struct SolverSettings {
  double tolerance = 1e-6;
  long max_iter = 100000;
};

/// One scenario file: users, horizon and what to compute.
///
/// {
///   "users": [{"battery_energy": 1.25, "circuit_cost": 0.5,
///              "model": {"kind": "quadratic", "resistance": 0.3, "coefficient": 0.4444}}],
///   "horizon": 1.0,
///   "strategy": "all",
///   "rate_unit": "bits",
///   "solver": {"tolerance": 1e-6, "max_iter": 100000}
/// }
///
/// Model kinds are "ideal", "quadratic" and "tabulated" (with "samples" as an
/// array of [drawn, delivered] pairs). Unknown keys are rejected.
struct ScenarioConfig {
  std::vector<UserParams> users;
  double horizon = 1.0;
  StrategyChoice strategy = StrategyChoice::All;
  RateUnit unit = RateUnit::Bits;
  SolverSettings solver;

  MultiUserInstance multi_user() const;
  /// Throws InvalidConfig unless there are exactly two users.
  TwoUserInstance two_user() const;
  /// Throws InvalidConfig unless there is exactly one user.
  SingleUserProblem single_user() const;
  /// Copy with every user's battery replaced by a quadratic model with the
  /// given resistance, keeping each user's loss coefficient.
  ScenarioConfig with_resistance(double resistance) const;
};

/// Throws Error(InvalidConfig) on malformed input.
ScenarioConfig parse_scenario(const std::string& json_text);
ScenarioConfig load_scenario(const std::string& path);

const char* to_string(RateUnit unit) noexcept;
const char* to_string(StrategyChoice choice) noexcept;

/// Converts a rate in nats to the requested unit.
double in_unit(double nats, RateUnit unit);

/// Renders a number with 9 significant digits and a '.' decimal
/// point, independent of the locale.
std::string format_number(double value);

}  // namespace macopt
