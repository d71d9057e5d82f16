#pragma once

#include <cstdint>
#include <set>
#include <vector>

#include "macopt/battery_model.hpp"
#include "macopt/convex_core.hpp"
#include "macopt/perspective_program.hpp"

namespace macopt {

/// The frame has 2^U phases, so U is capped.
inline constexpr int kDefaultMaxUsers = 8;

struct MultiUserInstance {
  std::vector<UserParams> users;
  double horizon = 1.0;
  int max_users = kDefaultMaxUsers;

  void validate() const;
};

struct PhaseSet {
  int index = 1;              // 1-based; index - 1 is the member bitmask
  std::uint32_t members = 0;  // bit u set when user u transmits

  int size() const;
};

/// All 2^U phases in bitmask order. Throws TooManyUsers past max_users.
std::vector<PhaseSet> enumerate_phases(int users, int max_users = kDefaultMaxUsers);

/// Phases in which exactly n users transmit.
std::vector<PhaseSet> phases_with_size(const std::vector<PhaseSet>& phases, int n);

struct MultiHybridOutcome {
  double rate = 0.0;  // nats
  FrameAllocation allocation;
  SolveReport report;
};

MultiHybridOutcome hybrid_sum_rate_multi(const MultiUserInstance& instance, double tol = 1e-6);

double noma_sum_rate_multi(const MultiUserInstance& instance);

struct MultiTdmaOutcome {
  double rate = 0.0;  // nats
  std::vector<double> durations;
  FrameAllocation allocation;
};

MultiTdmaOutcome tdma_sum_rate_multi(const MultiUserInstance& instance, double tol = 1e-10);

/// Sum over phases of tau ln(1 + sum_{u in subset} E_u / tau).
double subset_rate_bound(const FrameAllocation& allocation, std::uint32_t subset);

/// Sizes n >= 1 of the transmitting phases whose duration exceeds threshold.
/// The idle phase is not part of the profile.
std::set<int> active_phase_profile(const FrameAllocation& allocation, double threshold);

/// True when the profile is {n} or {n, n + 1}.
bool is_adjacent_profile(const std::set<int>& profile);

struct StrategyRates {
  double tdma = 0.0;  // nats
  double noma = 0.0;
  double hybrid = 0.0;
};

/// All three strategies on one instance.
StrategyRates strategy_rates(const MultiUserInstance& instance, double tol = 1e-6);

/// U identical zero-circuit-cost users with quadratic batteries. Throws
/// PreconditionViolated when U B / T exceeds D0.
StrategyRates theorem1_witness(int users, double battery_energy, double resistance,
                               double coefficient, double horizon);

}  // namespace macopt
