#pragma once

#include <array>
#include <vector>

#include "macopt/battery_model.hpp"
#include "macopt/convex_core.hpp"
#include "macopt/perspective_program.hpp"

namespace macopt {

/// Frame phases of the two-user channel, by bitmask.
inline constexpr std::uint32_t kIdlePhase = 0;
inline constexpr std::uint32_t kFirstOnly = 1;
inline constexpr std::uint32_t kSecondOnly = 2;
inline constexpr std::uint32_t kBothUsers = 3;

struct TwoUserInstance {
  std::array<UserParams, 2> users;
  double horizon = 1.0;

  void validate() const;
  std::vector<UserParams> user_list() const { return {users[0], users[1]}; }
  /// Same instance with the users' roles exchanged.
  TwoUserInstance swapped() const { return {{users[1], users[0]}, horizon}; }
};

struct NomaOutcome {
  double rate = 0.0;  // nats
  FrameAllocation allocation;
};

/// Both users transmit for the whole frame at min(B/T, D0).
NomaOutcome noma_sum_rate(const TwoUserInstance& instance);

enum class TdmaMethod { EqualMarginal, GoldenSection };

struct TdmaOutcome {
  double rate = 0.0;  // nats
  double first_duration = 0.0;
  double second_duration = 0.0;
  FrameAllocation allocation;
};

/// Best split of the frame into two solo windows.
TdmaOutcome tdma_sum_rate(const TwoUserInstance& instance, double tol = 1e-10,
                          TdmaMethod method = TdmaMethod::EqualMarginal);

struct HybridOutcome {
  double rate = 0.0;  // nats
  FrameAllocation allocation;
  SolveReport report;
};

/// Joint optimum over solo and superposed phases. Throws SolverFailure when
/// the solver does not certify optimality to tol.
HybridOutcome hybrid_sum_rate(const TwoUserInstance& instance, double tol = 1e-6);

/// Grid search over the three phase durations with an inner projected-gradient
/// solve over drawn energies. A lower bound on hybrid_sum_rate.
double brute_force_hybrid(const TwoUserInstance& instance, int resolution);

/// Sum-rate objective of a frame allocation, in nats.
double hybrid_objective(const FrameAllocation& allocation);

}  // namespace macopt
