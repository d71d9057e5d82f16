#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "macopt/battery_model.hpp"
#include "macopt/convex_core.hpp"

namespace macopt {

/// Phase-by-phase schedule of a U-user frame. Phase i (0-based) is the set of
/// users whose bits are set in i, so index 0 is the idle phase and index
/// 2^U - 1 has everyone transmitting.
struct FrameAllocation {
  std::vector<double> durations;                     // [phase], s
  std::vector<std::vector<double>> drawn_energy;     // [phase][user], J
  std::vector<std::vector<double>> transmit_energy;  // [phase][user], J

  static FrameAllocation zeros(std::size_t users);
  std::size_t user_count() const;
  std::size_t phase_count() const noexcept { return durations.size(); }
};

inline bool phase_has(std::uint32_t phase, std::size_t user) { return (phase >> user) & 1U; }

/// Sum over phases of tau ln(1 + sum_u E/tau); closed phases contribute 0.
double frame_sum_rate(const FrameAllocation& alloc);

/// Human-readable violations of the frame invariants (empty when valid):
/// time budget, idle-user zeros, energy budgets, drain caps and the
/// transmit-energy bound.
std::vector<std::string> allocation_violations(const std::vector<UserParams>& users,
                                               double horizon, const FrameAllocation& alloc,
                                               double tol = 1e-9);

/// Everyone transmits for the whole horizon at min(B/T, D0); users whose
/// delivered power does not cover the circuit cost stay silent.
FrameAllocation noma_frame(const std::vector<UserParams>& users, double horizon);

/// User u transmits alone for windows[u] seconds with its whole budget.
FrameAllocation tdma_frame(const std::vector<UserParams>& users,
                           const std::vector<double>& windows);

/// One concave rate term: tau_p ln(1 + sum_{u in signal} P_u / noise), where
/// P_u = g(e/tau) - gamma is the power of user u in phase p and noise is fixed.
struct RateTerm {
  std::uint32_t phase = 0;   // phase key
  std::uint32_t signal = 0;  // users whose power counts
  double noise = 1.0;
  double weight = 1.0;
};

/// Concave program over phase durations and per-phase drawn energies, with
/// transmit energies eliminated through E = tau (g(e/tau) - gamma).
class PhaseProgram {
 public:
  explicit PhaseProgram(std::vector<UserParams> users);

  /// Adds a phase; members that cannot power their circuit are dropped.
  /// The key names the phase in rate terms, time limits and allocations and
  /// defaults to the member bitmask; distinct phases with the same members
  /// need distinct keys. Returns the program-local index, or -1 if no member
  /// remains.
  int add_phase(std::uint32_t members, std::optional<std::uint32_t> key = std::nullopt);
  /// Sum of the given phases' durations <= bound. Phases are keys; those not
  /// in the program are ignored.
  void add_time_limit(const std::vector<std::uint32_t>& phases, double bound);

  int dimension() const noexcept { return dimension_; }
  std::size_t phase_count() const noexcept { return phases_.size(); }
  std::size_t user_count() const noexcept { return users_.size(); }
  int local_phase(std::uint32_t key) const;
  std::uint32_t phase_key(int local) const { return phases_.at(local).key; }
  int duration_index(int local) const { return phases_.at(local).tau_index; }
  /// -1 when the user does not transmit in that phase.
  int energy_index(int local, std::size_t user) const;

  LinearConstraintSet constraints() const;
  /// A strictly feasible point for the linear constraints.
  Eigen::VectorXd interior_point() const;

  double evaluate(const std::vector<RateTerm>& terms, const Eigen::VectorXd& x,
                  Eigen::VectorXd* grad, Eigen::MatrixXd* hess) const;
  SmoothConcave objective(std::vector<RateTerm> terms) const;
  /// Sum-rate terms (signal = all members, unit noise) for every phase.
  std::vector<RateTerm> sum_rate_terms() const;

  /// Barrier solve of max sum(terms) subject to the linear constraints and
  /// any extra concave constraints. Throws SolverFailure if not Optimal.
  VectorOptimum maximize(const std::vector<RateTerm>& terms,
                         const std::vector<SmoothConcave>& extra = {},
                         std::optional<Eigen::VectorXd> start = std::nullopt,
                         const BarrierOptions& options = {}) const;

  /// Frame allocation indexed by phase key; keys must be member bitmasks.
  FrameAllocation allocation(const Eigen::VectorXd& x) const;

  const std::vector<UserParams>& users() const noexcept { return users_; }
  double min_drain(std::size_t user) const { return min_drain_.at(user); }
  double peak_drain(std::size_t user) const { return peak_drain_.at(user); }
  bool user_usable(std::size_t user) const { return usable_.at(user); }

 private:
  struct Phase {
    std::uint32_t mask = 0;
    std::uint32_t key = 0;
    int tau_index = 0;
    std::vector<std::pair<std::size_t, int>> energy;  // (user, variable)
  };
  struct TimeLimit {
    std::vector<int> phases;
    double bound = 0.0;
  };

  std::vector<UserParams> users_;
  std::vector<bool> usable_;
  std::vector<double> min_drain_;
  std::vector<double> peak_drain_;
  std::vector<Phase> phases_;
  std::vector<TimeLimit> limits_;
  int dimension_ = 0;
};

/// Every nonempty phase of the frame under a single time budget.
PhaseProgram full_frame_program(const std::vector<UserParams>& users, double horizon);

}  // namespace macopt
