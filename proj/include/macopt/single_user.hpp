#pragma once

#include <string>
#include <vector>

#include "macopt/battery_model.hpp"

namespace macopt {

struct SingleUserProblem {
  UserParams user;
  double horizon = 1.0;

  void validate() const;
};

struct SingleUserSolution {
  double duration = 0.0;        // transmission time, s
  double discharge = 0.0;       // battery drain while transmitting, W
  double transmit_power = 0.0;  // radiated power, W
  double rate = 0.0;            // nats over the frame
  bool feasible = false;
};

/// Rate of one user transmitting for tau seconds with its whole budget:
/// tau * ln(1 + g(min(B/tau, D0)) - gamma), and 0 where that is not positive.
double burst_rate(const UserParams& user, double tau);

/// d/dtau of burst_rate on the region where it is positive.
double burst_rate_slope(const UserParams& user, double tau);

/// Best single-user schedule within the horizon, by golden section over the
/// transmission time, polished by bisection on the stationarity condition when
/// the optimum is interior.
SingleUserSolution solve_p2(const SingleUserProblem& problem, double tol = 1e-12);

/// Exhaustive search over a grid of (transmission time, drain level) pairs.
SingleUserSolution brute_force_p1(const SingleUserProblem& problem, int grid);

/// |(1 + g(x) - gamma) ln(1 + g(x) - gamma) - x g'(x)| at x = B / tau.
/// Throws OutOfInteriorRange unless B/D0 < tau < T.
double stationarity_residual_p2(const SingleUserProblem& problem, double tau);

struct LinearityEntry {
  double battery_energy = 0.0;
  SingleUserSolution solution;
  double ratio = 0.0;  // B / tau*
  bool interior = false;
};

struct LinearityReport {
  std::vector<LinearityEntry> entries;
  double relative_spread = 0.0;  // (max - min) / mean of ratios over interior entries
  bool passed = false;
  std::string note;
};

/// Solves the template problem for each budget and checks that the optimal
/// drain level B / tau* is the same for all of them.
LinearityReport check_linearity_in_B(const SingleUserProblem& problem_template,
                                     const std::vector<double>& budgets,
                                     double relative_tol = 1e-4);

/// Best rate a user can reach inside a window of w seconds. Concave and
/// non-decreasing in w; constant once w passes the unconstrained optimum.
class WindowRate {
 public:
  WindowRate(const UserParams& user, double max_window);

  double operator()(double w) const;
  /// Right derivative with respect to w.
  double marginal(double w) const;
  /// Largest window worth using.
  double saturation() const noexcept { return saturation_; }
  /// Below this window the battery is drained at D0 and the rate is linear.
  double linear_limit() const noexcept { return linear_limit_; }
  bool usable() const noexcept { return usable_; }
  const UserParams& user() const noexcept { return user_; }

  /// Largest window in [0, saturation] whose marginal is still >= slope.
  double window_for_slope(double slope) const;

 private:
  UserParams user_;
  double saturation_ = 0.0;
  double linear_limit_ = 0.0;
  bool usable_ = false;
};

/// Splits T among users to maximize the sum of window rates. Each user gets
/// at most its saturation window; surplus time is left unused.
std::vector<double> equal_marginal_split(const std::vector<WindowRate>& users, double horizon);

}  // namespace macopt
