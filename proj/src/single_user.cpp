#include "macopt/single_user.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "macopt/convex_core.hpp"
#include "macopt/errors.hpp"

namespace macopt {
namespace {

double peak_slope(const UserParams& user) {
  return std::log1p(max_delivered_power(user.model) - user.circuit_cost);
}

}  // namespace

void SingleUserProblem::validate() const {
  user.validate();
  if (!(horizon > 0.0) || !std::isfinite(horizon)) {
    throw Error(ErrorCode::InvalidParameters, "horizon must be finite and > 0");
  }
}

double burst_rate(const UserParams& user, double tau) {
  if (!(tau > 0.0)) return 0.0;
  const double d = std::min(user.battery_energy / tau, peak_discharge(user.model));
  const double p = eval_discharge(user.model, d) - user.circuit_cost;
  return p > 0.0 ? tau * std::log1p(p) : 0.0;
}

double burst_rate_slope(const UserParams& user, double tau) {
  const double d0 = peak_discharge(user.model);
  const double d = tau > 0.0 ? user.battery_energy / tau : kUnbounded;
  if (d >= d0) return peak_slope(user);
  const double p = eval_discharge(user.model, d) - user.circuit_cost;
  if (p <= 0.0) return 0.0;
  return std::log1p(p) - d * eval_derivative(user.model, d) / (1.0 + p);
}

SingleUserSolution solve_p2(const SingleUserProblem& problem, double tol) {
  problem.validate();
  const UserParams& user = problem.user;
  const double T = problem.horizon;
  const double B = user.battery_energy;
  SingleUserSolution sol;
  if (!can_power_circuit(user)) return sol;

  const double d0 = peak_discharge(user.model);
  const double lo = std::isfinite(d0) ? B / d0 : 0.0;
  const double d_low = circuit_threshold(user);
  const double hi = d_low > 0.0 ? std::min(T, B / d_low) : T;

  double tau = T;
  if (lo < hi) {
    const auto f = [&user](double t) { return burst_rate(user, t); };
    const auto best = maximize_concave_1d(f, lo, hi, tol * std::max(1.0, hi));
    tau = best.argmax;
    double value = best.value;
    // Polish an interior optimum on the sign of the slope.
    double a = lo, b = hi;
    if (burst_rate_slope(user, std::max(a, 1e-300)) > 0.0 && burst_rate_slope(user, b) < 0.0) {
      for (int it = 0; it < 200 && b - a > 1e-16 * b; ++it) {
        const double m = 0.5 * (a + b);
        (burst_rate_slope(user, m) > 0.0 ? a : b) = m;
      }
      const double polished = 0.5 * (a + b);
      if (f(polished) >= value - 1e-15 * std::max(1.0, std::abs(value))) {
        tau = polished;
        value = f(polished);
      }
    }
    // Boundary candidate: drain at D0 for as long as the budget allows.
    const double edge = std::min(lo, T);
    if (edge > 0.0 && f(edge) > value) tau = edge;
  }

  sol.duration = tau;
  sol.discharge = std::min(B / tau, d0);
  sol.transmit_power = std::max(0.0, eval_discharge(user.model, sol.discharge) - user.circuit_cost);
  sol.rate = burst_rate(user, tau);
  sol.feasible = true;
  return sol;
}

SingleUserSolution brute_force_p1(const SingleUserProblem& problem, int grid) {
  problem.validate();
  if (grid < 10) throw Error(ErrorCode::InvalidParameters, "grid must be >= 10");
  const UserParams& user = problem.user;
  SingleUserSolution best;
  if (!can_power_circuit(user)) return best;
  best.feasible = true;
  const double T = problem.horizon;
  const double d0 = peak_discharge(user.model);
  for (int k = 1; k <= grid; ++k) {
    const double tau = T * k / grid;
    const double d_max = std::min(d0, user.battery_energy / tau);
    for (int j = 1; j <= grid; ++j) {
      const double d = d_max * j / grid;
      const double p = std::max(eval_discharge(user.model, d) - user.circuit_cost, 0.0);
      const double rate = tau * std::log1p(p);
      if (rate > best.rate) {
        best.rate = rate;
        best.duration = tau;
        best.discharge = d;
        best.transmit_power = p;
      }
    }
  }
  return best;
}

double stationarity_residual_p2(const SingleUserProblem& problem, double tau) {
  problem.validate();
  const UserParams& user = problem.user;
  const double d0 = peak_discharge(user.model);
  const double lo = std::isfinite(d0) ? user.battery_energy / d0 : 0.0;
  if (!(tau > lo && tau < problem.horizon)) {
    throw Error(ErrorCode::OutOfInteriorRange, "tau must lie strictly between B/D0 and T");
  }
  const double x = user.battery_energy / tau;
  const double s = 1.0 + eval_discharge(user.model, x) - user.circuit_cost;
  return std::abs(s * std::log(s) - x * eval_derivative(user.model, x));
}

LinearityReport check_linearity_in_B(const SingleUserProblem& problem_template,
                                     const std::vector<double>& budgets, double relative_tol) {
  LinearityReport report;
  double lo = kUnbounded, hi = -kUnbounded, sum = 0.0;
  int interior = 0;
  for (double b : budgets) {
    SingleUserProblem p = problem_template;
    p.user.battery_energy = b;
    LinearityEntry e;
    e.battery_energy = b;
    e.solution = solve_p2(p);
    const double d0 = peak_discharge(p.user.model);
    const double edge = std::isfinite(d0) ? b / d0 : 0.0;
    const double tau = e.solution.duration;
    e.interior = e.solution.feasible && tau > edge * (1 + 1e-9) && tau < p.horizon * (1 - 1e-9);
    e.ratio = e.solution.feasible && tau > 0.0 ? b / tau : 0.0;
    if (e.interior) {
      lo = std::min(lo, e.ratio);
      hi = std::max(hi, e.ratio);
      sum += e.ratio;
      ++interior;
    } else {
      report.note += "B=" + std::to_string(b) + " NotInterior; ";
    }
    report.entries.push_back(e);
  }
  report.relative_spread = interior > 0 ? (hi - lo) / (sum / interior) : 0.0;
  report.passed = interior == static_cast<int>(budgets.size()) && interior > 0 &&
                  report.relative_spread <= relative_tol;
  return report;
}

WindowRate::WindowRate(const UserParams& user, double max_window) : user_(user) {
  user_.validate();
  usable_ = can_power_circuit(user_) && max_window > 0.0;
  if (!usable_) return;
  const auto sol = solve_p2({user_, max_window});
  saturation_ = sol.duration;
  const double d0 = peak_discharge(user_.model);
  linear_limit_ = std::isfinite(d0) ? std::min(user_.battery_energy / d0, saturation_) : 0.0;
}

double WindowRate::operator()(double w) const {
  if (!usable_ || !(w > 0.0)) return 0.0;
  return burst_rate(user_, std::min(w, saturation_));
}

double WindowRate::marginal(double w) const {
  if (!usable_ || w >= saturation_) return 0.0;
  if (w < linear_limit_) return peak_slope(user_);
  return std::max(0.0, burst_rate_slope(user_, std::max(w, 1e-300)));
}

double WindowRate::window_for_slope(double slope) const {
  if (!usable_) return 0.0;
  if (slope <= 0.0) return saturation_;
  // Largest w in [0, saturation] with marginal(w) >= slope.
  if (marginal(linear_limit_) < slope) {
    return (linear_limit_ > 0.0 && peak_slope(user_) >= slope) ? linear_limit_ : 0.0;
  }
  double a = linear_limit_, b = saturation_;
  if (burst_rate_slope(user_, b) >= slope) return b;
  for (int it = 0; it < 200 && b - a > 1e-16 * std::max(1.0, b); ++it) {
    const double m = 0.5 * (a + b);
    (burst_rate_slope(user_, m) >= slope ? a : b) = m;
  }
  return a;
}

std::vector<double> equal_marginal_split(const std::vector<WindowRate>& users, double horizon) {
  const std::size_t n = users.size();
  std::vector<double> w(n, 0.0);
  double total = 0.0;
  for (std::size_t u = 0; u < n; ++u) {
    w[u] = users[u].usable() ? std::min(users[u].saturation(), horizon) : 0.0;
    total += w[u];
  }
  if (total <= horizon) return w;

  const auto windows = [&](double slope, std::vector<double>& out) {
    double s = 0.0;
    for (std::size_t u = 0; u < n; ++u) {
      out[u] = std::min(users[u].window_for_slope(slope), horizon);
      s += out[u];
    }
    return s;
  };
  double lam_lo = 0.0, lam_hi = 0.0;
  for (const auto& u : users) {
    if (u.usable()) lam_hi = std::max(lam_hi, u.marginal(1e-15 * horizon));
  }
  lam_hi = 2.0 * lam_hi + 1.0;
  std::vector<double> lower(n), upper(n);
  for (int it = 0; it < 300 && lam_hi - lam_lo > 1e-16 * lam_hi; ++it) {
    const double mid = 0.5 * (lam_lo + lam_hi);
    (windows(mid, lower) >= horizon ? lam_lo : lam_hi) = mid;
  }
  const double base = windows(lam_hi, lower);
  windows(lam_lo, upper);
  double gap = 0.0;
  for (std::size_t u = 0; u < n; ++u) gap += upper[u] - lower[u];
  const double leftover = std::max(0.0, horizon - base);
  for (std::size_t u = 0; u < n; ++u) {
    w[u] = lower[u];
    if (gap > 0.0) w[u] += leftover * (upper[u] - lower[u]) / gap;
  }
  return w;
}

}  // namespace macopt
