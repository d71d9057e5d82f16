#include "macopt/mac_two_user.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "macopt/errors.hpp"
#include "macopt/parallel.hpp"
#include "macopt/single_user.hpp"

namespace macopt {

void TwoUserInstance::validate() const {
  for (const auto& u : users) u.validate();
  if (!(horizon > 0.0) || !std::isfinite(horizon)) {
    throw Error(ErrorCode::InvalidParameters, "horizon must be finite and > 0");
  }
}

NomaOutcome noma_sum_rate(const TwoUserInstance& instance) {
  instance.validate();
  NomaOutcome out;
  out.allocation = noma_frame(instance.user_list(), instance.horizon);
  out.rate = frame_sum_rate(out.allocation);
  return out;
}

TdmaOutcome tdma_sum_rate(const TwoUserInstance& instance, double tol, TdmaMethod method) {
  instance.validate();
  const double T = instance.horizon;
  const std::vector<WindowRate> windows{WindowRate(instance.users[0], T),
                                        WindowRate(instance.users[1], T)};
  TdmaOutcome out;
  if (method == TdmaMethod::EqualMarginal) {
    const auto split = equal_marginal_split(windows, T);
    out.first_duration = split[0];
    out.second_duration = split[1];
  } else {
    const auto total = [&](double first) { return windows[0](first) + windows[1](T - first); };
    const auto best = maximize_concave_1d(total, 0.0, T, tol * std::max(1.0, T));
    out.first_duration = std::min(best.argmax, windows[0].saturation());
    out.second_duration = std::min(T - best.argmax, windows[1].saturation());
  }
  out.allocation = tdma_frame(instance.user_list(), {out.first_duration, out.second_duration});
  out.rate = windows[0](out.first_duration) + windows[1](out.second_duration);
  return out;
}

HybridOutcome hybrid_sum_rate(const TwoUserInstance& instance, double tol) {
  instance.validate();
  const auto program = full_frame_program(instance.user_list(), instance.horizon);
  BarrierOptions options;
  options.kkt_tolerance = tol;
  const auto solved = program.maximize(program.sum_rate_terms(), {}, std::nullopt, options);
  HybridOutcome out;
  out.report = solved.report;
  out.allocation = program.allocation(solved.x);
  out.rate = solved.report.objective;
  return out;
}

double hybrid_objective(const FrameAllocation& allocation) { return frame_sum_rate(allocation); }

double brute_force_hybrid(const TwoUserInstance& instance, int resolution) {
  instance.validate();
  if (resolution < 4) throw Error(ErrorCode::InvalidParameters, "resolution must be >= 4");
  const auto& users = instance.users;
  std::array<bool, 2> usable{};
  std::array<double, 2> low{}, peak{};
  for (std::size_t u = 0; u < 2; ++u) {
    usable[u] = can_power_circuit(users[u]);
    low[u] = usable[u] ? circuit_threshold(users[u]) : 0.0;
    peak[u] = peak_discharge(users[u].model);
  }
  const auto grid = simplex_grid(3, instance.horizon, resolution);
  std::vector<double> best(grid.size(), 0.0);
  const std::array<std::uint32_t, 3> masks{kFirstOnly, kSecondOnly, kBothUsers};

  parallel_for(grid.size(), [&](std::size_t k) {
    struct Var {
      std::size_t phase;  // index into masks
      std::size_t user;
    };
    std::vector<Var> vars;
    const auto& tau = grid[k];
    for (std::size_t p = 0; p < 3; ++p) {
      if (!(tau[p] > 0.0)) continue;
      for (std::size_t u = 0; u < 2; ++u) {
        if (phase_has(masks[p], u) && usable[u]) vars.push_back({p, u});
      }
    }
    if (vars.empty()) return;
    const int n = static_cast<int>(vars.size());
    LinearConstraintSet cons(n);
    std::array<std::vector<std::pair<int, double>>, 2> budget;
    std::array<double, 2> committed{};
    Eigen::VectorXd x0(n);
    for (int i = 0; i < n; ++i) {
      const double t = tau[vars[i].phase];
      const std::size_t u = vars[i].user;
      cons.set_bounds(i, low[u] * t, std::isfinite(peak[u]) ? peak[u] * t : kUnbounded);
      budget[u].emplace_back(i, 1.0);
      committed[u] += low[u] * t;
      x0[i] = low[u] * t;
    }
    for (std::size_t u = 0; u < 2; ++u) {
      if (budget[u].empty()) continue;
      // Not enough energy to keep the circuit on in every assigned phase.
      if (committed[u] > users[u].battery_energy) return;
      cons.add_row(budget[u], users[u].battery_energy);
    }
    const auto f = [&](const Eigen::VectorXd& x, Eigen::VectorXd& g) {
      std::array<double, 3> power{};
      g.setZero();
      for (int i = 0; i < n; ++i) {
        const double t = tau[vars[i].phase];
        const auto& user = users[vars[i].user];
        power[vars[i].phase] +=
            eval_discharge(user.model, std::max(x[i], 0.0) / t) - user.circuit_cost;
      }
      double value = 0.0;
      for (std::size_t p = 0; p < 3; ++p) {
        if (tau[p] > 0.0) value += tau[p] * std::log1p(power[p]);
      }
      for (int i = 0; i < n; ++i) {
        const double t = tau[vars[i].phase];
        const auto& user = users[vars[i].user];
        g[i] = eval_derivative(user.model, std::max(x[i], 0.0) / t) / (1.0 + power[vars[i].phase]);
      }
      return value;
    };
    SolverOptions options;
    options.tolerance = 1e-9;
    options.max_iter = 20000;
    best[k] = maximize_concave_linear(f, cons, x0, options).report.objective;
  });
  return *std::max_element(best.begin(), best.end());
}

}  // namespace macopt
