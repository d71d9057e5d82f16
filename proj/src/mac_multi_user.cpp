#include "macopt/mac_multi_user.hpp"

#include <bit>
#include <cmath>
#include <string>

#include "macopt/errors.hpp"
#include "macopt/single_user.hpp"

namespace macopt {

void MultiUserInstance::validate() const {
  if (users.empty()) throw Error(ErrorCode::InvalidParameters, "at least one user is required");
  if (static_cast<int>(users.size()) > max_users) {
    throw Error(ErrorCode::TooManyUsers, std::to_string(users.size()) + " users exceed the cap of " +
                                             std::to_string(max_users));
  }
  for (const auto& u : users) u.validate();
  if (!(horizon > 0.0) || !std::isfinite(horizon)) {
    throw Error(ErrorCode::InvalidParameters, "horizon must be finite and > 0");
  }
}

int PhaseSet::size() const { return std::popcount(members); }

std::vector<PhaseSet> enumerate_phases(int users, int max_users) {
  if (users < 1) throw Error(ErrorCode::InvalidParameters, "at least one user is required");
  if (users > max_users || users > 30) {
    throw Error(ErrorCode::TooManyUsers,
                std::to_string(users) + " users exceed the cap of " + std::to_string(max_users));
  }
  std::vector<PhaseSet> out;
  const std::uint32_t count = std::uint32_t{1} << users;
  out.reserve(count);
  for (std::uint32_t m = 0; m < count; ++m) out.push_back({static_cast<int>(m) + 1, m});
  return out;
}

std::vector<PhaseSet> phases_with_size(const std::vector<PhaseSet>& phases, int n) {
  std::vector<PhaseSet> out;
  for (const auto& p : phases) {
    if (p.size() == n) out.push_back(p);
  }
  return out;
}

MultiHybridOutcome hybrid_sum_rate_multi(const MultiUserInstance& instance, double tol) {
  instance.validate();
  const auto program = full_frame_program(instance.users, instance.horizon);
  BarrierOptions options;
  options.kkt_tolerance = tol;
  const auto solved = program.maximize(program.sum_rate_terms(), {}, std::nullopt, options);
  MultiHybridOutcome out;
  out.report = solved.report;
  out.allocation = program.allocation(solved.x);
  out.rate = solved.report.objective;
  return out;
}

double noma_sum_rate_multi(const MultiUserInstance& instance) {
  instance.validate();
  return frame_sum_rate(noma_frame(instance.users, instance.horizon));
}

MultiTdmaOutcome tdma_sum_rate_multi(const MultiUserInstance& instance, double /*tol*/) {
  instance.validate();
  std::vector<WindowRate> windows;
  for (const auto& u : instance.users) windows.emplace_back(u, instance.horizon);
  MultiTdmaOutcome out;
  const auto split = equal_marginal_split(windows, instance.horizon);
  for (std::size_t u = 0; u < windows.size(); ++u) {
    const double w = std::min(split[u], windows[u].saturation());
    out.durations.push_back(w);
    out.rate += windows[u](w);
  }
  out.allocation = tdma_frame(instance.users, out.durations);
  return out;
}

double subset_rate_bound(const FrameAllocation& allocation, std::uint32_t subset) {
  double total = 0.0;
  for (std::size_t i = 0; i < allocation.phase_count(); ++i) {
    const double tau = allocation.durations[i];
    if (!(tau > 0.0)) continue;
    double energy = 0.0;
    for (std::size_t u = 0; u < allocation.user_count(); ++u) {
      if (phase_has(subset, u)) energy += allocation.transmit_energy[i][u];
    }
    total += tau * std::log1p(energy / tau);
  }
  return total;
}

std::set<int> active_phase_profile(const FrameAllocation& allocation, double threshold) {
  std::set<int> sizes;
  for (std::size_t i = 1; i < allocation.phase_count(); ++i) {
    if (allocation.durations[i] > threshold) {
      sizes.insert(std::popcount(static_cast<std::uint32_t>(i)));
    }
  }
  return sizes;
}

bool is_adjacent_profile(const std::set<int>& profile) {
  if (profile.empty() || profile.size() > 2) return false;
  return profile.size() == 1 || *profile.rbegin() == *profile.begin() + 1;
}

StrategyRates theorem1_witness(int users, double battery_energy, double resistance,
                               double coefficient, double horizon) {
  MultiUserInstance inst;
  for (int u = 0; u < users; ++u) {
    inst.users.push_back({battery_energy, 0.0, DischargeModel::quadratic(resistance, coefficient)});
  }
  inst.horizon = horizon;
  inst.validate();
  const double d0 = peak_discharge(inst.users.front().model);
  if (users * battery_energy / horizon > d0) {
    throw Error(ErrorCode::PreconditionViolated, "U B / T exceeds the peak discharge power");
  }
  return strategy_rates(inst);
}

StrategyRates strategy_rates(const MultiUserInstance& instance, double tol) {
  StrategyRates out;
  out.tdma = tdma_sum_rate_multi(instance).rate;
  out.noma = noma_sum_rate_multi(instance);
  out.hybrid = hybrid_sum_rate_multi(instance, tol).rate;
  return out;
}

}  // namespace macopt
