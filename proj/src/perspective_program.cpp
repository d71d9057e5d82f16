#include "macopt/perspective_program.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "macopt/errors.hpp"

namespace macopt {
namespace {

constexpr double kTauFloor = 1e-12;

}  // namespace

FrameAllocation FrameAllocation::zeros(std::size_t users) {
  const std::size_t phases = std::size_t{1} << users;
  FrameAllocation a;
  a.durations.assign(phases, 0.0);
  a.drawn_energy.assign(phases, std::vector<double>(users, 0.0));
  a.transmit_energy.assign(phases, std::vector<double>(users, 0.0));
  return a;
}

std::size_t FrameAllocation::user_count() const {
  return drawn_energy.empty() ? 0 : drawn_energy.front().size();
}

double frame_sum_rate(const FrameAllocation& alloc) {
  double total = 0.0;
  for (std::size_t i = 0; i < alloc.phase_count(); ++i) {
    const double tau = alloc.durations[i];
    if (!(tau > 0.0)) continue;
    double energy = 0.0;
    for (double e : alloc.transmit_energy[i]) energy += e;
    total += tau * std::log1p(energy / tau);
  }
  return total;
}

std::vector<std::string> allocation_violations(const std::vector<UserParams>& users,
                                               double horizon, const FrameAllocation& alloc,
                                               double tol) {
  std::vector<std::string> out;
  const auto report = [&out](auto&&... parts) {
    std::ostringstream os;
    (os << ... << parts);
    out.push_back(os.str());
  };
  const std::size_t n_users = users.size();
  if (alloc.phase_count() != (std::size_t{1} << n_users) || alloc.user_count() != n_users) {
    report("allocation shape does not match ", n_users, " users");
    return out;
  }
  double time = 0.0;
  for (std::size_t i = 0; i < alloc.phase_count(); ++i) {
    if (alloc.durations[i] < -tol) report("phase ", i, " has negative duration");
    time += alloc.durations[i];
  }
  if (time > horizon + tol) report("durations sum to ", time, " > ", horizon);

  for (std::size_t u = 0; u < n_users; ++u) {
    const double d0 = peak_discharge(users[u].model);
    double drawn = 0.0;
    for (std::size_t i = 0; i < alloc.phase_count(); ++i) {
      const double tau = alloc.durations[i];
      const double e = alloc.drawn_energy[i][u];
      const double big_e = alloc.transmit_energy[i][u];
      drawn += e;
      if (!phase_has(static_cast<std::uint32_t>(i), u)) {
        if (std::abs(e) > tol || std::abs(big_e) > tol) {
          report("user ", u, " is idle in phase ", i, " but has energy");
        }
        continue;
      }
      if (e < -tol) report("user ", u, " phase ", i, ": negative drawn energy");
      if (std::isfinite(d0) && e > tau * d0 + tol) {
        report("user ", u, " phase ", i, ": drain above D0");
      }
      if (tau > 0.0) {
        const double cap = tau * (eval_discharge(users[u].model, std::max(e, 0.0) / tau) -
                                  users[u].circuit_cost);
        // A member that stays silent transmits nothing and owes no circuit power.
        if (big_e > std::max(cap, 0.0) + tol) report("user ", u, " phase ", i, ": transmit energy above cap");
      } else if (std::abs(big_e) > tol) {
        report("user ", u, " phase ", i, ": transmit energy in a closed phase");
      }
    }
    if (drawn > users[u].battery_energy + tol) report("user ", u, " exceeds its battery budget");
  }
  return out;
}

FrameAllocation noma_frame(const std::vector<UserParams>& users, double horizon) {
  FrameAllocation a = FrameAllocation::zeros(users.size());
  const std::size_t all = a.phase_count() - 1;
  a.durations[all] = horizon;
  for (std::size_t u = 0; u < users.size(); ++u) {
    const double d = std::min(users[u].battery_energy / horizon, peak_discharge(users[u].model));
    const double p = eval_discharge(users[u].model, d) - users[u].circuit_cost;
    if (p <= 0.0) continue;
    a.drawn_energy[all][u] = horizon * d;
    a.transmit_energy[all][u] = horizon * p;
  }
  return a;
}

FrameAllocation tdma_frame(const std::vector<UserParams>& users,
                           const std::vector<double>& windows) {
  FrameAllocation a = FrameAllocation::zeros(users.size());
  for (std::size_t u = 0; u < users.size(); ++u) {
    const double w = windows.at(u);
    if (!(w > 0.0)) continue;
    const double d = std::min(users[u].battery_energy / w, peak_discharge(users[u].model));
    const double p = eval_discharge(users[u].model, d) - users[u].circuit_cost;
    if (p <= 0.0) continue;
    const std::size_t phase = std::size_t{1} << u;
    a.durations[phase] = w;
    a.drawn_energy[phase][u] = w * d;
    a.transmit_energy[phase][u] = w * p;
  }
  return a;
}

PhaseProgram full_frame_program(const std::vector<UserParams>& users, double horizon) {
  PhaseProgram program(users);
  const std::uint32_t phases = std::uint32_t{1} << users.size();
  std::vector<std::uint32_t> all;
  for (std::uint32_t m = 1; m < phases; ++m) {
    if (program.add_phase(m) >= 0) all.push_back(m);
  }
  program.add_time_limit(all, horizon);
  return program;
}

PhaseProgram::PhaseProgram(std::vector<UserParams> users) : users_(std::move(users)) {
  for (const auto& u : users_) {
    u.validate();
    const bool ok = can_power_circuit(u);
    usable_.push_back(ok);
    min_drain_.push_back(ok ? circuit_threshold(u) : 0.0);
    peak_drain_.push_back(peak_discharge(u.model));
  }
}

int PhaseProgram::add_phase(std::uint32_t members, std::optional<std::uint32_t> key) {
  const std::uint32_t k = key.value_or(members);
  if (local_phase(k) >= 0) throw Error(ErrorCode::InvalidParameters, "duplicate phase key");
  Phase p;
  p.mask = members;
  p.key = k;
  for (std::size_t u = 0; u < users_.size(); ++u) {
    if (phase_has(members, u) && usable_[u]) p.energy.emplace_back(u, 0);
  }
  if (p.energy.empty()) return -1;
  p.tau_index = dimension_++;
  for (auto& [u, idx] : p.energy) idx = dimension_++;
  phases_.push_back(std::move(p));
  return static_cast<int>(phases_.size()) - 1;
}

void PhaseProgram::add_time_limit(const std::vector<std::uint32_t>& phases, double bound) {
  TimeLimit lim;
  lim.bound = bound;
  for (auto m : phases) {
    const int p = local_phase(m);
    if (p >= 0) lim.phases.push_back(p);
  }
  if (!lim.phases.empty()) limits_.push_back(std::move(lim));
}

int PhaseProgram::local_phase(std::uint32_t key) const {
  for (std::size_t p = 0; p < phases_.size(); ++p) {
    if (phases_[p].key == key) return static_cast<int>(p);
  }
  return -1;
}

int PhaseProgram::energy_index(int local, std::size_t user) const {
  for (const auto& [u, idx] : phases_.at(local).energy) {
    if (u == user) return idx;
  }
  return -1;
}

LinearConstraintSet PhaseProgram::constraints() const {
  LinearConstraintSet cons(dimension_);
  std::vector<std::vector<std::pair<int, double>>> budget(users_.size());
  for (const auto& p : phases_) {
    cons.set_lower(p.tau_index, 0.0);
    for (const auto& [u, idx] : p.energy) {
      cons.set_lower(idx, 0.0);
      if (std::isfinite(peak_drain_[u])) {
        cons.add_row({{idx, 1.0}, {p.tau_index, -peak_drain_[u]}}, 0.0);
      }
      if (min_drain_[u] > 0.0) {
        cons.add_row({{idx, -1.0}, {p.tau_index, min_drain_[u]}}, 0.0);
      }
      budget[u].emplace_back(idx, 1.0);
    }
  }
  for (std::size_t u = 0; u < users_.size(); ++u) {
    if (!budget[u].empty()) cons.add_row(budget[u], users_[u].battery_energy);
  }
  for (const auto& lim : limits_) {
    std::vector<std::pair<int, double>> row;
    for (int p : lim.phases) row.emplace_back(phases_[p].tau_index, 1.0);
    cons.add_row(std::move(row), lim.bound);
  }
  return cons;
}

Eigen::VectorXd PhaseProgram::interior_point() const {
  std::vector<double> mid(users_.size(), 0.0);
  std::vector<int> count(users_.size(), 0);
  for (std::size_t u = 0; u < users_.size(); ++u) {
    const double lo = min_drain_[u];
    mid[u] = lo + 0.5 * (std::min(peak_drain_[u], lo + 1.0) - lo);
  }
  for (const auto& p : phases_) {
    for (const auto& [u, idx] : p.energy) ++count[u];
  }
  double theta = kUnbounded;
  for (const auto& lim : limits_) {
    theta = std::min(theta, lim.bound / static_cast<double>(lim.phases.size()));
  }
  for (std::size_t u = 0; u < users_.size(); ++u) {
    if (count[u] > 0) theta = std::min(theta, users_[u].battery_energy / (count[u] * mid[u]));
  }
  if (!std::isfinite(theta)) theta = 1.0;
  theta *= 0.5;
  Eigen::VectorXd x = Eigen::VectorXd::Zero(dimension_);
  for (const auto& p : phases_) {
    x[p.tau_index] = theta;
    for (const auto& [u, idx] : p.energy) x[idx] = theta * mid[u];
  }
  return x;
}

double PhaseProgram::evaluate(const std::vector<RateTerm>& terms, const Eigen::VectorXd& x,
                              Eigen::VectorXd* grad, Eigen::MatrixXd* hess) const {
  double value = 0.0;
  std::vector<int> idx;
  std::vector<double> d, g1, g2;
  for (const auto& term : terms) {
    const int local = local_phase(term.phase);
    if (local < 0) continue;
    const Phase& p = phases_[local];
    const double tau = x[p.tau_index];
    const bool tiny = tau < kTauFloor;
    const double te = tiny ? kTauFloor : tau;
    idx.clear();
    d.clear();
    g1.clear();
    g2.clear();
    double sv = term.noise;
    for (const auto& [u, vi] : p.energy) {
      if (!phase_has(term.signal, u)) continue;
      double du = std::max(x[vi], 0.0) / te;
      if (tiny) du = std::clamp(du, min_drain_[u], peak_drain_[u]);
      const auto& model = users_[u].model;
      sv += eval_discharge(model, du) - users_[u].circuit_cost;
      idx.push_back(vi);
      d.push_back(du);
      g1.push_back(eval_derivative(model, du));
      g2.push_back(eval_second_derivative(model, du));
    }
    if (!(sv > 0.0)) return -kUnbounded;
    const double phi = std::log(sv) - std::log(term.noise);
    const double w = term.weight;
    if (!tiny) value += w * tau * phi;
    const std::size_t k = idx.size();
    if (grad) {
      double dw = 0.0;
      for (std::size_t a = 0; a < k; ++a) {
        const double wa = g1[a] / sv;
        dw += d[a] * wa;
        (*grad)[idx[a]] += w * wa;
      }
      (*grad)[p.tau_index] += w * (phi - dw);
    }
    if (hess) {
      // Hessian of phi in d: diag(g''/S) - w w^T, then the perspective map.
      Eigen::MatrixXd hd(k, k);
      for (std::size_t a = 0; a < k; ++a) {
        for (std::size_t b = 0; b < k; ++b) {
          hd(a, b) = -(g1[a] / sv) * (g1[b] / sv) + (a == b ? g2[a] / sv : 0.0);
        }
      }
      Eigen::VectorXd dv(k);
      for (std::size_t a = 0; a < k; ++a) dv[a] = d[a];
      const Eigen::VectorXd hdd = hd * dv;
      auto& h = *hess;
      for (std::size_t a = 0; a < k; ++a) {
        for (std::size_t b = 0; b < k; ++b) h(idx[a], idx[b]) += w * hd(a, b) / te;
        h(idx[a], p.tau_index) -= w * hdd[a] / te;
        h(p.tau_index, idx[a]) -= w * hdd[a] / te;
      }
      h(p.tau_index, p.tau_index) += w * dv.dot(hdd) / te;
    }
  }
  return value;
}

SmoothConcave PhaseProgram::objective(std::vector<RateTerm> terms) const {
  return [this, terms = std::move(terms)](const Eigen::VectorXd& x, Eigen::VectorXd* g,
                                          Eigen::MatrixXd* h) { return evaluate(terms, x, g, h); };
}

std::vector<RateTerm> PhaseProgram::sum_rate_terms() const {
  std::vector<RateTerm> terms;
  for (const auto& p : phases_) terms.push_back({p.key, p.mask, 1.0, 1.0});
  return terms;
}

VectorOptimum PhaseProgram::maximize(const std::vector<RateTerm>& terms,
                                     const std::vector<SmoothConcave>& extra,
                                     std::optional<Eigen::VectorXd> start,
                                     const BarrierOptions& options) const {
  if (dimension_ == 0) {
    VectorOptimum empty;
    empty.report.status = SolveStatus::Optimal;
    empty.report.stationarity_residual = 0.0;
    empty.report.feasibility_residual = 0.0;
    return empty;
  }
  const auto cons = constraints();
  const Eigen::VectorXd x0 = start ? *start : interior_point();
  auto result = maximize_concave_barrier(objective(terms), cons, extra, x0, options);
  if (result.report.status != SolveStatus::Optimal) {
    throw SolverFailure("phase program did not converge (KKT residual " +
                            std::to_string(result.report.stationarity_residual) + ")",
                        result.report);
  }
  return result;
}

FrameAllocation PhaseProgram::allocation(const Eigen::VectorXd& x) const {
  FrameAllocation a = FrameAllocation::zeros(users_.size());
  for (const auto& p : phases_) {
    const double tau = std::max(x[p.tau_index], 0.0);
    a.durations.at(p.key) = tau;
    for (const auto& [u, idx] : p.energy) {
      const double e = std::max(x[idx], 0.0);
      a.drawn_energy[p.key][u] = e;
      if (tau > 0.0) {
        const double d = std::min(e / tau, peak_drain_[u]);
        a.transmit_energy[p.key][u] =
            std::max(0.0, tau * (eval_discharge(users_[u].model, d) - users_[u].circuit_cost));
      }
    }
  }
  return a;
}

}  // namespace macopt
