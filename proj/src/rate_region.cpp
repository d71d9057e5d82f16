#include "macopt/rate_region.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "macopt/errors.hpp"
#include "macopt/parallel.hpp"
#include "macopt/single_user.hpp"

namespace macopt {
namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

double term(double tau, double signal, double noise_energy) {
  if (!(tau > 0.0)) return 0.0;
  return tau * std::log1p(signal / (tau + noise_energy));
}

RatePoint swap(RatePoint p) { return {p.r2, p.r1}; }

// Arc between C and D: user 2 is decoded first in the shared phase, so user 1
// is interference-free there and the target constrains user 1's rate.
std::vector<RatePoint> lower_arc(const TwoUserInstance& inst, const std::vector<double>& targets,
                                 double tol) {
  const TargetRange range = arc_target_range(inst, DecodeOrder::SecondUserFirst);
  const double slack = 1e-9 * std::max(1.0, range.hi);
  for (double t : targets) {
    if (!(t >= range.lo - slack && t <= range.hi + slack)) {
      throw Error(ErrorCode::TargetOutOfRange,
                  "target " + std::to_string(t) + " outside [" + std::to_string(range.lo) + ", " +
                      std::to_string(range.hi) + "]");
    }
  }
  std::vector<RatePoint> out(targets.size());
  if (targets.empty()) return out;

  const auto program = full_frame_program(inst.user_list(), inst.horizon);
  const auto sum_terms = program.sum_rate_terms();
  const std::vector<RateTerm> first_terms{{kFirstOnly, kFirstOnly, 1.0, 1.0},
                                          {kBothUsers, kFirstOnly, 1.0, 1.0}};
  BarrierOptions options;
  options.kkt_tolerance = tol;

  const RatePoint corner_d = corner_peer_max(inst, 1, tol);

  Eigen::VectorXd best_first, inside;
  double first_max = 0.0, first_inside = 0.0;
  if (program.dimension() > 0) {
    best_first = program.maximize(first_terms, {}, std::nullopt, options).x;
    first_max = program.evaluate(first_terms, best_first, nullptr, nullptr);
    inside = program.interior_point();
    first_inside = program.evaluate(first_terms, inside, nullptr, nullptr);
  }

  std::vector<double> sums(targets.size());
  parallel_for(targets.size(), [&](std::size_t k) {
    const double t = targets[k];
    // At C1 the only feasible rate for user 1 is its single-user optimum.
    if (t >= range.hi - slack || !(first_max > t)) {
      out[k] = {t, corner_d.r2};
      sums[k] = t + corner_d.r2;
      return;
    }
    double beta = 0.5;
    if (first_inside < t) beta = 0.5 * (first_max - t) / (first_max - first_inside);
    const Eigen::VectorXd x0 = (1.0 - beta) * best_first + beta * inside;
    const SmoothConcave keep_target = [&program, &first_terms, t](const Eigen::VectorXd& x,
                                                                 Eigen::VectorXd* g,
                                                                 Eigen::MatrixXd* h) {
      return program.evaluate(first_terms, x, g, h) - t;
    };
    const auto solved = program.maximize(sum_terms, {keep_target}, x0, options);
    sums[k] = solved.report.objective;
    out[k] = {t, solved.report.objective - t};
  });

  std::vector<std::size_t> order(targets.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](auto a, auto b) { return targets[a] < targets[b]; });
  for (std::size_t i = 1; i < order.size(); ++i) {
    if (sums[order[i]] > sums[order[i - 1]] + std::max(tol, 1e-7)) {
      SolveReport report;
      report.objective = sums[order[i]];
      throw SolverFailure("arc sum-rate increased with the target at " +
                              std::to_string(targets[order[i]]),
                          report);
    }
  }
  return out;
}

}  // namespace

double RegionBoundary::height_at(double r1) const {
  double best = kNegInf;
  for (std::size_t k = 0; k + 1 < points.size(); ++k) {
    const RatePoint& a = points[k];
    const RatePoint& b = points[k + 1];
    const double lo = std::min(a.r1, b.r1), hi = std::max(a.r1, b.r1);
    if (r1 < lo || r1 > hi) continue;
    if (hi - lo <= 1e-15 * std::max(1.0, hi)) {
      best = std::max({best, a.r2, b.r2});
    } else {
      const double w = (r1 - a.r1) / (b.r1 - a.r1);
      best = std::max(best, a.r2 + w * (b.r2 - a.r2));
    }
  }
  if (points.size() == 1 && points[0].r1 == r1) best = points[0].r2;
  return best;
}

RegionBoundary RegionBoundary::scaled(double factor) const {
  RegionBoundary out = *this;
  for (auto& p : out.points) {
    p.r1 *= factor;
    p.r2 *= factor;
  }
  return out;
}

const char* to_string(Strategy s) noexcept {
  switch (s) {
    case Strategy::Noma: return "noma";
    case Strategy::Tdma: return "tdma";
    case Strategy::Hybrid: return "hybrid";
  }
  return "unknown";
}

RatePoint sum_segment_point(const TwoUserInstance& instance, const FrameAllocation& optimum,
                            double alpha) {
  instance.validate();
  if (!(alpha >= 0.0 && alpha <= 1.0)) {
    throw Error(ErrorCode::InvalidParameters, "alpha must lie in [0, 1]");
  }
  if (optimum.phase_count() != 4 || optimum.user_count() != 2) {
    throw Error(ErrorCode::InvalidParameters, "expected a two-user frame allocation");
  }
  const auto& tau = optimum.durations;
  const auto& e = optimum.transmit_energy;
  const double t4 = tau[kBothUsers];
  const double e41 = e[kBothUsers][0], e42 = e[kBothUsers][1];
  RatePoint p;
  p.r1 = term(tau[kFirstOnly], e[kFirstOnly][0], 0.0) + alpha * term(t4, e41, e42) +
         (1.0 - alpha) * term(t4, e41, 0.0);
  p.r2 = term(tau[kSecondOnly], e[kSecondOnly][1], 0.0) + alpha * term(t4, e42, 0.0) +
         (1.0 - alpha) * term(t4, e42, e41);
  return p;
}

RatePoint corner_peer_max(const TwoUserInstance& instance, int maximizing_user, double tol) {
  instance.validate();
  if (maximizing_user != 0 && maximizing_user != 1) {
    throw Error(ErrorCode::InvalidParameters, "maximizing_user must be 0 or 1");
  }
  const std::size_t self = static_cast<std::size_t>(maximizing_user);
  const std::size_t peer = 1 - self;
  const double T = instance.horizon;
  const auto peer_best = solve_p2({instance.users[peer], T});
  if (!peer_best.feasible) {
    throw Error(ErrorCode::PeerInfeasible, "the other user cannot power its circuit");
  }
  // Keys for the solo window and the window shared with the peer's burst.
  constexpr std::uint32_t kSolo = 1, kShared = 2;
  PhaseProgram program({instance.users[self]});
  const double peer_time = peer_best.duration;
  if (T - peer_time > 1e-12 * T && program.add_phase(1, kSolo) >= 0) {
    program.add_time_limit({kSolo}, T - peer_time);
  }
  if (peer_time > 1e-12 * T && program.add_phase(1, kShared) >= 0) {
    program.add_time_limit({kShared}, peer_time);
  }
  double rate = 0.0;
  if (program.dimension() > 0) {
    BarrierOptions options;
    options.kkt_tolerance = tol;
    const std::vector<RateTerm> terms{{kSolo, 1, 1.0, 1.0},
                                      {kShared, 1, 1.0 + peer_best.transmit_power, 1.0}};
    rate = program.maximize(terms, {}, std::nullopt, options).report.objective;
  }
  return self == 0 ? RatePoint{rate, peer_best.rate} : RatePoint{peer_best.rate, rate};
}

TargetRange arc_target_range(const TwoUserInstance& instance, DecodeOrder order) {
  instance.validate();
  const auto hybrid = hybrid_sum_rate(instance);
  if (order == DecodeOrder::SecondUserFirst) {
    return {sum_segment_point(instance, hybrid.allocation, 0.0).r1,
            solve_p2({instance.users[0], instance.horizon}).rate};
  }
  return {sum_segment_point(instance, hybrid.allocation, 1.0).r2,
          solve_p2({instance.users[1], instance.horizon}).rate};
}

std::vector<RatePoint> boundary_arc(const TwoUserInstance& instance, DecodeOrder order,
                                    const std::vector<double>& targets, double tol) {
  instance.validate();
  if (order == DecodeOrder::SecondUserFirst) return lower_arc(instance, targets, tol);
  auto pts = lower_arc(instance.swapped(), targets, tol);
  for (auto& p : pts) p = swap(p);
  return pts;
}

RegionBoundary upper_concave_envelope(const RegionBoundary& raw) {
  struct Item {
    RatePoint p;
    std::size_t id;
  };
  std::vector<Item> items;
  for (std::size_t k = 0; k < raw.points.size(); ++k) items.push_back({raw.points[k], k});
  std::stable_sort(items.begin(), items.end(), [](const Item& a, const Item& b) {
    return a.p.r1 < b.p.r1 || (a.p.r1 == b.p.r1 && a.p.r2 > b.p.r2);
  });
  double scale = 1.0;
  for (const auto& it : items) scale = std::max({scale, std::abs(it.p.r1), std::abs(it.p.r2)});
  const double same = 1e-12 * scale;
  // Merge coincident points, remembering which raw ids they stand for.
  std::vector<Item> unique;
  std::vector<std::size_t> alias(raw.points.size());
  for (const auto& it : items) {
    if (!unique.empty() && std::abs(unique.back().p.r1 - it.p.r1) <= same &&
        std::abs(unique.back().p.r2 - it.p.r2) <= same) {
      alias[it.id] = unique.back().id;
      continue;
    }
    alias[it.id] = it.id;
    unique.push_back(it);
  }
  const double eps = 1e-13 * scale * scale;
  std::vector<Item> hull;
  for (const auto& it : unique) {
    while (hull.size() >= 2) {
      const RatePoint& o = hull[hull.size() - 2].p;
      const RatePoint& a = hull.back().p;
      const double cross = (a.r1 - o.r1) * (it.p.r2 - o.r2) - (a.r2 - o.r2) * (it.p.r1 - o.r1);
      if (cross > eps) {
        hull.pop_back();
      } else {
        break;
      }
    }
    hull.push_back(it);
  }
  RegionBoundary out;
  for (const auto& it : hull) out.points.push_back(it.p);
  for (const auto& [name, index] : raw.labels) {
    const std::size_t id = alias.at(index);
    std::size_t where = hull.size();
    for (std::size_t k = 0; k < hull.size(); ++k) {
      if (hull[k].id == id) where = k;
    }
    if (where == hull.size()) {
      double gap = std::numeric_limits<double>::infinity();
      const RatePoint target = raw.points[index];
      for (std::size_t k = 0; k < hull.size(); ++k) {
        const double dist = std::hypot(hull[k].p.r1 - target.r1, hull[k].p.r2 - target.r2);
        if (dist < gap) {
          gap = dist;
          where = k;
        }
      }
    }
    out.labels[name] = where;
  }
  return out;
}

RegionBoundary trace_region(const TwoUserInstance& instance, Strategy strategy, int n_arc_points) {
  instance.validate();
  if (n_arc_points < 0) throw Error(ErrorCode::InvalidParameters, "n_arc_points must be >= 0");
  const double T = instance.horizon;
  RegionBoundary raw;

  if (strategy == Strategy::Noma) {
    const auto noma = noma_sum_rate(instance);
    const double p1 = noma.allocation.transmit_energy[kBothUsers][0] / T;
    const double p2 = noma.allocation.transmit_energy[kBothUsers][1] / T;
    raw.points = {{0.0, T * std::log1p(p2)},
                  {T * std::log1p(p1 / (1.0 + p2)), T * std::log1p(p2)},
                  {T * std::log1p(p1), T * std::log1p(p2 / (1.0 + p1))},
                  {T * std::log1p(p1), 0.0}};
    return upper_concave_envelope(raw);
  }

  if (strategy == Strategy::Tdma) {
    const WindowRate first(instance.users[0], T), second(instance.users[1], T);
    const int samples = 4 * std::max(n_arc_points, 1) + 1;
    for (int k = 0; k < samples; ++k) {
      const double s = static_cast<double>(k) / (samples - 1);
      raw.points.push_back({first(s * T), second((1.0 - s) * T)});
    }
    return upper_concave_envelope(raw);
  }

  const double c1 = solve_p2({instance.users[0], T}).rate;
  const double c2 = solve_p2({instance.users[1], T}).rate;
  const auto hybrid = hybrid_sum_rate(instance);
  const RatePoint b = sum_segment_point(instance, hybrid.allocation, 1.0);
  const RatePoint c = sum_segment_point(instance, hybrid.allocation, 0.0);
  const RatePoint a = corner_peer_max(instance, 0);
  const RatePoint d = corner_peer_max(instance, 1);

  const auto interior_targets = [n_arc_points](double lo, double hi) {
    std::vector<double> t;
    if (!(hi - lo > 1e-9 * std::max(1.0, hi))) return t;
    for (int k = 1; k <= n_arc_points; ++k) t.push_back(lo + (hi - lo) * k / (n_arc_points + 1));
    return t;
  };
  // Upper arc from A down to B, as decreasing user 2 targets.
  auto upper_targets = interior_targets(b.r2, c2);
  std::reverse(upper_targets.begin(), upper_targets.end());
  const auto upper = boundary_arc(instance, DecodeOrder::FirstUserFirst, upper_targets);
  const auto lower = boundary_arc(instance, DecodeOrder::SecondUserFirst, interior_targets(c.r1, c1));

  raw.points.push_back({0.0, c2});
  raw.labels["A"] = raw.points.size();
  raw.points.push_back(a);
  raw.points.insert(raw.points.end(), upper.begin(), upper.end());
  raw.labels["B"] = raw.points.size();
  raw.points.push_back(b);
  raw.labels["C"] = raw.points.size();
  raw.points.push_back(c);
  raw.points.insert(raw.points.end(), lower.begin(), lower.end());
  raw.labels["D"] = raw.points.size();
  raw.points.push_back(d);
  raw.points.push_back({c1, 0.0});
  return upper_concave_envelope(raw);
}

double containment_excess(const RegionBoundary& inner, const RegionBoundary& outer, int samples) {
  if (inner.points.empty()) return kNegInf;
  double xmax = 0.0;
  for (const auto& p : inner.points) xmax = std::max(xmax, p.r1);
  double worst = kNegInf;
  for (int k = 0; k < samples; ++k) {
    const double x = samples > 1 ? xmax * k / (samples - 1) : 0.0;
    const double hi = outer.height_at(x);
    const double lo = inner.height_at(x);
    worst = std::max(worst, hi == kNegInf ? std::numeric_limits<double>::infinity() : lo - hi);
  }
  return worst;
}

}  // namespace macopt
