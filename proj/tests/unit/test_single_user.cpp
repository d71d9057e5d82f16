#include <doctest.h>

#include <random>

#include "macopt/errors.hpp"
#include "macopt/single_user.hpp"
#include "macopt/verification.hpp"

using namespace macopt;

namespace {

SingleUserProblem problem(double b, double gamma, DischargeModel m, double t = 1.0) {
  return {{b, gamma, m}, t};
}

}  // namespace

TEST_CASE("single-user examples") {
  const auto ideal = solve_p2(problem(1.25, 0.5, DischargeModel::ideal()));
  REQUIRE(ideal.feasible);
  // Optimal drain x solves (0.5 + x) ln(0.5 + x) = x, x ~ 1.651.
  CHECK(ideal.duration == doctest::Approx(1.25 / 1.651).epsilon(2e-3));
  CHECK(ideal.rate == doctest::Approx(ideal.duration * std::log(1 + 1.25 / ideal.duration - 0.5)));

  const auto free_circuit = solve_p2(problem(1.0, 0.0, DischargeModel::ideal()));
  CHECK(free_circuit.duration == doctest::Approx(1.0));
  CHECK(free_circuit.transmit_power == doctest::Approx(1.0));
  CHECK(free_circuit.rate == doctest::Approx(std::log(2.0)));

  const auto weak = solve_p2(problem(1.25, 0.5, DischargeModel::quadratic(10.0)));
  CHECK_FALSE(weak.feasible);
  CHECK(weak.rate == 0.0);
}

TEST_CASE("grid search examples") {
  const auto p = problem(1.25, 0.5, DischargeModel::quadratic(0.3));
  const auto fast = solve_p2(p);
  const auto grid = brute_force_p1(p, 2000);
  CHECK(grid.rate <= fast.rate + 1e-12);
  CHECK(fast.rate - grid.rate <= 1e-3);

  const auto weak = problem(1.25, 0.5, DischargeModel::quadratic(10.0));
  CHECK_FALSE(brute_force_p1(weak, 200).feasible);
  CHECK_FALSE(solve_p2(weak).feasible);

  const auto tiny = problem(1e-9, 0.0, DischargeModel::quadratic(0.3));
  CHECK(brute_force_p1(tiny, 200).rate == doctest::Approx(0.0).epsilon(1e-8));
}

TEST_CASE("stationarity residual examples") {
  const auto p = problem(1.25, 0.5, DischargeModel::ideal());
  const auto s = solve_p2(p);
  CHECK(stationarity_residual_p2(p, s.duration) <= 1e-6);
  CHECK(stationarity_residual_p2(p, 1.25 / 1.651) <= 1e-2);

  const auto q = problem(1.25, 0.5, DischargeModel::quadratic(0.3));
  try {
    stationarity_residual_p2(q, 1.0);  // tau = T is not interior
    FAIL("expected OutOfInteriorRange");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::OutOfInteriorRange);
  }
  CHECK_THROWS_AS(stationarity_residual_p2(q, 0.2), Error);  // B / tau > D0

  // No circuit cost: the optimum is tau = T, not a stationary point.
  const auto free_circuit = problem(1.0, 0.0, DischargeModel::ideal());
  CHECK(stationarity_residual_p2(free_circuit, 0.5) > 0.0);
}

TEST_CASE("linearity in the budget examples") {
  const auto rep = check_linearity_in_B(problem(1.0, 0.5, DischargeModel::ideal(), 10.0),
                                        {0.5, 1.0, 1.5});
  CHECK(rep.passed);
  for (const auto& e : rep.entries) {
    CHECK(e.interior);
    CHECK(e.ratio == doctest::Approx(1.651).epsilon(2e-3));
  }
  CHECK(rep.relative_spread <= 1e-4);

  // Budgets large enough that tau* = T.
  const auto sat = check_linearity_in_B(problem(1.0, 0.5, DischargeModel::ideal(), 1.0), {3.0, 4.0});
  for (const auto& e : sat.entries) CHECK(e.solution.duration == doctest::Approx(1.0));
  CHECK_FALSE(sat.note.empty());

  const auto dup = check_linearity_in_B(problem(1.0, 0.5, DischargeModel::ideal(), 10.0), {1.0, 1.0});
  CHECK(dup.entries[0].solution.duration == dup.entries[1].solution.duration);
}

TEST_CASE("property: fast solver matches the grid search") {
  std::mt19937_64 rng(kSuiteSeed);
  for (int k = 0; k < 10; ++k) {
    const auto p = random_single_user(rng);
    const auto fast = solve_p2(p);
    const auto grid = brute_force_p1(p, 2000);
    CHECK(fast.feasible == grid.feasible);
    CHECK(grid.rate <= fast.rate + 1e-12);
    CHECK(std::abs(fast.rate - grid.rate) <= 2e-3);
  }
}

TEST_CASE("property: the budget is exhausted when the optimum is below D0") {
  std::mt19937_64 rng(21);
  for (int k = 0; k < 50; ++k) {
    const auto p = random_single_user(rng);
    const auto s = solve_p2(p);
    if (!s.feasible) continue;
    const double d0 = peak_discharge(p.user.model);
    if (p.user.battery_energy / s.duration < d0 - 1e-9) {
      CHECK(s.discharge * s.duration == doctest::Approx(p.user.battery_energy).epsilon(1e-9));
    }
    CHECK(s.discharge <= d0 + 1e-9);
    CHECK(s.duration <= p.horizon + 1e-12);
  }
}

TEST_CASE("property: rate is monotone in the budget and the circuit cost") {
  std::mt19937_64 rng(22);
  std::uniform_real_distribution<double> grow(1.0, 2.0);
  for (int k = 0; k < 50; ++k) {
    auto p = random_single_user(rng);
    const double base = solve_p2(p).rate;
    auto richer = p;
    richer.user.battery_energy *= grow(rng);
    CHECK(solve_p2(richer).rate >= base - 1e-12);
    auto costlier = p;
    costlier.user.circuit_cost *= grow(rng);
    CHECK(solve_p2(costlier).rate <= base + 1e-12);
  }
}

TEST_CASE("property: interior optima are stationary") {
  std::mt19937_64 rng(23);
  int interior = 0;
  for (int k = 0; k < 100; ++k) {
    const auto p = random_single_user(rng);
    const auto s = solve_p2(p);
    if (!s.feasible) continue;
    const double d0 = peak_discharge(p.user.model);
    const double lo = p.user.battery_energy / d0;
    if (s.duration > lo * (1 + 1e-6) && s.duration < p.horizon * (1 - 1e-6)) {
      ++interior;
      CHECK(stationarity_residual_p2(p, s.duration) <= 1e-6);
    }
  }
  CHECK(interior > 5);
}

TEST_CASE("window rate is concave and non-decreasing") {
  const UserParams u{1.25, 0.5, DischargeModel::quadratic(0.3)};
  const WindowRate w(u, 1.0);
  REQUIRE(w.usable());
  double prev = -1.0;
  for (int k = 0; k <= 100; ++k) {
    const double t = k / 100.0;
    CHECK(w(t) >= prev - 1e-12);
    prev = w(t);
    if (k > 0 && k < 100) {
      CHECK(w(t) >= 0.5 * (w(t - 0.01) + w(t + 0.01)) - 1e-12);
    }
  }
  CHECK(w(1.0) == doctest::Approx(solve_p2({u, 1.0}).rate));
  const double slope = w.marginal(0.5 * w.saturation());
  CHECK(w.window_for_slope(slope) >= 0.5 * w.saturation() - 1e-9);
}

TEST_CASE("equal-marginal split") {
  // Saturating users split the frame evenly when they are identical.
  const UserParams u{1.0, 0.0, DischargeModel::quadratic(1.0)};
  const std::vector<WindowRate> users(3, WindowRate(u, 1.0));
  const auto split = equal_marginal_split(users, 1.0);
  REQUIRE(split.size() == 3);
  for (double s : split) CHECK(s == doctest::Approx(1.0 / 3).epsilon(1e-8));

  std::mt19937_64 rng(24);
  for (int k = 0; k < 20; ++k) {
    const auto inst = random_channel(rng, 3);
    std::vector<WindowRate> w;
    for (const auto& v : inst.users) w.emplace_back(v, inst.horizon);
    const auto s = equal_marginal_split(w, inst.horizon);
    double total = 0;
    for (double x : s) total += x;
    CHECK(total <= inst.horizon + 1e-9);
  }
}
