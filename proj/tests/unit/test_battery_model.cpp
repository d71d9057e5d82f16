#include <doctest.h>

#include <random>

#include "macopt/battery_model.hpp"
#include "macopt/errors.hpp"

using namespace macopt;

namespace {

DischargeModel sampled_quadratic(double r, int n) {
  // Samples of a quadratic battery out to its second root, so the
  // interpolant is concave on [0, 2 D0].
  const double a = kDefaultLossCoefficient * r;
  std::vector<DischargeSample> s;
  for (int k = 1; k <= n; ++k) {
    const double d = (1.0 / a) * k / n;
    s.push_back({d, d - a * d * d});
  }
  return DischargeModel::tabulated(s);
}

std::vector<DischargeModel> model_zoo(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> r(0.01, 2.0);
  std::vector<DischargeModel> zoo{DischargeModel::ideal(), DischargeModel::quadratic(0.0)};
  for (int k = 0; k < 10; ++k) {
    zoo.push_back(DischargeModel::quadratic(r(rng)));
    zoo.push_back(DischargeModel::quadratic(r(rng), 0.44));
  }
  zoo.push_back(sampled_quadratic(0.5, 40));
  zoo.push_back(sampled_quadratic(1.3, 25));
  return zoo;
}

double range_of(const DischargeModel& m) {
  const double d0 = peak_discharge(m);
  return std::isfinite(d0) ? d0 : 10.0;
}

}  // namespace

TEST_CASE("discharge examples") {
  CHECK(eval_discharge(DischargeModel::quadratic(0.0, 0.3), 1.25) == doctest::Approx(1.25));
  CHECK(eval_discharge(DischargeModel::quadratic(0.3), 1.25) ==
        doctest::Approx(1.0416667).epsilon(1e-7));
  CHECK(eval_discharge(DischargeModel::ideal(), 0.0) == 0.0);
  CHECK(eval_discharge(DischargeModel::quadratic(0.7), 0.0) == 0.0);
  CHECK_THROWS_AS(eval_discharge(DischargeModel::ideal(), -1e-3), Error);
  try {
    eval_discharge(DischargeModel::quadratic(0.3), -1.0);
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::NegativeDischarge);
  }
}

TEST_CASE("peak discharge examples") {
  CHECK(peak_discharge(DischargeModel::quadratic(0.5, 0.44)) == doctest::Approx(2.272727).epsilon(1e-6));
  CHECK(peak_discharge(DischargeModel::quadratic(0.3)) == doctest::Approx(3.75));
  CHECK(std::isinf(peak_discharge(DischargeModel::ideal())));
  CHECK(std::isinf(peak_discharge(DischargeModel::quadratic(0.0))));
  CHECK(max_delivered_power(DischargeModel::quadratic(0.3)) == doctest::Approx(1.0 / (4 * 0.3 * 4.0 / 9.0)));
}

TEST_CASE("derivative examples") {
  const auto q = DischargeModel::quadratic(0.3);
  CHECK(std::abs(eval_derivative(q, 3.75)) < 1e-12);
  CHECK(eval_derivative(DischargeModel::ideal(), 7.0) == 1.0);
  CHECK(eval_derivative(DischargeModel::quadratic(0.5, 0.44), 1.0) == doctest::Approx(0.56));
  CHECK_THROWS_AS(eval_derivative(q, -0.5), Error);
  CHECK(eval_second_derivative(q, 1.0) == doctest::Approx(-2 * 0.3 * 4.0 / 9.0));
}

TEST_CASE("quadratic past its second root clamps to zero and flags it") {
  const auto q = DischargeModel::quadratic(0.3);
  const double d0 = peak_discharge(q);
  const auto inside = evaluate_discharge(q, 1.9 * d0);
  CHECK_FALSE(inside.extrapolated);
  CHECK(inside.power > 0.0);
  const auto past = evaluate_discharge(q, 2.5 * d0);
  CHECK(past.extrapolated);
  CHECK(past.power == 0.0);
}

TEST_CASE("invalid models are rejected") {
  CHECK_THROWS_AS(DischargeModel::quadratic(-0.1), Error);
  CHECK_THROWS_AS(DischargeModel::quadratic(0.1, -1.0), Error);
  CHECK_THROWS_AS(DischargeModel::tabulated({}), Error);
  // Convex kink.
  CHECK_THROWS_AS(DischargeModel::tabulated({{1.0, 0.5}, {2.0, 1.5}}), Error);
  // Delivers more than drawn.
  CHECK_THROWS_AS(DischargeModel::tabulated({{1.0, 1.2}}), Error);
  // Not sorted.
  CHECK_THROWS_AS(DischargeModel::tabulated({{2.0, 1.0}, {1.0, 0.8}}), Error);
  // g(0) != 0.
  CHECK_THROWS_AS(DischargeModel::tabulated({{0.0, 0.1}, {1.0, 0.9}}), Error);
  try {
    DischargeModel::tabulated({{1.0, 0.5}, {2.0, 1.5}});
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::InvalidModel);
  }
}

TEST_CASE("tabulated model interpolates, finds its peak and flags extrapolation") {
  const auto t = DischargeModel::tabulated({{1.0, 0.9}, {2.0, 1.5}, {3.0, 1.7}, {4.0, 1.6}});
  REQUIRE(t.samples().size() == 5);  // (0, 0) prepended
  CHECK(eval_discharge(t, 0.5) == doctest::Approx(0.45));
  CHECK(eval_discharge(t, 2.5) == doctest::Approx(1.6));
  CHECK(peak_discharge(t) == doctest::Approx(3.0).epsilon(1e-9));
  CHECK(max_delivered_power(t) == doctest::Approx(1.7));
  CHECK(eval_derivative(t, 1.5) == doctest::Approx(0.6).epsilon(1e-6));
  const auto past = evaluate_discharge(t, 5.0);
  CHECK(past.extrapolated);
  CHECK(past.power == doctest::Approx(1.5));
  CHECK(evaluate_discharge(t, 40.0).power == 0.0);
  CHECK_FALSE(evaluate_discharge(t, 3.5).extrapolated);

  // Increasing table: the peak is the last sample.
  const auto rising = DischargeModel::tabulated({{1.0, 1.0}, {2.0, 1.8}});
  CHECK(peak_discharge(rising) == doctest::Approx(2.0));
}

TEST_CASE("lowest drain reaching a level") {
  const auto q = DischargeModel::quadratic(0.3);
  const auto root = lowest_discharge_for(q, 0.5);
  REQUIRE(root);
  CHECK(eval_discharge(q, *root) == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(*root < peak_discharge(q));
  CHECK_FALSE(lowest_discharge_for(DischargeModel::quadratic(10.0), 0.5));
  CHECK(*lowest_discharge_for(DischargeModel::ideal(), 0.7) == 0.7);
  CHECK(*lowest_discharge_for(q, 0.0) == 0.0);
  const auto t = DischargeModel::tabulated({{1.0, 0.9}, {2.0, 1.5}, {3.0, 1.7}});
  CHECK(*lowest_discharge_for(t, 1.2) == doctest::Approx(1.5));
  CHECK_FALSE(lowest_discharge_for(t, 1.8));
}

TEST_CASE("user parameters") {
  UserParams u{1.25, 0.5, DischargeModel::quadratic(0.3)};
  CHECK_NOTHROW(u.validate());
  CHECK(can_power_circuit(u));
  CHECK(eval_discharge(u.model, circuit_threshold(u)) == doctest::Approx(0.5));
  UserParams weak{1.25, 0.5, DischargeModel::quadratic(10.0)};
  CHECK_FALSE(can_power_circuit(weak));
  CHECK_THROWS_AS(circuit_threshold(weak), Error);
  CHECK_THROWS_AS((UserParams{0.0, 0.5}.validate()), Error);
  CHECK_THROWS_AS((UserParams{1.0, -0.1}.validate()), Error);
  try {
    UserParams{-1.0, 0.0}.validate();
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::InvalidParameters);
  }
}

TEST_CASE("property: 0 <= g(d) <= d and g non-decreasing up to D0") {
  std::mt19937_64 rng(1);
  for (const auto& m : model_zoo(rng)) {
    std::uniform_real_distribution<double> d(0.0, range_of(m));
    for (int k = 0; k < 200; ++k) {
      double a = d(rng), b = d(rng);
      if (a > b) std::swap(a, b);
      const double ga = eval_discharge(m, a), gb = eval_discharge(m, b);
      CHECK(ga >= 0.0);
      CHECK(ga <= a + 1e-12);
      CHECK(ga <= gb + 1e-12);
    }
  }
}

TEST_CASE("property: concavity on [0, 2 D0]") {
  std::mt19937_64 rng(2);
  for (const auto& m : model_zoo(rng)) {
    std::uniform_real_distribution<double> d(0.0, 2.0 * range_of(m)), lam(0.0, 1.0);
    for (int k = 0; k < 200; ++k) {
      const double a = d(rng), b = d(rng), l = lam(rng);
      CHECK(eval_discharge(m, l * a + (1 - l) * b) >=
            l * eval_discharge(m, a) + (1 - l) * eval_discharge(m, b) - 1e-9);
    }
  }
}

TEST_CASE("property: derivative matches finite differences") {
  std::mt19937_64 rng(3);
  for (const auto& m : model_zoo(rng)) {
    std::uniform_real_distribution<double> d(0.05 * range_of(m), 0.95 * range_of(m));
    for (int k = 0; k < 50; ++k) {
      double x = d(rng);
      if (m.kind() == DischargeKind::Tabulated) {
        // Stay away from the knots, where the slope jumps.
        const auto& s = m.samples();
        const double step = s[2].drawn - s[1].drawn;
        x = (std::floor(x / step) + 0.5) * step;
      }
      const double h = 1e-6 * std::max(1.0, x);
      const double fd = (eval_discharge(m, x + h) - eval_discharge(m, x - h)) / (2 * h);
      const double g1 = eval_derivative(m, x);
      CHECK(std::abs(g1 - fd) <= 1e-6 * std::max(1.0, std::abs(g1)));
    }
  }
}

TEST_CASE("property: derivative vanishes at the quadratic peak") {
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> r(1e-3, 5.0), k(0.1, 1.0);
  for (int i = 0; i < 100; ++i) {
    const auto m = DischargeModel::quadratic(r(rng), k(rng));
    CHECK(std::abs(eval_derivative(m, peak_discharge(m))) <= 1e-8);
  }
}
