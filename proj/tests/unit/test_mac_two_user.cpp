#include <doctest.h>

#include <random>

#include "macopt/errors.hpp"
#include "macopt/mac_two_user.hpp"
#include "macopt/single_user.hpp"
#include "fixtures.hpp"

using namespace macopt;
using fixtures::bits;

namespace {

void check_valid(const TwoUserInstance& inst, const FrameAllocation& a) {
  const auto v = allocation_violations(inst.user_list(), inst.horizon, a, 1e-7);
  for (const auto& msg : v) INFO(msg);
  CHECK(v.empty());
}

}  // namespace

TEST_CASE("NOMA examples") {
  CHECK(bits(noma_sum_rate(fixtures::figure_pair(0.3)).rate) ==
        doctest::Approx(1.058894).epsilon(1e-6));

  // gamma equal to the delivered power leaves nothing to transmit.
  const double g = eval_discharge(DischargeModel::quadratic(0.3), 1.25);
  const auto none = as_two_user(identical_users(2, 1.25, 0.3, g));
  CHECK(std::abs(noma_sum_rate(none).rate) <= 1e-12);

  const auto ideal = as_two_user(identical_users(2, 1.0, 0.0, 0.0));
  CHECK(noma_sum_rate(ideal).rate == doctest::Approx(std::log(3.0)));
}

TEST_CASE("TDMA examples") {
  const auto t = tdma_sum_rate(fixtures::figure_pair(0.3));
  CHECK(bits(t.rate) == doctest::Approx(1.115477).epsilon(1e-6));
  CHECK(t.first_duration == doctest::Approx(0.5).epsilon(1e-6));
  CHECK(t.second_duration == doctest::Approx(0.5).epsilon(1e-6));

  const auto ideal = as_two_user(identical_users(2, 1.0, 0.0, 0.0));
  const auto ti = tdma_sum_rate(ideal);
  CHECK(ti.first_duration == doctest::Approx(0.5));
  CHECK(ti.rate == doctest::Approx(std::log(3.0)));

  // A user that cannot power its circuit leaves the frame to the other.
  auto inst = fixtures::figure_pair(0.3);
  inst.users[1].model = DischargeModel::quadratic(10.0);
  const auto lone = tdma_sum_rate(inst);
  CHECK(lone.rate == doctest::Approx(solve_p2({inst.users[0], 1.0}).rate).epsilon(1e-9));
  CHECK(lone.second_duration == 0.0);
}

TEST_CASE("property: both TDMA methods agree") {
  std::mt19937_64 rng(31);
  for (int k = 0; k < 20; ++k) {
    const auto inst = as_two_user(random_channel(rng, 2));
    const auto a = tdma_sum_rate(inst, 1e-10, TdmaMethod::EqualMarginal);
    const auto b = tdma_sum_rate(inst, 1e-10, TdmaMethod::GoldenSection);
    CHECK(std::abs(a.rate - b.rate) <= 1e-8);
  }
}

TEST_CASE("hybrid examples") {
  const auto h = hybrid_sum_rate(fixtures::figure_pair(0.3));
  CHECK(bits(h.rate) == doctest::Approx(1.127923).epsilon(1e-3));
  CHECK(h.report.status == SolveStatus::Optimal);
  CHECK(bits(hybrid_sum_rate(fixtures::figure_pair(0.5)).rate) ==
        doctest::Approx(0.864521).epsilon(1e-3));

  // No loss and no circuit cost: superposition adds nothing over time sharing.
  const auto ideal = as_two_user(identical_users(2, 1.0, 0.0, 0.0));
  CHECK(hybrid_sum_rate(ideal).rate == doctest::Approx(tdma_sum_rate(ideal).rate).epsilon(1e-6));
}

TEST_CASE("grid search oracle examples") {
  const auto inst = fixtures::figure_pair(0.3);
  const double h = bits(hybrid_sum_rate(inst).rate);
  const double g20 = bits(brute_force_hybrid(inst, 20));
  CHECK(g20 <= h + 1e-6);
  CHECK(h - g20 <= 5e-3);
  const double g4 = bits(brute_force_hybrid(inst, 4));
  CHECK(g4 <= h + 1e-6);
  CHECK(bits(brute_force_hybrid(inst, 10)) <= g20 + 1e-6);
  CHECK_THROWS_AS(brute_force_hybrid(inst, 2), Error);
}

TEST_CASE("property: hybrid dominates both pure strategies") {
  std::mt19937_64 rng(32);
  for (int k = 0; k < 20; ++k) {
    const auto inst = as_two_user(random_channel(rng, 2));
    const auto h = hybrid_sum_rate(inst);
    const auto n = noma_sum_rate(inst);
    const auto t = tdma_sum_rate(inst);
    CHECK(h.rate >= n.rate - 1e-6);
    CHECK(h.rate >= t.rate - 1e-6);
    check_valid(inst, h.allocation);
    check_valid(inst, n.allocation);
    check_valid(inst, t.allocation);
    CHECK(std::abs(hybrid_objective(h.allocation) - h.rate) <= 1e-9);
    CHECK(std::abs(hybrid_objective(t.allocation) - t.rate) <= 1e-9);
    CHECK(std::abs(hybrid_objective(n.allocation) - n.rate) <= 1e-9);
  }
}

TEST_CASE("property: superposition wins for lossy batteries without circuit cost") {
  for (int k = 1; k <= 10; ++k) {
    const auto inst = as_two_user(identical_users(2, 0.25, 0.1 * k, 0.0));
    CHECK(noma_sum_rate(inst).rate > tdma_sum_rate(inst).rate);
  }
}

TEST_CASE("property: time sharing wins for ideal batteries with circuit cost") {
  std::mt19937_64 rng(33);
  std::uniform_real_distribution<double> b(0.3, 2.0), g(0.05, 1.0);
  for (int k = 0; k < 20; ++k) {
    TwoUserInstance inst{{UserParams{b(rng), g(rng), DischargeModel::ideal()},
                          UserParams{b(rng), g(rng), DischargeModel::ideal()}},
                         1.0};
    CHECK(tdma_sum_rate(inst).rate >= noma_sum_rate(inst).rate - 1e-12);
  }
}

TEST_CASE("invalid instances are rejected") {
  auto inst = fixtures::figure_pair(0.3);
  inst.horizon = 0.0;
  CHECK_THROWS_AS(hybrid_sum_rate(inst), Error);
  CHECK_THROWS_AS(noma_sum_rate(inst), Error);
}
