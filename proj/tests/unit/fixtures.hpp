#pragma once

#include <cmath>

#include "macopt/mac_multi_user.hpp"
#include "macopt/mac_two_user.hpp"
#include "macopt/verification.hpp"

namespace fixtures {

inline const double kLn2 = std::log(2.0);

inline double bits(double nats) { return nats / kLn2; }

// Published-figure defaults: B = 1.25 J, gamma = 0.5 W, T = 1 s.
inline macopt::MultiUserInstance figure_channel(int users, double r) {
  return macopt::identical_users(users, 1.25, r, 0.5);
}

inline macopt::TwoUserInstance figure_pair(double r) {
  return macopt::as_two_user(figure_channel(2, r));
}

}  // namespace fixtures
