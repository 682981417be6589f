#pragma once

#include <cstdint>
#include <random>
#include <vector>

#include "nomassr/nomassr.hpp"

namespace nomassr::testing {

/// Two users, P = 3 W, unit noise, gains (1, 4), eavesdropper gain 2, Q = (1, 1).
inline SystemConfig running_config() { return SystemConfig::uniform(2, 3.0, 1.0, 1.0); }
inline ChannelRealization running_channel() { return make_channel({1.0, 4.0}, 2.0); }

/// Reference setup: alpha = 3, 80 m, -70 dBm noise.
inline SystemConfig reference_config(std::size_t users, double power_dbm, double qos) {
  return SystemConfig::uniform(users, dbm_to_watts(power_dbm), dbm_to_watts(-70.0), qos);
}

/// Random allocation drawn uniformly from the simplex, scaled by a random budget.
inline PowerAllocation random_allocation(std::size_t users, std::mt19937_64& rng, bool full_budget = false) {
  std::exponential_distribution<double> e(1.0);
  std::uniform_real_distribution<double> u(0.1, 1.0);
  PowerAllocation a;
  a.gamma.resize(users);
  double s = 0.0;
  for (auto& g : a.gamma) s += (g = e(rng));
  const double budget = full_budget ? 1.0 : u(rng);
  for (auto& g : a.gamma) g *= budget / s;
  return a;
}

inline Instance random_feasible_instance(std::size_t users, std::mt19937_64& rng, double q_lo = 0.5,
                                         double q_hi = 2.0, double span = 10.0) {
  return draw_feasible_instance(users, rng, q_lo, q_hi, span);
}

}  // namespace nomassr::testing
