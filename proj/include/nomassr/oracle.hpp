#pragma once

// Brute-force checks for the closed-form allocation: exhaustive search over a
// lattice on the power simplex, and random feasible points.

#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <random>
#include <stdexcept>
#include <vector>

#include "nomassr/allocator.hpp"
#include "nomassr/channel.hpp"
#include "nomassr/rates.hpp"
#include "nomassr/types.hpp"
#include "nomassr/units.hpp"

namespace nomassr {

inline constexpr std::size_t kMaxGridUsers = 4;
inline constexpr std::uint64_t kMaxGridPoints = 20'000'000;

struct GridSearchResult {
  PowerAllocation best_alloc;
  double best_ssr = -std::numeric_limits<double>::infinity();
  std::uint64_t points_evaluated = 0;
  std::uint64_t points_feasible = 0;
};

namespace detail {

inline std::uint64_t binomial(std::uint64_t n, std::uint64_t k) {
  if (k > n) return 0;
  std::uint64_t r = 1;
  for (std::uint64_t i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return r;
}

inline std::uint64_t grid_steps(double resolution) {
  if (!(resolution > 0.0) || resolution > 1.0) throw std::invalid_argument("grid resolution must lie in (0, 1]");
  const double steps = std::round(1.0 / resolution);
  if (std::abs(steps * resolution - 1.0) > 1e-9)
    throw std::invalid_argument("grid resolution must divide 1 evenly");
  return static_cast<std::uint64_t>(steps);
}

}  // namespace detail

/// Maximizes the SSR over lattice points gamma = budget * k / K with sum(k) = K,
/// K = 1 / resolution, keeping only points that meet every QoS target.
/// Returns nullopt when no lattice point is feasible.
inline std::optional<GridSearchResult> grid_search_ssr(const ChannelRealization& ch, const SystemConfig& cfg,
                                                       double resolution, double budget = 1.0) {
  const std::size_t users = cfg.num_users;
  if (users > kMaxGridUsers)
    throw std::invalid_argument("grid search supports at most " + std::to_string(kMaxGridUsers) + " users, got " +
                                std::to_string(users));
  if (ch.size() != users) throw std::invalid_argument("channel and config disagree on the number of users");
  if (!(budget > 0.0) || budget > 1.0) throw std::invalid_argument("grid budget must lie in (0, 1]");
  const std::uint64_t steps = detail::grid_steps(resolution);
  if (detail::binomial(steps + users - 1, users - 1) > kMaxGridPoints)
    throw std::invalid_argument("grid too large; use a coarser resolution");

  GridSearchResult result;
  std::vector<std::uint64_t> units(users, 0);
  PowerAllocation candidate;
  candidate.gamma.assign(users, 0.0);

  // Stars and bars: fix the first users-1 counts, the last takes the rest.
  auto visit = [&](auto&& self, std::size_t index, std::uint64_t left) -> void {
    if (index + 1 == users) {
      units[index] = left;
      for (std::size_t i = 0; i < users; ++i)
        candidate.gamma[i] = budget * static_cast<double>(units[i]) / static_cast<double>(steps);
      ++result.points_evaluated;
      if (!satisfies_qos(candidate, ch.user_gains, cfg)) return;
      ++result.points_feasible;
      const double ssr = secrecy_sum_rate(candidate, ch, cfg).ssr;
      if (ssr > result.best_ssr) {
        result.best_ssr = ssr;
        result.best_alloc = candidate;
      }
      return;
    }
    for (std::uint64_t k = 0; k <= left; ++k) {
      units[index] = k;
      self(self, index + 1, left - k);
    }
  };
  visit(visit, 0, steps);

  if (result.points_feasible == 0) return std::nullopt;
  return result;
}

/// Random allocations that meet every QoS target with sum(gamma) <= 1.
///
/// Each user gets its tight QoS power inflated by a random surplus, working down
/// from the strongest user. Surpluses are halved until the total fits in P. A
/// random share of the leftover budget then goes to the weakest user, whose
/// signal interferes with nobody.
inline std::vector<PowerAllocation> sample_feasible(const ChannelRealization& ch, const SystemConfig& cfg,
                                                    std::size_t count, std::uint64_t seed) {
  const auto& gains = ch.user_gains;
  const auto floor = min_power(gains, cfg.qos, cfg.noise_power);
  if (!floor.feasible_at(cfg.total_power)) throw InfeasiblePower(cfg.total_power, floor.p_min);

  const std::size_t users = gains.size();
  std::vector<PowerAllocation> out;
  out.reserve(count);
  std::mt19937_64 engine(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::vector<double> surplus(users);
  std::vector<double> powers(users);

  std::size_t draws = 0;
  while (out.size() < count) {
    if (++draws > 100 * count + 100) throw std::runtime_error("could not draw feasible allocations");
    for (auto& s : surplus) s = 4.0 * unit(engine);
    double total = 0.0;
    for (int attempt = 0; attempt < 64; ++attempt) {
      total = 0.0;
      for (std::size_t m = users; m-- > 0;) {
        const double b = std::expm1(cfg.qos[m] * std::numbers::ln2) / gains[m];
        // Q_m = 0 users have no floor; draw a share of P directly
        const double tight = b * (gains[m] * total + cfg.noise_power);
        powers[m] = b > 0.0 ? tight * (1.0 + surplus[m]) : surplus[m] * cfg.total_power / users;
        total += powers[m];
      }
      if (total <= cfg.total_power) break;
      for (auto& s : surplus) s *= 0.5;
    }
    if (total > cfg.total_power) {
      powers = floor.per_user_powers;
      total = floor.p_min;
    }
    powers[0] += unit(engine) * (cfg.total_power - total);

    PowerAllocation alloc;
    alloc.gamma.resize(users);
    for (std::size_t m = 0; m < users; ++m) alloc.gamma[m] = powers[m] / cfg.total_power;
    const double sum = alloc.sum();
    if (sum > 1.0)
      for (auto& g : alloc.gamma) g /= sum;
    if (satisfies_qos(alloc, gains, cfg)) out.push_back(std::move(alloc));
  }
  return out;
}

struct Instance {
  SystemConfig cfg;
  ChannelRealization ch;
};

/// Random test instance: reference channel (alpha = 3, 80 m, -70 dBm noise),
/// Q_m uniform in [q_lo, q_hi] and P uniform in [p_min, span * p_min].
inline Instance draw_feasible_instance(std::size_t users, std::mt19937_64& engine, double q_lo = 0.5,
                                       double q_hi = 2.0, double span = 10.0) {
  Instance inst;
  inst.cfg = SystemConfig::uniform(users, 1.0, dbm_to_watts(-70.0), 0.0);
  const std::uint64_t seed = engine();
  const std::uint64_t trial = engine();
  inst.ch = sample_channel({seed, trial}, inst.cfg);
  std::uniform_real_distribution<double> qos(q_lo, q_hi);
  for (auto& q : inst.cfg.qos) q = qos(engine);
  const double p_min = min_power(inst.ch.user_gains, inst.cfg.qos, inst.cfg.noise_power).p_min;
  std::uniform_real_distribution<double> factor(1.0, span);
  inst.cfg.total_power = p_min > 0.0 ? p_min * factor(engine) : 1.0;
  return inst;
}

}  // namespace nomassr
