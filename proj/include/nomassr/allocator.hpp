#pragma once

// QoS feasibility and the SSR-optimal closed-form power allocation.
//
// With gains sorted ascending, user m's QoS constraint reads
//   P_m >= B_m (|h_m|^2 sum_{i>m} P_i + sigma^2),   B_m = (2^{Q_m} - 1) / |h_m|^2.
// Minimum total power makes every constraint tight and is solved from the
// strongest user down. The SSR optimum makes every constraint except the
// strongest user's tight and spends the whole budget; it is solved from the
// weakest user up, and the remainder goes to the strongest user. Neither step
// needs the eavesdropper's channel.

#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <vector>

#include "nomassr/rates.hpp"
#include "nomassr/types.hpp"

namespace nomassr {

struct FeasibilityResult {
  double p_min = 0.0;
  std::vector<double> per_user_powers;  // P_m^Min, watts

  bool feasible_at(double total_power) const noexcept { return total_power >= p_min; }
};

struct ActiveSetReport {
  std::vector<double> qos_slacks;  // R_b^m - Q_m
  double budget_slack = 0.0;       // 1 - sum(gamma)
  std::size_t tight_qos_count = 0;
  bool pass = false;
};

/// Absolute tolerance for a rate comparison against target `q`.
inline double rate_tolerance(double q, double relative = 1e-9) {
  return relative * std::max(1.0, std::abs(q));
}

namespace detail {

inline void check_gains(const std::vector<double>& gains) {
  if (gains.empty()) throw std::invalid_argument("at least one user gain is required");
  for (std::size_t i = 0; i < gains.size(); ++i) {
    if (!(gains[i] > 0.0)) throw std::invalid_argument("channel gains must be > 0");
    if (i > 0 && gains[i] < gains[i - 1]) throw std::invalid_argument("user gains must be sorted ascending");
  }
}

inline void check_qos(const std::vector<double>& qos, std::size_t users) {
  if (qos.size() != users) throw std::invalid_argument("qos length does not match the number of gains");
  for (double q : qos)
    if (!(q >= 0.0) || !std::isfinite(q)) throw std::invalid_argument("qos targets must be finite and >= 0");
}

}  // namespace detail

/// Rates of every user, computed from absolute per-user powers in watts.
inline std::vector<double> rates_from_powers(const std::vector<double>& powers,
                                             const std::vector<double>& gains, double noise) {
  std::vector<double> rates(powers.size());
  double tail = 0.0;
  for (std::size_t m = powers.size(); m-- > 0;) {
    rates[m] = sinr_rate(gains[m] * powers[m], gains[m] * tail, noise);
    tail += powers[m];
  }
  return rates;
}

inline FeasibilityResult min_power(const std::vector<double>& gains, const std::vector<double>& qos,
                                   double noise) {
  detail::check_gains(gains);
  detail::check_qos(qos, gains.size());
  if (!(noise > 0.0)) throw std::invalid_argument("noise power must be > 0");

  FeasibilityResult result;
  result.per_user_powers.assign(gains.size(), 0.0);
  double tail = 0.0;
  for (std::size_t m = gains.size(); m-- > 0;) {
    const double b = std::expm1(qos[m] * std::numbers::ln2) / gains[m];
    const double p = b * (gains[m] * tail + noise);
    result.per_user_powers[m] = p;
    tail += p;
  }
  result.p_min = tail;
  return result;
}

/// Closed-form SSR-maximizing coefficients for the gains in `cfg` order.
/// Throws InfeasiblePower when cfg.total_power is below the minimum power.
inline PowerAllocation optimal_allocation(const SystemConfig& cfg, const std::vector<double>& gains) {
  detail::check_gains(gains);
  detail::check_qos(cfg.qos, gains.size());
  const auto feasibility = min_power(gains, cfg.qos, cfg.noise_power);
  if (!feasibility.feasible_at(cfg.total_power)) throw InfeasiblePower(cfg.total_power, feasibility.p_min);

  const std::size_t users = gains.size();
  const double power = cfg.total_power;
  PowerAllocation alloc;
  alloc.gamma.assign(users, 0.0);
  double used = 0.0;
  for (std::size_t m = 0; m + 1 < users; ++m) {
    // A_m [P |h_m|^2 (1 - used) + sigma^2] / 2^{Q_m}, with A_m 2^{-Q_m} = (1 - 2^{-Q_m}) / (P |h_m|^2)
    const double share = -std::expm1(-cfg.qos[m] * std::numbers::ln2);
    const double remaining = 1.0 - used;
    alloc.gamma[m] = share * (remaining + cfg.noise_power / (power * gains[m]));
    used += alloc.gamma[m];
  }
  alloc.gamma[users - 1] = std::max(0.0, 1.0 - used);
  return alloc;
}

inline ActiveSetReport verify_active_set(const PowerAllocation& alloc, const std::vector<double>& gains,
                                         const SystemConfig& cfg, double relative_tolerance = 1e-9,
                                         double budget_tolerance = 1e-12) {
  detail::check_gains(gains);
  detail::check_qos(cfg.qos, gains.size());
  if (alloc.size() != gains.size()) throw std::invalid_argument("allocation size does not match gains");

  const std::size_t users = gains.size();
  ActiveSetReport report;
  report.qos_slacks.resize(users);
  report.budget_slack = 1.0 - alloc.sum();

  bool pass = std::abs(report.budget_slack) <= budget_tolerance;
  for (std::size_t m = 0; m < users; ++m) {
    const double tail = [&] {
      double t = 0.0;
      for (std::size_t i = m + 1; i < users; ++i) t += alloc.gamma[i];
      return t;
    }();
    const double scale = cfg.total_power * gains[m];
    const double rate = sinr_rate(scale * alloc.gamma[m], scale * tail, cfg.noise_power);
    const double slack = rate - cfg.qos[m];
    const double tol = rate_tolerance(cfg.qos[m], relative_tolerance);
    report.qos_slacks[m] = slack;
    if (std::abs(slack) <= tol) ++report.tight_qos_count;
    if (m + 1 < users) {
      if (std::abs(slack) > tol) pass = false;
    } else if (slack < -tol) {
      pass = false;
    }
  }
  report.pass = pass;
  return report;
}

/// True when every user's rate meets its target up to the relative tolerance.
inline bool satisfies_qos(const PowerAllocation& alloc, const std::vector<double>& gains,
                          const SystemConfig& cfg, double relative_tolerance = 1e-9) {
  double tail = 0.0;
  for (std::size_t m = gains.size(); m-- > 0;) {
    const double scale = cfg.total_power * gains[m];
    const double rate = sinr_rate(scale * alloc.gamma[m], scale * tail, cfg.noise_power);
    if (rate < cfg.qos[m] - rate_tolerance(cfg.qos[m], relative_tolerance)) return false;
    tail += alloc.gamma[m];
  }
  return true;
}

}  // namespace nomassr
