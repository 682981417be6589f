#pragma once

// Achievable-rate engine for the SISO NOMA downlink with SIC.
//
// Users are indexed from 0 in ascending order of channel gain. User m decodes
// and cancels the signals of users 0..m-1 and treats users m+1..M-1 as noise.
// The eavesdropper is modelled pessimistically: it has already cancelled every
// weaker user's message before decoding user m.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numbers>
#include <stdexcept>
#include <string>
#include <vector>

#include "nomassr/types.hpp"

namespace nomassr {

namespace detail {

inline void check_user_index(std::size_t m, std::size_t users) {
  if (m >= users)
    throw std::out_of_range("user index " + std::to_string(m) + " out of range for " +
                            std::to_string(users) + " users");
}

inline void check_shapes(const PowerAllocation& alloc, const ChannelRealization& ch,
                         const SystemConfig& cfg) {
  if (ch.size() != cfg.num_users || alloc.size() != cfg.num_users)
    throw std::invalid_argument("allocation, channel and config disagree on the number of users");
}

/// tail[m] = sum of gamma[i] for i > m, accumulated from the strongest user down
/// so the last entry is exactly zero.
inline std::vector<double> interference_tails(const std::vector<double>& gamma) {
  std::vector<double> tail(gamma.size(), 0.0);
  double acc = 0.0;
  for (std::size_t i = gamma.size(); i-- > 0;) {
    tail[i] = acc;
    acc += gamma[i];
  }
  return tail;
}

}  // namespace detail

/// log2(1 + signal / (interference + noise)), all in watts.
inline double sinr_rate(double signal, double interference, double noise) {
  return std::log1p(signal / (interference + noise)) / std::numbers::ln2;
}

/// Rate of a receiver with power gain `gain` decoding user m's message after
/// cancelling users 0..m-1.
inline double decoding_rate(std::size_t m, double gain, const PowerAllocation& alloc,
                            const SystemConfig& cfg) {
  detail::check_user_index(m, alloc.size());
  double tail = 0.0;
  for (std::size_t i = m + 1; i < alloc.size(); ++i) tail += alloc.gamma[i];
  const double scaled = cfg.total_power * gain;
  return sinr_rate(scaled * alloc.gamma[m], scaled * tail, cfg.noise_power);
}

inline double user_rate(std::size_t m, const PowerAllocation& alloc, const ChannelRealization& ch,
                        const SystemConfig& cfg) {
  detail::check_user_index(m, ch.size());
  return decoding_rate(m, ch.user_gains[m], alloc, cfg);
}

inline double eve_rate(std::size_t m, const PowerAllocation& alloc, const ChannelRealization& ch,
                       const SystemConfig& cfg) {
  detail::check_user_index(m, ch.size());
  return decoding_rate(m, ch.eve_gain, alloc, cfg);
}

/// Per-user legitimate, eavesdropper and clamped secrecy rates plus their sum.
inline RateReport secrecy_sum_rate(const PowerAllocation& alloc, const ChannelRealization& ch,
                                   const SystemConfig& cfg) {
  detail::check_shapes(alloc, ch, cfg);
  const std::size_t users = cfg.num_users;
  const auto tail = detail::interference_tails(alloc.gamma);

  RateReport report;
  report.user_rates.resize(users);
  report.eve_rates.resize(users);
  report.secrecy_rates.resize(users);
  report.degenerate = ch.has_ties();
  for (std::size_t m = 0; m < users; ++m) {
    const double user_scale = cfg.total_power * ch.user_gains[m];
    const double eve_scale = cfg.total_power * ch.eve_gain;
    report.user_rates[m] =
        sinr_rate(user_scale * alloc.gamma[m], user_scale * tail[m], cfg.noise_power);
    report.eve_rates[m] =
        sinr_rate(eve_scale * alloc.gamma[m], eve_scale * tail[m], cfg.noise_power);
    report.secrecy_rates[m] = std::max(0.0, report.user_rates[m] - report.eve_rates[m]);
    report.ssr += report.secrecy_rates[m];
  }
  return report;
}

/// J_k(t) = log2(C_{k+1} t + sigma^2) - log2(C_k t + sigma^2).
///
/// `k` counts the users left out of the tail sum t = sum_{i>=k} gamma_i and must
/// lie in [m_e, M-1]. C_k is P|h_e|^2 for k == m_e and P|h_{k-1}|^2 otherwise;
/// C_{k+1} is P|h_k|^2 (zero-based gains).
inline double j_function(std::size_t k, double t, const ChannelRealization& ch,
                         const SystemConfig& cfg) {
  const std::size_t users = ch.size();
  if (k < ch.m_e || k + 1 > users)
    throw std::out_of_range("J index " + std::to_string(k) + " outside [" +
                            std::to_string(ch.m_e) + ", " + std::to_string(users) + "-1]");
  if (!(t >= 0.0) || t > 1.0 + 1e-12) throw std::invalid_argument("tail fraction must lie in [0, 1]");
  const double lower = cfg.total_power * (k == ch.m_e ? ch.eve_gain : ch.user_gains[k - 1]);
  const double upper = cfg.total_power * ch.user_gains[k];
  const double noise = cfg.noise_power;
  return std::log2((upper * t + noise) / (lower * t + noise));
}

/// SSR summed only over users stronger than the eavesdropper, evaluated as the
/// telescoped sum of J_k over k = m_e..M-1. Zero when m_e == M.
inline double secrecy_sum_rate_reduced(const PowerAllocation& alloc, const ChannelRealization& ch,
                                       const SystemConfig& cfg) {
  detail::check_shapes(alloc, ch, cfg);
  const std::size_t users = cfg.num_users;
  const auto tail = detail::interference_tails(alloc.gamma);
  double total = 0.0;
  for (std::size_t k = ch.m_e; k < users; ++k) {
    // users k..M-1 form the tail; tail[k] excludes user k itself
    const double t = tail[k] + alloc.gamma[k];
    total += j_function(k, t, ch, cfg);
  }
  return total;
}

}  // namespace nomassr
