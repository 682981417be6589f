#pragma once

// Rayleigh block-fading channel sampler with path loss.
//
// Every trial owns an independent substream keyed by (seed, trial_index), so a
// trial's realization never depends on which thread drew it or in what order.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <random>
#include <stdexcept>
#include <vector>

#include "nomassr/types.hpp"

namespace nomassr {

struct ChannelSamplerSpec {
  std::uint64_t seed = 0;
  std::uint64_t trial_index = 0;
};

/// Number of users whose gain is <= eve_gain. Ties count toward m_e.
inline std::size_t locate_eve(const std::vector<double>& user_gains, double eve_gain) {
  if (!std::is_sorted(user_gains.begin(), user_gains.end()))
    throw std::invalid_argument("user gains must be sorted ascending");
  const auto it = std::upper_bound(user_gains.begin(), user_gains.end(), eve_gain);
  return static_cast<std::size_t>(it - user_gains.begin());
}

/// Sorts the user gains and fills in m_e.
inline ChannelRealization make_channel(std::vector<double> user_gains, double eve_gain) {
  if (user_gains.empty()) throw std::invalid_argument("at least one user gain is required");
  for (double g : user_gains)
    if (!(g > 0.0)) throw std::invalid_argument("channel gains must be > 0");
  if (!(eve_gain > 0.0)) throw std::invalid_argument("eavesdropper gain must be > 0");
  std::sort(user_gains.begin(), user_gains.end());
  ChannelRealization ch;
  ch.m_e = locate_eve(user_gains, eve_gain);
  ch.user_gains = std::move(user_gains);
  ch.eve_gain = eve_gain;
  return ch;
}

namespace detail {

inline std::mt19937_64 trial_engine(const ChannelSamplerSpec& spec) {
  std::seed_seq seq{static_cast<std::uint32_t>(spec.seed), static_cast<std::uint32_t>(spec.seed >> 32),
                    static_cast<std::uint32_t>(spec.trial_index),
                    static_cast<std::uint32_t>(spec.trial_index >> 32)};
  return std::mt19937_64(seq);
}

/// Uniform on the open interval (0, 1) from the top 52 bits of a 64-bit word.
/// k + 0.5 stays exactly representable, so neither endpoint is reachable.
inline double open_unit(std::uint64_t word) {
  return (static_cast<double>(word >> 12) + 0.5) * 0x1.0p-52;
}

}  // namespace detail

/// |g|^2 for g ~ CN(0, 1), i.e. Exp(1), by inverse CDF.
inline double unit_exponential(std::mt19937_64& engine) {
  return -std::log(detail::open_unit(engine()));
}

inline ChannelRealization sample_channel(const ChannelSamplerSpec& spec, const SystemConfig& cfg) {
  auto engine = detail::trial_engine(spec);
  std::vector<double> gains(cfg.num_users);
  for (std::size_t m = 0; m < cfg.num_users; ++m)
    gains[m] = std::pow(cfg.user_distances[m], -cfg.path_loss_exponent) * unit_exponential(engine);
  const double eve = std::pow(cfg.eve_distance, -cfg.path_loss_exponent) * unit_exponential(engine);
  return make_channel(std::move(gains), eve);
}

}  // namespace nomassr
