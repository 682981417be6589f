#pragma once

// Equal-slot TDMA benchmark. Each user transmits alone for 1/M of the frame at
// the full power P, and the eavesdropper listens to every slot.

#include <algorithm>
#include <cstddef>
#include <stdexcept>

#include "nomassr/rates.hpp"
#include "nomassr/types.hpp"

namespace nomassr {

inline double oma_slot_rate(double gain, const SystemConfig& cfg) {
  return sinr_rate(cfg.total_power * gain, 0.0, cfg.noise_power) / static_cast<double>(cfg.num_users);
}

inline bool oma_meets_qos(const ChannelRealization& ch, const SystemConfig& cfg) {
  for (std::size_t m = 0; m < ch.size(); ++m)
    if (oma_slot_rate(ch.user_gains[m], cfg) < cfg.qos[m]) return false;
  return true;
}

/// SSR of the TDMA benchmark. With `enforce_qos`, any user whose slot rate
/// falls below Q_m zeroes the result, mirroring the NOMA infeasibility rule.
inline double oma_ssr(const ChannelRealization& ch, const SystemConfig& cfg, bool enforce_qos = false) {
  const std::size_t users = cfg.num_users;
  if (ch.size() != users) throw std::invalid_argument("channel and config disagree on the number of users");
  if (enforce_qos && !oma_meets_qos(ch, cfg)) return 0.0;
  const double eve = oma_slot_rate(ch.eve_gain, cfg);
  double total = 0.0;
  for (std::size_t m = 0; m < users; ++m) total += std::max(0.0, oma_slot_rate(ch.user_gains[m], cfg) - eve);
  return total;
}

}  // namespace nomassr
