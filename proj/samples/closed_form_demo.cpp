// Minimal library walk-through: one channel draw at the reference setup,
// its minimum power, the optimal allocation and the resulting SSR vs TDMA.

#include <iostream>

#include "nomassr/nomassr.hpp"

int main() {
  using namespace nomassr;
  auto cfg = SystemConfig::uniform(3, dbm_to_watts(20.0), dbm_to_watts(-70.0), 1.0);
  const auto ch = sample_channel({42, 0}, cfg);

  const auto floor = min_power(ch.user_gains, cfg.qos, cfg.noise_power);
  std::cout << "p_min = " << watts_to_dbm(floor.p_min) << " dBm\n";
  if (!floor.feasible_at(cfg.total_power)) {
    std::cout << "20 dBm cannot meet the QoS targets on this channel\n";
    return 0;
  }

  const auto alloc = optimal_allocation(cfg, ch.user_gains);
  const auto rates = secrecy_sum_rate(alloc, ch, cfg);
  for (std::size_t m = 0; m < alloc.size(); ++m)
    std::cout << "user " << m + 1 << ": gamma " << alloc.gamma[m] << ", rate " << rates.user_rates[m]
              << ", secrecy " << rates.secrecy_rates[m] << '\n';
  std::cout << "NOMA SSR " << rates.ssr << " bits/s/Hz, TDMA SSR " << oma_ssr(ch, cfg) << " bits/s/Hz\n";
}
