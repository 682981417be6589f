#pragma once

#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace nomassr {

/// Physical setup shared by every operation. All powers are linear watts.
struct SystemConfig {
  std::size_t num_users = 1;
  double total_power = 1.0;  // P
  double noise_power = 1.0;  // sigma_n^2
  std::vector<double> qos;   // minimum rate per user, bits/s/Hz
  double path_loss_exponent = 3.0;
  std::vector<double> user_distances;  // meters, one per user
  double eve_distance = 80.0;

  /// Builds a config with identical QoS targets and distances for every user.
  static SystemConfig uniform(std::size_t users, double power, double noise,
                              double qos_rate, double alpha = 3.0,
                              double distance = 80.0) {
    SystemConfig cfg;
    cfg.num_users = users;
    cfg.total_power = power;
    cfg.noise_power = noise;
    cfg.qos.assign(users, qos_rate);
    cfg.path_loss_exponent = alpha;
    cfg.user_distances.assign(users, distance);
    cfg.eve_distance = distance;
    return cfg;
  }

  void validate() const {
    if (num_users < 1) throw std::invalid_argument("num_users must be >= 1");
    if (!(total_power > 0.0)) throw std::invalid_argument("total_power must be > 0");
    if (!(noise_power > 0.0)) throw std::invalid_argument("noise_power must be > 0");
    if (qos.size() != num_users)
      throw std::invalid_argument("qos length " + std::to_string(qos.size()) +
                                  " does not match num_users " + std::to_string(num_users));
    for (double q : qos)
      if (!(q >= 0.0) || !std::isfinite(q)) throw std::invalid_argument("qos targets must be finite and >= 0");
    if (!(path_loss_exponent > 0.0)) throw std::invalid_argument("path_loss_exponent must be > 0");
    if (user_distances.size() != num_users)
      throw std::invalid_argument("user_distances length does not match num_users");
    for (double d : user_distances)
      if (!(d > 0.0)) throw std::invalid_argument("distances must be > 0");
    if (!(eve_distance > 0.0)) throw std::invalid_argument("eve_distance must be > 0");
  }
};

/// Channel power gains |h_m|^2 sorted ascending, the eavesdropper gain |h_e|^2,
/// and the number of users whose gain does not exceed the eavesdropper's.
struct ChannelRealization {
  std::vector<double> user_gains;
  double eve_gain = 0.0;
  std::size_t m_e = 0;

  std::size_t size() const noexcept { return user_gains.size(); }

  /// True when two adjacent users share a gain, leaving the SIC order ambiguous.
  bool has_ties() const noexcept {
    for (std::size_t i = 1; i < user_gains.size(); ++i)
      if (user_gains[i] == user_gains[i - 1]) return true;
    return false;
  }
};

/// Fractions of the total power assigned to each user's signal.
struct PowerAllocation {
  std::vector<double> gamma;

  std::size_t size() const noexcept { return gamma.size(); }

  double sum() const noexcept {
    double s = 0.0;
    for (double g : gamma) s += g;
    return s;
  }

  void validate(std::size_t users, double tolerance = 1e-12) const {
    if (gamma.size() != users)
      throw std::invalid_argument("allocation has " + std::to_string(gamma.size()) +
                                  " coefficients, expected " + std::to_string(users));
    for (double g : gamma)
      if (!(g >= 0.0) || !std::isfinite(g)) throw std::invalid_argument("allocation coefficients must be >= 0");
    if (sum() > 1.0 + tolerance) throw std::invalid_argument("allocation exceeds the power budget");
  }
};

struct RateReport {
  std::vector<double> user_rates;     // R_b^m
  std::vector<double> eve_rates;      // R_e^m
  std::vector<double> secrecy_rates;  // max(0, R_b^m - R_e^m)
  double ssr = 0.0;
  bool degenerate = false;  // equal adjacent user gains
};

/// Thrown when the requested total power cannot meet every QoS target.
class InfeasiblePower : public std::runtime_error {
 public:
  InfeasiblePower(double requested, double p_min)
      : std::runtime_error("transmit power " + std::to_string(requested) +
                           " W is below the minimum " + std::to_string(p_min) +
                           " W required by the QoS targets"),
        requested_(requested),
        p_min_(p_min) {}

  double requested() const noexcept { return requested_; }
  double p_min() const noexcept { return p_min_; }

 private:
  double requested_;
  double p_min_;
};

}  // namespace nomassr
