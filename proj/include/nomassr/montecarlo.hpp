#pragma once

// Monte Carlo average-SSR sweeps over transmit power or QoS target.
//
// Every sweep value is evaluated on the same channel realizations (trial t is
// always drawn from substream (seed, t)), so curves are paired across values.
// Trials that cannot meet the QoS targets contribute an SSR of zero.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <exception>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <thread>
#include <vector>

#include "nomassr/allocator.hpp"
#include "nomassr/channel.hpp"
#include "nomassr/oma.hpp"
#include "nomassr/rates.hpp"
#include "nomassr/types.hpp"
#include "nomassr/units.hpp"

namespace nomassr {

enum class SweepVariable { power_dbm, qos };

inline std::string_view to_string(SweepVariable v) {
  return v == SweepVariable::power_dbm ? "power_dbm" : "qos";
}

inline SweepVariable parse_sweep_variable(std::string_view name) {
  if (name == "power_dbm" || name == "power") return SweepVariable::power_dbm;
  if (name == "qos") return SweepVariable::qos;
  throw std::invalid_argument("unknown sweep variable '" + std::string(name) + "'");
}

struct SweepSpec {
  SweepVariable variable = SweepVariable::power_dbm;
  std::vector<double> values;
  SystemConfig base;  // the swept field is overwritten per value
  std::uint64_t n_trials = 10'000;
  std::uint64_t seed = 1;
  bool oma_enforce_qos = false;
  unsigned threads = 1;

  void validate() const {
    base.validate();
    if (n_trials < 1) throw std::invalid_argument("n_trials must be >= 1");
    if (values.empty()) throw std::invalid_argument("sweep needs at least one value");
    for (std::size_t i = 1; i < values.size(); ++i)
      if (!(values[i] > values[i - 1])) throw std::invalid_argument("sweep values must be strictly increasing");
    if (variable == SweepVariable::qos)
      for (double v : values)
        if (!(v >= 0.0)) throw std::invalid_argument("qos sweep values must be >= 0");
    if (threads < 1) throw std::invalid_argument("threads must be >= 1");
  }

  SystemConfig config_at(double value) const {
    SystemConfig cfg = base;
    if (variable == SweepVariable::power_dbm)
      cfg.total_power = dbm_to_watts(value);
    else
      cfg.qos.assign(cfg.num_users, value);
    return cfg;
  }
};

struct SweepPoint {
  double value = 0.0;
  double mean_ssr_noma = 0.0;
  double mean_ssr_oma = 0.0;
  std::uint64_t infeasible_noma = 0;
  std::uint64_t infeasible_oma = 0;  // only counted when oma_enforce_qos is set
  std::uint64_t n_trials = 0;
};

struct SweepResult {
  SweepVariable variable = SweepVariable::power_dbm;
  std::uint64_t seed = 0;
  SystemConfig base;
  std::vector<SweepPoint> points;
};

/// SSR of the closed-form allocation, or nullopt when P is below the minimum power.
inline std::optional<double> noma_optimal_ssr(const ChannelRealization& ch, const SystemConfig& cfg) {
  if (!min_power(ch.user_gains, cfg.qos, cfg.noise_power).feasible_at(cfg.total_power)) return std::nullopt;
  return secrecy_sum_rate(optimal_allocation(cfg, ch.user_gains), ch, cfg).ssr;
}

namespace detail {

/// Neumaier-compensated running sum.
class CompensatedSum {
 public:
  void add(double x) noexcept {
    const double t = sum_ + x;
    if (std::abs(sum_) >= std::abs(x))
      correction_ += (sum_ - t) + x;
    else
      correction_ += (x - t) + sum_;
    sum_ = t;
  }
  double value() const noexcept { return sum_ + correction_; }

 private:
  double sum_ = 0.0;
  double correction_ = 0.0;
};

struct TrialOutcome {
  double noma = 0.0;
  double oma = 0.0;
  bool noma_infeasible = false;
  bool oma_infeasible = false;
};

}  // namespace detail

inline SweepResult run_sweep(const SweepSpec& spec) {
  spec.validate();
  const std::size_t n_values = spec.values.size();
  const std::uint64_t n_trials = spec.n_trials;

  std::vector<SystemConfig> configs;
  configs.reserve(n_values);
  for (double v : spec.values) configs.push_back(spec.config_at(v));

  // outcomes[t * n_values + v]
  std::vector<detail::TrialOutcome> outcomes(n_trials * n_values);

  auto work = [&](std::uint64_t begin, std::uint64_t end) {
    for (std::uint64_t t = begin; t < end; ++t) {
      const auto ch = sample_channel({spec.seed, t}, spec.base);
      for (std::size_t v = 0; v < n_values; ++v) {
        auto& out = outcomes[t * n_values + v];
        const auto noma = noma_optimal_ssr(ch, configs[v]);
        out.noma = noma.value_or(0.0);
        out.noma_infeasible = !noma;
        out.oma_infeasible = spec.oma_enforce_qos && !oma_meets_qos(ch, configs[v]);
        out.oma = oma_ssr(ch, configs[v], spec.oma_enforce_qos);
      }
    }
  };

  const std::uint64_t workers = std::min<std::uint64_t>(spec.threads, n_trials);
  if (workers <= 1) {
    work(0, n_trials);
  } else {
    std::vector<std::thread> pool;
    std::vector<std::exception_ptr> errors(workers);
    const std::uint64_t chunk = (n_trials + workers - 1) / workers;
    for (std::uint64_t w = 0; w < workers; ++w) {
      const std::uint64_t begin = w * chunk;
      const std::uint64_t end = std::min(n_trials, begin + chunk);
      pool.emplace_back([&, w, begin, end] {
        try {
          work(begin, end);
        } catch (...) {
          errors[w] = std::current_exception();
        }
      });
    }
    for (auto& th : pool) th.join();
    for (auto& e : errors)
      if (e) std::rethrow_exception(e);
  }

  SweepResult result;
  result.variable = spec.variable;
  result.seed = spec.seed;
  result.base = spec.base;
  result.points.resize(n_values);
  for (std::size_t v = 0; v < n_values; ++v) {
    detail::CompensatedSum noma_sum, oma_sum;
    auto& point = result.points[v];
    point.value = spec.values[v];
    point.n_trials = n_trials;
    for (std::uint64_t t = 0; t < n_trials; ++t) {
      const auto& out = outcomes[t * n_values + v];
      noma_sum.add(out.noma);
      oma_sum.add(out.oma);
      point.infeasible_noma += out.noma_infeasible ? 1 : 0;
      point.infeasible_oma += out.oma_infeasible ? 1 : 0;
    }
    point.mean_ssr_noma = noma_sum.value() / static_cast<double>(n_trials);
    point.mean_ssr_oma = oma_sum.value() / static_cast<double>(n_trials);
  }
  return result;
}

}  // namespace nomassr
