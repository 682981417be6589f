#pragma once

// Command-line front end for the nomassr library.
//
//   noma_ssr pmin      minimum total power for the QoS targets
//   noma_ssr allocate  closed-form SSR-optimal allocation and its active set
//   noma_ssr evaluate  rates and SSR of a given allocation
//   noma_ssr sweep     Monte Carlo average SSR vs power or QoS, as CSV
//   noma_ssr verify    brute-force certification of the closed form
//
// Exit codes: 0 ok, 2 usage, 3 infeasible power, 4 verification failure.

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <iomanip>
#include <limits>
#include <optional>
#include <ostream>
#include <random>
#include <sstream>
#include <stdexcept>
#include <string>
#include <system_error>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "nomassr/nomassr.hpp"

namespace nomassr::cli {

enum ExitCode : int { kOk = 0, kUsage = 2, kInfeasible = 3, kVerifyFailed = 4 };

inline constexpr std::uint64_t kDefaultSeed = 20160227;
inline constexpr double kDefaultNoiseDbm = -70.0;

inline constexpr const char* kCsvHeader = "sweep_var,sweep_value,m,scheme,mean_ssr,infeasible_count,n_trials,seed";

class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// ---------------------------------------------------------------------------
// formatting and parsing (locale independent)

/// Shortest decimal string that round-trips to the same double.
inline std::string format_double(double value) {
  if (std::isnan(value)) return "nan";
  if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), value);
  return std::string(buf, res.ptr);
}

inline std::string format_fixed(double value, int digits = 6) {
  if (!std::isfinite(value)) return format_double(value);
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), value, std::chars_format::fixed, digits);
  return std::string(buf, res.ptr);
}

inline double parse_double(const std::string& text) {
  std::string s = text;
  s.erase(std::remove_if(s.begin(), s.end(), [](unsigned char c) { return std::isspace(c); }), s.end());
  if (!s.empty() && s.front() == '+') s.erase(0, 1);
  double value = 0.0;
  const auto res = std::from_chars(s.data(), s.data() + s.size(), value);
  if (s.empty() || res.ec != std::errc() || res.ptr != s.data() + s.size())
    throw UsageError("not a number: '" + text + "'");
  return value;
}

inline std::vector<double> parse_list(const std::string& text) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(parse_double(item));
  if (out.empty()) throw UsageError("empty list");
  return out;
}

inline std::vector<double> arithmetic_range(double from, double to, double step) {
  if (!(step > 0.0)) throw UsageError("--step must be > 0");
  if (to < from) throw UsageError("--to must be >= --from");
  std::vector<double> out;
  for (std::size_t i = 0;; ++i) {
    const double v = std::round((from + static_cast<double>(i) * step) * 1e9) / 1e9;
    if (v > to + 1e-9 * step) break;
    out.push_back(v);
  }
  return out;
}

// ---------------------------------------------------------------------------
// settings: defaults < JSON config file < command-line flags

class Settings {
 public:
  void load(const std::string& path) {
    if (path.empty()) return;
    std::ifstream in(path);
    if (!in) throw UsageError("cannot open config file '" + path + "'");
    try {
      file_ = nlohmann::json::parse(in);
    } catch (const nlohmann::json::exception& e) {
      throw UsageError("config file '" + path + "': " + e.what());
    }
    if (!file_.is_object()) throw UsageError("config file must hold a JSON object");
  }

  bool has(const char* key) const { return file_.contains(key) && !file_[key].is_null(); }

  template <class T>
  T get(const CLI::Option* flag, const T& flag_value, const char* key, const T& fallback) const {
    if (flag != nullptr && flag->count() > 0) return flag_value;
    if (has(key)) {
      try {
        return file_[key].get<T>();
      } catch (const nlohmann::json::exception&) {
        throw UsageError(std::string("config key '") + key + "' has the wrong type");
      }
    }
    return fallback;
  }

  /// A list option given as "a,b,c" on the command line or a number/array in the file.
  std::optional<std::vector<double>> list(const CLI::Option* flag, const std::string& flag_value,
                                          const char* key) const {
    if (flag != nullptr && flag->count() > 0) return parse_list(flag_value);
    if (has(key)) {
      const auto& v = file_[key];
      if (v.is_number()) return std::vector<double>{v.get<double>()};
      if (v.is_array()) {
        try {
          return v.get<std::vector<double>>();
        } catch (const nlohmann::json::exception&) {
        }
      }
      throw UsageError(std::string("config key '") + key + "' must be a number or an array of numbers");
    }
    return std::nullopt;
  }

  /// Power in watts from a dBm flag, a watts flag, or the file's total_power / *_dbm keys.
  std::optional<double> power(const CLI::Option* dbm_flag, double dbm, const CLI::Option* watts_flag, double watts,
                              const char* watts_key, const char* dbm_key) const {
    if (dbm_flag != nullptr && dbm_flag->count() > 0) return dbm_to_watts(dbm);
    if (watts_flag != nullptr && watts_flag->count() > 0) return watts;
    if (has(dbm_key)) return dbm_to_watts(get<double>(nullptr, 0.0, dbm_key, 0.0));
    if (has(watts_key)) return get<double>(nullptr, 0.0, watts_key, 0.0);
    return std::nullopt;
  }

 private:
  nlohmann::json file_ = nlohmann::json::object();
};

inline std::vector<double> broadcast_qos(std::vector<double> qos, std::size_t users) {
  if (qos.size() == 1 && users > 1) qos.assign(users, qos.front());
  if (qos.size() != users)
    throw UsageError("--qos needs 1 or " + std::to_string(users) + " values, got " + std::to_string(qos.size()));
  return qos;
}

inline std::vector<double> sorted_gains(std::vector<double> gains) {
  for (double g : gains)
    if (!(g > 0.0)) throw UsageError("channel gains must be > 0");
  std::sort(gains.begin(), gains.end());
  return gains;
}

inline nlohmann::json json_number(double v) { return std::isfinite(v) ? nlohmann::json(v) : nlohmann::json(nullptr); }

// ---------------------------------------------------------------------------
// verification suite shared by `verify` and the acceptance tests

struct CheckSummary {
  std::string name;
  std::size_t instances = 0;
  std::size_t failures = 0;
  double worst_margin = std::numeric_limits<double>::infinity();  // smallest observed margin, >= 0 passes
  bool passed() const noexcept { return failures == 0; }
};

struct VerifyOptions {
  std::size_t instances = 200;
  std::vector<std::size_t> users{2, 3};
  std::uint64_t seed = kDefaultSeed;
  double perturb_gamma = 0.0;
};

inline double grid_resolution_for(std::size_t users) { return users <= 2 ? 1e-3 : 1e-2; }

/// Moves a fraction `eps` of every non-strongest coefficient to the strongest user.
inline PowerAllocation perturb_allocation(PowerAllocation alloc, double eps) {
  if (eps == 0.0 || alloc.size() < 2) return alloc;
  double freed = 0.0;
  for (std::size_t m = 0; m + 1 < alloc.size(); ++m) {
    freed += alloc.gamma[m] * eps;
    alloc.gamma[m] *= 1.0 - eps;
  }
  alloc.gamma.back() += freed;
  return alloc;
}

inline double linf_distance(const PowerAllocation& a, const PowerAllocation& b) {
  double d = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) d = std::max(d, std::abs(a.gamma[i] - b.gamma[i]));
  return d;
}

inline std::vector<CheckSummary> run_verification(const VerifyOptions& opt) {
  for (std::size_t m : opt.users) {
    if (m < 1) throw UsageError("--users entries must be >= 1");
    if (m > kMaxGridUsers)
      throw UsageError("grid oracle supports at most " + std::to_string(kMaxGridUsers) + " users, got " +
                       std::to_string(m));
  }
  if (opt.users.empty()) throw UsageError("--users must not be empty");

  CheckSummary dominance{"grid-dominance"};
  CheckSummary invariance{"eve-invariance"};
  CheckSummary tightness{"pmin-tightness"};
  CheckSummary active{"active-set"};
  std::mt19937_64 engine(opt.seed);

  for (std::size_t i = 0; i < opt.instances; ++i) {
    const std::size_t users = opt.users[i % opt.users.size()];
    const double res = grid_resolution_for(users);
    const double slack = 10.0 * res;
    const auto inst = draw_feasible_instance(users, engine);
    const auto& gains = inst.ch.user_gains;
    const auto candidate = perturb_allocation(optimal_allocation(inst.cfg, gains), opt.perturb_gamma);
    const bool candidate_feasible = satisfies_qos(candidate, gains, inst.cfg);
    const auto certificate = verify_active_set(candidate, gains, inst.cfg);
    // an allocation that misses a target reports its worst QoS shortfall as the margin
    const double qos_margin =
        candidate_feasible ? std::numeric_limits<double>::infinity()
                           : *std::min_element(certificate.qos_slacks.begin(), certificate.qos_slacks.end());

    // closed form vs exhaustive lattice search
    ++dominance.instances;
    if (const auto grid = grid_search_ssr(inst.ch, inst.cfg, res)) {
      const double margin = secrecy_sum_rate(candidate, inst.ch, inst.cfg).ssr - (grid->best_ssr - slack);
      dominance.worst_margin = std::min({dominance.worst_margin, margin, qos_margin});
      if (!candidate_feasible || margin < 0.0) ++dominance.failures;
    } else if (!candidate_feasible) {
      dominance.worst_margin = std::min(dominance.worst_margin, qos_margin);
      ++dominance.failures;
    }

    // the lattice argmax must not move with the eavesdropper (same m_e)
    ++invariance.instances;
    bool invariant = true;
    for (double scale : {0.5, 1.0, 2.0}) {
      ChannelRealization ch = inst.ch;
      ch.eve_gain *= scale;
      if (locate_eve(ch.user_gains, ch.eve_gain) != inst.ch.m_e) continue;
      const auto grid = grid_search_ssr(ch, inst.cfg, res);
      if (!grid) continue;
      const double step_margin = static_cast<double>(users - 1) * res + 1e-12 - linf_distance(grid->best_alloc, candidate);
      const double ssr_margin = secrecy_sum_rate(candidate, ch, inst.cfg).ssr - (grid->best_ssr - slack);
      invariance.worst_margin = std::min({invariance.worst_margin, step_margin, ssr_margin});
      if (step_margin < 0.0 || ssr_margin < 0.0) invariant = false;
    }
    invariance.worst_margin = std::min(invariance.worst_margin, qos_margin);
    if (!invariant || !candidate_feasible) ++invariance.failures;

    // all constraints tight at P_min, and none of them has room to spare
    ++tightness.instances;
    const auto floor = min_power(gains, inst.cfg.qos, inst.cfg.noise_power);
    const auto rates = rates_from_powers(floor.per_user_powers, gains, inst.cfg.noise_power);
    bool tight = true;
    for (std::size_t m = 0; m < users; ++m) {
      const double margin = rate_tolerance(inst.cfg.qos[m]) - std::abs(rates[m] - inst.cfg.qos[m]);
      tightness.worst_margin = std::min(tightness.worst_margin, margin);
      if (margin < 0.0) tight = false;
    }
    for (std::size_t k = 0; k < users; ++k) {
      auto reduced = floor.per_user_powers;
      reduced[k] *= 1.0 - 1e-6;
      const auto r = rates_from_powers(reduced, gains, inst.cfg.noise_power);
      bool broken = false;
      for (std::size_t m = 0; m < users; ++m)
        broken = broken || r[m] < inst.cfg.qos[m] - rate_tolerance(inst.cfg.qos[m]);
      if (!broken) tight = false;
    }
    if (!tight) ++tightness.failures;

    ++active.instances;
    if (!certificate.pass) ++active.failures;
  }
  return {dominance, invariance, tightness, active};
}

// ---------------------------------------------------------------------------
// sweep

struct SweepRequest {
  SweepVariable variable = SweepVariable::power_dbm;
  std::vector<double> values;
  std::vector<std::size_t> users{2, 3, 4};
  std::uint64_t n_trials = 10'000;
  std::uint64_t seed = kDefaultSeed;
  unsigned threads = 1;
  double power_dbm = 20.0;  // fixed power for a qos sweep
  double qos = 1.0;         // fixed target for a power sweep
  double noise_dbm = kDefaultNoiseDbm;
  double alpha = 3.0;
  double distance = 80.0;
  double eve_distance = 80.0;
  bool oma_enforce_qos = false;
};

inline void write_sweep_csv(const SweepRequest& req, std::ostream& out) {
  out << kCsvHeader << '\n';
  const std::string var(to_string(req.variable));
  for (std::size_t users : req.users) {
    SweepSpec spec;
    spec.variable = req.variable;
    spec.values = req.values;
    spec.base = SystemConfig::uniform(users, dbm_to_watts(req.power_dbm), dbm_to_watts(req.noise_dbm), req.qos,
                                      req.alpha, req.distance);
    spec.base.eve_distance = req.eve_distance;
    spec.n_trials = req.n_trials;
    spec.seed = req.seed;
    spec.threads = req.threads;
    spec.oma_enforce_qos = req.oma_enforce_qos;
    const auto result = run_sweep(spec);
    for (const auto& p : result.points) {
      const std::string prefix = var + ',' + format_double(p.value) + ',' + std::to_string(users) + ',';
      const std::string suffix = ',' + std::to_string(p.n_trials) + ',' + std::to_string(req.seed) + '\n';
      out << prefix << "noma," << format_double(p.mean_ssr_noma) << ',' << p.infeasible_noma << suffix;
      out << prefix << "oma," << format_double(p.mean_ssr_oma) << ',' << p.infeasible_oma << suffix;
    }
  }
}

// ---------------------------------------------------------------------------
// entry point

inline int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Secrecy sum rate power allocation for SISO NOMA downlinks", "noma_ssr"};
  app.require_subcommand(1);
  app.set_help_all_flag("--help-all", "Expand help for every subcommand");

  // flags shared by every subcommand
  struct Common {
    std::string config;
    bool json = false;
    std::uint64_t seed = kDefaultSeed;
    CLI::Option* seed_opt = nullptr;
  };
  auto add_common = [](CLI::App* sub, Common& c) {
    sub->add_option("--config", c.config, "JSON config file; flags override its values")->check(CLI::ExistingFile);
    sub->add_flag("--json", c.json, "Print a JSON record instead of a table");
    c.seed_opt = sub->add_option("--seed", c.seed, "RNG seed (default " + std::to_string(kDefaultSeed) + ")");
  };

  // link-level inputs shared by pmin / allocate / evaluate
  struct Link {
    std::string gains, qos = "1", gamma;
    double noise_w = 0.0, noise_dbm = kDefaultNoiseDbm, power_w = 0.0, power_dbm = 20.0, eve_gain = 0.0;
    CLI::Option *gains_opt = nullptr, *qos_opt = nullptr, *noise_w_opt = nullptr, *noise_dbm_opt = nullptr;
    CLI::Option *power_w_opt = nullptr, *power_dbm_opt = nullptr, *eve_opt = nullptr, *gamma_opt = nullptr;
  };
  auto add_link = [](CLI::App* sub, Link& l, bool with_power) {
    l.gains_opt = sub->add_option("--gains", l.gains, "User channel power gains |h_m|^2, comma separated (linear)");
    l.qos_opt = sub->add_option("--qos", l.qos, "QoS targets in bits/s/Hz: one value for all users or one per user");
    l.noise_w_opt = sub->add_option("--noise", l.noise_w, "Noise power in watts");
    l.noise_dbm_opt = sub->add_option("--noise-dbm", l.noise_dbm, "Noise power in dBm (default -70)");
    l.noise_w_opt->excludes(l.noise_dbm_opt);
    if (with_power) {
      l.power_dbm_opt = sub->add_option("--power-dbm", l.power_dbm, "Total transmit power in dBm");
      l.power_w_opt = sub->add_option("--power", l.power_w, "Total transmit power in watts");
      l.power_w_opt->excludes(l.power_dbm_opt);
      l.eve_opt = sub->add_option("--eve-gain", l.eve_gain, "Eavesdropper channel power gain |h_e|^2 (linear)");
    }
  };

  Common pmin_c, alloc_c, eval_c, sweep_c, verify_c;
  Link pmin_l, alloc_l, eval_l;

  auto* pmin = app.add_subcommand("pmin", "Minimum total power meeting every QoS target");
  add_common(pmin, pmin_c);
  add_link(pmin, pmin_l, false);

  auto* allocate = app.add_subcommand("allocate", "Closed-form SSR-optimal power allocation");
  add_common(allocate, alloc_c);
  add_link(allocate, alloc_l, true);

  auto* evaluate = app.add_subcommand("evaluate", "Rates and SSR of a given power allocation");
  add_common(evaluate, eval_c);
  add_link(evaluate, eval_l, true);
  eval_l.gamma_opt = evaluate->add_option("--gamma", eval_l.gamma, "Power allocation coefficients, comma separated");

  auto* sweep = app.add_subcommand("sweep", "Monte Carlo average SSR sweep written as CSV");
  add_common(sweep, sweep_c);
  SweepRequest sreq;
  std::string var = "power_dbm", values, users = "2,3,4", out_path;
  double from = 0.0, to = 0.0, step = 0.0;
  auto* var_opt = sweep->add_option("--var", var, "Swept quantity: power_dbm or qos");
  auto* values_opt = sweep->add_option("--values", values, "Explicit sweep values, comma separated");
  auto* from_opt = sweep->add_option("--from", from, "First sweep value");
  auto* to_opt = sweep->add_option("--to", to, "Last sweep value (inclusive)");
  auto* step_opt = sweep->add_option("--step", step, "Sweep increment");
  from_opt->needs(to_opt)->needs(step_opt);
  values_opt->excludes(from_opt);
  auto* users_opt = sweep->add_option("--users", users, "Numbers of users, comma separated (default 2,3,4)");
  auto* trials_opt = sweep->add_option("--trials", sreq.n_trials, "Channel realizations per point (default 10000)");
  auto* threads_opt = sweep->add_option("--threads", sreq.threads, "Worker threads; output does not depend on it")
                          ->check(CLI::Range(1u, 1024u));
  auto* spower_opt = sweep->add_option("--power-dbm", sreq.power_dbm, "Fixed transmit power for a qos sweep (dBm)");
  auto* sqos_opt = sweep->add_option("--qos", sreq.qos, "Fixed QoS target for a power sweep (bits/s/Hz)");
  auto* snoise_opt = sweep->add_option("--noise-dbm", sreq.noise_dbm, "Noise power in dBm");
  auto* alpha_opt = sweep->add_option("--alpha", sreq.alpha, "Path loss exponent");
  auto* dist_opt = sweep->add_option("--distance", sreq.distance, "User distance in meters");
  auto* edist_opt = sweep->add_option("--eve-distance", sreq.eve_distance, "Eavesdropper distance in meters");
  auto* enforce_opt = sweep->add_flag("--oma-enforce-qos", sreq.oma_enforce_qos,
                                      "Zero the OMA SSR when a user's slot rate misses its target");
  sweep->add_option("--out", out_path, "CSV output path (default stdout)");

  auto* verify = app.add_subcommand("verify", "Certify the closed form against brute-force oracles");
  add_common(verify, verify_c);
  VerifyOptions vopt;
  std::string vusers = "2,3";
  auto* inst_opt = verify->add_option("--instances", vopt.instances, "Random instances (default 200)");
  auto* vusers_opt = verify->add_option("--users", vusers, "Numbers of users, comma separated (default 2,3)");
  auto* perturb_opt = verify->add_option("--perturb-gamma", vopt.perturb_gamma,
                                         "Fault injection: shift this fraction of each weak user's power to the "
                                         "strongest user")
                          ->check(CLI::Range(0.0, 1.0));

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\nRun with --help for usage.\n";
    return kUsage;
  }

  auto to_sizes = [](const std::vector<double>& v, const char* what) {
    std::vector<std::size_t> out;
    for (double x : v) {
      if (!(x >= 1.0) || x != std::floor(x)) throw UsageError(std::string(what) + " entries must be positive integers");
      out.push_back(static_cast<std::size_t>(x));
    }
    return out;
  };

  try {
    // ---- pmin / allocate / evaluate
    auto link_inputs = [](const Common& c, const Link& l, Settings& s) {
      s.load(c.config);
      auto gains = s.list(l.gains_opt, l.gains, "gains");
      if (!gains) throw UsageError("--gains is required (or a 'gains' entry in --config)");
      auto sorted = sorted_gains(*gains);
      if (sorted != *gains) throw UsageError("--gains must be sorted ascending (weakest user first)");
      const auto qos = broadcast_qos(s.list(l.qos_opt, l.qos, "qos").value_or(std::vector<double>{1.0}), sorted.size());
      const double noise = s.power(l.noise_dbm_opt, l.noise_dbm, l.noise_w_opt, l.noise_w, "noise_power",
                                   "noise_power_dbm")
                               .value_or(dbm_to_watts(kDefaultNoiseDbm));
      if (!(noise > 0.0)) throw UsageError("noise power must be > 0");
      return std::tuple{std::move(sorted), qos, noise};
    };

    if (pmin->parsed()) {
      Settings s;
      const auto [gains, qos, noise] = link_inputs(pmin_c, pmin_l, s);
      const auto r = min_power(gains, qos, noise);
      if (pmin_c.json) {
        nlohmann::json j;
        j["p_min_w"] = r.p_min;
        j["p_min_dbm"] = json_number(watts_to_dbm(r.p_min));
        j["per_user_powers_w"] = r.per_user_powers;
        out << j.dump(2) << '\n';
      } else {
        out << "p_min " << format_double(r.p_min) << " W (" << format_fixed(watts_to_dbm(r.p_min), 4) << " dBm)\n";
        out << "user  gain          qos       power_w\n";
        for (std::size_t m = 0; m < gains.size(); ++m)
          out << std::left << std::setw(6) << (m + 1) << std::setw(14) << format_double(gains[m]) << std::setw(10)
              << format_double(qos[m]) << format_double(r.per_user_powers[m]) << '\n';
      }
      return kOk;
    }

    if (allocate->parsed() || evaluate->parsed()) {
      const bool is_eval = evaluate->parsed();
      const Common& c = is_eval ? eval_c : alloc_c;
      const Link& l = is_eval ? eval_l : alloc_l;
      Settings s;
      const auto [gains, qos, noise] = link_inputs(c, l, s);
      const auto power = s.power(l.power_dbm_opt, l.power_dbm, l.power_w_opt, l.power_w, "total_power",
                                 "total_power_dbm");
      if (!power) throw UsageError("--power-dbm or --power is required");
      if (!(*power > 0.0)) throw UsageError("transmit power must be > 0");
      SystemConfig cfg = SystemConfig::uniform(gains.size(), *power, noise, 0.0);
      cfg.qos = qos;
      const std::optional<double> eve =
          (l.eve_opt->count() > 0 || s.has("eve_gain")) ? std::optional(s.get<double>(l.eve_opt, l.eve_gain, "eve_gain", 0.0))
                                                         : std::nullopt;
      if (eve && !(*eve > 0.0)) throw UsageError("--eve-gain must be > 0");

      PowerAllocation alloc;
      if (is_eval) {
        const auto gamma = s.list(l.gamma_opt, l.gamma, "gamma");
        if (!gamma) throw UsageError("--gamma is required");
        alloc.gamma = *gamma;
        try {
          alloc.validate(gains.size(), 1e-9);
        } catch (const std::invalid_argument& e) {
          throw UsageError(e.what());
        }
      } else {
        try {
          alloc = optimal_allocation(cfg, gains);
        } catch (const InfeasiblePower& e) {
          err << "infeasible: transmit power " << format_fixed(watts_to_dbm(e.requested()), 4) << " dBm ("
              << format_double(e.requested()) << " W) is below the required minimum "
              << format_fixed(watts_to_dbm(e.p_min()), 4) << " dBm (" << format_double(e.p_min()) << " W)\n";
          if (c.json) {
            nlohmann::json j;
            j["error"] = "infeasible";
            j["p_min_w"] = e.p_min();
            j["p_min_dbm"] = json_number(watts_to_dbm(e.p_min()));
            out << j.dump(2) << '\n';
          }
          return kInfeasible;
        }
      }

      const auto ch = make_channel(gains, eve.value_or(gains.front()));
      const auto rates = secrecy_sum_rate(alloc, ch, cfg);
      const auto report = verify_active_set(alloc, gains, cfg);

      if (c.json) {
        nlohmann::json j;
        j["gamma"] = alloc.gamma;
        j["rates"]["user"] = rates.user_rates;
        if (eve) {
          j["rates"]["eve"] = rates.eve_rates;
          j["rates"]["secrecy"] = rates.secrecy_rates;
          j["ssr"] = rates.ssr;
          j["m_e"] = ch.m_e;
        } else {
          j["rates"]["eve"] = nullptr;
          j["rates"]["secrecy"] = nullptr;
          j["ssr"] = nullptr;
        }
        j["report"] = {{"qos_slacks", report.qos_slacks},
                       {"budget_slack", report.budget_slack},
                       {"tight_qos_count", report.tight_qos_count},
                       {"pass", report.pass}};
        j["degenerate"] = ch.has_ties();
        out << j.dump(2) << '\n';
      } else {
        out << "gamma ";
        for (std::size_t m = 0; m < alloc.size(); ++m) out << (m ? ", " : "") << format_fixed(alloc.gamma[m]);
        out << "\nuser  gamma     rate      qos       slack        ";
        if (eve) out << "eve_rate  secrecy";
        out << '\n';
        for (std::size_t m = 0; m < alloc.size(); ++m) {
          out << std::left << std::setw(6) << (m + 1) << std::setw(10) << format_fixed(alloc.gamma[m])
              << std::setw(10) << format_fixed(rates.user_rates[m]) << std::setw(10) << format_fixed(qos[m])
              << std::setw(13) << format_fixed(report.qos_slacks[m], 9);
          if (eve) out << std::setw(10) << format_fixed(rates.eve_rates[m]) << format_fixed(rates.secrecy_rates[m]);
          out << '\n';
        }
        if (eve) out << "ssr " << format_fixed(rates.ssr) << " bits/s/Hz (m_e = " << ch.m_e << ")\n";
        out << "active set " << (report.pass ? "pass" : "fail") << " (tight qos " << report.tight_qos_count << "/"
            << alloc.size() << ", budget slack " << format_double(report.budget_slack) << ")\n";
        if (ch.has_ties()) out << "warning: equal user gains, SIC order is ambiguous\n";
      }
      return kOk;
    }

    if (sweep->parsed()) {
      Settings s;
      s.load(sweep_c.config);
      sreq.variable = parse_sweep_variable(s.get<std::string>(var_opt, var, "sweep_variable", "power_dbm"));
      if (from_opt->count() > 0) {
        sreq.values = arithmetic_range(from, to, step);
      } else if (auto v = s.list(values_opt, values, "sweep_values")) {
        sreq.values = *v;
      } else {
        throw UsageError("sweep needs --values or --from/--to/--step");
      }
      if (auto u = s.list(users_opt, users, "users"))
        sreq.users = to_sizes(*u, "--users");
      else if (s.has("num_users"))
        sreq.users = {s.get<std::size_t>(nullptr, 0, "num_users", 0)};
      sreq.n_trials = s.get<std::uint64_t>(trials_opt, sreq.n_trials, "n_trials", sreq.n_trials);
      sreq.seed = s.get<std::uint64_t>(sweep_c.seed_opt, sweep_c.seed, "seed", kDefaultSeed);
      sreq.threads = s.get<unsigned>(threads_opt, sreq.threads, "threads", sreq.threads);
      if (auto p = s.power(spower_opt, sreq.power_dbm, nullptr, 0.0, "total_power", "total_power_dbm"))
        sreq.power_dbm = watts_to_dbm(*p);
      if (auto q = s.list(sqos_opt, format_double(sreq.qos), "qos")) sreq.qos = q->front();
      if (auto n = s.power(snoise_opt, sreq.noise_dbm, nullptr, 0.0, "noise_power", "noise_power_dbm"))
        sreq.noise_dbm = watts_to_dbm(*n);
      sreq.alpha = s.get<double>(alpha_opt, sreq.alpha, "path_loss_exponent", sreq.alpha);
      sreq.distance = s.get<double>(dist_opt, sreq.distance, "distance", sreq.distance);
      sreq.eve_distance = s.get<double>(edist_opt, sreq.eve_distance, "eve_distance",
                                        edist_opt->count() > 0 ? sreq.eve_distance : sreq.distance);
      sreq.oma_enforce_qos = s.get<bool>(enforce_opt, sreq.oma_enforce_qos, "oma_enforce_qos", false);
      if (sreq.threads < 1) throw UsageError("--threads must be >= 1");

      try {
        if (out_path.empty()) {
          std::ostringstream buffer;
          write_sweep_csv(sreq, buffer);
          out << buffer.str();
        } else {
          std::ostringstream buffer;
          write_sweep_csv(sreq, buffer);
          std::ofstream file(out_path, std::ios::binary);
          if (!file) throw std::runtime_error("cannot write '" + out_path + "'");
          file << buffer.str();
        }
      } catch (const std::invalid_argument& e) {
        throw UsageError(e.what());
      }
      return kOk;
    }

    if (verify->parsed()) {
      Settings s;
      s.load(verify_c.config);
      vopt.instances = s.get<std::size_t>(inst_opt, vopt.instances, "instances", vopt.instances);
      if (auto u = s.list(vusers_opt, vusers, "users")) vopt.users = to_sizes(*u, "--users");
      vopt.seed = s.get<std::uint64_t>(verify_c.seed_opt, verify_c.seed, "seed", kDefaultSeed);
      vopt.perturb_gamma = s.get<double>(perturb_opt, vopt.perturb_gamma, "perturb_gamma", 0.0);
      const auto checks = run_verification(vopt);
      bool ok = true;
      nlohmann::json j = nlohmann::json::array();
      for (const auto& c : checks) {
        ok = ok && c.passed();
        if (verify_c.json) {
          j.push_back({{"check", c.name},
                       {"instances", c.instances},
                       {"failures", c.failures},
                       {"worst_margin", json_number(c.worst_margin)},
                       {"pass", c.passed()}});
        } else {
          out << (c.passed() ? "PASS " : "FAIL ") << std::left << std::setw(16) << c.name << c.instances - c.failures
              << "/" << c.instances << " instances";
          if (std::isfinite(c.worst_margin)) out << ", worst margin " << format_double(c.worst_margin);
          out << '\n';
        }
      }
      if (verify_c.json) out << nlohmann::json{{"checks", j}, {"pass", ok}}.dump(2) << '\n';
      return ok ? kOk : kVerifyFailed;
    }
  } catch (const UsageError& e) {
    err << "error: " << e.what() << '\n';
    return kUsage;
  } catch (const std::invalid_argument& e) {
    err << "error: " << e.what() << '\n';
    return kUsage;
  }
  return kUsage;
}

inline int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  std::vector<std::string> args;
  for (int i = 1; i < argc; ++i) args.emplace_back(argv[i]);
  return run(args, out, err);
}

}  // namespace nomassr::cli
