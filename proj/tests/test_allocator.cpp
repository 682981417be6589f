#include <gtest/gtest.h>

#include <random>

#include "fixtures.hpp"
#include "nomassr/allocator.hpp"
#include "nomassr/oracle.hpp"

using namespace nomassr;
using nomassr::testing::random_feasible_instance;
using nomassr::testing::running_channel;
using nomassr::testing::running_config;

TEST(MinPower, RunningInstance) {
  const auto r = min_power({1.0, 4.0}, {1.0, 1.0}, 1.0);
  EXPECT_DOUBLE_EQ(r.per_user_powers[1], 0.25);
  EXPECT_DOUBLE_EQ(r.per_user_powers[0], 1.25);
  EXPECT_DOUBLE_EQ(r.p_min, 1.5);
  const auto rates = rates_from_powers(r.per_user_powers, {1.0, 4.0}, 1.0);
  EXPECT_NEAR(rates[0], 1.0, 1e-15);
  EXPECT_NEAR(rates[1], 1.0, 1e-15);
  EXPECT_TRUE(r.feasible_at(1.5));
  EXPECT_FALSE(r.feasible_at(1.49));
}

TEST(MinPower, ZeroQosNeedsNoPower) {
  const auto r = min_power({0.1, 0.2, 0.3}, {0.0, 0.0, 0.0}, 1.0);
  EXPECT_EQ(r.p_min, 0.0);
  for (double p : r.per_user_powers) EXPECT_EQ(p, 0.0);
}

TEST(MinPower, SingleUserThreshold) { EXPECT_DOUBLE_EQ(min_power({1.0}, {1.0}, 1.0).p_min, 1.0); }

TEST(MinPower, RejectsBadInput) {
  EXPECT_THROW(min_power({}, {}, 1.0), std::invalid_argument);
  EXPECT_THROW(min_power({1.0, 0.0}, {1.0, 1.0}, 1.0), std::invalid_argument);
  EXPECT_THROW(min_power({2.0, 1.0}, {1.0, 1.0}, 1.0), std::invalid_argument);
  EXPECT_THROW(min_power({1.0}, {1.0, 1.0}, 1.0), std::invalid_argument);
  EXPECT_THROW(min_power({1.0}, {-1.0}, 1.0), std::invalid_argument);
}

TEST(OptimalAllocation, RunningInstance) {
  const auto a = optimal_allocation(running_config(), {1.0, 4.0});
  EXPECT_NEAR(a.gamma[0], 2.0 / 3.0, 1e-15);
  EXPECT_NEAR(a.gamma[1], 1.0 / 3.0, 1e-15);
  EXPECT_NEAR(user_rate(0, a, running_channel(), running_config()), 1.0, 1e-14);
  EXPECT_NEAR(a.sum(), 1.0, 1e-15);
}

TEST(OptimalAllocation, ZeroQosGivesEverythingToStrongest) {
  const auto cfg = SystemConfig::uniform(4, 2.0, 1.0, 0.0);
  const auto a = optimal_allocation(cfg, {0.1, 0.2, 0.3, 0.4});
  EXPECT_EQ(a.gamma, (std::vector<double>{0.0, 0.0, 0.0, 1.0}));
}

TEST(OptimalAllocation, InfeasiblePowerCarriesMinimum) {
  auto cfg = running_config();
  cfg.total_power = 1.0;
  try {
    optimal_allocation(cfg, {1.0, 4.0});
    FAIL() << "expected InfeasiblePower";
  } catch (const InfeasiblePower& e) {
    EXPECT_DOUBLE_EQ(e.p_min(), 1.5);
    EXPECT_DOUBLE_EQ(e.requested(), 1.0);
  }
}

TEST(OptimalAllocation, AtMinimumPowerEveryUserIsTight) {
  std::mt19937_64 rng(31);
  for (int i = 0; i < 200; ++i) {
    auto inst = random_feasible_instance(2 + rng() % 5, rng);
    inst.cfg.total_power = min_power(inst.ch.user_gains, inst.cfg.qos, inst.cfg.noise_power).p_min;
    const auto a = optimal_allocation(inst.cfg, inst.ch.user_gains);
    const auto r = secrecy_sum_rate(a, inst.ch, inst.cfg);
    for (std::size_t m = 0; m < a.size(); ++m)
      EXPECT_NEAR(r.user_rates[m], inst.cfg.qos[m], 1e-8 * inst.cfg.qos[m]) << "user " << m;
  }
}

TEST(OptimalAllocation, DoesNotDependOnEavesdropper) {
  // signature takes no eavesdropper input; SSR at the optimum beats random feasible
  // points for several eavesdropper gains on the same users
  auto cfg = running_config();
  const auto a = optimal_allocation(cfg, {1.0, 4.0});
  for (double eve : {0.5, 2.0, 3.5}) {
    const auto ch = make_channel({1.0, 4.0}, eve);
    const double best = secrecy_sum_rate(a, ch, cfg).ssr;
    for (const auto& s : sample_feasible(ch, cfg, 500, 17))
      EXPECT_LE(secrecy_sum_rate(s, ch, cfg).ssr, best + 1e-9);
  }
}

TEST(OptimalAllocation, SsrNonDecreasingInPower) {
  std::mt19937_64 rng(32);
  for (int i = 0; i < 300; ++i) {
    auto inst = random_feasible_instance(2 + rng() % 4, rng);
    auto hi = inst.cfg;
    hi.total_power *= 1.0 + std::uniform_real_distribution<double>(0.0, 3.0)(rng);
    const double ssr_lo = secrecy_sum_rate(optimal_allocation(inst.cfg, inst.ch.user_gains), inst.ch, inst.cfg).ssr;
    const double ssr_hi = secrecy_sum_rate(optimal_allocation(hi, inst.ch.user_gains), inst.ch, hi).ssr;
    EXPECT_GE(ssr_hi, ssr_lo - 1e-9);
  }
}

TEST(OptimalAllocation, TiedGainsStillComputed) {
  const auto cfg = SystemConfig::uniform(3, 10.0, 1.0, 1.0);
  const auto a = optimal_allocation(cfg, {1.0, 1.0, 2.0});
  EXPECT_NEAR(a.sum(), 1.0, 1e-12);
  EXPECT_TRUE(satisfies_qos(a, {1.0, 1.0, 2.0}, cfg));
}

TEST(VerifyActiveSet, PassesOnClosedForm) {
  std::mt19937_64 rng(33);
  for (int i = 0; i < 1000; ++i) {
    const auto inst = random_feasible_instance(2 + rng() % 7, rng);
    const auto a = optimal_allocation(inst.cfg, inst.ch.user_gains);
    const auto rep = verify_active_set(a, inst.ch.user_gains, inst.cfg);
    ASSERT_TRUE(rep.pass) << "instance " << i << " budget slack " << rep.budget_slack;
    EXPECT_GE(rep.tight_qos_count, a.size() - 1);
  }
}

TEST(VerifyActiveSet, FailsWhenStrongUserStarved) {
  const auto cfg = SystemConfig::uniform(3, 10.0, 1.0, 1.0);
  const auto rep = verify_active_set({{1.0, 0.0, 0.0}}, {1.0, 2.0, 3.0}, cfg);
  EXPECT_FALSE(rep.pass);
  EXPECT_LT(rep.qos_slacks[1], 0.0);
}

TEST(VerifyActiveSet, UniformAllocationWithZeroQos) {
  const auto cfg = SystemConfig::uniform(3, 10.0, 1.0, 0.0);
  const auto rep = verify_active_set({{1.0 / 3, 1.0 / 3, 1.0 / 3}}, {1.0, 2.0, 3.0}, cfg);
  EXPECT_NEAR(rep.budget_slack, 0.0, 1e-15);
  EXPECT_EQ(rep.tight_qos_count, 0u);
  for (double s : rep.qos_slacks) EXPECT_GT(s, 0.0);
  // weak users have slack, so the optimality structure does not hold
  EXPECT_FALSE(rep.pass);
}

TEST(VerifyActiveSet, SlackBudgetFails) {
  const auto cfg = running_config();
  auto a = optimal_allocation(cfg, {1.0, 4.0});
  a.gamma[1] *= 0.5;
  EXPECT_FALSE(verify_active_set(a, {1.0, 4.0}, cfg).pass);
}

TEST(MinPowerProperties, TightAndMinimal) {
  std::mt19937_64 rng(34);
  for (int i = 0; i < 300; ++i) {
    const auto inst = random_feasible_instance(1 + rng() % 8, rng);
    const auto& g = inst.ch.user_gains;
    const auto fr = min_power(g, inst.cfg.qos, inst.cfg.noise_power);
    const auto rates = rates_from_powers(fr.per_user_powers, g, inst.cfg.noise_power);
    for (std::size_t m = 0; m < g.size(); ++m) ASSERT_NEAR(rates[m], inst.cfg.qos[m], rate_tolerance(inst.cfg.qos[m]));
    for (std::size_t k = 0; k < g.size(); ++k) {
      auto reduced = fr.per_user_powers;
      reduced[k] *= 1.0 - 1e-6;
      const auto r = rates_from_powers(reduced, g, inst.cfg.noise_power);
      bool broken = false;
      for (std::size_t m = 0; m < g.size(); ++m)
        broken = broken || r[m] < inst.cfg.qos[m] - rate_tolerance(inst.cfg.qos[m]);
      ASSERT_TRUE(broken) << "reducing user " << k << " kept every QoS target";
    }
  }
}
