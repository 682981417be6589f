#include <gtest/gtest.h>

#include <random>

#include "fixtures.hpp"
#include "nomassr/oracle.hpp"

using namespace nomassr;
using nomassr::testing::random_feasible_instance;
using nomassr::testing::running_channel;
using nomassr::testing::running_config;

namespace {

double max_abs_diff(const PowerAllocation& a, const PowerAllocation& b) {
  double d = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) d = std::max(d, std::abs(a.gamma[i] - b.gamma[i]));
  return d;
}

}  // namespace

TEST(GridSearch, RunningInstanceFindsClosedForm) {
  const auto best = grid_search_ssr(running_channel(), running_config(), 1e-3);
  ASSERT_TRUE(best);
  EXPECT_NEAR(best->best_ssr, 0.73696559416620616642, 5e-3);
  EXPECT_LE(max_abs_diff(best->best_alloc, {{2.0 / 3.0, 1.0 / 3.0}}), 1e-3 + 1e-12);
  EXPECT_EQ(best->points_evaluated, 1001u);
}

TEST(GridSearch, ZeroQosPicksStrongestUserVertex) {
  const auto cfg = SystemConfig::uniform(2, 3.0, 1.0, 0.0);
  const auto best = grid_search_ssr(make_channel({1.0, 4.0}, 2.0), cfg, 1e-2);
  ASSERT_TRUE(best);
  EXPECT_EQ(best->best_alloc.gamma, (std::vector<double>{0.0, 1.0}));
}

TEST(GridSearch, InfeasibleReportsEmpty) {
  auto cfg = running_config();
  cfg.total_power = 1.0;  // p_min is 1.5
  EXPECT_FALSE(grid_search_ssr(running_channel(), cfg, 1e-2).has_value());
}

TEST(GridSearch, Guards) {
  const auto cfg = SystemConfig::uniform(5, 3.0, 1.0, 0.0);
  const auto ch = make_channel({1, 2, 3, 4, 5}, 1.5);
  EXPECT_THROW(grid_search_ssr(ch, cfg, 1e-2), std::invalid_argument);
  EXPECT_THROW(grid_search_ssr(running_channel(), running_config(), 0.3), std::invalid_argument);
  EXPECT_THROW(grid_search_ssr(running_channel(), running_config(), 0.0), std::invalid_argument);
  const auto cfg4 = SystemConfig::uniform(4, 3.0, 1.0, 0.0);
  EXPECT_THROW(grid_search_ssr(make_channel({1, 2, 3, 4}, 1.5), cfg4, 1e-3), std::invalid_argument);
}

TEST(GridSearch, StarsAndBarsCount) {
  const auto cfg = SystemConfig::uniform(3, 3.0, 1.0, 0.0);
  const auto best = grid_search_ssr(make_channel({1, 2, 3}, 0.5), cfg, 1e-2);
  ASSERT_TRUE(best);
  EXPECT_EQ(best->points_evaluated, 5151u);  // C(102, 2)
}

TEST(GridSearch, FullBudgetBeatsReducedBudget) {
  std::mt19937_64 rng(41);
  for (int i = 0; i < 40; ++i) {
    const auto inst = random_feasible_instance(2 + rng() % 2, rng);
    const auto full = grid_search_ssr(inst.ch, inst.cfg, 0.02, 1.0);
    const auto partial = grid_search_ssr(inst.ch, inst.cfg, 0.02, 0.9);
    if (!partial) continue;
    ASSERT_TRUE(full);
    EXPECT_GE(full->best_ssr, partial->best_ssr - 1e-12);
  }
}

TEST(GridSearch, DominatedByClosedForm) {
  std::mt19937_64 rng(42);
  for (int i = 0; i < 60; ++i) {
    const std::size_t users = 2 + rng() % 2;
    const double res = users == 2 ? 1e-3 : 1e-2;
    const auto inst = random_feasible_instance(users, rng);
    const double closed = secrecy_sum_rate(optimal_allocation(inst.cfg, inst.ch.user_gains), inst.ch, inst.cfg).ssr;
    const auto grid = grid_search_ssr(inst.ch, inst.cfg, res);
    if (!grid) continue;
    EXPECT_GE(closed, grid->best_ssr - 10 * res);
    // the lattice is a subset of the feasible set, so it can never exceed the optimum
    EXPECT_LE(grid->best_ssr, closed + 1e-9);
  }
}

TEST(GridSearch, ArgmaxInvariantToEavesdropperScaling) {
  std::mt19937_64 rng(43);
  int checked = 0;
  for (int i = 0; i < 60 && checked < 20; ++i) {
    auto inst = random_feasible_instance(2 + rng() % 2, rng);
    const double res = inst.cfg.num_users == 2 ? 1e-3 : 1e-2;
    const auto ref = grid_search_ssr(inst.ch, inst.cfg, res);
    if (!ref || inst.ch.m_e == inst.cfg.num_users) continue;
    const auto closed = optimal_allocation(inst.cfg, inst.ch.user_gains);
    for (double scale : {0.5, 2.0}) {
      auto ch = inst.ch;
      ch.eve_gain *= scale;
      if (locate_eve(ch.user_gains, ch.eve_gain) != inst.ch.m_e) continue;
      ch.m_e = inst.ch.m_e;
      const auto other = grid_search_ssr(ch, inst.cfg, res);
      ASSERT_TRUE(other);
      EXPECT_LE(max_abs_diff(other->best_alloc, ref->best_alloc), res + 1e-12);
      EXPECT_LE(max_abs_diff(other->best_alloc, closed), (inst.cfg.num_users - 1) * res + 1e-12);
    }
    ++checked;
  }
  EXPECT_GT(checked, 10);
}

TEST(SampleFeasible, AllPointsFeasibleAndDominated) {
  const auto cfg = running_config();
  const auto ch = running_channel();
  const auto points = sample_feasible(ch, cfg, 1000, 7);
  ASSERT_EQ(points.size(), 1000u);
  const double closed = 0.73696559416620616642;
  for (const auto& p : points) {
    EXPECT_TRUE(satisfies_qos(p, ch.user_gains, cfg));
    EXPECT_LE(p.sum(), 1.0 + 1e-12);
    EXPECT_LE(secrecy_sum_rate(p, ch, cfg).ssr, closed + 1e-9);
  }
}

TEST(SampleFeasible, EmptyAndInfeasible) {
  EXPECT_TRUE(sample_feasible(running_channel(), running_config(), 0, 1).empty());
  auto cfg = running_config();
  cfg.total_power = 1.0;
  EXPECT_THROW(sample_feasible(running_channel(), cfg, 3, 1), InfeasiblePower);
}

TEST(SampleFeasible, RandomInstancesDominated) {
  std::mt19937_64 rng(44);
  for (int i = 0; i < 100; ++i) {
    const auto inst = random_feasible_instance(2 + rng() % 6, rng);
    const double closed = secrecy_sum_rate(optimal_allocation(inst.cfg, inst.ch.user_gains), inst.ch, inst.cfg).ssr;
    for (const auto& p : sample_feasible(inst.ch, inst.cfg, 50, rng())) {
      ASSERT_TRUE(satisfies_qos(p, inst.ch.user_gains, inst.cfg));
      EXPECT_LE(secrecy_sum_rate(p, inst.ch, inst.cfg).ssr, closed + 1e-9);
    }
  }
}
