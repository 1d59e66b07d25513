// Copyright 2026 The mecsca Authors
// SPDX-License-Identifier: Apache-2.0

#include <cmath>

#include <gtest/gtest.h>

#include "fixtures.hpp"
#include "mecsca/oracle.hpp"
#include "mecsca/sca.hpp"

namespace mecsca {
namespace {

using testing::Drop;

GridSpec uniform_spec(int n) {
  GridSpec g;
  g.power_points = g.fraction_points = g.split_points = n;
  return g;
}

TEST(GridAxes, ValuesAndEndpoints) {
  const std::vector<double> p = power_grid(100.0, 4);
  ASSERT_EQ(p.size(), 4u);
  EXPECT_NEAR(p.front(), 100.0 * 1e-3, 1e-15);
  EXPECT_DOUBLE_EQ(p.back(), 100.0);
  EXPECT_EQ(fraction_grid(4), (std::vector<double>{0.25, 0.5, 0.75, 1.0}));
  EXPECT_EQ(split_grid(4), (std::vector<double>{0.0, 0.25, 0.5, 0.75, 1.0}));
}

TEST(GridSpec, DefaultsPerUserCount) {
  EXPECT_EQ(GridSpec::for_users(1).power_points, 24);
  EXPECT_EQ(GridSpec::for_users(2).power_points, 7);
  GridSpec bad;
  bad.power_points = 0;
  EXPECT_THROW(bad.validate(), std::invalid_argument);
}

TEST(GridSearch, ZeroWorkloadCostsNothing) {
  const Scenario s = testing::make_scenario({1e-11});
  const OracleResult r = grid_search(s, testing::zero_profile(1), uniform_spec(4));
  ASSERT_EQ(r.status, OracleStatus::found);
  EXPECT_EQ(r.objective, 0.0);
}

TEST(GridSearch, RejectsUnsupportedSizes) {
  const Drop three = testing::seeded_drop(1, 3);
  EXPECT_THROW(grid_search(three.scenario, three.profile, uniform_spec(2)), std::invalid_argument);
  const Drop one = testing::feasible_drops(1, 1).front();
  GridSpec tiny = uniform_spec(6);
  tiny.max_evaluations = 10;
  EXPECT_THROW(grid_search(one.scenario, one.profile, tiny), std::invalid_argument);
}

TEST(GridSearch, BestPointIsFeasibleWithTightSharedPhases) {
  for (const Drop& d : testing::feasible_drops(3, 1)) {
    const OracleResult r = grid_search(d.scenario, d.profile, uniform_spec(8));
    if (r.status != OracleStatus::found) continue;
    EXPECT_TRUE(check_feasibility(d.scenario, d.profile, r.best).feasible);
    EXPECT_NEAR(r.objective, total_energy(d.scenario, d.profile, r.best), 1e-12 * r.objective);
    const double t_ul = transfer_time(r.best.shared_bits[0], uplink_rate(d.scenario, 0, r.best.p_ul[0]));
    EXPECT_NEAR(r.best.t_shared_ul, t_ul, 1e-12 * d.scenario.latency_budget_s);
    EXPECT_EQ(r.evaluated, grid_size(d.scenario, d.profile, uniform_spec(8)));
  }
}

TEST(GridSearch, RefiningANestedGridNeverHurts) {
  for (const Drop& d : testing::feasible_drops(3, 1)) {
    const OracleResult coarse = grid_search(d.scenario, d.profile, uniform_spec(6));
    const OracleResult fine = grid_search(d.scenario, d.profile, uniform_spec(12));
    if (coarse.status == OracleStatus::found) {
      ASSERT_EQ(fine.status, OracleStatus::found);
      EXPECT_LE(fine.objective, coarse.objective);
    }
  }
}

TEST(GridSearch, LeadersAreSortedAndCapped) {
  const Drop d = testing::feasible_drops(1, 1).front();
  GridSpec spec = uniform_spec(6);
  spec.keep_best = 5;
  const OracleResult r = grid_search(d.scenario, d.profile, spec);
  ASSERT_EQ(r.status, OracleStatus::found);
  ASSERT_LE(r.leaders.size(), 5u);
  ASSERT_FALSE(r.leaders.empty());
  EXPECT_EQ(r.leaders.front().objective, r.objective);
  for (std::size_t i = 1; i < r.leaders.size(); ++i)
    EXPECT_LE(r.leaders[i - 1].objective, r.leaders[i].objective);
  EXPECT_EQ(leaders_csv(r).substr(0, 18), "rank,objective_J,p");
}

TEST(GridSearch, ThreadCountDoesNotChangeTheResult) {
  const Drop d = testing::feasible_drops(1, 1).front();
  GridSpec spec = uniform_spec(8);
  const OracleResult a = grid_search(d.scenario, d.profile, spec);
  spec.jobs = 2;
  const OracleResult b = grid_search(d.scenario, d.profile, spec);
  EXPECT_EQ(a.objective, b.objective);
  EXPECT_EQ(a.best.to_vector(), b.best.to_vector());
}

TEST(GridSearch, TwoUsersOnASmallGrid) {
  const Drop d = testing::feasible_drops(1, 2).front();
  const OracleResult r = grid_search(d.scenario, d.profile, uniform_spec(4));
  EXPECT_EQ(r.evaluated, grid_size(d.scenario, d.profile, uniform_spec(4)));
  if (r.status == OracleStatus::found)
    EXPECT_TRUE(check_feasibility(d.scenario, d.profile, r.best).feasible);
}

TEST(GridSearch, ScaIsWithinTwoPercentOfTheGridOptimum) {
  for (const Drop& d : testing::feasible_drops(3, 1)) {
    const OracleResult grid = grid_search(d.scenario, d.profile, GridSpec::for_users(1));
    const SolveResult sca = sca_solve(d.scenario, d.profile);
    ASSERT_EQ(grid.status, OracleStatus::found);
    ASSERT_TRUE(sca.feasibility.feasible);
    EXPECT_LE(sca.objective, 1.02 * grid.objective);
  }
}

}  // namespace
}  // namespace mecsca
