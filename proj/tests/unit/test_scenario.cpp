// Copyright 2026 The mecsca Authors
// SPDX-License-Identifier: Apache-2.0

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>

#include <gtest/gtest.h>

#include "fixtures.hpp"
#include "mecsca/scenario.hpp"

namespace mecsca {
namespace {

std::string first_line(const std::string& text) { return text.substr(0, text.find('\n')); }

int feasible_count(const MonteCarloResult& r) {
  return static_cast<int>(std::count_if(r.records.begin(), r.records.end(),
                                        [](const DropRecord& d) { return !d.infeasible; }));
}

TEST(PathLoss, ReferenceDistances) {
  EXPECT_DOUBLE_EQ(path_loss_db(1000.0), 140.7);
  EXPECT_NEAR(path_loss_db(100.0), 140.7 - 36.7, 1e-12);
  EXPECT_THROW(path_loss_db(0.0), std::domain_error);
}

TEST(Drops, SameSeedSameDrop) {
  DropParams p;
  p.seed = 42;
  const Scenario a = generate_drop(p), b = generate_drop(p);
  EXPECT_EQ(a.channel_gain, b.channel_gain);
  p.seed = 43;
  EXPECT_NE(generate_drop(p).channel_gain, a.channel_gain);
}

TEST(Drops, SystemParametersAreConverted) {
  const Scenario s = generate_drop(DropParams{});
  EXPECT_EQ(s.num_users(), 8u);
  EXPECT_NEAR(s.p_ul_max_w, 100.0, 1e-9);
  EXPECT_NEAR(s.p_dl_max_w, 1000.0, 1e-9);
  EXPECT_NEAR(s.noise_psd_w_per_hz, std::pow(10.0, -17.7), 1e-30);
  EXPECT_NO_THROW(s.validate());
}

TEST(Drops, RayleighPowerFadingHasUnitMean) {
  DropParams p;
  p.num_users = 100000;
  p.min_distance_m = p.max_distance_m = 1000.0;
  p.seed = 7;
  const Scenario s = generate_drop(p);
  double mean = 0.0;
  for (double g : s.channel_gain) mean += g * std::pow(10.0, 14.07);
  mean /= static_cast<double>(s.num_users());
  EXPECT_GT(mean, 0.99);
  EXPECT_LT(mean, 1.01);
}

TEST(Drops, GainsStayWithinThePathLossEnvelope) {
  DropParams p;
  p.num_users = 10000;
  const Scenario s = generate_drop(p);
  // Exp(1) fading exceeds 25 with probability e^-25.
  for (double g : s.channel_gain) {
    EXPECT_GT(g, 0.0);
    EXPECT_LT(10.0 * std::log10(g), -path_loss_db(p.min_distance_m) + 10.0 * std::log10(25.0));
  }
}

TEST(Drops, SeedStreamsAreDistinct) {
  std::set<std::uint64_t> seen;
  for (std::uint64_t m : {1u, 2u})
    for (std::uint64_t d = 0; d < 1000; ++d) seen.insert(drop_seed(m, d));
  EXPECT_EQ(seen.size(), 2000u);
}

TEST(Workload, DefaultScalesWithUserCount) {
  const Workload w8 = default_workload(8), w1 = default_workload(1), w2 = default_workload(2);
  EXPECT_DOUBLE_EQ(w1.input_bits, 8.0 * w8.input_bits);
  EXPECT_DOUBLE_EQ(w2.output_bits, 4.0 * w8.output_bits);
  EXPECT_DOUBLE_EQ(w1.cycles_per_input_bit, w8.cycles_per_input_bit);
  EXPECT_THROW(default_workload(0), std::invalid_argument);
}

TEST(SharingModes, NamesRoundTrip) {
  for (SharingMode m : all_sharing_modes()) EXPECT_EQ(parse_sharing_mode(to_string(m)), m);
  EXPECT_FALSE(parse_sharing_mode("everything").has_value());
}

TEST(SharingModes, EachBaselineZeroesItsUnsharedParts) {
  const TaskProfile full = base_profile(default_workload(8), 8, 0.3);
  ASSERT_GT(full.shared_input, 0.0);
  ASSERT_GT(full.shared_cycles, 0.0);
  ASSERT_GT(full.shared_output, 0.0);

  const TaskProfile pd = apply_sharing_mode(full, SharingMode::shared_processing_downlink);
  EXPECT_EQ(pd.shared_input, 0.0);
  EXPECT_EQ(pd.shared_cycles, full.shared_cycles);
  EXPECT_EQ(pd.shared_output, full.shared_output);

  const TaskProfile ul = apply_sharing_mode(full, SharingMode::shared_uplink_only);
  EXPECT_EQ(ul.shared_input, full.shared_input);
  EXPECT_EQ(ul.shared_cycles, 0.0);
  EXPECT_EQ(ul.shared_output, 0.0);

  const TaskProfile sep = apply_sharing_mode(full, SharingMode::separate);
  EXPECT_EQ(sep.shared_input + sep.shared_cycles + sep.shared_output, 0.0);
  EXPECT_EQ(sep.input_bits, full.input_bits);
  EXPECT_EQ(sep.cycles, full.cycles);
}

MonteCarloConfig small_config(int drops) {
  MonteCarloConfig c;
  c.drops = drops;
  c.etas = {0.3};
  c.params.seed = 4;
  return c;
}

TEST(MonteCarlo, RunDropMatchesADirectSolve) {
  const MonteCarloConfig c = small_config(1);
  for (int drop = 0; drop < 4; ++drop) {
    const DropRecord r = run_drop(c, 0.3, SharingMode::full_shared, drop);
    DropParams p = c.params;
    p.seed = drop_seed(c.params.seed, static_cast<std::uint64_t>(drop));
    const SolveResult direct = sca_solve(
        generate_drop(p),
        apply_sharing_mode(base_profile(c.workload, p.num_users, 0.3), SharingMode::full_shared),
        c.sca);
    EXPECT_EQ(r.seed, p.seed);
    EXPECT_EQ(r.status, direct.status);
    if (!r.infeasible) EXPECT_EQ(r.sum_energy, direct.objective);
    else EXPECT_TRUE(std::isnan(r.sum_energy));
  }
}

TEST(MonteCarlo, ModesCoincideWithoutSharing) {
  MonteCarloConfig c = small_config(3);
  c.etas = {0.0};
  const MonteCarloResult r = monte_carlo(c);
  ASSERT_GT(feasible_count(r), 0);
  for (int drop = 0; drop < c.drops; ++drop) {
    std::vector<double> energies;
    for (const DropRecord& rec : r.records)
      if (rec.drop == drop && !rec.infeasible) energies.push_back(rec.sum_energy);
    for (double e : energies) EXPECT_EQ(e, energies.front());
  }
}

TEST(MonteCarlo, ThreadCountDoesNotChangeResults) {
  MonteCarloConfig c = small_config(3);
  c.modes = {SharingMode::full_shared, SharingMode::separate};
  const MonteCarloResult one = monte_carlo(c);
  ASSERT_GT(feasible_count(one), 0);
  c.jobs = 2;
  const MonteCarloResult two = monte_carlo(c);
  EXPECT_EQ(records_csv(one), records_csv(two));
  EXPECT_EQ(aggregate_csv(one), aggregate_csv(two));
}

TEST(MonteCarlo, RecordsAreOrderedAndCsvHeadersFixed) {
  MonteCarloConfig c = small_config(2);
  c.modes = {SharingMode::full_shared, SharingMode::separate};
  const MonteCarloResult r = monte_carlo(c);
  ASSERT_EQ(r.records.size(), 4u);
  EXPECT_EQ(r.records[0].mode, SharingMode::full_shared);
  EXPECT_EQ(r.records[1].drop, 1);
  EXPECT_EQ(r.records[2].mode, SharingMode::separate);
  EXPECT_EQ(first_line(records_csv(r)),
            "eta,mode,drop,seed,sum_energy_J,iterations,status,infeasible_flag");
  EXPECT_EQ(first_line(aggregate_csv(r)), "eta,mode,mean_J,median_J,stderr_J,n_feasible");
  for (const AggregateRow& a : r.aggregates) EXPECT_EQ(a.n_feasible + a.n_infeasible, c.drops);
}

TEST(MonteCarlo, FullSharingNeverCostsMoreThanSeparate) {
  MonteCarloConfig c = small_config(6);
  c.modes = {SharingMode::full_shared, SharingMode::separate};
  const MonteCarloResult r = monte_carlo(c);
  int paired = 0;
  for (int drop = 0; drop < c.drops; ++drop) {
    const DropRecord& full = r.records[static_cast<std::size_t>(drop)];
    const DropRecord& sep = r.records[static_cast<std::size_t>(c.drops + drop)];
    if (full.infeasible || sep.infeasible) continue;
    ++paired;
    EXPECT_LE(full.sum_energy, 1.02 * sep.sum_energy) << "drop " << drop;
  }
  EXPECT_GT(paired, 0);
  const auto saving = r.saving_vs_separate(0.3, SharingMode::full_shared);
  ASSERT_TRUE(saving.has_value());
  EXPECT_GT(*saving, 0.0);
}

TEST(MonteCarlo, ConfigValidation) {
  MonteCarloConfig c;
  c.drops = 0;
  EXPECT_THROW(c.validate(), std::invalid_argument);
  c = {};
  c.etas = {1.5};
  EXPECT_THROW(c.validate(), std::invalid_argument);
}

}  // namespace
}  // namespace mecsca
