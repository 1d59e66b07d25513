// Copyright 2026 The mecsca Authors
// SPDX-License-Identifier: Apache-2.0

#include <stdexcept>

#include <gtest/gtest.h>

#include "mecsca/config.hpp"

namespace mecsca {
namespace {

TEST(Config, EmptyDocumentYieldsDefaults) {
  const RunConfig c = config_from_json("");
  EXPECT_EQ(c.seed, 1u);
  EXPECT_EQ(c.drops, 100);
  EXPECT_EQ(c.jobs, 1);
  EXPECT_FALSE(c.num_users.has_value());
  EXPECT_TRUE(c.etas.empty());
  EXPECT_DOUBLE_EQ(c.params.latency_budget_s, 0.05);
  EXPECT_DOUBLE_EQ(c.sca.alpha, 1e-5);
  EXPECT_DOUBLE_EQ(c.sca.epsilon, 1e-5);
}

TEST(Config, ReadsNestedSections) {
  const RunConfig c = config_from_json(R"({
    "seed": 9, "eta": 0.5, "mode": ["separate", "full_shared"],
    "drop": {"num_users": 2, "latency_budget_s": 0.1},
    "sca": {"max_iterations": 50, "proximal": {"p_ul": 1e-3}, "inner": {"kkt_tolerance": 1e-9}},
    "grid": {"power_points": 5},
    "validate": {"suites": ["oracle"], "oracle_ratio": 1.05}
  })");
  EXPECT_EQ(c.seed, 9u);
  EXPECT_EQ(c.etas, std::vector<double>{0.5});
  EXPECT_EQ(c.modes, (std::vector<SharingMode>{SharingMode::separate, SharingMode::full_shared}));
  EXPECT_EQ(c.num_users, 2u);
  EXPECT_DOUBLE_EQ(c.params.latency_budget_s, 0.1);
  EXPECT_EQ(c.sca.max_iterations, 50);
  EXPECT_DOUBLE_EQ(c.sca.weights.p_ul, 1e-3);
  EXPECT_DOUBLE_EQ(c.sca.inner.kkt_tolerance, 1e-9);
  EXPECT_EQ(c.grid.power_points, 5);
  EXPECT_EQ(c.validation.suites, std::vector<Suite>{Suite::oracle});
  EXPECT_DOUBLE_EQ(c.validation.oracle_ratio, 1.05);
}

TEST(Config, RejectsUnknownKeysAndBadValues) {
  EXPECT_THROW(config_from_json(R"({"sede": 1})"), std::invalid_argument);
  EXPECT_THROW(config_from_json(R"({"sca": {"alfa": 1}})"), std::invalid_argument);
  EXPECT_THROW(config_from_json(R"({"eta": 2.0})"), std::invalid_argument);
  EXPECT_THROW(config_from_json(R"({"mode": "half"})"), std::invalid_argument);
  EXPECT_THROW(config_from_json("{not json"), std::invalid_argument);
}

TEST(Config, OverridesReplaceFileValues) {
  RunConfig c = config_from_json(R"({"seed": 3, "eta": [0.1], "drop": {"latency_budget_s": 0.2}})");
  apply_override(c, "seed", "11");
  apply_override(c, "eta", "0,0.3");
  apply_override(c, "tmax", "0.07");
  apply_override(c, "mode", "separate");
  EXPECT_EQ(c.seed, 11u);
  EXPECT_EQ(c.etas, (std::vector<double>{0.0, 0.3}));
  EXPECT_DOUBLE_EQ(c.params.latency_budget_s, 0.07);
  EXPECT_EQ(c.modes, std::vector<SharingMode>{SharingMode::separate});
  EXPECT_THROW(apply_override(c, "colour", "red"), std::invalid_argument);
  EXPECT_THROW(apply_override(c, "seed", "-1"), std::invalid_argument);
  EXPECT_THROW(apply_override(c, "drops", "many"), std::invalid_argument);
}

TEST(Config, ResolveFillsPerCommandDefaults) {
  const RunConfig base = config_from_json("");
  const RunConfig sweep = resolve(base, Command::sweep);
  EXPECT_EQ(sweep.etas, (std::vector<double>{0.0, 0.3}));
  EXPECT_EQ(sweep.modes, all_sharing_modes());
  EXPECT_EQ(sweep.num_users, 8u);
  EXPECT_EQ(sweep.workload->input_bits, default_workload(8).input_bits);

  const RunConfig solve = resolve(base, Command::solve);
  EXPECT_EQ(solve.etas, std::vector<double>{0.3});
  EXPECT_EQ(solve.modes, std::vector<SharingMode>{SharingMode::full_shared});

  const RunConfig oracle = resolve(base, Command::oracle);
  EXPECT_EQ(oracle.num_users, 1u);
  EXPECT_EQ(oracle.workload->input_bits, default_workload(1).input_bits);
}

TEST(Config, SingleScenarioCommandsNeedOneEtaAndMode) {
  RunConfig c = config_from_json(R"({"eta": [0, 0.3]})");
  EXPECT_THROW(resolve(c, Command::solve), std::invalid_argument);
  EXPECT_NO_THROW(resolve(c, Command::sweep));
  c = config_from_json(R"({"mode": ["separate", "full_shared"]})");
  EXPECT_THROW(resolve(c, Command::oracle), std::invalid_argument);
}

TEST(Config, HashIgnoresJobsAndOutput) {
  RunConfig a = resolve(config_from_json(""), Command::sweep);
  RunConfig b = a;
  b.jobs = 4;
  b.out = "/tmp/elsewhere";
  EXPECT_EQ(config_hash(a), config_hash(b));
  b.seed = 2;
  EXPECT_NE(config_hash(a), config_hash(b));
  EXPECT_EQ(hash_hex(0x1234), "0000000000001234");
}

TEST(Config, CanonicalJsonRoundTrips) {
  const RunConfig a = resolve(config_from_json(R"({"seed": 5, "eta": 0.2})"), Command::solve);
  const std::string text = config_to_json(a);
  const RunConfig b = resolve(config_from_json(text), Command::solve);
  EXPECT_EQ(config_to_json(b), text);
  EXPECT_EQ(config_hash(a), config_hash(b));
}

TEST(Config, ScenarioProblemIsTheMatchingSweepDrop) {
  RunConfig c = config_from_json(R"({"seed": 4, "drop_index": 2, "eta": 0.3, "mode": "shared_uplink_only"})");
  c = resolve(c, Command::solve);
  const Problem p = scenario_problem(c);
  DropParams params = c.params;
  params.num_users = 8;
  params.seed = drop_seed(4, 2);
  EXPECT_EQ(p.scenario.channel_gain, generate_drop(params).channel_gain);
  const TaskProfile expected =
      apply_sharing_mode(base_profile(default_workload(8), 8, 0.3), SharingMode::shared_uplink_only);
  EXPECT_EQ(p.profile.shared_cycles, 0.0);
  EXPECT_EQ(p.profile.input_bits, expected.input_bits);
  EXPECT_EQ(p.profile.shared_input, expected.shared_input);
}

TEST(Config, ExplicitProblemTakesPrecedence) {
  RunConfig c = config_from_json("");
  apply_override(c, "problem", R"({
    "scenario": {"num_users": 1, "uplink_bandwidth_hz": 1e7, "downlink_bandwidth_hz": 1e7,
                 "channel_gain": [1e-11], "noise_psd_w_per_hz": 2e-18,
                 "cloudlet_capacity_cps": 1e10, "p_ul_max_w": 100, "p_dl_max_w": 1000,
                 "energy_per_bit_ul": [1.78e-6], "rx_power_dl": [0.625], "latency_budget_s": 0.05},
    "profile": {"input_bits": [1e4], "output_bits": [1e4], "cycles": [1e7],
                "shared_input": 0, "shared_output": 0, "shared_cycles": 0}
  })");
  apply_override(c, "tmax", "0.08");
  c = resolve(c, Command::solve);
  const Problem p = scenario_problem(c);
  EXPECT_EQ(p.scenario.num_users(), 1u);
  EXPECT_DOUBLE_EQ(p.scenario.latency_budget_s, 0.08);
}

TEST(Config, AdaptersCarrySettings) {
  RunConfig c = config_from_json(R"({"seed": 8, "drops": 7, "jobs": 2, "grid": {"power_points": 5}})");
  c = resolve(c, Command::sweep);
  const MonteCarloConfig mc = monte_carlo_config(c);
  EXPECT_EQ(mc.params.seed, 8u);
  EXPECT_EQ(mc.drops, 7);
  EXPECT_EQ(mc.jobs, 2);
  const GridSpec g = grid_spec(c, 1);
  EXPECT_EQ(g.power_points, 5);
  EXPECT_EQ(g.fraction_points, GridSpec::for_users(8).fraction_points);
  EXPECT_EQ(g.jobs, 2);
  EXPECT_EQ(validation_config(c).seed, 8u);
}

TEST(Config, CommandNames) {
  for (Command cmd : {Command::solve, Command::sweep, Command::oracle, Command::validate})
    EXPECT_EQ(parse_command(to_string(cmd)), cmd);
  EXPECT_FALSE(parse_command("train").has_value());
}

}  // namespace
}  // namespace mecsca
