// Copyright 2026 The mecsca Authors
// SPDX-License-Identifier: Apache-2.0

// Run configuration shared by every front end. A configuration is one JSON
// document; individual settings can then be overridden by name (the CLI maps
// its flags onto these names). Unset list-valued settings and the user count
// take per-command defaults when the configuration is resolved.
//
// Document layout (every key optional, unknown keys rejected):
//
//   {
//     "seed": 1, "drops": 100, "drop_index": 0, "jobs": 1, "out": ".",
//     "eta": [0.0, 0.3], "mode": ["full_shared", ...],
//     "drop":     { "num_users": 8, "latency_budget_s": 0.05, ... },
//     "workload": { "input_bits": 6e3, "output_bits": 6e3, "cycles_per_input_bit": 2640 },
//     "sca":      { "alpha": 1e-5, "delta0": 1, "epsilon": 1e-5, "max_iterations": 200,
//                   "stall_tolerance": 1e-10, "stall_window": 5,
//                   "proximal": { "p_ul": 1e-4, ... }, "inner": { "kkt_tolerance": 1e-8, ... } },
//     "grid":     { "power_points": 24, "fraction_points": 24, "split_points": 24,
//                   "max_evaluations": 1e8, "keep_best": 1 },
//     "validate": { "suites": [...], "drops": 3, "samples_per_drop": 10000,
//                   "convexity_pairs": 1000, "gradient_points": 100,
//                   "oracle_drops": 3, "oracle_ratio": 1.02, "mutation": "none" },
//     "problem":  { <problem document, replaces the seeded drop> }
//   }

#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "mecsca/json_io.hpp"
#include "mecsca/oracle.hpp"
#include "mecsca/scenario.hpp"
#include "mecsca/validate.hpp"

namespace mecsca {

enum class Command { solve, sweep, oracle, validate };

std::string to_string(Command command);
std::optional<Command> parse_command(const std::string& name);

struct GridOverrides {
  std::optional<int> power_points;
  std::optional<int> fraction_points;
  std::optional<int> split_points;
  std::optional<std::uint64_t> max_evaluations;
  std::optional<std::size_t> keep_best;
};

struct RunConfig {
  std::uint64_t seed = 1;
  int drops = 100;
  int drop_index = 0;  // seeded drop used by solve and oracle
  int jobs = 1;
  std::string out = ".";

  DropParams params;                     // params.seed is ignored; see `seed`
  std::optional<std::size_t> num_users;  // 8, or 1 for the oracle command
  std::optional<Workload> workload;      // default_workload(num_users)
  std::vector<double> etas;              // sweep: {0, 0.3}; otherwise {0.3}
  std::vector<SharingMode> modes;        // sweep: all; otherwise full_shared
  ScaConfig sca;
  GridOverrides grid;
  ValidationConfig validation;           // its seed, params, eta, sca follow the above
  std::optional<Problem> problem;

  void validate() const;
};

// Throws std::invalid_argument on malformed documents, unknown keys or
// out-of-range values. Empty text yields the defaults.
RunConfig config_from_json(std::string_view text);

// Override one setting from its textual form. Keys: seed, drops, drop_index,
// jobs, out, users, eta (comma list), mode (comma list), tmax, suite (comma
// list), mutation, problem (problem JSON text). Throws std::invalid_argument.
void apply_override(RunConfig& config, const std::string& key, const std::string& value);

// Fills per-command defaults and checks that single-scenario commands got a
// single eta and mode. Throws std::invalid_argument.
RunConfig resolve(const RunConfig& config, Command command);

// Canonical JSON (sorted keys, every setting present).
std::string config_to_json(const RunConfig& config, int indent = -1);

// FNV-1a 64 of the canonical JSON, excluding `jobs` and `out`, which cannot
// change any result.
std::uint64_t config_hash(const RunConfig& config);
std::string hash_hex(std::uint64_t hash);

// Adapters onto the library entry points; `config` must be resolved.
MonteCarloConfig monte_carlo_config(const RunConfig& config);
ValidationConfig validation_config(const RunConfig& config);
GridSpec grid_spec(const RunConfig& config, std::size_t num_users);
// The explicit problem if present, otherwise seeded drop `drop_index` at the
// first eta and mode, identical to that drop of a sweep.
Problem scenario_problem(const RunConfig& config);

}  // namespace mecsca
