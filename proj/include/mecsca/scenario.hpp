// Copyright 2026 The mecsca Authors
// SPDX-License-Identifier: Apache-2.0

// Random channel drops, the four sharing baselines, and the Monte-Carlo
// energy comparison across sharing fractions.

#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "mecsca/model.hpp"
#include "mecsca/sca.hpp"

namespace mecsca {

struct DropParams {
  std::size_t num_users = 8;
  double min_distance_m = 100.0;
  double max_distance_m = 1000.0;
  double carrier_hz = 2e9;  // informational; the path-loss model is fixed for 2 GHz
  double uplink_bandwidth_hz = 10e6;
  double downlink_bandwidth_hz = 10e6;
  double noise_psd_dbm_per_hz = -147.0;
  double p_ul_max_dbm = 50.0;
  double p_dl_max_dbm = 60.0;
  double cloudlet_capacity_cps = 1e10;
  double energy_per_bit_ul = 1.78e-6;  // J/bit
  double rx_power_dl = 0.625;          // J/s
  double latency_budget_s = 0.05;
  std::uint64_t seed = 1;

  void validate() const;
};

// Homogeneous per-user workload. The defaults are sized for eight users: at
// these sizes roughly half of the random drops can meet a 50 ms budget.
struct Workload {
  double input_bits = 6e3;
  double output_bits = 6e3;
  double cycles_per_input_bit = 2640.0;

  void validate() const;
};

// The eight-user default rescaled so every user carries the same number of
// bits per hertz of its equal bandwidth share (bits and cycles scale by 8/K).
Workload default_workload(std::size_t num_users);

enum class SharingMode { full_shared, shared_processing_downlink, shared_uplink_only, separate };

std::string to_string(SharingMode mode);
std::optional<SharingMode> parse_sharing_mode(const std::string& name);
const std::vector<SharingMode>& all_sharing_modes();

// Small-cell NLOS path loss at 2 GHz, dB.
double path_loss_db(double distance_m);

// Independent stream seed for one drop.
std::uint64_t drop_seed(std::uint64_t master_seed, std::uint64_t drop_index);

// Distances ~ U[min, max], Rayleigh power fading ~ Exp(1); deterministic in
// params.seed.
Scenario generate_drop(const DropParams& params);

TaskProfile base_profile(const Workload& workload, std::size_t num_users, double eta);

// Zeroes the shared quantities a baseline does not share.
TaskProfile apply_sharing_mode(const TaskProfile& shared_profile, SharingMode mode);

struct MonteCarloConfig {
  DropParams params;  // params.seed is the master seed
  Workload workload;
  std::vector<double> etas = {0.0, 0.3};
  std::vector<SharingMode> modes = all_sharing_modes();
  int drops = 100;
  ScaConfig sca;
  int jobs = 1;

  void validate() const;
};

struct DropRecord {
  double eta = 0.0;
  SharingMode mode = SharingMode::separate;
  int drop = 0;
  std::uint64_t seed = 0;
  double sum_energy = 0.0;  // J; NaN when the drop is infeasible
  int iterations = 0;
  ScaStatus status = ScaStatus::infeasible_scenario;
  bool infeasible = true;
  double final_residual = 0.0;
  // Largest feasibility violation over every iterate of the run.
  double max_iterate_violation = 0.0;
};

struct AggregateRow {
  double eta = 0.0;
  SharingMode mode = SharingMode::separate;
  double mean = 0.0;
  double median = 0.0;
  double stderr_ = 0.0;
  int n_feasible = 0;
  int n_infeasible = 0;
  bool flagged = false;  // no feasible drop at all
};

struct MonteCarloResult {
  MonteCarloConfig config;
  std::vector<DropRecord> records;  // ordered by (eta, mode, drop)
  std::vector<AggregateRow> aggregates;

  // 1 - sum E_mode / sum E_separate over drops solved in both modes.
  std::optional<double> saving_vs_separate(double eta, SharingMode mode) const;
  // Mean energy over drops solved in every mode at this eta.
  std::optional<double> paired_mean(double eta, SharingMode mode) const;
};

DropRecord run_drop(const MonteCarloConfig& config, double eta, SharingMode mode, int drop);

MonteCarloResult monte_carlo(const MonteCarloConfig& config);

// Columns: eta,mode,drop,seed,sum_energy_J,iterations,status,infeasible_flag
std::string records_csv(const MonteCarloResult& result);
// Columns: eta,mode,mean_J,median_J,stderr_J,n_feasible
std::string aggregate_csv(const MonteCarloResult& result);

}  // namespace mecsca
