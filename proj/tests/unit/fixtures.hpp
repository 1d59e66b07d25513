// Copyright 2026 The mecsca Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

#include "mecsca/model.hpp"
#include "mecsca/scenario.hpp"

namespace mecsca::testing {

// Hand-built scenario with the default system parameters and given gains.
inline Scenario make_scenario(std::vector<double> gains, double tmax = 0.05) {
  Scenario s;
  const std::size_t k = gains.size();
  s.uplink_bandwidth_hz = 10e6;
  s.downlink_bandwidth_hz = 10e6;
  s.channel_gain = std::move(gains);
  s.noise_psd_w_per_hz = std::pow(10.0, -17.7);
  s.cloudlet_capacity_cps = 1e10;
  s.p_ul_max_w = 100.0;
  s.p_dl_max_w = 1000.0;
  s.energy_per_bit_ul.assign(k, 1.78e-6);
  s.rx_power_dl.assign(k, 0.625);
  s.latency_budget_s = tmax;
  return s;
}

inline TaskProfile zero_profile(std::size_t k) {
  TaskProfile p;
  p.input_bits.assign(k, 0.0);
  p.output_bits.assign(k, 0.0);
  p.cycles.assign(k, 0.0);
  return p;
}

// Seeded drop and shared-mode profile with the library defaults.
struct Drop {
  Scenario scenario;
  TaskProfile profile;
};

inline Drop seeded_drop(std::uint64_t seed, std::size_t users = 8, double eta = 0.3,
                        double tmax = 0.05) {
  DropParams p;
  p.num_users = users;
  p.latency_budget_s = tmax;
  p.seed = seed;
  return {generate_drop(p), base_profile(default_workload(users), users, eta)};
}

// First seeds (from `start`) whose drop has a feasible starting point.
std::vector<Drop> feasible_drops(int count, std::size_t users = 8, double eta = 0.3,
                                 std::uint64_t start = 1);

inline double uniform01(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

}  // namespace mecsca::testing
