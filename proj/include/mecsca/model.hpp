// Copyright 2026 The mecsca Authors
// SPDX-License-Identifier: Apache-2.0

// System model for collaborative AR offloading: scenario and task types,
// per-user rate/energy/latency formulas, the sum-energy objective, and exact
// feasibility checking of the six constraint families.
//
// All quantities are SI linear units (W, Hz, W/Hz, bits, cycles, s, J).

#pragma once

#include <cstddef>
#include <string>
#include <vector>

namespace mecsca {

struct Scenario {
  double uplink_bandwidth_hz = 0.0;
  double downlink_bandwidth_hz = 0.0;
  // Linear power gain per user; uplink and downlink share it (TDD).
  std::vector<double> channel_gain;
  double noise_psd_w_per_hz = 0.0;
  double cloudlet_capacity_cps = 0.0;
  double p_ul_max_w = 0.0;
  double p_dl_max_w = 0.0;
  std::vector<double> energy_per_bit_ul;  // J/bit, per user
  std::vector<double> rx_power_dl;        // J/s, per user
  double latency_budget_s = 0.0;

  std::size_t num_users() const { return channel_gain.size(); }

  // Throws std::invalid_argument when an invariant does not hold.
  void validate() const;
};

struct TaskProfile {
  std::vector<double> input_bits;
  std::vector<double> output_bits;
  std::vector<double> cycles;
  double shared_input = 0.0;
  double shared_output = 0.0;
  double shared_cycles = 0.0;

  std::size_t num_users() const { return input_bits.size(); }

  // Bits user k uploads on its own, on top of its share of shared_input.
  double separate_input(std::size_t k) const { return input_bits[k] - shared_input; }
  double separate_output(std::size_t k) const { return output_bits[k] - shared_output; }
  double separate_cycles(std::size_t k) const { return cycles[k] - shared_cycles; }

  void validate() const;
  void validate_against(const Scenario& scenario) const;
};

// The optimization vector z. Packed order (see VariableLayout):
// p_ul[K], shared_bits[K], cpu_frac[K], p_dl[K], cpu_frac_shared,
// p_multicast, t_shared_ul, t_shared_dl.
struct Allocation {
  std::vector<double> p_ul;
  std::vector<double> shared_bits;
  std::vector<double> cpu_frac;
  std::vector<double> p_dl;
  double cpu_frac_shared = 0.0;
  double p_multicast = 0.0;
  double t_shared_ul = 0.0;
  double t_shared_dl = 0.0;

  static Allocation zeros(std::size_t num_users);

  std::size_t num_users() const { return p_ul.size(); }
  std::size_t dimension() const { return 4 * num_users() + 4; }

  std::vector<double> to_vector() const;
  static Allocation from_vector(std::size_t num_users, const std::vector<double>& z);
};

// Signed residuals, positive = violated. Residuals are normalized: latency
// constraints by T_max, the shared-bit equality by B_S^I (absolute when
// B_S^I = 0), power limits by their budgets. Fractions are unitless.
struct FeasibilityReport {
  std::vector<double> latency;          // C.1, per user
  std::vector<double> shared_uplink;    // C.2, per user
  std::vector<double> multicast;        // C.3, per user
  double cpu_share = 0.0;               // C.4
  double shared_bits_balance = 0.0;     // C.5
  double power = 0.0;                   // C.6
  double nonnegativity = 0.0;           // every entry of z >= 0
  double worst_violation = 0.0;
  bool feasible = false;
  double tolerance = 0.0;

  std::string summary() const;
};

inline constexpr double kDefaultFeasibilityTolerance = 1e-6;

// Rates in bits/s. Negative power throws std::domain_error.
double uplink_rate(const Scenario& scenario, std::size_t k, double p_ul);
double multicast_rate(const Scenario& scenario, std::size_t k, double p_m);
double unicast_dl_rate(const Scenario& scenario, std::size_t k, double p_dl);

// Energies in J. A zero-bit term contributes 0 regardless of power; a
// positive-bit term at zero power returns +infinity (cannot be completed).
double uplink_energy(const Scenario& scenario, const TaskProfile& profile, std::size_t k,
                     double p_ul, double shared_bits_k);
double downlink_energy(const Scenario& scenario, const TaskProfile& profile, std::size_t k,
                       double p_dl, double p_m);
double total_energy(const Scenario& scenario, const TaskProfile& profile,
                    const Allocation& allocation);

FeasibilityReport check_feasibility(const Scenario& scenario, const TaskProfile& profile,
                                    const Allocation& allocation,
                                    double tol = kDefaultFeasibilityTolerance);

// B_S^I = eta min_k B_k^I, V_S = eta min_k V_k, B_S^O = eta min_k B_k^O.
TaskProfile derive_shared_split(const std::vector<double>& input_bits,
                                const std::vector<double>& output_bits,
                                const std::vector<double>& cycles, double eta);

// num / rate with the 0/0 := 0 convention; +inf for positive num at rate 0.
double transfer_time(double num, double rate);

// dBm (or dBm/Hz) to W (or W/Hz).
double dbm_to_watt(double dbm);

}  // namespace mecsca
