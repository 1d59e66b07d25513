// Copyright 2026 The mecsca Authors
// SPDX-License-Identifier: Apache-2.0

#include "mecsca/model.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace mecsca {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void require(bool condition, const char* what) {
  if (!condition) throw std::invalid_argument(what);
}

bool positive_finite(double x) { return std::isfinite(x) && x > 0.0; }
bool nonnegative_finite(double x) { return std::isfinite(x) && x >= 0.0; }

// bandwidth * log2(1 + gain * p / (noise_psd * bandwidth))
double shannon_rate(double bandwidth, double gain, double noise_psd, double p) {
  if (!(p >= 0.0)) throw std::domain_error("transmit power must be non-negative");
  if (p == 0.0) return 0.0;
  return bandwidth * std::log2(1.0 + gain * p / (noise_psd * bandwidth));
}

void check_user(const Scenario& scenario, std::size_t k) {
  if (k >= scenario.num_users()) throw std::out_of_range("user index out of range");
}

}  // namespace

void Scenario::validate() const {
  const std::size_t k = num_users();
  require(k >= 1, "scenario needs at least one user");
  require(positive_finite(uplink_bandwidth_hz), "uplink_bandwidth_hz must be > 0");
  require(positive_finite(downlink_bandwidth_hz), "downlink_bandwidth_hz must be > 0");
  require(positive_finite(noise_psd_w_per_hz), "noise_psd_w_per_hz must be > 0");
  require(positive_finite(cloudlet_capacity_cps), "cloudlet_capacity_cps must be > 0");
  require(positive_finite(p_ul_max_w), "p_ul_max_w must be > 0");
  require(positive_finite(p_dl_max_w), "p_dl_max_w must be > 0");
  require(positive_finite(latency_budget_s), "latency_budget_s must be > 0");
  require(energy_per_bit_ul.size() == k, "energy_per_bit_ul must have one entry per user");
  require(rx_power_dl.size() == k, "rx_power_dl must have one entry per user");
  for (std::size_t i = 0; i < k; ++i) {
    require(positive_finite(channel_gain[i]), "channel_gain must be > 0");
    require(nonnegative_finite(energy_per_bit_ul[i]), "energy_per_bit_ul must be >= 0");
    require(nonnegative_finite(rx_power_dl[i]), "rx_power_dl must be >= 0");
  }
}

void TaskProfile::validate() const {
  const std::size_t k = num_users();
  require(k >= 1, "profile needs at least one user");
  require(output_bits.size() == k && cycles.size() == k,
          "profile vectors must have one entry per user");
  for (std::size_t i = 0; i < k; ++i) {
    require(nonnegative_finite(input_bits[i]), "input_bits must be >= 0");
    require(nonnegative_finite(output_bits[i]), "output_bits must be >= 0");
    require(nonnegative_finite(cycles[i]), "cycles must be >= 0");
  }
  require(nonnegative_finite(shared_input), "shared_input must be >= 0");
  require(nonnegative_finite(shared_output), "shared_output must be >= 0");
  require(nonnegative_finite(shared_cycles), "shared_cycles must be >= 0");
  require(shared_input <= *std::min_element(input_bits.begin(), input_bits.end()),
          "shared_input must not exceed min_k input_bits");
  require(shared_output <= *std::min_element(output_bits.begin(), output_bits.end()),
          "shared_output must not exceed min_k output_bits");
  require(shared_cycles <= *std::min_element(cycles.begin(), cycles.end()),
          "shared_cycles must not exceed min_k cycles");
}

void TaskProfile::validate_against(const Scenario& scenario) const {
  validate();
  require(num_users() == scenario.num_users(), "profile and scenario disagree on user count");
}

Allocation Allocation::zeros(std::size_t num_users) {
  Allocation a;
  a.p_ul.assign(num_users, 0.0);
  a.shared_bits.assign(num_users, 0.0);
  a.cpu_frac.assign(num_users, 0.0);
  a.p_dl.assign(num_users, 0.0);
  return a;
}

std::vector<double> Allocation::to_vector() const {
  std::vector<double> z;
  z.reserve(dimension());
  z.insert(z.end(), p_ul.begin(), p_ul.end());
  z.insert(z.end(), shared_bits.begin(), shared_bits.end());
  z.insert(z.end(), cpu_frac.begin(), cpu_frac.end());
  z.insert(z.end(), p_dl.begin(), p_dl.end());
  z.push_back(cpu_frac_shared);
  z.push_back(p_multicast);
  z.push_back(t_shared_ul);
  z.push_back(t_shared_dl);
  return z;
}

Allocation Allocation::from_vector(std::size_t num_users, const std::vector<double>& z) {
  if (z.size() != 4 * num_users + 4)
    throw std::invalid_argument("allocation vector has wrong dimension");
  Allocation a;
  const auto k = static_cast<std::ptrdiff_t>(num_users);
  a.p_ul.assign(z.begin(), z.begin() + k);
  a.shared_bits.assign(z.begin() + k, z.begin() + 2 * k);
  a.cpu_frac.assign(z.begin() + 2 * k, z.begin() + 3 * k);
  a.p_dl.assign(z.begin() + 3 * k, z.begin() + 4 * k);
  a.cpu_frac_shared = z[4 * num_users];
  a.p_multicast = z[4 * num_users + 1];
  a.t_shared_ul = z[4 * num_users + 2];
  a.t_shared_dl = z[4 * num_users + 3];
  return a;
}

double transfer_time(double num, double rate) {
  if (num == 0.0) return 0.0;
  if (rate <= 0.0) return kInf;
  return num / rate;
}

double dbm_to_watt(double dbm) { return std::pow(10.0, (dbm - 30.0) / 10.0); }

double uplink_rate(const Scenario& scenario, std::size_t k, double p_ul) {
  check_user(scenario, k);
  const double w = scenario.uplink_bandwidth_hz / static_cast<double>(scenario.num_users());
  return shannon_rate(w, scenario.channel_gain[k], scenario.noise_psd_w_per_hz, p_ul);
}

double multicast_rate(const Scenario& scenario, std::size_t k, double p_m) {
  check_user(scenario, k);
  return shannon_rate(scenario.downlink_bandwidth_hz, scenario.channel_gain[k],
                      scenario.noise_psd_w_per_hz, p_m);
}

double unicast_dl_rate(const Scenario& scenario, std::size_t k, double p_dl) {
  check_user(scenario, k);
  const double w = scenario.downlink_bandwidth_hz / static_cast<double>(scenario.num_users());
  return shannon_rate(w, scenario.channel_gain[k], scenario.noise_psd_w_per_hz, p_dl);
}

double uplink_energy(const Scenario& scenario, const TaskProfile& profile, std::size_t k,
                     double p_ul, double shared_bits_k) {
  const double bits = shared_bits_k + profile.separate_input(k);
  if (bits == 0.0) return 0.0;
  const double rate = uplink_rate(scenario, k, p_ul);
  if (rate <= 0.0) return kInf;
  return (p_ul / rate + scenario.energy_per_bit_ul[k]) * bits;
}

double downlink_energy(const Scenario& scenario, const TaskProfile& profile, std::size_t k,
                       double p_dl, double p_m) {
  const double unicast = profile.separate_output(k) == 0.0
                             ? 0.0
                             : transfer_time(profile.separate_output(k),
                                             unicast_dl_rate(scenario, k, p_dl));
  const double multicast = profile.shared_output == 0.0
                               ? 0.0
                               : transfer_time(profile.shared_output,
                                               multicast_rate(scenario, k, p_m));
  const double seconds = unicast + multicast;
  if (seconds == 0.0) return 0.0;
  return seconds * scenario.rx_power_dl[k];
}

double total_energy(const Scenario& scenario, const TaskProfile& profile,
                    const Allocation& allocation) {
  double sum = 0.0;
  for (std::size_t k = 0; k < scenario.num_users(); ++k) {
    sum += uplink_energy(scenario, profile, k, allocation.p_ul[k], allocation.shared_bits[k]);
    sum += downlink_energy(scenario, profile, k, allocation.p_dl[k], allocation.p_multicast);
  }
  return sum;
}

FeasibilityReport check_feasibility(const Scenario& scenario, const TaskProfile& profile,
                                    const Allocation& a, double tol) {
  if (!(tol > 0.0)) throw std::invalid_argument("feasibility tolerance must be > 0");
  const std::size_t n = scenario.num_users();
  if (a.num_users() != n || a.shared_bits.size() != n || a.cpu_frac.size() != n ||
      a.p_dl.size() != n)
    throw std::invalid_argument("allocation does not match scenario user count");

  FeasibilityReport r;
  r.tolerance = tol;
  r.latency.resize(n);
  r.shared_uplink.resize(n);
  r.multicast.resize(n);
  const double tmax = scenario.latency_budget_s;
  const double fc = scenario.cloudlet_capacity_cps;

  // Negative entries would make the rate formulas throw; report them instead
  // and evaluate the rest on clamped values.
  double neg = 0.0;
  for (double v : a.to_vector()) neg = std::max(neg, -v);
  r.nonnegativity = neg;
  auto clamp0 = [](double v) { return std::max(v, 0.0); };

  const double shared_compute = transfer_time(profile.shared_cycles,
                                              clamp0(a.cpu_frac_shared) * fc);
  for (std::size_t k = 0; k < n; ++k) {
    const double r_ul = uplink_rate(scenario, k, clamp0(a.p_ul[k]));
    const double r_dl = unicast_dl_rate(scenario, k, clamp0(a.p_dl[k]));
    const double r_m = multicast_rate(scenario, k, clamp0(a.p_multicast));
    const double busy = transfer_time(profile.separate_input(k), r_ul) +
                        transfer_time(profile.separate_cycles(k), clamp0(a.cpu_frac[k]) * fc) +
                        shared_compute + transfer_time(profile.separate_output(k), r_dl);
    r.latency[k] = (busy - (tmax - a.t_shared_ul - a.t_shared_dl)) / tmax;
    r.shared_uplink[k] = (transfer_time(clamp0(a.shared_bits[k]), r_ul) - a.t_shared_ul) / tmax;
    r.multicast[k] = (transfer_time(profile.shared_output, r_m) - a.t_shared_dl) / tmax;
  }

  double fsum = 0.0;
  for (double f : a.cpu_frac) fsum += f;
  r.cpu_share = std::max({fsum - 1.0, a.cpu_frac_shared - 1.0, -a.cpu_frac_shared});
  for (double f : a.cpu_frac) r.cpu_share = std::max(r.cpu_share, -f);

  double bsum = 0.0;
  for (double b : a.shared_bits) bsum += b;
  const double bscale = profile.shared_input > 0.0 ? profile.shared_input : 1.0;
  r.shared_bits_balance = std::abs(bsum - profile.shared_input) / bscale;

  double pdl_sum = 0.0;
  for (double p : a.p_dl) pdl_sum += p;
  r.power = std::max(pdl_sum / scenario.p_dl_max_w - 1.0,
                     a.p_multicast / scenario.p_dl_max_w - 1.0);
  for (double p : a.p_ul) r.power = std::max(r.power, p / scenario.p_ul_max_w - 1.0);

  double worst = std::max({r.cpu_share, r.shared_bits_balance, r.power, r.nonnegativity});
  for (std::size_t k = 0; k < n; ++k)
    worst = std::max({worst, r.latency[k], r.shared_uplink[k], r.multicast[k]});
  // NaN residuals count as violations.
  if (std::isnan(worst)) worst = kInf;
  r.worst_violation = worst;
  r.feasible = worst <= tol;
  return r;
}

std::string FeasibilityReport::summary() const {
  std::ostringstream os;
  os << (feasible ? "feasible" : "infeasible") << " worst_violation=" << worst_violation
     << " tol=" << tolerance;
  return os.str();
}

TaskProfile derive_shared_split(const std::vector<double>& input_bits,
                                const std::vector<double>& output_bits,
                                const std::vector<double>& cycles, double eta) {
  if (!(eta >= 0.0 && eta <= 1.0)) throw std::domain_error("sharing fraction eta must lie in [0, 1]");
  if (input_bits.empty() || input_bits.size() != output_bits.size() ||
      input_bits.size() != cycles.size())
    throw std::invalid_argument("workload vectors must be non-empty and equally sized");
  TaskProfile p;
  p.input_bits = input_bits;
  p.output_bits = output_bits;
  p.cycles = cycles;
  p.shared_input = eta * *std::min_element(input_bits.begin(), input_bits.end());
  p.shared_output = eta * *std::min_element(output_bits.begin(), output_bits.end());
  p.shared_cycles = eta * *std::min_element(cycles.begin(), cycles.end());
  p.validate();
  return p;
}

}  // namespace mecsca
