// Copyright 2026 The mecsca Authors
// SPDX-License-Identifier: Apache-2.0

#include "mecsca/json_io.hpp"

#include <stdexcept>

#include "json.hpp"

namespace mecsca {

using nlohmann::json;

namespace {

json units_block() {
  return json{{"uplink_bandwidth_hz", "Hz"},
              {"downlink_bandwidth_hz", "Hz"},
              {"channel_gain", "linear power gain"},
              {"noise_psd_w_per_hz", "W/Hz"},
              {"cloudlet_capacity_cps", "CPU cycles/s"},
              {"p_ul_max_w", "W"},
              {"p_dl_max_w", "W"},
              {"energy_per_bit_ul", "J/bit"},
              {"rx_power_dl", "J/s"},
              {"latency_budget_s", "s"},
              {"input_bits", "bits"},
              {"output_bits", "bits"},
              {"cycles", "CPU cycles"},
              {"shared_input", "bits"},
              {"shared_output", "bits"},
              {"shared_cycles", "CPU cycles"}};
}

template <typename T>
T field(const json& j, const char* name) {
  if (!j.contains(name)) throw std::invalid_argument(std::string("missing field: ") + name);
  try {
    return j.at(name).get<T>();
  } catch (const json::exception& e) {
    throw std::invalid_argument(std::string("bad field ") + name + ": " + e.what());
  }
}

}  // namespace

std::string problem_to_json(const Problem& problem, int indent) {
  const Scenario& s = problem.scenario;
  const TaskProfile& p = problem.profile;
  json j;
  j["units"] = units_block();
  j["scenario"] = {{"num_users", s.num_users()},
                   {"uplink_bandwidth_hz", s.uplink_bandwidth_hz},
                   {"downlink_bandwidth_hz", s.downlink_bandwidth_hz},
                   {"channel_gain", s.channel_gain},
                   {"noise_psd_w_per_hz", s.noise_psd_w_per_hz},
                   {"cloudlet_capacity_cps", s.cloudlet_capacity_cps},
                   {"p_ul_max_w", s.p_ul_max_w},
                   {"p_dl_max_w", s.p_dl_max_w},
                   {"energy_per_bit_ul", s.energy_per_bit_ul},
                   {"rx_power_dl", s.rx_power_dl},
                   {"latency_budget_s", s.latency_budget_s}};
  j["profile"] = {{"input_bits", p.input_bits},       {"output_bits", p.output_bits},
                  {"cycles", p.cycles},               {"shared_input", p.shared_input},
                  {"shared_output", p.shared_output}, {"shared_cycles", p.shared_cycles}};
  return j.dump(indent);
}

Problem problem_from_json(std::string_view text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw std::invalid_argument(std::string("invalid JSON: ") + e.what());
  }
  if (!j.contains("scenario") || !j.contains("profile"))
    throw std::invalid_argument("problem document needs 'scenario' and 'profile' objects");
  const json& js = j["scenario"];
  const json& jp = j["profile"];

  Problem out;
  Scenario& s = out.scenario;
  s.uplink_bandwidth_hz = field<double>(js, "uplink_bandwidth_hz");
  s.downlink_bandwidth_hz = field<double>(js, "downlink_bandwidth_hz");
  s.channel_gain = field<std::vector<double>>(js, "channel_gain");
  s.noise_psd_w_per_hz = field<double>(js, "noise_psd_w_per_hz");
  s.cloudlet_capacity_cps = field<double>(js, "cloudlet_capacity_cps");
  s.p_ul_max_w = field<double>(js, "p_ul_max_w");
  s.p_dl_max_w = field<double>(js, "p_dl_max_w");
  s.energy_per_bit_ul = field<std::vector<double>>(js, "energy_per_bit_ul");
  s.rx_power_dl = field<std::vector<double>>(js, "rx_power_dl");
  s.latency_budget_s = field<double>(js, "latency_budget_s");
  if (js.contains("num_users") && field<std::size_t>(js, "num_users") != s.num_users())
    throw std::invalid_argument("num_users disagrees with channel_gain length");
  s.validate();

  TaskProfile& p = out.profile;
  p.input_bits = field<std::vector<double>>(jp, "input_bits");
  p.output_bits = field<std::vector<double>>(jp, "output_bits");
  p.cycles = field<std::vector<double>>(jp, "cycles");
  p.shared_input = field<double>(jp, "shared_input");
  p.shared_output = field<double>(jp, "shared_output");
  p.shared_cycles = field<double>(jp, "shared_cycles");
  p.validate_against(s);
  return out;
}

std::string allocation_to_json(const Allocation& a, int indent) {
  json j = {{"p_ul_w", a.p_ul},
            {"shared_bits", a.shared_bits},
            {"cpu_frac", a.cpu_frac},
            {"p_dl_w", a.p_dl},
            {"cpu_frac_shared", a.cpu_frac_shared},
            {"p_multicast_w", a.p_multicast},
            {"t_shared_ul_s", a.t_shared_ul},
            {"t_shared_dl_s", a.t_shared_dl}};
  return j.dump(indent);
}

Allocation allocation_from_json(std::string_view text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw std::invalid_argument(std::string("invalid JSON: ") + e.what());
  }
  Allocation a;
  a.p_ul = field<std::vector<double>>(j, "p_ul_w");
  a.shared_bits = field<std::vector<double>>(j, "shared_bits");
  a.cpu_frac = field<std::vector<double>>(j, "cpu_frac");
  a.p_dl = field<std::vector<double>>(j, "p_dl_w");
  a.cpu_frac_shared = field<double>(j, "cpu_frac_shared");
  a.p_multicast = field<double>(j, "p_multicast_w");
  a.t_shared_ul = field<double>(j, "t_shared_ul_s");
  a.t_shared_dl = field<double>(j, "t_shared_dl_s");
  const std::size_t k = a.p_ul.size();
  if (a.shared_bits.size() != k || a.cpu_frac.size() != k || a.p_dl.size() != k)
    throw std::invalid_argument("allocation vectors must share one length");
  return a;
}

}  // namespace mecsca
