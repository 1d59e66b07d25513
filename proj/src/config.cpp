// Copyright 2026 The mecsca Authors
// SPDX-License-Identifier: Apache-2.0

#include "mecsca/config.hpp"

#include <charconv>
#include <cstdio>
#include <set>
#include <sstream>
#include <stdexcept>

#include "json.hpp"

namespace mecsca {
namespace {

using nlohmann::json;

[[noreturn]] void fail(const std::string& what) { throw std::invalid_argument(what); }

void reject_unknown(const json& obj, const std::set<std::string>& known, const std::string& where) {
  if (!obj.is_object()) fail(where + " must be an object");
  for (const auto& [key, _] : obj.items())
    if (!known.contains(key)) fail("unknown key '" + key + "' in " + where);
}

template <class T>
void read(const json& obj, const char* key, T& out, const std::string& where) {
  if (!obj.contains(key)) return;
  try {
    out = obj.at(key).get<T>();
  } catch (const json::exception&) {
    fail(where + "." + key + " has the wrong type");
  }
}

// Accepts a single value or a list.
template <class T>
std::vector<T> read_list(const json& value, const std::string& where) {
  try {
    if (value.is_array()) return value.get<std::vector<T>>();
    return {value.get<T>()};
  } catch (const json::exception&) {
    fail(where + " has the wrong type");
  }
}

std::vector<std::string> split_list(const std::string& text) {
  std::vector<std::string> out;
  std::string item;
  std::istringstream is(text);
  while (std::getline(is, item, ',')) {
    const auto b = item.find_first_not_of(" \t");
    const auto e = item.find_last_not_of(" \t");
    if (b == std::string::npos) fail("empty item in list '" + text + "'");
    out.push_back(item.substr(b, e - b + 1));
  }
  if (out.empty()) fail("empty list");
  return out;
}

double parse_double(const std::string& key, const std::string& text) {
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc() || ptr != text.data() + text.size())
    fail(key + ": '" + text + "' is not a number");
  return v;
}

template <class Int>
Int parse_int(const std::string& key, const std::string& text) {
  Int v{};
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc() || ptr != text.data() + text.size())
    fail(key + ": '" + text + "' is not a valid integer");
  return v;
}

SharingMode mode_from(const std::string& name) {
  const auto m = parse_sharing_mode(name);
  if (!m) fail("unknown sharing mode '" + name + "'");
  return *m;
}

Suite suite_from(const std::string& name) {
  const auto s = parse_suite(name);
  if (!s) fail("unknown suite '" + name + "'");
  return *s;
}

SurrogateMutation mutation_from(const std::string& name) {
  if (name == "none") return SurrogateMutation::none;
  if (name == "flip_power_linear_term") return SurrogateMutation::flip_power_linear_term;
  fail("unknown mutation '" + name + "'");
}

std::string to_string(SurrogateMutation m) {
  return m == SurrogateMutation::none ? "none" : "flip_power_linear_term";
}

void read_drop(const json& j, DropParams& p, std::optional<std::size_t>& num_users) {
  const std::string w = "drop";
  reject_unknown(j, {"num_users", "min_distance_m", "max_distance_m", "carrier_hz",
                     "uplink_bandwidth_hz", "downlink_bandwidth_hz", "noise_psd_dbm_per_hz",
                     "p_ul_max_dbm", "p_dl_max_dbm", "cloudlet_capacity_cps",
                     "energy_per_bit_ul", "rx_power_dl", "latency_budget_s"},
                 w);
  if (j.contains("num_users")) {
    std::size_t k = 0;
    read(j, "num_users", k, w);
    num_users = k;
  }
  read(j, "min_distance_m", p.min_distance_m, w);
  read(j, "max_distance_m", p.max_distance_m, w);
  read(j, "carrier_hz", p.carrier_hz, w);
  read(j, "uplink_bandwidth_hz", p.uplink_bandwidth_hz, w);
  read(j, "downlink_bandwidth_hz", p.downlink_bandwidth_hz, w);
  read(j, "noise_psd_dbm_per_hz", p.noise_psd_dbm_per_hz, w);
  read(j, "p_ul_max_dbm", p.p_ul_max_dbm, w);
  read(j, "p_dl_max_dbm", p.p_dl_max_dbm, w);
  read(j, "cloudlet_capacity_cps", p.cloudlet_capacity_cps, w);
  read(j, "energy_per_bit_ul", p.energy_per_bit_ul, w);
  read(j, "rx_power_dl", p.rx_power_dl, w);
  read(j, "latency_budget_s", p.latency_budget_s, w);
}

void read_sca(const json& j, ScaConfig& c) {
  const std::string w = "sca";
  reject_unknown(j, {"alpha", "delta0", "epsilon", "max_iterations", "stall_tolerance",
                     "stall_window", "proximal", "inner"},
                 w);
  read(j, "alpha", c.alpha, w);
  read(j, "delta0", c.delta0, w);
  read(j, "epsilon", c.epsilon, w);
  read(j, "max_iterations", c.max_iterations, w);
  read(j, "stall_tolerance", c.stall_tolerance, w);
  read(j, "stall_window", c.stall_window, w);
  if (j.contains("proximal")) {
    const json& p = j.at("proximal");
    const std::string wp = "sca.proximal";
    reject_unknown(p, {"p_ul", "shared_bits", "cpu_frac", "cpu_frac_shared", "p_dl",
                       "p_multicast", "t_shared_ul", "t_shared_dl"},
                   wp);
    ProximalWeights& pw = c.weights;
    read(p, "p_ul", pw.p_ul, wp);
    read(p, "shared_bits", pw.shared_bits, wp);
    read(p, "cpu_frac", pw.cpu_frac, wp);
    read(p, "cpu_frac_shared", pw.cpu_frac_shared, wp);
    read(p, "p_dl", pw.p_dl, wp);
    read(p, "p_multicast", pw.p_multicast, wp);
    read(p, "t_shared_ul", pw.t_shared_ul, wp);
    read(p, "t_shared_dl", pw.t_shared_dl, wp);
  }
  if (j.contains("inner")) {
    const json& s = j.at("inner");
    const std::string ws = "sca.inner";
    reject_unknown(s, {"kkt_tolerance", "max_newton_iters", "initial_barrier_weight",
                       "barrier_reduction", "backtracking_ratio", "sufficient_decrease"},
                   ws);
    read(s, "kkt_tolerance", c.inner.kkt_tolerance, ws);
    read(s, "max_newton_iters", c.inner.max_newton_iters, ws);
    read(s, "initial_barrier_weight", c.inner.initial_barrier_weight, ws);
    read(s, "barrier_reduction", c.inner.barrier_reduction, ws);
    read(s, "backtracking_ratio", c.inner.backtracking_ratio, ws);
    read(s, "sufficient_decrease", c.inner.sufficient_decrease, ws);
  }
}

void read_grid(const json& j, GridOverrides& g) {
  const std::string w = "grid";
  reject_unknown(j, {"power_points", "fraction_points", "split_points", "max_evaluations",
                     "keep_best"},
                 w);
  auto opt = [&](const char* key, auto& out) {
    if (!j.contains(key)) return;
    typename std::remove_reference_t<decltype(out)>::value_type v{};
    read(j, key, v, w);
    out = v;
  };
  opt("power_points", g.power_points);
  opt("fraction_points", g.fraction_points);
  opt("split_points", g.split_points);
  if (j.contains("max_evaluations")) {
    // Also accept a float such as 1e8.
    const json& v = j.at("max_evaluations");
    if (!v.is_number() || v.get<double>() < 0.0) fail("grid.max_evaluations must be a number >= 0");
    g.max_evaluations = v.is_number_float() ? static_cast<std::uint64_t>(v.get<double>())
                                            : v.get<std::uint64_t>();
  }
  opt("keep_best", g.keep_best);
}

void read_validate(const json& j, ValidationConfig& v) {
  const std::string w = "validate";
  reject_unknown(j, {"suites", "drops", "samples_per_drop", "convexity_pairs", "gradient_points",
                     "oracle_drops", "oracle_ratio", "mutation"},
                 w);
  if (j.contains("suites")) {
    v.suites.clear();
    for (const auto& s : read_list<std::string>(j.at("suites"), w + ".suites"))
      v.suites.push_back(suite_from(s));
  }
  read(j, "drops", v.drops, w);
  read(j, "samples_per_drop", v.samples_per_drop, w);
  read(j, "convexity_pairs", v.convexity_pairs, w);
  read(j, "gradient_points", v.gradient_points, w);
  read(j, "oracle_drops", v.oracle_drops, w);
  read(j, "oracle_ratio", v.oracle_ratio, w);
  if (j.contains("mutation")) {
    std::string m;
    read(j, "mutation", m, w);
    v.mutation = mutation_from(m);
  }
}

json to_json_value(const RunConfig& c) {
  const DropParams& p = c.params;
  json drop = {{"min_distance_m", p.min_distance_m},
               {"max_distance_m", p.max_distance_m},
               {"carrier_hz", p.carrier_hz},
               {"uplink_bandwidth_hz", p.uplink_bandwidth_hz},
               {"downlink_bandwidth_hz", p.downlink_bandwidth_hz},
               {"noise_psd_dbm_per_hz", p.noise_psd_dbm_per_hz},
               {"p_ul_max_dbm", p.p_ul_max_dbm},
               {"p_dl_max_dbm", p.p_dl_max_dbm},
               {"cloudlet_capacity_cps", p.cloudlet_capacity_cps},
               {"energy_per_bit_ul", p.energy_per_bit_ul},
               {"rx_power_dl", p.rx_power_dl},
               {"latency_budget_s", p.latency_budget_s}};
  drop["num_users"] = c.num_users ? json(*c.num_users) : json(nullptr);

  json workload = nullptr;
  if (c.workload)
    workload = {{"input_bits", c.workload->input_bits},
                {"output_bits", c.workload->output_bits},
                {"cycles_per_input_bit", c.workload->cycles_per_input_bit}};

  const ScaConfig& s = c.sca;
  const ProximalWeights& w = s.weights;
  json sca = {{"alpha", s.alpha},
              {"delta0", s.delta0},
              {"epsilon", s.epsilon},
              {"max_iterations", s.max_iterations},
              {"stall_tolerance", s.stall_tolerance},
              {"stall_window", s.stall_window},
              {"proximal",
               {{"p_ul", w.p_ul},
                {"shared_bits", w.shared_bits},
                {"cpu_frac", w.cpu_frac},
                {"cpu_frac_shared", w.cpu_frac_shared},
                {"p_dl", w.p_dl},
                {"p_multicast", w.p_multicast},
                {"t_shared_ul", w.t_shared_ul},
                {"t_shared_dl", w.t_shared_dl}}},
              {"inner",
               {{"kkt_tolerance", s.inner.kkt_tolerance},
                {"max_newton_iters", s.inner.max_newton_iters},
                {"initial_barrier_weight", s.inner.initial_barrier_weight},
                {"barrier_reduction", s.inner.barrier_reduction},
                {"backtracking_ratio", s.inner.backtracking_ratio},
                {"sufficient_decrease", s.inner.sufficient_decrease}}}};

  auto opt = [](const auto& o) { return o ? json(*o) : json(nullptr); };
  json grid = {{"power_points", opt(c.grid.power_points)},
               {"fraction_points", opt(c.grid.fraction_points)},
               {"split_points", opt(c.grid.split_points)},
               {"max_evaluations", opt(c.grid.max_evaluations)},
               {"keep_best", opt(c.grid.keep_best)}};

  const ValidationConfig& v = c.validation;
  json suites = json::array();
  for (Suite su : v.suites) suites.push_back(to_string(su));
  json validate = {{"suites", suites},
                   {"drops", v.drops},
                   {"samples_per_drop", v.samples_per_drop},
                   {"convexity_pairs", v.convexity_pairs},
                   {"gradient_points", v.gradient_points},
                   {"oracle_drops", v.oracle_drops},
                   {"oracle_ratio", v.oracle_ratio},
                   {"mutation", to_string(v.mutation)}};

  json modes = json::array();
  for (SharingMode m : c.modes) modes.push_back(to_string(m));

  json out = {{"seed", c.seed},         {"drops", c.drops}, {"drop_index", c.drop_index},
              {"jobs", c.jobs},         {"out", c.out},     {"eta", c.etas},
              {"mode", modes},          {"drop", drop},     {"workload", workload},
              {"sca", sca},             {"grid", grid},     {"validate", validate}};
  out["problem"] = c.problem ? json::parse(problem_to_json(*c.problem, -1)) : json(nullptr);
  return out;
}

}  // namespace

std::string to_string(Command command) {
  switch (command) {
    case Command::solve: return "solve";
    case Command::sweep: return "sweep";
    case Command::oracle: return "oracle";
    case Command::validate: return "validate";
  }
  return "unknown";
}

std::optional<Command> parse_command(const std::string& name) {
  for (Command c : {Command::solve, Command::sweep, Command::oracle, Command::validate})
    if (to_string(c) == name) return c;
  return std::nullopt;
}

void RunConfig::validate() const {
  if (drops < 1) fail("drops must be at least 1");
  if (drop_index < 0) fail("drop_index must be non-negative");
  if (jobs < 1) fail("jobs must be at least 1");
  if (out.empty()) fail("out must not be empty");
  if (num_users && *num_users == 0) fail("num_users must be at least 1");
  for (double eta : etas)
    if (!(eta >= 0.0 && eta <= 1.0)) fail("eta must lie in [0, 1]");
  DropParams p = params;
  if (num_users) p.num_users = *num_users;
  p.validate();
  if (workload) workload->validate();
  sca.validate();
  GridSpec g;
  if (grid.power_points) g.power_points = *grid.power_points;
  if (grid.fraction_points) g.fraction_points = *grid.fraction_points;
  if (grid.split_points) g.split_points = *grid.split_points;
  if (grid.max_evaluations) g.max_evaluations = *grid.max_evaluations;
  if (grid.keep_best) g.keep_best = *grid.keep_best;
  g.validate();
  if (problem) {
    problem->scenario.validate();
    problem->profile.validate_against(problem->scenario);
  }
}

RunConfig config_from_json(std::string_view text) {
  RunConfig c;
  if (text.find_first_not_of(" \t\r\n") == std::string_view::npos) return c;
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    fail(std::string("config is not valid JSON: ") + e.what());
  }
  const std::string w = "config";
  reject_unknown(j, {"seed", "drops", "drop_index", "jobs", "out", "eta", "mode", "drop",
                     "workload", "sca", "grid", "validate", "problem"},
                 w);
  read(j, "seed", c.seed, w);
  read(j, "drops", c.drops, w);
  read(j, "drop_index", c.drop_index, w);
  read(j, "jobs", c.jobs, w);
  read(j, "out", c.out, w);
  if (j.contains("eta") && !j.at("eta").is_null()) c.etas = read_list<double>(j.at("eta"), "eta");
  if (j.contains("mode") && !j.at("mode").is_null())
    for (const auto& m : read_list<std::string>(j.at("mode"), "mode")) c.modes.push_back(mode_from(m));
  if (j.contains("drop")) read_drop(j.at("drop"), c.params, c.num_users);
  if (j.contains("workload") && !j.at("workload").is_null()) {
    const json& wl = j.at("workload");
    reject_unknown(wl, {"input_bits", "output_bits", "cycles_per_input_bit"}, "workload");
    Workload work;
    read(wl, "input_bits", work.input_bits, "workload");
    read(wl, "output_bits", work.output_bits, "workload");
    read(wl, "cycles_per_input_bit", work.cycles_per_input_bit, "workload");
    c.workload = work;
  }
  if (j.contains("sca")) read_sca(j.at("sca"), c.sca);
  if (j.contains("grid")) read_grid(j.at("grid"), c.grid);
  if (j.contains("validate")) read_validate(j.at("validate"), c.validation);
  if (j.contains("problem") && !j.at("problem").is_null())
    c.problem = problem_from_json(j.at("problem").dump());
  c.validate();
  return c;
}

void apply_override(RunConfig& c, const std::string& key, const std::string& value) {
  if (key == "seed") {
    c.seed = parse_int<std::uint64_t>(key, value);
  } else if (key == "drops") {
    c.drops = parse_int<int>(key, value);
  } else if (key == "drop_index") {
    c.drop_index = parse_int<int>(key, value);
  } else if (key == "jobs") {
    c.jobs = parse_int<int>(key, value);
  } else if (key == "out") {
    c.out = value;
  } else if (key == "users") {
    c.num_users = parse_int<std::size_t>(key, value);
  } else if (key == "eta") {
    c.etas.clear();
    for (const auto& item : split_list(value)) c.etas.push_back(parse_double(key, item));
  } else if (key == "mode") {
    c.modes.clear();
    for (const auto& item : split_list(value)) c.modes.push_back(mode_from(item));
  } else if (key == "tmax") {
    const double t = parse_double(key, value);
    c.params.latency_budget_s = t;
    if (c.problem) c.problem->scenario.latency_budget_s = t;
  } else if (key == "suite") {
    c.validation.suites.clear();
    for (const auto& item : split_list(value)) c.validation.suites.push_back(suite_from(item));
  } else if (key == "mutation") {
    c.validation.mutation = mutation_from(value);
  } else if (key == "problem") {
    c.problem = problem_from_json(value);
  } else {
    fail("unknown setting '" + key + "'");
  }
  c.validate();
}

RunConfig resolve(const RunConfig& config, Command command) {
  RunConfig c = config;
  if (!c.num_users) c.num_users = command == Command::oracle ? 1 : 8;
  if (c.problem) c.num_users = c.problem->scenario.num_users();
  c.params.num_users = *c.num_users;
  c.params.seed = c.seed;
  if (!c.workload) c.workload = default_workload(*c.num_users);
  if (c.etas.empty()) c.etas = command == Command::sweep ? std::vector<double>{0.0, 0.3}
                                                         : std::vector<double>{0.3};
  if (c.modes.empty())
    c.modes = command == Command::sweep ? all_sharing_modes()
                                        : std::vector<SharingMode>{SharingMode::full_shared};
  if (command == Command::solve || command == Command::oracle) {
    if (c.etas.size() != 1) fail(to_string(command) + " takes a single eta");
    if (c.modes.size() != 1) fail(to_string(command) + " takes a single mode");
  }
  const GridSpec g = grid_spec(c, *c.num_users);
  c.grid = {g.power_points, g.fraction_points, g.split_points, g.max_evaluations, g.keep_best};
  c.validate();
  return c;
}

std::string config_to_json(const RunConfig& config, int indent) {
  return to_json_value(config).dump(indent);
}

std::uint64_t config_hash(const RunConfig& config) {
  json j = to_json_value(config);
  j.erase("jobs");
  j.erase("out");
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char ch : j.dump()) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::string hash_hex(std::uint64_t hash) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(hash));
  return buf;
}

MonteCarloConfig monte_carlo_config(const RunConfig& config) {
  if (!config.workload || !config.num_users) fail("configuration is not resolved");
  MonteCarloConfig mc;
  mc.params = config.params;
  mc.params.num_users = *config.num_users;
  mc.params.seed = config.seed;
  mc.workload = *config.workload;
  mc.etas = config.etas;
  mc.modes = config.modes;
  mc.drops = config.drops;
  mc.sca = config.sca;
  mc.jobs = config.jobs;
  return mc;
}

ValidationConfig validation_config(const RunConfig& config) {
  ValidationConfig v = config.validation;
  v.seed = config.seed;
  v.params = config.params;
  v.params.num_users = config.num_users.value_or(8);
  if (!config.etas.empty()) v.eta = config.etas.front();
  v.sca = config.sca;
  return v;
}

GridSpec grid_spec(const RunConfig& config, std::size_t num_users) {
  GridSpec g = GridSpec::for_users(num_users);
  const GridOverrides& o = config.grid;
  if (o.power_points) g.power_points = *o.power_points;
  if (o.fraction_points) g.fraction_points = *o.fraction_points;
  if (o.split_points) g.split_points = *o.split_points;
  if (o.max_evaluations) g.max_evaluations = *o.max_evaluations;
  if (o.keep_best) g.keep_best = *o.keep_best;
  g.jobs = config.jobs;
  return g;
}

Problem scenario_problem(const RunConfig& config) {
  if (config.problem) return *config.problem;
  if (!config.workload || !config.num_users || config.etas.empty() || config.modes.empty())
    fail("configuration is not resolved");
  DropParams p = config.params;
  p.num_users = *config.num_users;
  p.seed = drop_seed(config.seed, static_cast<std::uint64_t>(config.drop_index));
  Problem out;
  out.scenario = generate_drop(p);
  out.profile = apply_sharing_mode(base_profile(*config.workload, p.num_users, config.etas.front()),
                                   config.modes.front());
  return out;
}

}  // namespace mecsca
