// Copyright 2026 The mecsca Authors
// SPDX-License-Identifier: Apache-2.0

#include "mecsca/scenario.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <random>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "mecsca/csv.hpp"

namespace mecsca {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

// 53-bit uniform in [0, 1); spelled out so draws do not depend on the
// standard library's distribution implementations.
double uniform01(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

bool solved(const DropRecord& r) { return !r.infeasible; }

}  // namespace

void DropParams::validate() const {
  if (num_users < 1) throw std::invalid_argument("num_users must be >= 1");
  if (!(min_distance_m > 0.0 && min_distance_m <= max_distance_m))
    throw std::invalid_argument("distance range must be positive and ordered");
  for (double v : {uplink_bandwidth_hz, downlink_bandwidth_hz, cloudlet_capacity_cps,
                   latency_budget_s, carrier_hz}) {
    if (!(v > 0.0) || !std::isfinite(v))
      throw std::invalid_argument("bandwidths, capacity, carrier and latency budget must be > 0");
  }
  if (!(energy_per_bit_ul >= 0.0) || !(rx_power_dl >= 0.0))
    throw std::invalid_argument("energy coefficients must be >= 0");
}

void Workload::validate() const {
  if (!(input_bits >= 0.0 && output_bits >= 0.0 && cycles_per_input_bit >= 0.0))
    throw std::invalid_argument("workload sizes must be >= 0");
}

Workload default_workload(std::size_t num_users) {
  if (num_users < 1) throw std::invalid_argument("num_users must be >= 1");
  Workload w;
  const double scale = 8.0 / static_cast<double>(num_users);
  w.input_bits *= scale;
  w.output_bits *= scale;
  return w;
}

std::string to_string(SharingMode mode) {
  switch (mode) {
    case SharingMode::full_shared: return "full_shared";
    case SharingMode::shared_processing_downlink: return "shared_processing_downlink";
    case SharingMode::shared_uplink_only: return "shared_uplink_only";
    case SharingMode::separate: return "separate";
  }
  return "unknown";
}

std::optional<SharingMode> parse_sharing_mode(const std::string& name) {
  for (SharingMode m : all_sharing_modes())
    if (to_string(m) == name) return m;
  return std::nullopt;
}

const std::vector<SharingMode>& all_sharing_modes() {
  static const std::vector<SharingMode> modes = {
      SharingMode::full_shared, SharingMode::shared_uplink_only,
      SharingMode::shared_processing_downlink, SharingMode::separate};
  return modes;
}

double path_loss_db(double distance_m) {
  if (!(distance_m > 0.0)) throw std::domain_error("distance must be > 0");
  return 140.7 + 36.7 * std::log10(distance_m / 1000.0);
}

std::uint64_t drop_seed(std::uint64_t master_seed, std::uint64_t drop_index) {
  return splitmix64(splitmix64(master_seed) ^ splitmix64(drop_index + 0x632BE59BD9B4E019ULL));
}

Scenario generate_drop(const DropParams& params) {
  params.validate();
  std::mt19937_64 rng(params.seed);
  Scenario s;
  s.uplink_bandwidth_hz = params.uplink_bandwidth_hz;
  s.downlink_bandwidth_hz = params.downlink_bandwidth_hz;
  s.noise_psd_w_per_hz = dbm_to_watt(params.noise_psd_dbm_per_hz);
  s.cloudlet_capacity_cps = params.cloudlet_capacity_cps;
  s.p_ul_max_w = dbm_to_watt(params.p_ul_max_dbm);
  s.p_dl_max_w = dbm_to_watt(params.p_dl_max_dbm);
  s.latency_budget_s = params.latency_budget_s;
  for (std::size_t k = 0; k < params.num_users; ++k) {
    const double d =
        params.min_distance_m + (params.max_distance_m - params.min_distance_m) * uniform01(rng);
    const double fading = -std::log1p(-uniform01(rng));
    s.channel_gain.push_back(fading * std::pow(10.0, -path_loss_db(d) / 10.0));
    s.energy_per_bit_ul.push_back(params.energy_per_bit_ul);
    s.rx_power_dl.push_back(params.rx_power_dl);
  }
  s.validate();
  return s;
}

TaskProfile base_profile(const Workload& workload, std::size_t num_users, double eta) {
  workload.validate();
  const std::vector<double> in(num_users, workload.input_bits);
  const std::vector<double> out(num_users, workload.output_bits);
  const std::vector<double> cyc(num_users, workload.cycles_per_input_bit * workload.input_bits);
  return derive_shared_split(in, out, cyc, eta);
}

TaskProfile apply_sharing_mode(const TaskProfile& shared_profile, SharingMode mode) {
  TaskProfile p = shared_profile;
  switch (mode) {
    case SharingMode::full_shared: break;
    case SharingMode::shared_processing_downlink: p.shared_input = 0.0; break;
    case SharingMode::shared_uplink_only:
      p.shared_cycles = 0.0;
      p.shared_output = 0.0;
      break;
    case SharingMode::separate:
      p.shared_input = 0.0;
      p.shared_cycles = 0.0;
      p.shared_output = 0.0;
      break;
  }
  p.validate();
  return p;
}

void MonteCarloConfig::validate() const {
  params.validate();
  workload.validate();
  if (drops < 1) throw std::invalid_argument("drops must be >= 1");
  if (etas.empty() || modes.empty()) throw std::invalid_argument("eta grid and modes must be non-empty");
  for (double e : etas)
    if (!(e >= 0.0 && e <= 1.0)) throw std::invalid_argument("eta must lie in [0, 1]");
  if (jobs < 1) throw std::invalid_argument("jobs must be >= 1");
  sca.validate();
}

DropRecord run_drop(const MonteCarloConfig& config, double eta, SharingMode mode, int drop) {
  DropRecord r;
  r.eta = eta;
  r.mode = mode;
  r.drop = drop;
  r.seed = drop_seed(config.params.seed, static_cast<std::uint64_t>(drop));
  DropParams p = config.params;
  p.seed = r.seed;
  const Scenario scenario = generate_drop(p);
  const TaskProfile profile =
      apply_sharing_mode(base_profile(config.workload, p.num_users, eta), mode);
  const SolveResult res = sca_solve(scenario, profile, config.sca);
  r.status = res.status;
  r.iterations = res.iterations;
  r.final_residual = res.final_residual();
  r.infeasible = res.status == ScaStatus::infeasible_scenario ||
                 res.status == ScaStatus::inner_failure || !res.feasibility.feasible;
  r.sum_energy = r.infeasible ? std::numeric_limits<double>::quiet_NaN() : res.objective;
  for (const IterationRecord& it : res.history)
    r.max_iterate_violation = std::max(r.max_iterate_violation, it.worst_violation);
  return r;
}

MonteCarloResult monte_carlo(const MonteCarloConfig& config) {
  config.validate();
  struct Task {
    double eta;
    SharingMode mode;
    int drop;
  };
  std::vector<Task> tasks;
  for (double eta : config.etas)
    for (SharingMode mode : config.modes)
      for (int d = 0; d < config.drops; ++d) tasks.push_back({eta, mode, d});

  MonteCarloResult out;
  out.config = config;
  out.records.resize(tasks.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < tasks.size(); i = next++)
      out.records[i] = run_drop(config, tasks[i].eta, tasks[i].mode, tasks[i].drop);
  };
  const int workers = std::min<int>(config.jobs, static_cast<int>(tasks.size()));
  std::vector<std::thread> pool;
  for (int w = 1; w < workers; ++w) pool.emplace_back(worker);
  worker();
  for (std::thread& t : pool) t.join();

  for (double eta : config.etas) {
    for (SharingMode mode : config.modes) {
      AggregateRow row;
      row.eta = eta;
      row.mode = mode;
      std::vector<double> e;
      for (const DropRecord& r : out.records) {
        if (r.eta != eta || r.mode != mode) continue;
        if (solved(r)) e.push_back(r.sum_energy);
        else ++row.n_infeasible;
      }
      row.n_feasible = static_cast<int>(e.size());
      if (e.empty()) {
        row.flagged = true;
        row.mean = row.median = row.stderr_ = std::numeric_limits<double>::quiet_NaN();
      } else {
        double sum = 0.0;
        for (double x : e) sum += x;
        row.mean = sum / static_cast<double>(e.size());
        double var = 0.0;
        for (double x : e) var += (x - row.mean) * (x - row.mean);
        row.stderr_ = e.size() > 1
                          ? std::sqrt(var / static_cast<double>(e.size() - 1)) /
                                std::sqrt(static_cast<double>(e.size()))
                          : 0.0;
        std::sort(e.begin(), e.end());
        const std::size_t m = e.size() / 2;
        row.median = e.size() % 2 == 1 ? e[m] : 0.5 * (e[m - 1] + e[m]);
      }
      out.aggregates.push_back(row);
    }
  }
  return out;
}

namespace {

const DropRecord* find_record(const MonteCarloResult& res, double eta, SharingMode mode, int drop) {
  for (const DropRecord& r : res.records)
    if (r.eta == eta && r.mode == mode && r.drop == drop) return &r;
  return nullptr;
}

}  // namespace

std::optional<double> MonteCarloResult::saving_vs_separate(double eta, SharingMode mode) const {
  double num = 0.0, den = 0.0;
  int paired = 0;
  for (int d = 0; d < config.drops; ++d) {
    const DropRecord* a = find_record(*this, eta, mode, d);
    const DropRecord* b = find_record(*this, eta, SharingMode::separate, d);
    if (a == nullptr || b == nullptr || !solved(*a) || !solved(*b)) continue;
    num += a->sum_energy;
    den += b->sum_energy;
    ++paired;
  }
  if (paired == 0 || !(den > 0.0)) return std::nullopt;
  return 1.0 - num / den;
}

std::optional<double> MonteCarloResult::paired_mean(double eta, SharingMode mode) const {
  double sum = 0.0;
  int n = 0;
  for (int d = 0; d < config.drops; ++d) {
    bool all = true;
    for (SharingMode m : config.modes) {
      const DropRecord* r = find_record(*this, eta, m, d);
      all = all && r != nullptr && solved(*r);
    }
    if (!all) continue;
    sum += find_record(*this, eta, mode, d)->sum_energy;
    ++n;
  }
  if (n == 0) return std::nullopt;
  return sum / n;
}

std::string records_csv(const MonteCarloResult& result) {
  std::ostringstream os;
  os << "eta,mode,drop,seed,sum_energy_J,iterations,status,infeasible_flag\n";
  for (const DropRecord& r : result.records) {
    os << csv_number(r.eta) << ',' << to_string(r.mode) << ',' << r.drop << ',' << r.seed << ','
       << (r.infeasible ? std::string("nan") : csv_number(r.sum_energy)) << ',' << r.iterations
       << ',' << to_string(r.status) << ',' << (r.infeasible ? 1 : 0) << '\n';
  }
  return os.str();
}

std::string aggregate_csv(const MonteCarloResult& result) {
  std::ostringstream os;
  os << "eta,mode,mean_J,median_J,stderr_J,n_feasible\n";
  for (const AggregateRow& a : result.aggregates) {
    auto cell = [&](double x) { return a.flagged ? std::string("nan") : csv_number(x); };
    os << csv_number(a.eta) << ',' << to_string(a.mode) << ',' << cell(a.mean) << ','
       << cell(a.median) << ',' << cell(a.stderr_) << ',' << a.n_feasible << '\n';
  }
  return os.str();
}

}  // namespace mecsca
