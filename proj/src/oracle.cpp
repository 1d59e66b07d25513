// Copyright 2026 The mecsca Authors
// SPDX-License-Identifier: Apache-2.0

#include "mecsca/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "mecsca/csv.hpp"

namespace mecsca {

GridSpec GridSpec::for_users(std::size_t num_users) {
  GridSpec spec;
  if (num_users >= 2) spec.power_points = spec.fraction_points = spec.split_points = 7;
  return spec;
}

void GridSpec::validate() const {
  if (power_points < 1 || fraction_points < 1 || split_points < 1)
    throw std::invalid_argument("grid counts must be >= 1");
  if (max_evaluations < 1) throw std::invalid_argument("max_evaluations must be >= 1");
  if (jobs < 1) throw std::invalid_argument("jobs must be >= 1");
}

std::vector<double> power_grid(double p_max, int n) {
  std::vector<double> g;
  for (int i = 1; i <= n; ++i) g.push_back(p_max * std::pow(10.0, -4.0 * (1.0 - double(i) / n)));
  return g;
}

std::vector<double> fraction_grid(int n) {
  std::vector<double> g;
  for (int i = 1; i <= n; ++i) g.push_back(double(i) / n);
  return g;
}

std::vector<double> split_grid(int n) {
  std::vector<double> g;
  for (int i = 0; i <= n; ++i) g.push_back(double(i) / n);
  return g;
}

std::string to_string(OracleStatus status) {
  return status == OracleStatus::found ? "found" : "no_feasible_point";
}

namespace {

enum class Kind { p_ul, split, cpu, cpu_shared, p_dl, p_m };

struct Dim {
  Kind kind;
  std::size_t user;
  std::vector<double> values;
};

std::vector<Dim> make_dims(const Scenario& s, const TaskProfile& p, const GridSpec& spec) {
  const std::size_t n = s.num_users();
  std::vector<Dim> dims;
  const std::vector<double> pin = {0.0};
  for (std::size_t k = 0; k < n; ++k) {
    const bool sends = p.separate_input(k) > 0.0 || p.shared_input > 0.0;
    dims.push_back({Kind::p_ul, k, sends ? power_grid(s.p_ul_max_w, spec.power_points) : pin});
  }
  if (n == 2 && p.shared_input > 0.0) dims.push_back({Kind::split, 0, split_grid(spec.split_points)});
  for (std::size_t k = 0; k < n; ++k)
    dims.push_back({Kind::cpu, k, p.separate_cycles(k) > 0.0 ? fraction_grid(spec.fraction_points) : pin});
  dims.push_back({Kind::cpu_shared, 0, p.shared_cycles > 0.0 ? fraction_grid(spec.fraction_points) : pin});
  for (std::size_t k = 0; k < n; ++k)
    dims.push_back({Kind::p_dl, k, p.separate_output(k) > 0.0 ? power_grid(s.p_dl_max_w, spec.power_points) : pin});
  dims.push_back({Kind::p_m, 0, p.shared_output > 0.0 ? power_grid(s.p_dl_max_w, spec.power_points) : pin});
  return dims;
}

std::uint64_t count_points(const std::vector<Dim>& dims, std::uint64_t cap) {
  std::uint64_t total = 1;
  for (const Dim& d : dims) {
    const std::uint64_t m = d.values.size();
    if (total > std::numeric_limits<std::uint64_t>::max() / m) return std::numeric_limits<std::uint64_t>::max();
    total *= m;
    if (total > cap) return total;
  }
  return total;
}

struct Candidate {
  double objective;
  std::uint64_t index;
  bool operator<(const Candidate& o) const {
    return objective < o.objective || (objective == o.objective && index < o.index);
  }
};

class Searcher {
 public:
  Searcher(const Scenario& s, const TaskProfile& p, const GridSpec& spec, std::vector<Dim> dims)
      : s_(s), p_(p), spec_(spec), dims_(std::move(dims)), n_(s.num_users()) {
    // Rate tables from the model's own evaluators.
    for (const Dim& d : dims_) {
      std::vector<double> r;
      for (double v : d.values) {
        switch (d.kind) {
          case Kind::p_ul: r.push_back(uplink_rate(s, d.user, v)); break;
          case Kind::p_dl: r.push_back(unicast_dl_rate(s, d.user, v)); break;
          case Kind::p_m: {
            // Rates for every user at this multicast power, stored flat.
            for (std::size_t k = 0; k < n_; ++k) r.push_back(multicast_rate(s, k, v));
            break;
          }
          default: r.push_back(v); break;
        }
      }
      tables_.push_back(std::move(r));
    }
  }

  void run(std::uint64_t begin, std::uint64_t end, std::vector<Candidate>& leaders,
           std::uint64_t& verified) const {
    std::vector<std::size_t> digit(dims_.size(), 0);
    std::uint64_t rem = begin;
    for (std::size_t d = dims_.size(); d-- > 0;) {
      digit[d] = rem % dims_[d].values.size();
      rem /= dims_[d].values.size();
    }
    Allocation a = Allocation::zeros(n_);
    const double tol = kDefaultFeasibilityTolerance;
    for (std::uint64_t idx = begin; idx < end; ++idx) {
      const double obj = screen(digit);
      if (std::isfinite(obj)) {
        const bool room = leaders.size() < spec_.keep_best;
        if (room || obj < leaders.front().objective) {
          fill(digit, a);
          ++verified;
          if (check_feasibility(s_, p_, a, tol).feasible) {
            leaders.push_back({obj, idx});
            std::push_heap(leaders.begin(), leaders.end());
            if (leaders.size() > spec_.keep_best) {
              std::pop_heap(leaders.begin(), leaders.end());
              leaders.pop_back();
            }
          }
        }
      }
      for (std::size_t d = dims_.size(); d-- > 0;) {
        if (++digit[d] < dims_[d].values.size()) break;
        digit[d] = 0;
      }
    }
  }

  Allocation decode(std::uint64_t index) const {
    std::vector<std::size_t> digit(dims_.size(), 0);
    for (std::size_t d = dims_.size(); d-- > 0;) {
      digit[d] = index % dims_[d].values.size();
      index /= dims_[d].values.size();
    }
    Allocation a = Allocation::zeros(n_);
    fill(digit, a);
    return a;
  }

 private:
  double shared_bits(std::size_t k, double split) const {
    if (n_ == 1) return p_.shared_input;
    return (k == 0 ? split : 1.0 - split) * p_.shared_input;
  }

  // Objective when the point passes a loosened constraint screen, +inf
  // otherwise. check_feasibility has the final word.
  double screen(const std::vector<std::size_t>& digit) const {
    const double loose = 2.0 * kDefaultFeasibilityTolerance;
    double r_ul[2] = {0, 0}, p_ul[2] = {0, 0}, r_dl[2] = {0, 0}, f[2] = {0, 0};
    double split = 1.0, fs = 0.0;
    const double* r_m = nullptr;
    double cpu_sum = 0.0;
    for (std::size_t d = 0; d < dims_.size(); ++d) {
      const std::size_t i = digit[d];
      const Dim& dim = dims_[d];
      switch (dim.kind) {
        case Kind::p_ul:
          p_ul[dim.user] = dim.values[i];
          r_ul[dim.user] = tables_[d][i];
          break;
        case Kind::split: split = dim.values[i]; break;
        case Kind::cpu:
          f[dim.user] = dim.values[i];
          cpu_sum += dim.values[i];
          break;
        case Kind::cpu_shared: fs = dim.values[i]; break;
        case Kind::p_dl: r_dl[dim.user] = tables_[d][i]; break;
        case Kind::p_m: r_m = &tables_[d][i * n_]; break;
      }
    }
    if (cpu_sum > 1.0 + loose) return kInf;
    double t_ul = 0.0, t_dl = 0.0;
    for (std::size_t k = 0; k < n_; ++k) {
      t_ul = std::max(t_ul, transfer_time(shared_bits(k, split), r_ul[k]));
      t_dl = std::max(t_dl, transfer_time(p_.shared_output, r_m[k]));
    }
    const double fc = s_.cloudlet_capacity_cps, tmax = s_.latency_budget_s;
    double obj = 0.0;
    for (std::size_t k = 0; k < n_; ++k) {
      const double busy = transfer_time(p_.separate_input(k), r_ul[k]) +
                          transfer_time(p_.separate_cycles(k), f[k] * fc) +
                          transfer_time(p_.shared_cycles, fs * fc) +
                          transfer_time(p_.separate_output(k), r_dl[k]) + t_ul + t_dl;
      if (!((busy - tmax) / tmax <= loose)) return kInf;
      const double bits = p_.separate_input(k) + shared_bits(k, split);
      if (bits > 0.0) obj += (p_ul[k] / r_ul[k] + s_.energy_per_bit_ul[k]) * bits;
      obj += s_.rx_power_dl[k] * (transfer_time(p_.separate_output(k), r_dl[k]) +
                                  transfer_time(p_.shared_output, r_m[k]));
    }
    return std::isfinite(obj) ? obj : kInf;
  }

  void fill(const std::vector<std::size_t>& digit, Allocation& a) const {
    double split = 1.0;
    for (std::size_t d = 0; d < dims_.size(); ++d) {
      const Dim& dim = dims_[d];
      const double v = dim.values[digit[d]];
      switch (dim.kind) {
        case Kind::p_ul: a.p_ul[dim.user] = v; break;
        case Kind::split: split = v; break;
        case Kind::cpu: a.cpu_frac[dim.user] = v; break;
        case Kind::cpu_shared: a.cpu_frac_shared = v; break;
        case Kind::p_dl: a.p_dl[dim.user] = v; break;
        case Kind::p_m: a.p_multicast = v; break;
      }
    }
    a.t_shared_ul = a.t_shared_dl = 0.0;
    for (std::size_t k = 0; k < n_; ++k) {
      a.shared_bits[k] = shared_bits(k, split);
      a.t_shared_ul = std::max(a.t_shared_ul,
                               transfer_time(a.shared_bits[k], uplink_rate(s_, k, a.p_ul[k])));
      a.t_shared_dl = std::max(a.t_shared_dl, transfer_time(p_.shared_output,
                                                            multicast_rate(s_, k, a.p_multicast)));
    }
  }

  static constexpr double kInf = std::numeric_limits<double>::infinity();

  const Scenario& s_;
  const TaskProfile& p_;
  const GridSpec& spec_;
  std::vector<Dim> dims_;
  std::vector<std::vector<double>> tables_;
  std::size_t n_;
};

}  // namespace

std::uint64_t grid_size(const Scenario& scenario, const TaskProfile& profile, const GridSpec& spec) {
  spec.validate();
  return count_points(make_dims(scenario, profile, spec), std::numeric_limits<std::uint64_t>::max());
}

OracleResult grid_search(const Scenario& scenario, const TaskProfile& profile,
                         const GridSpec& spec) {
  spec.validate();
  scenario.validate();
  profile.validate_against(scenario);
  if (scenario.num_users() > 2) throw std::invalid_argument("grid search supports at most two users");
  std::vector<Dim> dims = make_dims(scenario, profile, spec);
  const std::uint64_t total = count_points(dims, spec.max_evaluations);
  if (total > spec.max_evaluations)
    throw std::invalid_argument("grid exceeds the evaluation cap");

  GridSpec local = spec;
  local.keep_best = std::max<std::size_t>(spec.keep_best, 1);
  const Searcher searcher(scenario, profile, local, std::move(dims));

  const int workers = static_cast<int>(std::min<std::uint64_t>(spec.jobs, total));
  std::vector<std::vector<Candidate>> leaders(workers);
  std::vector<std::uint64_t> verified(workers, 0);
  std::vector<std::thread> pool;
  for (int w = 0; w < workers; ++w) {
    const std::uint64_t b = total * w / workers, e = total * (w + 1) / workers;
    auto job = [&, w, b, e] { searcher.run(b, e, leaders[w], verified[w]); };
    if (w + 1 == workers) job();
    else pool.emplace_back(job);
  }
  for (std::thread& t : pool) t.join();

  std::vector<Candidate> merged;
  OracleResult result;
  result.evaluated = total;
  for (int w = 0; w < workers; ++w) {
    merged.insert(merged.end(), leaders[w].begin(), leaders[w].end());
    result.verified += verified[w];
  }
  std::sort(merged.begin(), merged.end());
  if (merged.size() > local.keep_best) merged.resize(local.keep_best);
  for (const Candidate& c : merged) {
    GridPoint gp;
    gp.allocation = searcher.decode(c.index);
    gp.objective = total_energy(scenario, profile, gp.allocation);
    result.leaders.push_back(std::move(gp));
  }
  if (result.leaders.empty()) {
    result.status = OracleStatus::no_feasible_point;
    result.best = Allocation::zeros(scenario.num_users());
    result.objective = std::numeric_limits<double>::infinity();
  } else {
    result.status = OracleStatus::found;
    result.best = result.leaders.front().allocation;
    result.objective = result.leaders.front().objective;
  }
  return result;
}

std::string leaders_csv(const OracleResult& result) {
  std::ostringstream os;
  os << "rank,objective_J";
  const std::size_t n = result.best.num_users();
  for (std::size_t k = 0; k < n; ++k) os << ",p_ul_w_" << k;
  for (std::size_t k = 0; k < n; ++k) os << ",shared_bits_" << k;
  for (std::size_t k = 0; k < n; ++k) os << ",cpu_frac_" << k;
  for (std::size_t k = 0; k < n; ++k) os << ",p_dl_w_" << k;
  os << ",cpu_frac_shared,p_multicast_w,t_shared_ul_s,t_shared_dl_s\n";
  for (std::size_t r = 0; r < result.leaders.size(); ++r) {
    os << r + 1 << ',' << csv_number(result.leaders[r].objective);
    for (double v : result.leaders[r].allocation.to_vector()) os << ',' << csv_number(v);
    os << '\n';
  }
  return os.str();
}

}  // namespace mecsca
