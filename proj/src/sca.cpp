// Copyright 2026 The mecsca Authors
// SPDX-License-Identifier: Apache-2.0

#include "mecsca/sca.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include "mecsca/csv.hpp"

namespace mecsca {

void ScaConfig::validate() const {
  if (!(alpha > 0.0)) throw std::invalid_argument("alpha must be > 0");
  if (!(delta0 > 0.0 && delta0 <= 1.0)) throw std::invalid_argument("delta0 must lie in (0, 1]");
  if (!(epsilon > 0.0)) throw std::invalid_argument("epsilon must be > 0");
  if (max_iterations < 1) throw std::invalid_argument("max_iterations must be >= 1");
  if (stall_window < 1) throw std::invalid_argument("stall_window must be >= 1");
  weights.validate();
  inner.validate();
}

std::string to_string(ScaStatus status) {
  switch (status) {
    case ScaStatus::stationary: return "stationary";
    case ScaStatus::max_iters: return "max_iters";
    case ScaStatus::stalled: return "stalled";
    case ScaStatus::infeasible_scenario: return "infeasible_scenario";
    case ScaStatus::inner_failure: return "inner_failure";
  }
  return "unknown";
}

double next_step_size(double delta, double alpha) { return delta * (1.0 - alpha * delta); }

std::optional<Allocation> find_initial_point(const Scenario& scenario, const TaskProfile& profile) {
  scenario.validate();
  profile.validate_against(scenario);
  const std::size_t n = scenario.num_users();
  const double nk = static_cast<double>(n);
  Allocation a = Allocation::zeros(n);
  a.p_multicast = scenario.p_dl_max_w;
  a.cpu_frac_shared = 1.0;

  std::vector<double> r_ul(n);
  double rate_sum = 0.0, dv_sum = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    a.p_ul[k] = scenario.p_ul_max_w;
    a.p_dl[k] = scenario.p_dl_max_w / nk;
    r_ul[k] = uplink_rate(scenario, k, a.p_ul[k]);
    rate_sum += r_ul[k];
    dv_sum += profile.separate_cycles(k);
  }
  for (std::size_t k = 0; k < n; ++k) {
    a.cpu_frac[k] = dv_sum > 0.0 ? profile.separate_cycles(k) / dv_sum : 1.0 / nk;
    a.shared_bits[k] = profile.shared_input * r_ul[k] / rate_sum;
  }
  for (std::size_t k = 0; k < n; ++k) {
    a.t_shared_ul = std::max(a.t_shared_ul, transfer_time(a.shared_bits[k], r_ul[k]));
    a.t_shared_dl = std::max(
        a.t_shared_dl, transfer_time(profile.shared_output, multicast_rate(scenario, k, a.p_multicast)));
  }
  if (check_feasibility(scenario, profile, a).feasible) return a;

  // The cycle-proportional CPU split can fail on asymmetric channels even
  // though another split fits: give every user the smallest share that meets
  // its deadline and spread the remainder proportionally.
  const double fc = scenario.cloudlet_capacity_cps;
  const double tmax = scenario.latency_budget_s;
  const double shared_compute = transfer_time(profile.shared_cycles, fc);
  std::vector<double> need(n, 0.0);
  double need_sum = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    const double busy = transfer_time(profile.separate_input(k), r_ul[k]) + shared_compute +
                        transfer_time(profile.separate_output(k),
                                      unicast_dl_rate(scenario, k, a.p_dl[k])) +
                        a.t_shared_ul + a.t_shared_dl;
    const double slack = tmax - busy;
    if (profile.separate_cycles(k) > 0.0) {
      if (!(slack > 0.0)) return std::nullopt;
      need[k] = profile.separate_cycles(k) / (fc * slack);
    } else if (slack < 0.0) {
      return std::nullopt;
    }
    need_sum += need[k];
  }
  if (!(need_sum <= 1.0)) return std::nullopt;
  for (std::size_t k = 0; k < n; ++k) {
    const double share = dv_sum > 0.0 ? profile.separate_cycles(k) / dv_sum : 1.0 / nk;
    a.cpu_frac[k] = need[k] + (1.0 - need_sum) * share;
  }
  if (check_feasibility(scenario, profile, a).feasible) return a;
  return std::nullopt;
}

double stationarity_residual(const Scenario& scenario, const TaskProfile& profile,
                             const Allocation& z_v, const Allocation& z_hat) {
  return normalized_distance_sq(scenario, profile, z_v, z_hat);
}

SolveResult sca_solve(const Scenario& scenario, const TaskProfile& profile,
                      const ScaConfig& config) {
  config.validate();
  SolveResult result;
  const std::optional<Allocation> start = find_initial_point(scenario, profile);
  if (!start) {
    result.status = ScaStatus::infeasible_scenario;
    result.message = "latency budget cannot be met at maximum transmit power";
    result.allocation = Allocation::zeros(scenario.num_users());
    return result;
  }

  Allocation z = *start;
  const std::size_t dim = z.dimension();
  result.initial_objective = total_energy(scenario, profile, z);
  double delta = config.delta0;
  result.status = ScaStatus::max_iters;

  for (int v = 0; v < config.max_iterations; ++v) {
    const SurrogatePoint point = make_surrogate_point(scenario, profile, z, config.weights);
    const ConvexSubproblem sub(scenario, profile, point);
    const InnerSolution inner = solve_subproblem(sub, config.inner);
    if (inner.status == InnerStatus::infeasible) {
      result.status = ScaStatus::inner_failure;
      result.message = "subproblem at iteration " + std::to_string(v) + " has no interior point";
      break;
    }

    const double residual = stationarity_residual(scenario, profile, z, inner.minimizer);
    const std::vector<double> cur = z.to_vector(), hat = inner.minimizer.to_vector();
    std::vector<double> next(dim);
    for (std::size_t j = 0; j < dim; ++j) next[j] = cur[j] + delta * (hat[j] - cur[j]);
    z = Allocation::from_vector(scenario.num_users(), next);

    IterationRecord rec;
    rec.iter = v;
    rec.objective = total_energy(scenario, profile, z);
    rec.residual = residual;
    rec.delta = delta;
    rec.inner_iters = inner.iterations;
    rec.worst_violation = check_feasibility(scenario, profile, z).worst_violation;
    result.history.push_back(rec);
    result.iterations = v + 1;

    if (residual <= config.epsilon) {
      result.status = ScaStatus::stationary;
      break;
    }
    const std::size_t h = result.history.size();
    if (h > static_cast<std::size_t>(config.stall_window)) {
      const double before = result.history[h - 1 - static_cast<std::size_t>(config.stall_window)].objective;
      const double change = std::abs(rec.objective - before) / std::max(std::abs(before), 1e-300);
      if (change < config.stall_tolerance) {
        result.status = ScaStatus::stalled;
        break;
      }
    }
    delta = next_step_size(delta, config.alpha);
  }

  result.allocation = z;
  result.objective = total_energy(scenario, profile, z);
  result.feasibility = check_feasibility(scenario, profile, z);
  return result;
}

std::string trace_csv(const SolveResult& result) {
  std::ostringstream os;
  os << "iter,objective_J,residual,delta,inner_iters,worst_violation\n";
  for (const IterationRecord& r : result.history) {
    os << r.iter << ',' << csv_number(r.objective) << ',' << csv_number(r.residual) << ','
       << csv_number(r.delta) << ',' << r.inner_iters << ',' << csv_number(r.worst_violation)
       << '\n';
  }
  return os.str();
}

}  // namespace mecsca
