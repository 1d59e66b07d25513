// Copyright 2026 The mecsca Authors
// SPDX-License-Identifier: Apache-2.0

// Successive convex approximation driver: solve the surrogate subproblem at
// the current iterate, move toward its minimizer with a diminishing step, and
// stop once the normalized fixed-point displacement is below epsilon.

#pragma once

#include <optional>
#include <string>
#include <vector>

#include "mecsca/inner_solver.hpp"
#include "mecsca/model.hpp"
#include "mecsca/surrogate.hpp"

namespace mecsca {

struct ScaConfig {
  double alpha = 1e-5;   // step decay: delta(v) = delta(v-1) (1 - alpha delta(v-1))
  double delta0 = 1.0;
  double epsilon = 1e-5;
  int max_iterations = 200;
  // Stagnation guard: stop when the objective moved less than this (relative)
  // over the last stall_window iterations.
  double stall_tolerance = 1e-10;
  int stall_window = 5;
  ProximalWeights weights;
  SolverSettings inner;

  void validate() const;
};

enum class ScaStatus { stationary, max_iters, stalled, infeasible_scenario, inner_failure };

std::string to_string(ScaStatus status);

struct IterationRecord {
  int iter = 0;
  double objective = 0.0;        // J, at the updated iterate
  double residual = 0.0;         // stationarity residual of the expansion point
  double delta = 0.0;            // step size used
  int inner_iters = 0;
  double worst_violation = 0.0;  // of the updated iterate
};

struct SolveResult {
  Allocation allocation;
  std::vector<IterationRecord> history;
  int iterations = 0;
  ScaStatus status = ScaStatus::infeasible_scenario;
  FeasibilityReport feasibility;
  double initial_objective = 0.0;
  double objective = 0.0;
  std::string message;

  double final_residual() const { return history.empty() ? 0.0 : history.back().residual; }
};

// Max-power start with rate-proportional shared-bit split and tight shared
// phases; nullopt when the latency budget cannot be met from it.
std::optional<Allocation> find_initial_point(const Scenario& scenario, const TaskProfile& profile);

// ||z_hat - z_v||^2 in normalized variable units.
double stationarity_residual(const Scenario& scenario, const TaskProfile& profile,
                             const Allocation& z_v, const Allocation& z_hat);

// Diminishing step rule, exposed for testing.
double next_step_size(double delta, double alpha);

SolveResult sca_solve(const Scenario& scenario, const TaskProfile& profile,
                      const ScaConfig& config = {});

// Columns: iter,objective_J,residual,delta,inner_iters,worst_violation
std::string trace_csv(const SolveResult& result);

}  // namespace mecsca
