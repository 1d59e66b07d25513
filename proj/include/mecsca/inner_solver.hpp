// Copyright 2026 The mecsca Authors
// SPDX-License-Identifier: Apache-2.0

// Feasible-start log-barrier / damped-Newton solver for small dense smooth
// convex programs, plus the wrapper that solves an SCA subproblem.

#pragma once

#include <ostream>
#include <string>

#include "mecsca/convex_program.hpp"
#include "mecsca/model.hpp"

namespace mecsca {

class ConvexSubproblem;

struct SolverSettings {
  double kkt_tolerance = 1e-8;
  int max_newton_iters = 600;
  double initial_barrier_weight = 1.0;  // t0
  double barrier_reduction = 0.05;      // 1/t shrinks by this factor per outer step
  double backtracking_ratio = 0.5;
  double sufficient_decrease = 0.01;
  // One line per Newton step when set.
  std::ostream* trace = nullptr;

  void validate() const;
};

enum class InnerStatus { converged, max_iters, infeasible };

std::string to_string(InnerStatus status);

struct ConvexSolution {
  Vec minimizer;
  double objective = 0.0;
  double kkt_residual = 0.0;
  int iterations = 0;
  InnerStatus status = InnerStatus::infeasible;
};

// `start` only needs to satisfy the fixed coordinates and the equality; a
// phase-I search recovers strict feasibility when the start is on or outside
// the boundary.
ConvexSolution solve_convex(const ConvexProgram& program, const Vec& start,
                            const SolverSettings& settings = {});

struct InnerSolution {
  Allocation minimizer;
  double objective = 0.0;  // subproblem objective, J
  double kkt_residual = 0.0;
  int iterations = 0;
  InnerStatus status = InnerStatus::infeasible;
};

// Starts from the subproblem's expansion point.
InnerSolution solve_subproblem(const ConvexSubproblem& subproblem,
                               const SolverSettings& settings = {});

}  // namespace mecsca
