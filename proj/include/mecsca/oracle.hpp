// Copyright 2026 The mecsca Authors
// SPDX-License-Identifier: Apache-2.0

// Brute-force grid search over the allocation for one or two users. Used as
// an independent reference for SCA solution quality.

#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "mecsca/model.hpp"

namespace mecsca {

struct GridSpec {
  // Powers: P_max * 10^(-4 (1 - i/n)), i = 1..n.
  int power_points = 24;
  // CPU fractions: i/n, i = 1..n.
  int fraction_points = 24;
  // Share of the shared input sent by user 0 (two users): i/n, i = 0..n.
  int split_points = 24;
  std::uint64_t max_evaluations = 100'000'000;
  int jobs = 1;
  // Number of best feasible points retained for inspection.
  std::size_t keep_best = 1;

  // 24 points per dimension for one user, 7 for two (keeps under the cap).
  static GridSpec for_users(std::size_t num_users);
  void validate() const;
};

std::vector<double> power_grid(double p_max, int n);
std::vector<double> fraction_grid(int n);
std::vector<double> split_grid(int n);

enum class OracleStatus { found, no_feasible_point };

std::string to_string(OracleStatus status);

struct GridPoint {
  Allocation allocation;
  double objective = 0.0;
};

struct OracleResult {
  OracleStatus status = OracleStatus::no_feasible_point;
  Allocation best;
  double objective = 0.0;     // +inf when nothing is feasible
  std::uint64_t evaluated = 0;
  std::uint64_t verified = 0;  // candidates sent through check_feasibility
  std::vector<GridPoint> leaders;  // ascending objective, at most keep_best
};

// Number of points the search would enumerate. Coordinates that cannot
// influence the objective or any constraint are pinned to zero.
std::uint64_t grid_size(const Scenario& scenario, const TaskProfile& profile,
                        const GridSpec& spec);

// Throws std::invalid_argument for more than two users or a grid above the
// evaluation cap. Shared-phase times are set to their tight minima.
OracleResult grid_search(const Scenario& scenario, const TaskProfile& profile,
                         const GridSpec& spec);

// Columns: rank,objective_J followed by the allocation fields.
std::string leaders_csv(const OracleResult& result);

}  // namespace mecsca
