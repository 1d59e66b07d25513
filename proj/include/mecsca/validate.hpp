// Copyright 2026 The mecsca Authors
// SPDX-License-Identifier: Apache-2.0

// Built-in property suites: surrogate bound conditions, gradient
// consistency, and a one-user cross-check of SCA against the grid oracle.

#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "mecsca/scenario.hpp"
#include "mecsca/surrogate.hpp"

namespace mecsca {

enum class Suite { surrogate, gradient, oracle };

std::string to_string(Suite suite);
std::optional<Suite> parse_suite(const std::string& name);
const std::vector<Suite>& all_suites();

struct ValidationConfig {
  std::vector<Suite> suites = all_suites();
  std::uint64_t seed = 1;
  DropParams params;               // eight-user drops for surrogate/gradient suites
  double eta = 0.3;
  int drops = 3;
  int samples_per_drop = 10000;    // surrogate bound samples
  int convexity_pairs = 1000;
  int gradient_points = 100;       // random points for constraint gradients
  int oracle_drops = 3;            // one-user drops
  double oracle_ratio = 1.02;
  SurrogateMutation mutation = SurrogateMutation::none;
  ScaConfig sca;

  void validate() const;
};

// Pinned tolerances.
inline constexpr double kBoundTolerance = 1e-12;       // s
inline constexpr double kGradientRelTolerance = 1e-4;
inline constexpr double kConvexityTolerance = 1e-9;    // J or s

struct SuiteReport {
  Suite suite = Suite::surrogate;
  bool passed = false;
  long checks = 0;
  long failures = 0;
  double worst = 0.0;  // suite-specific worst statistic
  std::string detail;
};

std::vector<SuiteReport> run_validation(const ValidationConfig& config);

// Individual suites, exposed for tests.
SuiteReport surrogate_suite(const ValidationConfig& config);
SuiteReport gradient_suite(const ValidationConfig& config);
SuiteReport oracle_suite(const ValidationConfig& config);

}  // namespace mecsca
