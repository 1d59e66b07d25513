// Copyright 2026 The mecsca Authors
// SPDX-License-Identifier: Apache-2.0

#include <gtest/gtest.h>

#include "mecsca/validate.hpp"

namespace mecsca {
namespace {

ValidationConfig quick() {
  ValidationConfig c;
  c.drops = 2;
  c.samples_per_drop = 2000;
  c.convexity_pairs = 200;
  c.gradient_points = 20;
  c.oracle_drops = 2;
  return c;
}

TEST(Validation, DefaultSuitesPass) {
  const std::vector<SuiteReport> reports = run_validation(ValidationConfig{});
  ASSERT_EQ(reports.size(), 3u);
  for (const SuiteReport& r : reports) {
    EXPECT_TRUE(r.passed) << to_string(r.suite) << ": " << r.detail;
    EXPECT_GT(r.checks, 0);
    EXPECT_EQ(r.failures, 0);
  }
  EXPECT_LE(reports[2].worst, 1.02);
}

TEST(Validation, GradientSuiteCatchesACorruptedSurrogate) {
  ValidationConfig c = quick();
  c.mutation = SurrogateMutation::flip_power_linear_term;
  const SuiteReport r = gradient_suite(c);
  EXPECT_FALSE(r.passed);
  EXPECT_GT(r.failures, 0);
  EXPECT_FALSE(r.detail.empty());
}

TEST(Validation, OnlyRequestedSuitesRun) {
  ValidationConfig c = quick();
  c.suites = {Suite::surrogate};
  const std::vector<SuiteReport> reports = run_validation(c);
  ASSERT_EQ(reports.size(), 1u);
  EXPECT_EQ(reports[0].suite, Suite::surrogate);
  EXPECT_TRUE(reports[0].passed) << reports[0].detail;
}

TEST(Validation, OtherSeedsPass) {
  for (std::uint64_t seed : {2u, 3u}) {
    ValidationConfig c = quick();
    c.seed = seed;
    for (const SuiteReport& r : run_validation(c))
      EXPECT_TRUE(r.passed) << "seed " << seed << " " << to_string(r.suite) << ": " << r.detail;
  }
}

TEST(Validation, ConfigChecks) {
  ValidationConfig c;
  c.suites.clear();
  EXPECT_THROW(c.validate(), std::invalid_argument);
  c = {};
  c.oracle_ratio = 0.9;
  EXPECT_THROW(c.validate(), std::invalid_argument);
  EXPECT_EQ(parse_suite("gradient"), Suite::gradient);
  EXPECT_FALSE(parse_suite("speed").has_value());
}

}  // namespace
}  // namespace mecsca
