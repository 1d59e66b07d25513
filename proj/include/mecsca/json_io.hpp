// Copyright 2026 The mecsca Authors
// SPDX-License-Identifier: Apache-2.0

// JSON interchange for scenarios, task profiles and allocations.
//
// A problem document looks like
//
//   {
//     "units": { "uplink_bandwidth_hz": "Hz", ... },
//     "scenario": { "num_users": 2, "uplink_bandwidth_hz": 1e7, ... },
//     "profile":  { "input_bits": [...], "shared_input": 3e5, ... }
//   }
//
// The "units" block is informational on input (ignored if absent) and is
// always written on output. All values are SI linear units.

#pragma once

#include <string>
#include <string_view>

#include "mecsca/model.hpp"

namespace mecsca {

struct Problem {
  Scenario scenario;
  TaskProfile profile;
};

std::string problem_to_json(const Problem& problem, int indent = 2);

// Throws std::invalid_argument on malformed input or violated invariants.
Problem problem_from_json(std::string_view text);

std::string allocation_to_json(const Allocation& allocation, int indent = 2);
Allocation allocation_from_json(std::string_view text);

}  // namespace mecsca
