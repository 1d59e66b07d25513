// Copyright 2026 The mecsca Authors
// SPDX-License-Identifier: Apache-2.0

#include "fixtures.hpp"

#include "mecsca/sca.hpp"

namespace mecsca::testing {

std::vector<Drop> feasible_drops(int count, std::size_t users, double eta, std::uint64_t start) {
  std::vector<Drop> out;
  for (std::uint64_t seed = start; static_cast<int>(out.size()) < count; ++seed) {
    Drop d = seeded_drop(seed, users, eta);
    if (find_initial_point(d.scenario, d.profile)) out.push_back(std::move(d));
  }
  return out;
}

}  // namespace mecsca::testing
