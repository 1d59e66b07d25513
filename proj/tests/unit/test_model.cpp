// Copyright 2026 The mecsca Authors
// SPDX-License-Identifier: Apache-2.0

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>
#include <stdexcept>

#include <gtest/gtest.h>

#include "fixtures.hpp"
#include "mecsca/model.hpp"

namespace mecsca {
namespace {

using testing::make_scenario;
using testing::uniform01;
using testing::zero_profile;

// Independent evaluation of the Shannon rate in extended precision.
long double reference_rate(long double bandwidth, long double gain, long double n0,
                           long double p) {
  return bandwidth * std::log1p(gain * p / (n0 * bandwidth)) / std::log(2.0L);
}

TEST(Rates, ZeroPowerGivesZeroRate) {
  const Scenario s = make_scenario({1e-12, 2e-12});
  EXPECT_EQ(uplink_rate(s, 0, 0.0), 0.0);
  EXPECT_EQ(multicast_rate(s, 1, 0.0), 0.0);
  EXPECT_EQ(unicast_dl_rate(s, 1, 0.0), 0.0);
}

TEST(Rates, SnrOfThreeDoublesTheBandwidth) {
  Scenario s = make_scenario({1e-12, 1e-12});
  const double wk = s.uplink_bandwidth_hz / 2.0;
  // Choose the power that makes the SNR argument exactly 3.
  const double p = 3.0 * s.noise_psd_w_per_hz * wk / s.channel_gain[0];
  EXPECT_NEAR(uplink_rate(s, 0, p), 2.0 * wk, 1e-9 * wk);
  EXPECT_NEAR(unicast_dl_rate(s, 0, p), 2.0 * wk, 1e-9 * wk);
}

TEST(Rates, MulticastSnrOfOneGivesTheBandwidth) {
  const Scenario s = make_scenario({5e-13});
  const double p = s.noise_psd_w_per_hz * s.downlink_bandwidth_hz / s.channel_gain[0];
  EXPECT_NEAR(multicast_rate(s, 0, p), s.downlink_bandwidth_hz, 1e-9 * s.downlink_bandwidth_hz);
}

TEST(Rates, UplinkMatchesExtendedPrecisionReference) {
  // W = 10 MHz, K = 8, N0 = 10^-14.7 mW/Hz, gain 1e-12, P = 0.1 W.
  const Scenario s = make_scenario(std::vector<double>(8, 1e-12));
  const long double ref = reference_rate(10e6L / 8, 1e-12L, std::pow(10.0L, -17.7L), 0.1L);
  const double got = uplink_rate(s, 3, 0.1);
  EXPECT_NEAR(got, static_cast<double>(ref), 1e-12 * static_cast<double>(ref));
  EXPECT_GT(got, 7.0e4);
  EXPECT_LT(got, 7.2e4);
}

TEST(Rates, NegativePowerIsADomainError) {
  const Scenario s = make_scenario({1e-12});
  EXPECT_THROW(uplink_rate(s, 0, -1e-9), std::domain_error);
  EXPECT_THROW(multicast_rate(s, 0, -1.0), std::domain_error);
  EXPECT_THROW(unicast_dl_rate(s, 0, -1.0), std::domain_error);
}

TEST(Rates, StrongerUserHasTheHigherMulticastRate) {
  const Scenario s = make_scenario({3e-12, 1e-12});
  EXPECT_GT(multicast_rate(s, 0, 10.0), multicast_rate(s, 1, 10.0));
}

TEST(Rates, UnicastEqualsMulticastForOneUser) {
  const Scenario s = make_scenario({2e-13});
  for (double p : {1e-3, 0.5, 10.0, 1000.0})
    EXPECT_DOUBLE_EQ(unicast_dl_rate(s, 0, p), multicast_rate(s, 0, p));
}

TEST(RateProperties, MonotoneAndConcaveOnSampledTriples) {
  const Scenario s = make_scenario({1e-13, 1e-11, 1e-9});
  std::mt19937_64 rng(11);
  using RateFn = double (*)(const Scenario&, std::size_t, double);
  for (RateFn rate : {RateFn{&uplink_rate}, RateFn{&multicast_rate}, RateFn{&unicast_dl_rate}}) {
    for (int i = 0; i < 2000; ++i) {
      const std::size_t k = i % 3;
      double p1 = 1000.0 * std::pow(10.0, -6.0 * uniform01(rng));
      double p2 = 1000.0 * std::pow(10.0, -6.0 * uniform01(rng));
      if (p1 > p2) std::swap(p1, p2);
      if (p1 == p2) continue;
      const double lam = uniform01(rng);
      EXPECT_GT(rate(s, k, p2), rate(s, k, p1));
      const double mid = rate(s, k, lam * p1 + (1 - lam) * p2);
      const double chord = lam * rate(s, k, p1) + (1 - lam) * rate(s, k, p2);
      EXPECT_GE(mid, chord * (1.0 - 1e-9));
    }
  }
}

TEST(RateProperties, ReciprocalRateIsMidpointConvex) {
  const Scenario s = make_scenario({1e-12, 1e-10});
  std::mt19937_64 rng(12);
  for (int i = 0; i < 2000; ++i) {
    const std::size_t k = i % 2;
    const double a = 100.0 * std::pow(10.0, -6.0 * uniform01(rng));
    const double b = 100.0 * std::pow(10.0, -6.0 * uniform01(rng));
    const double mid = 1.0 / uplink_rate(s, k, 0.5 * (a + b));
    const double avg = 0.5 * (1.0 / uplink_rate(s, k, a) + 1.0 / uplink_rate(s, k, b));
    EXPECT_LE(mid, avg * (1.0 + 1e-12));
  }
}

TEST(UplinkEnergy, ZeroBitsCostNothing) {
  const Scenario s = make_scenario({1e-12});
  TaskProfile p = zero_profile(1);
  EXPECT_EQ(uplink_energy(s, p, 0, 0.0, 0.0), 0.0);
  EXPECT_EQ(uplink_energy(s, p, 0, 5.0, 0.0), 0.0);
}

TEST(UplinkEnergy, PositiveBitsAtZeroPowerCannotComplete) {
  const Scenario s = make_scenario({1e-12});
  TaskProfile p = zero_profile(1);
  p.input_bits[0] = 100.0;
  EXPECT_EQ(uplink_energy(s, p, 0, 0.0, 0.0), std::numeric_limits<double>::infinity());
}

// Power at which P / R(P) equals `target`, by bisection (P/R is increasing).
double power_for_energy_per_bit(const Scenario& s, double target) {
  double lo = 1e-12, hi = s.p_ul_max_w;
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    (mid / uplink_rate(s, 0, mid) < target ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

TEST(UplinkEnergy, TransmitEnergyEqualToAcquisitionEnergyDoublesIt) {
  Scenario s = make_scenario({5e-12});
  const double l = s.energy_per_bit_ul[0];
  const double p = power_for_energy_per_bit(s, l);
  ASSERT_LT(p, 0.99 * s.p_ul_max_w);
  TaskProfile prof = zero_profile(1);
  prof.input_bits[0] = 4e5;
  EXPECT_NEAR(uplink_energy(s, prof, 0, p, 0.0), 2.0 * l * 4e5, 1e-9 * l * 4e5);
}

TEST(UplinkEnergy, ReferencePointOfOneMegabit) {
  // l = 1.78e-6 J/bit, 1e6 bits, P/R = 1e-6 J/bit  ->  2.78 J.
  Scenario s = make_scenario({1e-10});
  const double p = power_for_energy_per_bit(s, 1e-6);
  ASSERT_LT(p, 0.99 * s.p_ul_max_w);
  TaskProfile prof = zero_profile(1);
  prof.input_bits[0] = 1e6;
  EXPECT_NEAR(uplink_energy(s, prof, 0, p, 0.0), 2.78, 1e-9);
}

TEST(UplinkEnergy, StrictlyIncreasingInSharedBits) {
  const Scenario s = make_scenario({1e-12, 1e-12});
  TaskProfile prof = derive_shared_split({1e4, 1e4}, {1e4, 1e4}, {1e7, 1e7}, 0.5);
  double prev = uplink_energy(s, prof, 0, 1.0, 0.0);
  for (double b = 500.0; b <= prof.shared_input; b += 500.0) {
    const double e = uplink_energy(s, prof, 0, 1.0, b);
    EXPECT_GT(e, prev);
    prev = e;
  }
}

TEST(DownlinkEnergy, ZeroOutputCostsNothing) {
  const Scenario s = make_scenario({1e-12});
  EXPECT_EQ(downlink_energy(s, zero_profile(1), 0, 0.0, 0.0), 0.0);
}

TEST(DownlinkEnergy, MulticastOnlyReferencePoint) {
  // B_O_S / R_M = 0.01 s with l_dl = 0.625 J/s -> 6.25e-3 J.
  const Scenario s = make_scenario({1e-12});
  const double pm = 50.0;
  TaskProfile prof = zero_profile(1);
  prof.output_bits[0] = prof.shared_output = 0.01 * multicast_rate(s, 0, pm);
  EXPECT_NEAR(downlink_energy(s, prof, 0, 0.0, pm), 6.25e-3, 1e-15);
}

TEST(DownlinkEnergy, DoublingBothRatesHalvesTheEnergy) {
  Scenario s = make_scenario({1e-12, 3e-12});
  Scenario fast = s;
  fast.downlink_bandwidth_hz *= 2.0;  // same SNR argument, twice the rate
  fast.noise_psd_w_per_hz /= 2.0;
  TaskProfile prof = derive_shared_split({1e4, 1e4}, {2e4, 3e4}, {1e7, 1e7}, 0.4);
  for (std::size_t k = 0; k < 2; ++k) {
    const double slow_e = downlink_energy(s, prof, k, 20.0, 70.0);
    EXPECT_NEAR(downlink_energy(fast, prof, k, 20.0, 70.0), 0.5 * slow_e, 1e-12 * slow_e);
  }
}

Allocation some_allocation(std::size_t k) {
  Allocation a = Allocation::zeros(k);
  for (std::size_t i = 0; i < k; ++i) {
    a.p_ul[i] = 10.0 + i;
    a.p_dl[i] = 100.0 / static_cast<double>(k);
    a.cpu_frac[i] = 0.5 / static_cast<double>(k);
  }
  a.cpu_frac_shared = 1.0;
  a.p_multicast = 500.0;
  return a;
}

TEST(TotalEnergy, SingleUserIsUplinkPlusDownlink) {
  const Scenario s = make_scenario({2e-12});
  const TaskProfile prof = derive_shared_split({5e3}, {5e3}, {1e7}, 0.3);
  Allocation a = some_allocation(1);
  a.shared_bits[0] = prof.shared_input;
  EXPECT_EQ(total_energy(s, prof, a),
            uplink_energy(s, prof, 0, a.p_ul[0], a.shared_bits[0]) +
                downlink_energy(s, prof, 0, a.p_dl[0], a.p_multicast));
}

TEST(TotalEnergy, ZeroWorkloadCostsNothing) {
  const Scenario s = make_scenario({1e-12, 1e-11, 1e-13});
  EXPECT_EQ(total_energy(s, zero_profile(3), some_allocation(3)), 0.0);
}

TEST(TotalEnergy, SymmetricPairIsTwiceOneUser) {
  const Scenario s = make_scenario({1e-12, 1e-12});
  const TaskProfile prof = derive_shared_split({4e3, 4e3}, {4e3, 4e3}, {1e7, 1e7}, 0.2);
  Allocation a = some_allocation(2);
  a.p_ul[1] = a.p_ul[0];
  a.shared_bits = {prof.shared_input / 2, prof.shared_input / 2};
  const double one = uplink_energy(s, prof, 0, a.p_ul[0], a.shared_bits[0]) +
                     downlink_energy(s, prof, 0, a.p_dl[0], a.p_multicast);
  EXPECT_DOUBLE_EQ(total_energy(s, prof, a), 2.0 * one);
}

TEST(TotalEnergy, EqualsTheSumOfPerUserTermsExactly) {
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 50; ++trial) {
    const testing::Drop d = testing::seeded_drop(100 + trial, 4, 0.4);
    Allocation a = some_allocation(4);
    double rest = d.profile.shared_input;
    for (std::size_t k = 0; k < 4; ++k) {
      a.p_ul[k] = 100.0 * uniform01(rng) + 1e-3;
      a.shared_bits[k] = k < 3 ? rest * uniform01(rng) : rest;
      rest -= a.shared_bits[k];
    }
    double sum = 0.0;
    for (std::size_t k = 0; k < 4; ++k) {
      sum += uplink_energy(d.scenario, d.profile, k, a.p_ul[k], a.shared_bits[k]);
      sum += downlink_energy(d.scenario, d.profile, k, a.p_dl[k], a.p_multicast);
    }
    EXPECT_EQ(total_energy(d.scenario, d.profile, a), sum);
  }
}

TEST(Feasibility, EmptyWorkloadAtZeroIsFeasible) {
  const Scenario s = make_scenario({1e-12, 2e-12});
  const FeasibilityReport r = check_feasibility(s, zero_profile(2), Allocation::zeros(2));
  EXPECT_TRUE(r.feasible) << r.summary();
  EXPECT_LE(r.worst_violation, 0.0);
}

TEST(Feasibility, OverSubscribedCpuIsReported) {
  const Scenario s = make_scenario({1e-12, 2e-12});
  Allocation a = Allocation::zeros(2);
  a.cpu_frac = {0.5, 0.5 + 1e-3};
  const FeasibilityReport r = check_feasibility(s, zero_profile(2), a, 1e-6);
  EXPECT_FALSE(r.feasible);
  EXPECT_NEAR(r.cpu_share, 1e-3, 1e-12);
  EXPECT_NEAR(r.worst_violation, 1e-3, 1e-12);
}

TEST(Feasibility, FeasibleIffWorstViolationWithinTolerance) {
  const testing::Drop d = testing::seeded_drop(3, 3, 0.3);
  std::mt19937_64 rng(8);
  for (int i = 0; i < 200; ++i) {
    Allocation a = some_allocation(3);
    for (std::size_t k = 0; k < 3; ++k) {
      a.p_ul[k] = 100.0 * uniform01(rng);
      a.cpu_frac[k] = 0.4 * uniform01(rng);
      a.shared_bits[k] = d.profile.shared_input / 3.0;
    }
    a.t_shared_ul = 0.02 * uniform01(rng);
    a.t_shared_dl = 0.02 * uniform01(rng);
    const FeasibilityReport r = check_feasibility(d.scenario, d.profile, a, 1e-6);
    EXPECT_EQ(r.feasible, r.worst_violation <= 1e-6);
  }
}

TEST(Feasibility, InvariantUnderUserPermutationOfSymmetricScenario) {
  const Scenario s = make_scenario({2e-12, 2e-12, 2e-12});
  const TaskProfile prof =
      derive_shared_split({5e3, 5e3, 5e3}, {5e3, 5e3, 5e3}, {1e7, 1e7, 1e7}, 0.3);
  Allocation a = some_allocation(3);
  a.shared_bits = {0.2 * prof.shared_input, 0.3 * prof.shared_input, 0.5 * prof.shared_input};
  a.t_shared_ul = 0.01;
  a.t_shared_dl = 0.01;
  Allocation b = a;
  const std::vector<std::size_t> perm{2, 0, 1};
  for (std::size_t i = 0; i < 3; ++i) {
    b.p_ul[i] = a.p_ul[perm[i]];
    b.shared_bits[i] = a.shared_bits[perm[i]];
    b.cpu_frac[i] = a.cpu_frac[perm[i]];
    b.p_dl[i] = a.p_dl[perm[i]];
  }
  const FeasibilityReport ra = check_feasibility(s, prof, a), rb = check_feasibility(s, prof, b);
  EXPECT_EQ(ra.feasible, rb.feasible);
  EXPECT_DOUBLE_EQ(ra.worst_violation, rb.worst_violation);
  for (std::size_t i = 0; i < 3; ++i) EXPECT_DOUBLE_EQ(rb.latency[i], ra.latency[perm[i]]);
}

TEST(SharedSplit, NoSharingAtEtaZero) {
  const TaskProfile p = derive_shared_split({1e6, 2e6}, {1e6, 1e6}, {2.64e9, 5.28e9}, 0.0);
  EXPECT_EQ(p.shared_input, 0.0);
  EXPECT_EQ(p.shared_output, 0.0);
  EXPECT_EQ(p.shared_cycles, 0.0);
}

TEST(SharedSplit, FullSharingOfHomogeneousUsersLeavesNoSeparateWork) {
  const TaskProfile p = derive_shared_split({1e6, 1e6}, {1e6, 1e6}, {2.64e9, 2.64e9}, 1.0);
  for (std::size_t k = 0; k < 2; ++k) {
    EXPECT_EQ(p.separate_cycles(k), 0.0);
    EXPECT_EQ(p.separate_output(k), 0.0);
  }
}

TEST(SharedSplit, ThirtyPercentOfOneMegabit) {
  const TaskProfile p = derive_shared_split({1e6, 1e6}, {1e6, 1e6}, {2.64e9, 2.64e9}, 0.3);
  EXPECT_DOUBLE_EQ(p.shared_input, 3e5);
  EXPECT_DOUBLE_EQ(p.shared_cycles, 0.3 * 2.64e9);
}

TEST(SharedSplit, UsesTheSmallestUser) {
  const TaskProfile p = derive_shared_split({1e6, 4e5}, {2e5, 1e6}, {3e9, 1e9}, 0.5);
  EXPECT_DOUBLE_EQ(p.shared_input, 2e5);
  EXPECT_DOUBLE_EQ(p.shared_output, 1e5);
  EXPECT_DOUBLE_EQ(p.shared_cycles, 5e8);
}

TEST(SharedSplit, EtaOutsideUnitIntervalIsRejected) {
  EXPECT_THROW(derive_shared_split({1e6}, {1e6}, {1e9}, 1.5), std::domain_error);
  EXPECT_THROW(derive_shared_split({1e6}, {1e6}, {1e9}, -0.1), std::domain_error);
}

TEST(Units, DbmConversions) {
  EXPECT_NEAR(dbm_to_watt(50.0), 100.0, 1e-12);
  EXPECT_NEAR(dbm_to_watt(60.0), 1000.0, 1e-9);
  EXPECT_NEAR(dbm_to_watt(-147.0), std::pow(10.0, -17.7), 1e-30);
}

TEST(Allocation, PackedVectorRoundTrips) {
  Allocation a = some_allocation(3);
  a.shared_bits = {1.0, 2.0, 3.0};
  a.t_shared_ul = 0.1;
  a.t_shared_dl = 0.2;
  const std::vector<double> v = a.to_vector();
  ASSERT_EQ(v.size(), 4u * 3u + 4u);
  const Allocation b = Allocation::from_vector(3, v);
  EXPECT_EQ(b.to_vector(), v);
}

TEST(ScenarioValidation, RejectsNonPositiveGain) {
  Scenario s = make_scenario({1e-12, 0.0});
  EXPECT_THROW(s.validate(), std::invalid_argument);
}

}  // namespace
}  // namespace mecsca
