// Copyright 2026 The mecsca Authors
// SPDX-License-Identifier: Apache-2.0

// Strongly convex SCA subproblem built around a feasible expansion point.
//
// The non-convex pieces are the uplink energy (P/R(P) + l)(B + dB) and the
// shared-uplink latency B/R(P). The energy is replaced by the three-term
// partial linearization plus a proximal term; the latency by the
// product-splitting bound  x1*x2 = 1/2 (x1+x2)^2 - 1/2 (x1^2 + x2^2)  with the
// concave part linearized at the expansion point. Every other piece of the
// original problem is already convex and is carried over unchanged.

#pragma once

#include <array>
#include <cstddef>
#include <string>
#include <vector>

#include "mecsca/convex_program.hpp"
#include "mecsca/model.hpp"

namespace mecsca {

// Diagonal of the proximal matrix, in normalized variable units (see
// normalization_scales); the penalty is additionally multiplied by the sum
// energy at the expansion point so it is dimensionally an energy.
struct ProximalWeights {
  double p_ul = 1e-4;
  double shared_bits = 1e-4;
  double cpu_frac = 1e-4;
  double cpu_frac_shared = 1e-4;
  double p_dl = 1e-4;
  double p_multicast = 1e-4;
  double t_shared_ul = 1e-4;
  double t_shared_dl = 1e-4;

  void validate() const;
  double min() const;
};

struct SurrogatePoint {
  Allocation expansion;
  ProximalWeights weights;
  double prox_scale = 1.0;  // J; sum energy at the expansion point
};

// Validates the expansion point (throws std::invalid_argument when it is not
// feasible for the original problem) and fills prox_scale.
SurrogatePoint make_surrogate_point(const Scenario& scenario, const TaskProfile& profile,
                                    const Allocation& expansion, const ProximalWeights& weights);

// Index map of the packed allocation vector.
class VariableLayout {
 public:
  explicit VariableLayout(std::size_t num_users) : k_(num_users) {}
  std::size_t num_users() const { return k_; }
  std::size_t size() const { return 4 * k_ + 4; }
  int p_ul(std::size_t k) const { return static_cast<int>(k); }
  int shared_bits(std::size_t k) const { return static_cast<int>(k_ + k); }
  int cpu_frac(std::size_t k) const { return static_cast<int>(2 * k_ + k); }
  int p_dl(std::size_t k) const { return static_cast<int>(3 * k_ + k); }
  int cpu_frac_shared() const { return static_cast<int>(4 * k_); }
  int p_multicast() const { return static_cast<int>(4 * k_ + 1); }
  int t_shared_ul() const { return static_cast<int>(4 * k_ + 2); }
  int t_shared_dl() const { return static_cast<int>(4 * k_ + 3); }

 private:
  std::size_t k_;
};

// Powers by their budgets, shared bits by B_S^I (1 when zero), fractions by
// 1, times by T_max.
std::vector<double> normalization_scales(const Scenario& scenario, const TaskProfile& profile);

// Squared norm of (b - a) in normalized units.
double normalized_distance_sq(const Scenario& scenario, const TaskProfile& profile,
                              const Allocation& a, const Allocation& b);

// Shannon rate  bandwidth * log2(1 + gain_per_watt * P)  and derivatives of
// its reciprocal, the per-bit transfer time.
struct RateCurve {
  double bandwidth = 0.0;
  double gain_per_watt = 0.0;

  double rate(double p) const;
  double inv(double p) const;
  double d_inv(double p) const;
  double dd_inv(double p) const;
};

RateCurve uplink_curve(const Scenario& scenario, std::size_t k);
RateCurve unicast_curve(const Scenario& scenario, std::size_t k);
RateCurve multicast_curve(const Scenario& scenario, std::size_t k);

// Test fixture: deliberately corrupts the surrogate so the validation suites
// can demonstrate that they catch it.
enum class SurrogateMutation { none, flip_power_linear_term };

// Surrogate uplink energy of user k at z (J), including the proximal penalty
// on user k's own coordinates (P_ul, B_S, f, P_dl). The penalty on the shared
// coordinates is counted once in the subproblem objective, not per user.
double surrogate_uplink_energy(const Scenario& scenario, const TaskProfile& profile,
                               const Allocation& z, const SurrogatePoint& point, std::size_t k,
                               SurrogateMutation mutation = SurrogateMutation::none);

// Convex upper bound (s) of the shared-uplink time B / R_ul(P) of user k,
// tight at the expansion point. P must be > 0.
double surrogate_latency(const Scenario& scenario, const TaskProfile& profile, double p_ul,
                         double shared_bits, const SurrogatePoint& point, std::size_t k);

class ConvexSubproblem final : public ConvexProgram {
 public:
  enum class Kind { latency, shared_uplink, multicast };
  struct ConstraintInfo {
    Kind kind;
    std::size_t user;
    std::vector<int> support;
  };

  ConvexSubproblem(const Scenario& scenario, const TaskProfile& profile, SurrogatePoint point,
                   SurrogateMutation mutation = SurrogateMutation::none);

  std::size_t dimension() const override { return layout_.size(); }
  double objective(const Vec& z, Vec* grad, Mat* hess) const override;
  std::size_t num_constraints() const override { return constraints_.size(); }
  double constraint(std::size_t i, const Vec& z, Vec* grad, Mat* hess) const override;
  std::span<const int> constraint_support(std::size_t i) const override {
    return constraints_[i].support;
  }
  const std::vector<LinearRow>& linear_inequalities() const override { return linear_; }
  const LinearRow* linear_equality() const override { return has_equality_ ? &equality_ : nullptr; }
  const Vec& lower() const override { return lower_; }
  const Vec& upper() const override { return upper_; }
  Vec variable_scale() const override { return scale_; }
  double objective_scale() const override { return point_.prox_scale; }

  const SurrogatePoint& point() const { return point_; }
  const Scenario& scenario() const { return scenario_; }
  const TaskProfile& profile() const { return profile_; }
  const VariableLayout& layout() const { return layout_; }
  const ConstraintInfo& constraint_info(std::size_t i) const { return constraints_[i]; }
  std::string constraint_name(std::size_t i) const;

  // Subproblem objective minus the original objective at the expansion point.
  double offset_at_expansion() const;

  // Objective/constraint values and gradients at `query`, as JSON, for
  // diffing against other implementations.
  std::string debug_dump(const Allocation& query) const;

 private:
  double uplink_term(std::size_t k, const Vec& z, Vec* grad, Mat* hess) const;

  Scenario scenario_;
  TaskProfile profile_;
  SurrogatePoint point_;
  SurrogateMutation mutation_;
  VariableLayout layout_;
  std::vector<RateCurve> ul_, dl_, mc_;
  std::vector<ConstraintInfo> constraints_;
  std::vector<LinearRow> linear_;
  LinearRow equality_;
  bool has_equality_ = false;
  Vec lower_, upper_, scale_, center_, prox_diag_;
};

}  // namespace mecsca
