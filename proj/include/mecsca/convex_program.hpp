// Copyright 2026 The mecsca Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <limits>
#include <span>
#include <utility>
#include <vector>

#include <Eigen/Dense>

namespace mecsca {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

// Sparse linear form  sum_j coef_j * z_j  compared against rhs.
struct LinearRow {
  std::vector<std::pair<int, double>> terms;
  double rhs = 0.0;

  double eval(const Vec& z) const {
    double s = 0.0;
    for (const auto& [j, c] : terms) s += c * z[j];
    return s;
  }
};

// A smooth convex program
//
//   minimize    f0(z)
//   subject to  c_i(z) <= 0            (convex, twice differentiable)
//               row_r(z) <= rhs_r      (linear)
//               eq(z) == eq_rhs        (at most one linear equality)
//               lower <= z <= upper    (lower finite; lower == upper fixes z_j)
//
// The nonlinear functions only need to be defined where every bound holds
// strictly. Derivative outputs are accumulated (`+=`), never overwritten.
class ConvexProgram {
 public:
  virtual ~ConvexProgram() = default;

  virtual std::size_t dimension() const = 0;

  virtual double objective(const Vec& z, Vec* grad, Mat* hess) const = 0;

  virtual std::size_t num_constraints() const = 0;
  virtual double constraint(std::size_t i, const Vec& z, Vec* grad, Mat* hess) const = 0;
  // Coordinates constraint i depends on; gradients are zero elsewhere.
  virtual std::span<const int> constraint_support(std::size_t i) const = 0;

  virtual const std::vector<LinearRow>& linear_inequalities() const = 0;
  virtual const LinearRow* linear_equality() const { return nullptr; }

  virtual const Vec& lower() const = 0;
  virtual const Vec& upper() const = 0;

  // Typical magnitude of each coordinate; the solver works in z / scale.
  virtual Vec variable_scale() const { return Vec::Ones(static_cast<Eigen::Index>(dimension())); }
  // Typical magnitude of f0; the solver minimizes f0 / objective_scale.
  virtual double objective_scale() const { return 1.0; }
};

inline constexpr double kUnbounded = std::numeric_limits<double>::infinity();

}  // namespace mecsca
