// Copyright 2026 The mecsca Authors
// SPDX-License-Identifier: Apache-2.0

#include "mecsca/inner_solver.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <stdexcept>

#include "mecsca/surrogate.hpp"

namespace mecsca {

void SolverSettings::validate() const {
  if (!(kkt_tolerance > 0.0)) throw std::invalid_argument("kkt_tolerance must be > 0");
  if (max_newton_iters < 1) throw std::invalid_argument("max_newton_iters must be >= 1");
  if (!(initial_barrier_weight > 0.0))
    throw std::invalid_argument("initial_barrier_weight must be > 0");
  if (!(barrier_reduction > 0.0 && barrier_reduction < 1.0))
    throw std::invalid_argument("barrier_reduction must lie in (0, 1)");
  if (!(backtracking_ratio > 0.0 && backtracking_ratio < 1.0))
    throw std::invalid_argument("backtracking_ratio must lie in (0, 1)");
  if (!(sufficient_decrease > 0.0 && sufficient_decrease < 0.5))
    throw std::invalid_argument("sufficient_decrease must lie in (0, 0.5)");
}

std::string to_string(InnerStatus status) {
  switch (status) {
    case InnerStatus::converged: return "converged";
    case InnerStatus::max_iters: return "max_iters";
    case InnerStatus::infeasible: return "infeasible";
  }
  return "unknown";
}

namespace {

using Index = Eigen::Index;

constexpr double kInteriorShift = 1e-3;
constexpr double kCenteringTolerance = 1e-8;  // half the Newton decrement squared
constexpr double kPhaseOneTarget = -1e-4;
constexpr int kMaxCenteringSteps = 200;
constexpr double kQuadraticRegion = 1e-3;  // Newton decrement squared

// Eliminates fixed coordinates and the equality pivot, and rescales the
// remaining coordinates:  z = offset + map * y.
class ReducedSpace {
 public:
  explicit ReducedSpace(const ConvexProgram& program) {
    const Index n = static_cast<Index>(program.dimension());
    const Vec& lo = program.lower();
    const Vec& hi = program.upper();
    const Vec scale = program.variable_scale();
    if (lo.size() != n || hi.size() != n || scale.size() != n)
      throw std::invalid_argument("bounds and scales must match the program dimension");

    std::vector<bool> fixed(static_cast<std::size_t>(n));
    for (Index j = 0; j < n; ++j) {
      if (!(lo[j] <= hi[j]) || !std::isfinite(lo[j]))
        throw std::invalid_argument("every coordinate needs a finite lower bound <= upper bound");
      fixed[static_cast<std::size_t>(j)] = lo[j] == hi[j];
    }

    const LinearRow* eq = program.linear_equality();
    if (eq != nullptr) {
      for (auto it = eq->terms.rbegin(); it != eq->terms.rend(); ++it) {
        if (!fixed[static_cast<std::size_t>(it->first)] && it->second != 0.0) {
          pivot_ = it->first;
          pivot_coef_ = it->second;
          break;
        }
      }
    }

    std::vector<Index> column(static_cast<std::size_t>(n), -1);
    for (Index j = 0; j < n; ++j) {
      if (!fixed[static_cast<std::size_t>(j)] && j != pivot_) {
        column[static_cast<std::size_t>(j)] = static_cast<Index>(free_.size());
        free_.push_back(j);
      }
    }
    const Index m = static_cast<Index>(free_.size());
    map_ = Mat::Zero(n, m);
    offset_ = Vec::Zero(n);
    for (Index c = 0; c < m; ++c) map_(free_[static_cast<std::size_t>(c)], c) = scale[free_[static_cast<std::size_t>(c)]];
    for (Index j = 0; j < n; ++j)
      if (fixed[static_cast<std::size_t>(j)]) offset_[j] = lo[j];
    if (pivot_ >= 0) {
      double rhs = eq->rhs;
      for (const auto& [j, a] : eq->terms) {
        if (j == pivot_) continue;
        if (fixed[static_cast<std::size_t>(j)]) {
          rhs -= a * lo[j];
        } else {
          const Index c = column[static_cast<std::size_t>(j)];
          map_(pivot_, c) -= a * scale[j] / pivot_coef_;
        }
      }
      offset_[pivot_] = rhs / pivot_coef_;
    } else if (eq != nullptr) {
      // Every coordinate of the equality is fixed: it holds or it does not.
      const double resid = eq->eval(offset_) - eq->rhs;
      consistent_ = std::abs(resid) <= 1e-12 * std::max(1.0, std::abs(eq->rhs));
    }

    box_lo_.resize(m);
    box_hi_.resize(m);
    for (Index c = 0; c < m; ++c) {
      const Index j = free_[static_cast<std::size_t>(c)];
      box_lo_[c] = lo[j] / scale[j];
      box_hi_[c] = hi[j] / scale[j];
    }

    // General linear inequalities in y, including the pivot's bounds.
    std::vector<Vec> rows;
    std::vector<double> rhs;
    for (const LinearRow& r : program.linear_inequalities()) {
      Vec g = Vec::Zero(m);
      double h = r.rhs;
      for (const auto& [j, a] : r.terms) {
        g += a * map_.row(j).transpose();
        h -= a * offset_[j];
      }
      rows.push_back(std::move(g));
      rhs.push_back(h);
    }
    if (pivot_ >= 0) {
      rows.push_back(-map_.row(pivot_).transpose());
      rhs.push_back(offset_[pivot_] - lo[pivot_]);
      if (std::isfinite(hi[pivot_])) {
        rows.push_back(map_.row(pivot_).transpose());
        rhs.push_back(hi[pivot_] - offset_[pivot_]);
      }
    }
    // Rows with no free coordinate are constants: check them once and drop.
    std::size_t kept = 0;
    for (std::size_t r = 0; r < rows.size(); ++r) {
      if (rows[r].size() == 0 || rows[r].cwiseAbs().maxCoeff() == 0.0) {
        if (rhs[r] < -1e-12 * std::max(1.0, std::abs(rhs[r]))) consistent_ = false;
        continue;
      }
      rows[kept] = std::move(rows[r]);
      rhs[kept] = rhs[r];
      ++kept;
    }
    rows.resize(kept);
    rhs.resize(kept);
    lin_ = Mat::Zero(static_cast<Index>(rows.size()), m);
    lin_rhs_ = Vec::Zero(static_cast<Index>(rows.size()));
    for (std::size_t r = 0; r < rows.size(); ++r) {
      lin_.row(static_cast<Index>(r)) = rows[r].transpose();
      lin_rhs_[static_cast<Index>(r)] = rhs[r];
    }
  }

  Index dim() const { return static_cast<Index>(free_.size()); }
  Vec to_z(const Vec& y) const { return offset_ + map_ * y; }
  Vec to_y(const Vec& z) const {
    Vec y(dim());
    for (Index c = 0; c < dim(); ++c) {
      const Index j = free_[static_cast<std::size_t>(c)];
      y[c] = z[j] / map_(j, c);
    }
    return y;
  }

  const Mat& map() const { return map_; }
  const Vec& box_lo() const { return box_lo_; }
  const Vec& box_hi() const { return box_hi_; }
  const Mat& lin() const { return lin_; }
  const Vec& lin_rhs() const { return lin_rhs_; }
  bool consistent() const { return consistent_; }

 private:
  std::vector<Index> free_;
  Index pivot_ = -1;
  double pivot_coef_ = 1.0;
  Mat map_;
  Vec offset_;
  Vec box_lo_, box_hi_;
  Mat lin_;
  Vec lin_rhs_;
  bool consistent_ = true;
};

// Log-barrier function over w = y (main phase) or w = (y, s) (phase I, where
// every non-box constraint is relaxed to  c(y) <= s  and  s >= -1).
class BarrierModel {
 public:
  BarrierModel(const ConvexProgram& program, const ReducedSpace& space, bool phase_one)
      : program_(program), space_(space), phase_one_(phase_one) {
    const Index n = static_cast<Index>(program.dimension());
    gz_.setZero(n);
    hz_.setZero(n, n);
    cg_.setZero(n);
    ch_.setZero(n, n);
    cross_.setZero(n);
    inv_obj_scale_ = 1.0 / program.objective_scale();
    num_terms_ = 0;
    for (Index c = 0; c < space.dim(); ++c)
      num_terms_ += 1 + (std::isfinite(space.box_hi()[c]) ? 1 : 0);
    num_terms_ += static_cast<int>(space.lin().rows() + program.num_constraints());
    if (phase_one) num_terms_ += 1;
  }

  Index dim() const { return space_.dim() + (phase_one_ ? 1 : 0); }
  int num_terms() const { return num_terms_; }

  Vec y_of(const Vec& w) const { return phase_one_ ? Vec(w.head(space_.dim())) : w; }

  // Largest constraint value (normalized) over the non-box constraints.
  double max_violation(const Vec& y) const {
    const Vec z = space_.to_z(y);
    double worst = -kUnbounded;
    if (space_.lin().rows() > 0)
      worst = (space_.lin() * y - space_.lin_rhs()).maxCoeff();
    for (std::size_t i = 0; i < program_.num_constraints(); ++i) {
      const double c = program_.constraint(i, z, nullptr, nullptr);
      worst = std::max(worst, std::isfinite(c) ? c : kUnbounded);
    }
    return worst;
  }

  // Largest step in (0, 1] along dw keeping box and linear terms strictly inside.
  double max_step(const Vec& w, const Vec& dw) const {
    double step = 1.0;
    const Index m = space_.dim();
    for (Index c = 0; c < m; ++c) {
      if (dw[c] < 0.0) step = std::min(step, (space_.box_lo()[c] - w[c]) / dw[c]);
      if (dw[c] > 0.0 && std::isfinite(space_.box_hi()[c]))
        step = std::min(step, (space_.box_hi()[c] - w[c]) / dw[c]);
    }
    const Vec y = w.head(m), dy = dw.head(m);
    const double s = phase_one_ ? w[m] : 0.0, ds = phase_one_ ? dw[m] : 0.0;
    if (space_.lin().rows() > 0) {
      const Vec slack = space_.lin_rhs() - space_.lin() * y + Vec::Constant(space_.lin().rows(), s);
      const Vec rate = space_.lin() * dy - Vec::Constant(space_.lin().rows(), ds);
      for (Index r = 0; r < slack.size(); ++r)
        if (rate[r] > 0.0) step = std::min(step, slack[r] / rate[r]);
    }
    if (phase_one_ && ds < 0.0) step = std::min(step, -(s + 1.0) / ds);
    return std::max(step, 0.0);
  }

  // Returns false outside the barrier domain.
  bool evaluate(const Vec& w, double t, double* phi, Vec* grad, Mat* hess) {
    const Index m = space_.dim();
    const Index d = dim();
    const Vec y = w.head(m);
    const double s = phase_one_ ? w[m] : 0.0;
    const bool derivs = grad != nullptr;
    double value = 0.0;
    if (derivs) {
      grad->setZero(d);
      hess->setZero(d, d);
    }

    for (Index c = 0; c < m; ++c) {
      const double a = y[c] - space_.box_lo()[c];
      if (!(a > 0.0)) return false;
      value -= std::log(a);
      if (derivs) {
        (*grad)[c] -= 1.0 / a;
        (*hess)(c, c) += 1.0 / (a * a);
      }
      if (std::isfinite(space_.box_hi()[c])) {
        const double b = space_.box_hi()[c] - y[c];
        if (!(b > 0.0)) return false;
        value -= std::log(b);
        if (derivs) {
          (*grad)[c] += 1.0 / b;
          (*hess)(c, c) += 1.0 / (b * b);
        }
      }
    }

    const Mat& lin = space_.lin();
    for (Index r = 0; r < lin.rows(); ++r) {
      const double slack = space_.lin_rhs()[r] - lin.row(r).dot(y) + s;
      if (!(slack > 0.0)) return false;
      value -= std::log(slack);
      if (derivs) {
        const double inv = 1.0 / slack;
        grad->head(m) += inv * lin.row(r).transpose();
        hess->topLeftCorner(m, m).noalias() += (inv * inv) * lin.row(r).transpose() * lin.row(r);
        if (phase_one_) {
          (*grad)[m] -= inv;
          hess->col(m).head(m) -= (inv * inv) * lin.row(r).transpose();
          (*hess)(m, m) += inv * inv;
        }
      }
    }

    const Vec z = space_.to_z(y);
    if (derivs) {
      gz_.setZero();
      hz_.setZero();
      cross_.setZero();
    }
    for (std::size_t i = 0; i < program_.num_constraints(); ++i) {
      const double c = program_.constraint(i, z, derivs ? &cg_ : nullptr, derivs ? &ch_ : nullptr);
      const double slack = s - c;
      if (!(slack > 0.0) || !std::isfinite(slack)) {
        if (derivs) clear_scratch(i);
        return false;
      }
      value -= std::log(slack);
      if (derivs) {
        const double inv = 1.0 / slack;
        const auto support = program_.constraint_support(i);
        for (int a : support) {
          gz_[a] += inv * cg_[a];
          for (int b : support) hz_(a, b) += inv * ch_(a, b) + inv * inv * cg_[a] * cg_[b];
          if (phase_one_) cross_[a] -= inv * inv * cg_[a];
        }
        if (phase_one_) {
          (*grad)[m] -= inv;
          (*hess)(m, m) += inv * inv;
        }
        clear_scratch(i);
      }
    }

    if (phase_one_) {
      if (!(s + 1.0 > 0.0)) return false;
      value += t * s - std::log(s + 1.0);
      if (derivs) {
        (*grad)[m] += t - 1.0 / (s + 1.0);
        (*hess)(m, m) += 1.0 / ((s + 1.0) * (s + 1.0));
      }
    } else {
      const double f0 = program_.objective(z, derivs ? &gz_tmp() : nullptr,
                                           derivs ? &hz_tmp() : nullptr);
      if (!std::isfinite(f0)) return false;
      value += t * inv_obj_scale_ * f0;
      if (derivs) {
        gz_ += (t * inv_obj_scale_) * obj_g_;
        hz_ += (t * inv_obj_scale_) * obj_h_;
      }
    }

    if (derivs) {
      const Mat& map = space_.map();
      grad->head(m) += map.transpose() * gz_;
      hess->topLeftCorner(m, m).noalias() += map.transpose() * hz_ * map;
      if (phase_one_) {
        hess->col(m).head(m) += map.transpose() * cross_;
        hess->row(m).head(m) = hess->col(m).head(m).transpose();
      }
    }
    *phi = value;
    return std::isfinite(value);
  }

 private:
  Vec& gz_tmp() {
    obj_g_.setZero(gz_.size());
    return obj_g_;
  }
  Mat& hz_tmp() {
    obj_h_.setZero(hz_.rows(), hz_.cols());
    return obj_h_;
  }
  void clear_scratch(std::size_t i) {
    const auto support = program_.constraint_support(i);
    for (int a : support) {
      cg_[a] = 0.0;
      for (int b : support) ch_(a, b) = 0.0;
    }
  }

  const ConvexProgram& program_;
  const ReducedSpace& space_;
  bool phase_one_;
  double inv_obj_scale_ = 1.0;
  int num_terms_ = 0;
  Vec gz_, cg_, cross_, obj_g_;
  Mat hz_, ch_, obj_h_;
};

// Newton direction with Jacobi scaling; falls back to a ridge when the
// Hessian is not numerically positive definite.
Vec newton_direction(const Mat& hess, const Vec& grad) {
  const Vec d = hess.diagonal().cwiseMax(1e-300).cwiseSqrt().cwiseInverse();
  Mat scaled = d.asDiagonal() * hess * d.asDiagonal();
  const Vec rhs = -(d.asDiagonal() * grad);
  Eigen::LLT<Mat> llt(scaled);
  if (llt.info() == Eigen::Success) return d.asDiagonal() * llt.solve(rhs);
  for (double ridge = 1e-12; ridge < 1e3; ridge *= 100.0) {
    scaled.diagonal().array() += ridge;
    llt.compute(scaled);
    if (llt.info() == Eigen::Success) return d.asDiagonal() * llt.solve(rhs);
  }
  return d.asDiagonal() * rhs;
}

struct CenteringResult {
  bool ok = true;        // false: iteration budget exhausted
  double decrement = 0;  // Newton decrement squared at exit
};

template <typename StopFn>
CenteringResult center(BarrierModel& model, Vec& w, double t, int& iterations,
                       const SolverSettings& settings, StopFn&& early_stop) {
  CenteringResult out;
  double phi = 0.0;
  Vec grad, trial_grad;
  Mat hess;
  double previous = kUnbounded;
  for (int step = 0; step < kMaxCenteringSteps; ++step) {
    if (!model.evaluate(w, t, &phi, &grad, &hess)) {
      out.ok = false;
      return out;
    }
    const Vec dw = newton_direction(hess, grad);
    const double slope = grad.dot(dw);
    out.decrement = -slope;
    if (settings.trace != nullptr) {
      *settings.trace << "newton t=" << std::setprecision(6) << t << " phi=" << phi
                      << " decrement=" << -slope << "\n";
    }
    if (!(slope < 0.0) || -slope * 0.5 <= kCenteringTolerance) return out;
    // Round-off floor: the decrement has stopped shrinking.
    if (-slope < kQuadraticRegion && -slope > 0.5 * previous) return out;
    previous = -slope;
    if (iterations >= settings.max_newton_iters) {
      out.ok = false;
      return out;
    }
    ++iterations;

    double alpha = std::min(1.0, 0.99 * model.max_step(w, dw));
    bool moved = false;
    if (-slope < kQuadraticRegion && alpha == 1.0) {
      // Armijo cannot resolve decreases this small against |phi|; near the
      // center the pure Newton step is safe as long as it stays in the domain.
      const Vec trial = w + dw;
      double trial_phi = 0.0;
      if (model.evaluate(trial, t, &trial_phi, nullptr, nullptr)) {
        w = trial;
        if (early_stop(w)) return out;
        continue;
      }
    }
    for (int ls = 0; ls < 80 && alpha > 0.0; ++ls) {
      const Vec trial = w + alpha * dw;
      double trial_phi = 0.0;
      if (model.evaluate(trial, t, &trial_phi, nullptr, nullptr) &&
          trial_phi <= phi + settings.sufficient_decrease * alpha * slope) {
        w = trial;
        moved = true;
        break;
      }
      alpha *= settings.backtracking_ratio;
    }
    if (!moved) return out;  // no progress possible at this precision
    if (early_stop(w)) return out;
  }
  return out;
}

// Moves bound-active coordinates a small fraction of their range inward.
void push_inside_box(const ReducedSpace& space, Vec& y) {
  for (Index c = 0; c < y.size(); ++c) {
    const double lo = space.box_lo()[c], hi = space.box_hi()[c];
    const double range = std::isfinite(hi) ? hi - lo : std::max(1.0, std::abs(y[c]));
    if (!(y[c] > lo)) y[c] = lo + kInteriorShift * range;
    if (std::isfinite(hi) && !(y[c] < hi)) y[c] = hi - kInteriorShift * range;
  }
}

}  // namespace

ConvexSolution solve_convex(const ConvexProgram& program, const Vec& start,
                            const SolverSettings& settings) {
  settings.validate();
  ConvexSolution result;
  const ReducedSpace space(program);
  if (!space.consistent()) return result;

  Vec y = space.to_y(start);
  push_inside_box(space, y);
  int iterations = 0;

  BarrierModel main_model(program, space, false);
  const double initial_violation = main_model.max_violation(y);
  if (!(initial_violation < 0.0)) {
    BarrierModel phase(program, space, true);
    Vec w(space.dim() + 1);
    w.head(space.dim()) = y;
    w[space.dim()] = std::isfinite(initial_violation)
                         ? std::max(initial_violation, 0.0) + 0.5 * (1.0 + std::abs(initial_violation))
                         : 1e6;
    double t = settings.initial_barrier_weight;
    auto reached = [&](const Vec& cur) { return cur[space.dim()] < kPhaseOneTarget; };
    while (true) {
      center(phase, w, t, iterations, settings, reached);
      if (reached(w)) break;
      if (phase.num_terms() / t < 1e-12 || iterations >= settings.max_newton_iters) break;
      t /= settings.barrier_reduction;
    }
    y = w.head(space.dim());
    if (!(main_model.max_violation(y) < 0.0)) {
      result.minimizer = space.to_z(y);
      result.iterations = iterations;
      result.status = InnerStatus::infeasible;
      return result;
    }
  }

  double t = settings.initial_barrier_weight;
  auto never = [](const Vec&) { return false; };
  CenteringResult last;
  bool budget_hit = false;
  while (true) {
    last = center(main_model, y, t, iterations, settings, never);
    if (!last.ok) {
      budget_hit = true;
      break;
    }
    if (main_model.num_terms() / t <= settings.kkt_tolerance) break;
    t /= settings.barrier_reduction;
  }

  const Vec z = space.to_z(y);
  result.minimizer = z;
  result.objective = program.objective(z, nullptr, nullptr);
  result.iterations = iterations;
  const double gap = main_model.num_terms() / t;
  // Centering error in objective units: the Newton decrement bounds the
  // barrier suboptimality of the current point.
  const double stationarity = last.decrement / t;
  result.kkt_residual = std::max(gap, stationarity);
  result.status = (!budget_hit && result.kkt_residual <= settings.kkt_tolerance)
                      ? InnerStatus::converged
                      : InnerStatus::max_iters;
  return result;
}

InnerSolution solve_subproblem(const ConvexSubproblem& subproblem, const SolverSettings& settings) {
  const std::vector<double> start = subproblem.point().expansion.to_vector();
  const Vec z0 = Eigen::Map<const Vec>(start.data(), static_cast<Index>(start.size()));
  const ConvexSolution sol = solve_convex(subproblem, z0, settings);
  InnerSolution out;
  const std::size_t k = subproblem.point().expansion.num_users();
  if (sol.minimizer.size() > 0) {
    out.minimizer = Allocation::from_vector(
        k, std::vector<double>(sol.minimizer.data(), sol.minimizer.data() + sol.minimizer.size()));
  } else {
    out.minimizer = subproblem.point().expansion;
  }
  out.objective = sol.objective;
  out.kkt_residual = sol.kkt_residual;
  out.iterations = sol.iterations;
  out.status = sol.status;
  return out;
}

}  // namespace mecsca
