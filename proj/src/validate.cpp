// Copyright 2026 The mecsca Authors
// SPDX-License-Identifier: Apache-2.0

#include "mecsca/validate.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>
#include <stdexcept>

#include "mecsca/oracle.hpp"

namespace mecsca {
namespace {

constexpr std::uint64_t kSampleStream = 0x5EED5A3C1E0B0A7DULL;
constexpr std::uint64_t kOracleStream = 0x0AC1E0000000001DULL;
constexpr int kWarmIterations = 3;    // SCA iterations before the second expansion point
constexpr int kDrawAttempts = 20;     // drops drawn per requested feasible drop
constexpr double kFdStep = 1e-6;      // relative to the variable scale
constexpr double kGradientFloor = 1e-4;  // relative to the function magnitude
constexpr double kHessianRelTolerance = 1e-3;

double uniform01(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

// Half log-uniform over [1e-6, 1] * p_max, half uniform over (0, p_max].
double sample_power(std::mt19937_64& rng, double p_max) {
  if (uniform01(rng) < 0.5) return p_max * std::pow(10.0, -6.0 * uniform01(rng));
  return p_max * std::max(1.0 - uniform01(rng), 1e-12);
}

struct Expansion {
  Scenario scenario;
  TaskProfile profile;
  Allocation point;
  std::uint64_t seed = 0;
};

// Seeded drops whose initial point exists; each contributes the initial point
// and the iterate after a few SCA steps.
std::vector<Expansion> expansion_points(const ValidationConfig& config) {
  std::vector<Expansion> out;
  const TaskProfile profile =
      base_profile(default_workload(config.params.num_users), config.params.num_users, config.eta);
  int found = 0;
  for (int d = 0; found < config.drops && d < kDrawAttempts * config.drops; ++d) {
    DropParams p = config.params;
    p.seed = drop_seed(config.seed, static_cast<std::uint64_t>(d));
    const Scenario s = generate_drop(p);
    const std::optional<Allocation> z0 = find_initial_point(s, profile);
    if (!z0) continue;
    ++found;
    out.push_back({s, profile, *z0, p.seed});
    ScaConfig warm = config.sca;
    warm.max_iterations = kWarmIterations;
    const SolveResult r = sca_solve(s, profile, warm);
    if (r.feasibility.feasible) out.push_back({s, profile, r.allocation, p.seed ^ 1U});
  }
  return out;
}

Vec to_eigen(const Allocation& a) {
  const std::vector<double> v = a.to_vector();
  return Eigen::Map<const Vec>(v.data(), static_cast<Eigen::Index>(v.size()));
}

Allocation from_eigen(std::size_t k, const Vec& z) {
  return Allocation::from_vector(k, std::vector<double>(z.data(), z.data() + z.size()));
}

// Random point of the subproblem box near z0, with powers bounded away from 0.
Vec perturbed(const ConvexSubproblem& sub, const Vec& z0, double radius, std::mt19937_64& rng) {
  const Vec scale = sub.variable_scale();
  Vec z = z0;
  for (Eigen::Index j = 0; j < z.size(); ++j) {
    const double lo = sub.lower()[j] + 1e-3 * scale[j];
    const double hi = std::min(sub.upper()[j], 1e300);
    if (!(hi > lo + 1e-3 * scale[j])) continue;
    z[j] = std::clamp(z0[j] + radius * scale[j] * (2.0 * uniform01(rng) - 1.0), lo, hi);
  }
  return z;
}

class Tally {
 public:
  void check(bool ok, double stat, const std::string& what) {
    ++checks_;
    worst_ = std::max(worst_, stat);
    if (!ok) {
      ++failures_;
      if (first_.empty()) first_ = what;
    }
  }
  SuiteReport report(Suite suite, const std::string& summary) const {
    SuiteReport r;
    r.suite = suite;
    r.checks = checks_;
    r.failures = failures_;
    r.worst = worst_;
    r.passed = checks_ > 0 && failures_ == 0;
    r.detail = summary;
    if (checks_ == 0) r.detail += "; no checks ran";
    if (!first_.empty()) r.detail += "; first failure: " + first_;
    return r;
  }

 private:
  long checks_ = 0;
  long failures_ = 0;
  double worst_ = 0.0;
  std::string first_;
};

std::string describe(std::uint64_t seed, const std::string& what) {
  std::ostringstream os;
  os << what << " (seed " << seed << ")";
  return os.str();
}

}  // namespace

std::string to_string(Suite suite) {
  switch (suite) {
    case Suite::surrogate: return "surrogate";
    case Suite::gradient: return "gradient";
    case Suite::oracle: return "oracle";
  }
  return "unknown";
}

std::optional<Suite> parse_suite(const std::string& name) {
  for (Suite s : all_suites())
    if (to_string(s) == name) return s;
  return std::nullopt;
}

const std::vector<Suite>& all_suites() {
  static const std::vector<Suite> suites{Suite::surrogate, Suite::gradient, Suite::oracle};
  return suites;
}

void ValidationConfig::validate() const {
  params.validate();
  sca.validate();
  if (!(eta >= 0.0 && eta <= 1.0)) throw std::invalid_argument("eta must lie in [0, 1]");
  if (drops < 1) throw std::invalid_argument("drops must be at least 1");
  if (samples_per_drop < 1) throw std::invalid_argument("samples_per_drop must be at least 1");
  if (convexity_pairs < 0) throw std::invalid_argument("convexity_pairs must be non-negative");
  if (gradient_points < 0) throw std::invalid_argument("gradient_points must be non-negative");
  if (oracle_drops < 1) throw std::invalid_argument("oracle_drops must be at least 1");
  if (!(oracle_ratio >= 1.0)) throw std::invalid_argument("oracle_ratio must be at least 1");
  if (suites.empty()) throw std::invalid_argument("no suites selected");
}

SuiteReport surrogate_suite(const ValidationConfig& config) {
  config.validate();
  Tally tally;
  const std::vector<Expansion> points = expansion_points(config);
  for (const Expansion& e : points) {
    const Scenario& s = e.scenario;
    const TaskProfile& prof = e.profile;
    const std::size_t nk = s.num_users();
    const SurrogatePoint sp = make_surrogate_point(s, prof, e.point, config.sca.weights);
    const ConvexSubproblem sub(s, prof, sp, config.mutation);
    std::mt19937_64 rng(e.seed ^ kSampleStream);
    const double bs = prof.shared_input;

    // Upper bound on the shared-uplink time, tight at the expansion point.
    for (std::size_t k = 0; k < nk; ++k) {
      const double p0 = e.point.p_ul[k], b0 = e.point.shared_bits[k];
      const double exact0 = transfer_time(b0, uplink_rate(s, k, p0));
      const double gap0 = std::abs(surrogate_latency(s, prof, p0, b0, sp, k) - exact0);
      tally.check(gap0 <= kBoundTolerance, gap0, describe(e.seed, "latency not tight at expansion"));
    }
    // One latency bound sample per draw; users cycle.
    const int per_point = std::max(1, config.samples_per_drop / 2);
    for (int i = 0; i < per_point; ++i) {
      const std::size_t k = static_cast<std::size_t>(i) % nk;
      const double p = sample_power(rng, s.p_ul_max_w);
      const double b = bs * uniform01(rng);
      const double exact = transfer_time(b, uplink_rate(s, k, p));
      const double margin = exact - surrogate_latency(s, prof, p, b, sp, k);
      tally.check(margin <= kBoundTolerance, std::max(margin, 0.0),
                  describe(e.seed, "latency bound violated"));
    }

    // Midpoint convexity of the energy and latency surrogates and of every
    // subproblem function.
    const Vec z0 = to_eigen(e.point);
    const int pairs = std::max(1, config.convexity_pairs / 2);
    for (int i = 0; i < pairs; ++i) {
      const Vec za = perturbed(sub, z0, 1.0, rng), zb = perturbed(sub, z0, 1.0, rng);
      const Vec zm = 0.5 * (za + zb);
      auto midpoint_check = [&](double fa, double fb, double fm, const std::string& what) {
        const double avg = 0.5 * (fa + fb);
        const double excess = fm - avg;
        const double tol = kConvexityTolerance * std::max(1.0, std::abs(avg));
        tally.check(excess <= tol, std::max(excess, 0.0) / std::max(1.0, std::abs(avg)),
                    describe(e.seed, what));
      };
      const Allocation aa = from_eigen(nk, za), ab = from_eigen(nk, zb), am = from_eigen(nk, zm);
      const std::size_t k = static_cast<std::size_t>(i) % nk;
      midpoint_check(surrogate_uplink_energy(s, prof, aa, sp, k, config.mutation),
                     surrogate_uplink_energy(s, prof, ab, sp, k, config.mutation),
                     surrogate_uplink_energy(s, prof, am, sp, k, config.mutation),
                     "energy surrogate not convex");
      midpoint_check(surrogate_latency(s, prof, aa.p_ul[k], aa.shared_bits[k], sp, k),
                     surrogate_latency(s, prof, ab.p_ul[k], ab.shared_bits[k], sp, k),
                     surrogate_latency(s, prof, am.p_ul[k], am.shared_bits[k], sp, k),
                     "latency surrogate not convex");
      midpoint_check(sub.objective(za, nullptr, nullptr), sub.objective(zb, nullptr, nullptr),
                     sub.objective(zm, nullptr, nullptr), "subproblem objective not convex");
      for (std::size_t c = 0; c < sub.num_constraints(); ++c)
        midpoint_check(sub.constraint(c, za, nullptr, nullptr),
                       sub.constraint(c, zb, nullptr, nullptr),
                       sub.constraint(c, zm, nullptr, nullptr),
                       sub.constraint_name(c) + " not convex");
    }
  }
  std::ostringstream os;
  os << points.size() << " expansion points";
  return tally.report(Suite::surrogate, os.str());
}

SuiteReport gradient_suite(const ValidationConfig& config) {
  config.validate();
  Tally tally;
  const std::vector<Expansion> points = expansion_points(config);
  for (const Expansion& e : points) {
    const Scenario& s = e.scenario;
    const TaskProfile& prof = e.profile;
    const std::size_t nk = s.num_users();
    const SurrogatePoint sp = make_surrogate_point(s, prof, e.point, config.sca.weights);
    const ConvexSubproblem sub(s, prof, sp, config.mutation);
    const Vec scale = sub.variable_scale();
    const Vec z0 = to_eigen(e.point);
    const auto n = z0.size();
    std::mt19937_64 rng(e.seed ^ kSampleStream ^ 0x9E3779B97F4A7C15ULL);

    auto free = [&](Eigen::Index j) { return sub.upper()[j] > sub.lower()[j]; };
    auto step = [&](const Vec& z, Eigen::Index j) {
      double h = kFdStep * scale[j];
      if (free(j) && z[j] > 0.0) h = std::min(h, 0.5 * z[j]);
      return h;
    };
    // |analytic - numeric| in scaled units against a floor tied to `magnitude`.
    auto compare = [&](const Vec& analytic, const Vec& numeric, double magnitude,
                       const std::string& what) {
      const double floor = kGradientFloor * std::max(magnitude, 1e-300);
      for (Eigen::Index j = 0; j < n; ++j) {
        const double a = analytic[j] * scale[j], b = numeric[j] * scale[j];
        const double rel = std::abs(a - b) / std::max(std::abs(b), floor);
        tally.check(rel <= kGradientRelTolerance, rel, describe(e.seed, what));
      }
    };

    // The surrogate is first-order exact: its gradient at the expansion point
    // equals the gradient of the true sum energy.
    {
      Vec ga = Vec::Zero(n);
      sub.objective(z0, &ga, nullptr);
      Vec gn = Vec::Zero(n);
      for (Eigen::Index j = 0; j < n; ++j) {
        if (!free(j)) continue;
        const double h = step(z0, j);
        Vec zp = z0, zm = z0;
        zp[j] += h;
        zm[j] -= h;
        gn[j] = (total_energy(s, prof, from_eigen(nk, zp)) -
                 total_energy(s, prof, from_eigen(nk, zm))) / (2.0 * h);
      }
      for (Eigen::Index j = 0; j < n; ++j)
        if (!free(j)) ga[j] = 0.0;
      compare(ga, gn, sp.prox_scale, "objective gradient differs from the true energy");
    }

    // Latency surrogate gradient matches that of B / R(P) at the expansion point.
    for (std::size_t k = 0; k < nk && prof.shared_input > 0.0; ++k) {
      const double p0 = e.point.p_ul[k], b0 = e.point.shared_bits[k];
      const double hp = std::min(kFdStep * s.p_ul_max_w, 0.5 * p0);
      const double hb = kFdStep * prof.shared_input;
      auto exact = [&](double p, double b) { return b / uplink_rate(s, k, p); };
      auto surr = [&](double p, double b) { return surrogate_latency(s, prof, p, b, sp, k); };
      const double tmax = s.latency_budget_s;
      const double de[2] = {(exact(p0 + hp, b0) - exact(p0 - hp, b0)) / (2 * hp) * s.p_ul_max_w,
                            (exact(p0, b0 + hb) - exact(p0, b0 - hb)) / (2 * hb) * prof.shared_input};
      const double ds[2] = {(surr(p0 + hp, b0) - surr(p0 - hp, b0)) / (2 * hp) * s.p_ul_max_w,
                            (surr(p0, b0 + hb) - surr(p0, b0 - hb)) / (2 * hb) * prof.shared_input};
      for (int c = 0; c < 2; ++c) {
        const double rel = std::abs(ds[c] - de[c]) / std::max(std::abs(de[c]), kGradientFloor * tmax);
        tally.check(rel <= kGradientRelTolerance, rel,
                    describe(e.seed, "latency surrogate gradient differs from B/R(P)"));
      }
    }

    // Analytic derivatives of the subproblem functions at random points.
    for (int i = 0; i < config.gradient_points; ++i) {
      const Vec z = perturbed(sub, z0, 0.1, rng);
      auto check_function = [&](auto&& fn, const std::string& what) {
        Vec ga = Vec::Zero(n);
        Mat ha = Mat::Zero(n, n);
        const double value = fn(z, &ga, &ha);
        Vec gn = Vec::Zero(n);
        Mat hn = Mat::Zero(n, n);
        for (Eigen::Index j = 0; j < n; ++j) {
          if (!free(j)) {
            ga[j] = 0.0;
            continue;
          }
          const double h = step(z, j);
          Vec zp = z, zm = z;
          zp[j] += h;
          zm[j] -= h;
          Vec gp = Vec::Zero(n), gm = Vec::Zero(n);
          gn[j] = (fn(zp, &gp, nullptr) - fn(zm, &gm, nullptr)) / (2.0 * h);
          hn.col(j) = (gp - gm) / (2.0 * h);
        }
        const double mag = std::max(std::abs(value), ga.cwiseProduct(scale).lpNorm<Eigen::Infinity>());
        compare(ga, gn, mag, what + " gradient");
        // Hessian in scaled units, rows and columns of fixed coordinates dropped.
        const Mat sa = scale.asDiagonal() * ha * scale.asDiagonal();
        const Mat sn = scale.asDiagonal() * hn * scale.asDiagonal();
        double hfloor = 0.0;
        for (Eigen::Index j = 0; j < n; ++j)
          if (free(j)) hfloor = std::max(hfloor, sn.col(j).lpNorm<Eigen::Infinity>());
        hfloor = std::max(kGradientFloor * mag, 1e-3 * hfloor);
        for (Eigen::Index j = 0; j < n; ++j) {
          if (!free(j)) continue;
          double err = 0.0, ref = 0.0;
          for (Eigen::Index r = 0; r < n; ++r) {
            if (!free(r)) continue;
            err = std::max(err, std::abs(sa(r, j) - sn(r, j)));
            ref = std::max(ref, std::abs(sn(r, j)));
          }
          const double rel = err / std::max(ref, hfloor);
          tally.check(rel <= kHessianRelTolerance, rel, describe(e.seed, what + " Hessian"));
        }
      };
      check_function([&](const Vec& x, Vec* g, Mat* h) { return sub.objective(x, g, h); },
                     "objective");
      for (std::size_t c = 0; c < sub.num_constraints(); ++c)
        check_function([&](const Vec& x, Vec* g, Mat* h) { return sub.constraint(c, x, g, h); },
                       sub.constraint_name(c));
    }
  }
  std::ostringstream os;
  os << points.size() << " expansion points";
  return tally.report(Suite::gradient, os.str());
}

SuiteReport oracle_suite(const ValidationConfig& config) {
  config.validate();
  Tally tally;
  const TaskProfile profile = base_profile(default_workload(1), 1, config.eta);
  int found = 0;
  double worst_ratio = 0.0;
  for (int d = 0; found < config.oracle_drops && d < kDrawAttempts * config.oracle_drops; ++d) {
    DropParams p = config.params;
    p.num_users = 1;
    p.seed = drop_seed(config.seed ^ kOracleStream, static_cast<std::uint64_t>(d));
    const Scenario s = generate_drop(p);
    if (!find_initial_point(s, profile)) continue;
    ++found;
    const SolveResult sca = sca_solve(s, profile, config.sca);
    const OracleResult grid = grid_search(s, profile, GridSpec::for_users(1));
    const bool sca_ok = sca.feasibility.feasible;
    if (grid.status == OracleStatus::no_feasible_point) {
      tally.check(sca_ok, 0.0, describe(p.seed, "SCA infeasible"));
      continue;
    }
    const double ratio = sca_ok ? sca.objective / grid.objective : kUnbounded;
    worst_ratio = std::max(worst_ratio, ratio);
    std::ostringstream what;
    what << "SCA/grid ratio " << ratio;
    tally.check(ratio <= config.oracle_ratio, ratio, describe(p.seed, what.str()));
  }
  std::ostringstream os;
  os << found << " one-user drops, worst SCA/grid ratio " << worst_ratio;
  return tally.report(Suite::oracle, os.str());
}

std::vector<SuiteReport> run_validation(const ValidationConfig& config) {
  config.validate();
  std::vector<SuiteReport> out;
  for (Suite s : config.suites) {
    switch (s) {
      case Suite::surrogate: out.push_back(surrogate_suite(config)); break;
      case Suite::gradient: out.push_back(gradient_suite(config)); break;
      case Suite::oracle: out.push_back(oracle_suite(config)); break;
    }
  }
  return out;
}

}  // namespace mecsca
