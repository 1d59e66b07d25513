// Copyright 2026 The mecsca Authors
// SPDX-License-Identifier: Apache-2.0

#include "mecsca/surrogate.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include "json.hpp"

namespace mecsca {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Lower clamp applied to both factors when balancing the product split, so a
// user holding no shared bits still gets a finite factor scale.
constexpr double kSplitFloor = 1e-3;

// Product-splitting bound of user k's shared-uplink time, in units of T_max.
// With b = B/B_S and w = B_S u(P)/T_max we have g/T_max = b*w = x1*x2 for
// x1 = s*b, x2 = w/s and any s > 0; s balances the two factors at the
// expansion point, which keeps the bound's curvature comparable in both.
struct SplitLatency {
  double bs = 0.0;     // B_S^I
  double tmax = 0.0;
  double s = 1.0;
  double p0 = 0.0;
  double x1_0 = 0.0, x2_0 = 0.0, dx2_0 = 0.0;
  double g0 = 0.0;     // true time at the expansion point, s

  SplitLatency(const RateCurve& curve, double shared_input, double latency_budget, double p_ul0,
               double b0_bits)
      : bs(shared_input), tmax(latency_budget), p0(p_ul0) {
    const double u0 = curve.inv(p0);
    const double b0 = b0_bits / bs;
    const double w0 = bs * u0 / tmax;
    s = std::sqrt(std::max(w0, kSplitFloor) / std::max(b0, kSplitFloor));
    x1_0 = s * b0;
    x2_0 = w0 / s;
    dx2_0 = bs * curve.d_inv(p0) / (tmax * s);
    g0 = b0_bits == 0.0 ? 0.0 : b0_bits * u0;
  }

  // Normalized surrogate minus the normalized true value at the center,
  // written without the cancelling quadratic terms.
  double excess(double d1, double d2, double dp) const {
    return x2_0 * d1 + x1_0 * d2 + x2_0 * (d2 - dx2_0 * dp) + 0.5 * (d1 + d2) * (d1 + d2);
  }

  double seconds(const RateCurve& curve, double p, double bits) const {
    const double d1 = s * bits / bs - x1_0;
    const double d2 = bs * curve.inv(p) / (tmax * s) - x2_0;
    return g0 + tmax * excess(d1, d2, p - p0);
  }
};

double prox_term(double weight, double scale, double value, double center, Vec* grad,
                 Mat* hess, int idx, double prox_scale) {
  const double d = (value - center) / scale;
  if (grad != nullptr) (*grad)[idx] += prox_scale * 2.0 * weight * d / scale;
  if (hess != nullptr) (*hess)(idx, idx) += prox_scale * 2.0 * weight / (scale * scale);
  return prox_scale * weight * d * d;
}

}  // namespace

void ProximalWeights::validate() const {
  for (double t : {p_ul, shared_bits, cpu_frac, cpu_frac_shared, p_dl, p_multicast, t_shared_ul,
                   t_shared_dl}) {
    if (!(t > 0.0) || !std::isfinite(t))
      throw std::invalid_argument("proximal weights must be strictly positive");
  }
}

double ProximalWeights::min() const {
  return std::min({p_ul, shared_bits, cpu_frac, cpu_frac_shared, p_dl, p_multicast, t_shared_ul,
                   t_shared_dl});
}

double RateCurve::rate(double p) const {
  return bandwidth * std::log1p(gain_per_watt * p) / std::numbers::ln2;
}

double RateCurve::inv(double p) const {
  if (!(p > 0.0)) throw std::domain_error("per-bit time needs strictly positive power");
  return 1.0 / rate(p);
}

double RateCurve::d_inv(double p) const {
  const double r = rate(p);
  const double dr = bandwidth * gain_per_watt / ((1.0 + gain_per_watt * p) * std::numbers::ln2);
  return -dr / (r * r);
}

double RateCurve::dd_inv(double p) const {
  const double r = rate(p);
  const double q = 1.0 + gain_per_watt * p;
  const double dr = bandwidth * gain_per_watt / (q * std::numbers::ln2);
  const double ddr = -bandwidth * gain_per_watt * gain_per_watt / (q * q * std::numbers::ln2);
  return (2.0 * dr * dr - r * ddr) / (r * r * r);
}

RateCurve uplink_curve(const Scenario& s, std::size_t k) {
  const double w = s.uplink_bandwidth_hz / static_cast<double>(s.num_users());
  return {w, s.channel_gain[k] / (s.noise_psd_w_per_hz * w)};
}

RateCurve unicast_curve(const Scenario& s, std::size_t k) {
  const double w = s.downlink_bandwidth_hz / static_cast<double>(s.num_users());
  return {w, s.channel_gain[k] / (s.noise_psd_w_per_hz * w)};
}

RateCurve multicast_curve(const Scenario& s, std::size_t k) {
  const double w = s.downlink_bandwidth_hz;
  return {w, s.channel_gain[k] / (s.noise_psd_w_per_hz * w)};
}

std::vector<double> normalization_scales(const Scenario& scenario, const TaskProfile& profile) {
  const std::size_t k = scenario.num_users();
  const VariableLayout lay(k);
  std::vector<double> sc(lay.size(), 1.0);
  const double bs = profile.shared_input > 0.0 ? profile.shared_input : 1.0;
  for (std::size_t i = 0; i < k; ++i) {
    sc[lay.p_ul(i)] = scenario.p_ul_max_w;
    sc[lay.shared_bits(i)] = bs;
    sc[lay.p_dl(i)] = scenario.p_dl_max_w;
  }
  sc[lay.p_multicast()] = scenario.p_dl_max_w;
  sc[lay.t_shared_ul()] = scenario.latency_budget_s;
  sc[lay.t_shared_dl()] = scenario.latency_budget_s;
  return sc;
}

double normalized_distance_sq(const Scenario& scenario, const TaskProfile& profile,
                              const Allocation& a, const Allocation& b) {
  const std::vector<double> sc = normalization_scales(scenario, profile);
  const std::vector<double> va = a.to_vector(), vb = b.to_vector();
  if (va.size() != sc.size() || vb.size() != sc.size())
    throw std::invalid_argument("allocation does not match scenario user count");
  double acc = 0.0;
  for (std::size_t i = 0; i < sc.size(); ++i) {
    const double d = (vb[i] - va[i]) / sc[i];
    acc += d * d;
  }
  return acc;
}

SurrogatePoint make_surrogate_point(const Scenario& scenario, const TaskProfile& profile,
                                    const Allocation& expansion, const ProximalWeights& weights) {
  scenario.validate();
  profile.validate_against(scenario);
  weights.validate();
  const FeasibilityReport rep = check_feasibility(scenario, profile, expansion);
  if (!rep.feasible)
    throw std::invalid_argument("expansion point is not feasible: " + rep.summary());
  for (std::size_t k = 0; k < scenario.num_users(); ++k) {
    const bool may_transmit = profile.separate_input(k) > 0.0 || profile.shared_input > 0.0;
    if (may_transmit && !(expansion.p_ul[k] > 0.0))
      throw std::invalid_argument("expansion point needs positive uplink power for every sender");
  }
  SurrogatePoint point{expansion, weights, 1.0};
  const double e = total_energy(scenario, profile, expansion);
  if (std::isfinite(e) && e > 0.0) point.prox_scale = e;
  return point;
}

double surrogate_uplink_energy(const Scenario& scenario, const TaskProfile& profile,
                               const Allocation& z, const SurrogatePoint& point, std::size_t k,
                               SurrogateMutation mutation) {
  const RateCurve curve = uplink_curve(scenario, k);
  const Allocation& v = point.expansion;
  const double sep = profile.separate_input(k);
  const double p = z.p_ul[k], b = z.shared_bits[k];
  const double p0 = v.p_ul[k], b0 = v.shared_bits[k];
  if (!(p > 0.0) && (sep > 0.0 || b > 0.0 || b0 > 0.0))
    throw std::domain_error("surrogate uplink energy needs strictly positive power");

  double value = scenario.energy_per_bit_ul[k] * (b + sep);
  if (b0 + sep > 0.0 || b > 0.0) {
    const double u0 = curve.inv(p0);
    const double flip = mutation == SurrogateMutation::flip_power_linear_term ? -1.0 : 1.0;
    if (b0 + sep > 0.0) value += p0 * (b0 + sep) * curve.inv(p) + flip * p * u0 * (b0 + sep);
    value += p0 * u0 * (b + sep);
  }
  const std::vector<double> sc = normalization_scales(scenario, profile);
  const VariableLayout lay(scenario.num_users());
  const ProximalWeights& w = point.weights;
  value += prox_term(w.p_ul, sc[lay.p_ul(k)], p, p0, nullptr, nullptr, 0, point.prox_scale);
  value += prox_term(w.shared_bits, sc[lay.shared_bits(k)], b, b0, nullptr, nullptr, 0,
                     point.prox_scale);
  value += prox_term(w.cpu_frac, 1.0, z.cpu_frac[k], v.cpu_frac[k], nullptr, nullptr, 0,
                     point.prox_scale);
  value += prox_term(w.p_dl, sc[lay.p_dl(k)], z.p_dl[k], v.p_dl[k], nullptr, nullptr, 0,
                     point.prox_scale);
  return value;
}

double surrogate_latency(const Scenario& scenario, const TaskProfile& profile, double p_ul,
                         double shared_bits, const SurrogatePoint& point, std::size_t k) {
  if (!(p_ul > 0.0)) throw std::domain_error("surrogate latency needs strictly positive power");
  if (profile.shared_input == 0.0) return 0.0;
  const RateCurve curve = uplink_curve(scenario, k);
  const SplitLatency split(curve, profile.shared_input, scenario.latency_budget_s,
                           point.expansion.p_ul[k], point.expansion.shared_bits[k]);
  return split.seconds(curve, p_ul, shared_bits);
}

ConvexSubproblem::ConvexSubproblem(const Scenario& scenario, const TaskProfile& profile,
                                   SurrogatePoint point, SurrogateMutation mutation)
    : scenario_(scenario),
      profile_(profile),
      point_(std::move(point)),
      mutation_(mutation),
      layout_(scenario.num_users()) {
  const std::size_t nk = scenario_.num_users();
  const auto n = static_cast<Eigen::Index>(layout_.size());
  if (point_.expansion.num_users() != nk)
    throw std::invalid_argument("expansion point does not match scenario user count");
  for (std::size_t k = 0; k < nk; ++k) {
    ul_.push_back(uplink_curve(scenario_, k));
    dl_.push_back(unicast_curve(scenario_, k));
    mc_.push_back(multicast_curve(scenario_, k));
  }

  const std::vector<double> sc = normalization_scales(scenario_, profile_);
  scale_ = Eigen::Map<const Vec>(sc.data(), n);
  const std::vector<double> c = point_.expansion.to_vector();
  center_ = Eigen::Map<const Vec>(c.data(), n);

  const ProximalWeights& w = point_.weights;
  prox_diag_.resize(n);
  lower_ = Vec::Zero(n);
  upper_.resize(n);
  const double bs = profile_.shared_input;
  for (std::size_t k = 0; k < nk; ++k) {
    prox_diag_[layout_.p_ul(k)] = w.p_ul;
    prox_diag_[layout_.shared_bits(k)] = w.shared_bits;
    prox_diag_[layout_.cpu_frac(k)] = w.cpu_frac;
    prox_diag_[layout_.p_dl(k)] = w.p_dl;
    upper_[layout_.p_ul(k)] = scenario_.p_ul_max_w;
    upper_[layout_.shared_bits(k)] = bs;
    upper_[layout_.cpu_frac(k)] = 1.0;
    upper_[layout_.p_dl(k)] = scenario_.p_dl_max_w;
  }
  prox_diag_[layout_.cpu_frac_shared()] = w.cpu_frac_shared;
  prox_diag_[layout_.p_multicast()] = w.p_multicast;
  prox_diag_[layout_.t_shared_ul()] = w.t_shared_ul;
  prox_diag_[layout_.t_shared_dl()] = w.t_shared_dl;
  upper_[layout_.cpu_frac_shared()] = 1.0;
  upper_[layout_.p_multicast()] = scenario_.p_dl_max_w;
  upper_[layout_.t_shared_ul()] = kUnbounded;
  upper_[layout_.t_shared_dl()] = kUnbounded;

  LinearRow cpu;
  LinearRow bs_power;
  for (std::size_t k = 0; k < nk; ++k) {
    cpu.terms.emplace_back(layout_.cpu_frac(k), 1.0);
    bs_power.terms.emplace_back(layout_.p_dl(k), 1.0 / scenario_.p_dl_max_w);
  }
  cpu.rhs = 1.0;
  bs_power.rhs = 1.0;
  linear_ = {cpu, bs_power};
  if (bs > 0.0) {
    has_equality_ = true;
    for (std::size_t k = 0; k < nk; ++k) equality_.terms.emplace_back(layout_.shared_bits(k), 1.0);
    equality_.rhs = bs;
  }

  for (std::size_t k = 0; k < nk; ++k) {
    constraints_.push_back({Kind::latency, k,
                            {layout_.p_ul(k), layout_.cpu_frac(k), layout_.cpu_frac_shared(),
                             layout_.p_dl(k), layout_.t_shared_ul(), layout_.t_shared_dl()}});
  }
  if (bs > 0.0) {
    for (std::size_t k = 0; k < nk; ++k)
      constraints_.push_back({Kind::shared_uplink, k,
                              {layout_.p_ul(k), layout_.shared_bits(k), layout_.t_shared_ul()}});
  }
  if (profile_.shared_output > 0.0) {
    for (std::size_t k = 0; k < nk; ++k)
      constraints_.push_back(
          {Kind::multicast, k, {layout_.p_multicast(), layout_.t_shared_dl()}});
  }
}

double ConvexSubproblem::uplink_term(std::size_t k, const Vec& z, Vec* grad, Mat* hess) const {
  const int ip = layout_.p_ul(k), ib = layout_.shared_bits(k);
  const double sep = profile_.separate_input(k);
  const double l = scenario_.energy_per_bit_ul[k];
  const double p = z[ip], b = z[ib];
  const double p0 = center_[ip], b0 = center_[ib];
  double value = l * (b + sep);
  if (grad != nullptr) (*grad)[ib] += l;
  if (b0 + sep == 0.0 && profile_.shared_input == 0.0) return value;

  const RateCurve& curve = ul_[k];
  const double u0 = curve.inv(p0);
  const double flip = mutation_ == SurrogateMutation::flip_power_linear_term ? -1.0 : 1.0;
  const double c1 = p0 * (b0 + sep);
  value += p0 * u0 * (b + sep);
  if (grad != nullptr) (*grad)[ib] += p0 * u0;
  if (c1 > 0.0) {
    if (!(p > 0.0)) return kInf;
    value += c1 * curve.inv(p) + flip * p * u0 * (b0 + sep);
    if (grad != nullptr) (*grad)[ip] += c1 * curve.d_inv(p) + flip * u0 * (b0 + sep);
    if (hess != nullptr) (*hess)(ip, ip) += c1 * curve.dd_inv(p);
  }
  return value;
}

double ConvexSubproblem::objective(const Vec& z, Vec* grad, Mat* hess) const {
  double value = 0.0;
  for (std::size_t k = 0; k < scenario_.num_users(); ++k) {
    value += uplink_term(k, z, grad, hess);
    const double ldl = scenario_.rx_power_dl[k];
    const double sep_out = profile_.separate_output(k);
    if (sep_out > 0.0 && ldl > 0.0) {
      const int i = layout_.p_dl(k);
      if (!(z[i] > 0.0)) return kInf;
      value += ldl * sep_out * dl_[k].inv(z[i]);
      if (grad != nullptr) (*grad)[i] += ldl * sep_out * dl_[k].d_inv(z[i]);
      if (hess != nullptr) (*hess)(i, i) += ldl * sep_out * dl_[k].dd_inv(z[i]);
    }
    if (profile_.shared_output > 0.0 && ldl > 0.0) {
      const int i = layout_.p_multicast();
      if (!(z[i] > 0.0)) return kInf;
      value += ldl * profile_.shared_output * mc_[k].inv(z[i]);
      if (grad != nullptr) (*grad)[i] += ldl * profile_.shared_output * mc_[k].d_inv(z[i]);
      if (hess != nullptr) (*hess)(i, i) += ldl * profile_.shared_output * mc_[k].dd_inv(z[i]);
    }
  }
  for (Eigen::Index j = 0; j < z.size(); ++j)
    value += prox_term(prox_diag_[j], scale_[j], z[j], center_[j], grad, hess,
                       static_cast<int>(j), point_.prox_scale);
  return value;
}

double ConvexSubproblem::constraint(std::size_t i, const Vec& z, Vec* grad, Mat* hess) const {
  const ConstraintInfo& info = constraints_[i];
  const std::size_t k = info.user;
  const double tmax = scenario_.latency_budget_s;
  switch (info.kind) {
    case Kind::latency: {
      const double fc = scenario_.cloudlet_capacity_cps;
      double seconds = z[layout_.t_shared_ul()] + z[layout_.t_shared_dl()];
      if (grad != nullptr) {
        (*grad)[layout_.t_shared_ul()] += 1.0 / tmax;
        (*grad)[layout_.t_shared_dl()] += 1.0 / tmax;
      }
      // bits (or cycles) times a convex per-unit time 1/x or 1/R(x)
      auto add_rate_term = [&](double amount, int idx, const RateCurve& curve) {
        if (amount == 0.0) return true;
        const double x = z[idx];
        if (!(x > 0.0)) return false;
        seconds += amount * curve.inv(x);
        if (grad != nullptr) (*grad)[idx] += amount * curve.d_inv(x) / tmax;
        if (hess != nullptr) (*hess)(idx, idx) += amount * curve.dd_inv(x) / tmax;
        return true;
      };
      auto add_cpu_term = [&](double cycles, int idx) {
        if (cycles == 0.0) return true;
        const double f = z[idx];
        if (!(f > 0.0)) return false;
        seconds += cycles / (f * fc);
        if (grad != nullptr) (*grad)[idx] -= cycles / (f * f * fc * tmax);
        if (hess != nullptr) (*hess)(idx, idx) += 2.0 * cycles / (f * f * f * fc * tmax);
        return true;
      };
      const bool ok = add_rate_term(profile_.separate_input(k), layout_.p_ul(k), ul_[k]) &&
                      add_cpu_term(profile_.separate_cycles(k), layout_.cpu_frac(k)) &&
                      add_cpu_term(profile_.shared_cycles, layout_.cpu_frac_shared()) &&
                      add_rate_term(profile_.separate_output(k), layout_.p_dl(k), dl_[k]);
      if (!ok) return kInf;
      return seconds / tmax - 1.0;
    }
    case Kind::shared_uplink: {
      const int ip = layout_.p_ul(k), ib = layout_.shared_bits(k), it = layout_.t_shared_ul();
      const double p = z[ip];
      if (!(p > 0.0)) return kInf;
      const SplitLatency split(ul_[k], profile_.shared_input, tmax, center_[ip], center_[ib]);
      const double bs = profile_.shared_input;
      const double x2p = bs * ul_[k].d_inv(p) / (tmax * split.s);
      const double d1 = split.s * z[ib] / bs - split.x1_0;
      const double d2 = bs * ul_[k].inv(p) / (tmax * split.s) - split.x2_0;
      const double value = split.g0 / tmax + split.excess(d1, d2, p - split.p0) - z[it] / tmax;
      if (grad != nullptr) {
        const double sum = split.x1_0 + split.x2_0 + d1 + d2;
        (*grad)[ib] += (split.x2_0 + d1 + d2) * split.s / bs;
        (*grad)[ip] += sum * x2p - split.x2_0 * split.dx2_0;
        (*grad)[it] -= 1.0 / tmax;
        if (hess != nullptr) {
          const double x2pp = bs * ul_[k].dd_inv(p) / (tmax * split.s);
          const double db = split.s / bs;
          (*hess)(ib, ib) += db * db;
          (*hess)(ib, ip) += db * x2p;
          (*hess)(ip, ib) += db * x2p;
          (*hess)(ip, ip) += x2p * x2p + sum * x2pp;
        }
      }
      return value;
    }
    case Kind::multicast: {
      const int im = layout_.p_multicast(), it = layout_.t_shared_dl();
      const double p = z[im];
      if (!(p > 0.0)) return kInf;
      const double bo = profile_.shared_output;
      if (grad != nullptr) {
        (*grad)[im] += bo * mc_[k].d_inv(p) / tmax;
        (*grad)[it] -= 1.0 / tmax;
      }
      if (hess != nullptr) (*hess)(im, im) += bo * mc_[k].dd_inv(p) / tmax;
      return (bo * mc_[k].inv(p) - z[it]) / tmax;
    }
  }
  return kInf;
}

std::string ConvexSubproblem::constraint_name(std::size_t i) const {
  const ConstraintInfo& info = constraints_[i];
  const std::string user = std::to_string(info.user);
  switch (info.kind) {
    case Kind::latency: return "latency[" + user + "]";
    case Kind::shared_uplink: return "shared_uplink[" + user + "]";
    case Kind::multicast: return "multicast[" + user + "]";
  }
  return "?";
}

double ConvexSubproblem::offset_at_expansion() const {
  return objective(center_, nullptr, nullptr) -
         total_energy(scenario_, profile_, point_.expansion);
}

std::string ConvexSubproblem::debug_dump(const Allocation& query) const {
  using nlohmann::json;
  const std::vector<double> zq = query.to_vector();
  const Vec z = Eigen::Map<const Vec>(zq.data(), static_cast<Eigen::Index>(zq.size()));
  const auto n = static_cast<Eigen::Index>(dimension());
  Vec g = Vec::Zero(n);
  json out;
  out["query"] = zq;
  out["objective"] = {{"value", objective(z, &g, nullptr)},
                      {"gradient", std::vector<double>(g.data(), g.data() + n)}};
  json cons = json::array();
  for (std::size_t i = 0; i < num_constraints(); ++i) {
    g.setZero();
    const double v = constraint(i, z, &g, nullptr);
    cons.push_back({{"name", constraint_name(i)},
                    {"value", v},
                    {"gradient", std::vector<double>(g.data(), g.data() + n)}});
  }
  out["constraints"] = cons;
  return out.dump(2);
}

}  // namespace mecsca
