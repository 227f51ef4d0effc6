#include "hdqkd/sampling_bounds.hpp"

#include <algorithm>
#include <cmath>

#include "hdqkd/entropy.hpp"

namespace hdqkd {

namespace {

constexpr double kLn2 = 0.69314718055994530942;

// Exponents of the three terms of the per-(j,c) bound, natural log space.
struct Terms {
  double x, y, z;
};

Terms term_exponents(const SamplingGeometry& geom, const ConfidenceParams& p) {
  const double n_total = static_cast<double>(geom.total_rounds);
  const double m = static_cast<double>(geom.test_rounds);
  const double d = static_cast<double>(geom.d.value());
  const double delta1 = p.split_c * p.delta;
  const double delta2 = p.delta - delta1;
  const double kappa = 1.0 / (d + 1.0) - p.beta;
  Terms t;
  t.x = -(delta2 * delta2) * m * n_total / (n_total + 2.0);
  t.y = -(delta1 * delta1) * m * m * kappa / (m + 2.0);
  t.z = -2.0 * p.beta * p.beta * m;
  return t;
}

void check_params(const SamplingGeometry& geom, const ConfidenceParams& p) {
  const double d = static_cast<double>(geom.d.value());
  if (!(p.beta > 0.0 && p.beta < 1.0 / (d + 1.0)))
    throw std::invalid_argument(
        "ConfidenceParams: beta must lie in (0, 1/(d+1))");
  if (!(p.split_c > 0.0 && p.split_c < 1.0))
    throw std::invalid_argument("ConfidenceParams: c must lie in (0,1)");
  if (!(p.delta >= 0.0))
    throw std::invalid_argument("ConfidenceParams: delta must be >= 0");
  if (geom.test_rounds * 2 > geom.total_rounds)
    throw std::invalid_argument(
        "simple_strategy_error: two-sided bound requires m <= N/2");
}

}  // namespace

double default_beta(PrimeDimension d) {
  const double dv = static_cast<double>(d.value());
  return 1.0 / (dv * dv);
}

double basic_sampling_error_log(double delta, std::int64_t m,
                                std::int64_t n_total) {
  if (m < 1 || 2 * m > n_total)
    throw std::invalid_argument(
        "basic_sampling_error: requires 1 <= m <= N/2");
  if (!(delta >= 0.0))
    throw std::invalid_argument("basic_sampling_error: delta must be >= 0");
  const double md = static_cast<double>(m);
  const double nd = static_cast<double>(n_total);
  return kLn2 - delta * delta * md * nd / (nd + 2.0);
}

double simple_strategy_error_log(const SamplingGeometry& geom,
                                 const ConfidenceParams& params) {
  check_params(geom, params);
  const Terms t = term_exponents(geom, params);
  return kLn2 + log_sum_exp(t.x, t.y, t.z);
}

double union_error_log(double simple_log_eps, PrimeDimension d) {
  const double dv = static_cast<double>(d.value());
  return simple_log_eps + std::log((dv + 1.0) * (dv - 1.0));
}

double c_gamma(const SamplingGeometry& geom, std::optional<double> beta) {
  const double n_total = static_cast<double>(geom.total_rounds);
  const double m = static_cast<double>(geom.test_rounds);
  const double d = static_cast<double>(geom.d.value());
  const double b = beta.value_or(default_beta(geom.d));
  const double kappa = 1.0 / (d + 1.0) - b;
  return 1.0 / (std::sqrt(m / (m + 2.0) * (n_total + 2.0) / n_total * kappa) + 1.0);
}

double chi_d(const SecurityTargets& targets, PrimeDimension d) {
  const double dv = static_cast<double>(d.value());
  // computed via logs so that tiny eps_sec - eps stays well-scaled
  return 2.0 * std::log(targets.eps_sec - targets.eps) -
         std::log(96.0 * (dv + 1.0) * (dv - 1.0));
}

DeltaMin delta_min(const SecurityTargets& targets, const SamplingGeometry& geom,
                   std::optional<double> c, std::optional<double> beta) {
  const double n_total = static_cast<double>(geom.total_rounds);
  const double m = static_cast<double>(geom.test_rounds);
  const double d = static_cast<double>(geom.d.value());
  const double b = beta.value_or(default_beta(geom.d));
  if (!(b > 0.0 && b < 1.0 / (d + 1.0)))
    throw std::invalid_argument("delta_min: beta must lie in (0, 1/(d+1))");
  if (geom.test_rounds * 2 > geom.total_rounds)
    throw std::invalid_argument("delta_min: requires m <= N/2");

  const double cg = c_gamma(geom, b);
  const double cu = c.value_or(cg);
  if (!(cu > 0.0 && cu < 1.0))
    throw std::invalid_argument("delta_min: c must lie in (0,1)");

  const double chi = chi_d(targets, geom.d);
  const double kappa = 1.0 / (d + 1.0) - b;

  DeltaMin out;
  out.c_used = cu;
  out.beta_used = b;
  out.chi = chi;
  out.first_branch = cu >= cg;
  if (out.first_branch) {
    out.delta =
        std::sqrt(-chi / ((1.0 - cu) * (1.0 - cu)) * (n_total + 2.0) / (n_total * m));
  } else {
    out.delta = std::sqrt(-chi / (cu * cu) * (m + 2.0) / (m * m) / kappa);
  }
  return out;
}

ConsistencyReport verify_consistency(const SecurityTargets& targets,
                                     const SamplingGeometry& geom,
                                     std::optional<double> c,
                                     std::optional<double> beta) {
  ConsistencyReport rep{};
  rep.dm = delta_min(targets, geom, c, beta);

  const ConfidenceParams params{rep.dm.delta, rep.dm.c_used, rep.dm.beta_used};
  const Terms t = term_exponents(geom, params);
  rep.term_x_log = t.x;
  rep.term_y_log = t.y;
  rep.term_z_log = t.z;
  rep.simple_log = kLn2 + log_sum_exp(t.x, t.y, t.z);
  rep.union_log = union_error_log(rep.simple_log, geom.d);

  // achieved security eps + 4 sqrt(eps_delta^cl), eps_delta^cl from the union
  // bound; the looser variant keeps the multiplicity outside the square root.
  const double pa_log = std::log(4.0) + 0.5 * rep.union_log;
  rep.achieved_log = log_sum_exp(std::log(targets.eps), pa_log);
  rep.achieved = std::clamp(std::exp(rep.achieved_log), 0.0, 1.0);
  const double dv = static_cast<double>(geom.d.value());
  rep.achieved_loose = std::clamp(
      targets.eps + std::exp(std::log(4.0 * (dv + 1.0) * (dv - 1.0)) +
                             0.5 * rep.simple_log),
      0.0, 1.0);
  rep.slack = targets.eps_sec - rep.achieved;
  rep.within_target = rep.achieved <= targets.eps_sec;
  rep.third_term_dominated = t.z <= std::max(t.x, t.y);
  rep.beta_condition_ok = rep.dm.beta_used < 0.5 - 1.0 / (dv + 1.0);
  return rep;
}

}  // namespace hdqkd
