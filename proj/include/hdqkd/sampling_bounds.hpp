#pragma once

#include <cstdint>
#include <optional>

#include "hdqkd/types.hpp"

namespace hdqkd {

// Round split of a protocol run: N total systems, m tested, n = N - m keyed.
struct SamplingGeometry {
  std::int64_t total_rounds;  // N
  std::int64_t test_rounds;   // m
  PrimeDimension d;

  SamplingGeometry(std::int64_t n_total, std::int64_t m_test, PrimeDimension dim)
      : total_rounds(n_total), test_rounds(m_test), d(dim) {
    if (m_test < 1 || m_test >= n_total)
      throw std::invalid_argument("SamplingGeometry: need 1 <= m < N");
  }

  std::int64_t key_rounds() const noexcept { return total_rounds - test_rounds; }
};

// Slack parameters of the three-term sampling bound: total slack delta,
// split ratio c with delta_1 = c * delta, and subset-size slack beta.
struct ConfidenceParams {
  double delta;
  double split_c;
  double beta;
};

struct SecurityTargets {
  double eps;      // smoothing / privacy-amplification parameter
  double eps_sec;  // overall security target

  SecurityTargets(double e, double e_sec) : eps(e), eps_sec(e_sec) {
    if (!(e > 0.0 && e < e_sec && e_sec < 1.0))
      throw std::invalid_argument("SecurityTargets: need 0 < eps < eps_sec < 1");
  }
};

// Default subset-size slack, beta = 1/d^2.
double default_beta(PrimeDimension d);

// ln of the basic two-sided sampling bound  eps_0 = 2 exp(-delta^2 m N / (N+2)),
// valid for 1 <= m <= N/2.
double basic_sampling_error_log(double delta, std::int64_t m, std::int64_t n_total);

// ln of the per-(j,c) three-term bound
//   2 [ exp(-(delta-delta1)^2 mN/(N+2))
//     + exp(-delta1^2 m^2 (1/(d+1)-beta)/(m+2))
//     + exp(-2 beta^2 m) ],  delta1 = c * delta.
double simple_strategy_error_log(const SamplingGeometry& geom,
                                 const ConfidenceParams& params);

// Union bound over the (d+1)(d-1) tested (j,c) pairs: adds ln((d+1)(d-1)).
double union_error_log(double simple_log_eps, PrimeDimension d);

// Crossover split ratio: the first exponential term is smaller than the
// second exactly when c < c_gamma.
double c_gamma(const SamplingGeometry& geom,
               std::optional<double> beta = std::nullopt);

// chi_d = ln( (eps_sec - eps)^2 / (96 (d+1)(d-1)) ).
double chi_d(const SecurityTargets& targets, PrimeDimension d);

struct DeltaMin {
  double delta;
  bool first_branch;  // true: c >= c_gamma (term X dominates)
  double c_used;
  double beta_used;
  double chi;
};

// Smallest slack achieving the security target via the dominating-term
// inversion; case split on c >= c_gamma vs c < c_gamma.
DeltaMin delta_min(const SecurityTargets& targets, const SamplingGeometry& geom,
                   std::optional<double> c = std::nullopt,
                   std::optional<double> beta = std::nullopt);

struct ConsistencyReport {
  DeltaMin dm;
  double term_x_log;            // ln exp(-(delta-delta1)^2 mN/(N+2)) at delta_min
  double term_y_log;
  double term_z_log;            // delta-independent term
  double simple_log;            // ln eps_delta^{j,c} at delta_min
  double union_log;             // ln eps_delta^{cl}
  double achieved_log;          // ln( eps + 4 sqrt(eps_delta^{cl}) )
  double achieved;              // linear, clamped to [0,1]
  double achieved_loose;        // eps + 4 (d+1)(d-1) sqrt(eps^{j,c}), as printed
  double slack;                 // eps_sec - achieved
  bool within_target;           // achieved <= eps_sec
  bool third_term_dominated;    // Z <= max(X, Y) at delta_min
  bool beta_condition_ok;       // beta < 1/2 - 1/(d+1)
};

// Evaluates the achieved security eps + 4 sqrt((d+1)(d-1) eps^{j,c}(delta_min))
// and reports whether it meets eps_sec, the slack, and whether the
// delta-independent third term is dominated by the other two.
ConsistencyReport verify_consistency(const SecurityTargets& targets,
                                     const SamplingGeometry& geom,
                                     std::optional<double> c = std::nullopt,
                                     std::optional<double> beta = std::nullopt);

}  // namespace hdqkd
