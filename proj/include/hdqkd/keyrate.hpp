#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "hdqkd/sampling_bounds.hpp"
#include "hdqkd/types.hpp"

namespace hdqkd {

// Abort thresholds: row j in {0..d}, column c-1 for symbols c in {1..d-1};
// the c = 0 fraction is implied by row completion.
struct NoiseThresholds {
  PrimeDimension d;
  Eigen::MatrixXd qhat;  // (d+1) x (d-1)

  NoiseThresholds(PrimeDimension dim, Eigen::MatrixXd thresholds);

  double entry(int j, int c) const { return qhat(j, c - 1); }  // c >= 1
};

// Depolarizing-style symmetric thresholds, Qhat_c^j = q_total / (d-1).
NoiseThresholds symmetric_thresholds(PrimeDimension d, double q_total);

struct LeakageModel {
  enum class Mode { shannon, fixed };
  Mode mode = Mode::shannon;
  double efficiency = 1.0;   // f >= 1 (shannon mode)
  double fixed_bits = 0.0;   // fixed mode
  double eps_cor = 1.0;      // correctness-hash parameter, in (0,1]

  static LeakageModel shannon(double f = 1.0, double eps_correct = 1.0);
  static LeakageModel fixed(double bits);
};

struct KeyRateResult {
  std::int64_t key_length_bits = 0;  // ell
  double rate = 0.0;                 // ell / N
  std::int64_t total_rounds = 0;     // N
  std::int64_t test_rounds = 0;      // m used for this result
  std::int64_t m_opt = 0;            // optimizer's choice (== test_rounds here)
  double delta_used = 0.0;
  double c_used = 0.0;
  double beta_used = 0.0;
  double gamma_bits = 0.0;           // min-entropy bound
  double leak_bits = 0.0;
  double achieved_security = 0.0;    // eps + 4 sqrt(eps_delta^cl), clamped
  double achieved_security_log = 0.0;
  Eigen::MatrixXd lambda;            // d x d Bell weights (counts over n)
  std::vector<std::string> flags;
};

// Worst-case inflation before abort: Q_c^j = min(Qhat_c^j + delta, 1) for
// c >= 1, row completed by Q_0^j; a row whose c >= 1 mass exceeds 1 is
// renormalized and flagged. Returned matrix is (d+1) x d, rows summing to 1.
Eigen::MatrixXd worst_case_statistics(const NoiseThresholds& qhat, double delta,
                                      std::vector<std::string>* flags = nullptr);

// invert_statistics plus the feasibility policy: negatives clamped to zero
// (flagged) and the matrix rescaled so its entries sum to n. Throws
// infeasible_statistics when pre-clamp negativity exceeds
// negativity_threshold * n.
Eigen::MatrixXd bell_weights_from_statistics(
    const Eigen::MatrixXd& q, double n, PrimeDimension d,
    std::vector<std::string>* flags = nullptr,
    double negativity_threshold = 0.05);

// gamma = n log2 d - log2(d) * sum_alpha n_alpha h_d(x_alpha)  (bits), with
// x_alpha = (sum_{beta>=1} lambda_alpha^beta) / n_alpha capped at (d-1)/d;
// above the cap the per-row phase count is already bounded by d^{n_alpha}.
double min_entropy_bound(const Eigen::MatrixXd& lambda, PrimeDimension d,
                         std::vector<std::string>* flags = nullptr);

// Error-correction leakage in bits. Shannon mode: f * n * H(e) +
// log2(1/eps_cor), where e is the basis-0 error distribution implied by the
// thresholds. Fixed mode: the configured bit count.
double leak_ec(const LeakageModel& model, double n, const NoiseThresholds& qhat);

// ell = max(0, floor(gamma - leak - 2 log2(1/eps))).
std::int64_t key_length(double gamma_bits, double leak_bits, double eps);

// Full pipeline at a fixed test size m: delta_min, worst-case statistics,
// Bell weights, min entropy, leakage, key length, achieved security.
KeyRateResult evaluate(const NoiseThresholds& qhat, std::int64_t n_total,
                       std::int64_t m, const SecurityTargets& targets,
                       const LeakageModel& leak,
                       std::optional<double> c = std::nullopt,
                       std::optional<double> beta = std::nullopt);

// Grid search over m: geometric coarse pass {ceil(N/2^k)} followed by two
// 32-point linear refinements around the incumbent. Grid points evaluate in
// parallel; reduction is deterministic (max rate, ties to smaller m).
KeyRateResult optimize_m(const NoiseThresholds& qhat, std::int64_t n_total,
                         const SecurityTargets& targets, const LeakageModel& leak,
                         int threads = 1,
                         std::optional<double> c = std::nullopt,
                         std::optional<double> beta = std::nullopt);

// N -> infinity limit (delta -> 0, m/N -> 0, no finite-size penalties):
// per-symbol min entropy minus per-symbol leakage, clamped at 0.
double asymptotic_rate(const NoiseThresholds& qhat, const LeakageModel& leak);

// Largest symmetric noise with positive asymptotic rate, by bisection.
double asymptotic_noise_tolerance(PrimeDimension d, const LeakageModel& leak,
                                  double tol = 1e-6);

}  // namespace hdqkd
