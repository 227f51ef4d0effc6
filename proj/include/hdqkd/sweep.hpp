#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "hdqkd/keyrate.hpp"

namespace hdqkd {

// Bad or inconsistent scenario configuration (CLI exit code 2).
class config_error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A batch scenario: one noise specification, one sweep axis, one m policy.
struct ScenarioConfig {
  int d = 2;
  double eps = 1e-14;
  double eps_sec = 1e-12;

  enum class NoiseKind { symmetric, matrix, asymmetric };
  NoiseKind noise_kind = NoiseKind::symmetric;
  double symmetric_q = 0.0;          // symmetric: total noise Q
  Eigen::MatrixXd qhat_matrix;       // matrix: explicit (d+1) x (d-1)
  int asym_basis = 0;                // asymmetric: basis with varying noise
  double asym_others = 0.1;          //   total noise in every other basis
  double asym_value = 0.1;           //   noise in the varying basis (N-axis)

  LeakageModel leak = LeakageModel::shannon();

  enum class Axis { signals, noise };
  Axis axis = Axis::signals;
  std::vector<double> axis_values;
  std::int64_t n_signals = 0;        // required for noise-axis sweeps

  bool optimize_m_policy = true;
  std::int64_t m_fixed = 0;

  std::uint64_t seed = 0;
  std::optional<double> c;
  std::optional<double> beta;
};

// Parses a scenario from JSON text / file; throws config_error with a field
// diagnostic on malformed input.
ScenarioConfig parse_scenario(const std::string& json_text);
ScenarioConfig parse_scenario_file(const std::string& path);

// Thresholds for one axis point under the configured noise model.
NoiseThresholds thresholds_for_point(const ScenarioConfig& config,
                                     double axis_value);

struct SweepRow {
  double axis = 0.0;
  double rate = 0.0;
  std::int64_t ell = 0;
  std::int64_t m_opt = 0;
  double delta = 0.0;
  std::string flags;  // '|'-joined keyrate flags
};

// One key-rate evaluation per axis point, points evaluated in parallel but
// emitted in axis order. Per-point infeasibility becomes a flagged zero row.
std::vector<SweepRow> run_sweep(const ScenarioConfig& config, int threads = 1);

std::string sweep_csv(const std::vector<SweepRow>& rows);

struct IncreasingInterval {
  double axis_from = 0.0;
  double axis_to = 0.0;
  double rate_from = 0.0;
  double rate_to = 0.0;
};

// Axis intervals on which the rate strictly increases (meaningful for
// noise-axis sweeps, where a monotone decrease is the naive expectation).
std::vector<IncreasingInterval> detect_nonmonotonicity(
    const std::vector<SweepRow>& rows);

// Deterministic float formatting shared by all CSV/JSON emitters.
std::string format_double(double v);

}  // namespace hdqkd
