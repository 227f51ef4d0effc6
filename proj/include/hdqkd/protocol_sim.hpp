#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "hdqkd/keyrate.hpp"
#include "hdqkd/sampling_mc.hpp"
#include "hdqkd/types.hpp"

namespace hdqkd {

// i.i.d. Bell-diagonal channel: probability p(alpha,beta) per round of
// producing the Bell label (alpha,beta).
struct ChannelModel {
  PrimeDimension d;
  Eigen::MatrixXd p;  // d x d, entries >= 0, sum 1

  ChannelModel(PrimeDimension dim, Eigen::MatrixXd probs);
};

// p_0^0 = ((d+1)(1-Q) - 1)/d, all other labels Q/(d(d-1)).
// Infeasible for Q > d/(d+1).
ChannelModel depolarizing_channel(PrimeDimension d, double q_total);

// Channel from explicit Bell weights (normalized internally).
ChannelModel channel_from_lambda(PrimeDimension d, const Eigen::MatrixXd& lambda);

// Per-(j,c) outcome counts of the test stage plus per-basis totals m_j.
struct ObservedStats {
  Eigen::MatrixXd counts;               // (d+1) x d
  std::vector<std::int64_t> basis_counts;  // m_j, j = 0..d

  // w(q^j_c); rows with m_j = 0 are left at zero.
  Eigen::MatrixXd frequencies() const;
};

struct TestStage {
  SubsetDraw draw;
  std::vector<BellLabel> test_labels;  // per test position
  std::vector<int> outcomes;           // POVM symbol per test position
  ObservedStats observed;
};

// Draws i.i.d. labels for the tested rounds (per-round derived streams, so
// the same rounds get the same labels for any worker count), draws (t, s),
// and classifies each test round through its basis's outcome map.
TestStage sample_round_outcomes(const ChannelModel& channel, std::int64_t n_total,
                                std::int64_t m, std::uint64_t seed,
                                int threads = 1);

struct AbortDecision {
  bool aborted = false;
  std::vector<std::string> reasons;  // "empty_basis:j" or "noise:j,c,w"
};

// Strict per-(j,c) comparison: abort iff some observed w(q^j_c) > Qhat_c^j,
// or some basis received no test rounds.
AbortDecision abort_check(const ObservedStats& observed,
                          const NoiseThresholds& qhat);

struct SimulationRun {
  std::uint64_t seed = 0;
  std::int64_t total_rounds = 0;
  std::int64_t test_rounds = 0;
  bool aborted = false;
  std::vector<std::string> reasons;
  ObservedStats observed;
  std::optional<KeyRateResult> key;  // present iff not aborted
};

// End-to-end run: sample, abort logic, and (on accept) the key-rate pipeline
// evaluated at the abort thresholds (the security statement is parameterized
// by the thresholds, not by the observed sample).
SimulationRun run_protocol(const ChannelModel& channel, std::int64_t n_total,
                           std::int64_t m, const NoiseThresholds& qhat,
                           const SecurityTargets& targets,
                           const LeakageModel& leak, std::uint64_t seed,
                           int threads = 1);

}  // namespace hdqkd
