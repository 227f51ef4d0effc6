#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "hdqkd/mub.hpp"
#include "hdqkd/rng.hpp"
#include "hdqkd/types.hpp"

namespace hdqkd {

// A fixed word over the Bell alphabet, the object the classical sampling
// strategy acts on.
struct BellWord {
  PrimeDimension d;
  std::vector<BellLabel> symbols;

  std::int64_t size() const noexcept {
    return static_cast<std::int64_t>(symbols.size());
  }
};

// Adversarial test-word families. The analytic bound holds per word, so fixed
// families suffice for dominance checks; no search over words is attempted.
enum class WordFamily { uniform_class, alternating, blocked, random_imbalanced };

WordFamily word_family_from_name(const std::string& name);
std::string word_family_name(WordFamily family);

BellWord make_test_word(WordFamily family, std::int64_t n_total,
                        PrimeDimension d, std::uint64_t seed);

// One draw of the sampling strategy: a sorted size-m test subset t of
// {0..N-1} plus an i.i.d. uniform basis string s over {0..d}.
struct SubsetDraw {
  std::vector<std::int64_t> test_positions;  // sorted, distinct
  std::vector<int> bases;                    // parallel to test_positions
};

// Uniform size-m subset of {0..N-1} via a partial Fisher-Yates shuffle.
std::vector<std::int64_t> draw_subset(std::int64_t n_total, std::int64_t m,
                                      Rng& rng);

SubsetDraw draw_subset_and_bases(std::int64_t n_total, std::int64_t m,
                                 PrimeDimension d, Rng& rng);

// Membership in the per-(j,c) good-word set:
//   | (1/m_j) #P_c^j(q_{t,s=j}) - (1/n) #P_c^j(q_{-t}) | <= delta.
// An empty test class (m_j = 0) counts as a failure.
bool good_word_simple(const BellWord& q, const SubsetDraw& draw, int j, int c,
                      double delta);

// Conjunction of good_word_simple over all j in {0..d}, c in {1..d-1}.
bool good_word_full(const BellWord& q, const SubsetDraw& draw, double delta);

struct TrialReport {
  std::int64_t trials = 0;
  std::int64_t failures = 0;
  double point_estimate = 0.0;
  double upper_limit = 0.0;  // Clopper-Pearson, at `confidence`
  double confidence = 0.0;
  std::uint64_t seed = 0;
};

// Monte Carlo estimate of Pr_{t,s}( q not in G^{t,s,j,c} ). Trials use
// independent derived streams, so results are reproducible for any thread
// count. Pass j = -1 to estimate the failure of the full strategy instead.
TrialReport estimate_failure(const BellWord& q, std::int64_t m, double delta,
                             int j, int c, std::int64_t trials,
                             std::uint64_t seed, double confidence = 0.99,
                             int threads = 1);

}  // namespace hdqkd
