#include "hdqkd/sampling_mc.hpp"

#include <algorithm>
#include <atomic>
#include <numeric>

#include "hdqkd/parallel.hpp"
#include "hdqkd/stats.hpp"

namespace hdqkd {

WordFamily word_family_from_name(const std::string& name) {
  if (name == "uniform-class") return WordFamily::uniform_class;
  if (name == "alternating") return WordFamily::alternating;
  if (name == "blocked") return WordFamily::blocked;
  if (name == "random") return WordFamily::random_imbalanced;
  throw std::invalid_argument("unknown word family: " + name);
}

std::string word_family_name(WordFamily family) {
  switch (family) {
    case WordFamily::uniform_class: return "uniform-class";
    case WordFamily::alternating: return "alternating";
    case WordFamily::blocked: return "blocked";
    case WordFamily::random_imbalanced: return "random";
  }
  return "?";
}

BellWord make_test_word(WordFamily family, std::int64_t n_total,
                        PrimeDimension d, std::uint64_t seed) {
  BellWord word{d, {}};
  word.symbols.reserve(static_cast<std::size_t>(n_total));
  Rng rng = Rng::derive(seed, stream_tag::word);
  const int dv = d.value();
  for (std::int64_t i = 0; i < n_total; ++i) {
    switch (family) {
      case WordFamily::uniform_class:
        word.symbols.push_back({1, 0});
        break;
      case WordFamily::alternating:
        word.symbols.push_back(i % 2 == 0 ? BellLabel{0, 0} : BellLabel{1, 0});
        break;
      case WordFamily::blocked:
        word.symbols.push_back(i < n_total / 2 ? BellLabel{0, 0}
                                               : BellLabel{1, 0});
        break;
      case WordFamily::random_imbalanced:
        // 80% identity label, rest spread over the other d^2 - 1 labels
        if (rng.next_double() < 0.8) {
          word.symbols.push_back({0, 0});
        } else {
          const int other =
              1 + static_cast<int>(rng.below(static_cast<std::uint64_t>(dv * dv - 1)));
          word.symbols.push_back({other / dv, other % dv});
        }
        break;
    }
  }
  return word;
}

std::vector<std::int64_t> draw_subset(std::int64_t n_total, std::int64_t m,
                                      Rng& rng) {
  if (m < 1 || m > n_total)
    throw std::invalid_argument("draw_subset: need 1 <= m <= N");
  // partial Fisher-Yates: first m entries become a uniform size-m subset
  std::vector<std::int64_t> idx(static_cast<std::size_t>(n_total));
  std::iota(idx.begin(), idx.end(), 0);
  for (std::int64_t i = 0; i < m; ++i) {
    const std::int64_t j =
        i + static_cast<std::int64_t>(rng.below(static_cast<std::uint64_t>(n_total - i)));
    std::swap(idx[static_cast<std::size_t>(i)], idx[static_cast<std::size_t>(j)]);
  }
  idx.resize(static_cast<std::size_t>(m));
  std::sort(idx.begin(), idx.end());
  return idx;
}

SubsetDraw draw_subset_and_bases(std::int64_t n_total, std::int64_t m,
                                 PrimeDimension d, Rng& rng) {
  SubsetDraw draw;
  draw.test_positions = draw_subset(n_total, m, rng);
  draw.bases.resize(static_cast<std::size_t>(m));
  const auto n_bases = static_cast<std::uint64_t>(d.num_bases());
  for (auto& b : draw.bases) b = static_cast<int>(rng.below(n_bases));
  return draw;
}

bool good_word_simple(const BellWord& q, const SubsetDraw& draw, int j, int c,
                      double delta) {
  const std::int64_t n_total = q.size();
  const auto m = static_cast<std::int64_t>(draw.test_positions.size());
  const std::int64_t n_key = n_total - m;

  std::int64_t total_in_class = 0;
  for (const auto& label : q.symbols)
    if (pcj_symbol(q.d, j, label) == c) ++total_in_class;

  std::int64_t m_j = 0, tested_in_class = 0, test_in_class = 0;
  for (std::size_t i = 0; i < draw.test_positions.size(); ++i) {
    const bool in_class =
        pcj_symbol(q.d, j, q.symbols[static_cast<std::size_t>(
                               draw.test_positions[i])]) == c;
    if (in_class) ++test_in_class;
    if (draw.bases[i] == j) {
      ++m_j;
      if (in_class) ++tested_in_class;
    }
  }
  if (m_j == 0) return false;  // empty test class counts as failure

  const double guess = static_cast<double>(tested_in_class) / static_cast<double>(m_j);
  const double target =
      static_cast<double>(total_in_class - test_in_class) / static_cast<double>(n_key);
  return std::abs(guess - target) <= delta;
}

bool good_word_full(const BellWord& q, const SubsetDraw& draw, double delta) {
  const int d = q.d.value();
  for (int j = 0; j <= d; ++j)
    for (int c = 1; c < d; ++c)
      if (!good_word_simple(q, draw, j, c, delta)) return false;
  return true;
}

TrialReport estimate_failure(const BellWord& q, std::int64_t m, double delta,
                             int j, int c, std::int64_t trials,
                             std::uint64_t seed, double confidence,
                             int threads) {
  if (trials < 1) throw std::invalid_argument("estimate_failure: trials >= 1");
  std::atomic<std::int64_t> failures{0};
  parallel_for(trials, threads, [&](std::int64_t trial) {
    Rng rng = Rng::derive(seed, stream_tag::trial, static_cast<std::uint64_t>(trial));
    const SubsetDraw draw = draw_subset_and_bases(q.size(), m, q.d, rng);
    const bool good = j < 0 ? good_word_full(q, draw, delta)
                            : good_word_simple(q, draw, j, c, delta);
    if (!good) failures.fetch_add(1, std::memory_order_relaxed);
  });

  TrialReport rep;
  rep.trials = trials;
  rep.failures = failures.load();
  rep.point_estimate = static_cast<double>(rep.failures) / static_cast<double>(trials);
  rep.upper_limit = clopper_pearson_upper(rep.failures, trials, confidence);
  rep.confidence = confidence;
  rep.seed = seed;
  return rep;
}

}  // namespace hdqkd
