#include <doctest.h>

#include <cmath>
#include <vector>

#include "hdqkd/mub.hpp"
#include "hdqkd/sampling_bounds.hpp"
#include "hdqkd/sampling_mc.hpp"

using namespace hdqkd;

TEST_CASE("draw_subset_and_bases: full subset and uniformity") {
  const PrimeDimension d2(2);
  Rng rng = Rng::derive(1, 2, 3);
  const auto full = draw_subset_and_bases(8, 8, d2, rng);
  for (std::int64_t i = 0; i < 8; ++i) CHECK(full.test_positions[static_cast<std::size_t>(i)] == i);

  // index inclusion frequency 0.3 +- 3 sigma, basis frequencies 1/3 +- 3 sigma
  const std::int64_t draws = 100000;
  std::vector<std::int64_t> hits(10, 0);
  std::vector<std::int64_t> symbol(3, 0);
  Rng rng2 = Rng::derive(42, 2, 7);
  for (std::int64_t t = 0; t < draws; ++t) {
    const auto draw = draw_subset_and_bases(10, 3, d2, rng2);
    for (auto pos : draw.test_positions) ++hits[static_cast<std::size_t>(pos)];
    for (auto b : draw.bases) ++symbol[static_cast<std::size_t>(b)];
  }
  const double sigma_idx = std::sqrt(0.3 * 0.7 / static_cast<double>(draws));
  for (auto h : hits)
    CHECK(std::abs(static_cast<double>(h) / draws - 0.3) < 3.0 * sigma_idx);
  const double p_sym = 1.0 / 3.0;
  const double sigma_sym = std::sqrt(p_sym * (1 - p_sym) / (3.0 * draws));
  for (auto s : symbol)
    CHECK(std::abs(static_cast<double>(s) / (3.0 * draws) - p_sym) <
          3.0 * sigma_sym);
}

TEST_CASE("good_word_simple: degenerate and adversarial splits") {
  const PrimeDimension d2(2);
  const std::int64_t n_total = 40, m = 10;

  // all-identity word: both class fractions vanish for c >= 1
  BellWord zeros{d2, std::vector<BellLabel>(static_cast<std::size_t>(n_total), {0, 0})};
  SubsetDraw draw;
  for (std::int64_t i = 0; i < m; ++i) draw.test_positions.push_back(i);
  draw.bases.assign(static_cast<std::size_t>(m), 0);
  CHECK(good_word_simple(zeros, draw, 0, 1, 0.01));

  // all tested positions in class, all key positions outside
  BellWord split = zeros;
  for (std::int64_t i = 0; i < m; ++i)
    split.symbols[static_cast<std::size_t>(i)] = {1, 0};  // class of (j=0,c=1)
  CHECK_FALSE(good_word_simple(split, draw, 0, 1, 0.5));
  CHECK(good_word_simple(split, draw, 0, 1, 1.0));

  // m_j = 0 counts as failure
  SubsetDraw no_basis0 = draw;
  no_basis0.bases.assign(static_cast<std::size_t>(m), 1);
  CHECK_FALSE(good_word_simple(zeros, no_basis0, 0, 1, 1.0));
}

TEST_CASE("good_word membership agrees with the measurement oracle") {
  const PrimeDimension d3(3);
  const MubSystem mub{d3};
  const std::int64_t n_total = 30, m = 12;
  Rng rng = Rng::derive(99, 5, 0);
  for (int it = 0; it < 1000; ++it) {
    BellWord q{d3, {}};
    for (std::int64_t i = 0; i < n_total; ++i)
      q.symbols.push_back({static_cast<int>(rng.below(3)), static_cast<int>(rng.below(3))});
    const auto draw = draw_subset_and_bases(n_total, m, d3, rng);
    const int j = static_cast<int>(rng.below(4));
    const int c = 1 + static_cast<int>(rng.below(2));
    const double delta = rng.next_double();

    // recompute membership classifying labels through outcome probabilities
    std::int64_t m_j = 0, tested = 0, test_total = 0, whole = 0;
    for (const auto& label : q.symbols)
      if (mub.outcome_probability(j, c, label) > 0.5) ++whole;
    for (std::size_t i = 0; i < draw.test_positions.size(); ++i) {
      const auto& label = q.symbols[static_cast<std::size_t>(draw.test_positions[i])];
      const bool in_class = mub.outcome_probability(j, c, label) > 0.5;
      if (in_class) ++test_total;
      if (draw.bases[i] == j) {
        ++m_j;
        if (in_class) ++tested;
      }
    }
    bool expected = false;
    if (m_j > 0) {
      const double guess = static_cast<double>(tested) / static_cast<double>(m_j);
      const double target = static_cast<double>(whole - test_total) /
                            static_cast<double>(n_total - m);
      expected = std::abs(guess - target) <= delta;
    }
    CHECK(good_word_simple(q, draw, j, c, delta) == expected);
  }
}

TEST_CASE("good_word_full is the conjunction over (j,c)") {
  const PrimeDimension d3(3);
  const std::int64_t n_total = 24, m = 8;
  Rng rng = Rng::derive(123, 5, 1);
  for (int it = 0; it < 200; ++it) {
    BellWord q{d3, {}};
    for (std::int64_t i = 0; i < n_total; ++i)
      q.symbols.push_back({static_cast<int>(rng.below(3)), static_cast<int>(rng.below(3))});
    const auto draw = draw_subset_and_bases(n_total, m, d3, rng);
    const double delta = 0.3 * rng.next_double();
    bool conj = true;
    for (int j = 0; j <= 3; ++j)
      for (int c = 1; c < 3; ++c)
        conj = conj && good_word_simple(q, draw, j, c, delta);
    CHECK(good_word_full(q, draw, delta) == conj);
  }

  BellWord zeros{d3, std::vector<BellLabel>(static_cast<std::size_t>(n_total), {0, 0})};
  SubsetDraw draw;
  for (std::int64_t i = 0; i < 8; ++i) {
    draw.test_positions.push_back(i);
    draw.bases.push_back(static_cast<int>(i % 4));
  }
  CHECK(good_word_full(zeros, draw, 0.01));
}

TEST_CASE("estimate_failure: determinism across runs and thread counts") {
  const PrimeDimension d2(2);
  const auto word = make_test_word(WordFamily::alternating, 100, d2, 5);
  const auto a = estimate_failure(word, 50, 0.1, 0, 1, 2000, 77, 0.99, 1);
  const auto b = estimate_failure(word, 50, 0.1, 0, 1, 2000, 77, 0.99, 4);
  const auto c = estimate_failure(word, 50, 0.1, 0, 1, 2000, 77, 0.99, 1);
  CHECK(a.failures == b.failures);
  CHECK(a.failures == c.failures);
  CHECK(a.upper_limit == b.upper_limit);
  CHECK(a.point_estimate <= a.upper_limit);
}

TEST_CASE("estimate_failure at delta = 1: only empty-class draws fail") {
  const PrimeDimension d2(2);
  const std::int64_t n_total = 60, m = 30, trials = 20000;
  const std::uint64_t seed = 31337;
  const auto word = make_test_word(WordFamily::alternating, n_total, d2, seed);
  const auto rep = estimate_failure(word, m, 1.0, 0, 1, trials, seed, 0.99, 2);

  // replay the draws and count m_j = 0 events directly
  std::int64_t empty = 0;
  for (std::int64_t t = 0; t < trials; ++t) {
    Rng rng = Rng::derive(seed, stream_tag::trial, static_cast<std::uint64_t>(t));
    const auto draw = draw_subset_and_bases(n_total, m, d2, rng);
    bool any = false;
    for (int b : draw.bases) any = any || (b == 0);
    if (!any) ++empty;
  }
  CHECK(rep.failures == empty);
}

TEST_CASE("bound dominance where the analytic bound is informative") {
  // At desk scale the bound only drops below 1 for large slack; there the
  // empirical failure rate must sit far beneath it.
  const PrimeDimension d2(2);
  const std::int64_t n_total = 200, m = 100, trials = 20000;
  const SamplingGeometry geom(n_total, m, d2);
  const double cg = c_gamma(geom);
  const double beta = default_beta(d2);
  for (const auto family : {WordFamily::alternating, WordFamily::blocked,
                            WordFamily::uniform_class, WordFamily::random_imbalanced}) {
    const auto word = make_test_word(family, n_total, d2, 2024);
    for (double delta : {0.6, 0.8}) {
      const double analytic_log =
          simple_strategy_error_log(geom, {delta, cg, beta});
      REQUIRE(analytic_log < 0.0);  // informative at these slacks
      for (int j = 0; j <= 2; ++j) {
        const auto rep =
            estimate_failure(word, m, delta, j, 1, trials, 99, 0.99, 2);
        CHECK(rep.upper_limit <= std::exp(analytic_log));
      }
    }
  }
}

TEST_CASE("full-strategy failure dominated by the union bound") {
  const PrimeDimension d2(2);
  const std::int64_t n_total = 200, m = 100, trials = 20000;
  const SamplingGeometry geom(n_total, m, d2);
  const double delta = 0.8;
  const double union_log = union_error_log(
      simple_strategy_error_log(geom, {delta, c_gamma(geom), default_beta(d2)}),
      d2);
  REQUIRE(union_log < 0.0);
  const auto word = make_test_word(WordFamily::blocked, n_total, d2, 11);
  const auto rep = estimate_failure(word, m, delta, -1, -1, trials, 5, 0.99, 2);
  CHECK(rep.upper_limit <= std::exp(union_log));
}

TEST_CASE("word families have the advertised shape") {
  const PrimeDimension d3(3);
  const auto uni = make_test_word(WordFamily::uniform_class, 10, d3, 1);
  for (const auto& s : uni.symbols) CHECK(s == BellLabel{1, 0});
  const auto alt = make_test_word(WordFamily::alternating, 10, d3, 1);
  CHECK(alt.symbols[0] == BellLabel{0, 0});
  CHECK(alt.symbols[1] == BellLabel{1, 0});
  const auto blk = make_test_word(WordFamily::blocked, 10, d3, 1);
  CHECK(blk.symbols[4] == BellLabel{0, 0});
  CHECK(blk.symbols[5] == BellLabel{1, 0});
  CHECK(word_family_from_name("random") == WordFamily::random_imbalanced);
  CHECK_THROWS_AS(word_family_from_name("nope"), std::invalid_argument);
}
