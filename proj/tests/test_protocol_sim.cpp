#include <doctest.h>

#include <cmath>

#include "hdqkd/protocol_sim.hpp"

using namespace hdqkd;

TEST_CASE("depolarizing channel weights") {
  const PrimeDimension d2(2), d3(3);
  const auto clean = depolarizing_channel(d3, 0.0);
  CHECK(clean.p(0, 0) == doctest::Approx(1.0).epsilon(1e-14));

  const auto six = depolarizing_channel(d2, 0.1);
  CHECK(six.p(0, 0) == doctest::Approx(0.85).epsilon(1e-14));
  CHECK(six.p(0, 1) == doctest::Approx(0.05).epsilon(1e-14));
  CHECK(six.p(1, 0) == doctest::Approx(0.05).epsilon(1e-14));
  CHECK(six.p(1, 1) == doctest::Approx(0.05).epsilon(1e-14));

  // forward statistics of the channel give Q/(d-1) in every basis
  for (int dv : {2, 3, 5}) {
    const PrimeDimension d(dv);
    const double q_total = 0.12;
    const auto chan = depolarizing_channel(d, q_total);
    const auto q = forward_statistics(chan.p, d);
    for (int j = 0; j <= dv; ++j)
      for (int c = 1; c < dv; ++c)
        CHECK(q(j, c) == doctest::Approx(q_total / (dv - 1)).epsilon(1e-12));
  }

  CHECK_THROWS_AS(depolarizing_channel(d2, 0.7), std::invalid_argument);
}

TEST_CASE("sampled outcomes: noiseless channel and binomial concentration") {
  const PrimeDimension d2(2);
  const auto clean = depolarizing_channel(d2, 0.0);
  const auto stage = sample_round_outcomes(clean, 2000, 500, 7, 2);
  for (int outcome : stage.outcomes) CHECK(outcome == 0);

  const auto noisy = depolarizing_channel(d2, 0.1);
  const auto big = sample_round_outcomes(noisy, 100000, 30000, 11, 2);
  const auto freq = big.observed.frequencies();
  for (int j = 0; j <= 2; ++j) {
    const auto m_j = static_cast<double>(big.observed.basis_counts[static_cast<std::size_t>(j)]);
    REQUIRE(m_j > 1000);
    const double sigma = std::sqrt(0.1 * 0.9 / m_j);
    CHECK(std::abs(freq(j, 1) - 0.1) < 3.0 * sigma);
  }
}

TEST_CASE("sampled outcomes: bitwise determinism across thread counts") {
  const auto chan = depolarizing_channel(PrimeDimension(3), 0.2);
  const auto a = sample_round_outcomes(chan, 5000, 1500, 42, 1);
  const auto b = sample_round_outcomes(chan, 5000, 1500, 42, 4);
  CHECK(a.draw.test_positions == b.draw.test_positions);
  CHECK(a.draw.bases == b.draw.bases);
  CHECK(a.outcomes == b.outcomes);
  CHECK((a.observed.counts - b.observed.counts).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("abort check: strict inequality and reason listing") {
  const PrimeDimension d2(2);
  const auto qhat = symmetric_thresholds(d2, 0.1);

  ObservedStats obs;
  obs.counts = Eigen::MatrixXd::Zero(3, 2);
  obs.basis_counts = {100, 100, 100};
  for (int j = 0; j <= 2; ++j) {
    obs.counts(j, 1) = 10.0;  // exactly at the threshold 0.1
    obs.counts(j, 0) = 90.0;
  }
  CHECK_FALSE(abort_check(obs, qhat).aborted);

  obs.counts(1, 1) = 11.0;  // one count above
  const auto decision = abort_check(obs, qhat);
  CHECK(decision.aborted);
  REQUIRE(decision.reasons.size() == 1);
  CHECK(decision.reasons[0].substr(0, 10) == "noise:1:1:");
  CHECK(decision.reasons[0].find(',') == std::string::npos);

  ObservedStats empty = obs;
  empty.basis_counts = {100, 0, 100};
  const auto decision2 = abort_check(empty, qhat);
  CHECK(decision2.aborted);
  CHECK(decision2.reasons[0] == "empty_basis:1");
}

TEST_CASE("run_protocol: accept region, reject region, determinism") {
  const PrimeDimension d2(2);
  const SecurityTargets targets(1e-14, 1e-12);
  const LeakageModel leak = LeakageModel::shannon(1.0, 1.0);

  // clean channel, modest thresholds: never aborts, positive length
  const auto clean = depolarizing_channel(d2, 0.0);
  const auto accept = run_protocol(clean, 1000000, 500000,
                                   symmetric_thresholds(d2, 0.01), targets,
                                   leak, 3, 2);
  CHECK_FALSE(accept.aborted);
  REQUIRE(accept.key.has_value());
  CHECK(accept.key->key_length_bits > 0);

  // channel noise at twice the thresholds: aborts essentially always
  const auto hot = depolarizing_channel(d2, 0.1);
  int aborts = 0;
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const auto run = run_protocol(hot, 40000, 10000,
                                  symmetric_thresholds(d2, 0.05), targets,
                                  leak, seed, 2);
    if (run.aborted) ++aborts;
  }
  CHECK(aborts == 10);

  // identical seeds give identical runs
  const auto r1 = run_protocol(hot, 20000, 5000, symmetric_thresholds(d2, 0.15),
                               targets, leak, 99, 1);
  const auto r2 = run_protocol(hot, 20000, 5000, symmetric_thresholds(d2, 0.15),
                               targets, leak, 99, 4);
  CHECK(r1.aborted == r2.aborted);
  CHECK(r1.reasons == r2.reasons);
  CHECK((r1.observed.counts - r2.observed.counts).cwiseAbs().maxCoeff() == 0.0);
  if (r1.key && r2.key) {
    CHECK(r1.key->key_length_bits == r2.key->key_length_bits);
    CHECK(r1.key->rate == r2.key->rate);
  }
}

TEST_CASE("statistical consistency against forward statistics") {
  // observed per-basis frequencies track forward_statistics(channel)
  for (int dv : {2, 3, 5}) {
    const PrimeDimension d(dv);
    Eigen::MatrixXd lambda(dv, dv);
    for (int a = 0; a < dv; ++a)
      for (int b = 0; b < dv; ++b)
        lambda(a, b) = (a == 0 && b == 0) ? 10.0 : 0.1 + 0.05 * ((a + 2 * b) % 3);
    const auto chan = channel_from_lambda(d, lambda);
    const auto expect = forward_statistics(chan.p, d);
    const auto stage = sample_round_outcomes(chan, 120000, 60000, 17, 2);
    const auto freq = stage.observed.frequencies();
    for (int j = 0; j <= dv; ++j) {
      const auto m_j =
          static_cast<double>(stage.observed.basis_counts[static_cast<std::size_t>(j)]);
      REQUIRE(m_j >= 1000);
      for (int c = 0; c < dv; ++c) {
        const double p = expect(j, c);
        const double sigma = std::sqrt(std::max(p * (1 - p), 1e-12) / m_j);
        CHECK(std::abs(freq(j, c) - p) < 4.0 * sigma + 1e-9);
      }
    }
  }
}
