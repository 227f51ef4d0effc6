#include <doctest.h>

#include <cmath>
#include <complex>
#include <numbers>

#include "hdqkd/mub.hpp"
#include "hdqkd/rng.hpp"

using namespace hdqkd;
using Cx = std::complex<double>;

namespace {

Eigen::MatrixXd random_feasible_lambda(int d, Rng& rng) {
  Eigen::MatrixXd lambda(d, d);
  double total = 0.0;
  for (int a = 0; a < d; ++a)
    for (int b = 0; b < d; ++b) {
      lambda(a, b) = rng.next_double();
      total += lambda(a, b);
    }
  return lambda / total;  // normalized, n = 1
}

}  // namespace

TEST_CASE("Bell states: explicit components and orthogonality") {
  const PrimeDimension d2(2);
  const auto phi00 = bell_state(d2, {0, 0});
  CHECK(std::abs(phi00(0) - Cx(1.0 / std::sqrt(2.0), 0)) < 1e-14);
  CHECK(std::abs(phi00(3) - Cx(1.0 / std::sqrt(2.0), 0)) < 1e-14);
  CHECK(std::abs(phi00(1)) < 1e-14);
  CHECK(std::abs(phi00(2)) < 1e-14);

  // (|01> - |10>)/sqrt 2: omega = -1 for d = 2
  const auto phi11 = bell_state(d2, {1, 1});
  CHECK(std::abs(phi11(1) - Cx(1.0 / std::sqrt(2.0), 0)) < 1e-14);
  CHECK(std::abs(phi11(2) + Cx(1.0 / std::sqrt(2.0), 0)) < 1e-14);

  // d=3, alpha=1, beta=2: (1/sqrt 3)(|0,1> + w^2|1,2> + w^4|2,0>)
  const PrimeDimension d3(3);
  const auto phi = bell_state(d3, {1, 2});
  const double s3 = 1.0 / std::sqrt(3.0);
  const auto omega_pow = [](int p) {
    const double ang = 2.0 * std::numbers::pi * p / 3.0;
    return Cx(std::cos(ang), std::sin(ang));
  };
  CHECK(std::abs(phi(0 * 3 + 1) - s3 * omega_pow(0)) < 1e-14);
  CHECK(std::abs(phi(1 * 3 + 2) - s3 * omega_pow(2)) < 1e-14);
  CHECK(std::abs(phi(2 * 3 + 0) - s3 * omega_pow(4)) < 1e-14);

  for (int a = 0; a < 3; ++a)
    for (int b = 0; b < 3; ++b) {
      const auto u = bell_state(d3, {a, b});
      CHECK(std::abs(u.norm() - 1.0) < 1e-12);
      for (int a2 = 0; a2 < 3; ++a2)
        for (int b2 = 0; b2 < 3; ++b2) {
          if (a == a2 && b == b2) continue;
          CHECK(std::abs((u.adjoint() * bell_state(d3, {a2, b2})).value()) < 1e-12);
        }
    }
}

TEST_CASE("MUB construction: residuals, unbiasedness, POVM completeness") {
  for (int dv : {2, 3, 5}) {
    const MubSystem mub{PrimeDimension(dv)};
    CHECK(mub.max_eigen_residual() < 1e-10);
    CHECK(mub.max_mub_deviation() < 1e-9);
    CHECK(mub.max_povm_completeness_residual() < 1e-10);
  }
  CHECK_THROWS_AS(MubSystem{PrimeDimension(4)}, std::invalid_argument);
  CHECK_THROWS_AS(MubSystem{PrimeDimension(17)}, std::out_of_range);
}

TEST_CASE("POVM elements: computational-basis projectors and trace") {
  const MubSystem mub2{PrimeDimension(2)};
  const auto agree = mub2.povm_element(0, 0);
  Eigen::MatrixXcd expect = Eigen::MatrixXcd::Zero(4, 4);
  expect(0, 0) = 1.0;  // |00><00|
  expect(3, 3) = 1.0;  // |11><11|
  CHECK((agree - expect).cwiseAbs().maxCoeff() < 1e-12);

  const auto differ = mub2.povm_element(0, 1);
  expect.setZero();
  expect(1, 1) = 1.0;
  expect(2, 2) = 1.0;
  CHECK((differ - expect).cwiseAbs().maxCoeff() < 1e-12);

  const MubSystem mub3{PrimeDimension(3)};
  const auto lam = mub3.povm_element(2, 1);
  CHECK(std::abs(lam.trace().real() - 3.0) < 1e-10);
  CHECK(std::abs(lam.trace().imag()) < 1e-12);
  CHECK((lam - lam.adjoint()).cwiseAbs().maxCoeff() < 1e-12);

  CHECK_THROWS_AS(mub3.povm_element(4, 0), std::invalid_argument);
  CHECK_THROWS_AS(mub3.povm_element(0, 3), std::invalid_argument);
}

TEST_CASE("outcome probabilities are deterministic and match the closed form") {
  for (int dv : {2, 3, 5}) {
    const PrimeDimension d(dv);
    const MubSystem mub{d};
    for (int j = 0; j <= dv; ++j) {
      for (int alpha = 0; alpha < dv; ++alpha)
        for (int beta = 0; beta < dv; ++beta) {
          const BellLabel label{alpha, beta};
          double row_sum = 0.0;
          int hits = 0;
          for (int c = 0; c < dv; ++c) {
            const double p = mub.outcome_probability(j, c, label);
            row_sum += p;
            CHECK(std::min(std::abs(p), std::abs(1.0 - p)) < 1e-9);
            const bool oracle_member = p > 0.5;
            const bool closed_member = pcj_symbol(d, j, label) == c;
            CHECK(oracle_member == closed_member);
            if (oracle_member) ++hits;
          }
          CHECK(row_sum == doctest::Approx(1.0).epsilon(1e-9));
          CHECK(hits == 1);  // total function: exactly one class per basis
        }
    }
  }
}

TEST_CASE("closed-form sets partition the label square") {
  for (int dv : {2, 3, 5, 7}) {
    const PrimeDimension d(dv);
    for (int j = 0; j <= dv; ++j) {
      std::vector<int> seen(static_cast<std::size_t>(dv * dv), 0);
      for (int c = 0; c < dv; ++c) {
        const auto set = pcj_closed_form(d, j, c);
        CHECK(static_cast<int>(set.size()) == dv);
        for (const auto& label : set) {
          ++seen[static_cast<std::size_t>(label.alpha * dv + label.beta)];
          CHECK(pcj_symbol(d, j, label) == c);
        }
      }
      for (int count : seen) CHECK(count == 1);
    }
  }
}

TEST_CASE("Bell state bit difference is deterministic in the computational basis") {
  const MubSystem mub{PrimeDimension(2)};
  for (int alpha = 0; alpha < 2; ++alpha)
    for (int beta = 0; beta < 2; ++beta) {
      CHECK(mub.outcome_probability(0, alpha, {alpha, beta}) ==
            doctest::Approx(1.0).epsilon(1e-12));
      CHECK(mub.outcome_probability(0, 1 - alpha, {alpha, beta}) ==
            doctest::Approx(0.0).epsilon(1e-12));
    }
}

TEST_CASE("forward statistics: pinned examples") {
  const PrimeDimension d2(2), d3(3);

  // noiseless: all weight on (0,0)
  Eigen::MatrixXd lam0 = Eigen::MatrixXd::Zero(3, 3);
  lam0(0, 0) = 7.0;
  const auto q0 = forward_statistics(lam0, d3);
  for (int j = 0; j <= 3; ++j) {
    CHECK(q0(j, 0) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(q0(j, 1) == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(q0(j, 2) == doctest::Approx(0.0).epsilon(1e-12));
  }

  // six-state depolarizing weights
  Eigen::MatrixXd lam(2, 2);
  lam << 0.85, 0.05, 0.05, 0.05;
  const auto q = forward_statistics(lam, d2);
  for (int j = 0; j <= 2; ++j) {
    CHECK(q(j, 0) == doctest::Approx(0.9).epsilon(1e-12));
    CHECK(q(j, 1) == doctest::Approx(0.1).epsilon(1e-12));
  }

  // maximally mixed
  Eigen::MatrixXd uniform = Eigen::MatrixXd::Constant(3, 3, 1.0 / 9.0);
  const auto qu = forward_statistics(uniform, d3);
  for (int j = 0; j <= 3; ++j)
    for (int c = 0; c < 3; ++c)
      CHECK(qu(j, c) == doctest::Approx(1.0 / 3.0).epsilon(1e-12));

  CHECK_THROWS_AS(forward_statistics(Eigen::MatrixXd::Constant(2, 2, -1.0), d2),
                  std::invalid_argument);
}

TEST_CASE("invert statistics: pinned examples") {
  const PrimeDimension d2(2), d3(3);

  // noiseless
  Eigen::MatrixXd q0(4, 3);
  q0.setZero();
  q0.col(0).setOnes();
  const auto lam0 = invert_statistics(q0, 5.0, d3);
  CHECK(lam0(0, 0) == doctest::Approx(5.0).epsilon(1e-12));
  CHECK(lam0.sum() == doctest::Approx(5.0).epsilon(1e-12));

  // d=2 depolarizing with Q_1^j = 0.1
  Eigen::MatrixXd q(3, 2);
  q << 0.9, 0.1, 0.9, 0.1, 0.9, 0.1;
  const auto lam = invert_statistics(q, 1.0, d2);
  CHECK(lam(0, 0) == doctest::Approx(0.85).epsilon(1e-12));
  CHECK(lam(0, 1) == doctest::Approx(0.05).epsilon(1e-12));
  CHECK(lam(1, 0) == doctest::Approx(0.05).epsilon(1e-12));
  CHECK(lam(1, 1) == doctest::Approx(0.05).epsilon(1e-12));

  // d=3 depolarizing Q=0.1: Q_c^j = 0.05 for c = 1,2
  Eigen::MatrixXd q3(4, 3);
  for (int j = 0; j <= 3; ++j) {
    q3(j, 0) = 0.9;
    q3(j, 1) = 0.05;
    q3(j, 2) = 0.05;
  }
  const auto lam3 = invert_statistics(q3, 1.0, d3);
  CHECK(lam3(0, 0) == doctest::Approx(2.6 / 3.0).epsilon(1e-12));
  for (int a = 0; a < 3; ++a)
    for (int b = 0; b < 3; ++b)
      if (!(a == 0 && b == 0))
        CHECK(lam3(a, b) == doctest::Approx(0.1 / 6.0).epsilon(1e-10));

  CHECK_THROWS_AS(invert_statistics(Eigen::MatrixXd::Constant(3, 2, 0.9), 1.0, d2),
                  std::invalid_argument);
}

TEST_CASE("round trip: invert after forward recovers random feasible weights") {
  for (int dv : {2, 3, 5}) {
    const PrimeDimension d(dv);
    Rng rng = Rng::derive(20240801, 11, static_cast<std::uint64_t>(dv));
    for (int it = 0; it < 1000; ++it) {
      const Eigen::MatrixXd lambda = random_feasible_lambda(dv, rng);
      const Eigen::MatrixXd back =
          invert_statistics(forward_statistics(lambda, d), 1.0, d);
      CHECK((back - lambda).cwiseAbs().maxCoeff() < 1e-10);
    }
  }
}
