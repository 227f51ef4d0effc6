#pragma once

#include <stdexcept>
#include <string>

namespace hdqkd {

// Thrown when reconstructed Bell weights are too negative to be explained by
// any Bell-diagonal state (total pre-clamp negativity above threshold).
class infeasible_statistics : public std::runtime_error {
 public:
  infeasible_statistics(const std::string& what, double negativity)
      : std::runtime_error(what), negativity_(negativity) {}
  double negativity() const noexcept { return negativity_; }

 private:
  double negativity_;
};

// Prime qudit dimension d >= 2. The d+1 MUB construction used throughout
// requires primality, so it is enforced at construction.
class PrimeDimension {
 public:
  explicit PrimeDimension(int d) : d_(d) {
    if (d < 2 || !is_prime(d))
      throw std::invalid_argument("PrimeDimension: " + std::to_string(d) +
                                  " is not a prime >= 2");
  }

  int value() const noexcept { return d_; }
  int num_bases() const noexcept { return d_ + 1; }     // bases j = 0..d
  int num_symbols() const noexcept { return d_; }       // outcomes c = 0..d-1

  friend bool operator==(PrimeDimension a, PrimeDimension b) noexcept {
    return a.d_ == b.d_;
  }

  static bool is_prime(int n) noexcept {
    if (n < 2) return false;
    for (int p = 2; p * p <= n; ++p)
      if (n % p == 0) return false;
    return true;
  }

 private:
  int d_;
};

// A real number constrained to [0,1]; argument domain of h_d and of all
// observed-fraction quantities.
class Fraction01 {
 public:
  explicit Fraction01(double v) : v_(v) {
    if (!(v >= 0.0 && v <= 1.0))
      throw std::domain_error("Fraction01: value " + std::to_string(v) +
                              " outside [0,1]");
  }
  double value() const noexcept { return v_; }

 private:
  double v_;
};

}  // namespace hdqkd
