#pragma once

#include <span>

#include "hdqkd/types.hpp"

namespace hdqkd {

// d-ary entropy h_d(x) = x log_d(d-1) - x log_d x - (1-x) log_d(1-x),
// with the 0·log 0 := 0 convention applied by explicit branch so that the
// endpoints are exact. Result lies in [0,1]; the maximum 1 is attained at
// x = (d-1)/d.
double d_ary_entropy(Fraction01 x, PrimeDimension d);
inline double d_ary_entropy(double x, PrimeDimension d) {
  return d_ary_entropy(Fraction01(x), d);
}

// -log2(eps) for 0 < eps <= 1.
double log2_of_inverse(double eps);

// log2 of the exact d-ary Hamming ball count  sum_{w=0}^{k} C(n,w) (d-1)^w,
// computed with arbitrary-precision integers. Exact regime capped at n <= 40.
double hamming_ball_log_volume_exact(int n, int k, PrimeDimension d);

// log(sum_i exp(args[i])) evaluated stably; arguments and result are natural
// logs. Returns -inf for an empty span.
double log_sum_exp(std::span<const double> args);
double log_sum_exp(double a, double b);
double log_sum_exp(double a, double b, double c);

}  // namespace hdqkd
