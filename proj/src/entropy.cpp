#include "hdqkd/entropy.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>

#include <boost/multiprecision/cpp_int.hpp>

namespace hdqkd {

double d_ary_entropy(Fraction01 xf, PrimeDimension d) {
  const double x = xf.value();
  const double ln_d = std::log(static_cast<double>(d.value()));
  double acc = 0.0;
  if (x > 0.0) acc += x * std::log(static_cast<double>(d.value() - 1)) - x * std::log(x);
  if (x < 1.0) acc -= (1.0 - x) * std::log1p(-x);
  return acc / ln_d;
}

double log2_of_inverse(double eps) {
  if (!(eps > 0.0) || eps > 1.0)
    throw std::domain_error("log2_of_inverse: eps must be in (0,1]");
  return -std::log2(eps);
}

double hamming_ball_log_volume_exact(int n, int k, PrimeDimension d) {
  if (n < 0 || k < 0 || k > n)
    throw std::domain_error("hamming_ball_log_volume_exact: need 0 <= k <= n");
  if (n > 40)
    throw std::out_of_range(
        "hamming_ball_log_volume_exact: n exceeds the exact regime (n <= 40)");
  using boost::multiprecision::cpp_int;
  cpp_int total = 0;
  cpp_int binom = 1;                      // C(n,0)
  cpp_int alpha_pow = 1;                  // (d-1)^0
  const cpp_int alpha = d.value() - 1;
  for (int w = 0; w <= k; ++w) {
    total += binom * alpha_pow;
    binom = binom * (n - w) / (w + 1);    // exact: C(n,w+1)
    alpha_pow *= alpha;
  }
  return std::log2(total.convert_to<double>());
}

double log_sum_exp(std::span<const double> args) {
  if (args.empty()) return -std::numeric_limits<double>::infinity();
  const double hi = *std::max_element(args.begin(), args.end());
  if (!std::isfinite(hi)) return hi;
  double sum = 0.0;
  for (double a : args) sum += std::exp(a - hi);
  return hi + std::log(sum);
}

double log_sum_exp(double a, double b) {
  const std::array<double, 2> v{a, b};
  return log_sum_exp(std::span<const double>(v));
}

double log_sum_exp(double a, double b, double c) {
  const std::array<double, 3> v{a, b, c};
  return log_sum_exp(std::span<const double>(v));
}

}  // namespace hdqkd
