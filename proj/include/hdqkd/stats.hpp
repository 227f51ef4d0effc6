#pragma once

#include <cstdint>

namespace hdqkd {

// Regularized incomplete beta function I_x(a,b), a,b > 0, x in [0,1].
double regularized_incomplete_beta(double a, double b, double x);

// One-sided Clopper-Pearson upper confidence limit for a binomial proportion:
// the p solving P(X <= failures | trials, p) = 1 - confidence.
// Returns 1 when failures == trials.
double clopper_pearson_upper(std::int64_t failures, std::int64_t trials,
                             double confidence);

}  // namespace hdqkd
