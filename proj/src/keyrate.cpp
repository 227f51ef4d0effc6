#include "hdqkd/keyrate.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "hdqkd/entropy.hpp"
#include "hdqkd/mub.hpp"
#include "hdqkd/parallel.hpp"

namespace hdqkd {

namespace {

void append_flag(std::vector<std::string>* flags, std::string flag) {
  if (flags) flags->push_back(std::move(flag));
}

// Shannon entropy (bits) of the basis-0 outcome distribution implied by the
// thresholds: p_c = Qhat_c^0 for c >= 1, p_0 the remainder.
double basis0_error_entropy(const NoiseThresholds& qhat) {
  const int d = qhat.d.value();
  double p0 = 1.0;
  double h = 0.0;
  for (int c = 1; c < d; ++c) {
    const double p = qhat.entry(0, c);
    p0 -= p;
    if (p > 0.0) h -= p * std::log2(p);
  }
  if (p0 > 0.0) h -= p0 * std::log2(p0);
  return h;
}

}  // namespace

NoiseThresholds::NoiseThresholds(PrimeDimension dim, Eigen::MatrixXd thresholds)
    : d(dim), qhat(std::move(thresholds)) {
  const int dv = d.value();
  if (qhat.rows() != dv + 1 || qhat.cols() != dv - 1)
    throw std::invalid_argument("NoiseThresholds: matrix must be (d+1) x (d-1)");
  for (int j = 0; j <= dv; ++j) {
    double row = 0.0;
    for (int c = 1; c < dv; ++c) {
      const double v = entry(j, c);
      if (!(v >= 0.0 && v <= 1.0))
        throw std::invalid_argument("NoiseThresholds: entries must lie in [0,1]");
      row += v;
    }
    if (row > 1.0 + 1e-12)
      throw std::invalid_argument(
          "NoiseThresholds: row " + std::to_string(j) + " exceeds total mass 1");
  }
}

NoiseThresholds symmetric_thresholds(PrimeDimension d, double q_total) {
  const int dv = d.value();
  if (!(q_total >= 0.0 && q_total <= 1.0))
    throw std::invalid_argument("symmetric_thresholds: Q must lie in [0,1]");
  Eigen::MatrixXd m =
      Eigen::MatrixXd::Constant(dv + 1, dv - 1, q_total / (dv - 1));
  return NoiseThresholds(d, std::move(m));
}

LeakageModel LeakageModel::shannon(double f, double eps_correct) {
  if (!(f >= 1.0))
    throw std::invalid_argument("LeakageModel: efficiency must be >= 1");
  if (!(eps_correct > 0.0 && eps_correct <= 1.0))
    throw std::invalid_argument("LeakageModel: eps_cor must lie in (0,1]");
  LeakageModel m;
  m.mode = Mode::shannon;
  m.efficiency = f;
  m.eps_cor = eps_correct;
  return m;
}

LeakageModel LeakageModel::fixed(double bits) {
  if (!(bits >= 0.0))
    throw std::invalid_argument("LeakageModel: fixed bits must be >= 0");
  LeakageModel m;
  m.mode = Mode::fixed;
  m.fixed_bits = bits;
  return m;
}

Eigen::MatrixXd worst_case_statistics(const NoiseThresholds& qhat, double delta,
                                      std::vector<std::string>* flags) {
  if (!(delta >= 0.0))
    throw std::invalid_argument("worst_case_statistics: delta must be >= 0");
  const int d = qhat.d.value();
  Eigen::MatrixXd q = Eigen::MatrixXd::Zero(d + 1, d);
  for (int j = 0; j <= d; ++j) {
    double mass = 0.0;
    for (int c = 1; c < d; ++c) {
      q(j, c) = std::min(qhat.entry(j, c) + delta, 1.0);
      mass += q(j, c);
    }
    if (mass > 1.0) {
      // inflated thresholds leave no room for the c = 0 outcome
      for (int c = 1; c < d; ++c) q(j, c) /= mass;
      q(j, 0) = 0.0;
      append_flag(flags, "q_row_renormalized[" + std::to_string(j) + "]");
    } else {
      q(j, 0) = 1.0 - mass;
    }
  }
  return q;
}

Eigen::MatrixXd bell_weights_from_statistics(const Eigen::MatrixXd& q, double n,
                                             PrimeDimension d,
                                             std::vector<std::string>* flags,
                                             double negativity_threshold) {
  Eigen::MatrixXd lambda = invert_statistics(q, n, d);
  double negativity = 0.0;
  for (int a = 0; a < lambda.rows(); ++a)
    for (int b = 0; b < lambda.cols(); ++b)
      if (lambda(a, b) < 0.0) negativity -= lambda(a, b);

  if (negativity > negativity_threshold * n)
    throw infeasible_statistics(
        "bell_weights_from_statistics: statistics inconsistent with any "
        "Bell-diagonal state (negativity " +
            std::to_string(negativity / n) + " of n)",
        negativity / n);

  if (negativity > 0.0) {
    lambda = lambda.cwiseMax(0.0);
    const double total = lambda.sum();
    if (total > 0.0) lambda *= n / total;
    append_flag(flags, "lambda_clamped");
  }
  return lambda;
}

double min_entropy_bound(const Eigen::MatrixXd& lambda, PrimeDimension dp,
                         std::vector<std::string>* flags) {
  const int d = dp.value();
  if (lambda.rows() != d || lambda.cols() != d)
    throw std::invalid_argument("min_entropy_bound: lambda must be d x d");
  if (lambda.minCoeff() < -1e-9)
    throw std::invalid_argument("min_entropy_bound: negative Bell weight");

  const double log2_d = std::log2(static_cast<double>(d));
  const double cap = static_cast<double>(d - 1) / d;
  double n = 0.0;
  double entropy_sum = 0.0;  // sum_alpha n_alpha h_d(x_alpha)
  bool capped = false;
  for (int alpha = 0; alpha < d; ++alpha) {
    const double n_alpha = lambda.row(alpha).sum();
    n += n_alpha;
    if (n_alpha <= 0.0) continue;
    double x = (lambda.row(alpha).sum() - lambda(alpha, 0)) / n_alpha;
    x = std::clamp(x, 0.0, 1.0);
    if (x > cap) {
      if (x > cap + 1e-12) capped = true;  // ignore boundary jitter
      x = cap;
    }
    entropy_sum += n_alpha * d_ary_entropy(x, dp);
  }
  if (capped) append_flag(flags, "hd_argument_capped");
  return n * log2_d - log2_d * entropy_sum;
}

double leak_ec(const LeakageModel& model, double n, const NoiseThresholds& qhat) {
  if (model.mode == LeakageModel::Mode::fixed) return model.fixed_bits;
  return model.efficiency * n * basis0_error_entropy(qhat) +
         log2_of_inverse(model.eps_cor);
}

std::int64_t key_length(double gamma_bits, double leak_bits, double eps) {
  const double raw = gamma_bits - leak_bits - 2.0 * log2_of_inverse(eps);
  if (raw <= 0.0) return 0;
  return static_cast<std::int64_t>(std::floor(raw));
}

KeyRateResult evaluate(const NoiseThresholds& qhat, std::int64_t n_total,
                       std::int64_t m, const SecurityTargets& targets,
                       const LeakageModel& leak, std::optional<double> c,
                       std::optional<double> beta) {
  const SamplingGeometry geom(n_total, m, qhat.d);
  const ConsistencyReport rep = verify_consistency(targets, geom, c, beta);

  KeyRateResult res;
  res.total_rounds = n_total;
  res.test_rounds = m;
  res.m_opt = m;
  res.delta_used = rep.dm.delta;
  res.c_used = rep.dm.c_used;
  res.beta_used = rep.dm.beta_used;
  res.achieved_security = rep.achieved;
  res.achieved_security_log = rep.achieved_log;
  if (!rep.third_term_dominated) res.flags.push_back("third_term_not_dominated");
  if (!rep.beta_condition_ok) res.flags.push_back("beta_condition_violated");

  const double n_key = static_cast<double>(geom.key_rounds());
  const Eigen::MatrixXd q = worst_case_statistics(qhat, res.delta_used, &res.flags);
  res.lambda = bell_weights_from_statistics(q, n_key, qhat.d, &res.flags);
  res.gamma_bits = min_entropy_bound(res.lambda, qhat.d, &res.flags);
  res.leak_bits = leak_ec(leak, n_key, qhat);
  res.key_length_bits = key_length(res.gamma_bits, res.leak_bits, targets.eps);
  res.rate = static_cast<double>(res.key_length_bits) / static_cast<double>(n_total);
  return res;
}

KeyRateResult optimize_m(const NoiseThresholds& qhat, std::int64_t n_total,
                         const SecurityTargets& targets, const LeakageModel& leak,
                         int threads, std::optional<double> c,
                         std::optional<double> beta) {
  if (n_total < 4) throw std::invalid_argument("optimize_m: need N >= 4");

  const auto evaluate_grid = [&](const std::vector<std::int64_t>& grid)
      -> std::vector<std::optional<KeyRateResult>> {
    std::vector<std::optional<KeyRateResult>> results(grid.size());
    parallel_for(static_cast<std::int64_t>(grid.size()), threads,
                 [&](std::int64_t i) {
                   try {
                     results[static_cast<std::size_t>(i)] = evaluate(
                         qhat, n_total, grid[static_cast<std::size_t>(i)],
                         targets, leak, c, beta);
                   } catch (const infeasible_statistics&) {
                     // point excluded from the search
                   }
                 });
    return results;
  };

  std::optional<KeyRateResult> best;
  bool skipped_infeasible = false;
  const auto reduce = [&](const std::vector<std::int64_t>& grid) {
    const auto results = evaluate_grid(grid);
    for (std::size_t i = 0; i < grid.size(); ++i) {
      if (!results[i].has_value()) {
        skipped_infeasible = true;
        continue;
      }
      const KeyRateResult& r = *results[i];
      if (!best || r.rate > best->rate ||
          (r.rate == best->rate && r.test_rounds < best->test_rounds))
        best = r;
    }
  };

  const std::int64_t m_max = n_total / 2;

  // coarse geometric pass
  std::vector<std::int64_t> coarse;
  {
    std::set<std::int64_t> seen;
    for (std::int64_t denom = 2;; denom *= 2) {
      const std::int64_t m = (n_total + denom - 1) / denom;  // ceil(N/denom)
      if (m < 1) break;
      if (m <= m_max && seen.insert(m).second) coarse.push_back(m);
      if (m == 1) break;
    }
  }
  reduce(coarse);

  // two linear refinement passes around the incumbent
  for (int pass = 0; pass < 2 && best; ++pass) {
    const std::int64_t center = best->test_rounds;
    const std::int64_t span = pass == 0 ? std::max<std::int64_t>(center / 2, 16)
                                        : std::max<std::int64_t>(center / 16, 16);
    const std::int64_t lo = std::max<std::int64_t>(1, center - span);
    const std::int64_t hi = std::min<std::int64_t>(m_max, center + span);
    std::vector<std::int64_t> grid;
    std::set<std::int64_t> seen;
    for (int i = 0; i < 32; ++i) {
      const std::int64_t m = lo + (hi - lo) * i / 31;
      if (seen.insert(m).second) grid.push_back(m);
    }
    reduce(grid);
  }

  if (!best) {
    // every grid point infeasible: report a zero-length result
    KeyRateResult res;
    res.total_rounds = n_total;
    res.flags.push_back("infeasible");
    return res;
  }
  best->m_opt = best->test_rounds;
  if (skipped_infeasible) best->flags.push_back("infeasible_points_skipped");
  return *best;
}

double asymptotic_rate(const NoiseThresholds& qhat, const LeakageModel& leak) {
  const Eigen::MatrixXd q = worst_case_statistics(qhat, 0.0);
  const Eigen::MatrixXd lambda = bell_weights_from_statistics(q, 1.0, qhat.d);
  const double gamma = min_entropy_bound(lambda, qhat.d);
  const double leak_per_symbol = leak.mode == LeakageModel::Mode::shannon
                                     ? leak.efficiency * basis0_error_entropy(qhat)
                                     : 0.0;
  return std::max(0.0, gamma - leak_per_symbol);
}

double asymptotic_noise_tolerance(PrimeDimension d, const LeakageModel& leak,
                                  double tol) {
  const double hi_limit = static_cast<double>(d.value() - 1) / d.value();
  double lo = 0.0, hi = hi_limit;
  if (asymptotic_rate(symmetric_thresholds(d, hi), leak) > 0.0) return hi;
  while (hi - lo > tol) {
    const double mid = 0.5 * (lo + hi);
    if (asymptotic_rate(symmetric_thresholds(d, mid), leak) > 0.0)
      lo = mid;
    else
      hi = mid;
  }
  return 0.5 * (lo + hi);
}

}  // namespace hdqkd
