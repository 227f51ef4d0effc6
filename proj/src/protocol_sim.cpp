#include "hdqkd/protocol_sim.hpp"

#include <cmath>
#include <cstdio>

#include "hdqkd/parallel.hpp"

namespace hdqkd {

ChannelModel::ChannelModel(PrimeDimension dim, Eigen::MatrixXd probs)
    : d(dim), p(std::move(probs)) {
  const int dv = d.value();
  if (p.rows() != dv || p.cols() != dv)
    throw std::invalid_argument("ChannelModel: probabilities must be d x d");
  if (p.minCoeff() < 0.0)
    throw std::invalid_argument("ChannelModel: negative probability");
  if (std::abs(p.sum() - 1.0) > 1e-9)
    throw std::invalid_argument("ChannelModel: probabilities must sum to 1");
}

ChannelModel depolarizing_channel(PrimeDimension d, double q_total) {
  const int dv = d.value();
  const double p00 = ((dv + 1.0) * (1.0 - q_total) - 1.0) / dv;
  if (p00 < 0.0)
    throw std::invalid_argument(
        "depolarizing_channel: Q > d/(d+1) is not Bell-diagonal feasible");
  Eigen::MatrixXd p =
      Eigen::MatrixXd::Constant(dv, dv, q_total / (dv * (dv - 1.0)));
  p(0, 0) = p00;
  return ChannelModel(d, std::move(p));
}

ChannelModel channel_from_lambda(PrimeDimension d, const Eigen::MatrixXd& lambda) {
  const double total = lambda.sum();
  if (!(total > 0.0))
    throw std::invalid_argument("channel_from_lambda: weights sum to zero");
  return ChannelModel(d, lambda / total);
}

Eigen::MatrixXd ObservedStats::frequencies() const {
  Eigen::MatrixXd freq = Eigen::MatrixXd::Zero(counts.rows(), counts.cols());
  for (int j = 0; j < counts.rows(); ++j)
    if (basis_counts[static_cast<std::size_t>(j)] > 0)
      freq.row(j) = counts.row(j) /
                    static_cast<double>(basis_counts[static_cast<std::size_t>(j)]);
  return freq;
}

TestStage sample_round_outcomes(const ChannelModel& channel, std::int64_t n_total,
                                std::int64_t m, std::uint64_t seed, int threads) {
  const int d = channel.d.value();

  // cumulative label distribution, label index alpha*d + beta
  std::vector<double> cum(static_cast<std::size_t>(d) * d);
  {
    double acc = 0.0;
    for (int a = 0; a < d; ++a)
      for (int b = 0; b < d; ++b) {
        acc += channel.p(a, b);
        cum[static_cast<std::size_t>(a * d + b)] = acc;
      }
    cum.back() = 1.0;
  }

  TestStage stage;
  {
    Rng rng_subset = Rng::derive(seed, stream_tag::subset);
    stage.draw.test_positions = draw_subset(n_total, m, rng_subset);
    Rng rng_bases = Rng::derive(seed, stream_tag::bases);
    stage.draw.bases.resize(static_cast<std::size_t>(m));
    for (auto& b : stage.draw.bases)
      b = static_cast<int>(rng_bases.below(static_cast<std::uint64_t>(d + 1)));
  }

  stage.test_labels.resize(static_cast<std::size_t>(m));
  stage.outcomes.resize(static_cast<std::size_t>(m));
  parallel_for(m, threads, [&](std::int64_t i) {
    const std::int64_t round = stage.draw.test_positions[static_cast<std::size_t>(i)];
    Rng rng = Rng::derive(seed, stream_tag::labels, static_cast<std::uint64_t>(round));
    const double u = rng.next_double();
    int label = 0;
    while (cum[static_cast<std::size_t>(label)] <= u && label + 1 < d * d) ++label;
    const BellLabel bl{label / d, label % d};
    stage.test_labels[static_cast<std::size_t>(i)] = bl;
    // each Bell label yields exactly one outcome per basis
    stage.outcomes[static_cast<std::size_t>(i)] =
        pcj_symbol(channel.d, stage.draw.bases[static_cast<std::size_t>(i)], bl);
  });

  stage.observed.counts = Eigen::MatrixXd::Zero(d + 1, d);
  stage.observed.basis_counts.assign(static_cast<std::size_t>(d) + 1, 0);
  for (std::int64_t i = 0; i < m; ++i) {
    const int j = stage.draw.bases[static_cast<std::size_t>(i)];
    ++stage.observed.basis_counts[static_cast<std::size_t>(j)];
    stage.observed.counts(j, stage.outcomes[static_cast<std::size_t>(i)]) += 1.0;
  }
  return stage;
}

AbortDecision abort_check(const ObservedStats& observed,
                          const NoiseThresholds& qhat) {
  const int d = qhat.d.value();
  AbortDecision decision;
  const Eigen::MatrixXd freq = observed.frequencies();
  for (int j = 0; j <= d; ++j) {
    if (observed.basis_counts[static_cast<std::size_t>(j)] == 0) {
      decision.aborted = true;
      decision.reasons.push_back("empty_basis:" + std::to_string(j));
      continue;
    }
    for (int c = 1; c < d; ++c) {
      if (freq(j, c) > qhat.entry(j, c)) {
        decision.aborted = true;
        char buf[64];  // comma-free so the field stays one CSV column
        std::snprintf(buf, sizeof(buf), "noise:%d:%d:%.6g", j, c, freq(j, c));
        decision.reasons.emplace_back(buf);
      }
    }
  }
  return decision;
}

SimulationRun run_protocol(const ChannelModel& channel, std::int64_t n_total,
                           std::int64_t m, const NoiseThresholds& qhat,
                           const SecurityTargets& targets,
                           const LeakageModel& leak, std::uint64_t seed,
                           int threads) {
  SimulationRun run;
  run.seed = seed;
  run.total_rounds = n_total;
  run.test_rounds = m;

  TestStage stage = sample_round_outcomes(channel, n_total, m, seed, threads);
  run.observed = std::move(stage.observed);

  AbortDecision decision = abort_check(run.observed, qhat);
  run.aborted = decision.aborted;
  run.reasons = std::move(decision.reasons);
  if (!run.aborted)
    run.key = evaluate(qhat, n_total, m, targets, leak);
  return run;
}

}  // namespace hdqkd
