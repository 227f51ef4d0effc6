#include "hdqkd/sweep.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "hdqkd/parallel.hpp"

namespace hdqkd {

namespace {

using nlohmann::json;

LeakageModel parse_leak(const json& j) {
  if (!j.is_object() || !j.contains("mode"))
    throw config_error("leak: expected object with a \"mode\" field");
  const std::string mode = j.at("mode").get<std::string>();
  if (mode == "shannon") {
    return LeakageModel::shannon(j.value("efficiency", 1.0),
                                 j.value("eps_cor", 1.0));
  }
  if (mode == "fixed") {
    if (!j.contains("bits")) throw config_error("leak: fixed mode needs \"bits\"");
    return LeakageModel::fixed(j.at("bits").get<double>());
  }
  throw config_error("leak.mode: expected \"shannon\" or \"fixed\", got \"" +
                     mode + "\"");
}

std::string join_flags(const std::vector<std::string>& flags) {
  std::string out;
  for (const auto& f : flags) {
    if (!out.empty()) out += '|';
    out += f;
  }
  return out;
}

}  // namespace

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.12g", v);
  return buf;
}

ScenarioConfig parse_scenario(const std::string& json_text) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw config_error(std::string("config parse error: ") + e.what());
  }

  ScenarioConfig cfg;
  try {
    cfg.d = j.at("d").get<int>();
    if (!PrimeDimension::is_prime(cfg.d))
      throw config_error("d: must be a prime >= 2");
    cfg.eps = j.value("eps", 1e-14);
    cfg.eps_sec = j.value("eps_sec", 1e-12);
    if (!(cfg.eps > 0.0 && cfg.eps < cfg.eps_sec && cfg.eps_sec < 1.0))
      throw config_error("eps/eps_sec: need 0 < eps < eps_sec < 1");

    const json& noise = j.at("noise");
    if (noise.contains("symmetric")) {
      cfg.noise_kind = ScenarioConfig::NoiseKind::symmetric;
      cfg.symmetric_q = noise.at("symmetric").get<double>();
    } else if (noise.contains("matrix")) {
      cfg.noise_kind = ScenarioConfig::NoiseKind::matrix;
      const auto rows = noise.at("matrix").get<std::vector<std::vector<double>>>();
      if (static_cast<int>(rows.size()) != cfg.d + 1)
        throw config_error("noise.matrix: expected d+1 rows");
      cfg.qhat_matrix = Eigen::MatrixXd(cfg.d + 1, cfg.d - 1);
      for (int r = 0; r < cfg.d + 1; ++r) {
        if (static_cast<int>(rows[static_cast<std::size_t>(r)].size()) != cfg.d - 1)
          throw config_error("noise.matrix: row " + std::to_string(r) +
                             " must have d-1 entries");
        for (int c = 0; c < cfg.d - 1; ++c)
          cfg.qhat_matrix(r, c) = rows[static_cast<std::size_t>(r)][static_cast<std::size_t>(c)];
      }
    } else if (noise.contains("asymmetric")) {
      cfg.noise_kind = ScenarioConfig::NoiseKind::asymmetric;
      const json& a = noise.at("asymmetric");
      cfg.asym_basis = a.at("basis").get<int>();
      if (cfg.asym_basis < 0 || cfg.asym_basis > cfg.d)
        throw config_error("noise.asymmetric.basis: out of range");
      cfg.asym_others = a.at("others").get<double>();
      cfg.asym_value = a.value("value", cfg.asym_others);
    } else {
      throw config_error("noise: expected symmetric | matrix | asymmetric");
    }

    if (j.contains("leak")) cfg.leak = parse_leak(j.at("leak"));

    const json& sweep = j.at("sweep");
    const std::string axis = sweep.at("axis").get<std::string>();
    if (axis == "signals" || axis == "N") {
      cfg.axis = ScenarioConfig::Axis::signals;
    } else if (axis == "noise" || axis == "Q") {
      cfg.axis = ScenarioConfig::Axis::noise;
      if (!sweep.contains("N"))
        throw config_error("sweep: noise-axis sweeps need a fixed \"N\"");
      cfg.n_signals = static_cast<std::int64_t>(sweep.at("N").get<double>());
      if (cfg.n_signals < 4) throw config_error("sweep.N: need N >= 4");
      if (cfg.noise_kind == ScenarioConfig::NoiseKind::matrix)
        throw config_error("sweep: noise axis is incompatible with noise.matrix");
    } else {
      throw config_error("sweep.axis: expected \"signals\" or \"noise\"");
    }
    cfg.axis_values = sweep.at("values").get<std::vector<double>>();
    if (cfg.axis_values.empty()) throw config_error("sweep.values: empty");
    for (std::size_t i = 1; i < cfg.axis_values.size(); ++i)
      if (!(cfg.axis_values[i] > cfg.axis_values[i - 1]))
        throw config_error("sweep.values: must be strictly increasing");

    if (j.contains("m")) {
      const json& m = j.at("m");
      if (m.is_string() && m.get<std::string>() == "optimize") {
        cfg.optimize_m_policy = true;
      } else if (m.is_number()) {
        cfg.optimize_m_policy = false;
        cfg.m_fixed = static_cast<std::int64_t>(m.get<double>());
        if (cfg.m_fixed < 1) throw config_error("m: fixed m must be >= 1");
      } else {
        throw config_error("m: expected \"optimize\" or an integer");
      }
    }

    cfg.seed = j.value("seed", std::uint64_t{0});
    if (j.contains("c")) cfg.c = j.at("c").get<double>();
    if (j.contains("beta")) cfg.beta = j.at("beta").get<double>();
  } catch (const json::exception& e) {
    throw config_error(std::string("config field error: ") + e.what());
  }
  return cfg;
}

ScenarioConfig parse_scenario_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw config_error("cannot open config file: " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_scenario(buf.str());
}

NoiseThresholds thresholds_for_point(const ScenarioConfig& config,
                                     double axis_value) {
  const PrimeDimension d(config.d);
  const bool noise_axis = config.axis == ScenarioConfig::Axis::noise;
  switch (config.noise_kind) {
    case ScenarioConfig::NoiseKind::symmetric:
      return symmetric_thresholds(d, noise_axis ? axis_value : config.symmetric_q);
    case ScenarioConfig::NoiseKind::matrix:
      return NoiseThresholds(d, config.qhat_matrix);
    case ScenarioConfig::NoiseKind::asymmetric: {
      const double varying = noise_axis ? axis_value : config.asym_value;
      Eigen::MatrixXd m = Eigen::MatrixXd::Constant(
          config.d + 1, config.d - 1, config.asym_others / (config.d - 1));
      for (int c = 0; c < config.d - 1; ++c)
        m(config.asym_basis, c) = varying / (config.d - 1);
      return NoiseThresholds(d, std::move(m));
    }
  }
  throw config_error("unreachable noise kind");
}

std::vector<SweepRow> run_sweep(const ScenarioConfig& config, int threads) {
  const SecurityTargets targets(config.eps, config.eps_sec);
  const auto n_points = static_cast<std::int64_t>(config.axis_values.size());
  std::vector<SweepRow> rows(static_cast<std::size_t>(n_points));

  parallel_for(n_points, threads, [&](std::int64_t i) {
    const double axis_value = config.axis_values[static_cast<std::size_t>(i)];
    SweepRow row;
    row.axis = axis_value;
    const std::int64_t n_total =
        config.axis == ScenarioConfig::Axis::signals
            ? static_cast<std::int64_t>(std::llround(axis_value))
            : config.n_signals;
    try {
      const NoiseThresholds qhat = thresholds_for_point(config, axis_value);
      const KeyRateResult res =
          config.optimize_m_policy
              ? optimize_m(qhat, n_total, targets, config.leak, 1, config.c,
                           config.beta)
              : evaluate(qhat, n_total, config.m_fixed, targets, config.leak,
                         config.c, config.beta);
      row.rate = res.rate;
      row.ell = res.key_length_bits;
      row.m_opt = res.m_opt;
      row.delta = res.delta_used;
      row.flags = join_flags(res.flags);
    } catch (const infeasible_statistics&) {
      row.flags = "infeasible";
    }
    rows[static_cast<std::size_t>(i)] = std::move(row);
  });
  return rows;
}

std::string sweep_csv(const std::vector<SweepRow>& rows) {
  std::string out = "axis,rate,ell,m_opt,delta,flags\n";
  for (const auto& r : rows) {
    out += format_double(r.axis);
    out += ',';
    out += format_double(r.rate);
    out += ',';
    out += std::to_string(r.ell);
    out += ',';
    out += std::to_string(r.m_opt);
    out += ',';
    out += format_double(r.delta);
    out += ',';
    out += r.flags;
    out += '\n';
  }
  return out;
}

std::vector<IncreasingInterval> detect_nonmonotonicity(
    const std::vector<SweepRow>& rows) {
  if (rows.size() < 3)
    throw std::invalid_argument("detect_nonmonotonicity: need >= 3 rows");
  std::vector<IncreasingInterval> out;
  for (std::size_t i = 1; i < rows.size(); ++i) {
    if (rows[i].rate > rows[i - 1].rate)
      out.push_back({rows[i - 1].axis, rows[i].axis, rows[i - 1].rate,
                     rows[i].rate});
  }
  return out;
}

}  // namespace hdqkd
