// Command-line surface for the finite-key analysis engine: single-scenario
// key rates, sampling-bound diagnostics, figure-style sweeps, Monte Carlo
// verification of the sampling bounds, protocol simulation, and the MUB
// outcome-set table. All output is deterministic for a fixed seed and any
// thread count.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "hdqkd/entropy.hpp"
#include "hdqkd/keyrate.hpp"
#include "hdqkd/mub.hpp"
#include "hdqkd/protocol_sim.hpp"
#include "hdqkd/sampling_bounds.hpp"
#include "hdqkd/sampling_mc.hpp"
#include "hdqkd/sweep.hpp"

namespace {

using hdqkd::format_double;
using nlohmann::json;

constexpr int kExitConfig = 2;
constexpr int kExitInfeasible = 3;

struct GlobalOpts {
  std::string format = "csv";
  std::string out_path;
  std::uint64_t seed = 0;
  int threads = 0;  // 0: hardware concurrency
  bool strict = false;

  int resolved_threads() const {
    if (threads > 0) return threads;
    const unsigned hw = std::thread::hardware_concurrency();
    return hw == 0 ? 1 : static_cast<int>(hw);
  }
};

void write_output(const GlobalOpts& g, const std::string& text) {
  if (g.out_path.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream out(g.out_path, std::ios::binary);
  if (!out) throw hdqkd::config_error("cannot open output file: " + g.out_path);
  out << text;
}

std::pair<std::string, std::string> split_spec(const std::string& s) {
  const auto pos = s.find(':');
  if (pos == std::string::npos) return {s, ""};
  return {s.substr(0, pos), s.substr(pos + 1)};
}

double parse_double(const std::string& s, const std::string& what) {
  try {
    std::size_t used = 0;
    const double v = std::stod(s, &used);
    if (used != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw hdqkd::config_error(what + ": cannot parse number \"" + s + "\"");
  }
}

json load_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw hdqkd::config_error("cannot open file: " + path);
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw hdqkd::config_error(path + ": " + e.what());
  }
}

hdqkd::NoiseThresholds thresholds_from_json(const json& j) {
  if (!j.contains("d") || !j.contains("qhat"))
    throw hdqkd::config_error("thresholds file needs fields \"d\" and \"qhat\"");
  const int d = j.at("d").get<int>();
  const auto rows = j.at("qhat").get<std::vector<std::vector<double>>>();
  if (static_cast<int>(rows.size()) != d + 1)
    throw hdqkd::config_error("thresholds: qhat must have d+1 rows");
  Eigen::MatrixXd m(d + 1, d - 1);
  for (int r = 0; r <= d; ++r) {
    if (static_cast<int>(rows[static_cast<std::size_t>(r)].size()) != d - 1)
      throw hdqkd::config_error("thresholds: each qhat row needs d-1 entries");
    for (int c = 0; c < d - 1; ++c)
      m(r, c) = rows[static_cast<std::size_t>(r)][static_cast<std::size_t>(c)];
  }
  return hdqkd::NoiseThresholds(hdqkd::PrimeDimension(d), std::move(m));
}

hdqkd::NoiseThresholds parse_thresholds_spec(const std::string& spec, int d) {
  const auto [kind, value] = split_spec(spec);
  if (kind == "symmetric")
    return hdqkd::symmetric_thresholds(hdqkd::PrimeDimension(d),
                                       parse_double(value, "--noise"));
  if (kind == "matrix") {
    auto t = thresholds_from_json(load_json_file(value));
    if (t.d.value() != d)
      throw hdqkd::config_error("thresholds file dimension disagrees with --d");
    return t;
  }
  throw hdqkd::config_error("noise spec: expected symmetric:<Q> or matrix:<path>");
}

hdqkd::LeakageModel parse_leak_spec(const std::string& spec, double eps_cor) {
  const auto [kind, value] = split_spec(spec);
  if (kind == "shannon")
    return hdqkd::LeakageModel::shannon(value.empty() ? 1.0 : parse_double(value, "--leak"),
                                        eps_cor);
  if (kind == "fixed")
    return hdqkd::LeakageModel::fixed(parse_double(value, "--leak"));
  throw hdqkd::config_error("leak spec: expected shannon[:f] or fixed:<bits>");
}

std::string join(const std::vector<std::string>& parts, char sep) {
  std::string out;
  for (const auto& p : parts) {
    if (!out.empty()) out += sep;
    out += p;
  }
  return out;
}

json lambda_to_json(const Eigen::MatrixXd& lambda) {
  json rows = json::array();
  for (int a = 0; a < lambda.rows(); ++a) {
    json row = json::array();
    for (int b = 0; b < lambda.cols(); ++b) row.push_back(lambda(a, b));
    rows.push_back(std::move(row));
  }
  return rows;
}

std::string lambda_to_csv_field(const Eigen::MatrixXd& lambda) {
  std::string out;
  for (int a = 0; a < lambda.rows(); ++a)
    for (int b = 0; b < lambda.cols(); ++b) {
      if (!out.empty()) out += ';';
      out += format_double(lambda(a, b));
    }
  return out;
}

// ---------------------------------------------------------------- keyrate --

int cmd_keyrate(const GlobalOpts& g, int d, std::int64_t n_total,
                std::int64_t m, bool optimize, double eps, double eps_sec,
                const std::string& noise_spec, const std::string& leak_spec,
                double eps_cor, std::optional<double> c,
                std::optional<double> beta) {
  const hdqkd::NoiseThresholds qhat = parse_thresholds_spec(noise_spec, d);
  const hdqkd::SecurityTargets targets(eps, eps_sec);
  const hdqkd::LeakageModel leak = parse_leak_spec(leak_spec, eps_cor);

  hdqkd::KeyRateResult res;
  bool infeasible = false;
  try {
    res = optimize ? hdqkd::optimize_m(qhat, n_total, targets, leak,
                                       g.resolved_threads(), c, beta)
                   : hdqkd::evaluate(qhat, n_total, m, targets, leak, c, beta);
  } catch (const hdqkd::infeasible_statistics& e) {
    infeasible = true;
    res = hdqkd::KeyRateResult{};
    res.total_rounds = n_total;
    res.test_rounds = m;
    res.flags = {"infeasible"};
    std::cerr << "infeasible: " << e.what() << "\n";
  }
  if (res.lambda.size() == 0) res.lambda = Eigen::MatrixXd::Zero(d, d);

  const std::string flags = join(res.flags, '|');
  if (g.format == "json") {
    json out{{"d", d},
             {"N", res.total_rounds},
             {"m", res.test_rounds},
             {"m_opt", res.m_opt},
             {"ell", res.key_length_bits},
             {"rate", res.rate},
             {"delta", res.delta_used},
             {"c", res.c_used},
             {"beta", res.beta_used},
             {"gamma_bits", res.gamma_bits},
             {"leak_bits", res.leak_bits},
             {"achieved_security", res.achieved_security},
             {"lambda", lambda_to_json(res.lambda)},
             {"flags", res.flags}};
    write_output(g, out.dump(2) + "\n");
  } else {
    std::string out =
        "d,N,m,m_opt,ell,rate,delta,c,beta,gamma_bits,leak_bits,"
        "achieved_security,flags,lambda\n";
    out += std::to_string(d) + ',' + std::to_string(res.total_rounds) + ',' +
           std::to_string(res.test_rounds) + ',' + std::to_string(res.m_opt) +
           ',' + std::to_string(res.key_length_bits) + ',' +
           format_double(res.rate) + ',' + format_double(res.delta_used) + ',' +
           format_double(res.c_used) + ',' + format_double(res.beta_used) + ',' +
           format_double(res.gamma_bits) + ',' + format_double(res.leak_bits) +
           ',' + format_double(res.achieved_security) + ',' + flags + ',' +
           lambda_to_csv_field(res.lambda) + '\n';
    write_output(g, out);
  }
  return infeasible && g.strict ? kExitInfeasible : 0;
}

// ----------------------------------------------------------------- bounds --

int cmd_bounds(const GlobalOpts& g, int d, std::int64_t n_total, std::int64_t m,
               double eps, double eps_sec, std::optional<double> c,
               std::optional<double> beta) {
  const hdqkd::PrimeDimension dim(d);
  const hdqkd::SamplingGeometry geom(n_total, m, dim);
  const hdqkd::SecurityTargets targets(eps, eps_sec);
  const auto rep = hdqkd::verify_consistency(targets, geom, c, beta);
  const double cg = hdqkd::c_gamma(geom, rep.dm.beta_used);
  const std::string branch = rep.dm.first_branch ? "first" : "second";

  if (g.format == "json") {
    json out{{"d", d},
             {"N", n_total},
             {"m", m},
             {"eps", eps},
             {"eps_sec", eps_sec},
             {"c", rep.dm.c_used},
             {"beta", rep.dm.beta_used},
             {"c_gamma", cg},
             {"chi_d", rep.dm.chi},
             {"delta_min", rep.dm.delta},
             {"branch", branch},
             {"achieved_security", rep.achieved},
             {"achieved_security_loose", rep.achieved_loose},
             {"slack", rep.slack},
             {"within_target", rep.within_target},
             {"third_term_dominated", rep.third_term_dominated},
             {"beta_condition_ok", rep.beta_condition_ok}};
    write_output(g, out.dump(2) + "\n");
  } else {
    std::string out =
        "d,N,m,c,beta,c_gamma,chi_d,delta_min,branch,achieved_security,"
        "achieved_security_loose,within_target,third_term_dominated,"
        "beta_condition_ok\n";
    out += std::to_string(d) + ',' + std::to_string(n_total) + ',' +
           std::to_string(m) + ',' + format_double(rep.dm.c_used) + ',' +
           format_double(rep.dm.beta_used) + ',' + format_double(cg) + ',' +
           format_double(rep.dm.chi) + ',' + format_double(rep.dm.delta) + ',' +
           branch + ',' + format_double(rep.achieved) + ',' +
           format_double(rep.achieved_loose) + ',' +
           (rep.within_target ? "true" : "false") + ',' +
           (rep.third_term_dominated ? "true" : "false") + ',' +
           (rep.beta_condition_ok ? "true" : "false") + '\n';
    write_output(g, out);
  }
  return 0;
}

// ------------------------------------------------------------------ sweep --

int cmd_sweep(const GlobalOpts& g, const std::string& config_path) {
  hdqkd::ScenarioConfig cfg = hdqkd::parse_scenario_file(config_path);
  const auto rows = hdqkd::run_sweep(cfg, g.resolved_threads());

  bool any_infeasible = false;
  for (const auto& r : rows)
    if (r.flags.find("infeasible") != std::string::npos) any_infeasible = true;

  const bool noise_axis = cfg.axis == hdqkd::ScenarioConfig::Axis::noise;
  std::vector<hdqkd::IncreasingInterval> intervals;
  if (noise_axis && rows.size() >= 3) intervals = hdqkd::detect_nonmonotonicity(rows);

  if (g.format == "json") {
    json jrows = json::array();
    for (const auto& r : rows)
      jrows.push_back(json{{"axis", r.axis},
                           {"rate", r.rate},
                           {"ell", r.ell},
                           {"m_opt", r.m_opt},
                           {"delta", r.delta},
                           {"flags", r.flags}});
    json jintervals = json::array();
    for (const auto& iv : intervals)
      jintervals.push_back(json{{"axis_from", iv.axis_from},
                                {"axis_to", iv.axis_to},
                                {"rate_from", iv.rate_from},
                                {"rate_to", iv.rate_to}});
    json out{{"rows", jrows}, {"increasing_intervals", jintervals}};
    write_output(g, out.dump(2) + "\n");
  } else {
    std::string out = hdqkd::sweep_csv(rows);
    for (const auto& iv : intervals)
      out += "# increasing-interval," + format_double(iv.axis_from) + ',' +
             format_double(iv.axis_to) + ',' + format_double(iv.rate_from) +
             ',' + format_double(iv.rate_to) + '\n';
    write_output(g, out);
  }
  return any_infeasible && g.strict ? kExitInfeasible : 0;
}

// --------------------------------------------------------------- simulate --

int cmd_simulate(const GlobalOpts& g, int d, std::int64_t n_total,
                 std::int64_t m, const std::string& channel_spec,
                 const std::string& thresholds_spec, std::int64_t repeats,
                 double eps, double eps_sec, const std::string& leak_spec,
                 double eps_cor) {
  const hdqkd::PrimeDimension dim(d);
  hdqkd::ChannelModel channel = [&] {
    const auto [kind, value] = split_spec(channel_spec);
    if (kind == "depolarizing")
      return hdqkd::depolarizing_channel(dim, parse_double(value, "--channel"));
    if (kind == "lambda") {
      const json j = load_json_file(value);
      if (!j.contains("lambda"))
        throw hdqkd::config_error("lambda file needs field \"lambda\"");
      const auto rows = j.at("lambda").get<std::vector<std::vector<double>>>();
      Eigen::MatrixXd lam(d, d);
      if (static_cast<int>(rows.size()) != d)
        throw hdqkd::config_error("lambda: need d rows");
      for (int a = 0; a < d; ++a) {
        if (static_cast<int>(rows[static_cast<std::size_t>(a)].size()) != d)
          throw hdqkd::config_error("lambda: need d columns");
        for (int b = 0; b < d; ++b)
          lam(a, b) = rows[static_cast<std::size_t>(a)][static_cast<std::size_t>(b)];
      }
      return hdqkd::channel_from_lambda(dim, lam);
    }
    throw hdqkd::config_error(
        "channel spec: expected depolarizing:<Q> or lambda:<path>");
  }();

  hdqkd::NoiseThresholds qhat = [&] {
    const auto [kind, value] = split_spec(thresholds_spec);
    if (kind == "symmetric")
      return hdqkd::symmetric_thresholds(dim, parse_double(value, "--thresholds"));
    return thresholds_from_json(load_json_file(thresholds_spec));
  }();
  if (qhat.d.value() != d)
    throw hdqkd::config_error("thresholds dimension disagrees with --d");

  const hdqkd::SecurityTargets targets(eps, eps_sec);
  const hdqkd::LeakageModel leak = parse_leak_spec(leak_spec, eps_cor);

  std::string header = "seed,aborted,reasons";
  for (int j = 0; j <= d; ++j)
    for (int c = 1; c < d; ++c)
      header += ",w_" + std::to_string(j) + "_" + std::to_string(c);
  header += ",ell,rate\n";

  std::string out = header;
  bool any_infeasible = false;
  for (std::int64_t r = 0; r < repeats; ++r) {
    const std::uint64_t run_seed = g.seed + static_cast<std::uint64_t>(r);
    hdqkd::SimulationRun run;
    try {
      run = hdqkd::run_protocol(channel, n_total, m, qhat, targets, leak,
                                run_seed, g.resolved_threads());
    } catch (const hdqkd::infeasible_statistics&) {
      any_infeasible = true;
      out += std::to_string(run_seed) + ",true,infeasible\n";
      continue;
    }
    const Eigen::MatrixXd freq = run.observed.frequencies();
    out += std::to_string(run_seed) + ',' + (run.aborted ? "true" : "false") +
           ',' + join(run.reasons, ';');
    for (int j = 0; j <= d; ++j)
      for (int c = 1; c < d; ++c) out += ',' + format_double(freq(j, c));
    if (run.key) {
      out += ',' + std::to_string(run.key->key_length_bits) + ',' +
             format_double(run.key->rate);
    } else {
      out += ",0,0";
    }
    out += '\n';
  }
  write_output(g, out);
  return any_infeasible && g.strict ? kExitInfeasible : 0;
}

// -------------------------------------------------------- verify-sampling --

int cmd_verify_sampling(const GlobalOpts& g, int d, std::int64_t n_total,
                        std::int64_t m, const std::string& delta_grid,
                        std::int64_t trials, const std::string& family_name,
                        int j_opt, int c_opt, double confidence) {
  const hdqkd::PrimeDimension dim(d);
  std::vector<double> deltas;
  {
    std::stringstream ss(delta_grid);
    std::string tok;
    while (std::getline(ss, tok, ','))
      deltas.push_back(parse_double(tok, "--delta-grid"));
    if (deltas.empty()) throw hdqkd::config_error("--delta-grid: empty");
  }
  const hdqkd::WordFamily family = hdqkd::word_family_from_name(family_name);
  const hdqkd::BellWord word = hdqkd::make_test_word(family, n_total, dim, g.seed);
  const hdqkd::SamplingGeometry geom(n_total, m, dim);
  const double cg = hdqkd::c_gamma(geom);
  const double beta = hdqkd::default_beta(dim);

  std::vector<std::pair<int, int>> pairs;
  if (j_opt >= 0 && c_opt >= 1) {
    pairs.emplace_back(j_opt, c_opt);
  } else {
    for (int j = 0; j <= d; ++j)
      for (int c = 1; c < d; ++c) pairs.emplace_back(j, c);
  }

  std::string out = "# m_j=0 draws count as failures (conservative convention)\n";
  out += "delta,j,c,trials,failures,upper99,analytic_bound_log,dominated\n";
  for (const double delta : deltas) {
    const double analytic_log = hdqkd::simple_strategy_error_log(
        geom, hdqkd::ConfidenceParams{delta, cg, beta});
    for (const auto& [j, c] : pairs) {
      const auto rep = hdqkd::estimate_failure(word, m, delta, j, c, trials,
                                               g.seed, confidence,
                                               g.resolved_threads());
      const bool dominated =
          rep.upper_limit <= std::min(1.0, std::exp(analytic_log));
      out += format_double(delta) + ',' + std::to_string(j) + ',' +
             std::to_string(c) + ',' + std::to_string(rep.trials) + ',' +
             std::to_string(rep.failures) + ',' +
             format_double(rep.upper_limit) + ',' +
             format_double(analytic_log) + ',' + (dominated ? "true" : "false") +
             '\n';
    }
  }
  write_output(g, out);
  return 0;
}

// -------------------------------------------------------------- mub-table --

int cmd_mub_table(const GlobalOpts& g, int d, bool format_explicit) {
  const hdqkd::PrimeDimension dim(d);
  const hdqkd::MubSystem mub(dim);
  // aligned text unless a format was asked for
  const std::string format = format_explicit ? g.format : "text";

  struct Row {
    int j, c;
    std::string labels;
    bool oracle_match;
    double max_residual;
  };
  std::vector<Row> rows;
  for (int j = 0; j <= d; ++j) {
    for (int c = 0; c < d; ++c) {
      const auto closed = hdqkd::pcj_closed_form(dim, j, c);
      std::string labels;
      for (const auto& label : closed) {
        if (!labels.empty()) labels += ';';
        labels += std::to_string(label.alpha) + ':' + std::to_string(label.beta);
      }
      bool match = true;
      double residual = 0.0;
      for (int alpha = 0; alpha < d; ++alpha)
        for (int beta = 0; beta < d; ++beta) {
          const hdqkd::BellLabel label{alpha, beta};
          const double p = mub.outcome_probability(j, c, label);
          const bool in_closed = hdqkd::pcj_symbol(dim, j, label) == c;
          residual = std::max(residual, std::abs(p - (in_closed ? 1.0 : 0.0)));
          if (in_closed != (p > 0.5)) match = false;
        }
      rows.push_back({j, c, labels, match, residual});
    }
  }

  if (format == "csv") {
    std::string out = "j,c,labels,oracle_match,max_prob_residual\n";
    for (const auto& r : rows)
      out += std::to_string(r.j) + ',' + std::to_string(r.c) + ',' + r.labels +
             ',' + (r.oracle_match ? "true" : "false") + ',' +
             format_double(r.max_residual) + '\n';
    write_output(g, out);
  } else if (format == "json") {
    json jrows = json::array();
    for (const auto& r : rows)
      jrows.push_back(json{{"j", r.j},
                           {"c", r.c},
                           {"labels", r.labels},
                           {"oracle_match", r.oracle_match},
                           {"max_prob_residual", r.max_residual}});
    json out{{"d", d},
             {"max_eigen_residual", mub.max_eigen_residual()},
             {"max_mub_deviation", mub.max_mub_deviation()},
             {"max_povm_completeness_residual", mub.max_povm_completeness_residual()},
             {"sets", jrows}};
    write_output(g, out.dump(2) + "\n");
  } else {
    std::ostringstream out;
    out << "MUB outcome sets, d=" << d << "\n";
    out << "eigen residual          " << format_double(mub.max_eigen_residual()) << "\n";
    out << "mub overlap deviation   " << format_double(mub.max_mub_deviation()) << "\n";
    out << "povm completeness resid " << format_double(mub.max_povm_completeness_residual()) << "\n";
    for (const auto& r : rows) {
      char line[256];
      std::snprintf(line, sizeof(line), "j=%-2d c=%-2d  P={%s}  oracle=%s  residual=%s\n",
                    r.j, r.c, r.labels.c_str(), r.oracle_match ? "ok" : "MISMATCH",
                    format_double(r.max_residual).c_str());
      out << line;
    }
    write_output(g, out.str());
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"finite-key analysis for the (d+1)-MUB high-dimensional BB84 protocol"};
  app.require_subcommand(1);
  app.fallthrough();

  GlobalOpts g;
  app.add_option("--format", g.format, "output format")
      ->check(CLI::IsMember({"csv", "json", "text"}))
      ->capture_default_str();
  app.add_option("--out", g.out_path, "write output to file instead of stdout");
  app.add_option("--seed", g.seed, "master seed")->capture_default_str();
  app.add_option("--threads", g.threads, "worker threads (0 = hardware)");
  app.add_flag("--strict", g.strict, "exit 3 on infeasible statistics");

  // keyrate
  auto* kr = app.add_subcommand("keyrate", "single-scenario key length and rate");
  int kr_d = 2;
  std::int64_t kr_n = 0, kr_m = 0;
  bool kr_opt = false;
  double kr_eps = 1e-14, kr_eps_sec = 1e-12, kr_eps_cor = 1.0;
  std::string kr_noise, kr_leak = "shannon:1.0";
  double kr_c = -1.0, kr_beta = -1.0;
  kr->add_option("--d", kr_d, "prime dimension")->required();
  kr->add_option("--N", kr_n, "total rounds")->required();
  kr->add_option("--m", kr_m, "test rounds (omit with --optimize-m)");
  kr->add_flag("--optimize-m", kr_opt, "grid-search m");
  kr->add_option("--eps", kr_eps, "PA parameter")->capture_default_str();
  kr->add_option("--eps-sec", kr_eps_sec, "overall security target")->capture_default_str();
  kr->add_option("--noise", kr_noise, "symmetric:<Q> | matrix:<path>")->required();
  kr->add_option("--leak", kr_leak, "shannon[:f] | fixed:<bits>")->capture_default_str();
  kr->add_option("--eps-cor", kr_eps_cor, "correctness hash parameter")->capture_default_str();
  kr->add_option("--c", kr_c, "split ratio override");
  kr->add_option("--beta", kr_beta, "subset slack override");

  // bounds
  auto* bd = app.add_subcommand("bounds", "delta_min and sampling-bound diagnostics");
  int bd_d = 2;
  std::int64_t bd_n = 0, bd_m = 0;
  double bd_eps = 1e-14, bd_eps_sec = 1e-12, bd_c = -1.0, bd_beta = -1.0;
  bd->add_option("--d", bd_d)->required();
  bd->add_option("--N", bd_n)->required();
  bd->add_option("--m", bd_m)->required();
  bd->add_option("--eps", bd_eps)->capture_default_str();
  bd->add_option("--eps-sec", bd_eps_sec)->capture_default_str();
  bd->add_option("--c", bd_c, "split ratio override");
  bd->add_option("--beta", bd_beta, "subset slack override");

  // sweep
  auto* sw = app.add_subcommand("sweep", "run a scenario config");
  std::string sw_config;
  sw->add_option("--config", sw_config, "scenario JSON")->required();

  // simulate
  auto* sim = app.add_subcommand("simulate", "protocol simulation under a Bell-diagonal channel");
  int sim_d = 2;
  std::int64_t sim_n = 0, sim_m = 0, sim_repeats = 1;
  std::string sim_channel, sim_thresholds, sim_leak = "shannon:1.0";
  double sim_eps = 1e-14, sim_eps_sec = 1e-12, sim_eps_cor = 1.0;
  sim->add_option("--d", sim_d)->required();
  sim->add_option("--N", sim_n)->required();
  sim->add_option("--m", sim_m)->required();
  sim->add_option("--channel", sim_channel, "depolarizing:<Q> | lambda:<path>")->required();
  sim->add_option("--thresholds", sim_thresholds, "path | symmetric:<Q>")->required();
  sim->add_option("--repeats", sim_repeats)->capture_default_str();
  sim->add_option("--eps", sim_eps)->capture_default_str();
  sim->add_option("--eps-sec", sim_eps_sec)->capture_default_str();
  sim->add_option("--leak", sim_leak)->capture_default_str();
  sim->add_option("--eps-cor", sim_eps_cor)->capture_default_str();

  // verify-sampling
  auto* vs = app.add_subcommand("verify-sampling", "Monte Carlo check of the sampling bound");
  int vs_d = 2, vs_j = -1, vs_c = -1;
  std::int64_t vs_n = 0, vs_m = 0, vs_trials = 100000;
  std::string vs_grid = "0.05,0.1,0.2,0.3", vs_family = "alternating";
  double vs_conf = 0.99;
  vs->add_option("--d", vs_d)->required();
  vs->add_option("--N", vs_n)->required();
  vs->add_option("--m", vs_m)->required();
  vs->add_option("--delta-grid", vs_grid)->capture_default_str();
  vs->add_option("--trials", vs_trials)->capture_default_str();
  vs->add_option("--word-family", vs_family, "uniform-class|alternating|blocked|random")
      ->capture_default_str();
  vs->add_option("--j", vs_j, "restrict to one basis");
  vs->add_option("--c", vs_c, "restrict to one symbol");
  vs->add_option("--confidence", vs_conf)->capture_default_str();

  // mub-table
  auto* mt = app.add_subcommand("mub-table", "outcome sets P_c^j and certification residuals");
  int mt_d = 2;
  mt->add_option("--d", mt_d, "prime dimension")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (kr->parsed()) {
      if (!kr_opt && kr_m <= 0)
        throw hdqkd::config_error("keyrate: provide --m or --optimize-m");
      return cmd_keyrate(g, kr_d, kr_n, kr_m, kr_opt, kr_eps, kr_eps_sec,
                         kr_noise, kr_leak, kr_eps_cor,
                         kr_c > 0 ? std::optional<double>(kr_c) : std::nullopt,
                         kr_beta > 0 ? std::optional<double>(kr_beta) : std::nullopt);
    }
    if (bd->parsed())
      return cmd_bounds(g, bd_d, bd_n, bd_m, bd_eps, bd_eps_sec,
                        bd_c > 0 ? std::optional<double>(bd_c) : std::nullopt,
                        bd_beta > 0 ? std::optional<double>(bd_beta) : std::nullopt);
    if (sw->parsed()) return cmd_sweep(g, sw_config);
    if (sim->parsed())
      return cmd_simulate(g, sim_d, sim_n, sim_m, sim_channel, sim_thresholds,
                          sim_repeats, sim_eps, sim_eps_sec, sim_leak, sim_eps_cor);
    if (vs->parsed())
      return cmd_verify_sampling(g, vs_d, vs_n, vs_m, vs_grid, vs_trials,
                                 vs_family, vs_j, vs_c, vs_conf);
    if (mt->parsed()) return cmd_mub_table(g, mt_d, app.count("--format") > 0);
  } catch (const hdqkd::config_error& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const std::invalid_argument& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
