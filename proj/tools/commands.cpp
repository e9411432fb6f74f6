#include "commands.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

#include "catsim/chain.hpp"
#include "catsim/classify.hpp"
#include "catsim/neuts.hpp"
#include "catsim/stats.hpp"
#include "catsim/trajectory_csv.hpp"
#include "json.hpp"

namespace catsim::cli {

namespace {

using nlohmann::json;

void write_output(const std::string& path, const std::string& content) {
  if (path.empty()) {
    std::cout << content;
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("cannot open output file: " + path);
  out << content;
}

std::string resolve_out(const CommandOptions& opt) {
  return opt.out.empty() ? opt.cfg.out : opt.out;
}

std::string grid_number(double x) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.12g", x);
  return buf;
}

json test_result_json(const stats::TestResult& r) {
  return json{{"statistic", r.statistic},
              {"p_value", r.p_value},
              {"dof", r.dof},
              {"pooled_bins", r.pooled_bins}};
}

// ---------------------------------------------------------------------------
// validate

struct MatrixCell {
  std::string env_label;
  std::string imm_label;
  EnvDistribution env;
  ImmigrationDistribution imm;
  uint64_t n;
};

std::vector<MatrixCell> build_matrix() {
  const std::vector<std::pair<std::string, EnvDistribution>> envs = {
      {"point_mass(0.3)", EnvDistribution::point_mass(0.3)},
      {"point_mass(0.7)", EnvDistribution::point_mass(0.7)},
      {"finite_table{0.2,0.8}",
       EnvDistribution::finite_table({{0.2, 0.5}, {0.8, 0.5}})},
  };
  const std::vector<std::pair<std::string, ImmigrationDistribution>> imms = {
      {"deterministic(2)", ImmigrationDistribution::deterministic(2)},
      {"finite_table{1,2}",
       ImmigrationDistribution::finite_table({{1, 0.5}, {2, 0.5}})},
  };
  std::vector<MatrixCell> cells;
  for (const auto& [env_label, env] : envs) {
    for (const auto& [imm_label, imm] : imms) {
      for (uint64_t n : {2, 5, 8}) {
        cells.push_back({env_label, imm_label, env, imm, n});
      }
    }
  }
  return cells;
}

// The deliberately wrong reading of the model: every individual draws its
// own environment value. Indistinguishable for point masses, detectably
// different for any non-degenerate environment.
PopCount thin_per_individual(const PopCount& x, const EnvDistribution& env,
                             RngState& rng) {
  uint64_t survivors = 0;
  const uint64_t n = x.exact_value();
  for (uint64_t i = 0; i < n; ++i) {
    const double beta_i = env.sample(rng);
    if (rng.next_unit() < beta_i) ++survivors;
  }
  return PopCount::exact(survivors);
}

PopCount simulate_state_per_individual(const ChainConfig& cfg, uint64_t n,
                                       RngState& rng) {
  PopCount x = PopCount::exact(0);
  for (uint64_t step_n = 1; step_n <= n; ++step_n) {
    const PopCount survivors = step_n == 1
                                   ? PopCount::exact(0)
                                   : thin_per_individual(x, cfg.env, rng);
    x = survivors + cfg.imm.sample(rng);
  }
  return x;
}

struct CellResult {
  json report;
  bool tv_ok = false;
  bool two_sample_ok = false;
};

CellResult run_matrix_cell(const MatrixCell& cell, uint64_t reps,
                           uint64_t master_seed, uint64_t cell_index,
                           bool mutated) {
  ChainConfig cfg{cell.env, cell.imm, cell.n, PopCount::exact(1), 0};
  const uint64_t cap = 2 * cell.n + 2;
  const ExactDistribution dp = exact_distribution(cfg, cell.n, cap);

  const stats::RngSpec spec{master_seed};
  const uint64_t base = cell_index << 32;

  RngState rep_rng = stats::make_stream(spec, base);
  stats::Histogram rep_hist;
  for (uint64_t i = 0; i < reps; ++i) {
    stats::add_sample(rep_hist, representation_sample(cfg, cell.n, rep_rng));
  }

  stats::Histogram sim_hist;
  if (mutated) {
    RngState sim_rng = stats::make_stream(spec, base + 1);
    for (uint64_t i = 0; i < reps; ++i) {
      stats::add_sample(sim_hist,
                        simulate_state_per_individual(cfg, cell.n, sim_rng));
    }
  } else {
    for (uint64_t i = 0; i < reps; ++i) {
      ChainConfig run = cfg;
      run.seed = stats::derive_stream_seed(spec, base + 2 + i);
      stats::add_sample(sim_hist, simulate(run).states[cell.n]);
    }
  }

  const double tv_rep = stats::tv_distance(rep_hist, dp.pmf);
  const double tv_sim = stats::tv_distance(sim_hist, dp.pmf);
  const stats::TestResult two = stats::chi_square_two_sample(rep_hist, sim_hist);

  CellResult result;
  result.tv_ok = tv_rep <= 0.01 && (mutated || tv_sim <= 0.01);
  result.two_sample_ok = two.p_value > 0.01;
  result.report = json{{"env", cell.env_label},
                       {"imm", cell.imm_label},
                       {"n", cell.n},
                       {"tv_representation", tv_rep},
                       {"tv_simulation", tv_sim},
                       {"two_sample", test_result_json(two)}};
  return result;
}

json run_identity_checks(bool& all_ok) {
  json out;

  // Laplace transform: two routes across the distribution/lambda grid
  const std::vector<std::pair<std::string, ImmigrationDistribution>> laws = {
      {"deterministic(1)", ImmigrationDistribution::deterministic(1)},
      {"deterministic(3)", ImmigrationDistribution::deterministic(3)},
      {"finite_table{1,2}",
       ImmigrationDistribution::finite_table({{1, 0.5}, {2, 0.5}})},
      {"finite_table{0,1,3}",
       ImmigrationDistribution::finite_table({{0, 0.25}, {1, 0.25}, {3, 0.5}})},
      {"log_tail(1)", ImmigrationDistribution::log_tail(1.0)},
      {"log_tail(2)", ImmigrationDistribution::log_tail(2.0)},
      {"inverse_square", ImmigrationDistribution::inverse_square()},
  };
  double laplace_max = 0.0;
  for (const auto& [label, law] : laws) {
    for (double lambda : {0.01, 0.1, 1.0, 5.0}) {
      laplace_max = std::max(
          laplace_max,
          std::abs(law.laplace_direct(lambda) - law.laplace_tail_form(lambda)));
    }
  }
  const bool laplace_ok = laplace_max <= 1e-10;
  out["laplace_max_abs_diff"] = laplace_max;
  out["laplace_ok"] = laplace_ok;

  // series bound grid
  bool lemma3_ok = true;
  for (double c : {0.3, 0.5, 0.7, 0.9}) {
    for (int i = 1; i <= 20; ++i) {
      const auto [lhs, rhs] = series_bound_lemma3(c, i);
      lemma3_ok = lemma3_ok && lhs >= 0.0 && lhs <= rhs;
    }
  }
  out["series_bound_ok"] = lemma3_ok;

  // return probability and generating function against the DP oracle
  const ChainConfig pm_cfg{
      EnvDistribution::point_mass(0.5),
      ImmigrationDistribution::finite_table({{1, 0.5}, {2, 0.5}}), 10,
      PopCount::exact(1), 0};
  double return_max = 0.0;
  for (uint64_t n = 2; n <= 10; ++n) {
    const ExactDistribution dp = exact_distribution(pm_cfg, n, 2 * n + 2);
    return_max = std::max(return_max,
                          std::abs(return_prob_exact(pm_cfg, n) - dp.pmf[1]));
  }
  const bool return_ok = return_max <= 1e-9;
  out["return_prob_max_abs_diff"] = return_max;
  out["return_prob_ok"] = return_ok;

  double pgf_max = 0.0;
  for (uint64_t n = 1; n <= 8; ++n) {
    for (double s : {0.1, 0.5, 0.9}) {
      pgf_max = std::max(pgf_max, std::abs(pgf_exact(pm_cfg, n, s) -
                                           pgf_formula_exact(pm_cfg, n, s)));
    }
  }
  const double pgf_at_one = std::abs(pgf_exact(pm_cfg, 4, 1.0 - 1e-12) - 1.0);
  const bool pgf_ok = pgf_max <= 1e-9 && pgf_at_one <= 1e-9;
  out["pgf_max_abs_diff"] = pgf_max;
  out["pgf_at_one_abs_diff"] = pgf_at_one;
  out["pgf_ok"] = pgf_ok;

  all_ok = laplace_ok && lemma3_ok && return_ok && pgf_ok;
  return out;
}

// geometric pmf on {1,2,...} truncated for goodness-of-fit
std::vector<double> geometric_gap_pmf(double p, size_t len) {
  std::vector<double> pmf(len, 0.0);
  for (size_t g = 1; g < len; ++g) {
    pmf[g] = p * std::pow(1.0 - p, static_cast<double>(g - 1));
  }
  return pmf;
}

}  // namespace

int cmd_simulate(const CommandOptions& opt) {
  if (!opt.cfg.env || !opt.cfg.imm) {
    throw ConfigError("simulate: config must provide 'env' and 'imm'");
  }
  ChainConfig cfg{*opt.cfg.env, *opt.cfg.imm, opt.cfg.horizon,
                  PopCount::exact(1), opt.cfg.master_seed};
  const Trajectory traj = simulate(cfg);
  std::ostringstream os;
  write_trajectory_csv(os, traj);
  write_output(resolve_out(opt), os.str());
  return 0;
}

int cmd_validate(const CommandOptions& opt) {
  const std::vector<MatrixCell> matrix = build_matrix();
  std::vector<uint64_t> selected;
  if (opt.cfg.matrix_cells.has_value()) {
    selected = *opt.cfg.matrix_cells;
    if (selected.empty()) {
      throw ConfigError("validate: matrix_cells must not be empty");
    }
    for (const uint64_t c : selected) {
      if (c >= matrix.size()) {
        throw ConfigError("validate: matrix cell index out of range");
      }
    }
  } else {
    for (uint64_t c = 0; c < matrix.size(); ++c) selected.push_back(c);
  }

  const uint64_t reps = opt.cfg.reps;
  const bool mutated = opt.inject_per_individual_beta;
  const auto cell_results = stats::replicate(
      selected.size(), stats::RngSpec{opt.cfg.master_seed}, opt.threads,
      [&](uint64_t idx, RngState&) {
        const uint64_t cell_index = selected[idx];
        return run_matrix_cell(matrix[cell_index], reps, opt.cfg.master_seed,
                               cell_index, mutated);
      });

  uint64_t two_sample_failures = 0;
  bool tv_all_ok = true;
  json cells = json::array();
  for (const auto& r : cell_results) {
    cells.push_back(r.report);
    tv_all_ok = tv_all_ok && r.tv_ok;
    if (!r.two_sample_ok) ++two_sample_failures;
  }
  const uint64_t allowed = std::max<uint64_t>(1, selected.size() / 18);

  bool identities_ok = false;
  json identities = run_identity_checks(identities_ok);

  json report;
  report["cells"] = cells;
  report["reps"] = reps;
  report["mutation_injected"] = mutated;
  report["two_sample_failures"] = two_sample_failures;
  report["allowed_two_sample_failures"] = allowed;
  report["tv_ok"] = tv_all_ok;
  report["identities"] = identities;
  const bool pass =
      tv_all_ok && two_sample_failures <= allowed && identities_ok;
  report["pass"] = pass;
  write_output(resolve_out(opt), report.dump(2) + "\n");
  return pass ? 0 : 3;
}

int cmd_classify(const CommandOptions& opt) {
  json report;
  if (opt.cfg.a.has_value() || opt.cfg.beta.has_value()) {
    if (!opt.cfg.a.has_value() || !opt.cfg.beta.has_value()) {
      throw ConfigError("classify: example route needs both 'a' and 'beta'");
    }
    Regime regime;
    try {
      regime = classify_example(*opt.cfg.a, *opt.cfg.beta);
    } catch (const std::invalid_argument& e) {
      throw ConfigError(e.what());
    }
    report["a"] = *opt.cfg.a;
    report["beta"] = *opt.cfg.beta;
    report["mu"] = -std::log(*opt.cfg.beta);
    report["beta_c"] = beta_critical(1.0);
    report["verdict"] = verdict_name(regime.verdict);
    report["citations"] = regime.citations;
  } else if (opt.cfg.env && opt.cfg.imm) {
    const ClassificationInput in = classification_input(*opt.cfg.env, *opt.cfg.imm);
    const Regime regime = classify_general(in);
    report["mu"] = in.mu;
    report["tail_limsup"] = std::isinf(in.tail_limsup) ? json("inf")
                                                       : json(in.tail_limsup);
    report["tail_liminf"] = std::isinf(in.tail_liminf) ? json("inf")
                                                       : json(in.tail_liminf);
    report["log_moment_finite"] = in.log_moment_finite;
    if (opt.cfg.imm->kind() == ImmigrationDistribution::Kind::LogTail &&
        opt.cfg.imm->tail_exponent() == 1.0) {
      report["beta_c"] = beta_critical(1.0);
    }
    report["verdict"] = verdict_name(regime.verdict);
    report["citations"] = regime.citations;
  } else {
    throw ConfigError(
        "classify: provide either --a/--beta or a config with env and imm");
  }
  write_output(resolve_out(opt), report.dump(2) + "\n");
  return 0;
}

int cmd_phase(const CommandOptions& opt) {
  std::vector<double> a_grid = opt.cfg.a_grid;
  std::vector<double> beta_grid = opt.cfg.beta_grid;
  if (a_grid.empty()) a_grid = {0.5, 0.8, 1.0, 1.5, 2.0};
  if (beta_grid.empty()) {
    beta_grid = {0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9};
  }
  std::ostringstream os;
  os << "a,beta,verdict\n";
  for (const double a : a_grid) {
    for (const double beta : beta_grid) {
      Regime regime;
      try {
        regime = classify_example(a, beta);
      } catch (const std::invalid_argument& e) {
        throw ConfigError(e.what());
      }
      os << grid_number(a) << ',' << grid_number(beta) << ','
         << verdict_name(regime.verdict) << '\n';
    }
  }
  write_output(resolve_out(opt), os.str());
  return 0;
}

int cmd_neuts(const CommandOptions& opt) {
  if (!(opt.cfg.p > 0.0 && opt.cfg.p < 1.0)) {
    throw ConfigError("neuts: p must be in (0,1)");
  }
  const EnvDistribution env =
      opt.cfg.env ? *opt.cfg.env : EnvDistribution::point_mass(0.5);
  const ImmigrationDistribution imm =
      opt.cfg.imm
          ? *opt.cfg.imm
          : ImmigrationDistribution::finite_table({{1, 0.5}, {2, 0.5}});

  NeutsConfig ncfg{opt.cfg.p, env, imm, 0, opt.cfg.master_seed, true};
  stats::TestResult coupling;
  try {
    coupling = coupling_check(ncfg, opt.cfg.n, opt.cfg.reps);
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }

  // gap law on a long single trajectory
  const uint64_t horizon = std::max(
      opt.cfg.horizon,
      static_cast<uint64_t>(std::ceil(12'500.0 / opt.cfg.p)));
  NeutsConfig gap_cfg = ncfg;
  gap_cfg.horizon = horizon;
  gap_cfg.seed = opt.cfg.master_seed + 1;
  const NeutsTrajectory traj = simulate_neuts(gap_cfg);
  const auto times = collapse_times(traj);
  stats::Histogram gap_hist;
  double mean_gap = 0.0;
  uint64_t prev = 0;
  for (const uint64_t t : times) {
    const uint64_t gap = t - prev;
    ++gap_hist[gap];
    mean_gap += static_cast<double>(gap);
    prev = t;
  }
  if (times.empty()) throw ConfigError("neuts: horizon produced no collapses");
  mean_gap /= static_cast<double>(times.size());
  const size_t pmf_len =
      static_cast<size_t>(std::ceil(40.0 / opt.cfg.p)) + 2;
  const stats::TestResult gap_law =
      stats::chi_square_vs_exact(gap_hist, geometric_gap_pmf(opt.cfg.p, pmf_len));

  json report;
  report["p"] = opt.cfg.p;
  report["n"] = opt.cfg.n;
  report["reps"] = opt.cfg.reps;
  report["coupling"] = test_result_json(coupling);
  report["gap_law"] = test_result_json(gap_law);
  report["gap_count"] = times.size();
  report["mean_gap"] = mean_gap;
  report["expected_mean_gap"] = 1.0 / opt.cfg.p;
  const bool pass = coupling.p_value > 0.01 && gap_law.p_value > 0.01;
  report["pass"] = pass;
  write_output(resolve_out(opt), report.dump(2) + "\n");
  return pass ? 0 : 3;
}

int cmd_diagnose(const CommandOptions& opt) {
  struct RegimeSpec {
    std::string name;
    double a;
    double beta;
  };
  const double beta_c = beta_critical(1.0);
  const std::vector<RegimeSpec> regimes = {
      {"positive_recurrent", 2.0, 0.5},
      {"null_recurrent", 1.0, 0.7 * beta_c},
      {"transient", 1.0, 1.3 * beta_c},
  };

  const uint64_t series_reps = std::min<uint64_t>(opt.cfg.reps, 4000);
  const uint64_t n_max = std::max<uint64_t>(opt.cfg.n_max, 2);
  const uint64_t gws_len = 500;

  json report;
  report["m"] = opt.cfg.m;
  report["horizon"] = opt.cfg.horizon;
  report["n_max"] = n_max;
  report["series_reps"] = series_reps;
  json regime_reports = json::array();
  std::ostringstream csv;
  csv << "regime,series,index,value\n";

  const stats::RngSpec spec{opt.cfg.master_seed};
  uint64_t stream = 0;
  for (const auto& regime : regimes) {
    const auto env = EnvDistribution::point_mass(regime.beta);
    const auto imm = ImmigrationDistribution::log_tail(regime.a, 2);
    ChainConfig cfg{env, imm, opt.cfg.horizon, PopCount::exact(1),
                    stats::derive_stream_seed(spec, stream++)};

    RngState series_rng = stats::make_stream(spec, stream++);
    const std::vector<double> iseries =
        i_series_partial_sums(cfg, n_max, series_reps, series_rng);
    const double tail_increment = iseries[n_max - 1] - iseries[n_max / 2 - 1];

    const Trajectory traj = simulate(cfg);
    const stats::ReturnStats rs = stats::return_time_stats(traj, opt.cfg.m);

    RngState gws_rng = stats::make_stream(spec, stream++);
    const std::vector<double> gws =
        geometric_weighted_series(imm, 0.9, gws_len, gws_rng);
    double gws_max_inc = 0.0;
    for (size_t i = gws_len / 2; i < gws_len; ++i) {
      gws_max_inc = std::max(gws_max_inc, gws[i] - gws[i - 1]);
    }

    json r;
    r["name"] = regime.name;
    r["a"] = regime.a;
    r["beta"] = regime.beta;
    r["i_series_tail_increment"] = tail_increment;
    r["occupation_frequency"] = rs.occupation_frequency;
    r["visit_count"] = rs.visit_count;
    r["last_visit_step"] = rs.last_visit_step;
    r["mean_return_time"] = std::isinf(rs.mean_return_time)
                                ? json("inf")
                                : json(rs.mean_return_time);
    r["gws_last_half_max_increment"] =
        std::isinf(gws_max_inc) ? json("inf") : json(gws_max_inc);
    regime_reports.push_back(r);

    for (size_t i = 0; i < iseries.size(); ++i) {
      csv << regime.name << ",i_series," << i + 1 << ',' << grid_number(iseries[i])
          << '\n';
    }
    for (size_t i = 0; i < gws.size(); ++i) {
      csv << regime.name << ",geometric_weighted," << i + 1 << ',';
      if (std::isinf(gws[i])) {
        csv << "inf";
      } else {
        csv << grid_number(gws[i]);
      }
      csv << '\n';
    }
  }
  report["regimes"] = regime_reports;

  const std::string out = resolve_out(opt);
  write_output(out, report.dump(2) + "\n");
  const std::string csv_path =
      out.empty() ? "diagnose_series.csv" : out + ".series.csv";
  std::ofstream csv_file(csv_path, std::ios::binary);
  if (!csv_file) throw ConfigError("cannot open output file: " + csv_path);
  csv_file << csv.str();
  return 0;
}

}  // namespace catsim::cli
