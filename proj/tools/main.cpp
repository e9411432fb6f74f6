#include <exception>
#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "commands.hpp"
#include "config.hpp"

namespace {

using catsim::cli::CommandOptions;
using catsim::cli::ConfigError;

struct CommonFlags {
  std::string config_path;
  std::string out;
  unsigned threads = 0;
  bool seed_given = false;
  uint64_t seed = 0;
};

void add_common(CLI::App* cmd, CommonFlags& flags) {
  cmd->add_option("--config", flags.config_path, "JSON experiment config");
  cmd->add_option("--out", flags.out, "output path (default: stdout)");
  cmd->add_option("--threads", flags.threads,
                  "worker threads (default: machine parallelism); never "
                  "changes results");
  cmd->add_option("--seed", flags.seed, "master seed (overrides config)")
      ->each([&flags](const std::string&) { flags.seed_given = true; });
}

CommandOptions build_options(const CommonFlags& flags) {
  CommandOptions opt;
  if (!flags.config_path.empty()) {
    opt.cfg = catsim::cli::load_config_file(flags.config_path);
  }
  if (flags.seed_given) opt.cfg.master_seed = flags.seed;
  opt.out = flags.out;
  opt.threads = flags.threads;
  return opt;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"catsim: binomial-catastrophe population chain toolkit"};
  app.require_subcommand(1);

  CommonFlags sim_flags, val_flags, cls_flags, phase_flags, neuts_flags,
      diag_flags;

  auto* sim = app.add_subcommand("simulate", "simulate a trajectory, emit CSV");
  add_common(sim, sim_flags);
  uint64_t sim_horizon = 0;
  bool sim_horizon_given = false;
  sim->add_option("--horizon", sim_horizon, "number of steps")
      ->each([&](const std::string&) { sim_horizon_given = true; });

  auto* val = app.add_subcommand(
      "validate", "run the distributional identity oracle suite");
  add_common(val, val_flags);
  uint64_t val_reps = 0;
  bool val_reps_given = false;
  val->add_option("--reps", val_reps, "samples per matrix cell")
      ->each([&](const std::string&) { val_reps_given = true; });
  bool inject = false;
  val->add_flag("--inject-per-individual-beta", inject,
                "mutation check: use the wrong per-individual environment "
                "reading (the suite must fail)");

  auto* cls = app.add_subcommand("classify", "regime classification, emit JSON");
  add_common(cls, cls_flags);
  double cls_a = 0.0, cls_beta = 0.0;
  bool cls_a_given = false, cls_beta_given = false;
  cls->add_option("--a", cls_a, "heavy-tail exponent of the example family")
      ->each([&](const std::string&) { cls_a_given = true; });
  cls->add_option("--beta", cls_beta, "point-mass survival probability")
      ->each([&](const std::string&) { cls_beta_given = true; });

  auto* phase = app.add_subcommand("phase", "phase-diagram grid, emit CSV");
  add_common(phase, phase_flags);
  std::vector<double> phase_a, phase_beta;
  phase->add_option("--a-grid", phase_a, "a values")->delimiter(',');
  phase->add_option("--beta-grid", phase_beta, "beta values")->delimiter(',');

  auto* neuts = app.add_subcommand(
      "neuts", "catastrophe-at-random-times coupling report, emit JSON");
  add_common(neuts, neuts_flags);
  double neuts_p = 0.0;
  uint64_t neuts_n = 0, neuts_reps = 0;
  bool neuts_p_given = false, neuts_n_given = false, neuts_reps_given = false;
  neuts->add_option("--p", neuts_p, "per-step collapse probability")
      ->each([&](const std::string&) { neuts_p_given = true; });
  neuts->add_option("--n", neuts_n, "embedded index for the coupling check")
      ->each([&](const std::string&) { neuts_n_given = true; });
  neuts->add_option("--reps", neuts_reps, "trajectories per route")
      ->each([&](const std::string&) { neuts_reps_given = true; });

  auto* diag = app.add_subcommand(
      "diagnose", "recurrence diagnostics for the three regimes, JSON + CSV");
  add_common(diag, diag_flags);
  uint64_t diag_horizon = 0, diag_nmax = 0, diag_m = 0;
  bool diag_horizon_given = false, diag_nmax_given = false, diag_m_given = false;
  diag->add_option("--horizon", diag_horizon, "trajectory length")
      ->each([&](const std::string&) { diag_horizon_given = true; });
  diag->add_option("--n-max", diag_nmax, "partial-sum length")
      ->each([&](const std::string&) { diag_nmax_given = true; });
  diag->add_option("--m", diag_m, "low-set bound for return statistics")
      ->each([&](const std::string&) { diag_m_given = true; });

  CLI11_PARSE(app, argc, argv);

  try {
    if (sim->parsed()) {
      CommandOptions opt = build_options(sim_flags);
      if (sim_horizon_given) opt.cfg.horizon = sim_horizon;
      return catsim::cli::cmd_simulate(opt);
    }
    if (val->parsed()) {
      CommandOptions opt = build_options(val_flags);
      if (val_reps_given) opt.cfg.reps = val_reps;
      opt.inject_per_individual_beta = inject;
      return catsim::cli::cmd_validate(opt);
    }
    if (cls->parsed()) {
      CommandOptions opt = build_options(cls_flags);
      if (cls_a_given) opt.cfg.a = cls_a;
      if (cls_beta_given) opt.cfg.beta = cls_beta;
      return catsim::cli::cmd_classify(opt);
    }
    if (phase->parsed()) {
      CommandOptions opt = build_options(phase_flags);
      if (!phase_a.empty()) opt.cfg.a_grid = phase_a;
      if (!phase_beta.empty()) opt.cfg.beta_grid = phase_beta;
      return catsim::cli::cmd_phase(opt);
    }
    if (neuts->parsed()) {
      CommandOptions opt = build_options(neuts_flags);
      if (neuts_p_given) opt.cfg.p = neuts_p;
      if (neuts_n_given) opt.cfg.n = neuts_n;
      if (neuts_reps_given) opt.cfg.reps = neuts_reps;
      return catsim::cli::cmd_neuts(opt);
    }
    if (diag->parsed()) {
      CommandOptions opt = build_options(diag_flags);
      if (diag_horizon_given) opt.cfg.horizon = diag_horizon;
      if (diag_nmax_given) opt.cfg.n_max = diag_nmax;
      if (diag_m_given) opt.cfg.m = diag_m;
      return catsim::cli::cmd_diagnose(opt);
    }
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 2;
}
