#include "catsim/neuts.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include "catsim/chain.hpp"

namespace catsim {

namespace {

void validate(const NeutsConfig& cfg) {
  if (!(cfg.p > 0.0 && cfg.p < 1.0)) {
    throw std::invalid_argument("NeutsConfig: p must be in (0,1)");
  }
}

}  // namespace

NeutsTrajectory simulate_neuts(const NeutsConfig& cfg) {
  validate(cfg);
  NeutsTrajectory traj;
  traj.seed = cfg.seed;
  traj.states.reserve(cfg.horizon + 1);
  traj.collapse_flags.reserve(cfg.horizon);
  traj.env_draws.reserve(cfg.horizon);
  traj.imm_draws.reserve(cfg.horizon);

  RngState rng(cfg.seed);
  traj.states.push_back(cfg.y0_from_imm ? cfg.imm.sample(rng)
                                        : PopCount::exact(0));
  const double nan = std::numeric_limits<double>::quiet_NaN();
  for (uint64_t n = 1; n <= cfg.horizon; ++n) {
    const bool collapse = rng.next_unit() < cfg.p;
    traj.collapse_flags.push_back(collapse);
    if (collapse) {
      const double beta = cfg.env.sample(rng);
      traj.env_draws.push_back(beta);
      traj.imm_draws.push_back(PopCount::exact(0));
      traj.states.push_back(binomial_thin(traj.states[n - 1], beta, rng));
    } else {
      traj.env_draws.push_back(nan);
      const PopCount z = cfg.imm.sample(rng);
      traj.imm_draws.push_back(z);
      traj.states.push_back(traj.states[n - 1] + z);
    }
  }
  return traj;
}

std::vector<uint64_t> collapse_times(const NeutsTrajectory& traj) {
  std::vector<uint64_t> times;
  for (uint64_t n = 0; n < traj.collapse_flags.size(); ++n) {
    if (traj.collapse_flags[n]) times.push_back(n + 1);
  }
  return times;
}

std::vector<PopCount> embedded_chain(const NeutsTrajectory& traj) {
  const std::vector<uint64_t> times = collapse_times(traj);
  if (times.empty()) {
    throw std::runtime_error("embedded_chain: no collapses in horizon");
  }
  std::vector<PopCount> embedded;
  embedded.reserve(times.size() + 1);
  embedded.push_back(traj.states[0]);  // X'_0 = Y_0 by convention
  for (const uint64_t t : times) {
    embedded.push_back(traj.states[t - 1]);  // X'_k = Y_{T_k - 1}
  }
  return embedded;
}

PopCount aggregated_immigration_sample(const ImmigrationDistribution& imm,
                                       double p, RngState& rng) {
  if (!(p > 0.0 && p < 1.0)) {
    throw std::invalid_argument("aggregated_immigration_sample: p in (0,1)");
  }
  // G' on {0,1,...} with P(G' >= g) = (1-p)^g
  const double u = rng.next_open01();
  const uint64_t g =
      static_cast<uint64_t>(std::floor(std::log(u) / std::log1p(-p)));
  PopCount total = PopCount::exact(0);
  for (uint64_t i = 0; i < g; ++i) total = total + imm.sample(rng);
  return total;
}

stats::TestResult coupling_check(const NeutsConfig& cfg, uint64_t n,
                                 uint64_t reps) {
  validate(cfg);
  if (reps == 0) throw std::invalid_argument("coupling_check: reps >= 1");
  if (n < 1) throw std::invalid_argument("coupling_check: n >= 1");
  if (!cfg.imm.has_finite_support()) {
    throw std::invalid_argument(
        "coupling_check: immigration law must have finite support");
  }
  if (cfg.env.kind() == EnvDistribution::Kind::Uniform01) {
    throw std::invalid_argument(
        "coupling_check: environment must be PointMass or FiniteTable");
  }

  const stats::RngSpec spec{cfg.seed};
  const uint64_t max_steps =
      std::max<uint64_t>(1000, static_cast<uint64_t>(
                                   400.0 * static_cast<double>(n) / cfg.p));

  // (i) Y run with Y_0 = 0, watched just before the n-th collapse
  stats::Histogram neuts_hist;
  for (uint64_t rep = 0; rep < reps; ++rep) {
    RngState rng = stats::make_stream(spec, rep);
    PopCount y = PopCount::exact(0);
    PopCount before = PopCount::exact(0);
    uint64_t collapses = 0;
    uint64_t steps = 0;
    while (collapses < n) {
      if (++steps > max_steps) {
        throw std::runtime_error("coupling_check: insufficient collapses");
      }
      if (rng.next_unit() < cfg.p) {
        before = y;
        y = binomial_thin(y, cfg.env.sample(rng), rng);
        ++collapses;
      } else {
        y = y + cfg.imm.sample(rng);
      }
    }
    stats::add_sample(neuts_hist, before);
  }

  // (ii) direct chain with the aggregated immigration law
  stats::Histogram chain_hist;
  for (uint64_t rep = 0; rep < reps; ++rep) {
    RngState rng = stats::make_stream(spec, reps + rep);
    PopCount x = aggregated_immigration_sample(cfg.imm, cfg.p, rng);
    for (uint64_t m = 2; m <= n; ++m) {
      const double beta = cfg.env.sample(rng);
      const PopCount z = aggregated_immigration_sample(cfg.imm, cfg.p, rng);
      x = binomial_thin(x, beta, rng) + z;
    }
    stats::add_sample(chain_hist, x);
  }

  return stats::chi_square_two_sample(neuts_hist, chain_hist);
}

}  // namespace catsim
