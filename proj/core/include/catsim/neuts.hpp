#pragma once

#include <cstdint>
#include <vector>

#include "catsim/distributions.hpp"
#include "catsim/pop_count.hpp"
#include "catsim/rng.hpp"
#include "catsim/stats.hpp"

namespace catsim {

// Catastrophe-at-random-times chain (Y_n): at each step an independent
// coin with probability p selects a collapse (binomial thinning with a
// fresh environment draw); otherwise the step adds an immigration draw.
// Y_0 defaults to a Z draw; set y0_from_imm = false for Y_0 = 0.
struct NeutsConfig {
  double p = 0.5;
  EnvDistribution env;
  ImmigrationDistribution imm;
  uint64_t horizon = 1;
  uint64_t seed = 0;
  bool y0_from_imm = true;
};

struct NeutsTrajectory {
  std::vector<PopCount> states;      // states[n] = Y_n, n = 0..horizon
  std::vector<bool> collapse_flags;  // flags[n-1]: step n was a collapse
  std::vector<double> env_draws;     // beta at collapse steps, NaN otherwise
  std::vector<PopCount> imm_draws;   // Z at immigration steps, 0 at collapses
  uint64_t seed = 0;
};

NeutsTrajectory simulate_neuts(const NeutsConfig& cfg);

// Strictly increasing collapse step indices T_1 < T_2 < ... Gaps
// G_k = T_k - T_{k-1} are i.i.d. geometric on {1,2,...} with parameter p.
std::vector<uint64_t> collapse_times(const NeutsTrajectory& traj);

// Embedded chain watched just before each collapse: element 0 is Y_0 and
// element k >= 1 is X'_k = Y_{T_k - 1}. Pathwise,
//   X'_k = (post-collapse state at T_{k-1}) + (sum of Z draws in between),
// with X'_1 = Y_0 + that sum. Throws when the trajectory has no collapse.
std::vector<PopCount> embedded_chain(const NeutsTrajectory& traj);

// Draw from the aggregated immigration law Z' =d sum_{i=1}^{G'} Z_i with
// G' geometric on {0,1,...}, P(G' = g) = p (1-p)^g: the immigration steps
// accumulated before the next collapse.
PopCount aggregated_immigration_sample(const ImmigrationDistribution& imm,
                                       double p, RngState& rng);

// Two-sample chi-square between (i) X'_n extracted from independent
// trajectories of (Y_n) started at Y_0 = 0 and (ii) X_n from direct-chain
// simulation with the aggregated immigration law. The coupling predicts
// equality in law; Y_0 = 0 aligns the initial conditions of the two routes
// (a Y_0 = Z_0 start only adds an independent thinned bundle at n = 1).
// Requires finite-support immigration and reps >= 1.
stats::TestResult coupling_check(const NeutsConfig& cfg, uint64_t n, uint64_t reps);

}  // namespace catsim
