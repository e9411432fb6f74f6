#pragma once

#include <cstdint>
#include <vector>

#include "catsim/distributions.hpp"
#include "catsim/pop_count.hpp"
#include "catsim/rng.hpp"

namespace catsim {

// Configuration of the catastrophe chain
//   X_0 = x0, B_0 = 0, and for n >= 1:  X_n = B_{n-1} + Z_n,
// where B_{n-1} | X_{n-1} ~ Binomial(X_{n-1}, beta_n). The B_0 = 0
// convention makes X_1 = Z_1 regardless of x0; x0 only occupies slot 0 of
// the trajectory. One beta is drawn per step and shared by all individuals.
struct ChainConfig {
  EnvDistribution env;
  ImmigrationDistribution imm;
  uint64_t horizon = 1;
  PopCount x0 = PopCount::exact(1);
  uint64_t seed = 0;
};

struct Trajectory {
  std::vector<PopCount> states;     // states[n] = X_n, n = 0..horizon
  std::vector<double> env_draws;    // env_draws[n-1] = beta_n, n = 1..horizon
  std::vector<PopCount> imm_draws;  // imm_draws[n-1] = Z_n,    n = 1..horizon
  uint64_t seed = 0;
};

// One draw of Binomial(N, p).
//
// Sampling regimes (thresholds fixed by design, see tests):
//   Exact N <= 10^6                 -> exact inverse-CDF (single uniform)
//   Exact N >  10^6, Np(1-p) > 100  -> normal approximation, continuity-corrected
//   Exact N >  10^6, p <= 1e-6, Np <= 50 -> Poisson approximation
//   Exact N >  10^6 otherwise       -> inverse-CDF via lgamma pmf ladder
//   LogScale N                      -> deterministic drift logv += ln p
// The result is re-encoded per the PopCount hysteresis.
PopCount binomial_thin(const PopCount& n, double p, RngState& rng);

// One chain step: thin x by beta, then add z.
PopCount step(const PopCount& x, double beta, const PopCount& z, RngState& rng);

// Simulate the full trajectory; bit-reproducible from cfg.seed.
Trajectory simulate(const ChainConfig& cfg);

// Draw X_n from its representation as a sum of n independent binomials
//   X_n =d sum_{i=1}^n Binomial(Z_i, prod_{j=i+1}^n beta_j),
// with the i = n term equal to Z_n (empty product = 1). Terms whose success
// probability is below 2^-60 with exact Z are emitted as 0 without
// consuming a draw; the per-term miss probability is <= Z * 2^-60.
PopCount representation_sample(const ChainConfig& cfg, uint64_t n, RngState& rng);

// Exact law of X_n for PointMass/FiniteTable environments and
// finite-support immigration: forward DP over {0..state_cap} convolving
// binomial thinning kernels with the immigration pmf. Mass pushed beyond
// the cap is reported, never silently dropped.
struct ExactDistribution {
  std::vector<double> pmf;  // index = state, size state_cap + 1
  double truncated_mass = 0.0;
};
ExactDistribution exact_distribution(const ChainConfig& cfg, uint64_t n,
                                     uint64_t state_cap);

struct McEstimate {
  double estimate = 0.0;
  double ci_halfwidth = 0.0;  // 99% normal CI half-width
};

// Monte Carlo evaluation of the return-probability identity
//   P(X_n = 1) = p1 * I_{n-1},
//   I_m = E[ exp( sum_{i=1}^m Z_{i+1} ln(1 - prod_{j=1}^i beta_j) ) ].
// Requires p1 = P(Z=1) > 0. For PointMass environments the beta products
// are deterministic and only Z is sampled.
McEstimate return_prob_formula(const ChainConfig& cfg, uint64_t n,
                               uint64_t reps, RngState& rng);

// Exact summation of the same identity for PointMass beta and
// finite-support Z: p1 * prod_{i=1}^{n-1} E[(1 - beta^i)^Z].
double return_prob_exact(const ChainConfig& cfg, uint64_t n);

// Partial sums of I_n estimates for n = 1..N (I_0 = 1 contributes the n=1
// term). This is the Green-function partial sum at state 1 up to the p1
// factor; it stays well-defined for laws with p1 = 0, where the bottom
// state is never visited but the series still separates recurrent from
// transient behavior.
std::vector<double> i_series_partial_sums(const ChainConfig& cfg, uint64_t N,
                                          uint64_t reps, RngState& rng);

// p1-weighted version: partial sums of estimates of P(X_n = 1). Requires
// p1 > 0.
std::vector<double> green_partial_sum(const ChainConfig& cfg, uint64_t N,
                                      uint64_t reps, RngState& rng);

// Monte Carlo evaluation of the generating-function formula
//   E(s^{X_n}) = E[ exp( sum_{i=1}^n Z_i ln(1 - beta_{i,n} (1-s)) ) ],
// with beta_{i,n} = prod_{j=i+1}^n beta_j and beta_{n,n} = 1.
McEstimate pgf_formula(const ChainConfig& cfg, uint64_t n, double s,
                       uint64_t reps, RngState& rng);

// E(s^{X_n}) summed against the exact DP law (oracle route).
double pgf_exact(const ChainConfig& cfg, uint64_t n, double s);

// Exact summation of the generating-function formula for PointMass beta
// and finite-support Z: prod_{m=0}^{n-1} E[(1 - beta^m (1-s))^Z].
double pgf_formula_exact(const ChainConfig& cfg, uint64_t n, double s);

}  // namespace catsim
