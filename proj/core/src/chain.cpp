#include "catsim/chain.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "catsim/numerics.hpp"

namespace catsim {

namespace {

constexpr uint64_t kExactSamplingLimit = 1'000'000;
constexpr double kSkipProbability = 0x1.0p-60;

PopCount renorm_exact(uint64_t v) {
  if (v > (uint64_t{1} << 48)) {
    return PopCount::from_log(std::log(static_cast<double>(v)));
  }
  return PopCount::exact(v);
}

// Inverse-CDF binomial draw from a single uniform. The cdf ladder starts at
// 0 when the mass there is representable, otherwise 12 sigma below the mean
// (the skipped left mass is below 1e-30, far outside double-pmf resolution).
uint64_t binomial_inverse(uint64_t n, double p, double u) {
  if (n == 0) return 0;
  const double nd = static_cast<double>(n);
  const double mean = nd * p;
  const double sigma = std::sqrt(mean * (1.0 - p));
  const double log_q = std::log1p(-p);

  uint64_t k = 0;
  double pmf;
  if (nd * log_q > -700.0 && mean < 1000.0) {
    pmf = std::exp(nd * log_q);
  } else {
    const double lo = std::max(0.0, std::floor(mean - 12.0 * sigma - 5.0));
    k = static_cast<uint64_t>(lo);
    const double kd = static_cast<double>(k);
    pmf = std::exp(std::lgamma(nd + 1.0) - std::lgamma(kd + 1.0) -
                   std::lgamma(nd - kd + 1.0) + kd * std::log(p) +
                   (nd - kd) * log_q);
  }
  double cdf = pmf;
  const double odds = p / (1.0 - p);
  const uint64_t k_cap = std::min<uint64_t>(
      n, static_cast<uint64_t>(mean + 60.0 * sigma + 120.0));
  while (cdf < u && k < k_cap) {
    const double kd = static_cast<double>(k);
    pmf *= (nd - kd) / (kd + 1.0) * odds;
    ++k;
    cdf += pmf;
  }
  return k;
}

uint64_t poisson_inverse(double mean, double u) {
  double pmf = std::exp(-mean);
  double cdf = pmf;
  uint64_t k = 0;
  const uint64_t cap = static_cast<uint64_t>(mean + 60.0 * std::sqrt(mean) + 120.0);
  while (cdf < u && k < cap) {
    ++k;
    pmf *= mean / static_cast<double>(k);
    cdf += pmf;
  }
  return k;
}

}  // namespace

PopCount binomial_thin(const PopCount& n, double p, RngState& rng) {
  if (!(p > 0.0 && p < 1.0)) {
    throw std::invalid_argument("binomial_thin: p must be in (0,1)");
  }
  if (!n.is_exact()) {
    // Deterministic drift: relative fluctuation sqrt((1-p)/(Np)) is
    // negligible at log-scale magnitudes. Re-encoding handles descent.
    return PopCount::from_log(n.log_value() + std::log(p));
  }
  const uint64_t nv = n.exact_value();
  if (nv == 0) return PopCount::exact(0);
  if (nv <= kExactSamplingLimit) {
    return PopCount::exact(binomial_inverse(nv, p, rng.next_unit()));
  }
  const double nd = static_cast<double>(nv);
  const double npq = nd * p * (1.0 - p);
  if (npq > 100.0) {
    // normal approximation with continuity correction
    const double z = rng.next_normal();
    double x = std::floor(nd * p + z * std::sqrt(npq) + 0.5);
    x = std::clamp(x, 0.0, nd);
    return renorm_exact(static_cast<uint64_t>(x));
  }
  if (p <= 1e-6 && nd * p <= 50.0) {
    return PopCount::exact(poisson_inverse(nd * p, rng.next_unit()));
  }
  return renorm_exact(binomial_inverse(nv, p, rng.next_unit()));
}

PopCount step(const PopCount& x, double beta, const PopCount& z, RngState& rng) {
  return binomial_thin(x, beta, rng) + z;
}

Trajectory simulate(const ChainConfig& cfg) {
  Trajectory traj;
  traj.seed = cfg.seed;
  traj.states.reserve(cfg.horizon + 1);
  traj.env_draws.reserve(cfg.horizon);
  traj.imm_draws.reserve(cfg.horizon);
  traj.states.push_back(cfg.x0);

  RngState rng(cfg.seed);
  for (uint64_t n = 1; n <= cfg.horizon; ++n) {
    const double beta = cfg.env.sample(rng);
    traj.env_draws.push_back(beta);
    // B_0 = 0: the first step carries immigration only
    const PopCount survivors = (n == 1)
                                   ? PopCount::exact(0)
                                   : binomial_thin(traj.states[n - 1], beta, rng);
    const PopCount z = cfg.imm.sample(rng);
    traj.imm_draws.push_back(z);
    traj.states.push_back(survivors + z);
  }
  return traj;
}

PopCount representation_sample(const ChainConfig& cfg, uint64_t n, RngState& rng) {
  if (n < 1) throw std::invalid_argument("representation_sample: n >= 1");
  // suffix_log[i-1] = sum_{j=i+1}^{n} ln beta_j
  std::vector<double> log_beta(n);
  for (uint64_t j = 0; j < n; ++j) log_beta[j] = std::log(cfg.env.sample(rng));
  std::vector<double> suffix_log(n, 0.0);
  for (uint64_t i = n - 1; i >= 1; --i) {
    suffix_log[i - 1] = suffix_log[i] + log_beta[i];
  }

  PopCount total = PopCount::exact(0);
  for (uint64_t i = 1; i <= n; ++i) {
    const PopCount z = cfg.imm.sample(rng);
    if (i == n) {
      total = total + z;  // empty product: B_{n,n} = Z_n
      continue;
    }
    const double p = std::exp(suffix_log[i - 1]);
    if (p < kSkipProbability) {
      if (z.is_exact()) continue;  // miss probability <= Z * 2^-60
      total = total + PopCount::from_log(z.log_value() + suffix_log[i - 1]);
      continue;
    }
    total = total + binomial_thin(z, p, rng);
  }
  return total;
}

ExactDistribution exact_distribution(const ChainConfig& cfg, uint64_t n,
                                     uint64_t state_cap) {
  if (n < 1) throw std::invalid_argument("exact_distribution: n >= 1");
  if (cfg.env.kind() == EnvDistribution::Kind::Uniform01) {
    throw std::invalid_argument(
        "exact_distribution: environment must be PointMass or FiniteTable");
  }
  if (!cfg.imm.has_finite_support()) {
    throw std::invalid_argument(
        "exact_distribution: immigration law must have finite support");
  }

  std::vector<std::pair<double, double>> env_atoms;
  if (cfg.env.kind() == EnvDistribution::Kind::PointMass) {
    env_atoms = {{cfg.env.point(), 1.0}};
  } else {
    env_atoms = cfg.env.atoms();
  }

  const uint64_t cap = state_cap;
  ExactDistribution out;
  out.pmf.assign(cap + 1, 0.0);

  // X_1 = Z_1
  for (const auto& [k, p] : cfg.imm.table()) {
    if (k <= cap) {
      out.pmf[k] += p;
    } else {
      out.truncated_mass += p;
    }
  }

  // Pascal triangle of binomial coefficients up to cap
  std::vector<std::vector<double>> choose(cap + 1);
  for (uint64_t x = 0; x <= cap; ++x) {
    choose[x].assign(x + 1, 1.0);
    for (uint64_t b = 1; b < x; ++b) {
      choose[x][b] = choose[x - 1][b - 1] + choose[x - 1][b];
    }
  }

  std::vector<double> thinned(cap + 1), next(cap + 1);
  std::vector<double> pow_b(cap + 1), pow_q(cap + 1);
  for (uint64_t step_n = 2; step_n <= n; ++step_n) {
    std::fill(thinned.begin(), thinned.end(), 0.0);
    for (const auto& [beta, w] : env_atoms) {
      pow_b[0] = pow_q[0] = 1.0;
      for (uint64_t j = 1; j <= cap; ++j) {
        pow_b[j] = pow_b[j - 1] * beta;
        pow_q[j] = pow_q[j - 1] * (1.0 - beta);
      }
      for (uint64_t x = 0; x <= cap; ++x) {
        const double px = out.pmf[x];
        if (px == 0.0) continue;
        const double wpx = w * px;
        for (uint64_t b = 0; b <= x; ++b) {
          thinned[b] += wpx * choose[x][b] * pow_b[b] * pow_q[x - b];
        }
      }
    }
    std::fill(next.begin(), next.end(), 0.0);
    for (uint64_t b = 0; b <= cap; ++b) {
      const double pb = thinned[b];
      if (pb == 0.0) continue;
      for (const auto& [k, p] : cfg.imm.table()) {
        const uint64_t y = b + k;
        if (y <= cap) {
          next[y] += pb * p;
        } else {
          out.truncated_mass += pb * p;
        }
      }
    }
    out.pmf.swap(next);
  }
  return out;
}

namespace {

// Accumulates Z * x for x >= 0 with saturation, then exposes exp(-S).
double weighted_log_term(const PopCount& z, double neg_log_factor) {
  return z.value_times(neg_log_factor);
}

void require_p1(const ChainConfig& cfg, const char* who) {
  if (!(cfg.imm.pmf(1) > 0.0)) {
    throw std::invalid_argument(std::string(who) +
                                ": requires P(Z = 1) > 0 (p1 = 0)");
  }
}

}  // namespace

McEstimate return_prob_formula(const ChainConfig& cfg, uint64_t n, uint64_t reps,
                               RngState& rng) {
  require_p1(cfg, "return_prob_formula");
  if (n < 2) throw std::invalid_argument("return_prob_formula: n >= 2");
  if (reps < 2) throw std::invalid_argument("return_prob_formula: reps >= 2");
  const double p1 = cfg.imm.pmf(1);
  const bool point_env = cfg.env.kind() == EnvDistribution::Kind::PointMass;

  double mean = 0.0, m2 = 0.0;
  for (uint64_t rep = 0; rep < reps; ++rep) {
    double log_prod = 0.0;
    double s = 0.0;
    for (uint64_t i = 1; i <= n - 1; ++i) {
      const double beta = point_env ? cfg.env.point() : cfg.env.sample(rng);
      log_prod += std::log(beta);
      const double neg_li = -std::log1p(-std::exp(log_prod));
      const PopCount z = cfg.imm.sample(rng);  // Z_{i+1}
      s += weighted_log_term(z, neg_li);
    }
    const double integrand = std::exp(-s);
    const double delta = integrand - mean;
    mean += delta / static_cast<double>(rep + 1);
    m2 += delta * (integrand - mean);
  }
  const double var = m2 / static_cast<double>(reps - 1);
  McEstimate est;
  est.estimate = p1 * mean;
  est.ci_halfwidth = 2.576 * p1 * std::sqrt(var / static_cast<double>(reps));
  return est;
}

double return_prob_exact(const ChainConfig& cfg, uint64_t n) {
  require_p1(cfg, "return_prob_exact");
  if (n < 1) throw std::invalid_argument("return_prob_exact: n >= 1");
  if (cfg.env.kind() != EnvDistribution::Kind::PointMass ||
      !cfg.imm.has_finite_support()) {
    throw std::invalid_argument(
        "return_prob_exact: needs PointMass beta and finite-support Z");
  }
  const double beta = cfg.env.point();
  double result = cfg.imm.pmf(1);
  for (uint64_t i = 1; i + 1 <= n; ++i) {
    const double li = std::log1p(-std::pow(beta, static_cast<double>(i)));
    double factor = 0.0;
    for (const auto& [z, p] : cfg.imm.table()) {
      factor += p * std::exp(static_cast<double>(z) * li);
    }
    result *= factor;
  }
  return result;
}

std::vector<double> i_series_partial_sums(const ChainConfig& cfg, uint64_t N,
                                          uint64_t reps, RngState& rng) {
  if (N < 1) throw std::invalid_argument("i_series_partial_sums: N >= 1");
  if (reps < 1) throw std::invalid_argument("i_series_partial_sums: reps >= 1");
  const bool point_env = cfg.env.kind() == EnvDistribution::Kind::PointMass;

  std::vector<double> acc(N + 1, 0.0);
  for (uint64_t rep = 0; rep < reps; ++rep) {
    acc[1] += 1.0;  // I_0 = 1
    double log_prod = 0.0;
    double s = 0.0;
    for (uint64_t m = 2; m <= N; ++m) {
      const double beta = point_env ? cfg.env.point() : cfg.env.sample(rng);
      log_prod += std::log(beta);
      const double neg_li = -std::log1p(-std::exp(log_prod));
      const PopCount z = cfg.imm.sample(rng);  // Z_m = Z_{i+1} for i = m-1
      s += weighted_log_term(z, neg_li);
      acc[m] += std::exp(-s);
    }
  }
  std::vector<double> partial(N);
  double run = 0.0;
  for (uint64_t m = 1; m <= N; ++m) {
    run += acc[m] / static_cast<double>(reps);
    partial[m - 1] = run;
  }
  return partial;
}

std::vector<double> green_partial_sum(const ChainConfig& cfg, uint64_t N,
                                      uint64_t reps, RngState& rng) {
  require_p1(cfg, "green_partial_sum");
  const double p1 = cfg.imm.pmf(1);
  std::vector<double> partial = i_series_partial_sums(cfg, N, reps, rng);
  for (double& x : partial) x *= p1;
  return partial;
}

McEstimate pgf_formula(const ChainConfig& cfg, uint64_t n, double s,
                       uint64_t reps, RngState& rng) {
  if (!(s > 0.0 && s < 1.0)) {
    throw std::invalid_argument("pgf_formula: s must be in (0,1)");
  }
  if (n < 1) throw std::invalid_argument("pgf_formula: n >= 1");
  if (reps < 2) throw std::invalid_argument("pgf_formula: reps >= 2");
  const bool point_env = cfg.env.kind() == EnvDistribution::Kind::PointMass;

  std::vector<double> suffix_log(n, 0.0);
  double mean = 0.0, m2 = 0.0;
  for (uint64_t rep = 0; rep < reps; ++rep) {
    // beta_{i,n} = prod_{j=i+1}^n beta_j: draws for j = 2..n
    for (uint64_t i = n - 1; i >= 1; --i) {
      const double beta = point_env ? cfg.env.point() : cfg.env.sample(rng);
      suffix_log[i - 1] = suffix_log[i] + std::log(beta);
    }
    double acc = 0.0;
    for (uint64_t i = 1; i <= n; ++i) {
      const PopCount z = cfg.imm.sample(rng);
      const double factor = std::exp(suffix_log[i - 1]) * (1.0 - s);
      const double neg_li = -std::log1p(-factor);
      acc += weighted_log_term(z, neg_li);
    }
    const double integrand = std::exp(-acc);
    const double delta = integrand - mean;
    mean += delta / static_cast<double>(rep + 1);
    m2 += delta * (integrand - mean);
  }
  const double var = m2 / static_cast<double>(reps - 1);
  McEstimate est;
  est.estimate = mean;
  est.ci_halfwidth = 2.576 * std::sqrt(var / static_cast<double>(reps));
  return est;
}

double pgf_exact(const ChainConfig& cfg, uint64_t n, double s) {
  if (!(s > 0.0 && s < 1.0 + 1e-15)) {
    throw std::invalid_argument("pgf_exact: s must be in (0,1)");
  }
  const uint64_t cap = cfg.imm.max_support() * std::max<uint64_t>(n, 1);
  const ExactDistribution dist = exact_distribution(cfg, n, cap);
  double acc = 0.0;
  double sk = 1.0;
  for (uint64_t k = 0; k < dist.pmf.size(); ++k) {
    acc += sk * dist.pmf[k];
    sk *= s;
  }
  return acc;
}

double pgf_formula_exact(const ChainConfig& cfg, uint64_t n, double s) {
  if (!(s > 0.0 && s < 1.0 + 1e-15)) {
    throw std::invalid_argument("pgf_formula_exact: s must be in (0,1)");
  }
  if (cfg.env.kind() != EnvDistribution::Kind::PointMass ||
      !cfg.imm.has_finite_support()) {
    throw std::invalid_argument(
        "pgf_formula_exact: needs PointMass beta and finite-support Z");
  }
  const double beta = cfg.env.point();
  double result = 1.0;
  for (uint64_t m = 0; m < n; ++m) {
    const double li = std::log1p(-std::pow(beta, static_cast<double>(m)) * (1.0 - s));
    double factor = 0.0;
    for (const auto& [z, p] : cfg.imm.table()) {
      factor += p * std::exp(static_cast<double>(z) * li);
    }
    result *= factor;
  }
  return result;
}

}  // namespace catsim
