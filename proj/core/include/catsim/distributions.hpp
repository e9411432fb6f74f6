#pragma once

#include <cstdint>
#include <memory>
#include <utility>
#include <vector>

#include "catsim/numerics.hpp"
#include "catsim/pop_count.hpp"
#include "catsim/rng.hpp"

namespace catsim {

// Law of the per-step survival probability beta, supported strictly inside
// (0,1). The log-moment mu = E(-ln beta) is finite and positive for every
// representable variant.
class EnvDistribution {
 public:
  enum class Kind { PointMass, Uniform01, FiniteTable };

  static EnvDistribution point_mass(double b);
  static EnvDistribution uniform01();
  // atoms: (value in (0,1), weight); weights positive, summing to 1
  // within 1e-12.
  static EnvDistribution finite_table(std::vector<std::pair<double, double>> atoms);

  Kind kind() const { return kind_; }
  double point() const;  // PointMass only
  const std::vector<std::pair<double, double>>& atoms() const { return atoms_; }

  // One draw of beta, always in the open interval (0,1).
  double sample(RngState& rng) const;

  // mu = E(-ln beta). Closed form for PointMass/FiniteTable, quadrature
  // (abs. tol 1e-10, singularity at 0 integrated analytically) for Uniform01.
  double log_moment() const;

  // E(beta^-theta), theta > 0; +inf when the integral diverges
  // (Uniform01 with theta >= 1).
  double neg_moment(double theta) const;

  // True when E(beta^-theta) < inf for some theta > 0. Holds for every
  // representable variant.
  bool has_finite_neg_moment() const { return true; }

 private:
  EnvDistribution() = default;
  Kind kind_ = Kind::PointMass;
  double point_ = 0.5;
  std::vector<std::pair<double, double>> atoms_;
};

// t * P(ln Z > t), the tail functional whose limit relative to mu decides
// recurrence vs transience.
struct TailReport {
  double t = 0.0;
  double tail = 0.0;        // P(ln Z > t)
  double functional = 0.0;  // t * tail
};

// Certified two-sided value of the heavy-tail normalizer
// C(a) = 1 / sum_{k>=kmin} 1/(k (ln k)^(a+1)).
num::Bracket imm_normalizer_bracket(double a, uint64_t kmin = 2);
double imm_normalizer(double a, uint64_t kmin = 2);

// Immigration law Z on the nonnegative integers.
//
// Variants:
//   Deterministic(k), k >= 1
//   FiniteTable{(k, p)}          -- k >= 0 allowed
//   LogTail(a, kmin=2)           -- P(Z=k) = C/(k (ln k)^(a+1)), k >= kmin
//   InverseSquare                -- P(Z=k) = C'/k^2, k >= 1
//
// Zero is admitted in the support (needed for aggregated immigration laws);
// irreducibility of the chain additionally needs P(Z >= 2) > 0, exposed as
// a query rather than a construction error.
class ImmigrationDistribution {
 public:
  enum class Kind { Deterministic, FiniteTable, LogTail, InverseSquare };

  static ImmigrationDistribution deterministic(uint64_t k);
  static ImmigrationDistribution finite_table(std::vector<std::pair<uint64_t, double>> pmf);
  static ImmigrationDistribution log_tail(double a, uint64_t kmin = 2);
  static ImmigrationDistribution inverse_square();

  Kind kind() const { return kind_; }
  bool has_finite_support() const {
    return kind_ == Kind::Deterministic || kind_ == Kind::FiniteTable;
  }
  uint64_t max_support() const;  // finite-support variants only
  const std::vector<std::pair<uint64_t, double>>& table() const { return table_; }
  double tail_exponent() const { return a_; }  // LogTail only
  uint64_t kmin() const { return kmin_; }

  // Normalizer C (LogTail) or C' = 6/pi^2 (InverseSquare); 1 otherwise.
  double normalizer() const;
  num::Bracket normalizer_bracket() const;

  bool satisfies_irreducibility() const;  // P(Z >= 2) > 0
  double p1() const { return pmf(1); }    // P(Z = 1)

  double pmf(uint64_t k) const;
  double cdf(uint64_t k) const;         // P(Z <= k)
  double tail_count(uint64_t k) const;  // P(Z >= k); cdf(k) = 1 - tail_count(k+1)

  // Exact inverse-CDF draw. Heavy-tail draws beyond the exact-integer
  // range return a log-scale PopCount through the asymptotic inverse
  // ln Z = (C/(a u))^(1/a); its relative error on ln Z is far below the
  // documented 1e-3 bound at that range.
  PopCount sample(RngState& rng) const;

  // E(ln Z), counting mass at zero as contributing zero (the upper tail is
  // what the log-moment criterion is about). +inf for LogTail with a <= 1;
  // the divergence is decided analytically by variant, never numerically.
  double log_moment() const;

  // P(ln Z > t) and the functional t * P(ln Z > t). Exact tail evaluation
  // while e^t is in integer range, integral asymptotics beyond.
  TailReport log_tail_report(double t) const;

  // E(e^{-lambda Z}) two ways: directly against the pmf, and through the
  // tail identity E(e^{-lambda Z}) = 1 - (e^lambda - 1) sum_k e^{-lambda k} P(Z>=k).
  // Both truncate with remainder below 1e-12 and agree within 1e-10.
  double laplace_direct(double lambda) const;
  double laplace_tail_form(double lambda) const;

  struct TailCache;  // certified partial sums shared across instances

 private:
  ImmigrationDistribution() = default;
  double tail_large(double x) const;  // P(Z >= x) for x beyond the prefix cache
  void ensure_cache() const;

  Kind kind_ = Kind::Deterministic;
  std::vector<std::pair<uint64_t, double>> table_;  // sorted by k
  double a_ = 1.0;
  uint64_t kmin_ = 2;
  num::Bracket norm_bracket_{1.0, 1.0};

  // Lazily built prefix sums of the unnormalized pmf for heavy-tail
  // variants: cache_[i] = sum_{j=kmin}^{kmin+i-1} f(j), so that
  // P(Z >= kmin+i) = C * (S - cache_[i]).
  mutable std::shared_ptr<const TailCache> cache_;
};

// Lemma-style series bound: returns (lhs, rhs) with
//   lhs = c^i * sum_{k >= d^i} e^{-c^i k} / ln k,   d = 1/c,
//   rhs = k1 / (i ln d),                            k1 = e^-1/(1 - e^-1),
// and lhs <= rhs. Direct summation while d^i is small enough to enumerate;
// an upper integral bracket for lhs beyond that.
std::pair<double, double> series_bound_lemma3(double c, int i);

}  // namespace catsim
