#include "catsim/classify.hpp"

#include <cmath>
#include <stdexcept>

namespace catsim {

using num::kInf;

const char* verdict_name(Verdict v) {
  switch (v) {
    case Verdict::PositiveRecurrent:
      return "positive_recurrent";
    case Verdict::NullRecurrent:
      return "null_recurrent";
    case Verdict::Transient:
      return "transient";
    case Verdict::Indeterminate:
      return "indeterminate";
  }
  return "indeterminate";
}

Regime classify_general(const ClassificationInput& in) {
  if (!(in.mu > 0.0)) {
    throw std::invalid_argument("classify_general: mu must be > 0");
  }
  if (in.tail_liminf > in.tail_limsup) {
    throw std::invalid_argument("classify_general: tail_liminf > tail_limsup");
  }
  if (in.log_moment_finite) {
    return {Verdict::PositiveRecurrent, {"Thm3"}};
  }
  if (in.hyp1 && in.tail_limsup < in.mu) {
    // recurrent by the tail criterion, not positive by the converse
    return {Verdict::NullRecurrent, {"Thm1", "Thm3-converse"}};
  }
  if (in.hyp2 && in.tail_liminf > in.mu) {
    return {Verdict::Transient, {"Thm2"}};
  }
  Regime r;
  r.verdict = Verdict::Indeterminate;
  if (!in.hyp1 && in.tail_limsup < in.mu) {
    r.citations.push_back("Hypothesis 1 unavailable");
  }
  if (!in.hyp2 && in.tail_liminf > in.mu) {
    r.citations.push_back("Hypothesis 2 unavailable");
  }
  if (in.tail_liminf <= in.mu && in.mu <= in.tail_limsup) {
    r.citations.push_back("mu between the tail limits: no verdict applies");
  }
  if (r.citations.empty()) {
    r.citations.push_back("no criterion applicable");
  }
  return r;
}

num::Bracket beta_critical_bracket(double a) {
  if (a != 1.0) {
    throw std::invalid_argument("beta_critical: defined only for a = 1");
  }
  const num::Bracket c = imm_normalizer_bracket(1.0, 2);
  return num::Bracket{std::exp(-c.hi), std::exp(-c.lo)};
}

double beta_critical(double a) { return beta_critical_bracket(a).mid(); }

Regime classify_example(double a, double beta) {
  if (!(a > 0.0)) {
    throw std::invalid_argument("classify_example: a must be > 0");
  }
  if (!(beta > 0.0 && beta < 1.0)) {
    throw std::invalid_argument("classify_example: beta must be in (0,1)");
  }
  if (a > 1.0) {
    // tail functional limit 0 < mu for every beta; E(ln Z) finite
    return {Verdict::PositiveRecurrent, {"Thm3"}};
  }
  if (a < 1.0) {
    // tail functional diverges, exceeds every mu; point mass satisfies Hyp 2
    return {Verdict::Transient, {"Thm2"}};
  }
  // a = 1: limit is C, mu = -ln beta; change point at beta_c = e^-C.
  // The theorem-consistent orientation: beta < beta_c means mu > C, hence
  // recurrent (and null recurrent since E(ln Z) = inf); beta > beta_c means
  // mu < C, hence transient.
  const double beta_c = beta_critical(1.0);
  constexpr double kTolerance = 1e-9;
  if (std::abs(beta - beta_c) <= kTolerance) {
    return {Verdict::Indeterminate,
            {"beta within the certified tolerance band of beta_c"}};
  }
  if (beta < beta_c) {
    return {Verdict::NullRecurrent, {"Thm1", "Thm3-converse"}};
  }
  return {Verdict::Transient, {"Thm2"}};
}

ClassificationInput classification_input(const EnvDistribution& env,
                                         const ImmigrationDistribution& imm) {
  ClassificationInput in;
  in.mu = env.log_moment();
  in.log_moment_finite = std::isfinite(imm.log_moment());
  in.hyp1 = true;  // environment and immigration streams are independent here
  in.hyp2 = env.has_finite_neg_moment();
  // tail limits are analytic facts of the variant, never finite-t estimates
  switch (imm.kind()) {
    case ImmigrationDistribution::Kind::Deterministic:
    case ImmigrationDistribution::Kind::FiniteTable:
    case ImmigrationDistribution::Kind::InverseSquare:
      in.tail_limsup = 0.0;
      in.tail_liminf = 0.0;
      break;
    case ImmigrationDistribution::Kind::LogTail: {
      const double a = imm.tail_exponent();
      if (a > 1.0) {
        in.tail_limsup = 0.0;
        in.tail_liminf = 0.0;
      } else if (a < 1.0) {
        in.tail_limsup = kInf;
        in.tail_liminf = kInf;
      } else {
        const double c = imm.normalizer();
        in.tail_limsup = c;
        in.tail_liminf = c;
      }
      break;
    }
  }
  return in;
}

std::vector<double> geometric_weighted_series(const ImmigrationDistribution& imm,
                                              double b, uint64_t n, RngState& rng) {
  if (!(b > 0.0 && b < 1.0)) {
    throw std::invalid_argument("geometric_weighted_series: b must be in (0,1)");
  }
  const double log_b = std::log(b);
  std::vector<double> partial(n);
  double sum = 0.0;
  for (uint64_t i = 1; i <= n; ++i) {
    const PopCount z = imm.sample(rng);
    double increment = 0.0;
    if (!z.is_zero()) {
      const double log_term = z.log_value() + static_cast<double>(i) * log_b;
      increment = log_term > 709.0 ? kInf : std::exp(log_term);
    }
    sum += increment;  // saturates at +inf for diverging paths
    partial[i - 1] = sum;
  }
  return partial;
}

}  // namespace catsim
