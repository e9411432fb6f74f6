#pragma once

#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>

namespace catsim::num {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

// Compensated (Neumaier) summation. Keeps the rounding error of long sums
// near one ulp of the total instead of growing with the term count.
class NeumaierSum {
 public:
  void add(double x) {
    const double t = sum_ + x;
    if (std::abs(sum_) >= std::abs(x)) {
      comp_ += (sum_ - t) + x;
    } else {
      comp_ += (x - t) + sum_;
    }
    sum_ = t;
  }
  double value() const { return sum_ + comp_; }

 private:
  double sum_ = 0.0;
  double comp_ = 0.0;
};

inline double log_sum_exp(double a, double b) {
  if (a == -kInf) return b;
  if (b == -kInf) return a;
  const double hi = std::max(a, b);
  const double lo = std::min(a, b);
  return hi + std::log1p(std::exp(lo - hi));
}

// Regularized incomplete gamma functions, P(a,x) + Q(a,x) = 1.
// Series for x < a+1, Lentz continued fraction otherwise; absolute error
// well below 1e-12 over the chi-square range used here.
double gamma_p(double a, double x);
double gamma_q(double a, double x);

// Survival function of the chi-square distribution with dof degrees of
// freedom, i.e. the p-value of a chi-square statistic.
inline double chi_square_sf(double statistic, double dof) {
  return gamma_q(0.5 * dof, 0.5 * statistic);
}

// Inverse of the standard normal CDF (Wichura's AS241, double precision).
double inverse_normal_cdf(double p);

// Adaptive Simpson quadrature with absolute tolerance `tol` on [a, b].
double adaptive_simpson(const std::function<double(double)>& f, double a,
                        double b, double tol, int max_depth = 40);

// A two-sided enclosure of a real quantity. Used for series values whose
// truncation error is controlled by integral bounds.
struct Bracket {
  double lo = 0.0;
  double hi = 0.0;
  double mid() const { return 0.5 * (lo + hi); }
  double halfwidth() const { return 0.5 * (hi - lo); }
  bool contains(double x) const { return lo <= x && x <= hi; }
};

}  // namespace catsim::num
