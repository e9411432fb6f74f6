#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <string>

namespace catsim {

// Population count with a hybrid representation:
//   Exact(n)        -- nonnegative integer, n <= 2^53
//   LogScale(logv)  -- ln of the population, for astronomically large values
//
// Heavy-tailed immigration makes populations far beyond any machine integer
// routine, so arithmetic results are re-encoded with hysteresis: exact
// results switch up to log scale above 2^48, log-scale results switch down
// (rounding to the nearest integer) below 2^47. The gap prevents flapping
// between representations along a trajectory.
class PopCount {
 public:
  static constexpr uint64_t kMaxExact = uint64_t{1} << 53;
  static constexpr double kLn2 = 0.6931471805599453;
  static constexpr double kLogUp = 48.0 * kLn2;    // ln(2^48)
  static constexpr double kLogDown = 47.0 * kLn2;  // ln(2^47)

  constexpr PopCount() = default;

  static PopCount exact(uint64_t n) {
    if (n > kMaxExact) {
      throw std::invalid_argument("PopCount::exact: value above 2^53");
    }
    PopCount p;
    p.n_ = n;
    p.log_ = false;
    return p;
  }

  // Construct from ln(value); values below the down-threshold are rounded
  // to the nearest integer and stored exactly.
  static PopCount from_log(double logval) {
    if (std::isnan(logval)) {
      throw std::invalid_argument("PopCount::from_log: NaN");
    }
    if (logval < kLogDown) {
      const double v = std::exp(logval);
      return exact(static_cast<uint64_t>(std::llround(v)));
    }
    PopCount p;
    p.log_ = true;
    p.logv_ = logval;
    return p;
  }

  bool is_exact() const { return !log_; }

  uint64_t exact_value() const {
    if (log_) throw std::logic_error("PopCount: log-scale value is not exact");
    return n_;
  }

  // ln(value); -inf for the empty population.
  double log_value() const {
    if (log_) return logv_;
    if (n_ == 0) return -std::numeric_limits<double>::infinity();
    return std::log(static_cast<double>(n_));
  }

  // Value as a double; +inf when e^logv overflows.
  double as_double() const {
    return log_ ? std::exp(logv_) : static_cast<double>(n_);
  }

  bool is_zero() const { return !log_ && n_ == 0; }

  // value * x for x >= 0, saturating to +inf; safe for huge log-scale values.
  double value_times(double x) const {
    if (x == 0.0 || is_zero()) return 0.0;
    if (!log_ && n_ < kMaxExact) return static_cast<double>(n_) * x;
    const double lv = log_value() + std::log(x);
    return lv > 709.0 ? std::numeric_limits<double>::infinity() : std::exp(lv);
  }

  friend PopCount operator+(const PopCount& a, const PopCount& b) {
    if (!a.log_ && !b.log_) {
      const uint64_t s = a.n_ + b.n_;  // both <= 2^53, no overflow
      if (s <= (uint64_t{1} << 48)) return exact(s);
      return from_log(std::log(static_cast<double>(s)));
    }
    if (a.is_zero()) return b;
    if (b.is_zero()) return a;
    const double la = a.log_value();
    const double lb = b.log_value();
    const double hi = la > lb ? la : lb;
    const double lo = la > lb ? lb : la;
    return from_log(hi + std::log1p(std::exp(lo - hi)));
  }

  friend bool operator==(const PopCount& a, const PopCount& b) {
    if (!a.log_ && !b.log_) return a.n_ == b.n_;
    return a.log_value() == b.log_value();
  }
  friend bool operator<(const PopCount& a, const PopCount& b) {
    if (!a.log_ && !b.log_) return a.n_ < b.n_;
    return a.log_value() < b.log_value();
  }
  friend bool operator!=(const PopCount& a, const PopCount& b) { return !(a == b); }
  friend bool operator>(const PopCount& a, const PopCount& b) { return b < a; }
  friend bool operator<=(const PopCount& a, const PopCount& b) { return !(b < a); }
  friend bool operator>=(const PopCount& a, const PopCount& b) { return !(a < b); }

  // Histogram key: the exact value, or a coarse high bin for log-scale
  // values. Intended for small-support laws; log-scale samples land in
  // per-integer-log bins above 2^62.
  uint64_t bin_key() const {
    if (!log_) return n_;
    const uint64_t base = uint64_t{1} << 62;
    const double l = logv_ < 700.0 ? logv_ : 700.0;
    return base + static_cast<uint64_t>(std::llround(l));
  }

  std::string to_string() const {
    if (!log_) return std::to_string(n_);
    return "exp(" + std::to_string(logv_) + ")";
  }

 private:
  uint64_t n_ = 0;
  double logv_ = 0.0;
  bool log_ = false;
};

}  // namespace catsim
