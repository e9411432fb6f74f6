#include "catsim/distributions.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>
#include <stdexcept>

namespace catsim {

using num::Bracket;
using num::kInf;
using num::NeumaierSum;

// ---------------------------------------------------------------------------
// EnvDistribution

EnvDistribution EnvDistribution::point_mass(double b) {
  if (!(b > 0.0 && b < 1.0)) {
    throw std::invalid_argument("EnvDistribution: point mass must be in (0,1)");
  }
  EnvDistribution d;
  d.kind_ = Kind::PointMass;
  d.point_ = b;
  return d;
}

EnvDistribution EnvDistribution::uniform01() {
  EnvDistribution d;
  d.kind_ = Kind::Uniform01;
  return d;
}

EnvDistribution EnvDistribution::finite_table(
    std::vector<std::pair<double, double>> atoms) {
  if (atoms.empty()) {
    throw std::invalid_argument("EnvDistribution: empty atom table");
  }
  double total = 0.0;
  for (const auto& [value, weight] : atoms) {
    if (!(value > 0.0 && value < 1.0)) {
      throw std::invalid_argument("EnvDistribution: atom outside (0,1)");
    }
    if (!(weight > 0.0)) {
      throw std::invalid_argument("EnvDistribution: nonpositive weight");
    }
    total += weight;
  }
  if (std::abs(total - 1.0) > 1e-12) {
    throw std::invalid_argument("EnvDistribution: weights must sum to 1");
  }
  EnvDistribution d;
  d.kind_ = Kind::FiniteTable;
  d.atoms_ = std::move(atoms);
  return d;
}

double EnvDistribution::point() const {
  if (kind_ != Kind::PointMass) {
    throw std::logic_error("EnvDistribution::point: not a point mass");
  }
  return point_;
}

double EnvDistribution::sample(RngState& rng) const {
  switch (kind_) {
    case Kind::PointMass:
      return point_;
    case Kind::Uniform01:
      return rng.next_open01();
    case Kind::FiniteTable: {
      const double u = rng.next_unit();
      double acc = 0.0;
      for (const auto& [value, weight] : atoms_) {
        acc += weight;
        if (u < acc) return value;
      }
      return atoms_.back().first;  // guard against rounding in acc
    }
  }
  throw std::logic_error("EnvDistribution: invalid kind");
}

double EnvDistribution::log_moment() const {
  switch (kind_) {
    case Kind::PointMass:
      return -std::log(point_);
    case Kind::FiniteTable: {
      double mu = 0.0;
      for (const auto& [value, weight] : atoms_) mu -= weight * std::log(value);
      return mu;
    }
    case Kind::Uniform01: {
      // integral of -ln x: analytic on (0, eps], quadrature on [eps, 1]
      const double eps = 1e-6;
      const double head = eps * (1.0 - std::log(eps));
      const double body = num::adaptive_simpson(
          [](double x) { return -std::log(x); }, eps, 1.0, 1e-12);
      return head + body;
    }
  }
  throw std::logic_error("EnvDistribution: invalid kind");
}

double EnvDistribution::neg_moment(double theta) const {
  if (!(theta > 0.0)) {
    throw std::invalid_argument("EnvDistribution::neg_moment: theta must be > 0");
  }
  switch (kind_) {
    case Kind::PointMass:
      return std::pow(point_, -theta);
    case Kind::FiniteTable: {
      double m = 0.0;
      for (const auto& [value, weight] : atoms_) m += weight * std::pow(value, -theta);
      return m;
    }
    case Kind::Uniform01: {
      if (theta >= 1.0) return kInf;  // integral of x^-theta diverges
      const double eps = 1e-6;
      const double head = std::pow(eps, 1.0 - theta) / (1.0 - theta);
      const double body = num::adaptive_simpson(
          [theta](double x) { return std::pow(x, -theta); }, eps, 1.0, 1e-12);
      return head + body;
    }
  }
  throw std::logic_error("EnvDistribution: invalid kind");
}

// ---------------------------------------------------------------------------
// Heavy-tail machinery
//
// f_a(x) = 1/(x (ln x)^(a+1)) is positive, decreasing and convex beyond the
// supports used here, so for M >= kmin:
//   integral_M^inf f + f(M)/2  <=  sum_{k>=M} f(k)  <=  integral_{M-1/2}^inf f
// with integral_x^inf f_a = (ln x)^-a / a. These enclosures certify both the
// normalizer and every deep tail value.

namespace {

double heavy_pow(double lnx, double expo) {
  if (expo == 2.0) return lnx * lnx;
  if (expo == 3.0) return lnx * lnx * lnx;
  return std::pow(lnx, expo);
}

double heavy_term(double a, double x) {
  return 1.0 / (x * heavy_pow(std::log(x), a + 1.0));
}

double heavy_integral(double a, double x) {
  return 1.0 / (a * heavy_pow(std::log(x), a));
}

Bracket heavy_tail_sum_bracket(double a, double m) {
  Bracket b;
  b.lo = heavy_integral(a, m) + 0.5 * heavy_term(a, m);
  b.hi = heavy_integral(a, m - 0.5);
  return b;
}

// sum_{k >= M} 1/(k (ln k)^a), the log-moment weight, a > 1.
Bracket logmoment_tail_sum_bracket(double a, double m) {
  auto integral = [a](double x) {
    return std::pow(std::log(x), 1.0 - a) / (a - 1.0);
  };
  auto g = [a](double x) { return 1.0 / (x * heavy_pow(std::log(x), a)); };
  Bracket b;
  b.lo = integral(m) + 0.5 * g(m);
  b.hi = integral(m - 0.5);
  return b;
}

constexpr uint64_t kPartialSumLimit = 10'000'000;  // direct-summation horizon
constexpr uint64_t kPrefixCacheSize = 1u << 17;

}  // namespace

struct ImmigrationDistribution::TailCache {
  Bracket S;                    // sum_{k>=kmin} f_a(k)
  double C = 1.0;               // 1 / S.mid()
  std::vector<double> prefix;   // prefix[i] = sum_{j=kmin}^{kmin+i-1} f_a(j)
  double log_weight_sum = 0.0;  // sum_{k>=kmin} 1/(k (ln k)^a), +inf if a <= 1
};

namespace {

std::shared_ptr<const ImmigrationDistribution::TailCache> build_heavy_cache(
    double a, uint64_t kmin) {
  auto cache = std::make_shared<ImmigrationDistribution::TailCache>();
  NeumaierSum total;
  NeumaierSum logw;
  cache->prefix.resize(kPrefixCacheSize + 1);
  cache->prefix[0] = 0.0;
  for (uint64_t k = kmin; k <= kPartialSumLimit; ++k) {
    const double x = static_cast<double>(k);
    const double lnx = std::log(x);
    total.add(1.0 / (x * heavy_pow(lnx, a + 1.0)));
    if (a > 1.0) logw.add(1.0 / (x * heavy_pow(lnx, a)));
    const uint64_t i = k - kmin + 1;
    if (i <= kPrefixCacheSize) cache->prefix[i] = total.value();
  }
  const double m = static_cast<double>(kPartialSumLimit + 1);
  const Bracket tail = heavy_tail_sum_bracket(a, m);
  // widen by a conservative bound on the compensated-summation rounding
  const double slop = 1e-14 * total.value();
  cache->S.lo = total.value() + tail.lo - slop;
  cache->S.hi = total.value() + tail.hi + slop;
  cache->C = 1.0 / cache->S.mid();
  if (a > 1.0) {
    const Bracket lw = logmoment_tail_sum_bracket(a, m);
    cache->log_weight_sum = logw.value() + 0.5 * (lw.lo + lw.hi);
  } else {
    cache->log_weight_sum = kInf;
  }
  return cache;
}

std::shared_ptr<const ImmigrationDistribution::TailCache> heavy_cache(
    double a, uint64_t kmin) {
  static std::mutex mutex;
  static std::map<std::pair<double, uint64_t>,
                  std::shared_ptr<const ImmigrationDistribution::TailCache>>
      memo;
  std::lock_guard<std::mutex> lock(mutex);
  auto& slot = memo[{a, kmin}];
  if (!slot) slot = build_heavy_cache(a, kmin);
  return slot;
}

// sum_{j >= k} 1/j^2 for integer k >= 1: exact walk into the asymptotic
// trigamma expansion, error below 1e-16 at the switch point.
double inv_square_tail_sum(uint64_t k) {
  double acc = 0.0;
  uint64_t j = k;
  for (; j < 64; ++j) acc += 1.0 / (static_cast<double>(j) * static_cast<double>(j));
  const double x = static_cast<double>(j);
  const double x2 = x * x;
  acc += 1.0 / x + 1.0 / (2.0 * x2) + 1.0 / (6.0 * x2 * x) -
         1.0 / (30.0 * x2 * x2 * x) + 1.0 / (42.0 * x2 * x2 * x2 * x);
  return acc;
}

constexpr double kPi = 3.14159265358979323846;
constexpr double kInvSquareNormalizer = 6.0 / (kPi * kPi);

double inv_square_log_weight_sum() {
  // sum_{k>=1} ln k / k^2, certified by the same integral enclosure
  static const double value = [] {
    NeumaierSum s;
    constexpr uint64_t m = 1'000'000;
    for (uint64_t k = 2; k < m; ++k) {
      const double x = static_cast<double>(k);
      s.add(std::log(x) / (x * x));
    }
    auto integral = [](double x) { return (std::log(x) + 1.0) / x; };
    auto g = [](double x) { return std::log(x) / (x * x); };
    const double md = static_cast<double>(m);
    return s.value() + 0.5 * (integral(md) + 0.5 * g(md) + integral(md - 0.5));
  }();
  return value;
}

}  // namespace

Bracket imm_normalizer_bracket(double a, uint64_t kmin) {
  if (!(a > 0.0)) throw std::invalid_argument("imm_normalizer: a must be > 0");
  if (kmin < 2) throw std::invalid_argument("imm_normalizer: kmin must be >= 2");
  const auto cache = heavy_cache(a, kmin);
  return Bracket{1.0 / cache->S.hi, 1.0 / cache->S.lo};
}

double imm_normalizer(double a, uint64_t kmin) {
  return imm_normalizer_bracket(a, kmin).mid();
}

// ---------------------------------------------------------------------------
// ImmigrationDistribution

ImmigrationDistribution ImmigrationDistribution::deterministic(uint64_t k) {
  if (k < 1) {
    throw std::invalid_argument("ImmigrationDistribution: deterministic k >= 1");
  }
  ImmigrationDistribution d;
  d.kind_ = Kind::Deterministic;
  d.table_ = {{k, 1.0}};
  return d;
}

ImmigrationDistribution ImmigrationDistribution::finite_table(
    std::vector<std::pair<uint64_t, double>> pmf) {
  if (pmf.empty()) {
    throw std::invalid_argument("ImmigrationDistribution: empty pmf table");
  }
  std::sort(pmf.begin(), pmf.end());
  double total = 0.0;
  for (size_t i = 0; i < pmf.size(); ++i) {
    if (i > 0 && pmf[i].first == pmf[i - 1].first) {
      throw std::invalid_argument("ImmigrationDistribution: duplicate support point");
    }
    if (!(pmf[i].second > 0.0)) {
      throw std::invalid_argument("ImmigrationDistribution: nonpositive probability");
    }
    total += pmf[i].second;
  }
  if (std::abs(total - 1.0) > 1e-8) {
    throw std::invalid_argument("ImmigrationDistribution: pmf must sum to 1");
  }
  ImmigrationDistribution d;
  d.kind_ = Kind::FiniteTable;
  d.table_ = std::move(pmf);
  return d;
}

ImmigrationDistribution ImmigrationDistribution::log_tail(double a, uint64_t kmin) {
  if (!(a > 0.0)) {
    throw std::invalid_argument("ImmigrationDistribution: log_tail needs a > 0");
  }
  if (kmin < 2) {
    throw std::invalid_argument("ImmigrationDistribution: log_tail needs kmin >= 2");
  }
  ImmigrationDistribution d;
  d.kind_ = Kind::LogTail;
  d.a_ = a;
  d.kmin_ = kmin;
  d.ensure_cache();
  d.norm_bracket_ = imm_normalizer_bracket(a, kmin);
  return d;
}

ImmigrationDistribution ImmigrationDistribution::inverse_square() {
  ImmigrationDistribution d;
  d.kind_ = Kind::InverseSquare;
  d.kmin_ = 1;
  d.norm_bracket_ = Bracket{kInvSquareNormalizer, kInvSquareNormalizer};
  return d;
}

void ImmigrationDistribution::ensure_cache() const {
  if (kind_ == Kind::LogTail && !cache_) cache_ = heavy_cache(a_, kmin_);
}

uint64_t ImmigrationDistribution::max_support() const {
  if (!has_finite_support()) {
    throw std::logic_error("ImmigrationDistribution: unbounded support");
  }
  return table_.back().first;
}

double ImmigrationDistribution::normalizer() const { return norm_bracket_.mid(); }

Bracket ImmigrationDistribution::normalizer_bracket() const { return norm_bracket_; }

bool ImmigrationDistribution::satisfies_irreducibility() const {
  switch (kind_) {
    case Kind::Deterministic:
    case Kind::FiniteTable:
      for (const auto& [k, p] : table_) {
        if (k >= 2 && p > 0.0) return true;
      }
      return false;
    case Kind::LogTail:
    case Kind::InverseSquare:
      return true;
  }
  return false;
}

double ImmigrationDistribution::pmf(uint64_t k) const {
  switch (kind_) {
    case Kind::Deterministic:
    case Kind::FiniteTable:
      for (const auto& [v, p] : table_) {
        if (v == k) return p;
      }
      return 0.0;
    case Kind::LogTail:
      if (k < kmin_) return 0.0;
      return norm_bracket_.mid() * heavy_term(a_, static_cast<double>(k));
    case Kind::InverseSquare: {
      if (k < 1) return 0.0;
      const double x = static_cast<double>(k);
      return kInvSquareNormalizer / (x * x);
    }
  }
  throw std::logic_error("ImmigrationDistribution: invalid kind");
}

double ImmigrationDistribution::tail_large(double x) const {
  // P(Z >= x) beyond the prefix cache; enclosure midpoint, error ~1e-13.
  const Bracket b = heavy_tail_sum_bracket(a_, x);
  double t = norm_bracket_.mid() * b.mid();
  return std::clamp(t, 0.0, 1.0);
}

double ImmigrationDistribution::tail_count(uint64_t k) const {
  switch (kind_) {
    case Kind::Deterministic:
    case Kind::FiniteTable: {
      double t = 0.0;
      for (const auto& [v, p] : table_) {
        if (v >= k) t += p;
      }
      return t;
    }
    case Kind::LogTail: {
      if (k <= kmin_) return 1.0;
      ensure_cache();
      const uint64_t i = k - kmin_;
      if (i <= kPrefixCacheSize) {
        const double t =
            norm_bracket_.mid() * (cache_->S.mid() - cache_->prefix[i]);
        return std::clamp(t, 0.0, 1.0);
      }
      return tail_large(static_cast<double>(k));
    }
    case Kind::InverseSquare:
      if (k <= 1) return 1.0;
      return std::clamp(kInvSquareNormalizer * inv_square_tail_sum(k), 0.0, 1.0);
  }
  throw std::logic_error("ImmigrationDistribution: invalid kind");
}

double ImmigrationDistribution::cdf(uint64_t k) const {
  return 1.0 - tail_count(k + 1);
}

PopCount ImmigrationDistribution::sample(RngState& rng) const {
  switch (kind_) {
    case Kind::Deterministic:
      return PopCount::exact(table_.front().first);
    case Kind::FiniteTable: {
      const double u = rng.next_unit();
      double acc = 0.0;
      for (const auto& [v, p] : table_) {
        acc += p;
        if (u < acc) return PopCount::exact(v);
      }
      return PopCount::exact(table_.back().first);
    }
    case Kind::LogTail:
    case Kind::InverseSquare:
      break;
  }

  // Inverse CDF for the heavy tails: Z = k iff tail(k+1) < v <= tail(k).
  const double v = rng.next_open01();
  const uint64_t lo_support = kind_ == Kind::LogTail ? kmin_ : 1;
  const uint64_t big = uint64_t{1} << 48;
  if (tail_count(big) >= v) {
    // beyond the exact-integer range: asymptotic inverse on the log scale
    double ln_z;
    if (kind_ == Kind::LogTail) {
      ln_z = std::pow(norm_bracket_.mid() / (a_ * v), 1.0 / a_);
    } else {
      ln_z = std::log(kInvSquareNormalizer) - std::log(v);
    }
    return PopCount::from_log(ln_z);
  }
  // grow a bracket [lo, hi] with tail(lo) >= v > tail(hi+1)
  uint64_t lo = lo_support;
  uint64_t hi = lo_support;
  while (tail_count(hi + 1) >= v) {
    lo = hi + 1;
    hi = hi * 2;
    if (hi >= big) {
      hi = big;
      break;
    }
  }
  while (hi > lo) {
    const uint64_t mid = lo + (hi - lo + 1) / 2;
    if (tail_count(mid) >= v) {
      lo = mid;
    } else {
      hi = mid - 1;
    }
  }
  return PopCount::exact(lo);
}

double ImmigrationDistribution::log_moment() const {
  switch (kind_) {
    case Kind::Deterministic:
      return std::log(static_cast<double>(table_.front().first));
    case Kind::FiniteTable: {
      double m = 0.0;
      for (const auto& [v, p] : table_) {
        if (v >= 1) m += p * std::log(static_cast<double>(v));
      }
      return m;
    }
    case Kind::LogTail:
      // E(ln Z) = C sum 1/(k (ln k)^a): diverges iff a <= 1 (analytic fact)
      if (a_ <= 1.0) return kInf;
      ensure_cache();
      return norm_bracket_.mid() * cache_->log_weight_sum;
    case Kind::InverseSquare:
      return kInvSquareNormalizer * inv_square_log_weight_sum();
  }
  throw std::logic_error("ImmigrationDistribution: invalid kind");
}

TailReport ImmigrationDistribution::log_tail_report(double t) const {
  if (!(t > 0.0)) {
    throw std::invalid_argument("log_tail_report: t must be > 0");
  }
  TailReport r;
  r.t = t;
  const double log_big = 48.0 * PopCount::kLn2;
  switch (kind_) {
    case Kind::Deterministic:
    case Kind::FiniteTable: {
      double tail = 0.0;
      for (const auto& [v, p] : table_) {
        if (v >= 1 && std::log(static_cast<double>(v)) > t) tail += p;
      }
      r.tail = tail;
      break;
    }
    case Kind::LogTail:
    case Kind::InverseSquare: {
      if (t < log_big) {
        const double x = std::exp(t);
        const uint64_t k = static_cast<uint64_t>(std::floor(x)) + 1;  // P(Z > x)
        r.tail = tail_count(std::max<uint64_t>(k, 1));
      } else if (kind_ == Kind::LogTail) {
        // integral asymptotic C/(a t^a); remainder relative O(e^-t)
        r.tail = norm_bracket_.mid() / (a_ * heavy_pow(t, a_));
      } else {
        r.tail = kInvSquareNormalizer * std::exp(-t);
      }
      break;
    }
  }
  r.functional = t * r.tail;
  return r;
}

double ImmigrationDistribution::laplace_direct(double lambda) const {
  if (!(lambda > 0.0)) {
    throw std::invalid_argument("laplace_direct: lambda must be > 0");
  }
  if (has_finite_support()) {
    double s = 0.0;
    for (const auto& [v, p] : table_) {
      s += p * std::exp(-lambda * static_cast<double>(v));
    }
    return s;
  }
  // truncate once e^{-lambda k} < e^-40; the remainder is below
  // e^{-lambda K} tail(K) / (1 - e^-lambda) <= 1e-13
  const uint64_t kstop = static_cast<uint64_t>(std::ceil(42.0 / lambda)) + kmin_;
  NeumaierSum s;
  for (uint64_t k = kmin_; k <= kstop; ++k) {
    s.add(pmf(k) * std::exp(-lambda * static_cast<double>(k)));
  }
  return s.value();
}

double ImmigrationDistribution::laplace_tail_form(double lambda) const {
  if (!(lambda > 0.0)) {
    throw std::invalid_argument("laplace_tail_form: lambda must be > 0");
  }
  uint64_t kstop;
  if (has_finite_support()) {
    kstop = max_support();
  } else {
    kstop = static_cast<uint64_t>(std::ceil(42.0 / lambda)) + kmin_;
  }
  NeumaierSum s;
  for (uint64_t k = 1; k <= kstop; ++k) {
    const double tc = tail_count(k);
    if (tc == 0.0) break;
    s.add(std::exp(-lambda * static_cast<double>(k)) * tc);
  }
  return 1.0 - std::expm1(lambda) * s.value();
}

// ---------------------------------------------------------------------------
// Series bound (lhs, rhs) with lhs <= rhs

std::pair<double, double> series_bound_lemma3(double c, int i) {
  if (!(c > 0.0 && c < 1.0)) {
    throw std::invalid_argument("series_bound_lemma3: c must be in (0,1)");
  }
  if (i < 1) {
    throw std::invalid_argument("series_bound_lemma3: i must be >= 1");
  }
  const double k1 = std::exp(-1.0) / (1.0 - std::exp(-1.0));
  const double ln_d = -std::log(c);
  const double rhs = k1 / (static_cast<double>(i) * ln_d);

  const double lambda = std::pow(c, i);
  const double start = 1.0 / lambda;  // d^i, with lambda * start == 1
  const double k0 = std::max(2.0, std::ceil(start));

  constexpr double kDirectLimit = 4e5;  // ~50 * limit summation terms
  double lhs;
  if (start <= kDirectLimit) {
    NeumaierSum s;
    const double kend = k0 + 52.0 / lambda;  // e^{-lambda k} below e^-50 past here
    for (double k = k0; k <= kend; k += 1.0) {
      s.add(std::exp(-lambda * k) / std::log(k));
    }
    lhs = lambda * s.value();
  } else {
    // upper enclosure: lhs <= lambda f(k0) + lambda int_{k0}^inf e^{-l x}/ln x
    //                      = e^{-lambda k0} (lambda/ln k0 + J),
    // J = int_0^inf e^{-u} / ln(k0 + u start) du
    const double j = num::adaptive_simpson(
        [k0, start](double u) { return std::exp(-u) / std::log(k0 + u * start); },
        0.0, 50.0, 1e-13);
    lhs = std::exp(-lambda * k0) * (j + lambda / std::log(k0));
  }
  return {lhs, rhs};
}

}  // namespace catsim
