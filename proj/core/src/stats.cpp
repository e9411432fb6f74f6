#include "catsim/stats.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "catsim/chain.hpp"
#include "catsim/numerics.hpp"

namespace catsim::stats {

uint64_t derive_stream_seed(const RngSpec& spec, uint64_t stream_index) {
  constexpr uint64_t kPhi = 0x9e3779b97f4a7c15ULL;  // odd: injective in index
  return splitmix64_mix(spec.master_seed + kPhi * (stream_index + 1));
}

RngState make_stream(const RngSpec& spec, uint64_t stream_index) {
  return RngState(derive_stream_seed(spec, stream_index));
}

void add_sample(Histogram& h, const PopCount& x) { ++h[x.bin_key()]; }

namespace {

struct PooledBin {
  double a = 0.0;
  double b = 0.0;
};

uint64_t total_count(const Histogram& h) {
  uint64_t t = 0;
  for (const auto& [k, c] : h) t += c;
  return t;
}

}  // namespace

TestResult chi_square_two_sample(const Histogram& a, const Histogram& b) {
  const double na = static_cast<double>(total_count(a));
  const double nb = static_cast<double>(total_count(b));
  if (na == 0.0 || nb == 0.0) {
    throw std::invalid_argument("chi_square_two_sample: empty histogram");
  }

  // union of keys, ordered by value
  std::vector<std::pair<uint64_t, PooledBin>> bins;
  {
    auto ia = a.begin();
    auto ib = b.begin();
    while (ia != a.end() || ib != b.end()) {
      if (ib == b.end() || (ia != a.end() && ia->first < ib->first)) {
        bins.push_back({ia->first, {static_cast<double>(ia->second), 0.0}});
        ++ia;
      } else if (ia == a.end() || ib->first < ia->first) {
        bins.push_back({ib->first, {0.0, static_cast<double>(ib->second)}});
        ++ib;
      } else {
        bins.push_back({ia->first, {static_cast<double>(ia->second),
                                    static_cast<double>(ib->second)}});
        ++ia;
        ++ib;
      }
    }
  }

  // pool adjacent bins until the expected count under the pooled null is
  // >= 5 in both samples
  const double fa = na / (na + nb);
  const double fb = nb / (na + nb);
  std::vector<PooledBin> pooled;
  PooledBin run;
  auto run_ok = [&](const PooledBin& r) {
    const double t = r.a + r.b;
    return t * fa >= 5.0 && t * fb >= 5.0;
  };
  for (const auto& [key, bin] : bins) {
    run.a += bin.a;
    run.b += bin.b;
    if (run_ok(run)) {
      pooled.push_back(run);
      run = PooledBin{};
    }
  }
  if (run.a + run.b > 0.0) {
    if (!pooled.empty()) {
      pooled.back().a += run.a;
      pooled.back().b += run.b;
    } else {
      pooled.push_back(run);
    }
  }
  if (pooled.size() < 2) {
    throw std::runtime_error(
        "chi_square_two_sample: all mass pooled into one bin");
  }

  double stat = 0.0;
  for (const auto& bin : pooled) {
    const double t = bin.a + bin.b;
    const double d = bin.a * std::sqrt(nb / na) - bin.b * std::sqrt(na / nb);
    stat += d * d / t;
  }
  TestResult r;
  r.statistic = stat;
  r.dof = pooled.size() - 1;
  r.pooled_bins = pooled.size();
  r.p_value = num::chi_square_sf(stat, static_cast<double>(r.dof));
  return r;
}

TestResult chi_square_vs_exact(const Histogram& sample,
                               std::span<const double> pmf) {
  const uint64_t n_total = total_count(sample);
  if (n_total == 0) {
    throw std::invalid_argument("chi_square_vs_exact: empty histogram");
  }
  if (pmf.empty()) {
    throw std::invalid_argument("chi_square_vs_exact: empty pmf");
  }
  const double n = static_cast<double>(n_total);

  // observed counts over {0..len-1}, plus one overflow cell for everything
  // beyond (matching the pmf truncation remainder)
  std::vector<double> observed(pmf.size() + 1, 0.0);
  for (const auto& [key, count] : sample) {
    if (key < pmf.size()) {
      observed[key] += static_cast<double>(count);
    } else {
      observed.back() += static_cast<double>(count);
    }
  }
  double pmf_sum = 0.0;
  for (const double p : pmf) pmf_sum += p;
  std::vector<double> expected(pmf.begin(), pmf.end());
  expected.push_back(std::max(0.0, 1.0 - pmf_sum));
  for (double& e : expected) e *= n;

  // pool adjacent cells until expected >= 5
  std::vector<std::pair<double, double>> pooled;  // (observed, expected)
  double run_o = 0.0, run_e = 0.0;
  for (size_t i = 0; i < expected.size(); ++i) {
    run_o += observed[i];
    run_e += expected[i];
    if (run_e >= 5.0) {
      pooled.push_back({run_o, run_e});
      run_o = run_e = 0.0;
    }
  }
  if (run_e > 0.0 || run_o > 0.0) {
    if (!pooled.empty()) {
      pooled.back().first += run_o;
      pooled.back().second += run_e;
    } else {
      pooled.push_back({run_o, run_e});
    }
  }
  if (pooled.size() < 2) {
    throw std::runtime_error("chi_square_vs_exact: all mass pooled into one bin");
  }

  double stat = 0.0;
  for (const auto& [o, e] : pooled) {
    const double d = o - e;
    stat += d * d / e;
  }
  TestResult r;
  r.statistic = stat;
  r.dof = pooled.size() - 1;
  r.pooled_bins = pooled.size();
  r.p_value = num::chi_square_sf(stat, static_cast<double>(r.dof));
  return r;
}

double tv_distance(const Histogram& sample, std::span<const double> pmf) {
  const uint64_t n_total = total_count(sample);
  if (n_total == 0) {
    throw std::invalid_argument("tv_distance: empty histogram");
  }
  const double n = static_cast<double>(n_total);
  double acc = 0.0;
  double emp_covered = 0.0;
  for (size_t k = 0; k < pmf.size(); ++k) {
    const auto it = sample.find(k);
    const double emp = it == sample.end() ? 0.0 : static_cast<double>(it->second) / n;
    acc += std::abs(emp - pmf[k]);
    emp_covered += emp;
  }
  // empirical mass outside the pmf support counts in full
  acc += 1.0 - emp_covered;
  return 0.5 * acc;
}

ReturnStats return_time_stats(const Trajectory& traj, uint64_t m) {
  ReturnStats rs;
  rs.target_set_max = m;
  const uint64_t horizon = traj.states.empty() ? 0 : traj.states.size() - 1;
  if (horizon == 0) {
    rs.mean_return_time = num::kInf;
    return rs;
  }
  const PopCount bound = PopCount::exact(m);
  uint64_t last_visit = 0;
  bool seen = false;
  uint64_t gap_count = 0;
  double gap_sum = 0.0;
  for (uint64_t n = 1; n <= horizon; ++n) {
    if (traj.states[n] <= bound) {
      ++rs.visit_count;
      if (seen) {
        gap_sum += static_cast<double>(n - last_visit);
        ++gap_count;
      }
      seen = true;
      last_visit = n;
    }
  }
  rs.occupation_frequency =
      static_cast<double>(rs.visit_count) / static_cast<double>(horizon);
  rs.mean_return_time =
      gap_count > 0 ? gap_sum / static_cast<double>(gap_count) : num::kInf;
  rs.last_visit_step = seen ? last_visit : 0;
  return rs;
}

}  // namespace catsim::stats
