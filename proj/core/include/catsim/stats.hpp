#pragma once

#include <atomic>
#include <cstdint>
#include <exception>
#include <map>
#include <mutex>
#include <span>
#include <stdexcept>
#include <string>
#include <thread>
#include <type_traits>
#include <vector>

#include "catsim/pop_count.hpp"
#include "catsim/rng.hpp"

namespace catsim {
struct Trajectory;
}

namespace catsim::stats {

// Stream derivation: splitmix64 mixing of master_seed + PHI * (index + 1).
// PHI is odd, so for a fixed master seed the pre-mix inputs are pairwise
// distinct and the mixed outputs collide only if splitmix64 does (it is a
// bijection, so they never do).
struct RngSpec {
  uint64_t master_seed = 0;
  static constexpr const char* algorithm = "splitmix64-derive/xoshiro256++";
};

uint64_t derive_stream_seed(const RngSpec& spec, uint64_t stream_index);
RngState make_stream(const RngSpec& spec, uint64_t stream_index);

using Histogram = std::map<uint64_t, uint64_t>;

void add_sample(Histogram& h, const PopCount& x);

struct TestResult {
  double statistic = 0.0;
  double p_value = 1.0;
  uint64_t dof = 0;
  uint64_t pooled_bins = 0;
};

// Two-sample chi-square with adjacent-bin pooling until every pooled bin
// has expected count >= 5 under the null in both samples. Throws when all
// mass ends up in a single bin.
TestResult chi_square_two_sample(const Histogram& a, const Histogram& b);

// Goodness of fit of a sample against an exact pmf over {0..len-1}; mass
// outside the vector (including pmf truncation remainder) is pooled into
// the final bin.
TestResult chi_square_vs_exact(const Histogram& sample, std::span<const double> pmf);

// Total variation distance between the empirical law of `sample` and `pmf`.
double tv_distance(const Histogram& sample, std::span<const double> pmf);

struct ReturnStats {
  uint64_t target_set_max = 0;  // the set {x : x <= m}
  uint64_t visit_count = 0;
  uint64_t last_visit_step = 0;   // 0 when the set is never visited
  double mean_return_time = 0.0;  // +inf when no completed return exists
  double occupation_frequency = 0.0;
};

// Visits of the trajectory (steps 1..horizon; the fixed X_0 is excluded)
// to the set {x <= m}.
ReturnStats return_time_stats(const Trajectory& traj, uint64_t m);

// Run `count` independent jobs, job i on its own derived stream i. Results
// are ordered by stream index regardless of scheduling, so aggregates are
// identical for any thread count. Job exceptions are rethrown with the
// stream index attached.
template <typename Fn>
auto replicate(uint64_t count, const RngSpec& spec, unsigned threads, Fn&& job)
    -> std::vector<std::invoke_result_t<Fn&, uint64_t, RngState&>> {
  using R = std::invoke_result_t<Fn&, uint64_t, RngState&>;
  std::vector<R> results(count);
  if (count == 0) return results;
  if (threads == 0) threads = std::thread::hardware_concurrency();
  if (threads == 0) threads = 1;
  if (threads > count) threads = static_cast<unsigned>(count);

  std::atomic<uint64_t> next{0};
  std::atomic<uint64_t> failed_index{count};
  std::exception_ptr error;
  std::mutex error_mutex;

  auto worker = [&]() {
    for (;;) {
      const uint64_t i = next.fetch_add(1);
      if (i >= count) return;
      try {
        RngState rng = make_stream(spec, i);
        results[i] = job(i, rng);
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mutex);
        if (i < failed_index.load()) {
          failed_index.store(i);
          error = std::current_exception();
        }
      }
    }
  };

  if (threads == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(threads);
    for (unsigned t = 0; t < threads; ++t) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }

  if (error) {
    try {
      std::rethrow_exception(error);
    } catch (const std::exception& e) {
      throw std::runtime_error("replicate: job " +
                               std::to_string(failed_index.load()) +
                               " failed: " + e.what());
    }
  }
  return results;
}

}  // namespace catsim::stats
