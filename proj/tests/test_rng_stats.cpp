#include "catsim/stats.hpp"

#include <chrono>
#include <cmath>
#include <set>
#include <vector>

#include "catsim/chain.hpp"
#include "doctest.h"

using namespace catsim;

TEST_CASE("stream derivation: deterministic, collision-free, seed-sensitive") {
  const stats::RngSpec spec{123456789};
  CHECK(stats::derive_stream_seed(spec, 0) == stats::derive_stream_seed(spec, 0));
  CHECK(stats::derive_stream_seed(spec, 1) != stats::derive_stream_seed(spec, 0));

  std::set<uint64_t> states;
  for (uint64_t i = 0; i <= 1000; ++i) {
    states.insert(stats::derive_stream_seed(spec, i));
  }
  CHECK(states.size() == 1001);  // no pairwise collisions

  std::set<uint64_t> stream0;
  for (uint64_t master = 0; master < 1000; ++master) {
    stream0.insert(stats::derive_stream_seed(stats::RngSpec{master}, 0));
  }
  CHECK(stream0.size() == 1000);
}

TEST_CASE("rng streams are reproducible") {
  RngState a = stats::make_stream(stats::RngSpec{42}, 3);
  RngState b = stats::make_stream(stats::RngSpec{42}, 3);
  for (int i = 0; i < 1000; ++i) CHECK(a.next_u64() == b.next_u64());
  for (int i = 0; i < 1000; ++i) {
    const double u = a.next_open01();
    CHECK(u > 0.0);
    CHECK(u < 1.0);
  }
}

TEST_CASE("chi-square two-sample: identical histograms give statistic 0") {
  stats::Histogram h;
  h[0] = 50;
  h[1] = 30;
  h[2] = 20;
  const auto r = stats::chi_square_two_sample(h, h);
  CHECK(r.statistic == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(r.p_value == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(r.pooled_bins >= 2);

  stats::Histogram empty;
  CHECK_THROWS_AS(stats::chi_square_two_sample(h, empty), std::invalid_argument);

  stats::Histogram tiny_a, tiny_b;
  tiny_a[0] = 3;
  tiny_b[0] = 2;
  CHECK_THROWS_AS(stats::chi_square_two_sample(tiny_a, tiny_b),
                  std::runtime_error);
}

TEST_CASE("chi-square vs exact and tv distance basics") {
  const std::vector<double> pmf = {0.5, 0.3, 0.2};
  stats::Histogram h;
  h[0] = 5000;
  h[1] = 3000;
  h[2] = 2000;
  const auto r = stats::chi_square_vs_exact(h, pmf);
  CHECK(r.statistic == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(stats::tv_distance(h, pmf) == doctest::Approx(0.0).epsilon(1e-15));

  stats::Histogram off;
  off[0] = 6000;
  off[1] = 2000;
  off[2] = 2000;
  CHECK(stats::tv_distance(off, pmf) == doctest::Approx(0.1).epsilon(1e-12));
  const auto r2 = stats::chi_square_vs_exact(off, pmf);
  CHECK(r2.p_value < 1e-6);
}

TEST_CASE("tv distance triangle sanity") {
  const std::vector<double> pmf_b = {0.5, 0.3, 0.2};
  stats::Histogram a, c;
  a[0] = 40;
  a[1] = 30;
  a[2] = 30;
  c[0] = 70;
  c[1] = 10;
  c[2] = 20;
  // tv(a,c) <= tv(a,b) + tv(b,c) with b the exact pmf
  stats::Histogram c_scaled = c;  // same counts: empirical laws compare directly
  double tv_ac = 0.0;
  for (uint64_t k = 0; k < 3; ++k) {
    tv_ac += std::abs(static_cast<double>(a[k]) / 100.0 -
                      static_cast<double>(c_scaled[k]) / 100.0);
  }
  tv_ac *= 0.5;
  CHECK(tv_ac <= stats::tv_distance(a, pmf_b) + stats::tv_distance(c, pmf_b) + 1e-12);
}

namespace {

// lean draw of X_2 for beta = 0.5 point mass, Z fair on {1,2}
PopCount draw_x2(RngState& rng) {
  const auto coin = ImmigrationDistribution::finite_table({{1, 0.5}, {2, 0.5}});
  const PopCount z1 = coin.sample(rng);
  const PopCount b = binomial_thin(z1, 0.5, rng);
  return b + coin.sample(rng);
}

}  // namespace

TEST_CASE("chi-square calibration: false-positive rate at the 1% level") {
  // 200 paired samples from the same law: the number of p-values below
  // 0.01 behaves like Binomial(200, 0.01); with this fixed seed the count
  // must land in the 3-sigma-plus band [1, 7].
  const stats::RngSpec spec{20240811};
  const auto coin = ImmigrationDistribution::finite_table({{1, 0.5}, {2, 0.5}});
  const ChainConfig cfg{EnvDistribution::point_mass(0.5), coin, 2,
                        PopCount::exact(1), 0};
  const ExactDistribution dp = exact_distribution(cfg, 2, 4);

  int below_two_sample = 0;
  int below_vs_exact = 0;
  const int repetitions = 200;
  const uint64_t draws = 100'000;
  for (int rep = 0; rep < repetitions; ++rep) {
    RngState rng_a = stats::make_stream(spec, 2 * rep);
    RngState rng_b = stats::make_stream(spec, 2 * rep + 1);
    stats::Histogram ha, hb;
    for (uint64_t i = 0; i < draws; ++i) stats::add_sample(ha, draw_x2(rng_a));
    for (uint64_t i = 0; i < draws; ++i) stats::add_sample(hb, draw_x2(rng_b));
    if (stats::chi_square_two_sample(ha, hb).p_value < 0.01) ++below_two_sample;
    if (stats::chi_square_vs_exact(ha, dp.pmf).p_value < 0.01) ++below_vs_exact;
  }
  CHECK(below_two_sample >= 1);
  CHECK(below_two_sample <= 7);
  CHECK(below_vs_exact >= 1);
  CHECK(below_vs_exact <= 7);
}

TEST_CASE("return_time_stats") {
  Trajectory traj;
  traj.states.assign(11, PopCount::exact(1));
  const auto rs = stats::return_time_stats(traj, 1);
  CHECK(rs.occupation_frequency == doctest::Approx(1.0));
  CHECK(rs.visit_count == 10);
  CHECK(rs.mean_return_time == doctest::Approx(1.0));

  Trajectory far;
  far.states.assign(11, PopCount::exact(100));
  const auto rs2 = stats::return_time_stats(far, 1);
  CHECK(rs2.visit_count == 0);
  CHECK(rs2.occupation_frequency == 0.0);
  CHECK(std::isinf(rs2.mean_return_time));
}

TEST_CASE("replicate: ordering contract and error propagation") {
  const stats::RngSpec spec{7};
  auto job = [](uint64_t idx, RngState& rng) {
    return static_cast<double>(idx) + rng.next_unit();
  };
  const auto direct = [&] {
    RngState rng = stats::make_stream(spec, 0);
    return job(0, rng);
  }();
  const auto single = stats::replicate(1, spec, 1, job);
  CHECK(single.size() == 1);
  CHECK(single[0] == direct);

  const auto r1 = stats::replicate(64, spec, 1, job);
  const auto r4 = stats::replicate(64, spec, 4, job);
  const auto r8 = stats::replicate(64, spec, 8, job);
  CHECK(r1 == r4);
  CHECK(r1 == r8);

  auto failing = [](uint64_t idx, RngState&) -> int {
    if (idx == 5) throw std::runtime_error("boom");
    return 0;
  };
  CHECK_THROWS_WITH_AS(stats::replicate(8, spec, 4, failing),
                       doctest::Contains("job 5"), std::runtime_error);
}

TEST_CASE("replicate: 10^3 simulations of horizon 10^3 complete quickly") {
  const stats::RngSpec spec{99};
  const auto coin = ImmigrationDistribution::finite_table({{1, 0.5}, {2, 0.5}});
  const auto env = EnvDistribution::point_mass(0.5);
  const auto t0 = std::chrono::steady_clock::now();
  const auto sums = stats::replicate(1000, spec, 0, [&](uint64_t idx, RngState&) {
    ChainConfig cfg{env, coin, 1000, PopCount::exact(1),
                    stats::derive_stream_seed(spec, idx)};
    const Trajectory traj = simulate(cfg);
    double acc = 0.0;
    for (const auto& s : traj.states) acc += s.as_double();
    return acc;
  });
  const double elapsed =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  CHECK(sums.size() == 1000);
  CHECK(elapsed < 60.0);
}
