#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <cmath>
#include <vector>

#include "lrp/cloud.hpp"
#include "lrp/graph.hpp"
#include "lrp/sampler.hpp"
#include "lrp/stats.hpp"

using namespace lrp;

TEST_CASE("cloud mass matches the closed form in d=1") {
  // total mass of pairs with separation >= eps in the unit interval:
  // beta (1/eps - 1 + ln eps)
  const double eps = 1.0 / 16.0;
  CloudSampler sampler(1, 1.0, eps);
  const double exact = 1.0 / eps - 1.0 + std::log(eps);
  REQUIRE(sampler.total_mass() == Catch::Approx(exact).epsilon(1e-6));
}

TEST_CASE("pair counts are Poisson with the closed-form mean") {
  const double eps = 1.0 / 16.0;
  CloudSampler sampler(1, 1.0, eps);
  const double mass = 1.0 / eps - 1.0 + std::log(eps);
  const int reps = 2000;
  double sum = 0.0, sum_sq = 0.0;
  for (int rep = 0; rep < reps; ++rep) {
    const double c =
        static_cast<double>(sampler.sample(3000 + rep).pairs.size());
    sum += c;
    sum_sq += c * c;
  }
  const double mean = sum / reps;
  const double var = sum_sq / reps - mean * mean;
  REQUIRE(std::fabs(mean - mass) <= 4.0 * std::sqrt(mass / reps));
  // Poisson variance equals the mean; se of the sample variance ~ sqrt(2/n)*var
  REQUIRE(std::fabs(var - mass) <=
          4.0 * mass * std::sqrt(2.0 / reps) + 4.0 * std::sqrt(mass / reps));
}

TEST_CASE("cloud pairs respect separation, range, and ordering") {
  CloudSampler sampler(2, 2.0, 1.0 / 8.0);
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    PoissonCloud cloud = sampler.sample(seed);
    REQUIRE(cloud.min_separation == Catch::Approx(1.0 / 8.0));
    for (const auto& pr : cloud.pairs) {
      double linf = 0.0;
      bool t_before_s = false, decided = false;
      for (int i = 0; i < 2; ++i) {
        REQUIRE(pr.t[i] >= 0.0);
        REQUIRE(pr.t[i] < 1.0);
        REQUIRE(pr.s[i] >= 0.0);
        REQUIRE(pr.s[i] < 1.0);
        linf = std::max(linf, std::fabs(pr.t[i] - pr.s[i]));
        if (!decided && pr.t[i] != pr.s[i]) {
          t_before_s = pr.t[i] < pr.s[i];
          decided = true;
        }
      }
      REQUIRE(linf >= 1.0 / 8.0);
      REQUIRE(t_before_s);
    }
  }
}

TEST_CASE("cloud sampling is reproducible") {
  CloudSampler sampler(1, 1.0, 1.0 / 16.0);
  PoissonCloud a = sampler.sample(99);
  PoissonCloud b = sampler.sample(99);
  REQUIRE(a.pairs.size() == b.pairs.size());
  for (std::size_t i = 0; i < a.pairs.size(); ++i) {
    REQUIRE(a.pairs[i].t == b.pairs[i].t);
    REQUIRE(a.pairs[i].s == b.pairs[i].s);
  }
}

TEST_CASE("discretized cloud reproduces the lattice edge probability") {
  // cells 0 and 3 at n=4: the cell-pair mass is exactly J(3), so the edge
  // appears with probability 1 - exp(-J(3)) = 1/9
  CloudSampler sampler(1, 1.0, 1.0 / 16.0);
  const int reps = 5000;
  int hits = 0;
  for (int rep = 0; rep < reps; ++rep) {
    Configuration cfg = discretize_cloud(sampler.sample(5000 + rep), 4);
    cfg.validate();
    hits += std::binary_search(cfg.long_edges.begin(), cfg.long_edges.end(),
                               Edge{0, 3});
  }
  const double p = 1.0 / 9.0;
  const double freq = static_cast<double>(hits) / reps;
  REQUIRE(std::fabs(freq - p) <= 4.0 * std::sqrt(p * (1.0 - p) / reps));
}

TEST_CASE("discretized clouds and direct sampling share the edge-count law") {
  // both lattice laws at n=8 are sums of independent Bernoullis with the
  // same per-class probabilities; two-sample chi-square on total counts
  const int n = 8;
  const int reps = 4000;
  CloudSampler cloud_sampler(1, 1.0, 1.0 / 16.0);
  KernelSpec spec{1, KernelFamily::ExactCube, 1.0};
  BoxSampler box_sampler(spec, BoxSpec{1, n, {0}});

  std::vector<std::int64_t> count_a, count_b;
  for (int rep = 0; rep < reps; ++rep) {
    count_a.push_back(static_cast<std::int64_t>(
        discretize_cloud(cloud_sampler.sample(7000 + rep), n)
            .long_edges.size()));
    count_b.push_back(static_cast<std::int64_t>(
        box_sampler.sample(90000 + rep).long_edges.size()));
  }
  const std::int64_t max_count = std::max(
      *std::max_element(count_a.begin(), count_a.end()),
      *std::max_element(count_b.begin(), count_b.end()));
  std::vector<double> obs_a(max_count + 1, 0), obs_b(max_count + 1, 0);
  for (std::int64_t c : count_a) obs_a[c] += 1;
  for (std::int64_t c : count_b) obs_b[c] += 1;

  // merge sparse bins so every pooled expectation is at least 5
  double chi = 0.0;
  int dof = -1;
  double a_bin = 0, b_bin = 0;
  for (std::size_t i = 0; i <= static_cast<std::size_t>(max_count); ++i) {
    a_bin += obs_a[i];
    b_bin += obs_b[i];
    const bool last = i == static_cast<std::size_t>(max_count);
    if ((a_bin + b_bin) / 2.0 >= 5.0 || last) {
      const double pooled = (a_bin + b_bin) / 2.0;
      if (pooled > 0.0) {
        chi += (a_bin - pooled) * (a_bin - pooled) / pooled +
               (b_bin - pooled) * (b_bin - pooled) / pooled;
        ++dof;
      }
      a_bin = b_bin = 0;
    }
  }
  REQUIRE(dof >= 3);
  const double p_value = chi_square_survival(chi, dof);
  INFO("chi " << chi << " dof " << dof << " p " << p_value);
  REQUIRE(p_value > 0.001);
}

TEST_CASE("one cloud couples the discretizations of two scales") {
  CloudSampler sampler(1, 1.0, 1.0 / 16.0);
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    PoissonCloud cloud = sampler.sample(200 + seed);
    // couple_scales checks coarse <= 3 * fine for every vertex pair
    auto cfgs = couple_scales(cloud, {16, 8});
    REQUIRE(cfgs.size() == 2);
    REQUIRE(cfgs[0].box.n == 16);
    REQUIRE(cfgs[1].box.n == 8);
  }
}

TEST_CASE("coarse distance never exceeds the fine distance") {
  // every fine step projects to at most one coarse step, so the coarse
  // distance is dominated pathwise
  CloudSampler sampler(1, 1.5, 1.0 / 16.0);
  BfsScratch scratch;
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    PoissonCloud cloud = sampler.sample(400 + seed);
    auto cfgs = couple_scales(cloud, {16, 8}, false);
    LatticeGraph fine(cfgs[0]), coarse(cfgs[1]);
    const std::int64_t df = distance(fine, 0, 15, scratch);
    const std::int64_t dc = distance(coarse, 0, 7, scratch);
    REQUIRE(dc <= df);
  }
}
