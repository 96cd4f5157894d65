#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <cmath>
#include <vector>

#include "lrp/kernel.hpp"
#include "lrp/sampler.hpp"

using namespace lrp;

namespace {

bool has_edge(const Configuration& cfg, std::int32_t u, std::int32_t v) {
  Edge e{std::min(u, v), std::max(u, v)};
  return std::binary_search(cfg.long_edges.begin(), cfg.long_edges.end(), e);
}

}  // namespace

TEST_CASE("same seed reproduces the configuration, new seed moves it") {
  KernelSpec spec{1, KernelFamily::ExactCube, 1.0};
  BoxSampler sampler(spec, BoxSpec{1, 64, {0}});
  Configuration a = sampler.sample(17);
  Configuration b = sampler.sample(17);
  REQUIRE(a.long_edges == b.long_edges);
  a.validate();

  bool any_differs = false;
  for (std::uint64_t s = 0; s < 8 && !any_differs; ++s) {
    any_differs = sampler.sample(100 + s).long_edges != a.long_edges;
  }
  REQUIRE(any_differs);
}

TEST_CASE("edge count matches the sum of class probabilities") {
  const int n = 64;
  KernelSpec spec{1, KernelFamily::ExactCube, 1.0};
  BoxSampler sampler(spec, BoxSpec{1, n, {0}});

  // d=1, beta=1: class k has n-k slots, each open with probability 1/k^2
  double exact_mean = 0.0, exact_var = 0.0;
  for (int k = 2; k < n; ++k) {
    const double p = 1.0 / (static_cast<double>(k) * k);
    exact_mean += (n - k) * p;
    exact_var += (n - k) * p * (1.0 - p);
  }
  const int reps = 10000;
  double sum = 0.0;
  for (int rep = 0; rep < reps; ++rep) {
    sum += static_cast<double>(sampler.sample(900 + rep).long_edges.size());
  }
  const double mean = sum / reps;
  const double z = (mean - exact_mean) / std::sqrt(exact_var / reps);
  INFO("mean " << mean << " exact " << exact_mean << " z " << z);
  REQUIRE(std::fabs(z) <= 4.0);
}

TEST_CASE("a fixed pair opens with its kernel probability in d=2") {
  const int n = 8;
  KernelSpec spec{2, KernelFamily::ExactCube, 1.0};
  BoxSpec box{2, n, {0, 0}};
  BoxSampler sampler(spec, box);
  const std::int32_t u = box.index_of({0, 0});
  const std::int32_t v = box.index_of({2, 1});
  const double p = connection_probability(spec, {2, 1});

  const int reps = 100000;
  int hits = 0;
  for (int rep = 0; rep < reps; ++rep) {
    hits += has_edge(sampler.sample(4200 + rep), u, v);
  }
  const double freq = static_cast<double>(hits) / reps;
  const double se = std::sqrt(p * (1.0 - p) / reps);
  INFO("freq " << freq << " p " << p);
  REQUIRE(std::fabs(freq - p) <= 4.0 * se);
}

TEST_CASE("open counts of distinct classes are uncorrelated") {
  const int n = 32;
  KernelSpec spec{1, KernelFamily::ExactCube, 1.0};
  BoxSampler sampler(spec, BoxSpec{1, n, {0}});
  const int reps = 10000;
  std::vector<double> c2(reps), c3(reps);
  for (int rep = 0; rep < reps; ++rep) {
    Configuration cfg = sampler.sample(7100 + rep);
    int n2 = 0, n3 = 0;
    for (const auto& e : cfg.long_edges) {
      const int gap = e.second - e.first;
      n2 += gap == 2;
      n3 += gap == 3;
    }
    c2[rep] = n2;
    c3[rep] = n3;
  }
  double m2 = 0, m3 = 0;
  for (int i = 0; i < reps; ++i) {
    m2 += c2[i];
    m3 += c3[i];
  }
  m2 /= reps;
  m3 /= reps;
  double cov = 0, v2 = 0, v3 = 0;
  for (int i = 0; i < reps; ++i) {
    cov += (c2[i] - m2) * (c3[i] - m3);
    v2 += (c2[i] - m2) * (c2[i] - m2);
    v3 += (c3[i] - m3) * (c3[i] - m3);
  }
  const double rho = cov / std::sqrt(v2 * v3);
  INFO("correlation " << rho);
  REQUIRE(std::fabs(rho) <= 4.0 / std::sqrt(static_cast<double>(reps)));
}

TEST_CASE("saturated truncated-power classes are fully open") {
  // beta=16: min(beta k^-2, 1) = 1 for k <= 4, so every slot is an edge
  const int n = 24;
  KernelSpec spec{1, KernelFamily::TruncatedPower, 16.0};
  BoxSampler sampler(spec, BoxSpec{1, n, {0}});
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    Configuration cfg = sampler.sample(seed);
    for (int k = 2; k <= 4; ++k) {
      int count = 0;
      for (const auto& e : cfg.long_edges) count += e.second - e.first == k;
      REQUIRE(count == n - k);
    }
  }
}

TEST_CASE("exact-cube and truncated-power coincide at beta=1 in d=1") {
  // 1 - exp(-J(k)) = 1/k^2 = min(k^-2, 1): identical reals, identical draws
  KernelSpec ec{1, KernelFamily::ExactCube, 1.0};
  KernelSpec tp{1, KernelFamily::TruncatedPower, 1.0};
  BoxSpec box{1, 48, {0}};
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    auto [a, b] = sample_coupled_kernels(ec, tp, box, seed);
    REQUIRE(a.long_edges == b.long_edges);
  }
}

TEST_CASE("coupled sampling nests configurations across beta") {
  KernelSpec lo{1, KernelFamily::ExactCube, 1.0};
  KernelSpec hi{1, KernelFamily::ExactCube, 2.0};
  BoxSpec box{1, 48, {0}};
  bool grew = false;
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    auto [a, b] = sample_coupled_kernels(lo, hi, box, seed);
    REQUIRE(std::includes(b.long_edges.begin(), b.long_edges.end(),
                          a.long_edges.begin(), a.long_edges.end()));
    grew = grew || b.long_edges.size() > a.long_edges.size();
  }
  REQUIRE(grew);
}

TEST_CASE("coupled sampling nests exact-cube inside truncated-power") {
  // at beta=2: 1-exp(-2J) = 2/k^2 - 1/k^4 <= min(2 k^-2, 1) pointwise
  KernelSpec ec{1, KernelFamily::ExactCube, 2.0};
  KernelSpec tp{1, KernelFamily::TruncatedPower, 2.0};
  BoxSpec box{1, 48, {0}};
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    auto [a, b] = sample_coupled_kernels(ec, tp, box, seed);
    REQUIRE(std::includes(b.long_edges.begin(), b.long_edges.end(),
                          a.long_edges.begin(), a.long_edges.end()));
  }
}

TEST_CASE("sampled configurations validate in two dimensions") {
  KernelSpec spec{2, KernelFamily::ExponentialPower, 3.0};
  BoxSampler sampler(spec, BoxSpec{2, 9, {-4, -4}});
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    Configuration cfg = sampler.sample(seed);
    cfg.validate();
    REQUIRE(cfg.box.n == 9);
  }
}
