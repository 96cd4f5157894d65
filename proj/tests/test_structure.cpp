#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <cmath>
#include <vector>

#include "lrp/graph.hpp"
#include "lrp/oracle.hpp"
#include "lrp/sampler.hpp"
#include "lrp/structure.hpp"

using namespace lrp;

TEST_CASE("sphere connection matches the telescoping closed form") {
  // d=1, beta=1: P(0 has an open edge to distance >= k) = (2k-1)/k^2;
  // inside a window of radius W the exact value is 1-((k-1)(W+1)/(k W))^2
  KernelSpec spec{1, KernelFamily::ExactCube, 1.0};
  const int window = 2000;
  const int reps = 5000;
  for (int k : {2, 5, 10}) {
    SphereEstimate est =
        sphere_connection_probability(spec, k, window, reps, 500 + k);
    const double truncated =
        1.0 - std::pow((k - 1.0) * (window + 1.0) / (k * window), 2.0);
    const double limit = (2.0 * k - 1.0) / (static_cast<double>(k) * k);
    INFO("k " << k << " freq " << est.frequency << " exact " << truncated);
    REQUIRE(std::fabs(est.frequency - truncated) <= 4.0 * est.std_error);
    REQUIRE(std::fabs(truncated - limit) <= est.truncation_bias + 1e-12);
    REQUIRE(est.frequency <= est.envelope + 3.0 * est.std_error);
  }
}

TEST_CASE("sphere connection stays under the envelope in d=2") {
  KernelSpec spec{2, KernelFamily::ExactCube, 1.0};
  SphereEstimate est = sphere_connection_probability(spec, 3, 12, 2000, 9);
  REQUIRE(est.frequency <= est.envelope + 3.0 * est.std_error);
  REQUIRE(est.truncation_bias > 0.0);
}

TEST_CASE("connected sets around the origin of a bare path") {
  // left-rooted path: the only size-k set through vertex 0 is {0..k-1}
  Configuration cfg;
  cfg.box = BoxSpec{1, 10, {0}};
  cfg.kernel = KernelSpec{1, KernelFamily::ExactCube, 0.0};
  auto rows = enumerate_connected_sets(cfg, 6);
  REQUIRE(rows.size() == 6);
  for (const auto& row : rows) {
    REQUIRE(row.count == 1);
  }
  // centered root: any interval of length k through the center qualifies
  auto centered = enumerate_connected_sets(cfg, 4, 5);
  for (const auto& row : centered) {
    REQUIRE(row.count == row.k);
  }
}

TEST_CASE("set enumeration matches the subset-filter oracle") {
  BfsScratch scratch;
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    KernelSpec spec{1, KernelFamily::ExactCube, 1.5};
    Configuration cfg = sample_box(spec, BoxSpec{1, 8, {0}}, 3000 + seed);
    auto fast = enumerate_connected_sets(cfg, 4);
    auto slow = brute_force_connected_sets(cfg, 4);
    for (int k = 1; k <= 4; ++k) {
      REQUIRE(fast[k - 1].count == slow[k]);
    }
  }
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    KernelSpec spec{2, KernelFamily::ExactCube, 1.0};
    Configuration cfg = sample_box(spec, BoxSpec{2, 3, {0, 0}}, 4000 + seed);
    auto fast = enumerate_connected_sets(cfg, 4);
    auto slow = brute_force_connected_sets(cfg, 4);
    for (int k = 1; k <= 4; ++k) {
      REQUIRE(fast[k - 1].count == slow[k]);
    }
  }
}

TEST_CASE("mean set counts respect the branching bound") {
  // E|CS_k| <= 4^k mu^k with mu the expected degree
  KernelSpec spec{1, KernelFamily::ExactCube, 1.0};
  const double mu = expected_degree(spec, 10000).value;
  const int reps = 1000;
  BoxSpec box{1, 11, {-5}};
  std::vector<double> mean(6, 0.0);
  bool any_high_degree = false;
  for (int rep = 0; rep < reps; ++rep) {
    Configuration cfg = sample_box(spec, box, 7700 + rep);
    auto rows = enumerate_connected_sets(cfg, 5, 5);
    for (const auto& row : rows) {
      mean[row.k] += static_cast<double>(row.count) / reps;
      any_high_degree =
          any_high_degree || row.max_avg_degree >= 20.0 * mu;
    }
  }
  for (int k = 1; k <= 5; ++k) {
    INFO("k " << k << " mean " << mean[k]);
    REQUIRE(mean[k] <= std::pow(4.0 * mu, k));
  }
  // the 20 mu average-degree event has probability <= exp(-4 k mu): never
  // seen at this replicate count
  REQUIRE_FALSE(any_high_degree);
}

TEST_CASE("conditioned edge count reduces to a single Bernoulli") {
  KernelSpec spec{1, KernelFamily::ExactCube, 1.0};
  ConditionedEdgeCount one = conditioned_edge_count(spec, {0}, {3}, 1);
  const double p = connection_probability(spec, {3});
  REQUIRE(one.expected == Catch::Approx(p).epsilon(1e-12));
  REQUIRE(one.p_positive == Catch::Approx(p).epsilon(1e-12));
  REQUIRE(one.expected_given_positive == Catch::Approx(1.0).epsilon(1e-12));
  REQUIRE(one.pmf.size() == 2);
  REQUIRE(one.pmf[0] == Catch::Approx(1.0 - p).epsilon(1e-12));
}

TEST_CASE("conditioned edge count matches the direct convolution") {
  KernelSpec spec{1, KernelFamily::ExactCube, 1.0};
  ConditionedEdgeCount two = conditioned_edge_count(spec, {0}, {2}, 2);
  // cells are {0,1} and {4,5}: gaps 3 (x2... offsets -1,0,1 -> gaps 3,4,5)
  const double p3 = connection_probability(spec, {3});
  const double p4 = connection_probability(spec, {4});
  const double p5 = connection_probability(spec, {5});
  REQUIRE(two.expected == Catch::Approx(p3 + 2 * p4 + p5).epsilon(1e-12));
  REQUIRE(two.p_positive ==
          Catch::Approx(1.0 - (1 - p3) * (1 - p4) * (1 - p4) * (1 - p5))
              .epsilon(1e-12));
  double mass = 0.0, mean_from_pmf = 0.0;
  for (std::size_t k = 0; k < two.pmf.size(); ++k) {
    mass += two.pmf[k];
    mean_from_pmf += static_cast<double>(k) * two.pmf[k];
  }
  REQUIRE(mass == Catch::Approx(1.0).epsilon(1e-12));
  REQUIRE(mean_from_pmf == Catch::Approx(two.expected).epsilon(1e-10));
  REQUIRE(two.expected_given_positive ==
          Catch::Approx(mean_from_pmf / two.p_positive).epsilon(1e-10));
  REQUIRE(two.expected_given_positive <= 1.0 + two.expected);
}

TEST_CASE("positive-count probability agrees with the block identity") {
  KernelSpec spec{1, KernelFamily::ExactCube, 1.0};
  ConditionedEdgeCount dp = conditioned_edge_count(spec, {0}, {3}, 4);
  REQUIRE(dp.p_positive ==
          Catch::Approx(block_connection_probability(spec, {3}, 4))
              .epsilon(1e-9));

  KernelSpec spec2{2, KernelFamily::ExactCube, 0.7};
  ConditionedEdgeCount dp2 = conditioned_edge_count(spec2, {0, 0}, {2, 0}, 3);
  REQUIRE(dp2.p_positive ==
          Catch::Approx(block_connection_probability(spec2, {2, 0}, 3))
              .epsilon(1e-9));
}

TEST_CASE("cut points of explicit configurations") {
  Configuration cfg;
  cfg.box = BoxSpec{1, 5, {0}};
  cfg.kernel = KernelSpec{1, KernelFamily::ExactCube, 0.0};
  REQUIRE(cut_points_d1(cfg).positions == std::vector<std::int32_t>{1, 2, 3});

  cfg.long_edges = {{0, 4}};
  REQUIRE(cut_points_d1(cfg).positions.empty());

  cfg.long_edges = {{0, 2}};
  REQUIRE(cut_points_d1(cfg).positions == std::vector<std::int32_t>{2, 3});
}

TEST_CASE("prefix scan equals the naive straddle check") {
  KernelSpec spec{1, KernelFamily::ExactCube, 1.0};
  for (std::uint64_t seed = 0; seed < 200; ++seed) {
    Configuration cfg = sample_box(spec, BoxSpec{1, 64, {0}}, 8800 + seed);
    auto scan = cut_points_d1(cfg).positions;
    std::vector<std::int32_t> naive;
    for (std::int32_t w = 1; w + 1 < 64; ++w) {
      bool straddled = false;
      for (const auto& e : cfg.long_edges) {
        straddled = straddled || (e.first < w && w < e.second);
      }
      if (!straddled) naive.push_back(w);
    }
    REQUIRE(scan == naive);
  }
}

TEST_CASE("cut frequency matches the closed form") {
  // P(w=1 cuts a 4-segment) = ((w+1)(m-w)/m)^{-beta} = 2/3 at beta=1
  KernelSpec spec{1, KernelFamily::ExactCube, 1.0};
  BoxSampler sampler(spec, BoxSpec{1, 4, {0}});
  const int reps = 10000;
  int hits = 0;
  for (int rep = 0; rep < reps; ++rep) {
    auto cuts = cut_points_d1(sampler.sample(600 + rep)).positions;
    hits += std::find(cuts.begin(), cuts.end(), 1) != cuts.end();
  }
  const double p = exact_cut_point_probability(1.0, 4, 1);
  REQUIRE(p == Catch::Approx(2.0 / 3.0).epsilon(1e-12));
  const double freq = static_cast<double>(hits) / reps;
  REQUIRE(std::fabs(freq - p) <= 4.0 * std::sqrt(p * (1 - p) / reps));
}

TEST_CASE("expected cut counts stay under the piecewise bound") {
  CutPointBound flat = cut_point_count_bound(0.0, 12);
  REQUIRE(flat.exact_sum == Catch::Approx(10.0).epsilon(1e-12));
  REQUIRE(flat.branch == "subcritical");
  REQUIRE(flat.exact_sum <= flat.bound);

  CutPointBound log_branch = cut_point_count_bound(1.0, 8);
  double direct = 0.0;
  for (int w = 1; w <= 6; ++w) direct += 8.0 / ((w + 1.0) * (8.0 - w));
  REQUIRE(log_branch.exact_sum == Catch::Approx(direct).epsilon(1e-12));
  REQUIRE(log_branch.branch == "logarithmic");
  REQUIRE(log_branch.exact_sum <= log_branch.bound);

  CutPointBound two = cut_point_count_bound(2.0, 8);
  REQUIRE(two.exact_sum <= two.bound);
  REQUIRE(cut_point_count_bound(2.5, 8).branch == "bounded");

  // the bound holds across a sweep of segment lengths
  for (double beta : {0.5, 1.0, 2.0}) {
    for (int m : {8, 32, 128, 512}) {
      CutPointBound cb = cut_point_count_bound(beta, m);
      INFO("beta " << beta << " m " << m);
      REQUIRE(cb.exact_sum <= cb.bound);
    }
  }
}

TEST_CASE("cut points shrink as beta grows along the coupling") {
  KernelSpec lo{1, KernelFamily::ExactCube, 1.0};
  KernelSpec hi{1, KernelFamily::ExactCube, 2.0};
  BoxSpec box{1, 32, {0}};
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    auto [a, b] = sample_coupled_kernels(lo, hi, box, seed);
    auto cuts_lo = cut_points_d1(a).positions;
    auto cuts_hi = cut_points_d1(b).positions;
    REQUIRE(std::includes(cuts_lo.begin(), cuts_lo.end(), cuts_hi.begin(),
                          cuts_hi.end()));
  }
}

TEST_CASE("every odd interior point separates a bare segment") {
  Configuration cfg;
  cfg.box = BoxSpec{1, 9, {0}};
  cfg.kernel = KernelSpec{1, KernelFamily::ExactCube, 0.0};
  REQUIRE(separation_points_d1(cfg) == std::vector<std::int32_t>{1, 3, 5, 7});
}

TEST_CASE("separation frequencies match the three-factor product") {
  KernelSpec spec{1, KernelFamily::ExactCube, 1.0};
  SeparationEstimate est = separation_frequency_d1(spec, 9, 20000, 77);
  REQUIRE(est.positions == std::vector<int>{1, 3, 5, 7});
  double best = 0.0;
  for (std::size_t i = 0; i < est.positions.size(); ++i) {
    INFO("w " << est.positions[i] << " freq " << est.frequency[i] << " exact "
              << est.exact[i]);
    REQUIRE(std::fabs(est.frequency[i] - est.exact[i]) <=
            4.0 * est.std_error[i] + 1e-9);
    best = std::max(best, est.frequency[i] + 3.0 * est.std_error[i]);
  }
  // paper lower bound at the best position
  REQUIRE(best >= est.lower_bound);
}

TEST_CASE("center degree obeys the global bound") {
  KernelSpec spec{1, KernelFamily::ExactCube, 1.0};
  BoxSpec box{1, 65, {-32}};
  BoxSampler sampler(spec, box);
  double exact = 2.0;
  for (int k = 2; k <= 32; ++k) exact += 2.0 / (static_cast<double>(k) * k);
  const int reps = 2000;
  double sum = 0.0;
  for (int rep = 0; rep < reps; ++rep) {
    LatticeGraph g(sampler.sample(31000 + rep));
    sum += static_cast<double>(g.degree(32));
  }
  const double mean = sum / reps;
  INFO("mean degree " << mean << " exact " << exact);
  // binomial-sum variance is below the mean; 4 sigma with that envelope
  REQUIRE(std::fabs(mean - exact) <= 4.0 * std::sqrt(exact / reps));
  REQUIRE(mean <= std::ceil(spec.beta) * std::pow(3.0, 5.0 * spec.d));
}
