#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <vector>

#include "lrp/graph.hpp"
#include "lrp/sampler.hpp"

using namespace lrp;

namespace {

Configuration make_config(int d, int n, std::vector<Edge> edges) {
  Configuration cfg;
  cfg.box = BoxSpec{d, n, {}};
  cfg.kernel = KernelSpec{d, KernelFamily::ExactCube, 1.0};
  cfg.long_edges = std::move(edges);
  cfg.canonicalize();
  cfg.validate();
  return cfg;
}

}  // namespace

TEST_CASE("nearest-neighbour distances equal the linf distance", "[graph]") {
  BfsScratch scratch;
  LatticeGraph g1(make_config(1, 5, {}));
  REQUIRE(distance(g1, 0, 4, scratch) == 4);
  REQUIRE(distance(g1, 2, 2, scratch) == 0);

  LatticeGraph g2(make_config(2, 4, {}));
  // diagonal steps are nearest neighbours, so (0,0) -> (3,3) takes 3 steps
  REQUIRE(distance(g2, 0, 15, scratch) == 3);
  REQUIRE(distance(g2, 0, 3, scratch) == 3);
}

TEST_CASE("a long edge shortcuts and caps the diameter", "[graph]") {
  BfsScratch scratch;
  LatticeGraph g(make_config(1, 4, {{0, 3}}));
  REQUIRE(distance(g, 0, 3, scratch) == 1);
  REQUIRE(distance(g, 0, 2, scratch) == 2);
  auto dia = diameter_exact(g, scratch);
  REQUIRE(dia.exact);
  REQUIRE(dia.value == 2);
}

TEST_CASE("triangle inequality on sampled graphs", "[graph]") {
  BfsScratch scratch;
  KernelSpec spec{1, KernelFamily::ExactCube, 2.0};
  BoxSpec box{1, 32, {}};
  BoxSampler sampler(spec, box);
  Rng pick(derive_seed(5, "unit", 0));
  for (int rep = 0; rep < 20; ++rep) {
    LatticeGraph g(sampler.sample(1000 + rep));
    for (int t = 0; t < 50; ++t) {
      auto u = static_cast<std::int32_t>(pick.next_below(32));
      auto v = static_cast<std::int32_t>(pick.next_below(32));
      auto w = static_cast<std::int32_t>(pick.next_below(32));
      REQUIRE(distance(g, u, w, scratch) <=
              distance(g, u, v, scratch) + distance(g, v, w, scratch));
    }
  }
}

TEST_CASE("adding an edge never increases distances", "[graph]") {
  BfsScratch scratch;
  auto base = make_config(1, 16, {{1, 9}, {4, 12}});
  auto more = make_config(1, 16, {{1, 9}, {4, 12}, {0, 15}});
  LatticeGraph g0(base), g1(more);
  for (std::int32_t u = 0; u < 16; ++u) {
    for (std::int32_t v = u + 1; v < 16; ++v) {
      REQUIRE(distance(g1, u, v, scratch) <= distance(g0, u, v, scratch));
    }
  }
}

TEST_CASE("restriction to the whole box changes nothing", "[graph]") {
  BfsScratch scratch;
  KernelSpec spec{2, KernelFamily::ExactCube, 1.0};
  BoxSampler sampler(spec, BoxSpec{2, 4, {}});
  auto all = [](std::int32_t) { return true; };
  for (int rep = 0; rep < 10; ++rep) {
    LatticeGraph g(sampler.sample(rep));
    for (std::int32_t v = 1; v < g.num_vertices(); ++v) {
      REQUIRE(distance_restricted(g, 0, v, all, scratch) ==
              distance(g, 0, v, scratch));
    }
  }
}

TEST_CASE("restriction can disconnect", "[graph]") {
  BfsScratch scratch;
  LatticeGraph g(make_config(1, 3, {}));
  auto keep = [](std::int32_t v) { return v != 1; };
  REQUIRE(distance_restricted(g, 0, 2, keep, scratch) == kUnreachable);

  LatticeGraph h(make_config(1, 3, {{0, 2}}));
  REQUIRE(distance_restricted(h, 0, 2, keep, scratch) == 1);
}

TEST_CASE("set distance agrees with the pairwise minimum", "[graph]") {
  BfsScratch scratch;
  KernelSpec spec{1, KernelFamily::ExactCube, 1.5};
  BoxSampler sampler(spec, BoxSpec{1, 24, {}});
  std::vector<std::int32_t> a{0, 1, 5}, b{17, 23};
  for (int rep = 0; rep < 10; ++rep) {
    LatticeGraph g(sampler.sample(50 + rep));
    std::int64_t brute = kUnreachable;
    for (auto u : a)
      for (auto v : b) brute = std::min(brute, distance(g, u, v, scratch));
    REQUIRE(distance_sets(g, a, b, scratch) == brute);
  }
  std::vector<std::int32_t> overlap{3, 17};
  LatticeGraph g(sampler.sample(1));
  REQUIRE(distance_sets(g, overlap, b, scratch) == 0);
}

TEST_CASE("indirect distance removes every direct bridge", "[graph]") {
  BfsScratch scratch;
  LatticeGraph g3(make_config(1, 3, {}));
  REQUIRE(indirect_distance(g3, {0}, {2}, scratch) == 2);

  LatticeGraph g2(make_config(1, 2, {}));
  REQUIRE(indirect_distance(g2, {0}, {1}, scratch) == kUnreachable);

  // direct long edge is ignored too
  LatticeGraph h(make_config(1, 5, {{0, 4}}));
  REQUIRE(indirect_distance(h, {0}, {4}, scratch) == 4);
  REQUIRE(distance(h, 0, 4, scratch) == 1);
}

TEST_CASE("indirect distance dominates the set distance", "[graph]") {
  BfsScratch scratch;
  KernelSpec spec{1, KernelFamily::ExactCube, 2.0};
  BoxSampler sampler(spec, BoxSpec{1, 20, {}});
  std::vector<std::int32_t> a{0, 1}, b{12, 13, 19};
  for (int rep = 0; rep < 20; ++rep) {
    LatticeGraph g(sampler.sample(300 + rep));
    REQUIRE(indirect_distance(g, a, b, scratch) >=
            distance_sets(g, a, b, scratch));
  }
}

TEST_CASE("exact diameter matches brute force", "[graph]") {
  BfsScratch scratch;
  KernelSpec spec{1, KernelFamily::ExactCube, 1.0};
  BoxSampler sampler(spec, BoxSpec{1, 12, {}});
  for (int rep = 0; rep < 10; ++rep) {
    LatticeGraph g(sampler.sample(rep));
    std::int64_t brute = 0;
    for (std::int32_t u = 0; u < 12; ++u)
      for (std::int32_t v = u + 1; v < 12; ++v)
        brute = std::max(brute, distance(g, u, v, scratch));
    auto dia = diameter_exact(g, scratch);
    REQUIRE(dia.value == brute);
  }
}

TEST_CASE("double sweep is a lower bound and is labelled", "[graph]") {
  BfsScratch scratch;
  KernelSpec spec{2, KernelFamily::ExactCube, 1.0};
  BoxSampler sampler(spec, BoxSpec{2, 5, {}});
  for (int rep = 0; rep < 10; ++rep) {
    LatticeGraph g(sampler.sample(rep));
    auto exact = diameter_exact(g, scratch);
    auto sweep = diameter_double_sweep(g, {0, 12, 24}, scratch);
    REQUIRE_FALSE(sweep.exact);
    REQUIRE(sweep.value <= exact.value);
    REQUIRE(sweep.value >= 1);
  }
}

TEST_CASE("degree profile counts both edge kinds", "[graph]") {
  LatticeGraph g(make_config(1, 3, {{0, 2}}));
  auto p = degree_profile(g);
  REQUIRE(p.degree == std::vector<std::int64_t>{2, 2, 2});
  REQUIRE(p.interior == std::vector<std::uint8_t>{0, 1, 0});

  LatticeGraph center(make_config(2, 3, {}));
  auto q = degree_profile(center);
  REQUIRE(q.degree[4] == 8);  // middle of a 3x3 box
  REQUIRE(q.interior[4] == 1);
}
