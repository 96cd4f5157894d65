#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <thread>
#include <vector>

#include "lrp/kernel.hpp"

using namespace lrp;

namespace {

// one-dimensional closed form for the unit-interval pair integral
double interval_integral(int k) {
  double kk = static_cast<double>(k) * k;
  return std::log(kk / (kk - 1.0));
}

}  // namespace

TEST_CASE("interval interaction matches the log closed form", "[kernel]") {
  REQUIRE(cube_interaction(1, {2}) ==
          Catch::Approx(std::log(4.0 / 3.0)).epsilon(1e-8));
  REQUIRE(cube_interaction(1, {3}) ==
          Catch::Approx(std::log(9.0 / 8.0)).epsilon(1e-8));
  for (int k : {2, 3, 5, 8, 13, 21, 34, 64}) {
    REQUIRE(cube_interaction(1, {k}) ==
            Catch::Approx(interval_integral(k)).epsilon(1e-8));
  }
}

TEST_CASE("touching cubes have infinite interaction", "[kernel]") {
  REQUIRE(std::isinf(cube_interaction(1, {0})));
  REQUIRE(std::isinf(cube_interaction(1, {1})));
  REQUIRE(std::isinf(cube_interaction(1, {-1})));
  REQUIRE(std::isinf(cube_interaction(2, {1, 1})));
  REQUIRE(std::isinf(cube_interaction(2, {0, -1})));
  REQUIRE(std::isfinite(cube_interaction(2, {0, 2})));
}

TEST_CASE("interaction is exactly symmetric under signs and permutations",
          "[kernel]") {
  double base = cube_interaction(2, {2, 3});
  REQUIRE(cube_interaction(2, {3, 2}) == base);
  REQUIRE(cube_interaction(2, {-2, 3}) == base);
  REQUIRE(cube_interaction(2, {3, -2}) == base);
  REQUIRE(cube_interaction(2, {-3, -2}) == base);
}

TEST_CASE("interaction cache tolerates concurrent readers", "[kernel]") {
  std::vector<double> serial;
  for (int k = 2; k <= 40; ++k) serial.push_back(cube_interaction(1, {k}));
  std::vector<std::thread> pool;
  std::vector<int> bad(4, 0);
  for (int t = 0; t < 4; ++t) {
    pool.emplace_back([t, &serial, &bad] {
      for (int k = 2; k <= 40; ++k) {
        if (cube_interaction(1, {k}) != serial[k - 2]) bad[t]++;
      }
    });
  }
  for (auto& th : pool) th.join();
  for (int b : bad) REQUIRE(b == 0);
}

TEST_CASE("unit beta probabilities reduce to inverse squares", "[kernel]") {
  KernelSpec exact{1, KernelFamily::ExactCube, 1.0};
  KernelSpec trunc{1, KernelFamily::TruncatedPower, 1.0};
  KernelSpec expo{1, KernelFamily::ExponentialPower, 1.0};
  for (int k : {2, 3, 7, 20, 63}) {
    double kk = static_cast<double>(k) * k;
    REQUIRE(connection_probability(exact, {k}) ==
            Catch::Approx(1.0 / kk).epsilon(1e-8));
    REQUIRE(connection_probability(trunc, {k}) == 1.0 / kk);
    REQUIRE(connection_probability(expo, {k}) ==
            Catch::Approx(-std::expm1(-1.0 / kk)).epsilon(1e-12));
  }
  REQUIRE(connection_probability(exact, {1}) == 1.0);
  REQUIRE(connection_probability(exact, {0}) == 1.0);
}

TEST_CASE("beta-two exact probability has the quartic correction", "[kernel]") {
  KernelSpec exact{1, KernelFamily::ExactCube, 2.0};
  for (int k : {2, 5, 16}) {
    double kk = static_cast<double>(k) * k;
    double expect = 2.0 / kk - 1.0 / (kk * kk);
    REQUIRE(connection_probability(exact, {k}) ==
            Catch::Approx(expect).epsilon(1e-8));
  }
}

TEST_CASE("probability is monotone in beta and along rays", "[kernel]") {
  for (auto family : {KernelFamily::ExactCube, KernelFamily::TruncatedPower,
                      KernelFamily::ExponentialPower}) {
    for (int d : {1, 2}) {
      IVec delta(d, 0);
      delta[0] = 3;
      double prev = -1.0;
      for (double beta : {0.25, 0.5, 1.0, 2.0, 8.0}) {
        KernelSpec s{d, family, beta};
        double p = connection_probability(s, delta);
        REQUIRE(p > prev);
        prev = p;
      }
      KernelSpec s{d, family, 1.5};
      double along = 2.0;
      for (int k = 2; k <= 32; ++k) {
        IVec dd(d, 0);
        dd[0] = k;
        double p = connection_probability(s, dd);
        REQUIRE(p <= along);
        along = p;
      }
    }
  }
}

TEST_CASE("probability envelope holds on a broad grid", "[kernel]") {
  for (auto family : {KernelFamily::ExactCube, KernelFamily::TruncatedPower,
                      KernelFamily::ExponentialPower}) {
    for (int d : {1, 2}) {
      for (double beta : {0.5, 1.0, 4.0}) {
        KernelSpec s{d, family, beta};
        for (int k = 2; k <= 20; ++k) {
          IVec delta(d, 0);
          delta[0] = k;
          if (d == 2) delta[1] = k / 2;
          auto b = check_probability_bounds(s, delta);
          INFO(family_name(family) << " d=" << d << " beta=" << beta
                                   << " k=" << k);
          REQUIRE(b.satisfied);
        }
      }
    }
  }
}

TEST_CASE("envelope example at distance two", "[kernel]") {
  KernelSpec s{1, KernelFamily::ExactCube, 1.0};
  auto b = check_probability_bounds(s, {2});
  REQUIRE(b.lower == Catch::Approx(1.0 / 64.0));
  REQUIRE(b.value == Catch::Approx(0.25).epsilon(1e-8));
  REQUIRE(b.upper == Catch::Approx(1.0));
  REQUIRE(b.satisfied);
}

TEST_CASE("block probability reproduces the single-cell value", "[kernel]") {
  KernelSpec s{1, KernelFamily::ExactCube, 1.0};
  REQUIRE(block_connection_probability(s, {3}, 4) ==
          Catch::Approx(1.0 / 9.0).epsilon(1e-8));
  for (int d : {1, 2}) {
    for (double beta : {0.7, 1.0, 3.0}) {
      KernelSpec spec{d, KernelFamily::ExactCube, beta};
      for (int n : {2, 3, 4}) {
        for (int k : {2, 3}) {
          IVec delta(d, 0);
          delta[0] = k;
          if (d == 2) delta[1] = 1;
          double direct = connection_probability(spec, delta);
          double block = block_connection_probability(spec, delta, n);
          INFO("d=" << d << " beta=" << beta << " n=" << n << " k=" << k);
          REQUIRE(block == Catch::Approx(direct).margin(1e-8));
        }
      }
    }
  }
}

TEST_CASE("expected degree brackets the lattice series", "[kernel]") {
  const int radius = 10000;
  auto est = expected_degree(KernelSpec{1, KernelFamily::ExactCube, 1.0},
                             radius);
  // 2 nearest neighbours plus 2 * (pi^2/6 - 1) for the full series
  double full = 2.0 + 2.0 * (M_PI * M_PI / 6.0 - 1.0);
  double tail = full - est.value;  // true discarded mass, 2*sum_{k>R} k^-2
  REQUIRE(tail > 2.0 / (radius + 1) - 1e-9);
  REQUIRE(tail < 2.0 / radius + 1e-9);
  REQUIRE(est.tail_low == 0.0);
  REQUIRE(est.tail_high >= tail);
  REQUIRE(est.truncation == radius);
}

TEST_CASE("far-field expansion agrees with quadrature", "[kernel]") {
  for (int k : {80, 150}) {
    IVec delta = {k};
    double quad = cube_interaction(1, delta);
    double far = cube_interaction_far(1, l2_norm_sq(delta));
    REQUIRE(far == Catch::Approx(quad).epsilon(1e-6));
  }
  for (auto delta : std::vector<IVec>{{0, 100}, {70, 100}}) {
    double quad = cube_interaction(2, delta);
    double far = cube_interaction_far(2, l2_norm_sq(delta));
    REQUIRE(far == Catch::Approx(quad).epsilon(1e-5));
  }
}

TEST_CASE("two-dimensional expected degree is finite and sane", "[kernel]") {
  auto est = expected_degree(KernelSpec{2, KernelFamily::ExactCube, 1.0}, 200);
  REQUIRE(est.value > 8.0);
  REQUIRE(est.value < 8.0 + 4.0);  // long-range mass is order one
  REQUIRE(est.tail_high > 0.0);
}

TEST_CASE("kernel gap: unit beta interval case vanishes, beta two decays",
          "[kernel]") {
  for (int k : {2, 5, 17}) {
    REQUIRE(kernel_gap(1, 1.0, {k}) == Catch::Approx(0.0).margin(1e-8));
  }
  for (int k : {2, 4, 8}) {
    REQUIRE(kernel_gap(1, 2.0, {k}) ==
            Catch::Approx(1.0 / k).epsilon(1e-6));
  }
  double sup = 0.0;
  for (int k = 2; k <= 64; ++k) sup = std::max(sup, kernel_gap(1, 2.0, {k}));
  REQUIRE(sup <= 2.0);
}

TEST_CASE("kernel gap is bounded in two dimensions", "[kernel]") {
  double sup = 0.0;
  for (int a = 0; a <= 20; ++a) {
    for (int b = std::max(a, 2); b <= 20; ++b) {
      sup = std::max(sup, kernel_gap(2, 1.0, {a, b}));
    }
  }
  REQUIRE(sup < 3.0);
}
