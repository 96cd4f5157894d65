#ifndef LRP_ORACLE_HPP
#define LRP_ORACLE_HPP

#include <cmath>
#include <cstdint>
#include <map>
#include <vector>

#include "lrp/check.hpp"
#include "lrp/config.hpp"
#include "lrp/graph.hpp"
#include "lrp/kernel.hpp"

namespace lrp {

// Exact finite law of an integer statistic.
struct ExactLaw {
  std::map<std::int64_t, double> probs;

  double mean() const {
    double m = 0.0;
    for (const auto& [k, p] : probs) m += static_cast<double>(k) * p;
    return m;
  }

  double at(std::int64_t k) const {
    auto it = probs.find(k);
    return it == probs.end() ? 0.0 : it->second;
  }

  void check_normalized() const {
    double s = 0.0;
    for (const auto& [k, p] : probs) s += p;
    LRP_CHECK(std::fabs(s - 1.0) <= 1e-12, "ExactLaw: mass is not 1");
  }
};

inline constexpr int kOracleMaxPairs = 22;

namespace detail {

struct CandidatePair {
  std::int32_t u, v;
  double p;
};

// all vertex pairs at linf distance >= 2 with positive probability, in class
// order (which is lexicographic in the displacement, then row-major in the
// anchor)
inline std::vector<CandidatePair> oracle_candidates(const KernelSpec& kernel,
                                                    const BoxSpec& box) {
  std::vector<CandidatePair> out;
  for (const auto& pc : enumerate_pair_classes(box, box.n - 1)) {
    double p = connection_probability(kernel, pc.delta);
    if (p <= 0.0) continue;
    LRP_CHECK(p < 1.0, "oracle: certain long edge");
    for (std::int64_t r = 0; r < pc.count; ++r) {
      std::int64_t u, v;
      class_member(box, pc.delta, r, &u, &v);
      out.push_back({static_cast<std::int32_t>(u),
                     static_cast<std::int32_t>(v), p});
    }
  }
  return out;
}

// Exhausts all 2^P subsets of candidate long edges in index order, calling
// fn(configuration, weight) for each; total weight is exactly 1.
template <class Fn>
void for_each_configuration(const KernelSpec& kernel, const BoxSpec& box,
                            Fn&& fn) {
  box.validate();
  kernel.validate();
  auto cand = oracle_candidates(kernel, box);
  const int P = static_cast<int>(cand.size());
  LRP_REQUIRE(P <= kOracleMaxPairs, "oracle: too many candidate pairs");
  double base = 1.0;
  std::vector<double> ratio(P);
  for (int i = 0; i < P; ++i) {
    base *= 1.0 - cand[i].p;
    ratio[i] = cand[i].p / (1.0 - cand[i].p);
  }
  Configuration cfg;
  cfg.box = box;
  cfg.kernel = kernel;
  for (std::uint32_t mask = 0; mask < (1u << P); ++mask) {
    double w = base;
    cfg.long_edges.clear();
    for (std::uint32_t bits = mask; bits; bits &= bits - 1) {
      int i = __builtin_ctz(bits);
      w *= ratio[i];
      cfg.long_edges.emplace_back(cand[i].u, cand[i].v);
    }
    cfg.canonicalize();
    fn(cfg, w);
  }
}

}  // namespace detail

// Law of the chemical distance between two vertices by exhausting every
// long-edge configuration; feasible while the box has at most
// kOracleMaxPairs candidate pairs.
inline ExactLaw exact_distance_law(const KernelSpec& kernel,
                                   const BoxSpec& box, std::int32_t u,
                                   std::int32_t v) {
  ExactLaw law;
  BfsScratch scratch;
  detail::for_each_configuration(kernel, box, [&](const Configuration& cfg,
                                                  double w) {
    LatticeGraph g(cfg);
    law.probs[distance(g, u, v, scratch)] += w;
  });
  law.check_normalized();
  return law;
}

inline double exact_expected_distance(const KernelSpec& kernel,
                                      const BoxSpec& box, std::int32_t u,
                                      std::int32_t v) {
  return exact_distance_law(kernel, box, u, v).mean();
}

inline ExactLaw exact_diameter_law(const KernelSpec& kernel,
                                   const BoxSpec& box) {
  ExactLaw law;
  BfsScratch scratch;
  detail::for_each_configuration(kernel, box, [&](const Configuration& cfg,
                                                  double w) {
    LatticeGraph g(cfg);
    law.probs[diameter_exact(g, scratch).value] += w;
  });
  law.check_normalized();
  return law;
}

// Connected induced vertex sets containing the box origin (vertex 0), by
// filtering all subsets of each size; the reference the structural
// enumerator is checked against.
inline std::vector<std::int64_t> brute_force_connected_sets(
    const Configuration& cfg, int k_max) {
  cfg.validate();
  LRP_REQUIRE(k_max >= 1, "brute_force_connected_sets: k_max < 1");
  LatticeGraph g(cfg);
  const std::int32_t nv = g.num_vertices();
  {
    // C(nv, k_max) guard, conservative
    double c = 1.0;
    for (int i = 0; i < k_max; ++i) c *= static_cast<double>(nv - i) / (i + 1);
    LRP_REQUIRE(c <= 1e6, "brute_force_connected_sets: search too large");
  }
  std::vector<std::int64_t> counts(k_max + 1, 0);
  std::vector<std::int32_t> chosen;
  std::vector<std::uint8_t> in_set(nv, 0);
  std::vector<std::int32_t> stack;
  auto connected_through_origin = [&]() {
    // BFS inside the chosen set from vertex 0
    stack.assign(1, 0);
    std::size_t seen = 1;
    std::vector<std::uint8_t> vis(nv, 0);
    vis[0] = 1;
    while (!stack.empty()) {
      std::int32_t x = stack.back();
      stack.pop_back();
      g.for_each_neighbor(x, [&](std::int32_t y) {
        if (in_set[y] && !vis[y]) {
          vis[y] = 1;
          ++seen;
          stack.push_back(y);
        }
      });
    }
    return seen == chosen.size();
  };
  // chosen always contains vertex 0
  auto rec = [&](auto&& self, std::int32_t next) -> void {
    if (connected_through_origin()) counts[chosen.size()]++;
    if (static_cast<int>(chosen.size()) == k_max) return;
    for (std::int32_t v = next; v < nv; ++v) {
      chosen.push_back(v);
      in_set[v] = 1;
      self(self, v + 1);
      in_set[v] = 0;
      chosen.pop_back();
    }
  };
  chosen.push_back(0);
  in_set[0] = 1;
  rec(rec, 1);
  return counts;
}

// Probability that no open pair straddles position w in the segment
// {0,...,m-1}: the interactions telescope to ((w+1)(m-w)/m)^(-beta).
inline double exact_cut_point_probability(double beta, int m, int w) {
  LRP_REQUIRE(m >= 3 && w >= 1 && w <= m - 2,
              "exact_cut_point_probability: w not interior");
  double a = static_cast<double>(w + 1) * (m - w) / m;
  return std::pow(a, -beta);
}

// The two remaining separation factors at w in {0,...,m-1}: no long edge
// from w into {0,...,w-2} and none into {w+2,...,m-1}; both telescope.
inline double exact_separation_side_probability(double beta, int len) {
  // len = number of sites strictly on one side of w; distances 2..len reach
  // len - 1 of them
  if (len <= 1) return 1.0;
  double a = static_cast<double>(len + 1) / (2.0 * len);
  return std::pow(a, beta);
}

inline double exact_separation_point_probability(double beta, int m, int w) {
  LRP_REQUIRE(m >= 3 && w >= 1 && w <= m - 2,
              "exact_separation_point_probability: w not interior");
  return exact_separation_side_probability(beta, w) *
         exact_separation_side_probability(beta, m - 1 - w) *
         exact_cut_point_probability(beta, m, w);
}

}  // namespace lrp

#endif
