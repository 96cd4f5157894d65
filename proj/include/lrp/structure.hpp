#ifndef LRP_STRUCTURE_HPP
#define LRP_STRUCTURE_HPP

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "lrp/check.hpp"
#include "lrp/config.hpp"
#include "lrp/graph.hpp"
#include "lrp/kernel.hpp"
#include "lrp/oracle.hpp"
#include "lrp/rng.hpp"
#include "lrp/sampler.hpp"

namespace lrp {

struct SphereEstimate {
  int k = 0;
  int window = 0;
  double frequency = 0.0;
  double std_error = 0.0;
  int replicates = 0;
  double envelope = 0.0;        // beta * 50^d * k^{-d}
  double truncation_bias = 0.0; // upper bound on the mass ignored beyond
                                // the window (exact-cube envelope again)
};

// Frequency of the origin having a direct open edge to some vertex at
// inf-distance >= k, simulated inside a window of radius `window`.  The
// discarded mass beyond the window is bracketed by the same envelope
// evaluated at window + 1, reported as truncation_bias.
inline SphereEstimate sphere_connection_probability(const KernelSpec& spec,
                                                    int k, int window,
                                                    int reps,
                                                    std::uint64_t seed) {
  spec.validate();
  LRP_REQUIRE(k >= 2, "sphere: k < 2");
  LRP_REQUIRE(window >= 4 * k, "sphere: window below 4k");
  LRP_REQUIRE(reps >= 2, "sphere: need replicates");
  LRP_REQUIRE(spec.d <= 2, "sphere: d > 2 not supported");

  // slot classes: probability and count per canonical class on each ring
  struct Slot {
    double p;
    std::int64_t count;
  };
  std::vector<Slot> slots;
  if (spec.d == 1) {
    IVec delta(1);
    for (int j = k; j <= window; ++j) {
      delta[0] = j;
      slots.push_back({connection_probability(spec, delta), 2});
    }
  } else {
    IVec canon(2);
    for (int r = k; r <= window; ++r) {
      canon[1] = r;
      for (int a = 0; a <= r; ++a) {
        canon[0] = a;
        slots.push_back({connection_probability(spec, canon),
                         detail::ring_class_mult(a, r)});
      }
    }
  }
  std::sort(slots.begin(), slots.end(),
            [](const Slot& a, const Slot& b) { return a.p > b.p; });

  std::int64_t hits = 0;
  for (int rep = 0; rep < reps; ++rep) {
    Rng rng(derive_seed(seed, "sphere", rep));
    bool open = false;
    for (const auto& s : slots) {
      if (s.p <= 0.0) break;
      std::uint64_t skip = geometric_skip(rng, s.p);
      if (skip < static_cast<std::uint64_t>(s.count)) {
        open = true;
        break;
      }
    }
    hits += open;
  }
  SphereEstimate est;
  est.k = k;
  est.window = window;
  est.replicates = reps;
  est.frequency = static_cast<double>(hits) / reps;
  est.std_error =
      std::sqrt(est.frequency * (1.0 - est.frequency) / reps);
  est.envelope = spec.beta * std::pow(50.0, spec.d) *
                 std::pow(static_cast<double>(k), -spec.d);
  est.truncation_bias = spec.beta * std::pow(50.0, spec.d) *
                        std::pow(static_cast<double>(window) + 1.0, -spec.d);
  return est;
}

struct ConnectedSetReport {
  int k = 0;
  std::int64_t count = 0;
  double max_avg_degree = 0.0;  // max over size-k sets of (sum of degrees)/k
};

// Connected induced sets containing the root vertex, each enumerated exactly
// once: candidates are consumed in order and a consumed vertex is banned from
// the remaining branches at its level.  Degrees are taken in the whole graph.
inline std::vector<ConnectedSetReport> enumerate_connected_sets(
    const LatticeGraph& g, int k_max, std::int32_t root = 0) {
  LRP_REQUIRE(k_max >= 1 && k_max <= 6, "enumerate_connected_sets: k_max");
  const std::int32_t nv = g.num_vertices();
  LRP_REQUIRE(root >= 0 && root < nv, "enumerate_connected_sets: root");
  std::vector<ConnectedSetReport> out(k_max);
  for (int k = 1; k <= k_max; ++k) out[k - 1].k = k;

  std::vector<std::int64_t> deg(nv);
  for (std::int32_t v = 0; v < nv; ++v) deg[v] = g.degree(v);

  std::vector<std::uint8_t> in_set(nv, 0), banned(nv, 0), marked(nv, 0);
  int size = 0;
  std::int64_t sum_deg = 0;

  // Each candidate v opens a branch where v joins the set; afterwards v is
  // banned for the remaining branches of this level, which makes every set
  // reachable along exactly one path.
  auto rec = [&](auto&& self, std::vector<std::int32_t> cand) -> void {
    auto& row = out[size - 1];
    row.count++;
    row.max_avg_degree = std::max(
        row.max_avg_degree, static_cast<double>(sum_deg) / size);
    if (size == k_max) return;
    std::vector<std::int32_t> taken;
    while (!cand.empty()) {
      std::int32_t v = cand.back();
      cand.pop_back();
      in_set[v] = 1;
      std::vector<std::int32_t> next = cand;
      for (std::int32_t c : next) marked[c] = 1;
      g.for_each_neighbor(v, [&](std::int32_t y) {
        if (!in_set[y] && !banned[y] && !marked[y]) {
          next.push_back(y);
          marked[y] = 1;
        }
      });
      for (std::int32_t c : next) marked[c] = 0;
      ++size;
      sum_deg += deg[v];
      self(self, std::move(next));
      sum_deg -= deg[v];
      --size;
      in_set[v] = 0;
      banned[v] = 1;
      taken.push_back(v);
    }
    for (std::int32_t v : taken) banned[v] = 0;
  };

  in_set[root] = 1;
  size = 1;
  sum_deg = deg[root];
  std::vector<std::int32_t> cand;
  g.for_each_neighbor(root, [&](std::int32_t y) { cand.push_back(y); });
  rec(rec, std::move(cand));
  return out;
}

inline std::vector<ConnectedSetReport> enumerate_connected_sets(
    const Configuration& cfg, int k_max, std::int32_t root = 0) {
  LatticeGraph g(cfg);
  return enumerate_connected_sets(g, k_max, root);
}

struct ConditionedEdgeCount {
  double expected = 0.0;
  double p_positive = 0.0;
  double expected_given_positive = 0.0;
  std::vector<double> pmf;  // Poisson-binomial law of the open-pair count
};

// Open-pair count between the blocks n*dispU + {0..n-1}^d and n*dispV +
// {0..n-1}^d.  The law is assembled by dynamic programming over all cell
// pairs; the conditional mean uses the closed forms E[X]/P(X>=1).
inline ConditionedEdgeCount conditioned_edge_count(const KernelSpec& spec,
                                                   const IVec& disp_u,
                                                   const IVec& disp_v,
                                                   int n) {
  spec.validate();
  const int d = spec.d;
  LRP_REQUIRE(static_cast<int>(disp_u.size()) == d &&
                  static_cast<int>(disp_v.size()) == d,
              "conditioned_edge_count: displacement dimensions");
  LRP_REQUIRE(std::pow(static_cast<double>(n), 2 * d) <= 1e4 + 0.5,
              "conditioned_edge_count: too many cell pairs");
  IVec block(d);
  for (int i = 0; i < d; ++i) block[i] = disp_v[i] - disp_u[i];
  LRP_REQUIRE(linf_norm(block) >= 2, "conditioned_edge_count: blocks touch");

  ConditionedEdgeCount out;
  out.pmf.assign(1, 1.0);
  double log_none = 0.0;
  const int span = 2 * n - 1;
  std::int64_t combos = 1;
  for (int i = 0; i < d; ++i) combos *= span;
  IVec cell(d);
  for (std::int64_t t = 0; t < combos; ++t) {
    std::int64_t r = t;
    std::int64_t mult = 1;
    for (int i = d - 1; i >= 0; --i) {
      int off = static_cast<int>(r % span) - (n - 1);
      r /= span;
      mult *= n - std::abs(off);
      cell[i] = n * block[i] + off;
    }
    double p = connection_probability(spec, cell);
    out.expected += static_cast<double>(mult) * p;
    log_none += static_cast<double>(mult) * std::log1p(-p);
    for (std::int64_t m = 0; m < mult; ++m) {
      out.pmf.push_back(0.0);
      for (std::size_t i = out.pmf.size() - 1; i > 0; --i) {
        out.pmf[i] = out.pmf[i] * (1.0 - p) + out.pmf[i - 1] * p;
      }
      out.pmf[0] *= 1.0 - p;
      while (out.pmf.size() > 1 && out.pmf.back() < 1e-18)
        out.pmf.pop_back();
    }
  }
  out.p_positive = -std::expm1(log_none);
  out.expected_given_positive =
      out.p_positive > 0.0 ? out.expected / out.p_positive : 0.0;
  LRP_CHECK(out.expected_given_positive <= 1.0 + out.expected + 1e-9,
            "conditioned_edge_count: conditional mean bound");
  return out;
}

struct CutPointReport {
  std::int32_t m = 0;
  std::vector<std::int32_t> positions;  // interior w with no straddling pair
  std::int64_t count = 0;
};

// Interior positions w of a one-dimensional configuration with no open pair
// straddling them; single sweep over edges bucketed by left endpoint.
inline CutPointReport cut_points_d1(const Configuration& cfg) {
  LRP_REQUIRE(cfg.box.d == 1, "cut_points_d1: one-dimensional only");
  CutPointReport out;
  const std::int32_t m = cfg.box.n;
  out.m = m;
  std::vector<std::int32_t> max_reach(m, 0);
  for (const auto& e : cfg.long_edges) {
    max_reach[e.first] = std::max(max_reach[e.first], e.second);
  }
  std::int32_t reach = 0;
  for (std::int32_t w = 1; w + 1 < m; ++w) {
    reach = std::max(reach, max_reach[w - 1]);
    if (reach <= w) out.positions.push_back(w);
  }
  out.count = static_cast<std::int64_t>(out.positions.size());
  return out;
}

// Odd interior positions w that separate the segment: no open pair straddles
// w and w itself has no long edge into either side.
inline std::vector<std::int32_t> separation_points_d1(
    const Configuration& cfg) {
  LRP_REQUIRE(cfg.box.d == 1, "separation_points_d1: one-dimensional only");
  const std::int32_t m = cfg.box.n;
  std::vector<std::int32_t> max_reach(m, 0);
  std::vector<std::uint8_t> incident(m, 0);
  for (const auto& e : cfg.long_edges) {
    max_reach[e.first] = std::max(max_reach[e.first], e.second);
    incident[e.first] = 1;
    incident[e.second] = 1;
  }
  std::vector<std::int32_t> seps;
  std::int32_t reach = 0;
  std::int32_t next_odd = 1;
  for (std::int32_t w = 1; w + 1 < m; ++w) {
    reach = std::max(reach, max_reach[w - 1]);
    if (w == next_odd) {
      if (reach <= w && !incident[w]) seps.push_back(w);
      next_odd += 2;
    }
  }
  return seps;
}

struct CutPointBound {
  double exact_sum = 0.0;   // sum over interior w of the cut probability
  double bound = 0.0;
  std::string branch;
};

// Expected number of cut points of a segment of m sites against the
// piecewise envelope 20/(1-beta) m^{1-beta} (beta < 1), 10 + 8 log m
// (1 <= beta <= 2), 20 (beta > 2).
inline CutPointBound cut_point_count_bound(double beta, int m) {
  LRP_REQUIRE(beta >= 0.0, "cut_point_count_bound: beta < 0");
  LRP_REQUIRE(m >= 3, "cut_point_count_bound: m < 3");
  CutPointBound out;
  for (int w = 1; w + 1 < m; ++w) {
    out.exact_sum += exact_cut_point_probability(beta, m, w);
  }
  if (beta < 1.0) {
    out.branch = "subcritical";
    out.bound = 20.0 / (1.0 - beta) * std::pow(static_cast<double>(m),
                                               1.0 - beta);
  } else if (beta <= 2.0) {
    out.branch = "logarithmic";
    out.bound = 10.0 + 8.0 * std::log(static_cast<double>(m));
  } else {
    out.branch = "bounded";
    out.bound = 20.0;
  }
  return out;
}

struct SeparationEstimate {
  std::vector<int> positions;     // odd interior w
  std::vector<double> frequency;
  std::vector<double> std_error;
  std::vector<double> exact;      // independent-factor closed form
  double lower_bound = 0.0;       // 0.1 * M^{-beta}
  int replicates = 0;
};

// Replicated separation-point frequencies per odd interior position.  The
// three defining events use disjoint pair sets, so the exact probability is
// the product of the closed-form factors.
inline SeparationEstimate separation_frequency_d1(const KernelSpec& spec,
                                                  int M, int reps,
                                                  std::uint64_t seed) {
  spec.validate();
  LRP_REQUIRE(spec.d == 1, "separation_frequency_d1: one-dimensional only");
  LRP_REQUIRE(spec.family == KernelFamily::ExactCube,
              "separation_frequency_d1: exact-cube kernel only");
  LRP_REQUIRE(M >= 3, "separation_frequency_d1: M < 3");
  LRP_REQUIRE(reps >= 2, "separation_frequency_d1: need replicates");
  SeparationEstimate out;
  out.replicates = reps;
  out.lower_bound = 0.1 * std::pow(static_cast<double>(M), -spec.beta);
  std::vector<std::size_t> slot(M, 0);
  for (int w = 1; w + 1 < M; w += 2) {
    slot[w] = out.positions.size();
    out.positions.push_back(w);
    out.exact.push_back(
        exact_separation_point_probability(spec.beta, M, w));
  }
  std::vector<std::int64_t> hits(out.positions.size(), 0);
  BoxSampler sampler(spec, BoxSpec{1, M, {}});
  for (int rep = 0; rep < reps; ++rep) {
    Configuration cfg = sampler.sample(derive_seed(seed, "separation", rep));
    for (std::int32_t w : separation_points_d1(cfg)) ++hits[slot[w]];
  }
  for (std::size_t i = 0; i < out.positions.size(); ++i) {
    double f = static_cast<double>(hits[i]) / reps;
    out.frequency.push_back(f);
    out.std_error.push_back(std::sqrt(f * (1.0 - f) / reps));
  }
  return out;
}

}  // namespace lrp

#endif
