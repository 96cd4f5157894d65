#ifndef LRP_CLOUD_HPP
#define LRP_CLOUD_HPP

#include <array>
#include <cmath>
#include <cstdint>
#include <vector>

#include "lrp/check.hpp"
#include "lrp/config.hpp"
#include "lrp/graph.hpp"
#include "lrp/quadrature.hpp"
#include "lrp/rng.hpp"

namespace lrp {

struct CloudPair {
  std::array<double, kMaxDim> t{};
  std::array<double, kMaxDim> s{};  // lexicographically larger endpoint
};

// Poisson point process of unordered pairs {t, s} in the unit cube with
// intensity beta/2 * ||t-s||_2^{-2d} per ordered pair, thinned to
// ||t-s||_inf >= min_separation.  Each pair is stored once.
struct PoissonCloud {
  int d = 1;
  double beta = 1.0;
  double min_separation = 0.0;
  std::uint64_t seed = 0;
  std::vector<CloudPair> pairs;
};

namespace detail {

struct ShellBox {
  QuadBox box;      // region of the difference variable w
  double volume;
};

struct Shell {
  double a, b;               // inf-norm annulus bounds
  double mass;               // expected pair count in the shell
  double lambda_max;         // beta/2 * a^{-2d}
  std::vector<ShellBox> boxes;
  double total_volume;
};

// Partition of {a <= |w|_inf <= b} into boxes that are sign-pure per axis,
// so the triangular weight is smooth on each.
inline std::vector<ShellBox> annulus_boxes(int d, double a, double b) {
  std::vector<ShellBox> out;
  // axis i carries the large component; axes before it stay within [-a, a],
  // axes after it within [-b, b]
  for (int i = 0; i < d; ++i) {
    std::vector<std::array<double, 2>> ranges(d);
    for (int sign = 0; sign < 2; ++sign) {
      std::vector<std::vector<std::array<double, 2>>> axis(d);
      for (int j = 0; j < d; ++j) {
        if (j == i) {
          axis[j] = {sign ? std::array<double, 2>{a, b}
                          : std::array<double, 2>{-b, -a}};
        } else {
          double r = j < i ? a : b;
          axis[j] = {{-r, 0.0}, {0.0, r}};
        }
      }
      std::array<int, kMaxDim> pick{};
      for (;;) {
        QuadBox qb;
        qb.dim = d;
        for (int j = 0; j < d; ++j) {
          qb.lo[j] = axis[j][pick[j]][0];
          qb.hi[j] = axis[j][pick[j]][1];
        }
        double vol = qb.volume();
        if (vol > 0.0) out.push_back({qb, vol});
        int j = d - 1;
        while (j >= 0 && pick[j] + 1 >= static_cast<int>(axis[j].size()))
          pick[j--] = 0;
        if (j < 0) break;
        ++pick[j];
      }
    }
    (void)ranges;
  }
  return out;
}

}  // namespace detail

// Prepares the dyadic shell decomposition once; draws are then cheap and
// deterministic per seed.  Shell j covers inf-norm distances
// [eps 2^j, min(eps 2^{j+1}, 1)); counts are Poisson with the quadrature
// mass, positions exact by rejection against the shell's density bound.
class CloudSampler {
 public:
  CloudSampler(int d, double beta, double min_separation)
      : d_(d), beta_(beta), eps_(min_separation) {
    LRP_REQUIRE(d >= 1 && d <= kMaxDim, "CloudSampler: bad d");
    LRP_REQUIRE(beta > 0.0 && std::isfinite(beta), "CloudSampler: bad beta");
    LRP_REQUIRE(min_separation > 0.0 && min_separation < 1.0,
                "CloudSampler: min_separation outside (0,1)");
    double a = eps_;
    while (a < 1.0) {
      double b = std::min(2.0 * a, 1.0);
      detail::Shell sh;
      sh.a = a;
      sh.b = b;
      sh.boxes = detail::annulus_boxes(d_, a, b);
      sh.total_volume = 0.0;
      for (const auto& bx : sh.boxes) sh.total_volume += bx.volume;
      sh.lambda_max = 0.5 * beta_ * std::pow(a, -2.0 * d_);
      sh.mass = 0.0;
      for (const auto& bx : sh.boxes) {
        auto f = [this](const double* w) {
          double r2 = 0.0, weight = 1.0;
          for (int i = 0; i < d_; ++i) {
            r2 += w[i] * w[i];
            weight *= std::max(1.0 - std::fabs(w[i]), 0.0);
          }
          return 0.5 * beta_ * std::pow(r2, -d_) * weight;
        };
        sh.mass += integrate_box(f, bx.box, 1e-9);
      }
      shells_.push_back(std::move(sh));
      a = b;
    }
  }

  double total_mass() const {
    double m = 0.0;
    for (const auto& s : shells_) m += s.mass;
    return m;
  }

  PoissonCloud sample(std::uint64_t seed) const {
    PoissonCloud cloud;
    cloud.d = d_;
    cloud.beta = beta_;
    cloud.min_separation = eps_;
    cloud.seed = seed;
    for (std::size_t j = 0; j < shells_.size(); ++j) {
      const auto& sh = shells_[j];
      Rng count_rng(derive_seed(seed, "cloud-count", j));
      std::uint64_t n = sample_poisson(count_rng, sh.mass);
      Rng rng(derive_seed(seed, "cloud-shell", j));
      for (std::uint64_t k = 0; k < n; ++k) {
        cloud.pairs.push_back(draw_pair(sh, rng));
      }
    }
    return cloud;
  }

 private:
  CloudPair draw_pair(const detail::Shell& sh, Rng& rng) const {
    for (long attempt = 0; attempt < 100000000L; ++attempt) {
      // box proportional to volume, w uniform inside, t uniform in the cube
      double pick = rng.next_unit() * sh.total_volume;
      const detail::ShellBox* bx = &sh.boxes.back();
      for (const auto& b : sh.boxes) {
        if (pick < b.volume) {
          bx = &b;
          break;
        }
        pick -= b.volume;
      }
      std::array<double, kMaxDim> w{}, t{}, s{};
      double r2 = 0.0;
      for (int i = 0; i < d_; ++i) {
        w[i] = bx->box.lo[i] + (bx->box.hi[i] - bx->box.lo[i]) * rng.next_unit();
        r2 += w[i] * w[i];
      }
      bool inside = true;
      for (int i = 0; i < d_; ++i) {
        t[i] = rng.next_unit();
        s[i] = t[i] + w[i];
        if (s[i] < 0.0 || s[i] >= 1.0) inside = false;
      }
      double accept = 0.5 * beta_ * std::pow(r2, -d_) / sh.lambda_max;
      if (!inside || rng.next_unit() >= accept) continue;
      CloudPair pair;
      bool t_first = true;
      for (int i = 0; i < d_; ++i) {
        if (t[i] != s[i]) {
          t_first = t[i] < s[i];
          break;
        }
      }
      for (int i = 0; i < d_; ++i) {
        pair.t[i] = t_first ? t[i] : s[i];
        pair.s[i] = t_first ? s[i] : t[i];
      }
      return pair;
    }
    LRP_CHECK(false, "cloud rejection sampler failed to accept");
    return {};
  }

  int d_;
  double beta_;
  double eps_;
  std::vector<detail::Shell> shells_;
};

inline PoissonCloud sample_poisson_cloud(int d, double beta,
                                         double min_separation,
                                         std::uint64_t seed) {
  return CloudSampler(d, beta, min_separation).sample(seed);
}

// Projects the cloud onto an n^d grid of cells: a pair whose endpoints land
// in cells at inf-distance >= 2 becomes a long edge.  With n <=
// 1/min_separation no pair mass is lost below the two-cell scale, and the
// edge law coincides with sampling the box directly under the exact-cube
// kernel at the cloud's beta.
inline Configuration discretize_cloud(const PoissonCloud& cloud, int n) {
  LRP_REQUIRE(n >= 1, "discretize_cloud: bad n");
  LRP_REQUIRE(static_cast<double>(n) * cloud.min_separation <= 1.0 + 1e-12,
              "discretize_cloud: grid finer than the cloud separation");
  Configuration cfg;
  cfg.box = BoxSpec{cloud.d, n, {}};
  cfg.kernel = KernelSpec{cloud.d, KernelFamily::ExactCube, cloud.beta};
  cfg.seed = cloud.seed;
  const int d = cloud.d;
  std::array<int, kMaxDim> cu{}, cv{};
  for (const auto& pr : cloud.pairs) {
    int linf = 0;
    for (int i = 0; i < d; ++i) {
      cu[i] = std::min(static_cast<int>(pr.t[i] * n), n - 1);
      cv[i] = std::min(static_cast<int>(pr.s[i] * n), n - 1);
      linf = std::max(linf, std::abs(cu[i] - cv[i]));
    }
    if (linf < 2) continue;
    auto a = static_cast<std::int32_t>(cfg.box.index_of(cu.data()));
    auto b = static_cast<std::int32_t>(cfg.box.index_of(cv.data()));
    cfg.long_edges.emplace_back(a, b);
  }
  cfg.canonicalize();
  return cfg;
}

// One cloud viewed at several grid scales.  For every pair of scales where
// the finer is a multiple of the coarser, contracting a fine path can only
// shorten it, so the coarse distance between the projected endpoints is at
// most three times the fine distance; this is asserted over all vertex
// pairs.
inline std::vector<Configuration> couple_scales(const PoissonCloud& cloud,
                                                const std::vector<int>& scales,
                                                bool check_contraction = true) {
  LRP_REQUIRE(!scales.empty(), "couple_scales: no scales");
  std::vector<Configuration> out;
  out.reserve(scales.size());
  for (int n : scales) out.push_back(discretize_cloud(cloud, n));
  if (!check_contraction) return out;
  BfsScratch fine_scratch, coarse_scratch;
  for (std::size_t i = 0; i < scales.size(); ++i) {
    for (std::size_t j = 0; j < scales.size(); ++j) {
      if (i == j) continue;
      int nf = scales[i], nc = scales[j];
      if (nf <= nc || nf % nc != 0) continue;
      int k = nf / nc;
      LatticeGraph gf(out[i]), gc(out[j]);
      const auto& bf = out[i].box;
      const auto& bc = out[j].box;
      std::vector<std::int32_t> project(bf.num_vertices());
      std::array<int, kMaxDim> rel{};
      for (std::int32_t v = 0; v < gf.num_vertices(); ++v) {
        bf.rel_of(v, rel.data());
        for (int q = 0; q < bf.d; ++q) rel[q] /= k;
        project[v] = static_cast<std::int32_t>(bc.index_of(rel.data()));
      }
      for (std::int32_t u = 0; u < gf.num_vertices(); ++u) {
        std::vector<std::int32_t> src{u};
        detail::bfs_core(gf, src, fine_scratch, detail::kAllEdges,
                         detail::kNoStop);
        for (std::int32_t v = 0; v < gf.num_vertices(); ++v) {
          if (v == u) continue;
          std::int64_t df = fine_scratch.dist[v];
          std::int64_t dc =
              distance(gc, project[u], project[v], coarse_scratch);
          LRP_CHECK(dc <= 3 * df,
                    "couple_scales: coarse distance exceeds three times the "
                    "fine distance");
        }
      }
    }
  }
  return out;
}

}  // namespace lrp

#endif
