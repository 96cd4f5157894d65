#ifndef LRP_SAMPLER_HPP
#define LRP_SAMPLER_HPP

#include <cstdint>
#include <utility>
#include <vector>

#include "lrp/config.hpp"
#include "lrp/geometry.hpp"
#include "lrp/kernel.hpp"
#include "lrp/rng.hpp"

namespace lrp {

// Draws configurations on a fixed box.  Pair classes and their probabilities
// are computed once at construction; each draw then costs O(#classes +
// #open edges) via geometric skipping, with one stream per class keyed by
// (seed, class index) so draws are independent of iteration strategy.
class BoxSampler {
 public:
  BoxSampler(const KernelSpec& kernel, const BoxSpec& box)
      : kernel_(kernel), box_(box) {
    kernel_.validate();
    box_.validate();
    LRP_REQUIRE(kernel_.d == box_.d, "BoxSampler: kernel/box dimension");
    classes_ = enumerate_pair_classes(box_, box_.n - 1);
    for (auto& c : classes_) {
      c.probability = connection_probability(kernel_, c.delta);
    }
  }

  const std::vector<PairClass>& classes() const { return classes_; }
  const BoxSpec& box() const { return box_; }
  const KernelSpec& kernel() const { return kernel_; }

  Configuration sample(std::uint64_t seed) const {
    Configuration cfg;
    cfg.box = box_;
    cfg.kernel = kernel_;
    cfg.seed = seed;
    for (std::size_t ci = 0; ci < classes_.size(); ++ci) {
      const PairClass& pc = classes_[ci];
      const double p = pc.probability;
      if (p <= 0.0) continue;
      Rng rng(derive_seed(seed, "box-class", ci));
      std::int64_t rank = 0;
      while (rank < pc.count) {
        if (p < 1.0) {
          std::uint64_t skip = geometric_skip(rng, p);
          if (skip >= static_cast<std::uint64_t>(pc.count - rank)) break;
          rank += static_cast<std::int64_t>(skip);
        }
        std::int64_t u, v;
        class_member(box_, pc.delta, rank, &u, &v);
        cfg.long_edges.emplace_back(static_cast<std::int32_t>(u),
                                    static_cast<std::int32_t>(v));
        ++rank;
      }
    }
    cfg.canonicalize();
    return cfg;
  }

 private:
  KernelSpec kernel_;
  BoxSpec box_;
  std::vector<PairClass> classes_;
};

inline Configuration sample_box(const KernelSpec& kernel, const BoxSpec& box,
                                std::uint64_t seed) {
  return BoxSampler(kernel, box).sample(seed);
}

// Draws one configuration per kernel on a common box, coupled through one
// shared uniform per vertex pair: the pair is open under kernel k iff
// U < p_k.  Whenever one kernel dominates the other pointwise, the sparser
// edge set is contained in the denser one pathwise; the containment is
// asserted when pointwise dominance holds on every class.
inline std::pair<Configuration, Configuration> sample_coupled_kernels(
    const KernelSpec& a, const KernelSpec& b, const BoxSpec& box,
    std::uint64_t seed) {
  LRP_REQUIRE(a.d == box.d && b.d == box.d,
              "sample_coupled_kernels: dimension mismatch");
  Configuration ca, cb;
  ca.box = cb.box = box;
  ca.kernel = a;
  cb.kernel = b;
  ca.seed = cb.seed = seed;

  auto classes = enumerate_pair_classes(box, box.n - 1);
  bool a_below_b = true, b_below_a = true;
  const std::uint64_t key = derive_seed(seed, "pair-uniform", 0);
  std::uint64_t ordinal = 0;
  for (const auto& pc : classes) {
    const double pa = connection_probability(a, pc.delta);
    const double pb = connection_probability(b, pc.delta);
    a_below_b &= pa <= pb;
    b_below_a &= pb <= pa;
    for (std::int64_t rank = 0; rank < pc.count; ++rank, ++ordinal) {
      const double u = indexed_unit(key, ordinal);
      if (u >= pa && u >= pb) continue;
      std::int64_t x, y;
      class_member(box, pc.delta, rank, &x, &y);
      Edge e{static_cast<std::int32_t>(x), static_cast<std::int32_t>(y)};
      if (u < pa) ca.long_edges.push_back(e);
      if (u < pb) cb.long_edges.push_back(e);
    }
  }
  ca.canonicalize();
  cb.canonicalize();
  if (a_below_b) {
    LRP_CHECK(std::includes(cb.long_edges.begin(), cb.long_edges.end(),
                            ca.long_edges.begin(), ca.long_edges.end()),
              "coupled sample: dominated kernel grew an extra edge");
  }
  if (b_below_a) {
    LRP_CHECK(std::includes(ca.long_edges.begin(), ca.long_edges.end(),
                            cb.long_edges.begin(), cb.long_edges.end()),
              "coupled sample: dominated kernel grew an extra edge");
  }
  return {std::move(ca), std::move(cb)};
}

}  // namespace lrp

#endif
