#ifndef LRP_CONFIG_HPP
#define LRP_CONFIG_HPP

#include <algorithm>
#include <cstdint>
#include <utility>
#include <vector>

#include "lrp/check.hpp"
#include "lrp/geometry.hpp"
#include "lrp/kernel.hpp"

namespace lrp {

using Edge = std::pair<std::int32_t, std::int32_t>;

// A sampled percolation configuration on a box.  Only long-range edges are
// stored (nearest neighbours are always open and implicit); edges are kept
// sorted with the smaller row-major index first, which makes the edge list a
// canonical value: two configurations are equal iff their serializations are.
struct Configuration {
  BoxSpec box;
  KernelSpec kernel;
  std::uint64_t seed = 0;
  std::vector<Edge> long_edges;

  void canonicalize() {
    for (auto& e : long_edges) {
      if (e.first > e.second) std::swap(e.first, e.second);
    }
    std::sort(long_edges.begin(), long_edges.end());
    long_edges.erase(std::unique(long_edges.begin(), long_edges.end()),
                     long_edges.end());
  }

  void validate() const {
    box.validate();
    kernel.validate();
    LRP_REQUIRE(kernel.d == box.d, "Configuration: kernel/box dimension");
    const std::int64_t v = box.num_vertices();
    for (std::size_t i = 0; i < long_edges.size(); ++i) {
      const auto& e = long_edges[i];
      LRP_REQUIRE(e.first >= 0 && e.second < v && e.first < e.second,
                  "Configuration: edge endpoints");
      LRP_REQUIRE(box.linf_distance(e.first, e.second) >= 2,
                  "Configuration: nearest-neighbour pair stored as long edge");
      if (i > 0) LRP_REQUIRE(long_edges[i - 1] < e, "Configuration: unsorted");
    }
  }
};

}  // namespace lrp

#endif
