#ifndef LRP_GRAPH_HPP
#define LRP_GRAPH_HPP

#include <array>
#include <cstdint>
#include <limits>
#include <vector>

#include "lrp/check.hpp"
#include "lrp/config.hpp"

namespace lrp {

inline constexpr std::int64_t kUnreachable =
    std::numeric_limits<std::int64_t>::max();

// Percolation graph on a box: implicit nearest-neighbour edges (always open,
// generated on the fly from coordinates) plus an explicit CSR of long-range
// edges.  Vertices are row-major indices into the box.
class LatticeGraph {
 public:
  explicit LatticeGraph(const Configuration& cfg) : box_(cfg.box) {
    box_.validate();
    const std::int64_t v = box_.num_vertices();
    nv_ = static_cast<std::int32_t>(v);
    off_.assign(nv_ + 1, 0);
    for (const auto& e : cfg.long_edges) {
      ++off_[e.first + 1];
      ++off_[e.second + 1];
    }
    for (std::int32_t i = 0; i < nv_; ++i) off_[i + 1] += off_[i];
    adj_.resize(off_[nv_]);
    std::vector<std::int32_t> cursor(off_.begin(), off_.end() - 1);
    for (const auto& e : cfg.long_edges) {
      adj_[cursor[e.first]++] = e.second;
      adj_[cursor[e.second]++] = e.first;
    }
    // offsets of the 3^d - 1 nearest-neighbour steps
    const int d = box_.d;
    std::array<int, kMaxDim> step{};
    step.fill(-1);
    for (;;) {
      bool zero = true;
      for (int i = 0; i < d; ++i) zero &= step[i] == 0;
      if (!zero) {
        NnStep s{};
        for (int i = 0; i < d; ++i) s.delta[i] = step[i];
        nn_.push_back(s);
      }
      int i = d - 1;
      while (i >= 0 && step[i] == 1) step[i--] = -1;
      if (i < 0) break;
      ++step[i];
    }
  }

  std::int32_t num_vertices() const { return nv_; }
  const BoxSpec& box() const { return box_; }

  std::int64_t long_degree(std::int32_t u) const {
    return off_[u + 1] - off_[u];
  }

  // degree including in-box nearest neighbours
  std::int64_t degree(std::int32_t u) const {
    std::array<int, kMaxDim> rel{};
    box_.rel_of(u, rel.data());
    std::int64_t nn = 0;
    for (const auto& s : nn_) {
      if (in_box(rel, s)) ++nn;
    }
    return nn + long_degree(u);
  }

  template <class Visit>
  void for_each_neighbor(std::int32_t u, Visit&& visit) const {
    std::array<int, kMaxDim> rel{};
    box_.rel_of(u, rel.data());
    const int d = box_.d;
    for (const auto& s : nn_) {
      if (!in_box(rel, s)) continue;
      std::array<int, kMaxDim> t{};
      for (int i = 0; i < d; ++i) t[i] = rel[i] + s.delta[i];
      visit(static_cast<std::int32_t>(box_.index_of(t.data())));
    }
    for (std::int32_t k = off_[u]; k < off_[u + 1]; ++k) visit(adj_[k]);
  }

 private:
  struct NnStep {
    std::array<int, kMaxDim> delta;
  };

  bool in_box(const std::array<int, kMaxDim>& rel, const NnStep& s) const {
    for (int i = 0; i < box_.d; ++i) {
      int c = rel[i] + s.delta[i];
      if (c < 0 || c >= box_.n) return false;
    }
    return true;
  }

  BoxSpec box_;
  std::int32_t nv_ = 0;
  std::vector<std::int32_t> off_;
  std::vector<std::int32_t> adj_;
  std::vector<NnStep> nn_;
};

// Reusable BFS state; each concurrent traversal owns one.  Epoch stamping
// avoids clearing the arrays between queries.
struct BfsScratch {
  std::vector<std::int64_t> dist;
  std::vector<std::uint32_t> mark;
  std::uint32_t epoch = 0;
  std::vector<std::int32_t> queue;
  std::vector<std::uint8_t> flag;  // set membership for indirect queries

  void reset(std::int64_t n) {
    if (static_cast<std::int64_t>(dist.size()) < n) {
      dist.resize(n);
      mark.assign(n, 0);
      flag.assign(n, 0);
      epoch = 0;
    }
    ++epoch;
    queue.clear();
  }
};

namespace detail {

// Core multi-source BFS.  EdgeAllowed(x, y) gates traversal, Stop(y) ends the
// search when a freshly discovered vertex satisfies it; returns that vertex's
// distance or kUnreachable.
template <class EdgeAllowed, class Stop>
std::int64_t bfs_core(const LatticeGraph& g,
                      const std::vector<std::int32_t>& sources,
                      BfsScratch& scratch, EdgeAllowed&& allowed,
                      Stop&& stop) {
  scratch.reset(g.num_vertices());
  auto& q = scratch.queue;
  for (std::int32_t s : sources) {
    if (scratch.mark[s] == scratch.epoch) continue;
    scratch.mark[s] = scratch.epoch;
    scratch.dist[s] = 0;
    if (stop(s)) return 0;
    q.push_back(s);
  }
  for (std::size_t head = 0; head < q.size(); ++head) {
    std::int32_t x = q[head];
    std::int64_t dx = scratch.dist[x];
    std::int64_t found = -1;
    g.for_each_neighbor(x, [&](std::int32_t y) {
      if (found >= 0) return;
      if (scratch.mark[y] == scratch.epoch) return;
      if (!allowed(x, y)) return;
      scratch.mark[y] = scratch.epoch;
      scratch.dist[y] = dx + 1;
      if (stop(y)) {
        found = dx + 1;
        return;
      }
      q.push_back(y);
    });
    if (found >= 0) return found;
  }
  return kUnreachable;
}

inline constexpr auto kAllEdges = [](std::int32_t, std::int32_t) {
  return true;
};
inline constexpr auto kNoStop = [](std::int32_t) { return false; };

}  // namespace detail

// Chemical distance between two vertices; never exceeds the linf distance
// because nearest-neighbour edges are always present.
inline std::int64_t distance(const LatticeGraph& g, std::int32_t u,
                             std::int32_t v, BfsScratch& scratch) {
  LRP_REQUIRE(u >= 0 && u < g.num_vertices() && v >= 0 &&
                  v < g.num_vertices(),
              "distance: vertex out of range");
  std::vector<std::int32_t> src{u};
  std::int64_t d = detail::bfs_core(g, src, scratch, detail::kAllEdges,
                                    [v](std::int32_t y) { return y == v; });
  LRP_CHECK(d <= g.box().linf_distance(u, v),
            "distance: exceeds the linf upper bound");
  return d;
}

inline std::int64_t distance(const LatticeGraph& g, std::int32_t u,
                             std::int32_t v) {
  BfsScratch scratch;
  return distance(g, u, v, scratch);
}

// Distance within the subgraph induced by `keep`; kUnreachable if v cannot
// be reached inside it.  keep must admit both endpoints.
template <class Keep>
std::int64_t distance_restricted(const LatticeGraph& g, std::int32_t u,
                                 std::int32_t v, Keep&& keep,
                                 BfsScratch& scratch) {
  LRP_REQUIRE(keep(u) && keep(v), "distance_restricted: endpoint excluded");
  std::vector<std::int32_t> src{u};
  return detail::bfs_core(
      g, src, scratch,
      [&keep](std::int32_t, std::int32_t y) { return keep(y); },
      [v](std::int32_t y) { return y == v; });
}

// Distance between vertex sets (0 if they intersect).
inline std::int64_t distance_sets(const LatticeGraph& g,
                                  const std::vector<std::int32_t>& from,
                                  const std::vector<std::int32_t>& to,
                                  BfsScratch& scratch) {
  LRP_REQUIRE(!from.empty() && !to.empty(), "distance_sets: empty set");
  scratch.reset(g.num_vertices());  // sizes flag array on first use
  for (std::int32_t t : to) scratch.flag[t] = 1;
  std::int64_t d = detail::bfs_core(
      g, from, scratch, detail::kAllEdges,
      [&scratch](std::int32_t y) { return scratch.flag[y] != 0; });
  for (std::int32_t t : to) scratch.flag[t] = 0;
  return d;
}

// Shortest connection between A and B that uses no direct A-B edge: every
// edge with one endpoint in A and the other in B is removed (nearest
// neighbours included), then the set distance is measured in what remains.
inline std::int64_t indirect_distance(const LatticeGraph& g,
                                      const std::vector<std::int32_t>& a,
                                      const std::vector<std::int32_t>& b,
                                      BfsScratch& scratch) {
  LRP_REQUIRE(!a.empty() && !b.empty(), "indirect_distance: empty set");
  scratch.reset(g.num_vertices());
  for (std::int32_t x : a) scratch.flag[x] |= 1;
  for (std::int32_t x : b) scratch.flag[x] |= 2;
  std::int64_t d = detail::bfs_core(
      g, a, scratch,
      [&scratch](std::int32_t x, std::int32_t y) {
        std::uint8_t fx = scratch.flag[x], fy = scratch.flag[y];
        return !((fx & 1) && (fy & 2)) && !((fx & 2) && (fy & 1));
      },
      [&scratch](std::int32_t y) { return (scratch.flag[y] & 2) != 0; });
  for (std::int32_t x : a) scratch.flag[x] = 0;
  for (std::int32_t x : b) scratch.flag[x] = 0;
  return d;
}

// Eccentricity of one source: the largest finite distance from it (the box
// with its nearest-neighbour edges is connected, so all distances are
// finite).
inline std::int64_t eccentricity(const LatticeGraph& g, std::int32_t src,
                                 BfsScratch& scratch, std::int32_t* far_out) {
  std::vector<std::int32_t> s{src};
  detail::bfs_core(g, s, scratch, detail::kAllEdges, detail::kNoStop);
  std::int64_t best = 0;
  std::int32_t far = src;
  for (std::int32_t v = 0; v < g.num_vertices(); ++v) {
    if (scratch.mark[v] == scratch.epoch && scratch.dist[v] > best) {
      best = scratch.dist[v];
      far = v;
    }
  }
  if (far_out) *far_out = far;
  return best;
}

struct DiameterResult {
  std::int64_t value = 0;
  bool exact = false;  // false means a double-sweep lower bound
};

inline constexpr std::int64_t kDiameterExactCap = 100000;

// Exact diameter by all-source BFS; refuses boxes above the vertex cap.
inline DiameterResult diameter_exact(const LatticeGraph& g,
                                     BfsScratch& scratch) {
  LRP_REQUIRE(g.num_vertices() <= kDiameterExactCap,
              "diameter_exact: box too large, use the sampled bound");
  DiameterResult r;
  r.exact = true;
  for (std::int32_t v = 0; v < g.num_vertices(); ++v) {
    r.value = std::max(r.value, eccentricity(g, v, scratch, nullptr));
  }
  return r;
}

// Lower bound via repeated double sweeps from the given starts.
inline DiameterResult diameter_double_sweep(
    const LatticeGraph& g, const std::vector<std::int32_t>& starts,
    BfsScratch& scratch) {
  DiameterResult r;
  r.exact = false;
  for (std::int32_t s : starts) {
    std::int32_t far = s;
    eccentricity(g, s, scratch, &far);
    r.value = std::max(r.value, eccentricity(g, far, scratch, nullptr));
  }
  return r;
}

struct DegreeProfile {
  std::vector<std::int64_t> degree;  // per vertex, long + in-box neighbours
  std::vector<std::uint8_t> interior;  // 1 when no coordinate touches a face
};

inline DegreeProfile degree_profile(const LatticeGraph& g) {
  DegreeProfile p;
  const auto& box = g.box();
  p.degree.resize(g.num_vertices());
  p.interior.resize(g.num_vertices());
  std::array<int, kMaxDim> rel{};
  for (std::int32_t v = 0; v < g.num_vertices(); ++v) {
    p.degree[v] = g.degree(v);
    box.rel_of(v, rel.data());
    std::uint8_t inside = 1;
    for (int i = 0; i < box.d; ++i) {
      if (rel[i] == 0 || rel[i] == box.n - 1) inside = 0;
    }
    p.interior[v] = inside;
  }
  return p;
}

}  // namespace lrp

#endif
