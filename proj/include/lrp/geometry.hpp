#ifndef LRP_GEOMETRY_HPP
#define LRP_GEOMETRY_HPP

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <stdexcept>
#include <vector>

namespace lrp {

inline constexpr int kMaxDim = 4;

using IVec = std::vector<int>;

inline int linf_norm(const IVec& v) {
  int m = 0;
  for (int c : v) m = std::max(m, std::abs(c));
  return m;
}

inline double l2_norm_sq(const IVec& v) {
  double s = 0.0;
  for (int c : v) s += static_cast<double>(c) * c;
  return s;
}

inline double l2_norm(const IVec& v) { return std::sqrt(l2_norm_sq(v)); }

// Sorted absolute components; connection probabilities are invariant under
// coordinate permutation and sign flips, so this is the cache key.
inline IVec canonical_class(const IVec& delta) {
  IVec k(delta.size());
  for (std::size_t i = 0; i < delta.size(); ++i) k[i] = std::abs(delta[i]);
  std::sort(k.begin(), k.end());
  return k;
}

// First nonzero component positive; exactly one of {delta, -delta} qualifies
// for delta != 0, so enumerating these visits each unordered pair once.
inline bool is_lex_positive(const IVec& delta) {
  for (int c : delta) {
    if (c != 0) return c > 0;
  }
  return false;
}

// Axis-aligned box of side n in Z^d anchored at `origin` (vertex coordinates
// origin + {0,...,n-1}^d), indexed row-major.
struct BoxSpec {
  int d = 1;
  int n = 1;
  IVec origin;  // empty means the zero vector

  void validate() const {
    if (d < 1 || d > kMaxDim) throw std::invalid_argument("BoxSpec: bad d");
    if (n < 1) throw std::invalid_argument("BoxSpec: bad n");
    if (!origin.empty() && static_cast<int>(origin.size()) != d)
      throw std::invalid_argument("BoxSpec: origin/d mismatch");
    double v = std::pow(static_cast<double>(n), d);
    if (v > 2147000000.0) throw std::invalid_argument("BoxSpec: box too large");
  }

  std::int64_t num_vertices() const {
    std::int64_t v = 1;
    for (int i = 0; i < d; ++i) v *= n;
    return v;
  }

  int origin_at(int i) const { return origin.empty() ? 0 : origin[i]; }

  // relative coordinates in {0,...,n-1}^d <-> row-major index
  std::int64_t index_of(const IVec& rel) const { return index_of(rel.data()); }

  std::int64_t index_of(const int* rel) const {
    std::int64_t idx = 0;
    for (int i = 0; i < d; ++i) idx = idx * n + rel[i];
    return idx;
  }

  void rel_of(std::int64_t idx, int* rel) const {
    for (int i = d - 1; i >= 0; --i) {
      rel[i] = static_cast<int>(idx % n);
      idx /= n;
    }
  }

  IVec lattice_coords(std::int64_t idx) const {
    std::array<int, kMaxDim> rel{};
    rel_of(idx, rel.data());
    IVec out(d);
    for (int i = 0; i < d; ++i) out[i] = origin_at(i) + rel[i];
    return out;
  }

  void lattice_coords(std::int64_t idx, IVec& out) const {
    out.resize(d);
    std::array<int, kMaxDim> rel{};
    rel_of(idx, rel.data());
    for (int i = 0; i < d; ++i) out[i] = origin_at(i) + rel[i];
  }

  std::int64_t linf_distance(std::int64_t a, std::int64_t b) const {
    std::array<int, kMaxDim> ra{}, rb{};
    rel_of(a, ra.data());
    rel_of(b, rb.data());
    int m = 0;
    for (int i = 0; i < d; ++i) m = std::max(m, std::abs(ra[i] - rb[i]));
    return m;
  }

  bool operator==(const BoxSpec& o) const {
    if (d != o.d || n != o.n) return false;
    for (int i = 0; i < d; ++i)
      if (origin_at(i) != o.origin_at(i)) return false;
    return true;
  }
};

// Translation classes of vertex pairs at a common displacement.  Only
// lexicographically positive displacements are listed, so each unordered pair
// lies in exactly one class.  For delta with |delta_i| <= n-1 the class has
// prod_i (n - |delta_i|) members; the row-major rank of a member is defined
// by the position of its lex-smaller endpoint in the admissible sub-box.
struct PairClass {
  IVec delta;           // lex-positive
  std::int64_t count;   // members in the box
  double probability;   // filled by samplers
};

// All classes with 2 <= linf <= max_range inside a box of side n; order is a
// fixed function of (d, n, max_range) so streams keyed by class index are
// stable.
inline std::vector<PairClass> enumerate_pair_classes(const BoxSpec& box,
                                                     int max_range) {
  box.validate();
  const int d = box.d;
  const int span = std::min(box.n - 1, max_range);
  std::vector<PairClass> classes;
  std::array<int, kMaxDim> delta{};
  for (int i = 0; i < d; ++i) delta[i] = -span;
  for (;;) {
    IVec dv(delta.begin(), delta.begin() + d);
    if (is_lex_positive(dv) && linf_norm(dv) >= 2) {
      std::int64_t cnt = 1;
      for (int i = 0; i < d; ++i) cnt *= box.n - std::abs(delta[i]);
      classes.push_back(PairClass{dv, cnt, 0.0});
    }
    int i = d - 1;
    while (i >= 0 && delta[i] == span) {
      delta[i] = -span;
      --i;
    }
    if (i < 0) break;
    ++delta[i];
  }
  return classes;
}

// Endpoints of the rank-th member of a class: u has relative coordinates
// u_i in [max(0,-delta_i), min(n-1, n-1-delta_i)], enumerated row-major;
// v = u + delta.
inline void class_member(const BoxSpec& box, const IVec& delta,
                         std::int64_t rank, std::int64_t* u_idx,
                         std::int64_t* v_idx) {
  const int d = box.d;
  std::array<int, kMaxDim> u{}, v{};
  for (int i = d - 1; i >= 0; --i) {
    int lo = std::max(0, -delta[i]);
    int width = box.n - std::abs(delta[i]);
    u[i] = lo + static_cast<int>(rank % width);
    rank /= width;
    v[i] = u[i] + delta[i];
  }
  *u_idx = box.index_of(u.data());
  *v_idx = box.index_of(v.data());
}

}  // namespace lrp

#endif
