#ifndef LRP_KERNEL_HPP
#define LRP_KERNEL_HPP

#include <cmath>
#include <cstdint>
#include <limits>
#include <mutex>
#include <shared_mutex>
#include <string>
#include <unordered_map>

#include "lrp/check.hpp"
#include "lrp/geometry.hpp"
#include "lrp/quadrature.hpp"

namespace lrp {

enum class KernelFamily { ExactCube, TruncatedPower, ExponentialPower };

inline const char* family_name(KernelFamily f) {
  switch (f) {
    case KernelFamily::ExactCube: return "exact-cube";
    case KernelFamily::TruncatedPower: return "truncated-power";
    case KernelFamily::ExponentialPower: return "exponential-power";
  }
  return "?";
}

inline KernelFamily family_from_name(const std::string& s) {
  if (s == "exact-cube") return KernelFamily::ExactCube;
  if (s == "truncated-power") return KernelFamily::TruncatedPower;
  if (s == "exponential-power") return KernelFamily::ExponentialPower;
  throw std::invalid_argument("unknown kernel family: " + s);
}

struct KernelSpec {
  int d = 1;
  KernelFamily family = KernelFamily::ExactCube;
  double beta = 1.0;

  void validate() const {
    LRP_REQUIRE(d >= 1 && d <= kMaxDim, "KernelSpec: bad d");
    LRP_REQUIRE(beta >= 0.0 && std::isfinite(beta), "KernelSpec: bad beta");
  }
};

namespace detail {

// cache key: dimension and canonical class packed 16 bits per component;
// components must stay below 2^16.
inline std::uint64_t class_key(int d, const IVec& canon) {
  std::uint64_t k = static_cast<std::uint64_t>(d);
  for (int c : canon) k = (k << 16) | static_cast<std::uint64_t>(c);
  return k;
}

struct InteractionCache {
  std::unordered_map<std::uint64_t, double> map;
  std::shared_mutex mtx;

  bool lookup(std::uint64_t key, double* out) {
    std::shared_lock lk(mtx);
    auto it = map.find(key);
    if (it == map.end()) return false;
    *out = it->second;
    return true;
  }

  void insert(std::uint64_t key, double value) {
    std::unique_lock lk(mtx);
    map.emplace(key, value);
  }
};

inline InteractionCache& interaction_cache() {
  static InteractionCache cache;
  return cache;
}

// integral over one sign-orthant of [-1,1]^d; the triangular weight has a
// kink at t_i = 0, so orthants are integrated separately.
inline double orthant_integral(int d, const IVec& delta, const int* sign,
                               double rel_tol) {
  QuadBox box;
  box.dim = d;
  for (int i = 0; i < d; ++i) {
    box.lo[i] = sign[i] > 0 ? 0.0 : -1.0;
    box.hi[i] = sign[i] > 0 ? 1.0 : 0.0;
  }
  auto f = [&](const double* t) {
    double w = 1.0;
    double r2 = 0.0;
    for (int i = 0; i < d; ++i) {
      w *= 1.0 - std::fabs(t[i]);
      double x = t[i] + delta[i];
      r2 += x * x;
    }
    return w * std::pow(r2, -d);
  };
  return integrate_box(f, box, rel_tol);
}

}  // namespace detail

// Interaction of the unit cubes anchored at 0 and delta: the integral of
// ||x - y||_2^{-2d} over the two cubes, reduced to the difference variable
// with triangular weights.  +infinity when the cubes touch or coincide
// (linf <= 1); results are cached per canonical class for the process
// lifetime, concurrent readers allowed.
inline double cube_interaction(int d, const IVec& delta,
                               double rel_tol = 1e-10) {
  LRP_REQUIRE(d >= 1 && d <= kMaxDim, "cube_interaction: bad d");
  LRP_REQUIRE(static_cast<int>(delta.size()) == d,
              "cube_interaction: delta/d mismatch");
  IVec canon = canonical_class(delta);
  if (canon[d - 1] <= 1) return std::numeric_limits<double>::infinity();
  LRP_REQUIRE(canon[d - 1] < (1 << 16), "cube_interaction: delta too large");

  std::uint64_t key = detail::class_key(d, canon);
  auto& cache = detail::interaction_cache();
  double cached;
  if (cache.lookup(key, &cached)) return cached;

  double total = 0.0;
  std::array<int, kMaxDim> sign{};
  for (int mask = 0; mask < (1 << d); ++mask) {
    for (int i = 0; i < d; ++i) sign[i] = (mask & (1 << i)) ? 1 : -1;
    total += detail::orthant_integral(d, canon, sign.data(), rel_tol);
  }
  cache.insert(key, total);
  return total;
}

// Far-field expansion of cube_interaction: ||delta||^{-2d} plus the leading
// correction d(d+2)/6 * ||delta||^{-2d-2} from the second moment of the
// triangular weight; relative error O(||delta||^{-4}).
inline double cube_interaction_far(int d, double l2sq) {
  double inv = 1.0 / l2sq;
  double lead = std::pow(inv, d);
  return lead * (1.0 + static_cast<double>(d) * (d + 2) / 6.0 * inv);
}

// Probability that the pair at displacement delta is open.  1 at
// linf-distance <= 1 (nearest neighbours are always adjacent).
inline double connection_probability(const KernelSpec& spec,
                                     const IVec& delta) {
  spec.validate();
  if (linf_norm(delta) <= 1) return 1.0;
  switch (spec.family) {
    case KernelFamily::ExactCube:
      return -std::expm1(-spec.beta * cube_interaction(spec.d, delta));
    case KernelFamily::TruncatedPower:
      return std::min(spec.beta * std::pow(l2_norm_sq(delta), -spec.d), 1.0);
    case KernelFamily::ExponentialPower:
      return -std::expm1(-spec.beta * std::pow(l2_norm_sq(delta), -spec.d));
  }
  return 0.0;
}

struct ProbabilityBounds {
  double lower = 0.0;
  double value = 0.0;
  double upper = 0.0;
  bool satisfied = false;
};

// Two-sided power-law envelope: min((4d)^{-2d} beta k^{-2d}, 1/2) <= p <=
// 2^{2d} beta k^{-2d} with k the linf distance; holds for every family.
inline ProbabilityBounds check_probability_bounds(const KernelSpec& spec,
                                                  const IVec& delta) {
  spec.validate();
  LRP_REQUIRE(linf_norm(delta) >= 2, "check_probability_bounds: linf < 2");
  double k = static_cast<double>(linf_norm(delta));
  double pow_term = spec.beta * std::pow(k, -2.0 * spec.d);
  ProbabilityBounds b;
  b.lower = std::min(std::pow(4.0 * spec.d, -2.0 * spec.d) * pow_term, 0.5);
  b.upper = std::pow(2.0, 2.0 * spec.d) * pow_term;
  b.value = connection_probability(spec, delta);
  b.satisfied = b.lower <= b.value && b.value <= b.upper;
  return b;
}

// Probability that two blocks of side nblock at block displacement delta are
// joined by at least one open pair, all cell pairs independent.  For the
// exact-cube family this equals connection_probability(spec, delta) by the
// scale invariance of the interaction.
inline double block_connection_probability(const KernelSpec& spec,
                                           const IVec& delta, int nblock) {
  spec.validate();
  LRP_REQUIRE(nblock >= 1, "block_connection_probability: bad nblock");
  LRP_REQUIRE(linf_norm(delta) >= 2, "block_connection_probability: linf < 2");
  const int d = spec.d;
  double log_closed = 0.0;
  std::array<int, kMaxDim> off{};
  const int span = 2 * nblock - 1;
  const std::int64_t combos = [&] {
    std::int64_t c = 1;
    for (int i = 0; i < d; ++i) c *= span;
    return c;
  }();
  // off = a - b ranges over {-(n-1),...,n-1}^d with multiplicity
  // prod_i (n - |off_i|)
  for (std::int64_t t = 0; t < combos; ++t) {
    std::int64_t r = t;
    std::int64_t mult = 1;
    IVec cell(d);
    for (int i = d - 1; i >= 0; --i) {
      off[i] = static_cast<int>(r % span) - (nblock - 1);
      r /= span;
      mult *= nblock - std::abs(off[i]);
      cell[i] = nblock * delta[i] + off[i];
    }
    double p = connection_probability(spec, cell);
    if (p >= 1.0) return 1.0;
    log_closed += static_cast<double>(mult) * std::log1p(-p);
  }
  return -std::expm1(log_closed);
}

struct DegreeEstimate {
  double value = 0.0;      // (3^d - 1) + truncated long-range sum
  double tail_low = 0.0;   // bracket on the mass beyond the truncation
  double tail_high = 0.0;
  int truncation = 0;
};

namespace detail {

// multiplicity of the canonical class (a, r) on the linf-ring of radius r in
// dimension 2
inline int ring_class_mult(int a, int r) {
  if (a == 0 || a == r) return 4;
  return 8;
}

inline constexpr int kFarFieldCut = 64;

inline double long_range_probability_fast(const KernelSpec& spec, int d,
                                          const IVec& canon, int ring) {
  if (ring <= kFarFieldCut)
    return connection_probability(spec, canon);
  switch (spec.family) {
    case KernelFamily::ExactCube:
      return -std::expm1(-spec.beta *
                         cube_interaction_far(d, l2_norm_sq(canon)));
    case KernelFamily::TruncatedPower:
      return std::min(spec.beta * std::pow(l2_norm_sq(canon), -d), 1.0);
    case KernelFamily::ExponentialPower:
      return -std::expm1(-spec.beta * std::pow(l2_norm_sq(canon), -d));
  }
  return 0.0;
}

}  // namespace detail

// Expected degree of a vertex of the infinite lattice: 3^d - 1 always-open
// neighbours plus the long-range sum truncated at linf radius R, with a
// bracket on the discarded tail.  The exact-cube sum switches to the
// far-field expansion beyond radius 64 (relative error < 3e-7 there, far
// below the tail bracket).  Aborts if the total could exceed the a-priori
// bound ceil(beta) * 3^(5d).
inline DegreeEstimate expected_degree(const KernelSpec& spec, int radius) {
  spec.validate();
  LRP_REQUIRE(radius >= 2, "expected_degree: radius < 2");
  LRP_REQUIRE(spec.d <= 2, "expected_degree: d > 2 not supported");
  DegreeEstimate est;
  est.truncation = radius;
  double nn = std::pow(3.0, spec.d) - 1.0;
  double sum = 0.0;
  if (spec.d == 1) {
    IVec delta(1);
    for (int k = 2; k <= radius; ++k) {
      delta[0] = k;
      sum += 2.0 * detail::long_range_probability_fast(spec, 1, delta, k);
    }
  } else {
    IVec canon(2);
    for (int r = 2; r <= radius; ++r) {
      canon[1] = r;
      double ring = 0.0;
      for (int a = 0; a <= r; ++a) {
        canon[0] = a;
        ring += detail::ring_class_mult(a, r) *
                detail::long_range_probability_fast(spec, 2, canon, r);
      }
      sum += ring;
    }
  }
  est.value = nn + sum;
  est.tail_low = 0.0;
  est.tail_high = spec.beta * std::pow(50.0, spec.d) *
                  std::pow(static_cast<double>(radius) + 1.0, -spec.d);
  LRP_CHECK(est.value + est.tail_high <=
                std::ceil(std::max(spec.beta, 1.0)) * std::pow(3.0, 5 * spec.d),
            "expected_degree: exceeds a-priori degree bound");
  return est;
}

// Difference between the exact-cube and truncated-power probabilities at a
// common beta, scaled by ||delta||_2^(2d+1); bounded uniformly along rays,
// which pins the shared large-distance asymptotics.
inline double kernel_gap(int d, double beta, const IVec& delta) {
  LRP_REQUIRE(linf_norm(delta) >= 2, "kernel_gap: linf < 2");
  KernelSpec exact{d, KernelFamily::ExactCube, beta};
  KernelSpec trunc{d, KernelFamily::TruncatedPower, beta};
  double gap = std::fabs(connection_probability(exact, delta) -
                         connection_probability(trunc, delta));
  return gap * std::pow(l2_norm_sq(delta), (2.0 * d + 1.0) / 2.0);
}

}  // namespace lrp

#endif
