#ifndef LRP_RNG_HPP
#define LRP_RNG_HPP

#include <cmath>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <string_view>

namespace lrp {

// splitmix64 finalizer; bijective on 64-bit words.
inline constexpr std::uint64_t mix64(std::uint64_t z) {
  z ^= z >> 30;
  z *= 0xbf58476d1ce4e5b9ULL;
  z ^= z >> 27;
  z *= 0x94d049bb133111ebULL;
  z ^= z >> 31;
  return z;
}

inline constexpr std::uint64_t kGolden = 0x9e3779b97f4a7c15ULL;

inline constexpr std::uint64_t fnv1a(std::string_view s) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (char c : s) {
    h ^= static_cast<unsigned char>(c);
    h *= 0x100000001b3ULL;
  }
  return h;
}

// Stream key for (master seed, purpose, replica).  Injective in `replica`
// for a fixed tag; distinct tags are kept collision-free by construction of
// the tag set (tested pairwise in the suite).
inline constexpr std::uint64_t derive_seed(std::uint64_t master,
                                           std::string_view purpose,
                                           std::uint64_t replica) {
  std::uint64_t k = mix64(master + kGolden) ^ fnv1a(purpose);
  return mix64(mix64(k) + replica * kGolden);
}

// Counter-based stream: value i is splitmix64 evaluated at position i of the
// sequence seeded by `key`.  Random access, no shared state.
class Rng {
 public:
  explicit Rng(std::uint64_t key) : key_(key) {}

  std::uint64_t next_u64() { return at(ctr_++); }

  // uniform on [0,1), 53-bit mantissa
  double next_unit() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
  }

  // uniform on (0,1); safe under log()
  double next_open() {
    return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53;
  }

  // uniform on {0,...,n-1}, rejection-free of modulo bias
  std::uint64_t next_below(std::uint64_t n) {
    if (n == 0) throw std::invalid_argument("next_below: n == 0");
    std::uint64_t threshold = (-n) % n;
    for (;;) {
      std::uint64_t r = next_u64();
      if (r >= threshold) return r % n;
    }
  }

  std::uint64_t at(std::uint64_t i) const { return mix64(key_ + i * kGolden); }

  std::uint64_t key() const { return key_; }
  std::uint64_t counter() const { return ctr_; }

 private:
  std::uint64_t key_;
  std::uint64_t ctr_ = 0;
};

// One uniform per integer index, stateless; used where two samplers must
// consult the same variate for the same object (coupling by shared uniforms).
inline double indexed_unit(std::uint64_t key, std::uint64_t index) {
  return static_cast<double>(mix64(key + index * kGolden) >> 11) * 0x1.0p-53;
}

// Number of closed slots to skip before the next open one when each slot is
// open independently with probability p.  Returns SIZE_MAX for p == 0.
inline std::uint64_t geometric_skip(Rng& rng, double p) {
  if (p >= 1.0) return 0;
  if (p <= 0.0) return std::numeric_limits<std::uint64_t>::max();
  double u = rng.next_open();
  double g = std::floor(std::log(u) / std::log1p(-p));
  if (g >= 9.2e18) return std::numeric_limits<std::uint64_t>::max();
  return static_cast<std::uint64_t>(g);
}

namespace detail {

// Poisson by inversion; mean must be small enough that exp(-mean) > 0.
inline std::uint64_t poisson_inversion(Rng& rng, double mean) {
  double u = rng.next_open();
  double p = std::exp(-mean);
  double cdf = p;
  std::uint64_t k = 0;
  while (u > cdf) {
    ++k;
    p *= mean / static_cast<double>(k);
    cdf += p;
    if (p < 1e-300 && u > cdf) break;  // tail exhausted within double range
  }
  return k;
}

// Hormann's PTRS transformed-rejection sampler; exact for mean >= 10.
inline std::uint64_t poisson_ptrs(Rng& rng, double mean) {
  const double slam = std::sqrt(mean);
  const double loglam = std::log(mean);
  const double b = 0.931 + 2.53 * slam;
  const double a = -0.059 + 0.02483 * b;
  const double inv_alpha = 1.1239 + 1.1328 / (b - 3.4);
  const double vr = 0.9277 - 3.6224 / (b - 2.0);
  for (;;) {
    double u = rng.next_unit() - 0.5;
    double v = rng.next_open();
    double us = 0.5 - std::fabs(u);
    double k = std::floor((2.0 * a / us + b) * u + mean + 0.43);
    if (us >= 0.07 && v <= vr) return static_cast<std::uint64_t>(k);
    if (k < 0.0 || (us < 0.013 && v > us)) continue;
    if (std::log(v) + std::log(inv_alpha) - std::log(a / (us * us) + b) <=
        k * loglam - mean - std::lgamma(k + 1.0)) {
      return static_cast<std::uint64_t>(k);
    }
  }
}

}  // namespace detail

inline std::uint64_t sample_poisson(Rng& rng, double mean) {
  if (!(mean >= 0.0)) throw std::invalid_argument("sample_poisson: mean < 0");
  if (mean == 0.0) return 0;
  if (mean < 10.0) return detail::poisson_inversion(rng, mean);
  return detail::poisson_ptrs(rng, mean);
}

}  // namespace lrp

#endif
