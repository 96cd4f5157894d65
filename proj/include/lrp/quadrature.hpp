#ifndef LRP_QUADRATURE_HPP
#define LRP_QUADRATURE_HPP

#include <array>
#include <cmath>
#include <cstddef>
#include <stdexcept>

namespace lrp {

inline constexpr int kQuadMaxDim = 4;

struct QuadBox {
  std::array<double, kQuadMaxDim> lo{};
  std::array<double, kQuadMaxDim> hi{};
  int dim = 1;

  double volume() const {
    double v = 1.0;
    for (int i = 0; i < dim; ++i) v *= hi[i] - lo[i];
    return v;
  }
};

namespace detail {

// 7-point Gauss-Legendre nodes and weights on [-1, 1]
inline constexpr std::array<double, 7> kGlNode = {
    -0.9491079123427585245261897, -0.7415311855993944398638648,
    -0.4058451513773971669066064, 0.0,
    0.4058451513773971669066064,  0.7415311855993944398638648,
    0.9491079123427585245261897};
inline constexpr std::array<double, 7> kGlWeight = {
    0.1294849661688696932706114, 0.2797053914892766679014678,
    0.3818300505051189449503698, 0.4179591836734693877551020,
    0.3818300505051189449503698, 0.2797053914892766679014678,
    0.1294849661688696932706114};

// tensor-product Gauss-Legendre over the box
template <class F>
double gl_value(const F& f, const QuadBox& b) {
  const int d = b.dim;
  std::array<double, kQuadMaxDim> mid{}, half{};
  for (int i = 0; i < d; ++i) {
    mid[i] = 0.5 * (b.lo[i] + b.hi[i]);
    half[i] = 0.5 * (b.hi[i] - b.lo[i]);
  }
  std::array<int, kQuadMaxDim> ix{};
  std::array<double, kQuadMaxDim> x{};
  double sum = 0.0;
  for (;;) {
    double w = 1.0;
    for (int i = 0; i < d; ++i) {
      x[i] = mid[i] + half[i] * kGlNode[ix[i]];
      w *= kGlWeight[ix[i]] * half[i];
    }
    sum += w * f(x.data());
    int i = d - 1;
    while (i >= 0 && ix[i] == 6) ix[i--] = 0;
    if (i < 0) break;
    ++ix[i];
  }
  return sum;
}

// Accept the bisected refinement once it agrees with the parent estimate
// within the local budget; the budget halves per child so acceptances sum to
// the global tolerance.
template <class F>
double adapt(const F& f, const QuadBox& b, double coarse, double tol,
             int depth) {
  const int children = 1 << b.dim;
  std::array<QuadBox, (1 << kQuadMaxDim)> child{};
  std::array<double, (1 << kQuadMaxDim)> value{};
  double fine = 0.0;
  for (int c = 0; c < children; ++c) {
    QuadBox cb;
    cb.dim = b.dim;
    for (int i = 0; i < b.dim; ++i) {
      double mid = 0.5 * (b.lo[i] + b.hi[i]);
      if (c & (1 << i)) {
        cb.lo[i] = mid;
        cb.hi[i] = b.hi[i];
      } else {
        cb.lo[i] = b.lo[i];
        cb.hi[i] = mid;
      }
    }
    child[c] = cb;
    value[c] = gl_value(f, cb);
    fine += value[c];
  }
  if (std::fabs(fine - coarse) <= tol || depth <= 0) return fine;
  double sum = 0.0;
  double child_tol = tol / children;
  for (int c = 0; c < children; ++c) {
    sum += adapt(f, child[c], value[c], child_tol, depth - 1);
  }
  return sum;
}

}  // namespace detail

// Adaptive tensor Gauss-Legendre over an axis-aligned box; rel_tol is taken
// against the first whole-box estimate.  The integrand must be finite on the
// closed box.
template <class F>
double integrate_box(const F& f, const QuadBox& box, double rel_tol = 1e-10,
                     int max_depth = 48) {
  if (box.dim < 1 || box.dim > kQuadMaxDim)
    throw std::invalid_argument("integrate_box: bad dimension");
  double coarse = detail::gl_value(f, box);
  double scale = std::fabs(coarse);
  if (scale == 0.0) scale = 1.0;
  return detail::adapt(f, box, coarse, scale * rel_tol, max_depth);
}

}  // namespace lrp

#endif
