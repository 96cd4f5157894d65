#ifndef LRP_STATS_HPP
#define LRP_STATS_HPP

#include <cmath>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "lrp/check.hpp"

namespace lrp {

struct EstimateCI {
  double mean = 0.0;
  double std_error = 0.0;  // sample standard deviation / sqrt(replicates)
  std::int64_t replicates = 0;
  std::uint64_t master_seed = 0;
  std::string label;
};

inline EstimateCI accumulate(std::span<const double> xs,
                             std::uint64_t master_seed = 0,
                             std::string label = {}) {
  LRP_REQUIRE(xs.size() >= 2, "accumulate: need at least two values");
  double sum = 0.0;
  for (double x : xs) sum += x;
  const double mean = sum / static_cast<double>(xs.size());
  double ss = 0.0;
  for (double x : xs) ss += (x - mean) * (x - mean);
  EstimateCI out;
  out.mean = mean;
  out.replicates = static_cast<std::int64_t>(xs.size());
  out.std_error = std::sqrt(ss / (static_cast<double>(xs.size()) - 1.0) /
                            static_cast<double>(xs.size()));
  out.master_seed = master_seed;
  out.label = std::move(label);
  return out;
}

inline double z_score(const EstimateCI& est, double target) {
  if (est.std_error == 0.0) return est.mean == target ? 0.0 : INFINITY;
  return (est.mean - target) / est.std_error;
}

struct WlsFit {
  double slope = 0.0;
  double intercept = 0.0;
  double slope_se = 0.0;
  double r_squared = 0.0;
};

// Weighted least squares on given coordinates; weights are inverse
// variances of y.
inline WlsFit wls_linear(std::span<const double> x, std::span<const double> y,
                         std::span<const double> w) {
  LRP_REQUIRE(x.size() == y.size() && x.size() == w.size(),
              "wls_linear: length mismatch");
  LRP_REQUIRE(x.size() >= 3, "wls_linear: need at least three points");
  double sw = 0, swx = 0, swy = 0, swxx = 0, swxy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    LRP_REQUIRE(w[i] > 0.0, "wls_linear: nonpositive weight");
    sw += w[i];
    swx += w[i] * x[i];
    swy += w[i] * y[i];
    swxx += w[i] * x[i] * x[i];
    swxy += w[i] * x[i] * y[i];
  }
  const double det = sw * swxx - swx * swx;
  LRP_REQUIRE(det > 0.0, "wls_linear: degenerate abscissae");
  WlsFit fit;
  fit.slope = (sw * swxy - swx * swy) / det;
  fit.intercept = (swxx * swy - swx * swxy) / det;
  fit.slope_se = std::sqrt(sw / det);
  double ss_res = 0, ss_tot = 0;
  const double ybar = swy / sw;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double fitted = fit.intercept + fit.slope * x[i];
    ss_res += w[i] * (y[i] - fitted) * (y[i] - fitted);
    ss_tot += w[i] * (y[i] - ybar) * (y[i] - ybar);
  }
  fit.r_squared = ss_tot > 0.0 ? 1.0 - ss_res / ss_tot : 1.0;
  return fit;
}

// Log-log fit of noisy positive means: y_i +- se_i maps to log y_i with
// sigma = se_i / y_i by the delta method.
inline WlsFit wls_loglog(std::span<const double> x, std::span<const double> y,
                         std::span<const double> se) {
  LRP_REQUIRE(x.size() == y.size() && x.size() == se.size(),
              "wls_loglog: length mismatch");
  std::vector<double> lx(x.size()), ly(x.size()), w(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    LRP_REQUIRE(x[i] > 0.0 && y[i] > 0.0, "wls_loglog: nonpositive data");
    LRP_REQUIRE(se[i] > 0.0, "wls_loglog: nonpositive standard error");
    lx[i] = std::log(x[i]);
    ly[i] = std::log(y[i]);
    const double sigma_log = se[i] / y[i];
    w[i] = 1.0 / (sigma_log * sigma_log);
  }
  return wls_linear(lx, ly, w);
}

// Nearest-rank quantile on a pre-sorted sample: element at ceil(p n), 1-based.
inline double quantile_nearest_rank(std::span<const double> sorted, double p) {
  LRP_REQUIRE(!sorted.empty(), "quantile: empty sample");
  LRP_REQUIRE(p > 0.0 && p <= 1.0, "quantile: p outside (0, 1]");
  const double n = static_cast<double>(sorted.size());
  std::size_t rank = static_cast<std::size_t>(std::ceil(p * n));
  if (rank == 0) rank = 1;
  if (rank > sorted.size()) rank = sorted.size();
  return sorted[rank - 1];
}

// Variance of the plug-in ratio m_r / m_1^r by the delta method, where m_1
// and m_r are the sample means of x and x^r over n replicates.
inline double ratio_moment_variance(int r, double m1, double mr, double var_x,
                                    double var_xr, double cov_x_xr,
                                    std::int64_t n) {
  LRP_REQUIRE(r >= 2, "ratio_moment_variance: order");
  LRP_REQUIRE(m1 > 0.0, "ratio_moment_variance: nonpositive first moment");
  LRP_REQUIRE(n >= 2, "ratio_moment_variance: need replicates");
  const double m1r = std::pow(m1, r);
  const double g1 = -r * mr / (m1r * m1);  // d/dm1
  const double gr = 1.0 / m1r;             // d/dmr
  const double v = g1 * g1 * var_x + gr * gr * var_xr +
                   2.0 * g1 * gr * cov_x_xr;
  return std::max(v, 0.0) / static_cast<double>(n);
}

namespace detail {

// Regularized incomplete gamma Q(a, x) by series (x < a + 1) or continued
// fraction, the standard pair of expansions.
inline double gamma_q(double a, double x) {
  LRP_REQUIRE(a > 0.0 && x >= 0.0, "gamma_q: domain");
  if (x == 0.0) return 1.0;
  const double lg = std::lgamma(a);
  if (x < a + 1.0) {
    double ap = a, sum = 1.0 / a, del = sum;
    for (int i = 0; i < 500; ++i) {
      ap += 1.0;
      del *= x / ap;
      sum += del;
      if (std::fabs(del) < std::fabs(sum) * 1e-15) break;
    }
    return 1.0 - sum * std::exp(-x + a * std::log(x) - lg);
  }
  double b = x + 1.0 - a, c = 1e300, d = 1.0 / b, h = d;
  for (int i = 1; i < 500; ++i) {
    const double an = -i * (i - a);
    b += 2.0;
    d = an * d + b;
    if (std::fabs(d) < 1e-30) d = 1e-30;
    c = b + an / c;
    if (std::fabs(c) < 1e-30) c = 1e-30;
    d = 1.0 / d;
    const double del = d * c;
    h *= del;
    if (std::fabs(del - 1.0) < 1e-15) break;
  }
  return std::exp(-x + a * std::log(x) - lg) * h;
}

}  // namespace detail

// P(X >= x) for X chi-square with k degrees of freedom.
inline double chi_square_survival(double x, int k) {
  LRP_REQUIRE(k >= 1, "chi_square_survival: degrees of freedom");
  if (x <= 0.0) return 1.0;
  return detail::gamma_q(0.5 * k, 0.5 * x);
}

}  // namespace lrp

#endif
