#ifndef LRP_ESTIMATORS_HPP
#define LRP_ESTIMATORS_HPP

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "lrp/check.hpp"
#include "lrp/config.hpp"
#include "lrp/graph.hpp"
#include "lrp/kernel.hpp"
#include "lrp/pool.hpp"
#include "lrp/rng.hpp"
#include "lrp/sampler.hpp"
#include "lrp/stats.hpp"

namespace lrp {

namespace detail {

inline std::int64_t scratch_distance(const LatticeGraph& g, std::int32_t u,
                                     std::int32_t v) {
  thread_local BfsScratch scratch;
  return distance(g, u, v, scratch);
}

}  // namespace detail

struct LambdaEstimate {
  int n = 0;
  double beta = 0.0;
  EstimateCI corner_e1;    // E[D(0, (n-1) e1)]
  EstimateCI corner_ones;  // E[D(0, (n-1) 1)]
  double lambda_hat = 1.0;  // max of the corner means, plus one
  double lambda_se = 0.0;   // standard error of the winning corner mean
};

// Mean box distance to the two far corners; both distances are read off the
// same replicate configuration.  lambda_hat = max(corner means) + 1 tracks
// the worst pair within a constant factor (the true maximum over pairs is
// within 6d of the e1 corner).
inline LambdaEstimate estimate_lambda(const KernelSpec& spec, int n,
                                      int replicates, std::uint64_t seed,
                                      int workers = 1) {
  spec.validate();
  LRP_REQUIRE(n >= 1, "estimate_lambda: n < 1");
  LRP_REQUIRE(replicates >= 2, "estimate_lambda: need replicates");
  BoxSpec box{spec.d, n, IVec(spec.d, 0)};
  box.validate();
  BoxSampler sampler(spec, box);
  const std::int32_t corner_e1 = [&] {
    IVec rel(spec.d, 0);
    rel[0] = n - 1;
    return box.index_of(rel);
  }();
  const std::int32_t corner_ones = box.index_of(IVec(spec.d, n - 1));

  std::vector<double> d_e1(replicates), d_ones(replicates);
  run_indexed(replicates, workers, [&](std::int64_t rep) {
    Configuration cfg = sampler.sample(derive_seed(seed, "lambda", rep));
    LatticeGraph g(cfg);
    d_e1[rep] =
        static_cast<double>(detail::scratch_distance(g, 0, corner_e1));
    d_ones[rep] =
        static_cast<double>(detail::scratch_distance(g, 0, corner_ones));
  });

  LambdaEstimate out;
  out.n = n;
  out.beta = spec.beta;
  out.corner_e1 = accumulate(d_e1, seed, "corner_e1");
  out.corner_ones = accumulate(d_ones, seed, "corner_ones");
  const bool e1_wins = out.corner_e1.mean >= out.corner_ones.mean;
  out.lambda_hat =
      (e1_wins ? out.corner_e1.mean : out.corner_ones.mean) + 1.0;
  out.lambda_se = e1_wins ? out.corner_e1.std_error
                          : out.corner_ones.std_error;
  LRP_CHECK(out.lambda_hat >= 1.0 && out.lambda_hat <= n + 1e-9,
            "estimate_lambda: lambda outside [1, n]");
  return out;
}

struct ThetaFit {
  double theta_hat = 0.0;
  double theta_se = 0.0;
  double intercept = 0.0;
  double r_squared = 0.0;
  std::vector<int> n_grid;
  std::vector<double> residuals;  // log lambda - fitted, per grid point
  double subadditive_inf = 0.0;   // min over the grid of log lambda / log n
  std::string method = "loglog_wls";
};

// Weighted log-log fit of lambda against n.  Zero standard errors (exact
// inputs) are floored at a relative 1e-12 so deterministic series reduce to
// an unweighted exact regression.
inline ThetaFit fit_theta_values(std::span<const int> n_grid,
                                 std::span<const double> lambda,
                                 std::span<const double> se) {
  LRP_REQUIRE(n_grid.size() == lambda.size() && n_grid.size() == se.size(),
              "fit_theta_values: length mismatch");
  LRP_REQUIRE(n_grid.size() >= 4, "fit_theta_values: fewer than 4 points");
  std::vector<double> xs, ys, ses;
  for (std::size_t i = 0; i < n_grid.size(); ++i) {
    LRP_REQUIRE(n_grid[i] >= 2, "fit_theta_values: n < 2");
    LRP_REQUIRE(lambda[i] > 0.0, "fit_theta_values: nonpositive lambda");
    const double floor_se = lambda[i] * 1e-12;
    const double s = std::max(se[i], floor_se);
    LRP_REQUIRE(s / lambda[i] < 0.05, "fit_theta_values: noisy grid point");
    xs.push_back(static_cast<double>(n_grid[i]));
    ys.push_back(lambda[i]);
    ses.push_back(s);
  }
  WlsFit wls = wls_loglog(xs, ys, ses);
  ThetaFit fit;
  fit.theta_hat = wls.slope;
  fit.theta_se = wls.slope_se;
  fit.intercept = wls.intercept;
  fit.r_squared = wls.r_squared;
  fit.n_grid.assign(n_grid.begin(), n_grid.end());
  fit.subadditive_inf = INFINITY;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    fit.residuals.push_back(std::log(ys[i]) -
                            (fit.intercept + fit.theta_hat * std::log(xs[i])));
    fit.subadditive_inf =
        std::min(fit.subadditive_inf, std::log(ys[i]) / std::log(xs[i]));
  }
  return fit;
}

inline ThetaFit fit_theta(std::span<const LambdaEstimate> estimates) {
  std::vector<int> n;
  std::vector<double> lambda, se;
  for (const auto& e : estimates) {
    n.push_back(e.n);
    lambda.push_back(e.lambda_hat);
    se.push_back(e.lambda_se);
  }
  return fit_theta_values(n, lambda, se);
}

struct SubmultReport {
  LambdaEstimate big;      // lambda(m n)
  LambdaEstimate left;     // lambda(m)
  LambdaEstimate right;    // lambda(n)
  double product = 0.0;    // lambda(m) lambda(n)
  double product_se = 0.0;
  double z = 0.0;          // (lambda(mn) - product) / pooled se
};

// Monte Carlo check of lambda(m n) <= lambda(m) lambda(n); the product
// standard error propagates first-order.
inline SubmultReport check_submultiplicativity(const KernelSpec& spec, int m,
                                               int n, int replicates,
                                               std::uint64_t seed,
                                               int workers = 1) {
  LRP_REQUIRE(m >= 2 && n >= 2, "check_submultiplicativity: m, n < 2");
  SubmultReport rep;
  rep.big = estimate_lambda(spec, m * n, replicates,
                            derive_seed(seed, "submult", 0), workers);
  rep.left = estimate_lambda(spec, m, replicates,
                             derive_seed(seed, "submult", 1), workers);
  rep.right = estimate_lambda(spec, n, replicates,
                              derive_seed(seed, "submult", 2), workers);
  rep.product = rep.left.lambda_hat * rep.right.lambda_hat;
  rep.product_se = std::sqrt(
      rep.left.lambda_se * rep.left.lambda_se * rep.right.lambda_hat *
          rep.right.lambda_hat +
      rep.right.lambda_se * rep.right.lambda_se * rep.left.lambda_hat *
          rep.left.lambda_hat);
  const double pooled =
      std::sqrt(rep.big.lambda_se * rep.big.lambda_se +
                rep.product_se * rep.product_se);
  rep.z = pooled > 0.0
              ? (rep.big.lambda_hat - rep.product) / pooled
              : (rep.big.lambda_hat <= rep.product ? 0.0 : INFINITY);
  return rep;
}

struct ThetaVsBetaRow {
  double beta = 0.0;
  double theta_hat = 0.0;
  double theta_se = 0.0;
  double theta_log_beta = 0.0;  // filled for beta >= 2
};

// Exponent fits across a beta grid on a shared n grid; a beta = 0 reference
// row (theta = 1 exactly) is appended last.
inline std::vector<ThetaVsBetaRow> theta_vs_beta(
    KernelFamily family, int d, std::span<const double> betas,
    std::span<const int> n_grid, int replicates, std::uint64_t seed,
    int workers = 1) {
  std::vector<ThetaVsBetaRow> rows;
  for (std::size_t bi = 0; bi < betas.size(); ++bi) {
    KernelSpec spec{d, family, betas[bi]};
    std::vector<LambdaEstimate> per_n;
    for (std::size_t ni = 0; ni < n_grid.size(); ++ni) {
      per_n.push_back(estimate_lambda(
          spec, n_grid[ni], replicates,
          derive_seed(seed, "theta", bi * n_grid.size() + ni), workers));
    }
    ThetaFit fit = fit_theta(per_n);
    ThetaVsBetaRow row;
    row.beta = betas[bi];
    row.theta_hat = fit.theta_hat;
    row.theta_se = fit.theta_se;
    if (betas[bi] >= 2.0) {
      row.theta_log_beta = fit.theta_hat * std::log(betas[bi]);
    }
    rows.push_back(row);
  }
  rows.push_back(ThetaVsBetaRow{0.0, 1.0, 0.0, 0.0});
  return rows;
}

struct TailProfile {
  int n = 0;
  double theta_hat = 0.0;
  std::vector<double> normalized;  // sorted D(0,(n-1)1) / n^theta
  double eta_hat = 0.0;            // stretched-exponential exponent fit
  int tail_count = 0;              // points used by the fit
  std::string flag;                // ok | skipped_deterministic |
                                   // insufficient_tail_mass
  double eta_sup_threshold = 0.0;        // 1/(1-theta)
  double eta_divergence_threshold = 0.0; // d/(1-theta)
  double empirical_moment = 0.0;   // mean exp((D/n^theta)^{0.4})
};

// Distribution of the normalized corner distance with a stretched
// exponential fit log(-log tail) vs log s over the top decile.
inline TailProfile tail_profile(const KernelSpec& spec, int n, int replicates,
                                double theta_hat, std::uint64_t seed,
                                int workers = 1) {
  spec.validate();
  LRP_REQUIRE(replicates >= 10000, "tail_profile: need 1e4 replicates");
  LRP_REQUIRE(theta_hat > 0.0 && theta_hat < 1.0, "tail_profile: theta");
  BoxSpec box{spec.d, n, IVec(spec.d, 0)};
  box.validate();
  BoxSampler sampler(spec, box);
  const std::int32_t corner = box.index_of(IVec(spec.d, n - 1));
  const double scale = std::pow(static_cast<double>(n), theta_hat);

  TailProfile out;
  out.n = n;
  out.theta_hat = theta_hat;
  out.eta_sup_threshold = 1.0 / (1.0 - theta_hat);
  out.eta_divergence_threshold = spec.d / (1.0 - theta_hat);
  out.normalized.resize(replicates);
  run_indexed(replicates, workers, [&](std::int64_t rep) {
    Configuration cfg = sampler.sample(derive_seed(seed, "tail", rep));
    LatticeGraph g(cfg);
    out.normalized[rep] =
        static_cast<double>(detail::scratch_distance(g, 0, corner)) / scale;
  });
  std::sort(out.normalized.begin(), out.normalized.end());
  double moment = 0.0;
  for (double x : out.normalized) moment += std::exp(std::pow(x, 0.4));
  out.empirical_moment = moment / replicates;

  if (out.normalized.front() == out.normalized.back()) {
    out.flag = "skipped_deterministic";
    return out;
  }
  // tail fit over the top decile; ties collapse to one regression point at
  // the left edge of their tail mass, and the maximum (tail = 0) is dropped
  std::vector<double> lx, ly, w;
  const std::size_t start = out.normalized.size() -
                            out.normalized.size() / 10;
  for (std::size_t i = start; i < out.normalized.size(); ++i) {
    const double s = out.normalized[i];
    const double tail =
        static_cast<double>(out.normalized.size() - i) / replicates;
    if (s <= 0.0 || tail >= 1.0 || s == out.normalized.back()) continue;
    if (i > start && out.normalized[i] == out.normalized[i - 1]) continue;
    lx.push_back(std::log(s));
    ly.push_back(std::log(-std::log(tail)));
    w.push_back(1.0);
  }
  out.tail_count = static_cast<int>(out.normalized.size() - start);
  if (out.tail_count < 100 || lx.size() < 3) {
    out.flag = "insufficient_tail_mass";
    return out;
  }
  WlsFit fit = wls_linear(lx, ly, w);
  out.eta_hat = fit.slope;
  out.flag = "ok";
  return out;
}

struct QuantileReport {
  int n = 0;
  int window_side = 0;  // 4n+1 centered at the origin
  double lambda_hat = 1.0;
  int replicates = 0;
  // direct D(0, complement of B_n(0)), raw and normalized by lambda_hat
  double q01 = 0.0, q99 = 0.0;
  double q01_normalized = 0.0, q99_normalized = 0.0;
  // indirect variant: D*(B_{n/2}(0), B_n(0)^C) with direct edges between
  // the two sets forbidden
  double q01_star = 0.0, q99_star = 0.0;
  double q01_star_normalized = 0.0, q99_star_normalized = 0.0;
};

// Quantiles of the exit distance D(0, B_n(0)^C) inside a truncated window
// of side 4n+1 (boundary truncation is the documented bias), normalized by
// an independent lambda estimate at the same (beta, n).
inline QuantileReport quantile_point_to_box(const KernelSpec& spec, int n,
                                            int replicates,
                                            std::uint64_t seed,
                                            int workers = 1) {
  spec.validate();
  LRP_REQUIRE(n >= 2, "quantile_point_to_box: n < 2");
  LRP_REQUIRE(replicates >= 1000, "quantile_point_to_box: need 1e3 reps");
  const int side = 4 * n + 1;
  BoxSpec window{spec.d, side, IVec(spec.d, -2 * n)};
  window.validate();
  BoxSampler sampler(spec, window);
  const std::int32_t center = window.index_of(IVec(spec.d, 2 * n));

  std::vector<std::int32_t> small, outer;
  IVec coords(spec.d);
  for (std::int32_t v = 0; v < window.num_vertices(); ++v) {
    window.lattice_coords(v, coords);
    const int r = linf_norm(coords);
    if (r <= n / 2) small.push_back(v);
    if (r > n) outer.push_back(v);
  }

  std::vector<double> direct(replicates), indirect(replicates);
  run_indexed(replicates, workers, [&](std::int64_t rep) {
    Configuration cfg = sampler.sample(derive_seed(seed, "quantile", rep));
    LatticeGraph g(cfg);
    thread_local BfsScratch scratch;
    const std::int64_t d0 =
        distance_sets(g, std::vector<std::int32_t>{center}, outer, scratch);
    LRP_CHECK(d0 != kUnreachable, "quantile_point_to_box: window exit");
    direct[rep] = static_cast<double>(d0);
    const std::int64_t ds = indirect_distance(g, small, outer, scratch);
    LRP_CHECK(ds != kUnreachable,
              "quantile_point_to_box: indirect window exit");
    indirect[rep] = static_cast<double>(ds);
  });
  std::sort(direct.begin(), direct.end());
  std::sort(indirect.begin(), indirect.end());

  QuantileReport out;
  out.n = n;
  out.window_side = side;
  out.replicates = replicates;
  LambdaEstimate lam =
      estimate_lambda(spec, n, std::max(replicates, 1000), seed, workers);
  out.lambda_hat = lam.lambda_hat;
  out.q01 = quantile_nearest_rank(direct, 0.01);
  out.q99 = quantile_nearest_rank(direct, 0.99);
  out.q01_star = quantile_nearest_rank(indirect, 0.01);
  out.q99_star = quantile_nearest_rank(indirect, 0.99);
  out.q01_normalized = out.q01 / out.lambda_hat;
  out.q99_normalized = out.q99 / out.lambda_hat;
  out.q01_star_normalized = out.q01_star / out.lambda_hat;
  out.q99_star_normalized = out.q99_star / out.lambda_hat;
  return out;
}

struct MomentRatio {
  int n = 0;
  int order = 0;
  double ratio = 0.0;      // E[D^r] / E[D]^r
  double std_error = 0.0;  // delta-method standard error
  EstimateCI distance;     // first-moment estimate
};

// Normalized moment of the corner distance D(0, (n-1)1).
inline MomentRatio moment_ratio(const KernelSpec& spec, int n, int order,
                                int replicates, std::uint64_t seed,
                                int workers = 1) {
  spec.validate();
  LRP_REQUIRE(order == 2 || order == 4, "moment_ratio: order in {2, 4}");
  LRP_REQUIRE(replicates >= 10000, "moment_ratio: need 1e4 replicates");
  BoxSpec box{spec.d, n, IVec(spec.d, 0)};
  box.validate();
  BoxSampler sampler(spec, box);
  const std::int32_t corner = box.index_of(IVec(spec.d, n - 1));

  std::vector<double> xs(replicates);
  run_indexed(replicates, workers, [&](std::int64_t rep) {
    Configuration cfg = sampler.sample(derive_seed(seed, "moment", rep));
    LatticeGraph g(cfg);
    xs[rep] = static_cast<double>(detail::scratch_distance(g, 0, corner));
  });
  double s1 = 0, s2 = 0, sr = 0, s2r = 0, sr1 = 0;
  for (double x : xs) {
    const double xr = std::pow(x, order);
    s1 += x;
    s2 += x * x;
    sr += xr;
    s2r += xr * xr;
    sr1 += x * xr;
  }
  const double N = static_cast<double>(replicates);
  const double m1 = s1 / N, mr = sr / N;
  const double var_x = s2 / N - m1 * m1;
  const double var_xr = s2r / N - mr * mr;
  const double cov = sr1 / N - m1 * mr;

  MomentRatio out;
  out.n = n;
  out.order = order;
  out.distance = accumulate(xs, seed, "corner_ones");
  out.ratio = mr / std::pow(m1, order);
  out.std_error = std::sqrt(
      ratio_moment_variance(order, m1, mr, var_x, var_xr, cov, replicates));
  return out;
}

struct DiameterScaling {
  std::vector<int> n_grid;       // grid points used by the fit (n >= 2)
  std::vector<int> excluded;     // grid points dropped (n = 1)
  std::vector<EstimateCI> per_n;
  ThetaFit fit;
};

// Mean exact inner diameter per n with a log-log exponent fit; n = 1 rows
// (diameter 0) are excluded and reported.
inline DiameterScaling diameter_scaling(const KernelSpec& spec,
                                        std::span<const int> n_grid,
                                        int replicates, std::uint64_t seed,
                                        int workers = 1) {
  spec.validate();
  DiameterScaling out;
  std::vector<double> lambda, se;
  for (std::size_t ni = 0; ni < n_grid.size(); ++ni) {
    const int n = n_grid[ni];
    if (n < 2) {
      out.excluded.push_back(n);
      continue;
    }
    BoxSpec box{spec.d, n, IVec(spec.d, 0)};
    box.validate();
    LRP_REQUIRE(box.num_vertices() <= kDiameterExactCap,
                "diameter_scaling: exact-diameter cap");
    BoxSampler sampler(spec, box);
    std::vector<double> dia(replicates);
    run_indexed(replicates, workers, [&](std::int64_t rep) {
      Configuration cfg = sampler.sample(
          derive_seed(seed, "diameter", ni * 1000003ull + rep));
      LatticeGraph g(cfg);
      thread_local BfsScratch scratch;
      dia[rep] = static_cast<double>(diameter_exact(g, scratch).value);
    });
    out.n_grid.push_back(n);
    out.per_n.push_back(accumulate(dia, seed, "diameter"));
    lambda.push_back(out.per_n.back().mean);
    se.push_back(out.per_n.back().std_error);
  }
  out.fit = fit_theta_values(out.n_grid, lambda, se);
  return out;
}

struct KernelComparison {
  int n = 0;
  int replicates = 0;
  bool identical = true;     // every replicate produced equal edge sets
  double q99_ratio = 0.0;    // 99% quantile of D_A / D_B
  double q99_inverse = 0.0;  // 99% quantile of D_B / D_A
};

// Corner-distance ratios across two kernels sharing each replicate's
// uniforms, so pointwise-ordered kernels yield nested configurations.
inline KernelComparison kernel_comparison(const KernelSpec& a,
                                          const KernelSpec& b, int n,
                                          int replicates, std::uint64_t seed,
                                          int workers = 1) {
  LRP_REQUIRE(a.d == b.d, "kernel_comparison: dimension mismatch");
  LRP_REQUIRE(a.beta == b.beta, "kernel_comparison: kernels must share beta");
  LRP_REQUIRE(replicates >= 100, "kernel_comparison: need replicates");
  BoxSpec box{a.d, n, IVec(a.d, 0)};
  box.validate();
  const std::int32_t corner = box.index_of(IVec(a.d, n - 1));

  std::vector<double> ratio(replicates), inverse(replicates);
  std::vector<std::uint8_t> same(replicates, 0);
  run_indexed(replicates, workers, [&](std::int64_t rep) {
    auto [cfg_a, cfg_b] =
        sample_coupled_kernels(a, b, box, derive_seed(seed, "compare", rep));
    same[rep] = cfg_a.long_edges == cfg_b.long_edges ? 1 : 0;
    LatticeGraph ga(cfg_a), gb(cfg_b);
    thread_local BfsScratch scratch;
    const double da = static_cast<double>(distance(ga, 0, corner, scratch));
    const double db = static_cast<double>(distance(gb, 0, corner, scratch));
    ratio[rep] = da / db;
    inverse[rep] = db / da;
  });
  KernelComparison out;
  out.n = n;
  out.replicates = replicates;
  for (std::uint8_t s : same) out.identical = out.identical && s;
  std::sort(ratio.begin(), ratio.end());
  std::sort(inverse.begin(), inverse.end());
  out.q99_ratio = quantile_nearest_rank(ratio, 0.99);
  out.q99_inverse = quantile_nearest_rank(inverse, 0.99);
  return out;
}

}  // namespace lrp

#endif
