// lrp: command line laboratory for long-range percolation experiments.
//
// Every subcommand reads one declarative JSON configuration (unknown keys
// rejected), echoes the resolved configuration into the output directory,
// writes versioned CSV or JSON tables whose rows carry full provenance, and
// finishes with an atomically written run manifest.  All randomness flows
// through tagged streams off the master seed, so identical (config, seed)
// runs produce byte-identical data files regardless of worker count.

#include <chrono>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <set>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "lrp/acceptance.hpp"
#include "lrp/cloud.hpp"
#include "lrp/estimators.hpp"
#include "lrp/graph.hpp"
#include "lrp/io.hpp"
#include "lrp/kernel.hpp"
#include "lrp/oracle.hpp"
#include "lrp/pool.hpp"
#include "lrp/rng.hpp"
#include "lrp/sampler.hpp"
#include "lrp/stats.hpp"
#include "lrp/structure.hpp"
#include "lrp/version.hpp"

namespace fs = std::filesystem;
using lrp::Json;

namespace {

constexpr std::uint64_t kDefaultSeed = 424242;

struct CliFlags {
  std::string config;
  std::uint64_t seed = kDefaultSeed;
  int workers = 1;
  std::string out;
  std::string format = "csv";
  bool seed_given = false;
  bool workers_given = false;
  bool out_given = false;
  bool format_given = false;
};

struct Caps {
  std::int64_t diameter_exact = 100000;
  int enumeration = 22;
  double memory_gib = 4.0;
};

// Fully resolved experiment configuration; to_json() is the echoed record.
struct Resolved {
  std::string experiment;
  int d = 1;
  lrp::KernelFamily family = lrp::KernelFamily::ExactCube;
  double beta = 1.0;
  std::vector<double> betas;
  int n = 16;
  std::vector<int> n_grid;
  int replicates = 1000;
  std::uint64_t seed = kDefaultSeed;
  int workers = 1;
  fs::path out_dir;
  std::string format = "csv";
  Caps caps;
  Json extras = Json::object();

  lrp::KernelSpec spec() const { return lrp::KernelSpec{d, family, beta}; }

  lrp::BoxSpec box() const { return lrp::BoxSpec{d, n, lrp::IVec(d, 0)}; }

  Json to_json() const {
    Json j;
    j["experiment"] = experiment;
    j["d"] = d;
    j["family"] = lrp::family_name(family);
    j["beta"] = beta;
    if (!betas.empty()) j["betas"] = betas;
    j["n"] = n;
    if (!n_grid.empty()) j["n_grid"] = n_grid;
    j["replicates"] = replicates;
    j["seed"] = seed;
    j["workers"] = workers;
    j["out_dir"] = out_dir.string();
    j["format"] = format;
    j["caps"] = Json{{"diameter_exact", caps.diameter_exact},
                     {"enumeration", caps.enumeration},
                     {"memory_gib", caps.memory_gib}};
    for (const auto& [k, v] : extras.items()) j[k] = v;
    return j;
  }
};

template <class T>
T take(const Json& cfg, const std::string& key, T fallback) {
  if (!cfg.contains(key)) return fallback;
  try {
    return cfg.at(key).get<T>();
  } catch (const Json::exception&) {
    throw std::invalid_argument("config: key '" + key + "' has the wrong type");
  }
}

Json load_config(const std::string& path) {
  if (path.empty()) return Json::object();
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("config: cannot open " + path);
  Json j = Json::parse(in, nullptr, true, true);  // allow comments
  if (!j.is_object()) throw std::invalid_argument("config: not an object");
  return j;
}

// Per-command extra keys on top of the shared schema.
std::set<std::string> extra_keys(const std::string& cmd) {
  if (cmd == "submult") return {"m"};
  if (cmd == "tail") return {"theta"};
  if (cmd == "compare-kernels") return {"family_b"};
  if (cmd == "coupling-check") return {"scales", "min_separation"};
  if (cmd == "consets") return {"k_max"};
  if (cmd == "sphere") return {"k_grid", "window"};
  return {};
}

Resolved resolve(const std::string& cmd, const CliFlags& fl) {
  Json cfg = load_config(fl.config);
  std::set<std::string> allowed = {"experiment", "d",       "family",
                                   "beta",       "betas",   "n",
                                   "n_grid",     "replicates", "seed",
                                   "workers",    "out_dir", "format",
                                   "caps"};
  allowed.merge(extra_keys(cmd));
  for (const auto& [key, value] : cfg.items()) {
    if (!allowed.count(key))
      throw std::invalid_argument("config: unknown key '" + key + "'");
  }
  if (cfg.contains("experiment") &&
      cfg.at("experiment").get<std::string>() != cmd) {
    throw std::invalid_argument("config: experiment '" +
                                cfg.at("experiment").get<std::string>() +
                                "' does not match subcommand '" + cmd + "'");
  }

  Resolved r;
  r.experiment = cmd;
  r.d = take<int>(cfg, "d", 1);
  r.family = lrp::family_from_name(
      take<std::string>(cfg, "family", "exact-cube"));
  r.beta = take<double>(cfg, "beta", 1.0);
  r.betas = take<std::vector<double>>(cfg, "betas", {});
  r.n = take<int>(cfg, "n", 16);
  r.n_grid = take<std::vector<int>>(cfg, "n_grid", {});
  r.replicates = take<int>(cfg, "replicates", 1000);
  r.seed = take<std::uint64_t>(cfg, "seed", kDefaultSeed);
  r.workers = take<int>(cfg, "workers", 1);
  r.format = take<std::string>(cfg, "format", "csv");
  if (cfg.contains("caps")) {
    const Json& caps = cfg.at("caps");
    for (const auto& [key, value] : caps.items()) {
      if (key != "diameter_exact" && key != "enumeration" &&
          key != "memory_gib")
        throw std::invalid_argument("config: unknown caps key '" + key + "'");
    }
    r.caps.diameter_exact =
        take<std::int64_t>(caps, "diameter_exact", r.caps.diameter_exact);
    r.caps.enumeration = take<int>(caps, "enumeration", r.caps.enumeration);
    r.caps.memory_gib = take<double>(caps, "memory_gib", r.caps.memory_gib);
  }

  // Command line flags override the file.
  if (fl.seed_given) r.seed = fl.seed;
  if (fl.workers_given) r.workers = fl.workers;
  if (fl.format_given) r.format = fl.format;
  std::string out_request = take<std::string>(cfg, "out_dir", "");
  if (fl.out_given) out_request = fl.out;
  r.out_dir = lrp::resolve_out_dir(out_request);

  if (r.format != "csv" && r.format != "json")
    throw std::invalid_argument("config: format must be csv or json");
  if (r.workers < 1 || r.workers > 64)
    throw std::invalid_argument("config: workers outside [1, 64]");
  if (r.replicates < 1) throw std::invalid_argument("config: replicates < 1");
  r.spec().validate();

  // Defaults that depend on other fields.
  if (r.n_grid.empty()) {
    if (cmd == "theta")
      r.n_grid = r.d == 1 ? std::vector<int>{8, 16, 32, 64, 128, 256, 512}
                          : std::vector<int>{4, 8, 16, 32, 64};
    if (cmd == "theta-vs-beta")
      r.n_grid = r.d == 1 ? std::vector<int>{8, 16, 32, 64, 128}
                          : std::vector<int>{4, 8, 16, 32};
    if (cmd == "diameter") r.n_grid = {4, 8, 16, 32, 64};
  }
  if (r.betas.empty() && cmd == "theta-vs-beta") r.betas = {1.0, 2.0, 4.0, 8.0};

  // Experiment-specific extras, resolved with their defaults.
  const Json& e = cfg;
  if (cmd == "submult") r.extras["m"] = take<int>(e, "m", 4);
  if (cmd == "tail" && e.contains("theta"))
    r.extras["theta"] = take<double>(e, "theta", 0.5);
  if (cmd == "compare-kernels")
    r.extras["family_b"] =
        take<std::string>(e, "family_b", "truncated-power");
  if (cmd == "coupling-check") {
    std::vector<int> scales = take<std::vector<int>>(
        e, "scales", r.d == 1 ? std::vector<int>{8, 16} : std::vector<int>{4, 8});
    if (scales.empty()) throw std::invalid_argument("config: empty scales");
    int top = *std::max_element(scales.begin(), scales.end());
    r.extras["scales"] = scales;
    r.extras["min_separation"] =
        take<double>(e, "min_separation", 1.0 / top);
  }
  if (cmd == "consets") r.extras["k_max"] = take<int>(e, "k_max", 5);
  if (cmd == "sphere") {
    r.extras["k_grid"] = take<std::vector<int>>(
        e, "k_grid",
        r.d == 1 ? std::vector<int>{2, 5, 10} : std::vector<int>{2, 4, 8});
    r.extras["window"] = take<int>(e, "window", r.d == 1 ? 4000 : 40);
  }
  return r;
}

// ---------------------------------------------------------------------------
// Table persistence: one header line of versioning, provenance columns on
// every row, CSV or JSON per the resolved format.

struct Table {
  std::vector<std::string> columns;
  std::vector<std::vector<Json>> rows;
};

std::string cell_text(const Json& cell) {
  if (cell.is_string()) return cell.get<std::string>();
  if (cell.is_boolean()) return cell.get<bool>() ? "true" : "false";
  if (cell.is_number_unsigned())
    return std::to_string(cell.get<std::uint64_t>());
  if (cell.is_number_integer())
    return lrp::format_number(cell.get<std::int64_t>());
  return lrp::format_number(cell.get<double>());
}

std::string write_table(const Resolved& r, const std::string& name,
                        const Table& t) {
  if (r.format == "csv") {
    lrp::CsvWriter csv(r.out_dir / (name + ".csv"));
    csv.header(t.columns);
    std::vector<std::string> cells;
    for (const auto& row : t.rows) {
      cells.clear();
      for (const auto& c : row) cells.push_back(cell_text(c));
      csv.row(cells);
    }
    return name + ".csv";
  }
  Json rows = Json::array();
  for (const auto& row : t.rows) {
    Json obj;
    for (std::size_t i = 0; i < t.columns.size(); ++i) obj[t.columns[i]] = row[i];
    rows.push_back(obj);
  }
  lrp::write_json_file(r.out_dir / (name + ".json"),
                       Json{{"table", name}, {"rows", rows}});
  return name + ".json";
}

std::vector<std::string> provenance_columns() {
  return {"d", "family", "beta", "n", "seed"};
}

std::vector<Json> provenance_row(const Resolved& r, int n, double beta) {
  return {r.d, lrp::family_name(r.family), beta, n, r.seed};
}

std::vector<Json> provenance_row(const Resolved& r, int n) {
  return provenance_row(r, n, r.beta);
}

void append(std::vector<Json>& row, std::initializer_list<Json> cells) {
  row.insert(row.end(), cells);
}

// ---------------------------------------------------------------------------
// Subcommand bodies.  Each returns the list of files written (beyond the
// resolved-config echo) and may print a short human summary to stdout.

std::vector<std::string> run_sample(const Resolved& r) {
  lrp::Configuration cfg = lrp::sample_box(r.spec(), r.box(), r.seed);
  lrp::write_json_file(r.out_dir / "sample.json",
                       lrp::configuration_to_json(cfg));
  std::vector<std::string> files = {"sample.json"};
  if (r.format == "csv") {
    Table t;
    t.columns = provenance_columns();
    t.columns.insert(t.columns.end(), {"u", "v"});
    for (const auto& edge : cfg.long_edges) {
      auto row = provenance_row(r, r.n);
      append(row, {edge.first, edge.second});
      t.rows.push_back(row);
    }
    files.push_back(write_table(r, "sample_edges", t));
  }
  std::cout << "sampled " << cfg.box.num_vertices() << " vertices, "
            << cfg.long_edges.size() << " long edges\n";
  return files;
}

std::vector<std::string> run_distance(const Resolved& r) {
  const lrp::BoxSpec box = r.box();
  const auto corner_e1 = [&] {
    lrp::IVec rel(r.d, 0);
    rel[0] = r.n - 1;
    return static_cast<std::int32_t>(box.index_of(rel));
  }();
  const auto corner_ones =
      static_cast<std::int32_t>(box.num_vertices() - 1);
  std::vector<std::array<std::int64_t, 2>> dist(
      static_cast<std::size_t>(r.replicates));
  lrp::run_indexed(r.replicates, r.workers, [&](int rep) {
    lrp::Configuration cfg = lrp::sample_box(
        r.spec(), box,
        lrp::derive_seed(r.seed, "distance", static_cast<std::uint64_t>(rep)));
    lrp::LatticeGraph g(cfg);
    dist[static_cast<std::size_t>(rep)] = {
        lrp::detail::scratch_distance(g, 0, corner_e1),
        lrp::detail::scratch_distance(g, 0, corner_ones)};
  });
  Table t;
  t.columns = provenance_columns();
  t.columns.insert(t.columns.end(),
                   {"replicate", "distance_e1", "distance_ones"});
  double sum = 0.0;
  for (int rep = 0; rep < r.replicates; ++rep) {
    auto row = provenance_row(r, r.n);
    append(row, {rep, dist[static_cast<std::size_t>(rep)][0],
                 dist[static_cast<std::size_t>(rep)][1]});
    t.rows.push_back(row);
    sum += static_cast<double>(dist[static_cast<std::size_t>(rep)][1]);
  }
  std::vector<std::string> files = {write_table(r, "distance", t)};
  std::cout << "mean corner distance " << sum / r.replicates << " over "
            << r.replicates << " replicates\n";
  return files;
}

std::vector<std::string> run_lambda(const Resolved& r) {
  lrp::LambdaEstimate est =
      lrp::estimate_lambda(r.spec(), r.n, r.replicates, r.seed, r.workers);
  Table t;
  t.columns = provenance_columns();
  t.columns.insert(t.columns.end(),
                   {"replicates", "corner_e1_mean", "corner_e1_stderr",
                    "corner_ones_mean", "corner_ones_stderr", "mean", "stderr",
                    "lambda_hat"});
  auto row = provenance_row(r, r.n);
  append(row, {r.replicates, est.corner_e1.mean, est.corner_e1.std_error,
               est.corner_ones.mean, est.corner_ones.std_error,
               est.lambda_hat - 1.0, est.lambda_se, est.lambda_hat});
  t.rows.push_back(row);
  std::vector<std::string> files = {write_table(r, "lambda", t)};
  std::cout << "lambda_hat(" << r.n << ") = " << est.lambda_hat << " +- "
            << est.lambda_se << "\n";
  return files;
}

std::vector<std::string> run_theta(const Resolved& r) {
  std::vector<lrp::LambdaEstimate> ests;
  for (std::size_t ni = 0; ni < r.n_grid.size(); ++ni) {
    ests.push_back(lrp::estimate_lambda(r.spec(), r.n_grid[ni], r.replicates,
                                        lrp::derive_seed(r.seed, "theta", ni),
                                        r.workers));
  }
  lrp::ThetaFit fit = lrp::fit_theta(ests);
  Table t;
  t.columns = provenance_columns();
  t.columns.insert(t.columns.end(),
                   {"lambda_mean", "lambda_stderr", "lambda_hat", "theta_hat",
                    "theta_se", "intercept", "r_squared", "subadditive_inf"});
  for (const auto& est : ests) {
    auto row = provenance_row(r, est.n);
    append(row, {est.lambda_hat - 1.0, est.lambda_se, est.lambda_hat,
                 fit.theta_hat, fit.theta_se, fit.intercept, fit.r_squared,
                 fit.subadditive_inf});
    t.rows.push_back(row);
  }
  std::vector<std::string> files = {write_table(r, "theta", t)};
  std::cout << "theta_hat = " << fit.theta_hat << " +- " << fit.theta_se
            << " (r^2 " << fit.r_squared << ")\n";
  return files;
}

std::vector<std::string> run_submult(const Resolved& r) {
  const int m = r.extras.at("m").get<int>();
  lrp::SubmultReport rep = lrp::check_submultiplicativity(
      r.spec(), m, r.n, r.replicates, r.seed, r.workers);
  Table t;
  t.columns = provenance_columns();
  t.columns.insert(t.columns.end(),
                   {"m", "n_inner", "lambda_mn", "lambda_m", "lambda_n",
                    "product", "product_stderr", "z", "holds"});
  auto row = provenance_row(r, m * r.n);
  append(row, {m, r.n, rep.big.lambda_hat, rep.left.lambda_hat,
               rep.right.lambda_hat, rep.product, rep.product_se, rep.z,
               rep.z <= 3.0});
  t.rows.push_back(row);
  std::vector<std::string> files = {write_table(r, "submult", t)};
  std::cout << "lambda(" << m * r.n << ") = " << rep.big.lambda_hat
            << " vs product " << rep.product << " (z " << rep.z << ")\n";
  return files;
}

std::vector<std::string> run_theta_vs_beta(const Resolved& r) {
  auto rows = lrp::theta_vs_beta(r.family, r.d, r.betas, r.n_grid,
                                 r.replicates, r.seed, r.workers);
  std::string grid_text;
  for (std::size_t i = 0; i < r.n_grid.size(); ++i) {
    if (i) grid_text += "|";
    grid_text += std::to_string(r.n_grid[i]);
  }
  Table t;
  t.columns = provenance_columns();
  t.columns.insert(t.columns.end(),
                   {"theta_hat", "theta_se", "theta_log_beta", "n_grid"});
  for (const auto& row_in : rows) {
    auto row = provenance_row(r, r.n_grid.back(), row_in.beta);
    append(row, {row_in.theta_hat, row_in.theta_se, row_in.theta_log_beta,
                 grid_text});
    t.rows.push_back(row);
  }
  std::vector<std::string> files = {write_table(r, "theta_vs_beta", t)};
  std::cout << "fitted " << rows.size() - 1 << " beta points plus the beta=0 row\n";
  return files;
}

std::vector<std::string> run_tail(const Resolved& r, Resolved& echo) {
  double theta;
  if (r.extras.contains("theta")) {
    theta = r.extras.at("theta").get<double>();
  } else {
    // No exponent provided: fit one on a short dyadic grid ending at n.
    if (r.n < 16)
      throw std::invalid_argument("tail: provide theta for n < 16");
    std::vector<lrp::LambdaEstimate> ests;
    const std::vector<int> grid = {r.n / 8, r.n / 4, r.n / 2, r.n};
    for (std::size_t ni = 0; ni < grid.size(); ++ni) {
      ests.push_back(
          lrp::estimate_lambda(r.spec(), grid[ni], std::max(r.replicates / 10, 500),
                               lrp::derive_seed(r.seed, "theta", 900 + ni),
                               r.workers));
    }
    theta = lrp::fit_theta(ests).theta_hat;
    echo.extras["theta"] = theta;
  }
  lrp::TailProfile profile =
      lrp::tail_profile(r.spec(), r.n, r.replicates, theta, r.seed, r.workers);
  Table t;
  t.columns = provenance_columns();
  t.columns.insert(t.columns.end(),
                   {"theta", "eta_hat", "tail_count", "flag",
                    "eta_sup_threshold", "eta_divergence_threshold",
                    "empirical_moment"});
  auto row = provenance_row(r, r.n);
  append(row, {theta, profile.eta_hat, profile.tail_count, profile.flag,
               profile.eta_sup_threshold, profile.eta_divergence_threshold,
               profile.empirical_moment});
  t.rows.push_back(row);
  std::vector<std::string> files = {write_table(r, "tail", t)};

  Table curve;
  curve.columns = provenance_columns();
  curve.columns.insert(curve.columns.end(), {"percentile", "normalized"});
  for (int p = 1; p <= 99; ++p) {
    auto crow = provenance_row(r, r.n);
    append(crow, {p, lrp::quantile_nearest_rank(profile.normalized,
                                                static_cast<double>(p) / 100.0)});
    curve.rows.push_back(crow);
  }
  files.push_back(write_table(r, "tail_curve", curve));
  std::cout << "tail fit: eta_hat " << profile.eta_hat << " (" << profile.flag
            << ")\n";
  return files;
}

std::vector<std::string> run_quantiles(const Resolved& r) {
  lrp::QuantileReport q =
      lrp::quantile_point_to_box(r.spec(), r.n, r.replicates, r.seed, r.workers);
  Table t;
  t.columns = provenance_columns();
  t.columns.insert(t.columns.end(),
                   {"window_side", "lambda_hat", "q01", "q99",
                    "q01_normalized", "q99_normalized", "q01_star", "q99_star",
                    "q01_star_normalized", "q99_star_normalized"});
  auto row = provenance_row(r, r.n);
  append(row, {q.window_side, q.lambda_hat, q.q01, q.q99, q.q01_normalized,
               q.q99_normalized, q.q01_star, q.q99_star,
               q.q01_star_normalized, q.q99_star_normalized});
  t.rows.push_back(row);
  std::vector<std::string> files = {write_table(r, "quantiles", t)};
  std::cout << "exit distance quantiles [" << q.q01 << ", " << q.q99
            << "], lambda_hat " << q.lambda_hat << "\n";
  return files;
}

std::vector<std::string> run_diameter(const Resolved& r) {
  for (int n : r.n_grid) {
    double v = std::pow(static_cast<double>(n), r.d);
    if (v > static_cast<double>(r.caps.diameter_exact))
      throw std::invalid_argument("diameter: n exceeds the exact cap");
  }
  lrp::DiameterScaling ds = lrp::diameter_scaling(r.spec(), r.n_grid,
                                                  r.replicates, r.seed,
                                                  r.workers);
  Table t;
  t.columns = provenance_columns();
  t.columns.insert(t.columns.end(),
                   {"excluded", "diameter_mean", "diameter_stderr",
                    "theta_hat", "theta_se", "r_squared"});
  for (int n : ds.excluded) {
    auto row = provenance_row(r, n);
    append(row, {true, 0.0, 0.0, ds.fit.theta_hat, ds.fit.theta_se,
                 ds.fit.r_squared});
    t.rows.push_back(row);
  }
  for (std::size_t i = 0; i < ds.n_grid.size(); ++i) {
    auto row = provenance_row(r, ds.n_grid[i]);
    append(row, {false, ds.per_n[i].mean, ds.per_n[i].std_error,
                 ds.fit.theta_hat, ds.fit.theta_se, ds.fit.r_squared});
    t.rows.push_back(row);
  }
  std::vector<std::string> files = {write_table(r, "diameter", t)};
  std::cout << "diameter exponent " << ds.fit.theta_hat << " +- "
            << ds.fit.theta_se << "\n";
  return files;
}

std::vector<std::string> run_compare_kernels(const Resolved& r) {
  lrp::KernelSpec other{
      r.d, lrp::family_from_name(r.extras.at("family_b").get<std::string>()),
      r.beta};
  lrp::KernelComparison cmp = lrp::kernel_comparison(
      r.spec(), other, r.n, r.replicates, r.seed, r.workers);
  Table t;
  t.columns = provenance_columns();
  t.columns.insert(t.columns.end(),
                   {"family_b", "identical", "q99_ratio", "q99_inverse"});
  auto row = provenance_row(r, r.n);
  append(row, {lrp::family_name(other.family), cmp.identical, cmp.q99_ratio,
               cmp.q99_inverse});
  t.rows.push_back(row);
  std::vector<std::string> files = {write_table(r, "compare_kernels", t)};
  std::cout << (cmp.identical ? "configurations identical"
                              : "configurations differ")
            << "; q99 ratio " << cmp.q99_ratio << "\n";
  return files;
}

std::vector<std::string> run_coupling_check(const Resolved& r) {
  const auto scales = r.extras.at("scales").get<std::vector<int>>();
  const double eps = r.extras.at("min_separation").get<double>();
  struct Slot {
    std::size_t pairs = 0;
    std::vector<std::size_t> edges;
  };
  std::vector<Slot> slots(static_cast<std::size_t>(r.replicates));
  lrp::run_indexed(r.replicates, r.workers, [&](int rep) {
    lrp::PoissonCloud cloud = lrp::sample_poisson_cloud(
        r.d, r.beta, eps,
        lrp::derive_seed(r.seed, "coupling", static_cast<std::uint64_t>(rep)));
    // couple_scales asserts the 3x contraction inequality on every vertex
    // pair; a violation throws and surfaces as a nonzero exit.
    auto cfgs = lrp::couple_scales(cloud, scales, true);
    Slot& s = slots[static_cast<std::size_t>(rep)];
    s.pairs = cloud.pairs.size();
    for (const auto& cfg : cfgs) s.edges.push_back(cfg.long_edges.size());
  });
  Table t;
  t.columns = provenance_columns();
  t.columns.insert(t.columns.end(), {"replicate", "cloud_pairs", "long_edges"});
  for (int rep = 0; rep < r.replicates; ++rep) {
    const Slot& s = slots[static_cast<std::size_t>(rep)];
    for (std::size_t si = 0; si < scales.size(); ++si) {
      auto row = provenance_row(r, scales[si]);
      append(row, {rep, static_cast<std::int64_t>(s.pairs),
                   static_cast<std::int64_t>(s.edges[si])});
      t.rows.push_back(row);
    }
  }
  std::vector<std::string> files = {write_table(r, "coupling_check", t)};
  std::cout << "contraction inequality held on " << r.replicates
            << " shared clouds\n";
  return files;
}

std::vector<std::string> run_consets(const Resolved& r) {
  const int k_max = r.extras.at("k_max").get<int>();
  const lrp::BoxSpec box = r.d == 1 ? lrp::BoxSpec{1, r.n, {-(r.n / 2)}}
                                    : lrp::BoxSpec{2, r.n,
                                                   {-(r.n / 2), -(r.n / 2)}};
  lrp::IVec center_rel(r.d, r.n / 2);
  const auto root = static_cast<std::int32_t>(box.index_of(center_rel));
  const double mu = lrp::expected_degree(r.spec(), 10000).value;
  std::vector<double> sum(static_cast<std::size_t>(k_max), 0.0);
  std::vector<long> event(static_cast<std::size_t>(k_max), 0);
  for (int rep = 0; rep < r.replicates; ++rep) {
    lrp::Configuration cfg = lrp::sample_box(
        r.spec(), box,
        lrp::derive_seed(r.seed, "consets", static_cast<std::uint64_t>(rep)));
    lrp::LatticeGraph g(cfg);
    auto reports = lrp::enumerate_connected_sets(g, k_max, root);
    for (int k = 1; k <= k_max; ++k) {
      sum[static_cast<std::size_t>(k - 1)] += static_cast<double>(
          reports[static_cast<std::size_t>(k - 1)].count);
      if (reports[static_cast<std::size_t>(k - 1)].max_avg_degree >= 20.0 * mu)
        ++event[static_cast<std::size_t>(k - 1)];
    }
  }
  Table t;
  t.columns = provenance_columns();
  t.columns.insert(t.columns.end(),
                   {"k", "mean_count", "count_bound", "event_frequency",
                    "event_bound", "mu"});
  for (int k = 1; k <= k_max; ++k) {
    auto row = provenance_row(r, r.n);
    append(row, {k, sum[static_cast<std::size_t>(k - 1)] / r.replicates,
                 std::pow(4.0 * mu, k),
                 static_cast<double>(event[static_cast<std::size_t>(k - 1)]) /
                     r.replicates,
                 std::exp(-4.0 * k * mu), mu});
    t.rows.push_back(row);
  }
  std::vector<std::string> files = {write_table(r, "consets", t)};
  std::cout << "mean connected-set counts for k <= " << k_max << " written\n";
  return files;
}

std::vector<std::string> run_cutpoints(const Resolved& r) {
  if (r.d != 1)
    throw std::invalid_argument("cutpoints: one-dimensional only");
  if (r.n < 3) throw std::invalid_argument("cutpoints: n < 3");
  const int m = r.n;
  const lrp::BoxSpec box{1, m, {0}};
  std::vector<long> cut_hits(static_cast<std::size_t>(m), 0);
  for (int rep = 0; rep < r.replicates; ++rep) {
    lrp::Configuration cfg = lrp::sample_box(
        r.spec(), box,
        lrp::derive_seed(r.seed, "cutpoint", static_cast<std::uint64_t>(rep)));
    for (std::int32_t w : lrp::cut_points_d1(cfg).positions)
      ++cut_hits[static_cast<std::size_t>(w)];
  }
  Table cut;
  cut.columns = provenance_columns();
  cut.columns.insert(cut.columns.end(),
                     {"w", "frequency", "stderr", "exact"});
  for (int w = 1; w <= m - 2; ++w) {
    const double f = static_cast<double>(cut_hits[static_cast<std::size_t>(w)]) /
                     r.replicates;
    auto row = provenance_row(r, m);
    append(row, {w, f, std::sqrt(f * (1.0 - f) / r.replicates),
                 lrp::exact_cut_point_probability(r.beta, m, w)});
    cut.rows.push_back(row);
  }
  std::vector<std::string> files = {write_table(r, "cutpoints", cut)};

  lrp::SeparationEstimate sep = lrp::separation_frequency_d1(
      r.spec(), m, r.replicates, lrp::derive_seed(r.seed, "separation", 0));
  Table sept;
  sept.columns = provenance_columns();
  sept.columns.insert(sept.columns.end(),
                      {"w", "frequency", "stderr", "exact", "lower_bound"});
  for (std::size_t i = 0; i < sep.positions.size(); ++i) {
    auto row = provenance_row(r, m);
    append(row, {sep.positions[i], sep.frequency[i], sep.std_error[i],
                 sep.exact[i], sep.lower_bound});
    sept.rows.push_back(row);
  }
  files.push_back(write_table(r, "separation", sept));

  lrp::CutPointBound bound = lrp::cut_point_count_bound(r.beta, m);
  Table bt;
  bt.columns = provenance_columns();
  bt.columns.insert(bt.columns.end(), {"exact_count", "bound", "branch"});
  auto row = provenance_row(r, m);
  append(row, {bound.exact_sum, bound.bound, bound.branch});
  bt.rows.push_back(row);
  files.push_back(write_table(r, "cutpoint_bound", bt));
  std::cout << "expected cut points " << bound.exact_sum << " <= "
            << bound.bound << " (" << bound.branch << ")\n";
  return files;
}

std::vector<std::string> run_sphere(const Resolved& r) {
  const auto k_grid = r.extras.at("k_grid").get<std::vector<int>>();
  const int window = r.extras.at("window").get<int>();
  Table t;
  t.columns = provenance_columns();
  t.columns.insert(t.columns.end(),
                   {"k", "frequency", "stderr", "envelope", "truncation_bias"});
  if (r.d == 1) t.columns.push_back("exact_limit");
  for (int k : k_grid) {
    lrp::SphereEstimate est = lrp::sphere_connection_probability(
        r.spec(), k, window, r.replicates,
        lrp::derive_seed(r.seed, "sphere", static_cast<std::uint64_t>(k)));
    auto row = provenance_row(r, window);
    append(row, {k, est.frequency, est.std_error, est.envelope,
                 est.truncation_bias});
    if (r.d == 1)
      row.push_back(r.beta * (2.0 * k - 1.0) / (static_cast<double>(k) * k));
    t.rows.push_back(row);
  }
  std::vector<std::string> files = {write_table(r, "sphere", t)};
  std::cout << "sphere connection frequencies for " << k_grid.size()
            << " radii written\n";
  return files;
}

std::vector<std::string> run_oracle(const Resolved& r) {
  const lrp::BoxSpec box = r.box();
  const auto corner = static_cast<std::int32_t>(box.num_vertices() - 1);
  lrp::ExactLaw law = lrp::exact_distance_law(r.spec(), box, 0, corner);
  lrp::ExactLaw dia = lrp::exact_diameter_law(r.spec(), box);
  std::vector<std::string> files;
  if (r.format == "json") {
    Json jlaw = Json::object(), jdia = Json::object();
    for (const auto& [k, p] : law.probs) jlaw[std::to_string(k)] = p;
    for (const auto& [k, p] : dia.probs) jdia[std::to_string(k)] = p;
    Json j;
    j["d"] = r.d;
    j["family"] = lrp::family_name(r.family);
    j["beta"] = r.beta;
    j["n"] = r.n;
    j["seed"] = r.seed;
    j["law"] = jlaw;
    j["expected"] = law.mean();
    j["diameter_law"] = jdia;
    j["diameter_expected"] = dia.mean();
    lrp::write_json_file(r.out_dir / "oracle.json", j);
    files.push_back("oracle.json");
  } else {
    Table t;
    t.columns = provenance_columns();
    t.columns.insert(t.columns.end(), {"kind", "value", "probability"});
    for (const auto& [k, p] : law.probs) {
      auto row = provenance_row(r, r.n);
      append(row, {"distance", k, p});
      t.rows.push_back(row);
    }
    for (const auto& [k, p] : dia.probs) {
      auto row = provenance_row(r, r.n);
      append(row, {"diameter", k, p});
      t.rows.push_back(row);
    }
    files.push_back(write_table(r, "oracle", t));
  }
  std::cout << "exact corner law over " << law.probs.size()
            << " atoms, mean " << law.mean() << "\n";
  return files;
}

int run_verify(const Resolved& r, const std::string& self_path,
               std::vector<std::string>& files) {
  std::printf("%-4s %-30s %-6s %8s\n", "id", "criterion", "state", "seconds");
  auto results = lrp::acceptance::run_all_criteria(
      r.seed, r.workers, self_path,
      [](const lrp::acceptance::CriterionResult& c) {
        std::printf("c%02d  %-30s %-6s %8.2f\n", c.id, c.name.c_str(),
                    c.passed ? "PASS" : "FAIL", c.seconds);
        std::fflush(stdout);
      });
  int failed = 0;
  Json details = Json::array();
  Table t;
  t.columns = {"id", "name", "passed", "seed"};
  for (const auto& c : results) {
    if (!c.passed) ++failed;
    auto row = std::vector<Json>{c.id, c.name, c.passed, r.seed};
    t.rows.push_back(row);
    details.push_back(Json{{"id", c.id},
                           {"name", c.name},
                           {"passed", c.passed},
                           {"detail", c.detail}});
  }
  files.push_back(write_table(r, "verify", t));
  lrp::write_json_file(r.out_dir / "verify_detail.json",
                       Json{{"seed", r.seed}, {"criteria", details}});
  files.push_back("verify_detail.json");
  std::printf("criteria passed %d/%d\n",
              lrp::acceptance::kCriterionCount - failed,
              lrp::acceptance::kCriterionCount);
  return failed == 0 ? 0 : 1;
}

std::string self_executable(const char* argv0) {
  std::error_code ec;
  fs::path p = fs::read_symlink("/proc/self/exe", ec);
  if (!ec) return p.string();
  return fs::absolute(argv0).string();
}

struct Command {
  const char* name;
  const char* help;
};

constexpr Command kCommands[] = {
    {"sample", "draw one configuration and write it as a versioned file"},
    {"distance", "per-replicate corner distances on one box"},
    {"lambda", "mean corner distance estimate at one n"},
    {"theta", "distance exponent fit over an n grid"},
    {"submult", "lambda(mn) <= lambda(m) lambda(n) check"},
    {"theta-vs-beta", "exponent fits across a beta grid"},
    {"tail", "normalized corner-distance tail profile"},
    {"quantiles", "exit-distance quantiles with an indirect variant"},
    {"diameter", "exact box diameter scaling over an n grid"},
    {"compare-kernels", "coupled distance ratios between two kernels"},
    {"coupling-check", "one cloud at several scales; 3x contraction check"},
    {"consets", "connected-set counts through the center vertex"},
    {"cutpoints", "cut and separation point frequencies (d = 1)"},
    {"sphere", "origin-to-sphere connection frequencies"},
    {"oracle", "exact small-box distance and diameter laws"},
    {"verify", "run the full release gate and write the summary table"},
};

int dispatch(const std::string& cmd, const CliFlags& fl, const char* argv0) {
  Resolved r = resolve(cmd, fl);
  fs::create_directories(r.out_dir);
  const auto start = std::chrono::steady_clock::now();

  std::vector<std::string> files;
  int code = 0;
  Resolved echo = r;
  if (cmd == "sample") files = run_sample(r);
  else if (cmd == "distance") files = run_distance(r);
  else if (cmd == "lambda") files = run_lambda(r);
  else if (cmd == "theta") files = run_theta(r);
  else if (cmd == "submult") files = run_submult(r);
  else if (cmd == "theta-vs-beta") files = run_theta_vs_beta(r);
  else if (cmd == "tail") files = run_tail(r, echo);
  else if (cmd == "quantiles") files = run_quantiles(r);
  else if (cmd == "diameter") files = run_diameter(r);
  else if (cmd == "compare-kernels") files = run_compare_kernels(r);
  else if (cmd == "coupling-check") files = run_coupling_check(r);
  else if (cmd == "consets") files = run_consets(r);
  else if (cmd == "cutpoints") files = run_cutpoints(r);
  else if (cmd == "sphere") files = run_sphere(r);
  else if (cmd == "oracle") files = run_oracle(r);
  else if (cmd == "verify") code = run_verify(r, self_executable(argv0), files);
  else throw std::invalid_argument("unknown subcommand " + cmd);

  lrp::write_json_file(r.out_dir / "config_resolved.json", echo.to_json());
  files.push_back("config_resolved.json");

  lrp::RunManifest manifest;
  manifest.config = echo.to_json();
  manifest.outputs = files;
  manifest.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
          .count();
  manifest.status = code == 0 ? "ok" : "failed";
  lrp::write_manifest_atomic(r.out_dir, manifest);
  std::cout << "outputs in " << r.out_dir.string() << "\n";
  return code;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{std::string("lrp ") + lrp::kVersion +
               ": Monte Carlo laboratory for long-range percolation"};
  app.require_subcommand(1);
  CliFlags fl;
  std::vector<CLI::App*> subs;
  for (const Command& c : kCommands) {
    CLI::App* sub = app.add_subcommand(c.name, c.help);
    sub->add_option("--config", fl.config, "experiment configuration (json)");
    sub->add_option("--seed", fl.seed, "master seed");
    sub->add_option("--workers", fl.workers, "worker threads")
        ->check(CLI::Range(1, 64));
    sub->add_option("--out", fl.out, "output directory");
    sub->add_option("--format", fl.format, "table format")
        ->check(CLI::IsMember({"csv", "json"}));
    subs.push_back(sub);
  }
  CLI11_PARSE(app, argc, argv);
  CLI::App* active = app.get_subcommands().front();
  fl.seed_given = active->count("--seed") > 0;
  fl.workers_given = active->count("--workers") > 0;
  fl.out_given = active->count("--out") > 0;
  fl.format_given = active->count("--format") > 0;
  try {
    return dispatch(active->get_name(), fl, argv[0]);
  } catch (const std::exception& e) {
    Json err{{"error", true},
             {"command", active->get_name()},
             {"what", e.what()}};
    std::cerr << err.dump() << "\n";
    return 1;
  }
}
