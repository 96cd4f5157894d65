#ifndef LRP_IO_HPP
#define LRP_IO_HPP

#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "lrp/check.hpp"
#include "lrp/config.hpp"
#include "lrp/version.hpp"

namespace lrp {

using Json = nlohmann::json;

// Shortest round-trippable decimal form; locale-independent.
inline std::string format_number(double x) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.12g", x);
  return buf;
}

inline std::string format_number(std::int64_t x) {
  return std::to_string(x);
}

// CSV with a version comment line, then the column header, then rows.
class CsvWriter {
 public:
  explicit CsvWriter(const std::filesystem::path& path) : out_(path) {
    LRP_REQUIRE(out_.good(), "CsvWriter: cannot open output file");
    out_ << "# lrp-csv " << kFormatVersion << "\n";
  }

  void header(const std::vector<std::string>& cols) {
    LRP_CHECK(columns_ == 0, "CsvWriter: header already written");
    columns_ = cols.size();
    LRP_REQUIRE(columns_ > 0, "CsvWriter: empty header");
    write_line(cols);
  }

  void row(const std::vector<std::string>& cells) {
    LRP_CHECK(columns_ > 0, "CsvWriter: header not written");
    LRP_REQUIRE(cells.size() == columns_, "CsvWriter: column count mismatch");
    write_line(cells);
  }

 private:
  void write_line(const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) {
      LRP_REQUIRE(cells[i].find_first_of(",\n\"") == std::string::npos,
                  "CsvWriter: cell needs quoting, unsupported");
      if (i) out_ << ',';
      out_ << cells[i];
    }
    out_ << '\n';
  }

  std::ofstream out_;
  std::size_t columns_ = 0;
};

// JSON artifact with the version stamp; nlohmann objects iterate in key
// order, so serialization is deterministic.
inline void write_json_file(const std::filesystem::path& path,
                            Json payload) {
  payload["format"] = "lrp-json";
  payload["format_version"] = kFormatVersion;
  std::ofstream out(path);
  LRP_REQUIRE(out.good(), "write_json_file: cannot open output file");
  out << payload.dump(2) << '\n';
}

inline Json read_json_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  LRP_REQUIRE(in.good(), "read_json_file: cannot open input file");
  return Json::parse(in);
}

inline Json configuration_to_json(const Configuration& cfg) {
  Json j;
  j["d"] = cfg.box.d;
  j["n"] = cfg.box.n;
  j["origin"] = cfg.box.origin.empty() ? IVec(cfg.box.d, 0) : cfg.box.origin;
  j["family"] = family_name(cfg.kernel.family);
  j["beta"] = cfg.kernel.beta;
  j["seed"] = cfg.seed;
  Json edges = Json::array();
  for (const auto& e : cfg.long_edges) {
    edges.push_back(Json::array({e.first, e.second}));
  }
  j["long_edges"] = edges;
  return j;
}

inline Configuration configuration_from_json(const Json& j) {
  Configuration cfg;
  cfg.box.d = j.at("d").get<int>();
  cfg.box.n = j.at("n").get<int>();
  cfg.box.origin = j.at("origin").get<IVec>();
  cfg.kernel.d = cfg.box.d;
  cfg.kernel.family = family_from_name(j.at("family").get<std::string>());
  cfg.kernel.beta = j.at("beta").get<double>();
  cfg.seed = j.at("seed").get<std::uint64_t>();
  for (const auto& e : j.at("long_edges")) {
    cfg.long_edges.push_back(
        {e.at(0).get<std::int32_t>(), e.at(1).get<std::int32_t>()});
  }
  cfg.validate();
  return cfg;
}

struct RunManifest {
  Json config;                       // resolved experiment configuration
  std::vector<std::string> outputs;  // artifact file names, in write order
  double wall_seconds = 0.0;
  std::string status = "ok";
};

// Manifest lands via a temp file + rename so readers never observe a
// partial write.  Wall-clock lives only here; data files stay byte-stable.
inline void write_manifest_atomic(const std::filesystem::path& dir,
                                  const RunManifest& manifest) {
  Json j;
  j["config"] = manifest.config;
  j["version"] = kVersion;
  j["outputs"] = manifest.outputs;
  j["wall_seconds"] = manifest.wall_seconds;
  j["status"] = manifest.status;
  const auto tmp = dir / "run_manifest.json.tmp";
  write_json_file(tmp, j);
  std::filesystem::rename(tmp, dir / "run_manifest.json");
}

// Output directory: explicit flag, else the environment default, else cwd.
inline std::filesystem::path resolve_out_dir(const std::string& flag_value) {
  if (!flag_value.empty()) return flag_value;
  if (const char* env = std::getenv("LRP_OUT_DIR"); env && *env) return env;
  return ".";
}

}  // namespace lrp

#endif
