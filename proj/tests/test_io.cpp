#include <catch2/catch_amalgamated.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "lrp/io.hpp"
#include "lrp/sampler.hpp"

using namespace lrp;
namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

struct TempDir {
  fs::path path;
  TempDir() {
    path = fs::temp_directory_path() /
           ("lrp-io-" + std::to_string(::getpid()) + "-" +
            std::to_string(counter++));
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
  static inline int counter = 0;
};

}  // namespace

TEST_CASE("csv files carry a version line and aligned columns") {
  TempDir dir;
  const fs::path file = dir.path / "table.csv";
  {
    CsvWriter csv(file);
    csv.header({"n", "mean", "stderr"});
    csv.row({"8", format_number(3.25), format_number(0.5)});
    csv.row({"16", format_number(1.0 / 3.0), "0"});
  }
  const std::string text = slurp(file);
  REQUIRE(text.rfind("# lrp-csv 1\n", 0) == 0);
  REQUIRE(text.find("n,mean,stderr\n") != std::string::npos);
  REQUIRE(text.find("8,3.25,0.5\n") != std::string::npos);
  REQUIRE(text.find("0.333333333333") != std::string::npos);
}

TEST_CASE("csv rejects ragged rows") {
  TempDir dir;
  CsvWriter csv(dir.path / "bad.csv");
  csv.header({"a", "b"});
  REQUIRE_THROWS_AS(csv.row({"1"}), std::invalid_argument);
}

TEST_CASE("number formatting is stable and round-trippable") {
  REQUIRE(format_number(1.0) == "1");
  REQUIRE(format_number(0.5) == "0.5");
  REQUIRE(format_number(static_cast<std::int64_t>(-7)) == "-7");
  const double x = 3.141592653589793;
  REQUIRE(std::stod(format_number(x)) == Catch::Approx(x).epsilon(1e-12));
}

TEST_CASE("configurations survive a json round trip") {
  KernelSpec spec{2, KernelFamily::ExponentialPower, 2.5};
  Configuration cfg = sample_box(spec, BoxSpec{2, 6, {-3, -3}}, 77);
  cfg.seed = 77;
  Json j = configuration_to_json(cfg);
  Configuration back = configuration_from_json(j);
  REQUIRE(back.box == cfg.box);
  REQUIRE(back.kernel.family == cfg.kernel.family);
  REQUIRE(back.kernel.beta == cfg.kernel.beta);
  REQUIRE(back.seed == cfg.seed);
  REQUIRE(back.long_edges == cfg.long_edges);
}

TEST_CASE("json files are deterministic and versioned") {
  TempDir dir;
  Json j;
  j["zeta"] = 1;
  j["alpha"] = Json::array({1, 2, 3});
  write_json_file(dir.path / "a.json", j);
  write_json_file(dir.path / "b.json", j);
  const std::string a = slurp(dir.path / "a.json");
  REQUIRE(a == slurp(dir.path / "b.json"));
  // keys serialize sorted, version stamp present
  REQUIRE(a.find("\"alpha\"") < a.find("\"format\""));
  REQUIRE(a.find("\"format\"") < a.find("\"zeta\""));
  REQUIRE(read_json_file(dir.path / "a.json")["format_version"] == 1);
}

TEST_CASE("manifest lands atomically with status and outputs") {
  TempDir dir;
  RunManifest manifest;
  manifest.config = Json{{"experiment", "lambda"}, {"n", 8}};
  manifest.outputs = {"lambda.csv"};
  manifest.wall_seconds = 0.25;
  write_manifest_atomic(dir.path, manifest);
  REQUIRE_FALSE(fs::exists(dir.path / "run_manifest.json.tmp"));
  Json j = read_json_file(dir.path / "run_manifest.json");
  REQUIRE(j["status"] == "ok");
  REQUIRE(j["outputs"][0] == "lambda.csv");
  REQUIRE(j["config"]["n"] == 8);
  REQUIRE(j["version"] == kVersion);
}

TEST_CASE("output directory resolution prefers the explicit flag") {
  REQUIRE(resolve_out_dir("/tmp/explicit") == fs::path("/tmp/explicit"));
  ::setenv("LRP_OUT_DIR", "/tmp/from-env", 1);
  REQUIRE(resolve_out_dir("") == fs::path("/tmp/from-env"));
  ::unsetenv("LRP_OUT_DIR");
  REQUIRE(resolve_out_dir("") == fs::path("."));
}
