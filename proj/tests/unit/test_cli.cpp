#include <doctest.h>

#include <sys/wait.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "diraclab/cli/run.hpp"
#include "diraclab/errors.hpp"

using namespace diraclab;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

json sphere_config(const std::string& experiment, int degree) {
  return json{{"schema_version", 1},
              {"experiment", experiment},
              {"manifold", {{"type", "sphere"}, {"radius", 1.0}}},
              {"connection", {{"type", "constant_curvature"}, {"degrees", {degree}}}},
              {"backend", {{"type", "sphere_spectral"}, {"l_max", "13/2"}}},
              {"solver", {{"count", 8}}}};
}

std::string read_file(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

fs::path scratch(const std::string& name) {
  const auto p = fs::temp_directory_path() / ("diraclab_test_" + name + "_" + std::to_string(::getpid()));
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

// Runs the command-line tool; returns its exit status, or -1 when the tool
// location is not provided by the test driver.
int tool(const std::string& args) {
  const char* exe = std::getenv("DIRACLAB_TOOL");
  if (!exe) return -1;
  const std::string cmd = std::string(exe) + " " + args + " >/dev/null 2>&1";
  const int rc = std::system(cmd.c_str());
  return WIFEXITED(rc) ? WEXITSTATUS(rc) : -2;
}

fs::path write_config(const fs::path& dir, const json& j) {
  const auto p = dir / "config.json";
  std::ofstream(p) << j.dump(2);
  return p;
}

}  // namespace

TEST_CASE("config parsing is strict") {
  auto j = sphere_config("spectrum", 0);
  CHECK_NOTHROW(cli::parse_config(j));
  j["manifold"]["radius_km"] = 3.0;
  CHECK_THROWS_AS(cli::parse_config(j), ConfigError);
  j = sphere_config("spectrum", 0);
  j["colour"] = "blue";
  CHECK_THROWS_AS(cli::parse_config(j), ConfigError);
  j = sphere_config("spectrum", 0);
  j["schema_version"] = 2;
  CHECK_THROWS_AS(cli::parse_config(j), ConfigError);
  j = sphere_config("spectrum", 0);
  j["experiment"] = "homology";
  CHECK_THROWS_AS(cli::parse_config(j), ConfigError);
  j = sphere_config("spectrum", 0);
  j["solver"]["count"] = 0;
  CHECK_THROWS_AS(cli::parse_config(j), ConfigError);
  j = sphere_config("spectrum", 0);
  j["manifold"]["radius"] = -1.0;
  CHECK_THROWS_AS(cli::parse_config(j), ConfigError);
}

TEST_CASE("half-integer fields") {
  CHECK(cli::half_integer_from_json("21/2", "l_max") == HalfInt{21});
  CHECK(cli::half_integer_from_json(10.5, "l_max") == HalfInt{21});
  CHECK(cli::half_integer_from_json(4, "l_max") == HalfInt{8});
  CHECK_THROWS_AS(cli::half_integer_from_json(10.25, "l_max"), ConfigError);
  CHECK_THROWS_AS(cli::half_integer_from_json("21/4", "l_max"), ConfigError);
}

TEST_CASE("manifold records") {
  const auto t = cli::manifold_from_json(json{{"type", "flat_torus"}, {"lengths", {1.0, 2.0}}, {"spin", {"periodic", "antiperiodic"}}});
  REQUIRE(t.is<FlatTorus>());
  CHECK(t.as<FlatTorus>().spin[0] == CycleSpin::periodic);
  const auto p = cli::manifold_from_json(
      json{{"type", "product"}, {"base", {{"type", "sphere"}, {"radius", 1.0}}}, {"circle", {{"length", 2.0}, {"spin", "bounding"}}}});
  CHECK(dimension(p) == 3);
  CHECK_THROWS_AS(cli::manifold_from_json(json{{"type", "klein_bottle"}}), ConfigError);
}

TEST_CASE("spectrum CSV") {
  const auto cfg = cli::parse_config(sphere_config("spectrum", 0));
  const auto result = cli::run(cfg, {}, "test");
  REQUIRE(result.report.spectrum.has_value());
  const auto csv = cli::spectrum_csv(*result.report.spectrum);
  std::istringstream in(csv);
  std::string header, first;
  std::getline(in, header);
  std::getline(in, first);
  CHECK(header == "index,eigenvalue,multiplicity,chirality");
  std::istringstream row(first);
  std::string idx, value, mult, chir;
  std::getline(row, idx, ',');
  std::getline(row, value, ',');
  std::getline(row, mult, ',');
  std::getline(row, chir, ',');
  CHECK(idx == "0");
  CHECK(std::abs(std::stod(value) + 1.0) < 1e-12);
  CHECK(mult == "2");
  CHECK(chir == "0");
  CHECK(cli::format_double(0.1) == "0.10000000000000001");
  CHECK(cli::bounds_csv({}) == "name,value,observed,satisfied,attained\n");
}

TEST_CASE("report JSON round trip") {
  for (const auto& [kind, degree] : std::vector<std::pair<std::string, int>>{{"spectrum", 0}, {"bounds", -1}, {"index", 2}}) {
    const auto result = cli::run(cli::parse_config(sphere_config(kind, degree)), {}, "test");
    const json j = result.report;
    const auto back = j.get<cli::RunReport>();
    CHECK(json(back) == j);
  }
  auto f = sphere_config("flow", 0);
  f.erase("connection");
  f.erase("solver");
  f["backend"]["l_max"] = "9/2";
  f["flow"] = {{"levels", 3}, {"k", 4}, {"eps", 0.1}};
  const auto result = cli::run(cli::parse_config(f), {}, "test");
  const json j = result.report;
  CHECK(json(j.get<cli::RunReport>()) == j);
}

TEST_CASE("bounds run on the charge -1 sphere attains the HE bound") {
  cli::RunOptions opt;
  opt.verify = true;
  const auto result = cli::run(cli::parse_config(sphere_config("bounds", -1)), opt, "test");
  CHECK(result.report.verdict.passed);
  bool seen = false;
  for (const auto& b : result.report.bounds) {
    if (b.bound_name == "he_real") {
      seen = true;
      CHECK(b.attained);
      CHECK(b.observed_min_lambda_sq == doctest::Approx(2.0).epsilon(1e-12));
    }
  }
  CHECK(seen);
}

TEST_CASE("flow run reports the small-eigenvalue parameter") {
  auto f = sphere_config("flow", 0);
  f.erase("connection");
  f.erase("solver");
  f["flow"] = {{"levels", 8}, {"k", 6}, {"eps", 0.1}};
  f["backend"]["l_max"] = "21/2";
  const auto result = cli::run(cli::parse_config(f), {}, "test");
  REQUIRE(result.report.flow.has_value());
  CHECK(result.report.flow->t_epsilon.has_value());
}

TEST_CASE("atomic writes") {
  const auto dir = scratch("atomic");
  const auto target = dir / "nested" / "file.txt";
  cli::write_atomic(target.string(), "hello\n");
  CHECK(read_file(target) == "hello\n");
  cli::write_atomic(target.string(), "again\n");
  CHECK(read_file(target) == "again\n");
  for (const auto& e : fs::directory_iterator(target.parent_path())) CHECK(e.path().extension() != ".tmp");
  std::ofstream(dir / "blocker") << "x";
  CHECK_THROWS_AS(cli::write_atomic((dir / "blocker" / "f.txt").string(), "x"), IoError);
  fs::remove_all(dir);
}

TEST_CASE("command-line exit codes") {
  if (!std::getenv("DIRACLAB_TOOL")) {
    MESSAGE("DIRACLAB_TOOL not set; skipping command-line checks");
    return;
  }
  const auto dir = scratch("exit");
  const auto out = (dir / "out").string();
  auto cfg = write_config(dir, sphere_config("bounds", -1));
  CHECK(tool("bounds --config " + cfg.string() + " --out " + out + " --verify") == 0);
  CHECK(tool("spectrum --config " + cfg.string() + " --out " + out) == cli::kExitConfig);

  auto bad = sphere_config("bounds", -1);
  bad["manifold"]["radius_km"] = 1.0;
  cfg = write_config(dir, bad);
  CHECK(tool("bounds --config " + cfg.string() + " --out " + out) == cli::kExitConfig);
  CHECK_FALSE(fs::exists(dir / "out" / "report.json.tmp"));

  // A coarse lattice misses the Landau floor by more than a tight tolerance.
  json lattice{{"schema_version", 1},
               {"experiment", "bounds"},
               {"manifold", {{"type", "flat_torus"}, {"lengths", {6.283185307179586, 6.283185307179586}}}},
               {"connection", {{"type", "constant_curvature"}, {"degrees", {-1}}}},
               {"backend", {{"type", "torus_lattice"}, {"n1", 16}, {"n2", 16}}},
               {"solver", {{"count", 8}}},
               {"bounds", {{"atol", 1e-6}, {"relative", true}}}};
  cfg = write_config(dir, lattice);
  CHECK(tool("bounds --config " + cfg.string() + " --out " + out) == 0);
  CHECK(tool("bounds --config " + cfg.string() + " --out " + out + " --verify") == cli::kExitVerdict);

  std::ofstream(dir / "blocker") << "x";
  cfg = write_config(dir, sphere_config("spectrum", 0));
  CHECK(tool("spectrum --config " + cfg.string() + " --out " + (dir / "blocker" / "sub").string()) == cli::kExitIo);
  fs::remove_all(dir);
}

TEST_CASE("command-line runs are byte-identical") {
  const char* configs = std::getenv("DIRACLAB_CONFIGS");
  if (!std::getenv("DIRACLAB_TOOL") || !configs) {
    MESSAGE("DIRACLAB_TOOL or DIRACLAB_CONFIGS not set; skipping");
    return;
  }
  const auto dir = scratch("determinism");
  const std::vector<std::pair<std::string, std::string>> runs{
      {"spectrum", "sphere_untwisted_spectrum.json"}, {"index", "torus_landau_index.json"},
      {"flow", "family_flow.json"}, {"product", "product_sphere_circle.json"}};
  for (const auto& [cmd, file] : runs) {
    const std::string cfg = (fs::path(configs) / file).string();
    REQUIRE(tool(cmd + " --config " + cfg + " --out " + (dir / "a").string() + " --plot --dump-operator --threads 2") == 0);
    REQUIRE(tool(cmd + " --config " + cfg + " --out " + (dir / "b").string() + " --plot --dump-operator") == 0);
    int compared = 0;
    for (const auto& e : fs::directory_iterator(dir / "a")) {
      const auto name = e.path().filename();
      if (name == "timings.json") continue;
      CHECK_MESSAGE(read_file(e.path()) == read_file(dir / "b" / name), cmd << ": " << name.string());
      ++compared;
    }
    CHECK(compared >= 2);
    fs::remove_all(dir / "a");
    fs::remove_all(dir / "b");
  }
  fs::remove_all(dir);
}
