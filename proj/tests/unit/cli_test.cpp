#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <sys/wait.h>

#include <json.hpp>

#include "swe/commands.hpp"
#include "swe/error.hpp"

using namespace swe;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / ("swe_cli_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

std::string readText(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

/// Drops the time-dependent columns from a scaling CSV.
std::string withoutTimings(const std::string& csv) {
  std::istringstream in(csv);
  std::string line, out;
  while (std::getline(in, line)) out += line.substr(0, line.find(',')) + '\n';
  return out;
}

int runCli(const std::string& args) {
  const std::string cmd = std::string(SWE_CLI_PATH) + " " + args + " > /dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

}  // namespace

TEST_SUITE("cli") {
  TEST_CASE("weak-scaling side length is an exact integer ceiling") {
    CHECK(weakSideFor(1, 4096) == 64);
    CHECK(weakSideFor(2, 4096) == 91);
    CHECK(weakSideFor(4, 4096) == 128);
    CHECK(weakSideFor(3, 1) == 2);
    CHECK_THROWS_AS(weakSideFor(0, 10), ConfigError);
  }

  TEST_CASE("oversized grids are refused before allocation") {
    const std::uint64_t five_gb = 5ull << 30;
    CHECK_THROWS_AS(checkMemory(squareGrid(36000, 0.5), 1, five_gb), ConfigError);
    CHECK_NOTHROW(checkMemory(squareGrid(512, 0.5), 4, five_gb));
    CHECK(estimateFootprintBytes(squareGrid(1000, 0.5), 1) > 1000ull * 1000 * 8 * 4);
    CHECK(availableCores() >= 1);
  }

  TEST_CASE("one worker strong scaling has unit speedup and efficiency") {
    const fs::path dir = scratch("strong1");
    RunConfig cfg;
    cfg.scenario.n_side = 24;
    cfg.max_steps = 5;
    cfg.scenario.t_end = 1e9;
    std::ostringstream log;
    const ScalingResult r = cmdScaleStrong(cfg, {1}, 1, dir, log);
    REQUIRE(r.rows.size() == 1);
    CHECK(r.rows[0].speedup == 1.0);
    CHECK(r.rows[0].efficiency == 1.0);
    CHECK(fs::exists(dir / "scaling_strong.csv"));
    fs::remove_all(dir);
  }

  TEST_CASE("scaling CSVs are deterministic apart from timings") {
    RunConfig cfg;
    cfg.scenario.n_side = 16;
    cfg.max_steps = 3;
    cfg.scenario.t_end = 1e9;
    std::ostringstream log;
    const fs::path a = scratch("weak_a");
    const fs::path b = scratch("weak_b");
    const ScalingResult ra = cmdScaleWeak(cfg, {1, 2, 4}, 256, 1, a, log);
    cmdScaleWeak(cfg, {1, 2, 4}, 256, 1, b, log);
    CHECK(ra.n_side == std::vector<int>{16, 23, 32});
    CHECK(withoutTimings(readText(a / "scaling_weak.csv")) == withoutTimings(readText(b / "scaling_weak.csv")));
    fs::remove_all(a);
    fs::remove_all(b);
  }

  TEST_CASE("run writes a summary and a final snapshot") {
    const fs::path dir = scratch("run");
    RunConfig cfg;
    cfg.scenario.n_side = 12;
    cfg.scenario.t_end = 0.1;
    std::ostringstream log;
    const RunReport r = cmdRun(cfg, dir, log);
    const auto j = nlohmann::json::parse(readText(dir / "summary.json"));
    CHECK(j["steps"] == r.steps);
    CHECK(fs::exists(dir / "snapshots"));
    fs::remove_all(dir);
  }

  TEST_CASE("roofline against supplied peaks") {
    const fs::path dir = scratch("roof");
    RunConfig cfg;
    cfg.scenario.n_side = 64;
    cfg.max_steps = 10;
    cfg.scenario.t_end = 1e9;
    std::ostringstream log;
    const RooflineResult r = cmdRoofline(cfg, PlatformPeaks{"host", 1e11, 1e10}, dir, log);
    CHECK(r.samples.size() == 5);
    CHECK(r.points.size() == 5);
    CHECK(fs::exists(dir / "roofline.csv"));
    fs::remove_all(dir);
  }

  TEST_CASE("validation passes and catches both injected faults") {
    std::ostringstream log;
    const ValidationSummary ok = cmdValidate(Injection::None, log);
    CHECK(ok.checks.size() == 4);
    CHECK(ok.passed());
    const ValidationSummary beta = cmdValidate(Injection::FlipBeta, log);
    CHECK_FALSE(beta.passed());
    const ValidationSummary order = cmdValidate(Injection::RankOrder, log);
    CHECK_FALSE(order.passed());
    CHECK(parseInjection("none") == Injection::None);
    CHECK_THROWS_AS(parseInjection("bogus"), ConfigError);
  }

  TEST_CASE("binary exit codes") {
    const fs::path dir = scratch("bin");
    CHECK(runCli("--help") == 0);
    CHECK(runCli("") != 0);
    CHECK(runCli("run -c " + (dir / "missing.cfg").string()) != 0);
    std::ofstream(dir / "bad.cfg") << "[scenario]\nn_side = -3\n";
    CHECK(runCli("run -c " + (dir / "bad.cfg").string() + " -o " + (dir / "bad").string()) == 2);
    CHECK(runCli("validate --inject nonsense -o " + (dir / "v").string()) == 2);
    std::ofstream(dir / "tiny.cfg") << "[scenario]\nn_side = 8\nt_end = 0.05\n";
    CHECK(runCli("run -c " + (dir / "tiny.cfg").string() + " -o " + (dir / "out").string()) == 0);
    CHECK(fs::exists(dir / "out" / "summary.json"));
    fs::remove_all(dir);
  }
}
