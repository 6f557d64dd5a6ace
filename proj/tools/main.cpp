#include <cstdlib>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "swe/commands.hpp"
#include "swe/error.hpp"

namespace {

struct Common {
  std::string config;
  std::string out = "out";
  int reps = 5;
  std::vector<int> workers{1};
};

swe::RunConfig loadConfig(const std::string& path) {
  if (path.empty()) return swe::RunConfig{};
  return swe::loadRunConfig(path);
}

swe::PlatformPeaks pickPeaks(const std::string& csv, const std::string& platform) {
  const auto all = swe::readPeaksCsv(csv);
  if (platform.empty()) {
    if (all.size() != 1) throw swe::ConfigError("peaks file lists several platforms; pass --platform");
    return all.front();
  }
  for (const auto& p : all) {
    if (p.platform == platform) return p;
  }
  throw swe::ConfigError("platform '" + platform + "' not in " + csv);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Shallow-water solver and performance-portability harness"};
  app.require_subcommand(1);

  Common c;
  long max_steps = -1;
  int px = 0;
  int py = 0;

  auto* run = app.add_subcommand("run", "Run one simulation and write summary.json plus snapshots");
  run->add_option("-c,--config", c.config, "Config file")->check(CLI::ExistingFile);
  run->add_option("-o,--out", c.out, "Output directory");
  run->add_option("--px", px, "Ranks along x (overrides the config)");
  run->add_option("--py", py, "Ranks along y (overrides the config)");
  run->add_option("--max-steps", max_steps, "Step limit (overrides the config)");

  auto* strong = app.add_subcommand("scale-strong", "Fixed global size over a list of worker counts");
  strong->add_option("-c,--config", c.config, "Config file")->check(CLI::ExistingFile);
  strong->add_option("-o,--out", c.out, "Output directory");
  strong->add_option("-w,--workers", c.workers, "Worker counts")->delimiter(',');
  strong->add_option("-r,--reps", c.reps, "Repetitions per row (median reported)")->check(CLI::PositiveNumber);

  long cells_per_worker = 4096;
  auto* weak = app.add_subcommand("scale-weak", "Fixed cells per worker over a list of worker counts");
  weak->add_option("-c,--config", c.config, "Config file")->check(CLI::ExistingFile);
  weak->add_option("-o,--out", c.out, "Output directory");
  weak->add_option("-w,--workers", c.workers, "Worker counts")->delimiter(',');
  weak->add_option("--cells-per-worker", cells_per_worker, "Cells per worker")->check(CLI::PositiveNumber);
  weak->add_option("-r,--reps", c.reps, "Repetitions per row (median reported)")->check(CLI::PositiveNumber);

  std::string peaks_csv;
  std::string platform;
  auto* roof = app.add_subcommand("roofline", "Profile kernels and normalise them against platform peaks");
  roof->add_option("-c,--config", c.config, "Config file")->check(CLI::ExistingFile);
  roof->add_option("-o,--out", c.out, "Output directory");
  roof->add_option("--peaks", peaks_csv, "Peaks CSV; probes the host when omitted")->check(CLI::ExistingFile);
  roof->add_option("--platform", platform, "Row of the peaks file to use");

  swe::PeakProbeConfig probe;
  auto* peaks = app.add_subcommand("peaks", "Estimate host peak FLOP rate and bandwidth");
  peaks->add_option("-o,--out", c.out, "Output directory");
  peaks->add_option("-w,--workers", probe.workers, "Probe threads")->check(CLI::PositiveNumber);
  peaks->add_option("-r,--reps", probe.repetitions, "Repetitions per trial")->check(CLI::PositiveNumber);
  peaks->add_option("--sizes", probe.sizes, "Working-set sizes in doubles per worker")->delimiter(',');
  peaks->add_option("--fmas", probe.fma_ladder, "FMA ladder")->delimiter(',');
  peaks->add_option("--platform", probe.platform, "Name written to peaks.csv");

  std::string observations;
  std::vector<std::string> platforms;
  auto* pp = app.add_subcommand("ppreport", "Performance-portability report from observations");
  pp->add_option("--peaks", peaks_csv, "Peaks CSV")->required()->check(CLI::ExistingFile);
  pp->add_option("--observations", observations, "Observations CSV")->required()->check(CLI::ExistingFile);
  pp->add_option("--platforms", platforms, "Platform set (default: all in the peaks file)")->delimiter(',');
  pp->add_option("-o,--out", c.out, "Output directory");

  std::string inject;
  std::string validate_out;
  auto* validate = app.add_subcommand("validate", "Run the correctness checks; nonzero exit on failure");
  validate->add_option("--inject", inject, "Deliberate fault: flip-beta or rank-order");
  validate->add_option("-o,--out", validate_out, "Directory for validation.json");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*run) {
      auto cfg = loadConfig(c.config);
      if (px > 0) cfg.px = px;
      if (py > 0) cfg.py = py;
      if (max_steps >= 0) cfg.max_steps = max_steps;
      swe::cmdRun(cfg, c.out, std::cout);
    } else if (*strong) {
      swe::cmdScaleStrong(loadConfig(c.config), c.workers, c.reps, c.out, std::cout);
    } else if (*weak) {
      swe::cmdScaleWeak(loadConfig(c.config), c.workers, cells_per_worker, c.reps, c.out, std::cout);
    } else if (*roof) {
      swe::PlatformPeaks pk;
      if (peaks_csv.empty()) {
        pk = swe::estimatePeaks(probe).peaks;
      } else {
        pk = pickPeaks(peaks_csv, platform);
      }
      const auto res = swe::cmdRoofline(loadConfig(c.config), pk, c.out, std::cout);
      if (!res.warnings.empty()) return 1;
    } else if (*peaks) {
      swe::cmdPeaks(probe, c.out, std::cout);
    } else if (*pp) {
      swe::cmdPpReport(peaks_csv, observations, platforms, c.out, std::cout);
    } else if (*validate) {
      const auto summary = swe::cmdValidate(swe::parseInjection(inject), std::cerr);
      std::cout << summary.json() << '\n';
      if (!validate_out.empty()) {
        std::filesystem::create_directories(validate_out);
        std::ofstream(std::filesystem::path(validate_out) / "validation.json") << summary.json() << '\n';
      }
      return summary.passed() ? 0 : 1;
    }
  } catch (const swe::Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  return 0;
}
