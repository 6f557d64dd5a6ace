#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "support/cost_oracle.hpp"
#include "swe/driver.hpp"
#include "swe/error.hpp"
#include "swe/perf.hpp"

using namespace swe;

namespace {

FieldSet evolvedDamBreak(int n, long steps) {
  RunConfig cfg;
  cfg.scenario.n_side = n;
  cfg.scenario.t_end = 1e9;
  cfg.max_steps = steps;
  return *runSimulation(cfg).fields;
}

/// Clock advancing by a fixed amount on every read.
struct StepClock {
  double now = 0.0;
  double tick;
  double operator()() {
    now += tick;
    return now;
  }
};

std::string slurpText(const std::filesystem::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

TEST_SUITE("perf") {
  TEST_CASE("cost models agree with counted operations within 5%") {
    const FieldSet f = evolvedDamBreak(32, 20);
    const oracle::MeasuredCosts m = oracle::measureCosts(f);
    for (KernelId id : kAllKernels) {
      const double model = costModel(id).flops_per_item;
      const double measured = m.of(id);
      CAPTURE(kernelName(id));
      CAPTURE(measured);
      CHECK(std::fabs(model - measured) <= 0.05 * measured);
    }
  }

  TEST_CASE("cost model items follow the grid") {
    const GridSpec s{4, 3, 0.5, 0.0, 0.0};
    CHECK(costModel(KernelId::ComputeDt).items(s) == 12);
    CHECK(costModel(KernelId::FluxX).items(s) == 15);
    CHECK(costModel(KernelId::FluxY).items(s) == 16);
    CHECK(costModel(KernelId::NewState).bytes(s) == 96.0 * 12);
  }

  TEST_CASE("sample validation") {
    CHECK_THROWS_AS(makeSample("k", 1, 0.0, 1.0, 1.0), Error);
    CHECK_THROWS_AS(makeSample("k", 0, 1.0, 1.0, 1.0), Error);
    const KernelSample s = makeSample("k", 2, 0.5, 100.0, 50.0);
    CHECK(s.pAchieved() == 200.0);
    CHECK(s.aAchieved() == 2.0);
  }

  TEST_CASE("a fake clock gives exact rates") {
    PeakProbeConfig cfg;
    cfg.sizes = {1024};
    cfg.fma_ladder = {1, 64};
    cfg.repetitions = 3;
    cfg.elements_per_trial = 1u << 16;
    StepClock clock{0.0, 0.25};
    const PeakEstimate e = estimatePeaks(cfg, std::ref(clock));
    // Two reads per repetition, two rungs, three repetitions.
    CHECK(clock.now == doctest::Approx(0.25 * 12));
    const double work = 65536.0;
    CHECK(e.peaks.p_peak == doctest::Approx(2.0 * 64 * work / 0.25));
    CHECK(e.peaks.b_peak == doctest::Approx(16.0 * work / 0.25));
    CHECK(e.peaks.source == PeakSource::Empirical);
    CHECK(e.trials.size() == 2);
    CHECK(e.warnings.empty());
  }

  TEST_CASE("one size and one repetition are enough") {
    PeakProbeConfig cfg;
    cfg.sizes = {4096};
    cfg.repetitions = 1;
    StepClock clock{0.0, 1.0};
    const PeakEstimate e = estimatePeaks(cfg, std::ref(clock));
    CHECK(e.trials.size() == cfg.fma_ladder.size());
    CHECK(e.peaks.aThresh() == doctest::Approx(2.0 * 64 / 16.0));
  }

  TEST_CASE("trials under the timer floor are dropped with a warning") {
    PeakProbeConfig cfg;
    cfg.sizes = {1024};
    cfg.fma_ladder = {1, 8};
    cfg.repetitions = 1;
    cfg.min_duration = 1.0;
    StepClock fast{0.0, 1e-6};
    CHECK_THROWS_AS(estimatePeaks(cfg, std::ref(fast)), Error);
    // Only the second trial is too short to resolve.
    cfg.sizes = {1024, 2048};
    double now = 0.0;
    int reads = 0;
    auto uneven = [&] {
      now += (reads++ / 2 == 1) ? 1e-6 : 2.0;
      return now;
    };
    const PeakEstimate e = estimatePeaks(cfg, uneven);
    REQUIRE(e.trials.size() == 4);
    CHECK_FALSE(e.trials[0].dropped);
    CHECK(e.trials[1].dropped);
    CHECK_FALSE(e.trials[3].dropped);
    CHECK(e.peaks.p_peak == doctest::Approx(2.0 * 8 * double(cfg.elements_per_trial) / 2.0));
    CHECK(e.warnings.size() == 1);
  }

  TEST_CASE("bad probe configurations are rejected") {
    PeakProbeConfig cfg;
    cfg.fma_ladder = {3};
    CHECK_THROWS_AS(estimatePeaks(cfg), ConfigError);
    cfg = {};
    cfg.sizes = {};
    CHECK_THROWS_AS(estimatePeaks(cfg), ConfigError);
    cfg = {};
    cfg.workers = 0;
    CHECK_THROWS_AS(estimatePeaks(cfg), ConfigError);
  }

  TEST_CASE("a live probe produces plausible host peaks") {
    PeakProbeConfig cfg;
    cfg.sizes = {1u << 12, 1u << 18};
    cfg.repetitions = 2;
    cfg.elements_per_trial = 1u << 22;
    const PeakEstimate e = estimatePeaks(cfg);
    CHECK(e.peaks.p_peak > 1e8);
    CHECK(e.peaks.p_peak < 1e13);
    CHECK(e.peaks.b_peak > 1e8);
    CHECK(e.peaks.b_peak < 1e13);
  }

  TEST_CASE("roofline normalisation") {
    const PlatformPeaks juwels{"JUWELS BOOSTER", 9494.71e9, 1258.40e9, PeakSource::Supplied};
    CHECK(juwels.aThresh() == doctest::Approx(7.5450).epsilon(1e-4));
    // A kernel sitting exactly on the ridge point maps to (1, 1).
    const RooflinePoint ridge = rooflineNormalize(juwels.p_peak, juwels.aThresh(), juwels);
    CHECK(ridge.p_norm == doctest::Approx(1.0));
    CHECK(ridge.a_norm == doctest::Approx(1.0));
    // Scaling both peaks by the same factor leaves a_norm unchanged.
    const PlatformPeaks doubled{"x", 2 * juwels.p_peak, 2 * juwels.b_peak, PeakSource::Supplied};
    const RooflinePoint a = rooflineNormalize(1e12, 0.5, juwels);
    const RooflinePoint b = rooflineNormalize(1e12, 0.5, doubled);
    CHECK(a.a_norm == doctest::Approx(b.a_norm));
    CHECK(b.p_norm == doctest::Approx(a.p_norm / 2));
    CHECK_THROWS_AS(rooflineNormalize(1.0, 1.0, PlatformPeaks{"bad", 0.0, 1.0}), ConfigError);
  }

  TEST_CASE("strong and weak scaling metrics") {
    const std::vector<ScalingRun> strong{{1, 100.0}, {32, 3.125}};
    const auto rows = scalingMetrics(ScalingKind::Strong, strong);
    CHECK(rows[1].speedup == doctest::Approx(32.0));
    CHECK(rows[1].efficiency == doctest::Approx(1.0));
    CHECK(rows[0].speedup == 1.0);
    const std::vector<ScalingRun> weak{{1, 9.0}, {4, 10.0}};
    const auto w = scalingMetrics(ScalingKind::Weak, weak);
    CHECK(w[1].efficiency == doctest::Approx(0.9));
    CHECK(w[1].speedup == doctest::Approx(3.6));
    CHECK_THROWS_AS(scalingMetrics(ScalingKind::Strong, ScalingRun{0, 1.0}, strong), ConfigError);
    CHECK_THROWS_AS(scalingMetrics(ScalingKind::Strong, std::span<const ScalingRun>{}), ConfigError);
  }

  TEST_CASE("median") {
    CHECK(median({3.0, 1.0, 2.0}) == 2.0);
    CHECK(median({4.0, 1.0, 2.0, 3.0}) == 2.5);
  }

  TEST_CASE("peaks CSV round-trips in GFLOP/s and GB/s") {
    const auto peaks = parsePeaksCsv("platform,p_peak_gflops,b_peak_gbs\nAURORA,11400.00,1203.43\nJEDI,31209.00,3032.59\n");
    REQUIRE(peaks.size() == 2);
    CHECK(peaks[0].platform == "AURORA");
    CHECK(peaks[0].p_peak == doctest::Approx(11400e9));
    CHECK(peaks[1].b_peak == doctest::Approx(3032.59e9));
    const auto path = std::filesystem::temp_directory_path() / "swe_peaks_test.csv";
    writePeaksCsv(path, peaks);
    const auto back = readPeaksCsv(path);
    REQUIRE(back.size() == 2);
    CHECK(back[1].p_peak == doctest::Approx(peaks[1].p_peak));
    std::filesystem::remove(path);
    CHECK_THROWS_AS(parsePeaksCsv("name,p,b\nX,1,2\n"), ConfigError);
    CHECK_THROWS_AS(parsePeaksCsv("platform,p_peak_gflops,b_peak_gbs\nX,abc,2\n"), ConfigError);
  }

  TEST_CASE("roofline and scaling CSV headers") {
    const auto dir = std::filesystem::temp_directory_path() / "swe_perf_csv";
    std::filesystem::create_directories(dir);
    const std::vector<KernelSample> samples{makeSample("fluxX", 1, 1.0, 2e9, 1e9)};
    writeRooflineCsv(dir / "r.csv", samples, PlatformPeaks{"h", 4e9, 2e9});
    const std::string r = slurpText(dir / "r.csv");
    CHECK(r.rfind("kernel,p_achieved,a_achieved,p_norm,a_norm\n", 0) == 0);
    CHECK(r.find("fluxX,") != std::string::npos);
    const std::vector<ScalingRow> rows{{1, 2.0, 1.0, 1.0}};
    writeScalingCsv(dir / "s.csv", rows);
    CHECK(slurpText(dir / "s.csv").rfind("workers,time_s,speedup,efficiency\n", 0) == 0);
    std::filesystem::remove_all(dir);
  }

  TEST_CASE("CSV splitting keeps empty fields") {
    CHECK(splitCsvLine("a,,b") == std::vector<std::string>{"a", "", "b"});
    CHECK(splitCsvLine("x") == std::vector<std::string>{"x"});
  }
}
