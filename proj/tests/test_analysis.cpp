#include <gtest/gtest.h>

#include <algorithm>
#include <random>
#include <sstream>

#include "predsim/analysis.hpp"

using namespace predsim;

namespace {

std::vector<SimResult> results_from_totals(std::initializer_list<Cycles> totals) {
  std::vector<SimResult> rs;
  for (Cycles t : totals) {
    SimResult r;
    r.total_cycles = t;
    rs.push_back(std::move(r));
  }
  return rs;
}

ArchConfig at_clock(const std::string& name, std::uint64_t hz) {
  ArchConfig c = preset(name);
  c.fmax_hz = hz;
  return c;
}

}  // namespace

TEST(Stats, ConstantSamples) {
  const CampaignStats st = stats(results_from_totals({10, 10, 10}));
  EXPECT_EQ(st.median_cycles, 10u);
  EXPECT_EQ(st.stddev_cycles, 0.0);
  EXPECT_EQ(st.min_cycles, 10u);
  EXPECT_EQ(st.max_cycles, 10u);
}

TEST(Stats, EvenCountTakesLowerMiddle) {
  const CampaignStats st = stats(results_from_totals({1, 2, 3, 100}));
  EXPECT_EQ(st.median_cycles, 2u);
  EXPECT_EQ(st.min_cycles, 1u);
  EXPECT_EQ(st.max_cycles, 100u);
}

TEST(Stats, EmptyInputIsAnError) {
  EXPECT_THROW(stats({}), std::invalid_argument);
}

TEST(Stats, PermutationInvariant) {
  std::vector<Cycles> totals = {5, 9, 1, 7, 7, 3, 200, 42};
  std::mt19937 shuffler(99);
  const CampaignStats reference = stats(results_from_totals({5, 9, 1, 7, 7, 3, 200, 42}));
  for (int iter = 0; iter < 10; ++iter) {
    std::shuffle(totals.begin(), totals.end(), shuffler);
    std::vector<SimResult> rs;
    for (Cycles t : totals) {
      SimResult r;
      r.total_cycles = t;
      rs.push_back(std::move(r));
    }
    const CampaignStats st = stats(rs);
    EXPECT_EQ(st.median_cycles, reference.median_cycles);
    EXPECT_DOUBLE_EQ(st.stddev_cycles, reference.stddev_cycles);
    EXPECT_EQ(st.min_cycles, reference.min_cycles);
    EXPECT_EQ(st.max_cycles, reference.max_cycles);
  }
}

TEST(Stats, NonzeroSpreadGivesPositiveStddev) {
  const CampaignStats st = stats(results_from_totals({1, 2}));
  EXPECT_GT(st.stddev_cycles, 0.0);
}

TEST(WallClock, ReportedCycleCountsConvert) {
  EXPECT_NEAR(to_wall_clock(728548804, 168'000'000), 4.337, 0.005);
  EXPECT_NEAR(to_wall_clock(548343601, 118'000'000), 4.647, 0.005);
  EXPECT_EQ(to_wall_clock(0, 168'000'000), 0.0);
}

TEST(WallClock, LinearInCycles) {
  const double one = to_wall_clock(1'000'000, 100'000'000);
  EXPECT_DOUBLE_EQ(to_wall_clock(3'000'000, 100'000'000), 3.0 * one);
  EXPECT_DOUBLE_EQ(to_wall_clock(0, 100'000'000), 0.0);
  EXPECT_THROW(to_wall_clock(1, 0), std::invalid_argument);
}

TEST(Roofline, PlateauEqualsPeakBeyondRidge) {
  const ArchConfig cfg = preset("Octa");
  const PerfMetrics m = derive_metrics(cfg);
  const double ridge = ridge_point(cfg);
  const auto points = roofline(cfg, {ridge, ridge * 2, ridge * 1000});
  EXPECT_DOUBLE_EQ(points[0].attainable_ops_per_sec, m.peak_ops_per_sec);
  EXPECT_DOUBLE_EQ(points[1].attainable_ops_per_sec, m.peak_ops_per_sec);
  EXPECT_DOUBLE_EQ(points[2].attainable_ops_per_sec, m.peak_ops_per_sec);
}

TEST(Roofline, MemorySlopeBelowRidge) {
  const ArchConfig cfg = preset("Fast");
  const double ridge = ridge_point(cfg);
  const double x = ridge / 4;
  const auto points = roofline(cfg, {x});
  EXPECT_DOUBLE_EQ(points[0].attainable_ops_per_sec,
                   x * spm_bandwidth_bytes_per_sec(cfg));
  EXPECT_LT(points[0].attainable_ops_per_sec,
            derive_metrics(cfg).peak_ops_per_sec);
}

TEST(Roofline, OctaShiftsTheMemoryBoundaryLeftOfFast) {
  // Equal clock: same compute roof, but eight scratchpad ports against one.
  const ArchConfig fast = at_clock("Fast", 100'000'000);
  const ArchConfig octa = at_clock("Octa", 100'000'000);
  EXPECT_DOUBLE_EQ(derive_metrics(octa).peak_ops_per_sec,
                   derive_metrics(fast).peak_ops_per_sec);
  EXPECT_DOUBLE_EQ(spm_bandwidth_bytes_per_sec(octa),
                   8.0 * spm_bandwidth_bytes_per_sec(fast));
  EXPECT_LT(ridge_point(octa), ridge_point(fast));
}

TEST(Roofline, RidgeFallsMonotonicallyWithCoreCount) {
  double prev = 1e300;
  for (const std::string name : {"Fast", "Dual", "Quad", "Octa", "Hexadeca"}) {
    const double ridge = ridge_point(at_clock(name, 100'000'000));
    EXPECT_LT(ridge, prev) << name;
    prev = ridge;
  }
}

TEST(Roofline, RejectsBadIntensityGrids) {
  const ArchConfig cfg = preset("Dual");
  EXPECT_THROW(roofline(cfg, {0.0}), std::invalid_argument);
  EXPECT_THROW(roofline(cfg, {-1.0}), std::invalid_argument);
  EXPECT_THROW(roofline(cfg, {4.0, 2.0}), std::invalid_argument);
}

TEST(Roofline, DefaultGridIsSortedAndPositive) {
  const auto grid = default_intensity_grid();
  ASSERT_FALSE(grid.empty());
  EXPECT_GT(grid.front(), 0.0);
  EXPECT_TRUE(std::is_sorted(grid.begin(), grid.end()));
}

TEST(Csv, HeadersAreStable) {
  std::ostringstream runs, st, roof;
  write_runs_csv_header(runs);
  EXPECT_EQ(runs.str(), "config,n,seed,total_cycles,dram_accesses\n");
  write_stats_csv_header(st);
  EXPECT_NE(st.str().find("config,n,runs,median_cycles,stddev_cycles,"
                          "min_cycles,max_cycles,wcet_cycles,wcet_violations"),
            std::string::npos);
  EXPECT_NE(st.str().find("lower middle"), std::string::npos);
  write_roofline_csv_header(roof);
  EXPECT_NE(roof.str().find("2 per MAC"), std::string::npos);
  EXPECT_NE(roof.str().find("ridge_ops_per_byte"), std::string::npos);
}

TEST(Csv, RooflineRowsCarryRidgeColumn) {
  std::ostringstream out;
  write_roofline_csv(out, preset("Octa"), {1.0, 2.0});
  std::istringstream in(out.str());
  std::string line;
  int rows = 0;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    ++rows;
    EXPECT_EQ(std::count(line.begin(), line.end(), ','), 4) << line;
    EXPECT_EQ(line.rfind("Octa,", 0), 0u) << line;
  }
  EXPECT_EQ(rows, 2);
}
