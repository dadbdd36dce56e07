#pragma once

// Roofline modeling, campaign statistics and wall-clock conversion, plus the
// CSV emitters the CLI writes. Columns are stable; conventions (2 ops per
// MAC, lower-middle median) are stated in the CSV headers.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <ostream>
#include <stdexcept>
#include <string>
#include <vector>

#include "predsim/config.hpp"
#include "predsim/sim.hpp"

namespace predsim {

// ---------------------------------------------------------------------------
// Roofline
// ---------------------------------------------------------------------------

struct RooflinePoint {
  double operational_intensity = 0;  // ops per byte
  double attainable_ops_per_sec = 0;
};

inline double spm_bandwidth_bytes_per_sec(const ArchConfig& cfg) {
  return derive_metrics(cfg).spm_bandwidth_bytes_per_cycle_total *
         static_cast<double>(cfg.fmax_hz);
}

// Intensity at which the memory slope meets the compute plateau.
inline double ridge_point(const ArchConfig& cfg) {
  return derive_metrics(cfg).peak_ops_per_sec / spm_bandwidth_bytes_per_sec(cfg);
}

inline std::vector<RooflinePoint> roofline(const ArchConfig& cfg,
                                           const std::vector<double>& intensities) {
  const PerfMetrics m = derive_metrics(cfg);
  const double bw = spm_bandwidth_bytes_per_sec(cfg);
  std::vector<RooflinePoint> points;
  points.reserve(intensities.size());
  for (std::size_t i = 0; i < intensities.size(); ++i) {
    const double x = intensities[i];
    if (x <= 0) throw std::invalid_argument("roofline: intensities must be positive");
    if (i > 0 && x < intensities[i - 1])
      throw std::invalid_argument("roofline: intensities must be sorted");
    points.push_back({x, std::min(m.peak_ops_per_sec, x * bw)});
  }
  return points;
}

// Log-spaced default grid: powers of two from 2^-4 to 2^14 ops/byte.
inline std::vector<double> default_intensity_grid() {
  std::vector<double> grid;
  for (int e = -4; e <= 14; ++e) grid.push_back(std::ldexp(1.0, e));
  return grid;
}

// ---------------------------------------------------------------------------
// Campaign statistics
// ---------------------------------------------------------------------------

struct CampaignStats {
  Cycles median_cycles = 0;  // lower middle for even counts (stays integral)
  double stddev_cycles = 0;  // population standard deviation
  Cycles min_cycles = 0;
  Cycles max_cycles = 0;
  std::size_t run_count = 0;
};

inline CampaignStats stats(const std::vector<SimResult>& results) {
  if (results.empty())
    throw std::invalid_argument("stats: empty result list");
  std::vector<Cycles> totals;
  totals.reserve(results.size());
  for (const auto& r : results) totals.push_back(r.total_cycles);
  std::sort(totals.begin(), totals.end());

  CampaignStats st;
  st.run_count = totals.size();
  st.min_cycles = totals.front();
  st.max_cycles = totals.back();
  st.median_cycles = totals[(totals.size() - 1) / 2];
  double mean = 0;
  for (Cycles t : totals) mean += static_cast<double>(t);
  mean /= static_cast<double>(totals.size());
  double var = 0;
  for (Cycles t : totals) {
    const double d = static_cast<double>(t) - mean;
    var += d * d;
  }
  var /= static_cast<double>(totals.size());
  st.stddev_cycles = std::sqrt(var);
  return st;
}

inline double to_wall_clock(Cycles cycles, std::uint64_t fmax_hz) {
  if (fmax_hz == 0) throw std::invalid_argument("to_wall_clock: fmax_hz must be > 0");
  return static_cast<double>(cycles) / static_cast<double>(fmax_hz);
}

// ---------------------------------------------------------------------------
// CSV emission
// ---------------------------------------------------------------------------

inline void write_runs_csv_header(std::ostream& out) {
  out << "config,n,seed,total_cycles,dram_accesses\n";
}

inline void write_runs_csv_row(std::ostream& out, const std::string& config,
                               std::uint32_t n, const SimResult& r) {
  out << config << "," << n << "," << r.seed << "," << r.total_cycles << ","
      << r.dram_access_count << "\n";
}

inline void write_stats_csv_header(std::ostream& out) {
  out << "# median: lower middle for even run counts (integer cycles)\n";
  out << "config,n,runs,median_cycles,stddev_cycles,min_cycles,max_cycles,"
         "wcet_cycles,wcet_violations\n";
}

// The DRAM numbers are simulator parameters, not measured values; every
// report states the ones it ran with.
inline void write_dram_model_comment(std::ostream& out, const ArchConfig& cfg) {
  out << "# " << cfg.name
      << " dram model: base_latency_cycles=" << cfg.dram.base_latency_cycles
      << " bytes_per_cycle=" << cfg.dram.bytes_per_cycle
      << " jitter_max_cycles=" << cfg.dram.jitter_max_cycles
      << " jitter_distribution=" << to_string(cfg.dram.jitter_distribution)
      << "\n";
}

inline void write_stats_csv_row(std::ostream& out, const std::string& config,
                                std::uint32_t n, const CampaignStats& st,
                                Cycles wcet, std::uint64_t violations) {
  out << config << "," << n << "," << st.run_count << "," << st.median_cycles
      << "," << st.stddev_cycles << "," << st.min_cycles << ","
      << st.max_cycles << "," << wcet << "," << violations << "\n";
}

inline void write_roofline_csv_header(std::ostream& out) {
  out << "# ops counted as 2 per MAC (mul + add); intensity in ops/byte\n";
  out << "config,intensity_ops_per_byte,attainable_ops_per_sec,"
         "peak_ops_per_sec,ridge_ops_per_byte\n";
}

inline void write_roofline_csv(std::ostream& out, const ArchConfig& cfg,
                               const std::vector<double>& intensities) {
  const PerfMetrics m = derive_metrics(cfg);
  const double ridge = ridge_point(cfg);
  for (const auto& p : roofline(cfg, intensities))
    out << cfg.name << "," << p.operational_intensity << ","
        << p.attainable_ops_per_sec << "," << m.peak_ops_per_sec << "," << ridge
        << "\n";
}

}  // namespace predsim
