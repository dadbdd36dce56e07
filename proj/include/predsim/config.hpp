#pragma once

// Architecture configurations: the parameter set of one machine instance,
// named presets for the evaluated variants, and derived peak metrics.

#include <array>
#include <bit>
#include <cctype>
#include <cstdint>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "predsim/machine.hpp"

namespace predsim {

constexpr ByteCount kKiB = 1024;
constexpr ByteCount kMiB = 1024 * 1024;

struct ArchConfig {
  std::string name = "custom";

  std::uint32_t worker_cores = 1;
  std::uint64_t vreg_bits = 256;   // vector register width
  std::uint64_t mult_bits = 128;   // compute-unit width
  ByteCount data_spm_bytes = 128 * kKiB;  // per worker
  ByteCount imem_spm_bytes = 16 * kKiB;   // per worker
  ByteCount mgmt_spm_bytes = 64 * kKiB;   // management core, imem and dmem each
  std::uint64_t fmax_hz = 100'000'000;

  std::uint64_t element_bits = 8;  // matrix element width (int8 by default)
  std::uint64_t acc_bits = 32;     // accumulator width

  // 0 means "derive as mult_bits/8" (one operand chunk per cycle).
  ByteCount spm_port_bytes_per_cycle = 0;

  ByteCount mailbox_bytes = 64;  // reserved status/control area per data SPM

  // Management-core orchestration model.
  Cycles dma_setup_cycles = 8;
  Cycles poll_interval_cycles = 20;  // status-read loop granularity; 0 = ideal
  Cycles dispatch_cycles = 1;        // mailbox task deposit

  // Kernel timing knobs; the per-instruction model is not published, so these
  // are declared constants.
  Cycles kernel_per_op_overhead = 1;
  Cycles kernel_startup_cycles = 50;
  std::int64_t kernel_reduce_cycles = -1;  // -1: log2(elems per vreg)

  DramModel dram{};

  friend bool operator==(const ArchConfig&, const ArchConfig&) = default;

  ByteCount spm_port() const {
    return spm_port_bytes_per_cycle != 0 ? spm_port_bytes_per_cycle
                                         : mult_bits / 8;
  }
  ByteCount element_bytes() const { return element_bits / 8; }
  ByteCount acc_bytes() const { return acc_bits / 8; }
  ByteCount usable_spm_bytes() const {
    return data_spm_bytes - mailbox_bytes;
  }
  DmaCostParams dma_cost_params() const {
    return DmaCostParams{dma_setup_cycles, spm_port(), dram};
  }
};

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

inline void validate(const ArchConfig& c) {
  auto fail = [&](const std::string& what) {
    throw ConfigError("config '" + c.name + "': " + what);
  };
  if (c.worker_cores < 1) fail("worker_cores must be >= 1");
  for (auto [v, n] : {std::pair<std::uint64_t, const char*>{c.vreg_bits, "vreg_bits"},
                      {c.mult_bits, "mult_bits"},
                      {c.element_bits, "element_bits"}})
    if (v == 0 || !std::has_single_bit(v))
      fail(std::string(n) + " must be a power of two");
  if (!(c.vreg_bits >= c.mult_bits && c.mult_bits >= c.element_bits))
    fail("expected vreg_bits >= mult_bits >= element_bits");
  if (c.element_bits < 8) fail("element_bits below 8 is not modeled");
  if (c.acc_bits < c.element_bits || c.acc_bits > 64)
    fail("acc_bits must lie in [element_bits, 64]");
  if (c.data_spm_bytes <= c.mailbox_bytes)
    fail("data_spm_bytes must exceed the reserved mailbox area");
  if (c.mailbox_bytes == 0) fail("mailbox_bytes must be nonzero");
  if (c.fmax_hz == 0) fail("fmax_hz must be positive");
  if (c.dram.bytes_per_cycle == 0) fail("dram.bytes_per_cycle must be positive");
}

// ---------------------------------------------------------------------------
// Presets
// ---------------------------------------------------------------------------

// Every preset shares one fixed 16 B/cycle scratchpad data port per core, so
// aggregate scratchpad bandwidth grows with the core count while the
// baselines keep a single port. Vector parameters and Fmax follow the
// evaluated hardware variants.
inline const std::array<std::string, 7>& preset_names() {
  static const std::array<std::string, 7> names = {
      "Small", "Medium", "Fast", "Dual", "Quad", "Octa", "Hexadeca"};
  return names;
}

inline ArchConfig preset(const std::string& name) {
  std::string key;
  for (char ch : name) key += static_cast<char>(std::tolower(ch));

  ArchConfig c;
  c.spm_port_bytes_per_cycle = 16;
  c.mgmt_spm_bytes = 64 * kKiB;

  auto baseline = [&](std::uint64_t vreg, std::uint64_t mult,
                      std::uint64_t fmax_mhz) {
    c.worker_cores = 1;
    c.vreg_bits = vreg;
    c.mult_bits = mult;
    c.data_spm_bytes = 1 * kMiB;
    c.imem_spm_bytes = 64 * kKiB;
    c.fmax_hz = fmax_mhz * 1'000'000;
  };
  auto multicore = [&](std::uint32_t cores, std::uint64_t vreg,
                       std::uint64_t mult, ByteCount data_spm,
                       std::uint64_t fmax_mhz) {
    c.worker_cores = cores;
    c.vreg_bits = vreg;
    c.mult_bits = mult;
    c.data_spm_bytes = data_spm;
    c.imem_spm_bytes = 16 * kKiB;
    c.fmax_hz = fmax_mhz * 1'000'000;
  };

  if (key == "small") { c.name = "Small"; baseline(128, 32, 179); }
  else if (key == "medium") { c.name = "Medium"; baseline(512, 128, 177); }
  else if (key == "fast") { c.name = "Fast"; baseline(2048, 1024, 149); }
  else if (key == "dual") { c.name = "Dual"; multicore(2, 1024, 512, 512 * kKiB, 168); }
  else if (key == "quad") { c.name = "Quad"; multicore(4, 512, 256, 256 * kKiB, 169); }
  else if (key == "octa") { c.name = "Octa"; multicore(8, 256, 128, 128 * kKiB, 168); }
  else if (key == "hexadeca") { c.name = "Hexadeca"; multicore(16, 128, 64, 64 * kKiB, 118); }
  else {
    std::string valid;
    for (const auto& n : preset_names()) valid += (valid.empty() ? "" : ", ") + n;
    throw ConfigError("unknown preset '" + name + "'; valid presets: " + valid);
  }
  validate(c);
  return c;
}

inline bool is_preset_name(const std::string& name) {
  try {
    preset(name);
    return true;
  } catch (const ConfigError&) {
    return false;
  }
}

// ---------------------------------------------------------------------------
// Derived metrics
// ---------------------------------------------------------------------------

struct PerfMetrics {
  double macs_per_cycle_per_core = 0;
  double macs_per_cycle_total = 0;
  double peak_ops_per_sec = 0;  // 2 ops per MAC (mul + add counted separately)
  double spm_bandwidth_bytes_per_cycle_total = 0;
};

inline PerfMetrics derive_metrics(const ArchConfig& c) {
  PerfMetrics m;
  m.macs_per_cycle_per_core =
      static_cast<double>(c.mult_bits) / static_cast<double>(c.element_bits);
  m.macs_per_cycle_total = m.macs_per_cycle_per_core * c.worker_cores;
  m.peak_ops_per_sec =
      2.0 * m.macs_per_cycle_total * static_cast<double>(c.fmax_hz);
  m.spm_bandwidth_bytes_per_cycle_total =
      static_cast<double>(c.worker_cores) * static_cast<double>(c.spm_port());
  return m;
}

// ---------------------------------------------------------------------------
// Key/value config files
// ---------------------------------------------------------------------------

namespace detail {

inline std::uint64_t parse_uint(const std::string& key, std::string value) {
  // Strip an optional unit suffix: KiB/MiB/GiB for sizes, kHz/MHz/GHz for
  // frequencies.
  std::uint64_t scale = 1;
  auto ends_with = [&](const char* suf) {
    std::string s(suf);
    return value.size() > s.size() &&
           value.compare(value.size() - s.size(), s.size(), s) == 0;
  };
  if (ends_with("KiB")) scale = kKiB;
  else if (ends_with("MiB")) scale = kMiB;
  else if (ends_with("GiB")) scale = kMiB * 1024;
  else if (ends_with("kHz")) scale = 1'000;
  else if (ends_with("MHz")) scale = 1'000'000;
  else if (ends_with("GHz")) scale = 1'000'000'000;
  if (scale != 1) {
    value.resize(value.size() - 3);
    while (!value.empty() && (value.back() == ' ' || value.back() == '\t'))
      value.pop_back();
  }

  std::size_t pos = 0;
  std::uint64_t parsed = 0;
  try {
    parsed = std::stoull(value, &pos);
  } catch (const std::exception&) {
    throw ConfigError("bad value for '" + key + "': '" + value + "'");
  }
  if (pos != value.size())
    throw ConfigError("bad value for '" + key + "': '" + value + "'");
  return parsed * scale;
}

}  // namespace detail

inline ArchConfig parse_config_text(std::istream& in) {
  ArchConfig c;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    auto hash = line.find('#');
    if (hash != std::string::npos) line.resize(hash);
    auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos) continue;
    auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError("line " + std::to_string(lineno) +
                        ": expected 'key = value'");
    auto trim = [](std::string s) {
      auto b = s.find_first_not_of(" \t\r");
      auto e = s.find_last_not_of(" \t\r");
      return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
    };
    std::string key = trim(line.substr(0, eq));
    std::string value = trim(line.substr(eq + 1));

    if (key == "name") c.name = value;
    else if (key == "worker_cores")
      c.worker_cores = static_cast<std::uint32_t>(detail::parse_uint(key, value));
    else if (key == "vreg_bits") c.vreg_bits = detail::parse_uint(key, value);
    else if (key == "mult_bits") c.mult_bits = detail::parse_uint(key, value);
    else if (key == "data_spm_bytes") c.data_spm_bytes = detail::parse_uint(key, value);
    else if (key == "imem_spm_bytes") c.imem_spm_bytes = detail::parse_uint(key, value);
    else if (key == "mgmt_spm_bytes") c.mgmt_spm_bytes = detail::parse_uint(key, value);
    else if (key == "fmax_hz") c.fmax_hz = detail::parse_uint(key, value);
    else if (key == "element_bits") c.element_bits = detail::parse_uint(key, value);
    else if (key == "acc_bits") c.acc_bits = detail::parse_uint(key, value);
    else if (key == "spm_port_bytes_per_cycle")
      c.spm_port_bytes_per_cycle = detail::parse_uint(key, value);
    else if (key == "mailbox_bytes") c.mailbox_bytes = detail::parse_uint(key, value);
    else if (key == "dma_setup_cycles") c.dma_setup_cycles = detail::parse_uint(key, value);
    else if (key == "poll_interval_cycles")
      c.poll_interval_cycles = detail::parse_uint(key, value);
    else if (key == "dispatch_cycles") c.dispatch_cycles = detail::parse_uint(key, value);
    else if (key == "kernel_per_op_overhead")
      c.kernel_per_op_overhead = detail::parse_uint(key, value);
    else if (key == "kernel_startup_cycles")
      c.kernel_startup_cycles = detail::parse_uint(key, value);
    else if (key == "kernel_reduce_cycles")
      c.kernel_reduce_cycles = static_cast<std::int64_t>(detail::parse_uint(key, value));
    else if (key == "dram.base_latency_cycles")
      c.dram.base_latency_cycles = detail::parse_uint(key, value);
    else if (key == "dram.bytes_per_cycle")
      c.dram.bytes_per_cycle = detail::parse_uint(key, value);
    else if (key == "dram.jitter_max_cycles")
      c.dram.jitter_max_cycles = detail::parse_uint(key, value);
    else if (key == "dram.jitter_distribution")
      c.dram.jitter_distribution = jitter_dist_from_string(value);
    else
      throw ConfigError("line " + std::to_string(lineno) + ": unknown key '" +
                        key + "'");
  }
  validate(c);
  return c;
}

inline void write_config_text(std::ostream& out, const ArchConfig& c) {
  out << "name = " << c.name << "\n"
      << "worker_cores = " << c.worker_cores << "\n"
      << "vreg_bits = " << c.vreg_bits << "\n"
      << "mult_bits = " << c.mult_bits << "\n"
      << "data_spm_bytes = " << c.data_spm_bytes << "\n"
      << "imem_spm_bytes = " << c.imem_spm_bytes << "\n"
      << "mgmt_spm_bytes = " << c.mgmt_spm_bytes << "\n"
      << "fmax_hz = " << c.fmax_hz << "\n"
      << "element_bits = " << c.element_bits << "\n"
      << "acc_bits = " << c.acc_bits << "\n"
      << "spm_port_bytes_per_cycle = " << c.spm_port_bytes_per_cycle << "\n"
      << "mailbox_bytes = " << c.mailbox_bytes << "\n"
      << "dma_setup_cycles = " << c.dma_setup_cycles << "\n"
      << "poll_interval_cycles = " << c.poll_interval_cycles << "\n"
      << "dispatch_cycles = " << c.dispatch_cycles << "\n"
      << "kernel_per_op_overhead = " << c.kernel_per_op_overhead << "\n"
      << "kernel_startup_cycles = " << c.kernel_startup_cycles << "\n";
  if (c.kernel_reduce_cycles >= 0)
    out << "kernel_reduce_cycles = " << c.kernel_reduce_cycles << "\n";
  out << "dram.base_latency_cycles = " << c.dram.base_latency_cycles << "\n"
      << "dram.bytes_per_cycle = " << c.dram.bytes_per_cycle << "\n"
      << "dram.jitter_max_cycles = " << c.dram.jitter_max_cycles << "\n"
      << "dram.jitter_distribution = " << to_string(c.dram.jitter_distribution)
      << "\n";
}

// Accepts either a preset name or a path to a key/value config file.
inline ArchConfig load_config(const std::string& source) {
  if (is_preset_name(source)) return preset(source);
  std::ifstream in(source);
  if (!in) {
    std::string valid;
    for (const auto& n : preset_names()) valid += (valid.empty() ? "" : ", ") + n;
    throw ConfigError("'" + source +
                      "' is neither a readable config file nor one of the "
                      "presets: " +
                      valid);
  }
  return parse_config_text(in);
}

}  // namespace predsim
