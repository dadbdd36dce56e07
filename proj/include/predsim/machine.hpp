#pragma once

// Timing models for the memory subsystem: bounded-jitter DRAM, the
// single-host DMA engine and dual-port scratchpads. All cost functions are
// pure; the only mutable state is the DMA busy window, which is advanced
// explicitly by whoever owns the engine.

#include <cstdint>
#include <stdexcept>
#include <string>

namespace predsim {

using Cycles = std::uint64_t;
using ByteCount = std::uint64_t;

inline std::uint64_t ceil_div(std::uint64_t a, std::uint64_t b) {
  return (a + b - 1) / b;
}

// ---------------------------------------------------------------------------
// Random source
// ---------------------------------------------------------------------------

// splitmix64; fully specified, so sampled traces are identical across
// platforms and independent of event-processing order.
class JitterRng {
 public:
  explicit JitterRng(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next() {
    std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ull);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
  }

  // Uniform in [0, n] via multiply-shift.
  std::uint64_t bounded_inclusive(std::uint64_t n) {
    return static_cast<std::uint64_t>(
        (static_cast<unsigned __int128>(next()) * (n + 1)) >> 64);
  }

 private:
  std::uint64_t state_;
};

// Derives the rng stream for one schedule entry so that sampling does not
// depend on the order entries happen to execute in.
inline JitterRng entry_rng(std::uint64_t seed, std::uint32_t entry_id) {
  return JitterRng(seed ^ (0x9e3779b97f4a7c15ull * (entry_id + 1)));
}

// ---------------------------------------------------------------------------
// DRAM
// ---------------------------------------------------------------------------

enum class JitterDist : std::uint8_t {
  kUniform,        // uniform over [0, jitter_max_cycles]
  kConstantWorst,  // always jitter_max_cycles
  kConstantZero,   // always 0 (deterministic runs)
};

inline const char* to_string(JitterDist d) {
  switch (d) {
    case JitterDist::kUniform: return "uniform";
    case JitterDist::kConstantWorst: return "worst";
    case JitterDist::kConstantZero: return "zero";
  }
  return "?";
}

inline JitterDist jitter_dist_from_string(const std::string& s) {
  if (s == "uniform") return JitterDist::kUniform;
  if (s == "worst" || s == "constant-worst") return JitterDist::kConstantWorst;
  if (s == "zero" || s == "constant-zero") return JitterDist::kConstantZero;
  throw std::invalid_argument("unknown jitter distribution '" + s +
                              "' (expected uniform, worst or zero)");
}

// Worst-case envelope DRAM model. The defaults are simulator defaults, not
// measured values; reported outputs must state them.
struct DramModel {
  Cycles base_latency_cycles = 20;
  ByteCount bytes_per_cycle = 8;
  Cycles jitter_max_cycles = 10;
  JitterDist jitter_distribution = JitterDist::kUniform;

  friend bool operator==(const DramModel&, const DramModel&) = default;
};

// Upper bound for a single access; every sampled cost stays at or below it.
inline Cycles worst_case_dram_access(const DramModel& m, ByteCount bytes) {
  return m.base_latency_cycles + m.jitter_max_cycles +
         ceil_div(bytes, m.bytes_per_cycle);
}

inline Cycles sample_jitter(const DramModel& m, JitterRng& rng) {
  switch (m.jitter_distribution) {
    case JitterDist::kUniform: return rng.bounded_inclusive(m.jitter_max_cycles);
    case JitterDist::kConstantWorst: return m.jitter_max_cycles;
    case JitterDist::kConstantZero: return 0;
  }
  return 0;
}

inline Cycles dram_access_cycles(const DramModel& m, ByteCount bytes,
                                 JitterRng& rng) {
  if (bytes == 0)
    throw std::invalid_argument("dram access of zero bytes is degenerate");
  return m.base_latency_cycles + sample_jitter(m, rng) +
         ceil_div(bytes, m.bytes_per_cycle);
}

// ---------------------------------------------------------------------------
// Scratchpads
// ---------------------------------------------------------------------------

// Both ports answer in one cycle, always; an access on one port never delays
// the other. That constant is load-bearing: it is why manager-side polling is
// invisible in worker timings.
enum class SpmPort : std::uint8_t { kWorker, kMgmt };

struct Scratchpad {
  ByteCount capacity_bytes = 0;

  static constexpr Cycles kAccessCycles = 1;

  // Latency of an access on `port`, possibly concurrent with activity on the
  // other port. The argument is unused by construction, which is the point.
  static constexpr Cycles access_cycles(SpmPort /*port*/) {
    return kAccessCycles;
  }
};

// ---------------------------------------------------------------------------
// Memory regions
// ---------------------------------------------------------------------------

// Named staging areas inside a worker's data scratchpad. The machine model
// only cares about dram-vs-spm; slots identify buffer lifetimes for capacity
// validation in schedules.
enum class SpmSlot : std::uint8_t { kBBlock, kABuf0, kABuf1, kCFrag };

inline const char* to_string(SpmSlot s) {
  switch (s) {
    case SpmSlot::kBBlock: return "b";
    case SpmSlot::kABuf0: return "a0";
    case SpmSlot::kABuf1: return "a1";
    case SpmSlot::kCFrag: return "c";
  }
  return "?";
}

inline SpmSlot spm_slot_from_string(const std::string& s) {
  if (s == "b") return SpmSlot::kBBlock;
  if (s == "a0") return SpmSlot::kABuf0;
  if (s == "a1") return SpmSlot::kABuf1;
  if (s == "c") return SpmSlot::kCFrag;
  throw std::invalid_argument("unknown spm slot '" + s + "'");
}

struct MemRegion {
  enum class Kind : std::uint8_t { kDram, kSpm } kind = Kind::kDram;
  std::uint32_t core = 0;       // spm only
  SpmSlot slot = SpmSlot::kBBlock;  // spm only

  static MemRegion dram() { return MemRegion{Kind::kDram, 0, SpmSlot::kBBlock}; }
  static MemRegion spm(std::uint32_t core, SpmSlot slot) {
    return MemRegion{Kind::kSpm, core, slot};
  }
  bool is_dram() const { return kind == Kind::kDram; }
  bool is_spm() const { return kind == Kind::kSpm; }

  friend bool operator==(const MemRegion&, const MemRegion&) = default;
};

inline std::string to_string(const MemRegion& r) {
  if (r.is_dram()) return "dram";
  return "spm:" + std::to_string(r.core) + ":" + to_string(r.slot);
}

// ---------------------------------------------------------------------------
// DMA engine
// ---------------------------------------------------------------------------

struct DmaBusyError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct SpmCapacityError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Single-host copy engine: at most one transfer in flight, ever. DMA reaches
// scratchpads through their management-side port only.
struct DmaEngine {
  Cycles setup_cycles = 8;
  Cycles busy_until = 0;

  // Claims the engine for [start, start+duration). Overlap with an in-flight
  // transfer is a schedule bug, not a condition to arbitrate.
  Cycles issue(Cycles start, Cycles duration) {
    if (start < busy_until)
      throw DmaBusyError("dma transfer issued at cycle " +
                         std::to_string(start) +
                         " while engine busy until cycle " +
                         std::to_string(busy_until));
    busy_until = start + duration;
    return busy_until;
  }
};

struct DmaCostParams {
  Cycles setup_cycles = 8;
  ByteCount spm_port_bytes_per_cycle = 16;
  DramModel dram{};
};

// Cost of one transfer. A DRAM leg is priced by the DRAM model; pure
// spm-to-spm copies stream at the narrower of the two ports. When
// `dst_capacity_bytes` is nonzero the destination must fit.
inline Cycles dma_transfer_cycles(const DmaCostParams& p, const MemRegion& src,
                                  const MemRegion& dst, ByteCount bytes,
                                  JitterRng& rng,
                                  ByteCount dst_capacity_bytes = 0) {
  if (bytes == 0)
    throw std::invalid_argument("dma transfer of zero bytes is degenerate");
  if (src == dst)
    throw std::invalid_argument("dma transfer with identical src and dst");
  if (dst.is_spm() && dst_capacity_bytes != 0 && bytes > dst_capacity_bytes)
    throw SpmCapacityError("transfer of " + std::to_string(bytes) +
                           " bytes overflows data scratchpad of core " +
                           std::to_string(dst.core) + " (" +
                           std::to_string(dst_capacity_bytes) +
                           " bytes usable)");
  if (src.is_dram() || dst.is_dram())
    return p.setup_cycles + dram_access_cycles(p.dram, bytes, rng);
  return p.setup_cycles + ceil_div(bytes, p.spm_port_bytes_per_cycle);
}

inline Cycles worst_case_dma_transfer(const DmaCostParams& p,
                                      const MemRegion& src,
                                      const MemRegion& dst, ByteCount bytes) {
  if (src.is_dram() || dst.is_dram())
    return p.setup_cycles + worst_case_dram_access(p.dram, bytes);
  return p.setup_cycles + ceil_div(bytes, p.spm_port_bytes_per_cycle);
}

}  // namespace predsim
