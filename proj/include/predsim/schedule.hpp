#pragma once

// Compile-time planner for the distributed matmul and the machinery around
// it: schedule representation, validation, worst-case (WCET) bounding,
// time-triggered release assignment and a line-oriented text format.
//
// Timing composition rule used throughout: the management core walks the
// entry list in order, so the DMA engine serves transfers in list order and
// each worker core serves its compute tasks in list order. Entry start times
// are then a monotone function of entry durations, which is what makes the
// per-entry worst-case composition a sound global bound.

#include <algorithm>
#include <array>
#include <cstdint>
#include <istream>
#include <map>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <variant>
#include <vector>

#include "predsim/config.hpp"
#include "predsim/kernel.hpp"
#include "predsim/machine.hpp"

namespace predsim {

// ---------------------------------------------------------------------------
// Schedule representation
// ---------------------------------------------------------------------------

enum class ScheduleMode : std::uint8_t { kSelfTimed, kTimeTriggered };

inline const char* to_string(ScheduleMode m) {
  return m == ScheduleMode::kSelfTimed ? "self-timed" : "time-triggered";
}

struct DmaTransfer {
  MemRegion src;
  MemRegion dst;
  ByteCount bytes = 0;

  friend bool operator==(const DmaTransfer&, const DmaTransfer&) = default;
};

struct ComputeTask {
  std::uint32_t core = 0;
  KernelTask task;
  std::uint32_t row0 = 0;  // output tile origin in the full result
  std::uint32_t col0 = 0;
  SpmSlot a_slot = SpmSlot::kABuf0;

  friend bool operator==(const ComputeTask&, const ComputeTask&) = default;
};

struct ScheduleEntry {
  std::uint32_t id = 0;
  std::variant<DmaTransfer, ComputeTask> op;
  std::vector<std::uint32_t> deps;

  bool is_dma() const { return std::holds_alternative<DmaTransfer>(op); }
  bool is_compute() const { return std::holds_alternative<ComputeTask>(op); }
  const DmaTransfer& dma() const { return std::get<DmaTransfer>(op); }
  const ComputeTask& compute() const { return std::get<ComputeTask>(op); }

  friend bool operator==(const ScheduleEntry&, const ScheduleEntry&) = default;
};

struct Schedule {
  std::vector<ScheduleEntry> entries;
  ScheduleMode mode = ScheduleMode::kSelfTimed;
  std::vector<Cycles> trigger_times;  // parallel to entries, tt mode only

  friend bool operator==(const Schedule&, const Schedule&) = default;
};

// Worst-case duration of a single entry, the unit the global bound composes.
inline Cycles worst_case_entry_cycles(const ScheduleEntry& e,
                                      const ArchConfig& cfg) {
  if (e.is_dma())
    return worst_case_dma_transfer(cfg.dma_cost_params(), e.dma().src,
                                   e.dma().dst, e.dma().bytes);
  return kernel_cycles(e.compute().task, cfg);
}

// The manager discovers readiness through its status-read loop. Modeled as a
// deterministic full poll interval per dispatch (the loop's worst case), so
// dispatch latency stays compositional instead of injecting grid-phase noise.
inline Cycles poll_latency(Cycles ready, Cycles poll_interval) {
  return ready + poll_interval;
}

// ---------------------------------------------------------------------------
// Validation
// ---------------------------------------------------------------------------

enum class ViolationKind : std::uint8_t {
  kCycle,             // backward/self/unknown dependency reference
  kMissingProducer,   // compute input slot never written by a predecessor
  kCapacity,          // scratchpad footprint exceeded
  kPrematureTrigger,  // release before worst-case completion of a dependency
  kDmaOverlap,        // worst-case DMA windows overlap (time-triggered)
  kMalformed,         // structural defect (bad core index, zero bytes, ...)
};

inline const char* to_string(ViolationKind k) {
  switch (k) {
    case ViolationKind::kCycle: return "cycle";
    case ViolationKind::kMissingProducer: return "missing-producer";
    case ViolationKind::kCapacity: return "capacity";
    case ViolationKind::kPrematureTrigger: return "premature-trigger";
    case ViolationKind::kDmaOverlap: return "dma-overlap";
    case ViolationKind::kMalformed: return "malformed";
  }
  return "?";
}

struct Violation {
  ViolationKind kind;
  std::uint32_t entry_id;
  std::string detail;
};

struct ValidationReport {
  std::vector<Violation> violations;

  bool ok() const { return violations.empty(); }
  bool has(ViolationKind k) const {
    return std::any_of(violations.begin(), violations.end(),
                       [k](const Violation& v) { return v.kind == k; });
  }
  std::string to_string() const {
    if (ok()) return "schedule valid\n";
    std::ostringstream os;
    for (const auto& v : violations)
      os << predsim::to_string(v.kind) << " at entry " << v.entry_id << ": "
         << v.detail << "\n";
    return os.str();
  }
};

namespace detail {

// Rolling per-entry reachability over the (already order-checked) DAG.
class ReachSets {
 public:
  ReachSets(std::size_t n) : words_((n + 63) / 64), sets_(n * words_, 0) {}

  void absorb(std::size_t entry, std::size_t dep) {
    std::uint64_t* dst = &sets_[entry * words_];
    const std::uint64_t* src = &sets_[dep * words_];
    for (std::size_t w = 0; w < words_; ++w) dst[w] |= src[w];
    dst[dep / 64] |= 1ull << (dep % 64);
  }
  bool reaches(std::size_t entry, std::size_t target) const {
    return sets_[entry * words_ + target / 64] & (1ull << (target % 64));
  }

 private:
  std::size_t words_;
  std::vector<std::uint64_t> sets_;
};

}  // namespace detail

// Checks a schedule against the machine and capacity rules. Violations are
// data, not errors; an empty report is the planner's postcondition.
inline ValidationReport validate(const Schedule& s, const ArchConfig& cfg) {
  ValidationReport report;
  auto add = [&](ViolationKind k, std::uint32_t id, std::string detail) {
    report.violations.push_back({k, id, std::move(detail)});
  };

  const std::size_t n = s.entries.size();
  if (s.mode == ScheduleMode::kTimeTriggered && s.trigger_times.size() != n) {
    add(ViolationKind::kMalformed, 0,
        "time-triggered schedule needs one trigger per entry");
    return report;
  }

  // Map ids to list positions; deps must point strictly backwards.
  std::map<std::uint32_t, std::size_t> pos;
  for (std::size_t i = 0; i < n; ++i) {
    const auto& e = s.entries[i];
    if (!pos.emplace(e.id, i).second)
      add(ViolationKind::kMalformed, e.id, "duplicate entry id");
  }
  std::vector<std::vector<std::size_t>> dep_idx(n);
  for (std::size_t i = 0; i < n; ++i) {
    const auto& e = s.entries[i];
    for (std::uint32_t d : e.deps) {
      auto it = pos.find(d);
      if (it == pos.end()) {
        add(ViolationKind::kCycle, e.id,
            "dependency on unknown entry " + std::to_string(d));
      } else if (it->second >= i) {
        add(ViolationKind::kCycle, e.id,
            "dependency on entry " + std::to_string(d) +
                " breaks dependency order (cycle or forward reference)");
      } else {
        dep_idx[i].push_back(it->second);
      }
    }
  }

  // Per-entry structural checks.
  for (const auto& e : s.entries) {
    if (e.is_dma()) {
      const auto& t = e.dma();
      if (t.bytes == 0)
        add(ViolationKind::kMalformed, e.id, "zero-byte transfer");
      if (t.src == t.dst)
        add(ViolationKind::kMalformed, e.id, "identical src and dst regions");
      for (const MemRegion* r : {&t.src, &t.dst})
        if (r->is_spm() && r->core >= cfg.worker_cores)
          add(ViolationKind::kMalformed, e.id,
              "region names core " + std::to_string(r->core) + " but only " +
                  std::to_string(cfg.worker_cores) + " cores exist");
    } else {
      const auto& c = e.compute();
      if (c.core >= cfg.worker_cores)
        add(ViolationKind::kMalformed, e.id,
            "compute on core " + std::to_string(c.core) + " but only " +
                std::to_string(cfg.worker_cores) + " cores exist");
      if (c.task.rows < 1 || c.task.block_width < 1 || c.task.inner_dim < 1)
        add(ViolationKind::kMalformed, e.id, "degenerate kernel task");
    }
  }
  if (!report.ok()) return report;  // later passes assume a sane DAG

  // Producer check: every compute must be reachable from transfers that fill
  // its A buffer and its B block.
  detail::ReachSets reach(n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t d : dep_idx[i]) reach.absorb(i, d);
  for (std::size_t i = 0; i < n; ++i) {
    const auto& e = s.entries[i];
    if (!e.is_compute()) continue;
    const auto& c = e.compute();
    for (SpmSlot slot : {c.a_slot, SpmSlot::kBBlock}) {
      const MemRegion want = MemRegion::spm(c.core, slot);
      bool produced = false;
      for (std::size_t j = 0; j < i && !produced; ++j)
        produced = s.entries[j].is_dma() && s.entries[j].dma().dst == want &&
                   reach.reaches(i, j);
      if (!produced)
        add(ViolationKind::kMissingProducer, e.id,
            "no producing transfer into " + predsim::to_string(want) +
                " among dependencies");
    }
  }

  // Capacity: walk list order tracking slot occupancy per core. Loads and
  // compute outputs occupy their slot; a store to DRAM frees its source slot.
  {
    std::vector<std::array<ByteCount, 4>> occ(cfg.worker_cores,
                                              {0, 0, 0, 0});
    auto check = [&](std::uint32_t core, std::uint32_t id) {
      ByteCount used = cfg.mailbox_bytes;
      for (ByteCount b : occ[core]) used += b;
      if (used > cfg.data_spm_bytes)
        add(ViolationKind::kCapacity, id,
            "core " + std::to_string(core) + " data scratchpad needs " +
                std::to_string(used) + " bytes, capacity " +
                std::to_string(cfg.data_spm_bytes));
    };
    for (const auto& e : s.entries) {
      if (e.is_dma()) {
        const auto& t = e.dma();
        if (t.dst.is_spm()) {
          occ[t.dst.core][static_cast<int>(t.dst.slot)] = t.bytes;
          check(t.dst.core, e.id);
        }
        if (t.src.is_spm() && t.dst.is_dram())
          occ[t.src.core][static_cast<int>(t.src.slot)] = 0;
      } else {
        const auto& c = e.compute();
        occ[c.core][static_cast<int>(SpmSlot::kCFrag)] =
            kernel_output_bytes(c.task);
        check(c.core, e.id);
      }
    }
  }

  // Time-triggered: a release must not precede the worst-case completion of
  // any dependency, and worst-case DMA windows must not overlap.
  if (s.mode == ScheduleMode::kTimeTriggered) {
    std::vector<Cycles> wc_done(n);
    for (std::size_t i = 0; i < n; ++i)
      wc_done[i] = s.trigger_times[i] + worst_case_entry_cycles(s.entries[i], cfg);
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t d : dep_idx[i])
        if (s.trigger_times[i] < wc_done[d])
          add(ViolationKind::kPrematureTrigger, s.entries[i].id,
              "trigger " + std::to_string(s.trigger_times[i]) +
                  " precedes worst-case completion " +
                  std::to_string(wc_done[d]) + " of entry " +
                  std::to_string(s.entries[d].id));
    }
    std::vector<std::size_t> dma;
    for (std::size_t i = 0; i < n; ++i)
      if (s.entries[i].is_dma()) dma.push_back(i);
    std::sort(dma.begin(), dma.end(), [&](std::size_t a, std::size_t b) {
      return s.trigger_times[a] < s.trigger_times[b];
    });
    for (std::size_t k = 1; k < dma.size(); ++k) {
      std::size_t prev = dma[k - 1], cur = dma[k];
      if (s.trigger_times[cur] < wc_done[prev])
        add(ViolationKind::kDmaOverlap, s.entries[cur].id,
            "dma window overlaps entry " + std::to_string(s.entries[prev].id) +
                " (busy until " + std::to_string(wc_done[prev]) + ")");
    }
  }

  return report;
}

// ---------------------------------------------------------------------------
// Worst-case timing walk and WCET bound
// ---------------------------------------------------------------------------

namespace detail {

struct WcWalk {
  std::vector<Cycles> start;
  std::vector<Cycles> completion;
  Cycles makespan = 0;
};

// Entry start/completion under per-entry worst-case durations, with list-order
// service on the DMA engine and on every core.
inline WcWalk worst_case_walk(const Schedule& s, const ArchConfig& cfg) {
  WcWalk w;
  const std::size_t n = s.entries.size();
  w.start.resize(n);
  w.completion.resize(n);
  std::map<std::uint32_t, std::size_t> pos;
  for (std::size_t i = 0; i < n; ++i) pos.emplace(s.entries[i].id, i);

  Cycles dma_free = 0;
  std::vector<Cycles> core_free(cfg.worker_cores, 0);
  for (std::size_t i = 0; i < n; ++i) {
    const auto& e = s.entries[i];
    Cycles ready = 0;
    for (std::uint32_t d : e.deps) ready = std::max(ready, w.completion[pos.at(d)]);
    const Cycles dur = worst_case_entry_cycles(e, cfg);
    if (e.is_dma()) {
      w.start[i] = std::max(ready, dma_free);
      w.completion[i] = w.start[i] + dur;
      dma_free = w.completion[i];
    } else {
      const std::uint32_t core = e.compute().core;
      w.start[i] = poll_latency(std::max(ready, core_free[core]),
                                cfg.poll_interval_cycles) +
                   cfg.dispatch_cycles;
      w.completion[i] = w.start[i] + dur;
      core_free[core] = w.completion[i];
    }
    w.makespan = std::max(w.makespan, w.completion[i]);
  }
  return w;
}

}  // namespace detail

// Compositional WCET bound. Self-timed schedules take the worst-case walk;
// time-triggered schedules are bounded by max(trigger + worst-case duration).
inline Cycles wcet_bound(const Schedule& s, const ArchConfig& cfg) {
  ValidationReport report = validate(s, cfg);
  if (!report.ok())
    throw std::runtime_error(
        "wcet_bound: schedule is invalid, run validate() first:\n" +
        report.to_string());
  if (s.mode == ScheduleMode::kTimeTriggered) {
    Cycles bound = 0;
    for (std::size_t i = 0; i < s.entries.size(); ++i)
      bound = std::max(bound, s.trigger_times[i] +
                                  worst_case_entry_cycles(s.entries[i], cfg));
    return bound;
  }
  return detail::worst_case_walk(s, cfg).makespan;
}

// ASAP release times under worst-case durations; valid by construction.
inline void assign_triggers(Schedule& s, const ArchConfig& cfg) {
  detail::WcWalk w = detail::worst_case_walk(s, cfg);
  s.mode = ScheduleMode::kTimeTriggered;
  s.trigger_times = std::move(w.start);
}

// ---------------------------------------------------------------------------
// Matmul planning
// ---------------------------------------------------------------------------

struct MatmulPlan {
  std::uint32_t n = 0;
  std::uint32_t block_width = 0;
  std::uint32_t passes = 0;
  std::uint32_t rows_per_batch = 0;
  bool double_buffer = false;
};

struct PlanError : std::runtime_error {
  ByteCount min_required_bytes;
  PlanError(const std::string& what, ByteCount min_required)
      : std::runtime_error(what), min_required_bytes(min_required) {}
};

struct PlanOptions {
  ScheduleMode mode = ScheduleMode::kSelfTimed;
  std::uint32_t rows_per_batch = 4;
  std::uint32_t block_width = 0;            // 0 = auto (largest fitting pow2)
  std::optional<bool> double_buffer = {};   // default: on iff self-timed
};

struct PlanResult {
  MatmulPlan plan;
  Schedule schedule;
};

// Plans C = A * B for square n x n matrices: B column blocks stay resident on
// the workers for a whole pass while A rows stream through in batches, with
// C fragments written straight back. All "broadcasts" are per-core copies
// because the crossbar has a single initiator.
inline PlanResult plan_matmul(const ArchConfig& cfg, std::uint32_t n,
                              const PlanOptions& opts = {}) {
  validate(cfg);
  if (n < 1) throw std::invalid_argument("plan_matmul: n must be >= 1");

  const ByteCount eb = cfg.element_bytes();
  const ByteCount ab = cfg.acc_bytes();
  const std::uint32_t cores = cfg.worker_cores;
  const bool db = opts.double_buffer.value_or(opts.mode == ScheduleMode::kSelfTimed);
  const std::uint32_t a_buffers = db ? 2 : 1;
  const std::uint32_t rpb = std::min(std::max(opts.rows_per_batch, 1u), n);
  const ByteCount usable = cfg.usable_spm_bytes();

  // Worst concurrent residency per worker: B block + live A buffers + one
  // C fragment staging area.
  auto footprint = [&](std::uint64_t bw) {
    return static_cast<ByteCount>(n) * bw * eb +
           static_cast<ByteCount>(a_buffers) * rpb * n * eb +
           static_cast<ByteCount>(rpb) * bw * ab;
  };

  std::uint32_t bw;
  if (opts.block_width == 0) {
    std::uint64_t cap = std::bit_ceil(static_cast<std::uint64_t>(ceil_div(n, cores)));
    while (cap > 1 && footprint(cap) > usable) cap >>= 1;
    if (footprint(cap) > usable)
      throw PlanError("no feasible block width: a worker data scratchpad of "
                      "at least " +
                          std::to_string(footprint(1) + cfg.mailbox_bytes) +
                          " bytes is required (have " +
                          std::to_string(cfg.data_spm_bytes) + ")",
                      footprint(1) + cfg.mailbox_bytes);
    bw = static_cast<std::uint32_t>(cap);
  } else {
    bw = opts.block_width;
    if (footprint(bw) > usable)
      throw PlanError("requested block width " + std::to_string(bw) +
                          " does not fit: needs " +
                          std::to_string(footprint(bw) + cfg.mailbox_bytes) +
                          " bytes of data scratchpad",
                      footprint(bw) + cfg.mailbox_bytes);
  }

  const std::uint32_t passes = static_cast<std::uint32_t>(
      ceil_div(n, static_cast<std::uint64_t>(cores) * bw));
  const std::uint32_t num_batches = static_cast<std::uint32_t>(ceil_div(n, rpb));

  Schedule sched;
  sched.mode = ScheduleMode::kSelfTimed;
  std::uint32_t next_id = 0;
  auto emit = [&](std::variant<DmaTransfer, ComputeTask> op,
                  std::vector<std::uint32_t> deps) {
    sched.entries.push_back({next_id, std::move(op), std::move(deps)});
    return next_id++;
  };

  // Per-core planning state across passes.
  std::vector<std::vector<std::uint32_t>> computes_of(cores);  // stream order
  std::vector<std::optional<std::uint32_t>> last_compute(cores);

  auto a_slot_for = [&](std::uint32_t stream_idx) {
    return (db && stream_idx % 2 == 1) ? SpmSlot::kABuf1 : SpmSlot::kABuf0;
  };

  for (std::uint32_t p = 0; p < passes; ++p) {
    const std::uint32_t col_base = p * cores * bw;

    struct ActiveCore {
      std::uint32_t core, col0, width;
      std::uint32_t b_load = 0;
      std::uint32_t a_load = 0;
    };
    std::vector<ActiveCore> active;
    for (std::uint32_t c = 0; c < cores; ++c) {
      const std::uint64_t col0 = col_base + static_cast<std::uint64_t>(c) * bw;
      if (col0 >= n) break;
      active.push_back({c, static_cast<std::uint32_t>(col0),
                        static_cast<std::uint32_t>(
                            std::min<std::uint64_t>(bw, n - col0))});
    }

    for (auto& ac : active) {
      std::vector<std::uint32_t> deps;
      if (last_compute[ac.core]) deps.push_back(*last_compute[ac.core]);
      ac.b_load = emit(DmaTransfer{MemRegion::dram(),
                                   MemRegion::spm(ac.core, SpmSlot::kBBlock),
                                   static_cast<ByteCount>(n) * ac.width * eb},
                       std::move(deps));
    }

    auto emit_a_loads = [&](std::uint32_t batch) {
      const std::uint32_t rows =
          std::min(rpb, n - batch * rpb);
      const std::uint32_t stream = p * num_batches + batch;
      for (auto& ac : active) {
        std::vector<std::uint32_t> deps;
        const auto& prior = computes_of[ac.core];
        if (prior.size() >= a_buffers)
          deps.push_back(prior[prior.size() - a_buffers]);
        ac.a_load = emit(
            DmaTransfer{MemRegion::dram(),
                        MemRegion::spm(ac.core, a_slot_for(stream)),
                        static_cast<ByteCount>(rows) * n * eb},
            std::move(deps));
      }
    };

    emit_a_loads(0);
    std::vector<std::uint32_t> pending_a(active.size());
    for (std::size_t i = 0; i < active.size(); ++i) pending_a[i] = active[i].a_load;

    for (std::uint32_t k = 0; k < num_batches; ++k) {
      const std::uint32_t rows = std::min(rpb, n - k * rpb);
      const std::uint32_t stream = p * num_batches + k;

      std::vector<std::uint32_t> batch_computes(active.size());
      for (std::size_t i = 0; i < active.size(); ++i) {
        auto& ac = active[i];
        KernelTask task{rows, ac.width, n, cfg.element_bits, cfg.acc_bits};
        const std::uint32_t id =
            emit(ComputeTask{ac.core, task, k * rpb, ac.col0, a_slot_for(stream)},
                 {ac.b_load, pending_a[i]});
        batch_computes[i] = id;
        computes_of[ac.core].push_back(id);
        last_compute[ac.core] = id;
      }

      // With double buffering the next batch is prefetched while this batch
      // computes, so its loads must precede this batch's write-backs in DMA
      // service order.
      if (db && k + 1 < num_batches) {
        emit_a_loads(k + 1);
        for (std::size_t i = 0; i < active.size(); ++i)
          pending_a[i] = active[i].a_load;
      }

      for (std::size_t i = 0; i < active.size(); ++i) {
        auto& ac = active[i];
        emit(DmaTransfer{MemRegion::spm(ac.core, SpmSlot::kCFrag),
                         MemRegion::dram(),
                         static_cast<ByteCount>(rows) * ac.width * ab},
             {batch_computes[i]});
      }

      if (!db && k + 1 < num_batches) {
        emit_a_loads(k + 1);
        for (std::size_t i = 0; i < active.size(); ++i)
          pending_a[i] = active[i].a_load;
      }
    }
  }

  if (opts.mode == ScheduleMode::kTimeTriggered) assign_triggers(sched, cfg);

  MatmulPlan plan{n, bw, passes, rpb, db};
  return PlanResult{plan, std::move(sched)};
}

// ---------------------------------------------------------------------------
// Text format (stable; golden-file tested)
// ---------------------------------------------------------------------------

namespace detail {

inline std::string deps_to_string(const std::vector<std::uint32_t>& deps) {
  if (deps.empty()) return "-";
  std::string out;
  for (std::size_t i = 0; i < deps.size(); ++i)
    out += (i ? "," : "") + std::to_string(deps[i]);
  return out;
}

inline std::vector<std::uint32_t> deps_from_string(const std::string& s) {
  std::vector<std::uint32_t> deps;
  if (s == "-") return deps;
  std::stringstream ss(s);
  std::string tok;
  while (std::getline(ss, tok, ','))
    deps.push_back(static_cast<std::uint32_t>(std::stoul(tok)));
  return deps;
}

inline MemRegion region_from_string(const std::string& s) {
  if (s == "dram") return MemRegion::dram();
  if (s.rfind("spm:", 0) == 0) {
    auto second = s.find(':', 4);
    if (second != std::string::npos) {
      std::uint32_t core =
          static_cast<std::uint32_t>(std::stoul(s.substr(4, second - 4)));
      return MemRegion::spm(core, spm_slot_from_string(s.substr(second + 1)));
    }
  }
  throw std::invalid_argument("bad region '" + s + "'");
}

}  // namespace detail

inline void write_schedule(std::ostream& out, const Schedule& s) {
  out << "# predsim schedule v1\n";
  out << "mode " << to_string(s.mode) << "\n";
  for (const auto& e : s.entries) {
    if (e.is_dma()) {
      const auto& t = e.dma();
      out << "dma " << e.id << " " << to_string(t.src) << " " << to_string(t.dst)
          << " " << t.bytes << " deps=" << detail::deps_to_string(e.deps) << "\n";
    } else {
      const auto& c = e.compute();
      out << "compute " << e.id << " core=" << c.core << " rows=" << c.task.rows
          << " bw=" << c.task.block_width << " n=" << c.task.inner_dim
          << " eb=" << c.task.element_bits << " ab=" << c.task.acc_bits
          << " row0=" << c.row0 << " col0=" << c.col0
          << " a=" << to_string(c.a_slot)
          << " deps=" << detail::deps_to_string(e.deps) << "\n";
    }
  }
  if (s.mode == ScheduleMode::kTimeTriggered)
    for (std::size_t i = 0; i < s.entries.size(); ++i)
      out << "trigger " << s.entries[i].id << " " << s.trigger_times[i] << "\n";
}

inline Schedule parse_schedule(std::istream& in) {
  Schedule s;
  std::map<std::uint32_t, Cycles> triggers;
  std::string line;
  int lineno = 0;
  auto bad = [&](const std::string& why) {
    throw std::runtime_error("schedule line " + std::to_string(lineno) + ": " + why);
  };
  auto field = [&](const std::string& tok, const std::string& key) {
    if (tok.rfind(key + "=", 0) != 0) bad("expected " + key + "=..., got '" + tok + "'");
    return tok.substr(key.size() + 1);
  };
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty() || line[0] == '#') continue;
    std::stringstream ss(line);
    std::string head;
    ss >> head;
    if (head == "mode") {
      std::string m;
      ss >> m;
      if (m == "self-timed") s.mode = ScheduleMode::kSelfTimed;
      else if (m == "time-triggered") s.mode = ScheduleMode::kTimeTriggered;
      else bad("unknown mode '" + m + "'");
    } else if (head == "dma") {
      std::uint32_t id;
      std::string src, dst, deps;
      ByteCount bytes;
      if (!(ss >> id >> src >> dst >> bytes >> deps)) bad("malformed dma entry");
      s.entries.push_back({id,
                           DmaTransfer{detail::region_from_string(src),
                                       detail::region_from_string(dst), bytes},
                           detail::deps_from_string(field(deps, "deps"))});
    } else if (head == "compute") {
      std::uint32_t id;
      std::string core, rows, bw, dim, ebits, abits, row0, col0, slot, deps;
      if (!(ss >> id >> core >> rows >> bw >> dim >> ebits >> abits >> row0 >>
            col0 >> slot >> deps))
        bad("malformed compute entry");
      ComputeTask c;
      c.core = static_cast<std::uint32_t>(std::stoul(field(core, "core")));
      c.task.rows = static_cast<std::uint32_t>(std::stoul(field(rows, "rows")));
      c.task.block_width = static_cast<std::uint32_t>(std::stoul(field(bw, "bw")));
      c.task.inner_dim = static_cast<std::uint32_t>(std::stoul(field(dim, "n")));
      c.task.element_bits = std::stoull(field(ebits, "eb"));
      c.task.acc_bits = std::stoull(field(abits, "ab"));
      c.row0 = static_cast<std::uint32_t>(std::stoul(field(row0, "row0")));
      c.col0 = static_cast<std::uint32_t>(std::stoul(field(col0, "col0")));
      c.a_slot = spm_slot_from_string(field(slot, "a"));
      s.entries.push_back({id, c, detail::deps_from_string(field(deps, "deps"))});
    } else if (head == "trigger") {
      std::uint32_t id;
      Cycles at;
      if (!(ss >> id >> at)) bad("malformed trigger line");
      triggers[id] = at;
    } else {
      bad("unknown directive '" + head + "'");
    }
  }
  if (s.mode == ScheduleMode::kTimeTriggered) {
    s.trigger_times.resize(s.entries.size(), 0);
    for (std::size_t i = 0; i < s.entries.size(); ++i) {
      auto it = triggers.find(s.entries[i].id);
      if (it == triggers.end())
        throw std::runtime_error("missing trigger for entry " +
                                 std::to_string(s.entries[i].id));
      s.trigger_times[i] = it->second;
    }
  }
  return s;
}

}  // namespace predsim
