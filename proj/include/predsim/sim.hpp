#pragma once

// Event-driven execution of a schedule on the machine model. Every component
// cost is a closed-form duration, so the engine advances entry by entry with
// exact integer timestamps instead of stepping cycles.
//
// Service order mirrors the deployed system: the management core walks the
// schedule in order, so the DMA engine and each worker core process their
// entries in list order. Self-timed entries start once their dependencies
// are done and their resource is free; time-triggered entries start exactly
// at their release cycle.

#include <algorithm>
#include <cstdint>
#include <map>
#include <optional>
#include <ostream>
#include <string>
#include <thread>
#include <vector>

#include "predsim/config.hpp"
#include "predsim/kernel.hpp"
#include "predsim/machine.hpp"
#include "predsim/schedule.hpp"

namespace predsim {

// ---------------------------------------------------------------------------
// Inputs and results
// ---------------------------------------------------------------------------

// Functional payload for a matmul schedule. Kept apart from the timing seed:
// every run of a campaign computes on the same data.
struct Workload {
  Matrix a;
  Matrix b;
};

inline Workload make_workload(std::uint32_t n, std::uint64_t element_bits,
                              std::uint64_t data_seed) {
  return Workload{random_matrix(n, n, element_bits, data_seed),
                  random_matrix(n, n, element_bits, data_seed ^ 0x5eedull)};
}

struct TraceEvent {
  Cycles cycle;
  std::string component;  // "dma", "core<i>", "mgmt"
  std::uint32_t entry_id;
  std::string kind;  // "start", "end", "poll", "fault"
};

// Reserved control area in each worker's data scratchpad: a status bit plus
// the next-task descriptor. The worker runtime holds the bit at running for
// the whole kernel; the manager may only deposit into an idle mailbox.
struct Mailbox {
  enum class Status : std::uint8_t { kIdle, kRunning };

  Cycles running_until = 0;
  std::optional<std::uint32_t> next_task;

  Status status_at(Cycles t) const {
    return t < running_until ? Status::kRunning : Status::kIdle;
  }

  void deposit(Cycles t, std::uint32_t entry_id, Cycles kernel_duration) {
    if (status_at(t) == Status::kRunning)
      throw std::logic_error("task deposited into a running worker's mailbox");
    next_task = entry_id;
    running_until = t + kernel_duration;
  }
};

struct EntryTiming {
  Cycles start = 0;
  Cycles completion = 0;
  Cycles duration() const { return completion - start; }
};

struct SimFault {
  std::uint32_t entry_id;
  Cycles cycle;
  std::string what;
};

struct SimResult {
  Cycles total_cycles = 0;
  std::vector<Cycles> per_core_busy_cycles;
  Cycles dma_busy_cycles = 0;
  std::uint64_t dram_access_count = 0;
  std::vector<EntryTiming> entry_times;  // by entry list position
  std::vector<TraceEvent> trace;         // populated when requested
  std::vector<SimFault> faults;
  std::optional<Matrix> output;  // C, when a workload was supplied
  std::uint64_t seed = 0;
};

struct SimOptions {
  bool record_trace = false;
  const Workload* workload = nullptr;
};

// ---------------------------------------------------------------------------
// Engine
// ---------------------------------------------------------------------------

inline SimResult run(const Schedule& s, const ArchConfig& cfg,
                     std::uint64_t seed, const SimOptions& opts = {}) {
  const std::size_t n = s.entries.size();
  if (s.mode == ScheduleMode::kTimeTriggered && s.trigger_times.size() != n)
    throw std::invalid_argument("time-triggered schedule lacks trigger times");

  SimResult res;
  res.seed = seed;
  res.per_core_busy_cycles.assign(cfg.worker_cores, 0);
  res.entry_times.resize(n);

  std::map<std::uint32_t, std::size_t> pos;
  for (std::size_t i = 0; i < n; ++i) pos.emplace(s.entries[i].id, i);

  if (opts.workload != nullptr) {
    const std::uint32_t dim = opts.workload->a.rows;
    res.output = Matrix(dim, dim);
  }

  auto note = [&](Cycles cycle, std::string component, std::uint32_t id,
                  std::string kind) {
    if (opts.record_trace)
      res.trace.push_back({cycle, std::move(component), id, std::move(kind)});
  };

  DmaEngine dma{cfg.dma_setup_cycles, 0};
  std::vector<Mailbox> mailboxes(cfg.worker_cores);

  for (std::size_t i = 0; i < n; ++i) {
    const auto& e = s.entries[i];
    Cycles ready = 0;
    for (std::uint32_t d : e.deps) {
      auto it = pos.find(d);
      if (it == pos.end())
        throw std::invalid_argument("entry " + std::to_string(e.id) +
                                    " depends on unknown entry " +
                                    std::to_string(d));
      ready = std::max(ready, res.entry_times[it->second].completion);
    }

    if (e.is_dma()) {
      const auto& t = e.dma();
      JitterRng rng = entry_rng(seed, e.id);
      const Cycles duration =
          dma_transfer_cycles(cfg.dma_cost_params(), t.src, t.dst, t.bytes, rng,
                              t.dst.is_spm() ? cfg.usable_spm_bytes() : 0);
      Cycles start;
      if (s.mode == ScheduleMode::kTimeTriggered) {
        start = s.trigger_times[i];
        if (start < ready) {
          res.faults.push_back({e.id, start, "dependency incomplete at trigger"});
          note(start, "dma", e.id, "fault");
          start = std::max(start, ready);
        }
        if (start < dma.busy_until) {
          res.faults.push_back({e.id, start, "dma engine busy at trigger"});
          note(start, "dma", e.id, "fault");
          start = std::max(start, dma.busy_until);
        }
      } else {
        start = std::max(ready, dma.busy_until);
      }
      dma.issue(start, duration);
      res.entry_times[i] = {start, start + duration};
      res.dma_busy_cycles += duration;
      if (t.src.is_dram() || t.dst.is_dram()) ++res.dram_access_count;
      note(start, "dma", e.id, "start");
      note(start + duration, "dma", e.id, "end");
    } else {
      const auto& c = e.compute();
      if (c.core >= cfg.worker_cores)
        throw std::invalid_argument("compute entry " + std::to_string(e.id) +
                                    " targets nonexistent core");
      const Cycles duration = kernel_cycles(c.task, cfg);
      Mailbox& mailbox = mailboxes[c.core];
      Cycles start;
      if (s.mode == ScheduleMode::kTimeTriggered) {
        start = s.trigger_times[i];
        if (start < ready) {
          res.faults.push_back({e.id, start, "dependency incomplete at trigger"});
          note(start, "core" + std::to_string(c.core), e.id, "fault");
          start = std::max(start, ready);
        }
        if (mailbox.status_at(start) == Mailbox::Status::kRunning) {
          res.faults.push_back({e.id, start, "core busy at trigger"});
          note(start, "core" + std::to_string(c.core), e.id, "fault");
          start = mailbox.running_until;
        }
      } else {
        const Cycles observed = poll_latency(
            std::max(ready, mailbox.running_until), cfg.poll_interval_cycles);
        note(observed, "mgmt", e.id, "poll");
        start = observed + cfg.dispatch_cycles;
      }
      mailbox.deposit(start, e.id, duration);
      res.entry_times[i] = {start, start + duration};
      res.per_core_busy_cycles[c.core] += duration;
      note(start, "core" + std::to_string(c.core), e.id, "start");
      note(start + duration, "core" + std::to_string(c.core), e.id, "end");

      if (res.output) {
        const Matrix a_rows = opts.workload->a.slice(c.row0, c.task.rows, 0,
                                                     c.task.inner_dim);
        const Matrix b_block = opts.workload->b.slice(0, c.task.inner_dim,
                                                      c.col0, c.task.block_width);
        const Matrix frag =
            kernel_exec(a_rows, b_block, c.task.element_bits, c.task.acc_bits,
                        static_cast<std::uint32_t>(
                            std::max<std::uint64_t>(1, cfg.vreg_bits / c.task.element_bits)));
        for (std::uint32_t r = 0; r < frag.rows; ++r)
          for (std::uint32_t col = 0; col < frag.cols; ++col)
            res.output->at(c.row0 + r, c.col0 + col) = frag.at(r, col);
      }
    }
    res.total_cycles = std::max(res.total_cycles, res.entry_times[i].completion);
  }

  return res;
}

// ---------------------------------------------------------------------------
// Campaigns
// ---------------------------------------------------------------------------

// Runs with seeds seed0 .. seed0+runs-1. Runs share nothing mutable, so they
// may execute on a thread pool; results come back in seed order either way.
inline std::vector<SimResult> run_campaign(const Schedule& s,
                                           const ArchConfig& cfg,
                                           std::uint32_t runs,
                                           std::uint64_t seed0,
                                           const SimOptions& opts = {},
                                           bool parallel = true) {
  if (runs < 1) throw std::invalid_argument("run_campaign: runs must be >= 1");
  std::vector<SimResult> results(runs);
  const unsigned hw = std::max(1u, std::thread::hardware_concurrency());
  if (!parallel || runs == 1 || hw == 1) {
    for (std::uint32_t i = 0; i < runs; ++i)
      results[i] = run(s, cfg, seed0 + i, opts);
    return results;
  }
  const unsigned workers = std::min<unsigned>(hw, runs);
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (unsigned w = 0; w < workers; ++w) {
    pool.emplace_back([&, w] {
      for (std::uint32_t i = w; i < runs; i += workers)
        results[i] = run(s, cfg, seed0 + i, opts);
    });
  }
  for (auto& t : pool) t.join();
  return results;
}

// ---------------------------------------------------------------------------
// Trace output: "<cycle> <component> <entry-id> <kind>" per line
// ---------------------------------------------------------------------------

inline void write_trace(std::ostream& out, const SimResult& res) {
  std::vector<TraceEvent> events = res.trace;
  std::stable_sort(events.begin(), events.end(),
                   [](const TraceEvent& a, const TraceEvent& b) {
                     return a.cycle < b.cycle;
                   });
  for (const auto& ev : events)
    out << ev.cycle << " " << ev.component << " " << ev.entry_id << " "
        << ev.kind << "\n";
}

}  // namespace predsim
