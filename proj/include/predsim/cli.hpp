#pragma once

// Command implementations behind the predsim tool. Kept out of main() so the
// test suite can drive the exact code paths the binary runs.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "predsim/analysis.hpp"
#include "predsim/config.hpp"
#include "predsim/schedule.hpp"
#include "predsim/sim.hpp"

namespace predsim {

// Exit codes: 0 success, 2 infeasible plan or failed validation,
// 3 functional mismatch, 4 WCET bound violated, 1 anything else.
enum ExitCode {
  kExitOk = 0,
  kExitError = 1,
  kExitInvalid = 2,
  kExitFunctionalMismatch = 3,
  kExitBoundViolated = 4,
};

struct ExperimentSpec {
  std::string config_source = "Octa";  // preset name or config file path
  std::uint32_t n = 1024;
  std::uint32_t runs = 1;
  std::uint64_t seed = 1;
  ScheduleMode mode = ScheduleMode::kSelfTimed;
  std::optional<JitterDist> jitter;  // overrides the config's distribution
  bool check_functional = false;
  std::string trace_path;  // trace of the first run, when set
  std::string out_path;    // stats CSV; per-run CSV lands next to it
};

struct ValidationError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

namespace detail {

inline ArchConfig resolve_config(const std::string& source,
                                 std::optional<JitterDist> jitter) {
  ArchConfig cfg = load_config(source);
  if (jitter) cfg.dram.jitter_distribution = *jitter;
  return cfg;
}

inline std::string runs_csv_path(const std::string& stats_path) {
  std::filesystem::path p(stats_path);
  std::filesystem::path runs = p.parent_path() / p.stem();
  runs += "_runs";
  runs += p.extension().empty() ? std::filesystem::path(".csv") : p.extension();
  return runs.string();
}

struct CampaignOutcome {
  ArchConfig cfg;
  MatmulPlan plan;
  Cycles wcet = 0;
  std::vector<SimResult> results;
  CampaignStats st;
  std::uint64_t bound_violations = 0;
};

// Shared pipeline: plan, validate, bound, campaign. Throws on infeasible or
// invalid schedules; the callers map that to kExitInvalid.
inline CampaignOutcome run_pipeline(const ArchConfig& cfg, std::uint32_t n,
                                    std::uint32_t runs, std::uint64_t seed,
                                    ScheduleMode mode, const Workload* workload,
                                    std::ostream& log) {
  CampaignOutcome out;
  out.cfg = cfg;

  PlanResult planned = plan_matmul(cfg, n, PlanOptions{mode});
  out.plan = planned.plan;
  ValidationReport report = validate(planned.schedule, cfg);
  if (!report.ok())
    throw ValidationError("schedule validation failed:\n" + report.to_string());
  out.wcet = wcet_bound(planned.schedule, cfg);

  SimOptions opts;
  opts.workload = workload;
  out.results = run_campaign(planned.schedule, cfg, runs, seed, opts);
  out.st = stats(out.results);
  for (const auto& r : out.results)
    if (r.total_cycles > out.wcet) ++out.bound_violations;

  log << cfg.name << " n=" << n << ": block_width=" << out.plan.block_width
      << " passes=" << out.plan.passes << " entries="
      << planned.schedule.entries.size() << " wcet=" << out.wcet
      << " median=" << out.st.median_cycles << "\n";
  return out;
}

}  // namespace detail

// ---------------------------------------------------------------------------
// presets
// ---------------------------------------------------------------------------

inline int cmd_presets(std::ostream& out) {
  out << "name,worker_cores,vreg_bits,mult_bits,data_spm_bytes,imem_spm_bytes,"
         "mgmt_spm_bytes,fmax_hz,element_bits,acc_bits,"
         "spm_port_bytes_per_cycle\n";
  for (const auto& name : preset_names()) {
    const ArchConfig c = preset(name);
    out << c.name << "," << c.worker_cores << "," << c.vreg_bits << ","
        << c.mult_bits << "," << c.data_spm_bytes << "," << c.imem_spm_bytes
        << "," << c.mgmt_spm_bytes << "," << c.fmax_hz << "," << c.element_bits
        << "," << c.acc_bits << "," << c.spm_port() << "\n";
  }
  return kExitOk;
}

// ---------------------------------------------------------------------------
// run
// ---------------------------------------------------------------------------

inline int cmd_run(const ExperimentSpec& spec, std::ostream& log = std::cerr) {
  ArchConfig cfg;
  detail::CampaignOutcome outcome;
  Workload workload;
  try {
    cfg = detail::resolve_config(spec.config_source, spec.jitter);
    if (spec.check_functional)
      workload = make_workload(spec.n, cfg.element_bits, spec.seed);
    outcome = detail::run_pipeline(cfg, spec.n, spec.runs, spec.seed, spec.mode,
                                   spec.check_functional ? &workload : nullptr,
                                   log);
  } catch (const PlanError& e) {
    log << "error: " << e.what() << "\n";
    return kExitInvalid;
  } catch (const ValidationError& e) {
    log << "error: " << e.what() << "\n";
    return kExitInvalid;
  } catch (const std::exception& e) {
    log << "error: " << e.what() << "\n";
    return kExitError;
  }

  int exit_code = kExitOk;
  if (spec.check_functional) {
    const Matrix expected =
        reference_matmul(workload.a, workload.b, cfg.acc_bits);
    for (const auto& r : outcome.results)
      if (!r.output || !(*r.output == expected)) {
        log << "functional check FAILED for seed " << r.seed << "\n";
        exit_code = kExitFunctionalMismatch;
      }
    if (exit_code == kExitOk)
      log << "functional check passed for " << outcome.results.size()
          << " run(s)\n";
  }
  if (outcome.bound_violations > 0) {
    log << "WCET bound violated in " << outcome.bound_violations << " run(s)\n";
    exit_code = kExitBoundViolated;
  }

  // Per-run and stats CSV, either to files or to stdout.
  std::ostringstream runs_csv, stats_csv;
  write_runs_csv_header(runs_csv);
  for (const auto& r : outcome.results)
    write_runs_csv_row(runs_csv, cfg.name, spec.n, r);
  write_stats_csv_header(stats_csv);
  write_dram_model_comment(stats_csv, cfg);
  write_stats_csv_row(stats_csv, cfg.name, spec.n, outcome.st, outcome.wcet,
                      outcome.bound_violations);

  if (spec.out_path.empty()) {
    std::cout << runs_csv.str() << stats_csv.str();
  } else {
    std::ofstream stats_file(spec.out_path);
    if (!stats_file) {
      log << "error: cannot write " << spec.out_path << "\n";
      return kExitError;
    }
    stats_file << stats_csv.str();
    const std::string runs_path = detail::runs_csv_path(spec.out_path);
    std::ofstream runs_file(runs_path);
    runs_file << runs_csv.str();
    log << "wrote " << spec.out_path << " and " << runs_path << "\n";
  }

  if (!spec.trace_path.empty()) {
    PlanResult planned = plan_matmul(cfg, spec.n, PlanOptions{spec.mode});
    SimOptions topts;
    topts.record_trace = true;
    const SimResult traced = run(planned.schedule, cfg, spec.seed, topts);
    std::ofstream trace_file(spec.trace_path);
    write_trace(trace_file, traced);
  }
  return exit_code;
}

// ---------------------------------------------------------------------------
// sweep
// ---------------------------------------------------------------------------

inline int cmd_sweep(const std::vector<std::string>& sources, std::uint32_t n,
                     std::uint32_t runs, std::uint64_t seed0,
                     ScheduleMode mode, std::optional<JitterDist> jitter,
                     const std::string& out_path, std::ostream& log = std::cerr) {
  if (sources.empty()) {
    log << "error: sweep needs at least one preset or config\n";
    return kExitError;
  }
  std::ostringstream csv;
  write_stats_csv_header(csv);
  csv << "# seeds " << seed0 << ".." << (seed0 + runs - 1) << " per config\n";
  for (const auto& source : sources) {
    try {
      const ArchConfig cfg = detail::resolve_config(source, jitter);
      const detail::CampaignOutcome outcome =
          detail::run_pipeline(cfg, n, runs, seed0, mode, nullptr, log);
      write_dram_model_comment(csv, cfg);
      write_stats_csv_row(csv, cfg.name, n, outcome.st, outcome.wcet,
                          outcome.bound_violations);
      if (outcome.bound_violations > 0) {
        log << "error: WCET bound violated for " << cfg.name << "\n";
        return kExitBoundViolated;
      }
    } catch (const PlanError& e) {
      log << "error while sweeping '" << source << "': " << e.what() << "\n";
      return kExitInvalid;
    } catch (const ValidationError& e) {
      log << "error while sweeping '" << source << "': " << e.what() << "\n";
      return kExitInvalid;
    } catch (const std::exception& e) {
      log << "error while sweeping '" << source << "': " << e.what() << "\n";
      return kExitError;
    }
  }
  if (out_path.empty()) {
    std::cout << csv.str();
  } else {
    std::ofstream f(out_path);
    if (!f) {
      log << "error: cannot write " << out_path << "\n";
      return kExitError;
    }
    f << csv.str();
    log << "wrote " << out_path << "\n";
  }
  return kExitOk;
}

// ---------------------------------------------------------------------------
// roofline
// ---------------------------------------------------------------------------

inline int cmd_roofline(const std::vector<std::string>& sources,
                        const std::string& out_path,
                        std::ostream& log = std::cerr) {
  if (sources.empty()) {
    log << "error: roofline needs at least one preset or config\n";
    return kExitError;
  }
  std::ostringstream csv;
  write_roofline_csv_header(csv);
  const std::vector<double> grid = default_intensity_grid();
  try {
    for (const auto& source : sources)
      write_roofline_csv(csv, detail::resolve_config(source, {}), grid);
  } catch (const std::exception& e) {
    log << "error: " << e.what() << "\n";
    return kExitError;
  }
  if (out_path.empty()) {
    std::cout << csv.str();
  } else {
    std::ofstream f(out_path);
    if (!f) {
      log << "error: cannot write " << out_path << "\n";
      return kExitError;
    }
    f << csv.str();
    log << "wrote " << out_path << "\n";
  }
  return kExitOk;
}

// ---------------------------------------------------------------------------
// plan (schedule export)
// ---------------------------------------------------------------------------

inline int cmd_plan(const std::string& source, std::uint32_t n,
                    ScheduleMode mode, const std::string& out_path,
                    std::ostream& log = std::cerr) {
  try {
    const ArchConfig cfg = detail::resolve_config(source, {});
    const PlanResult planned = plan_matmul(cfg, n, PlanOptions{mode});
    if (out_path.empty()) {
      write_schedule(std::cout, planned.schedule);
    } else {
      std::ofstream f(out_path);
      if (!f) {
        log << "error: cannot write " << out_path << "\n";
        return kExitError;
      }
      write_schedule(f, planned.schedule);
      log << "wrote " << out_path << " (" << planned.schedule.entries.size()
          << " entries)\n";
    }
  } catch (const PlanError& e) {
    log << "error: " << e.what() << "\n";
    return kExitInvalid;
  } catch (const std::exception& e) {
    log << "error: " << e.what() << "\n";
    return kExitError;
  }
  return kExitOk;
}

}  // namespace predsim
