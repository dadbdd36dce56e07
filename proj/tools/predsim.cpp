// predsim command-line front end: plan, simulate and analyze matmul
// experiments on configurable time-predictable multi-core machines.

#include <CLI11.hpp>

#include "predsim/cli.hpp"

namespace {

predsim::ScheduleMode parse_mode(const std::string& m) {
  if (m == "selftimed") return predsim::ScheduleMode::kSelfTimed;
  if (m == "timetriggered") return predsim::ScheduleMode::kTimeTriggered;
  throw CLI::ValidationError("--mode", "expected selftimed or timetriggered");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "Cycle-level simulator and static schedule compiler for a "
      "time-predictable multi-core vector architecture"};
  app.require_subcommand(1);

  // Flag storage shared by the subcommands that take an experiment.
  std::string preset_name, config_file, mode = "selftimed", jitter;
  std::string trace_path, out_path;
  std::uint32_t n = 1024, runs = 1;
  std::uint64_t seed = 1;
  bool check_functional = false;
  std::vector<std::string> preset_list;

  auto add_config_flags = [&](CLI::App* cmd) {
    auto* p = cmd->add_option("--preset", preset_name,
                              "Preset name (see 'predsim presets')");
    auto* c = cmd->add_option("--config", config_file,
                              "Config file (key = value); preset names accepted");
    p->excludes(c);
  };
  auto add_experiment_flags = [&](CLI::App* cmd) {
    cmd->add_option("--n", n, "Matrix dimension")->check(CLI::PositiveNumber);
    cmd->add_option("--seed", seed, "Base seed; run i uses seed+i");
    cmd->add_option("--mode", mode, "selftimed or timetriggered")
        ->check(CLI::IsMember({"selftimed", "timetriggered"}));
    cmd->add_option("--jitter", jitter, "DRAM jitter: uniform, worst or zero")
        ->check(CLI::IsMember({"uniform", "worst", "zero"}));
  };
  auto config_source = [&]() -> std::string {
    if (!preset_name.empty()) return preset_name;
    if (!config_file.empty()) return config_file;
    return "Octa";
  };
  auto jitter_override = [&]() -> std::optional<predsim::JitterDist> {
    if (jitter.empty()) return {};
    return predsim::jitter_dist_from_string(jitter);
  };

  auto* presets = app.add_subcommand("presets", "List the built-in presets (CSV)");

  auto* run = app.add_subcommand("run", "Plan, validate and simulate one experiment");
  add_config_flags(run);
  add_experiment_flags(run);
  run->add_option("--runs", runs, "Campaign size")->check(CLI::PositiveNumber);
  run->add_flag("--check-functional", check_functional,
                "Compare simulated results against the scalar reference");
  run->add_option("--trace", trace_path, "Write the first run's event trace");
  run->add_option("--out", out_path,
                  "Stats CSV path; per-run CSV goes to <stem>_runs<ext>");

  auto* sweep = app.add_subcommand("sweep", "One stats row per preset/config");
  sweep->add_option("configs", preset_list, "Presets or config files")->required();
  add_experiment_flags(sweep);
  sweep->add_option("--runs", runs, "Campaign size per config")
      ->check(CLI::PositiveNumber);
  sweep->add_option("--out", out_path, "Stats CSV path");

  auto* roofline = app.add_subcommand("roofline", "Roofline points per preset (CSV)");
  roofline->add_option("configs", preset_list, "Presets or config files")->required();
  roofline->add_option("--out", out_path, "CSV path");

  auto* plan = app.add_subcommand("plan", "Export the compiled schedule as text");
  add_config_flags(plan);
  plan->add_option("--n", n, "Matrix dimension")->check(CLI::PositiveNumber);
  plan->add_option("--mode", mode, "selftimed or timetriggered")
      ->check(CLI::IsMember({"selftimed", "timetriggered"}));
  plan->add_option("--out", out_path, "Schedule file path");

  CLI11_PARSE(app, argc, argv);

  try {
    if (presets->parsed()) return predsim::cmd_presets(std::cout);
    if (run->parsed()) {
      predsim::ExperimentSpec spec;
      spec.config_source = config_source();
      spec.n = n;
      spec.runs = runs;
      spec.seed = seed;
      spec.mode = parse_mode(mode);
      spec.jitter = jitter_override();
      spec.check_functional = check_functional;
      spec.trace_path = trace_path;
      spec.out_path = out_path;
      return predsim::cmd_run(spec);
    }
    if (sweep->parsed())
      return predsim::cmd_sweep(preset_list, n, runs, seed, parse_mode(mode),
                                jitter_override(), out_path);
    if (roofline->parsed()) return predsim::cmd_roofline(preset_list, out_path);
    if (plan->parsed())
      return predsim::cmd_plan(config_source(), n, parse_mode(mode), out_path);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return predsim::kExitError;
  }
  return predsim::kExitError;
}
