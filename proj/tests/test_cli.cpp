#include <gtest/gtest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "predsim/cli.hpp"

using namespace predsim;
namespace fs = std::filesystem;

namespace {

struct TempDir {
  fs::path path;
  TempDir() {
    std::string tmpl = (fs::temp_directory_path() / "predsim-test-XXXXXX").string();
    path = mkdtemp(tmpl.data());
  }
  ~TempDir() {
    std::error_code ec;
    fs::remove_all(path, ec);
  }
  std::string file(const std::string& name) const { return (path / name).string(); }
};

std::string slurp(const std::string& path) {
  std::ifstream in(path);
  std::stringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

std::vector<std::string> data_lines(const std::string& csv) {
  std::vector<std::string> lines;
  std::istringstream in(csv);
  std::string line;
  bool header_skipped = false;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    if (!header_skipped) {  // column header
      header_skipped = true;
      continue;
    }
    lines.push_back(line);
  }
  return lines;
}

}  // namespace

TEST(CmdPresets, ListsAllSevenAsCsv) {
  std::ostringstream out;
  EXPECT_EQ(cmd_presets(out), kExitOk);
  std::istringstream in(out.str());
  std::string line;
  ASSERT_TRUE(std::getline(in, line));
  EXPECT_EQ(line.rfind("name,", 0), 0u);
  int rows = 0;
  bool octa_at_168 = false;
  while (std::getline(in, line)) {
    ++rows;
    if (line.rfind("Octa,8,", 0) == 0 &&
        line.find(",168000000,") != std::string::npos)
      octa_at_168 = true;
  }
  EXPECT_EQ(rows, 7);
  EXPECT_TRUE(octa_at_168);
}

TEST(CmdRun, WritesRunsAndStatsCsv) {
  TempDir tmp;
  ExperimentSpec spec;
  spec.config_source = "octa";
  spec.n = 32;
  spec.runs = 10;
  spec.seed = 7;
  spec.out_path = tmp.file("results.csv");
  std::ostringstream log;
  EXPECT_EQ(cmd_run(spec, log), kExitOk);

  const std::string stats_csv = slurp(tmp.file("results.csv"));
  const auto stats_rows = data_lines(stats_csv);
  ASSERT_EQ(stats_rows.size(), 1u);
  EXPECT_EQ(stats_rows[0].rfind("Octa,32,10,", 0), 0u);
  // wcet column present and violations zero
  std::istringstream row(stats_rows[0]);
  std::string field;
  std::vector<std::string> fields;
  while (std::getline(row, field, ',')) fields.push_back(field);
  ASSERT_EQ(fields.size(), 9u);
  EXPECT_GT(std::stoull(fields[7]), 0u);   // wcet_cycles
  EXPECT_EQ(fields[8], "0");               // wcet_violations

  const auto run_rows = data_lines(slurp(tmp.file("results_runs.csv")));
  ASSERT_EQ(run_rows.size(), 10u);
  for (int i = 0; i < 10; ++i)
    EXPECT_NE(run_rows[i].find("Octa,32," + std::to_string(7 + i) + ","),
              std::string::npos);
}

TEST(CmdRun, FunctionalCheckPasses) {
  TempDir tmp;
  ExperimentSpec spec;
  spec.config_source = "quad";
  spec.n = 4;
  spec.runs = 1;
  spec.seed = 3;
  spec.check_functional = true;
  spec.out_path = tmp.file("out.csv");
  std::ostringstream log;
  EXPECT_EQ(cmd_run(spec, log), kExitOk);
  EXPECT_NE(log.str().find("functional check passed"), std::string::npos);
}

TEST(CmdRun, UnknownPresetFailsAndListsValidNames) {
  ExperimentSpec spec;
  spec.config_source = "warp9";
  std::ostringstream log;
  EXPECT_NE(cmd_run(spec, log), kExitOk);
  for (const auto& name : preset_names())
    EXPECT_NE(log.str().find(name), std::string::npos) << name;
}

TEST(CmdRun, InfeasiblePlanExitsWithValidationCode) {
  TempDir tmp;
  {
    std::ofstream cfg(tmp.file("tiny.cfg"));
    cfg << "name = tiny\nworker_cores = 2\nvreg_bits = 256\nmult_bits = 128\n"
        << "data_spm_bytes = 256\nfmax_hz = 100 MHz\n";
  }
  ExperimentSpec spec;
  spec.config_source = tmp.file("tiny.cfg");
  spec.n = 1024;
  std::ostringstream log;
  EXPECT_EQ(cmd_run(spec, log), kExitInvalid);
  EXPECT_NE(log.str().find("block width"), std::string::npos);
}

TEST(CmdRun, TraceFileHasEvents) {
  TempDir tmp;
  ExperimentSpec spec;
  spec.config_source = "dual";
  spec.n = 8;
  spec.runs = 1;
  spec.trace_path = tmp.file("trace.txt");
  spec.out_path = tmp.file("r.csv");
  std::ostringstream log;
  EXPECT_EQ(cmd_run(spec, log), kExitOk);
  const std::string trace = slurp(tmp.file("trace.txt"));
  EXPECT_NE(trace.find(" dma "), std::string::npos);
  EXPECT_NE(trace.find(" start"), std::string::npos);
  EXPECT_NE(trace.find(" end"), std::string::npos);
}

TEST(CmdRun, JitterZeroReproducesByteIdenticalCsv) {
  TempDir tmp;
  ExperimentSpec spec;
  spec.config_source = "hexadeca";
  spec.n = 16;
  spec.runs = 5;
  spec.seed = 11;
  spec.jitter = JitterDist::kUniform;
  spec.out_path = tmp.file("a.csv");
  std::ostringstream log;
  ASSERT_EQ(cmd_run(spec, log), kExitOk);
  spec.out_path = tmp.file("b.csv");
  ASSERT_EQ(cmd_run(spec, log), kExitOk);
  EXPECT_EQ(slurp(tmp.file("a.csv")), slurp(tmp.file("b.csv")));
  EXPECT_EQ(slurp(tmp.file("a_runs.csv")), slurp(tmp.file("b_runs.csv")));
}

TEST(CmdSweep, OneRowPerPresetAndConsistentWithRun) {
  TempDir tmp;
  std::ostringstream log;
  ASSERT_EQ(cmd_sweep({"dual", "quad"}, 16, 4, 21, ScheduleMode::kSelfTimed, {},
                      tmp.file("sweep.csv"), log),
            kExitOk);
  const auto rows = data_lines(slurp(tmp.file("sweep.csv")));
  ASSERT_EQ(rows.size(), 2u);
  EXPECT_EQ(rows[0].rfind("Dual,16,4,", 0), 0u);
  EXPECT_EQ(rows[1].rfind("Quad,16,4,", 0), 0u);

  // A single-preset sweep row equals the run stats row for the same flags.
  ASSERT_EQ(cmd_sweep({"dual"}, 16, 4, 21, ScheduleMode::kSelfTimed, {},
                      tmp.file("single.csv"), log),
            kExitOk);
  ExperimentSpec spec;
  spec.config_source = "dual";
  spec.n = 16;
  spec.runs = 4;
  spec.seed = 21;
  spec.out_path = tmp.file("run.csv");
  ASSERT_EQ(cmd_run(spec, log), kExitOk);
  EXPECT_EQ(data_lines(slurp(tmp.file("single.csv")))[0],
            data_lines(slurp(tmp.file("run.csv")))[0]);
}

TEST(CmdSweep, AbortsWithContextOnBadPreset) {
  std::ostringstream log;
  EXPECT_NE(cmd_sweep({"dual", "bogus"}, 16, 2, 1, ScheduleMode::kSelfTimed, {},
                      "", log),
            kExitOk);
  EXPECT_NE(log.str().find("bogus"), std::string::npos);
}

TEST(CmdRoofline, SharedPlateauAndDeterministicOutput) {
  TempDir tmp;
  std::ostringstream log;
  ASSERT_EQ(cmd_roofline({"fast", "octa"}, tmp.file("roof.csv"), log), kExitOk);
  ASSERT_EQ(cmd_roofline({"fast", "octa"}, tmp.file("roof2.csv"), log), kExitOk);
  EXPECT_EQ(slurp(tmp.file("roof.csv")), slurp(tmp.file("roof2.csv")));

  const auto rows = data_lines(slurp(tmp.file("roof.csv")));
  ASSERT_EQ(rows.size(), 2 * default_intensity_grid().size());
}

TEST(CmdPlan, ExportsParsableSchedule) {
  TempDir tmp;
  std::ostringstream log;
  ASSERT_EQ(cmd_plan("dual", 8, ScheduleMode::kSelfTimed, tmp.file("s.txt"), log),
            kExitOk);
  std::ifstream in(tmp.file("s.txt"));
  const Schedule parsed = parse_schedule(in);
  EXPECT_EQ(parsed, plan_matmul(preset("Dual"), 8).schedule);
}

// End-to-end through the installed binary.
TEST(Binary, ReproducibleRunsAndUsefulExitCodes) {
  TempDir tmp;
  const std::string bin = PREDSIM_BIN;
  const std::string base = bin + " run --preset octa --n 16 --runs 3 --seed 5";
  const std::string cmd_a =
      base + " --out " + tmp.file("a.csv") + " >/dev/null 2>&1";
  const std::string cmd_b =
      base + " --out " + tmp.file("b.csv") + " >/dev/null 2>&1";
  ASSERT_EQ(std::system(cmd_a.c_str()), 0);
  ASSERT_EQ(std::system(cmd_b.c_str()), 0);
  EXPECT_EQ(slurp(tmp.file("a.csv")), slurp(tmp.file("b.csv")));
  EXPECT_EQ(slurp(tmp.file("a_runs.csv")), slurp(tmp.file("b_runs.csv")));

  const std::string bad = bin + " run --preset warp9 2>" + tmp.file("err.txt");
  EXPECT_NE(std::system(bad.c_str()), 0);
  EXPECT_NE(slurp(tmp.file("err.txt")).find("Octa"), std::string::npos);

  const std::string presets_cmd = bin + " presets >" + tmp.file("p.csv");
  ASSERT_EQ(std::system(presets_cmd.c_str()), 0);
  EXPECT_EQ(data_lines(slurp(tmp.file("p.csv"))).size() + 1, 7u + 1);
}
