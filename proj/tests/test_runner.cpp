#include <gtest/gtest.h>

#include <sys/wait.h>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "rabisim/presets.hpp"
#include "rabisim/runner.hpp"

using namespace rabisim;
namespace fs = std::filesystem;

namespace {

const char* kSmallClosed =
    "model.kind = qrm; model.omega_f = 3141.5926535897932; model.omega_d = 3141.5926535897932\n"
    "model.g = 157.07963267948966; grid.t_end = 0.01; grid.n_samples = 21; numerics.fock_cutoff = 12\n"
    "output.file = small_closed.csv\n";

const char* kSmallOpen =
    "model.kind = qrm; model.omega_f = 3141.5926535897932; model.omega_d = 3141.5926535897932\n"
    "model.g = 1570.7963267948966; bath.gamma = 5; bath.temperature = 1e-8\n"
    "grid.t_end = 0.005; grid.n_samples = 11; numerics.fock_cutoff = 14\n"
    "output.file = small_open.csv\n";

const char* kCondensateDoc =
    "model.kind = qrm\nmodel.omega_d = 3141.5926535897932\n"
    "condensate.scattering_aa = 5.3976e-9\ncondensate.scattering_ab = 1.6e-8\n"
    "condensate.density = 2.761e21\ncondensate.box_length = 1e-5\n"
    "initial.mode_temperature = 1e-8\nquench.time = 1e-3\ngrid.t_end = 0.01\n";

fs::path scratch(const std::string& name) {
  const auto dir = fs::temp_directory_path() / ("rabisim_test_" + name + "_" + std::to_string(::getpid()));
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

std::string slurp(const fs::path& p) {
  std::ifstream f(p, std::ios::binary);
  std::stringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

std::vector<std::string> lines_of(const std::string& text) {
  std::vector<std::string> out;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) out.push_back(line);
  return out;
}

struct CommandResult {
  int status;
  std::string out;
  std::string err;
};

CommandResult run_cli(const std::string& args, const fs::path& dir) {
  const auto out = dir / "stdout.txt", err = dir / "stderr.txt";
  const std::string cmd = std::string("\"") + RABISIM_CLI_PATH + "\" " + args + " >\"" + out.string() + "\" 2>\"" +
                          err.string() + "\"";
  const int raw = std::system(cmd.c_str());
  return {WIFEXITED(raw) ? WEXITSTATUS(raw) : -1, slurp(out), slurp(err)};
}

}  // namespace

TEST(Run, ClosedReportAndSchema) {
  const auto r = run(parse_config(kSmallClosed));
  EXPECT_EQ(r.report.get("evolution"), "closed");
  EXPECT_EQ(r.report.get("regime"), "SC");
  EXPECT_EQ(r.report.get("cutoff"), "12");
  EXPECT_EQ(r.report.get("checks"), "pass");
  EXPECT_TRUE(r.report.get("timings.wall_s").has_value());
  const auto csv = lines_of(format_csv(r.config, r.series));
  ASSERT_EQ(csv.size(), 2u + 21u);
  EXPECT_EQ(csv[0].rfind("# config: model.kind = qrm; ", 0), 0u);
  EXPECT_EQ(csv[1], "time_s,n_ph,sz,parity,p_down0");
  {
    std::stringstream ss(csv[2]);
    std::string cell;
    std::vector<double> row;
    while (std::getline(ss, cell, ',')) row.push_back(std::stod(cell));
    const std::vector<double> expected{0.0, 0.0, 1.0, -1.0, 0.0};
    ASSERT_EQ(row.size(), expected.size());
    for (std::size_t i = 0; i < row.size(); ++i) EXPECT_NEAR(row[i], expected[i], 1e-12);
  }
  for (std::size_t i = 2; i < csv.size(); ++i) {
    std::stringstream ss(csv[i]);
    std::string cell;
    int cells = 0;
    while (std::getline(ss, cell, ',')) {
      ++cells;
      EXPECT_EQ(cell.size(), cell[0] == '-' ? 23u : 22u) << cell;
      EXPECT_NE(cell.find('e'), std::string::npos);
    }
    EXPECT_EQ(cells, 5);
  }
}

TEST(Run, CsvConfigLineReparses) {
  const auto cfg = parse_config(kSmallOpen);
  const auto r = run(cfg);
  const auto csv = lines_of(format_csv(r.config, r.series));
  EXPECT_EQ(parse_config(csv[0].substr(std::string("# config: ").size())), cfg);
}

TEST(Run, OpenReportFields) {
  auto cfg = parse_config(kSmallOpen);
  cfg.check_cutoff = true;
  cfg.check_step_halving = true;
  const auto r = run(cfg);
  EXPECT_EQ(r.report.get("evolution"), "open");
  EXPECT_EQ(r.report.get("regime"), "USC");
  EXPECT_EQ(r.report.get("integrator"), "rk4");
  EXPECT_EQ(r.report.get("checks.cutoff.reference"), "24");
  EXPECT_TRUE(r.report.get("checks.cutoff.delta").has_value());
  ASSERT_TRUE(r.report.get("checks.cutoff.step").has_value());
  EXPECT_LE(std::stod(*r.report.get("checks.cutoff.step")), std::stod(*r.report.get("integrator.step")));
  EXPECT_TRUE(r.report.get("checks.step_halving.ratio").has_value());
  EXPECT_EQ(r.series.size(), 11u);
}

TEST(Run, CutoffCheckComparesAtEqualSteps) {
  // A loose max_step leaves the stability cap in charge, and the cap shrinks with the cutoff.
  auto cfg = parse_config(kSmallOpen);
  cfg.max_step = 1e-3;
  cfg.fock_cutoff = 20;
  cfg.check_cutoff = true;
  const auto r = run(cfg);
  const double step = std::stod(*r.report.get("integrator.step"));
  const double ref_step = std::stod(*r.report.get("checks.cutoff.step"));
  EXPECT_LT(ref_step, step);
  const auto spec = cfg.model_spec();
  const auto a = simulate(spec, cfg.bath, cfg.initial, cfg.grid, 20, ref_step);
  const auto b = simulate(spec, cfg.bath, cfg.initial, cfg.grid, 30, ref_step);
  EXPECT_EQ(a.stats.step, ref_step);
  EXPECT_EQ(b.stats.step, ref_step);
  EXPECT_DOUBLE_EQ(std::stod(*r.report.get("checks.cutoff.delta")), max_column_delta(a.series, b.series));
}

TEST(Run, ClosedStepHalvingNotApplicable) {
  auto cfg = parse_config(kSmallClosed);
  cfg.check_step_halving = true;
  cfg.check_cutoff = true;
  const auto r = run(cfg);
  EXPECT_EQ(r.report.get("checks.step_halving"), "not-applicable");
  EXPECT_EQ(r.report.get("checks.cutoff"), "pass");
}

TEST(Run, ThermalTruncationWarningReported) {
  auto cfg = parse_config(kSmallClosed);
  cfg.initial.mode_temperature = 500e-9;
  const auto r = run(cfg);
  EXPECT_NE(r.report.get("warnings")->find("thermal truncation"), std::string::npos);
}

TEST(Run, DeterministicBytes) {
  const auto cfg = parse_config(kSmallOpen);
  const auto a = format_csv(cfg, run(cfg).series);
  const auto b = format_csv(cfg, run(cfg).series);
  EXPECT_EQ(a, b);
  const auto all = run_all({cfg, cfg});
  EXPECT_EQ(format_csv(cfg, all[0].series), a);
  EXPECT_EQ(format_csv(cfg, all[1].series), a);
}

TEST(Run, EffectiveCouplingReported) {
  RunConfig cfg = preset("fig5a")[1];
  cfg.grid = {0.0, 1e-3, 3};
  cfg.fock_cutoff = 6;
  const auto r = run(cfg);
  ASSERT_TRUE(r.report.get("effective.J_12").has_value());
  EXPECT_NEAR(std::stod(*r.report.get("effective.J_12")) / (2 * constants::pi * 1e3), -1.178e-2, 1e-5);
  EXPECT_TRUE(r.series.has_column("sz_1"));
  EXPECT_TRUE(r.series.has_column("sz_2"));
}

TEST(Run, QuenchDiagnostic) {
  auto cfg = parse_config(kSmallClosed);
  cfg.quench = QuenchSpec{1e-3, 0.0};
  const auto r = run(cfg);
  EXPECT_EQ(r.report.get("quench.instantaneous"), "false");
  EXPECT_EQ(r.report.get("quench.ratio"), "0.5");
}

TEST(MapParams, Report) {
  const auto r = map_params(parse_config(kCondensateDoc));
  EXPECT_EQ(r.get("geometry"), "3d");
  EXPECT_NEAR(std::stod(*r.get("platform.mode_frequency_hz")), 500.0, 1.0);
  EXPECT_NEAR(std::stod(*r.get("platform.thermal_occupation")), 0.0998, 1e-3);
  EXPECT_EQ(r.get("quench.instantaneous"), "false");
  EXPECT_TRUE(r.get("assumption.volume").has_value());
  EXPECT_THROW(map_params(parse_config(kSmallClosed)), ValidationError);
}

TEST(WriteOutputs, CsvAndReport) {
  const auto dir = scratch("write");
  const auto r = run(parse_config(kSmallClosed));
  const auto csv = write_outputs(r, dir);
  EXPECT_EQ(csv, dir / "small_closed.csv");
  EXPECT_EQ(slurp(csv), format_csv(r.config, r.series));
  EXPECT_EQ(slurp(csv).find('\r'), std::string::npos);
  EXPECT_EQ(slurp(dir / "small_closed.report"), r.report.text());
  fs::remove_all(dir);
}

TEST(Cli, RunConfigFile) {
  const auto dir = scratch("cli_run");
  {
    std::ofstream f(dir / "doc.cfg");
    f << kSmallClosed << "---\n" << kSmallOpen;
  }
  const auto res = run_cli("run \"" + (dir / "doc.cfg").string() + "\" --out \"" + dir.string() + "\"", dir);
  EXPECT_EQ(res.status, 0) << res.err;
  EXPECT_TRUE(fs::exists(dir / "small_closed.csv"));
  EXPECT_TRUE(fs::exists(dir / "small_open.csv"));
  EXPECT_TRUE(fs::exists(dir / "small_open.report"));
  EXPECT_NE(res.out.find("regime = "), std::string::npos);
  fs::remove_all(dir);
}

TEST(Cli, OutputDirectoryFromEnvironment) {
  const auto dir = scratch("cli_env");
  {
    std::ofstream f(dir / "doc.cfg");
    f << kSmallClosed;
  }
  ::setenv("RABISIM_OUT_DIR", (dir / "env").string().c_str(), 1);
  const auto env_res = run_cli("run \"" + (dir / "doc.cfg").string() + "\"", dir);
  ::unsetenv("RABISIM_OUT_DIR");
  EXPECT_EQ(env_res.status, 0) << env_res.err;
  EXPECT_TRUE(fs::exists(dir / "env" / "small_closed.csv"));
  fs::remove_all(dir);
}

TEST(Cli, ErrorRecord) {
  const auto dir = scratch("cli_err");
  {
    std::ofstream f(dir / "bad.cfg");
    f << kSmallClosed << "bath.colour = blue\n";
  }
  const auto res = run_cli("run \"" + (dir / "bad.cfg").string() + "\" --out \"" + dir.string() + "\"", dir);
  EXPECT_EQ(res.status, 1);
  EXPECT_NE(res.err.find("error.kind = config-parse"), std::string::npos) << res.err;
  EXPECT_NE(res.err.find("bath.colour"), std::string::npos) << res.err;

  const auto unknown = run_cli("preset fig9 --out \"" + dir.string() + "\"", dir);
  EXPECT_EQ(unknown.status, 1);
  EXPECT_NE(unknown.err.find("error.kind = unknown-preset"), std::string::npos) << unknown.err;
  fs::remove_all(dir);
}

TEST(Cli, EmitPresetReparses) {
  const auto dir = scratch("cli_emit");
  for (auto name : kPresetNames) {
    const auto res = run_cli("emit-preset " + std::string(name), dir);
    ASSERT_EQ(res.status, 0) << res.err;
    EXPECT_EQ(parse_config_documents(res.out), preset(name)) << name;
  }
  fs::remove_all(dir);
}

TEST(Cli, MapParams) {
  const auto dir = scratch("cli_map");
  {
    std::ofstream f(dir / "cond.cfg");
    f << kCondensateDoc;
  }
  const auto res = run_cli("map-params \"" + (dir / "cond.cfg").string() + "\"", dir);
  EXPECT_EQ(res.status, 0) << res.err;
  EXPECT_NE(res.out.find("platform.mode_frequency = "), std::string::npos);
  EXPECT_NE(res.out.find("quench.message = warning"), std::string::npos);
  fs::remove_all(dir);
}
