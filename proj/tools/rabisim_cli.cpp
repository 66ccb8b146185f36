// rabisim command line: run configs and presets, map condensate parameters.

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include "CLI11.hpp"
#include "rabisim/rabisim.hpp"

namespace {

constexpr const char* kOutDirEnv = "RABISIM_OUT_DIR";

std::filesystem::path output_dir(const std::string& flag) {
  if (!flag.empty()) return flag;
  if (const char* env = std::getenv(kOutDirEnv); env && *env) return env;
  return ".";
}

std::string read_file(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw rabisim::IoError("cannot read " + path);
  std::stringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

int run_configs(std::vector<rabisim::RunConfig> configs, bool self_check, const std::filesystem::path& dir) {
  if (self_check)
    for (auto& c : configs) c.check_cutoff = c.check_step_halving = true;
  const auto results = rabisim::run_all(configs);
  bool ok = true;
  for (const auto& r : results) {
    const auto csv = rabisim::write_outputs(r, dir);
    std::cout << "# " << csv.string() << "\n" << r.report.text();
    ok = ok && r.checks_passed;
  }
  return ok ? 0 : 3;
}

void print_error(const std::string& kind, const std::string& message) {
  std::cerr << "error.kind = " << kind << "\n"
            << "error.message = " << message << "\n";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Quantum Rabi / Jaynes-Cummings / Dicke dynamics with phonon-bath dissipation"};
  app.require_subcommand(1);

  std::string out_flag;
  bool self_check = false;

  auto* run_cmd = app.add_subcommand("run", "run every document of a config file");
  std::string config_path;
  run_cmd->add_option("config", config_path, "config file")->required();
  run_cmd->add_option("--out", out_flag, std::string("output directory (default $") + kOutDirEnv + " or .)");
  run_cmd->add_flag("--self-check", self_check, "enable cutoff-convergence and step-halving checks");

  auto* preset_cmd = app.add_subcommand("preset", "run a built-in scenario");
  std::string preset_name;
  preset_cmd->add_option("name", preset_name, "fig2a..fig2c, fig3a..fig3c, fig4, fig5a, fig5b")->required();
  preset_cmd->add_option("--out", out_flag, std::string("output directory (default $") + kOutDirEnv + " or .)");
  preset_cmd->add_flag("--self-check", self_check, "enable cutoff-convergence and step-halving checks");

  auto* map_cmd = app.add_subcommand("map-params", "derive model parameters from a condensate.* block");
  std::string map_path;
  map_cmd->add_option("config", map_path, "config file")->required();

  auto* emit_cmd = app.add_subcommand("emit-preset", "print a preset as config documents");
  std::string emit_name;
  emit_cmd->add_option("name", emit_name, "preset name")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (*run_cmd) return run_configs(rabisim::parse_config_documents(read_file(config_path)), self_check, output_dir(out_flag));
    if (*preset_cmd) return run_configs(rabisim::preset(preset_name), self_check, output_dir(out_flag));
    if (*map_cmd) {
      for (const auto& c : rabisim::parse_config_documents(read_file(map_path))) std::cout << rabisim::map_params(c).text();
      return 0;
    }
    if (*emit_cmd) {
      std::cout << rabisim::emit_preset(emit_name);
      return 0;
    }
  } catch (const rabisim::Error& e) {
    print_error(e.kind(), e.what());
    return 1;
  } catch (const std::exception& e) {
    print_error("internal", e.what());
    return 1;
  }
  return 0;
}
