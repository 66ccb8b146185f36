#pragma once

// Built-in closed/open QRM and two-qubit scenarios.
//
// Time spans, chosen to contain the phenomenon:
//   fig2x / fig3x : 3 Rabi periods of the slowest panel, 3 pi / (0.05 Omega_f) = 60 ms
//   fig4          : 3 revival periods, 3 x 2 pi / Omega_f = 6 ms
//   fig5x         : 2 exchange periods of the effective coupling, 4 pi / |J_12|

#include <array>
#include <string>
#include <string_view>
#include <vector>

#include "rabisim/config.hpp"

namespace rabisim {

inline constexpr std::array<std::string_view, 9> kPresetNames = {"fig2a", "fig2b", "fig2c", "fig3a", "fig3b",
                                                                 "fig3c", "fig4",  "fig5a", "fig5b"};

/// Mode frequency of the single-qubit scenarios: the 2 pi x 500 Hz fundamental
/// of a 10 um box with 10 mm/s sound.
inline constexpr double kPresetModeFrequency = 2.0 * constants::pi * 500.0;
/// Mode frequency of the two-qubit scenarios.
inline constexpr double kPresetDispersiveModeFrequency = 2.0 * constants::pi * 1e3;

namespace detail {

inline constexpr double nK = 1e-9;

struct BathCurve {
  double temperature;
  double gamma;
  const char* label;
};

inline RunConfig single_qubit_curve(const std::string& name, double omega_d, double g, QubitState qubit,
                                    double t_end, int n_samples, const BathCurve& curve) {
  RunConfig c;
  c.model = ModelSpec{ModelKind::qrm, kPresetModeFrequency, {omega_d}, {g}};
  c.bath = {curve.gamma, curve.temperature};
  c.initial = {{qubit}, curve.temperature};
  c.grid = {0.0, t_end, n_samples};
  c.fock_cutoff = 100;
  c.output_file = name + "_" + curve.label + ".csv";
  return c;
}

inline std::vector<RunConfig> rabi_transition(const std::string& name, double g_ratio) {
  constexpr BathCurve curves[] = {{0.0, 0.0, "T0nK_gamma0"}, {5 * nK, 0.5, "T5nK_gamma0.5"}, {10 * nK, 1.0, "T10nK_gamma1"}};
  const double w = kPresetModeFrequency;
  const double t_end = 3.0 * constants::pi / (0.05 * w);
  std::vector<RunConfig> out;
  for (const auto& c : curves) out.push_back(single_qubit_curve(name, w, g_ratio * w, QubitState::up, t_end, 1201, c));
  return out;
}

inline std::vector<RunConfig> collapse_revival(const std::string& name) {
  constexpr BathCurve curves[] = {{0.0, 0.0, "T0nK_gamma0"}, {10 * nK, 1.0, "T10nK_gamma1"}, {20 * nK, 2.0, "T20nK_gamma2"}};
  const double w = kPresetModeFrequency;
  const double t_end = 3.0 * 2.0 * constants::pi / w;
  std::vector<RunConfig> out;
  for (const auto& c : curves)
    out.push_back(single_qubit_curve(name, 0.1 * w, 0.8 * w, QubitState::down, t_end, 601, c));
  return out;
}

inline std::vector<RunConfig> dispersive_pair(const std::string& name, double temperature) {
  const double w = kPresetDispersiveModeFrequency;
  const ModelSpec full{ModelKind::dicke, w, {0.1 * w, 0.1 * w}, {0.054 * w, 0.054 * w}};
  const double j12 = effective_couplings(full).J(0, 1);
  std::vector<RunConfig> out;
  for (ModelKind kind : {ModelKind::dicke, ModelKind::sw_effective}) {
    RunConfig c;
    c.model = full.with_kind(kind);
    c.bath = {1.0, temperature};
    c.initial = {{QubitState::up, QubitState::down}, temperature};
    c.grid = {0.0, 4.0 * constants::pi / std::abs(j12), 1001};
    c.fock_cutoff = 40;
    c.output_file = name + (kind == ModelKind::dicke ? "_full.csv" : "_effective.csv");
    out.push_back(c);
  }
  return out;
}

}  // namespace detail

/// RunConfigs of a named preset, one per plotted curve or model.
inline std::vector<RunConfig> preset(std::string_view name) {
  const std::string n(name);
  if (n == "fig2a" || n == "fig3a") return detail::rabi_transition(n, 0.05);
  if (n == "fig2b" || n == "fig3b") return detail::rabi_transition(n, 0.5);
  if (n == "fig2c" || n == "fig3c") return detail::rabi_transition(n, 1.0);
  if (n == "fig4") return detail::collapse_revival(n);
  if (n == "fig5a") return detail::dispersive_pair(n, 5 * detail::nK);
  if (n == "fig5b") return detail::dispersive_pair(n, 100 * detail::nK);
  std::string known;
  for (auto k : kPresetNames) known += (known.empty() ? "" : ", ") + std::string(k);
  throw UnknownPresetError("unknown preset '" + n + "' (known: " + known + ")");
}

/// Preset as a multi-document config text (documents separated by ---).
inline std::string emit_preset(std::string_view name) {
  std::string out = "# preset " + std::string(name) + "\n";
  bool first = true;
  for (const auto& c : preset(name)) {
    if (!first) out += "---\n";
    out += emit_config(c);
    first = false;
  }
  return out;
}

}  // namespace rabisim
