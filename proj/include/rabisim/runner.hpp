#pragma once

// mapping -> build -> initialize -> evolve -> observables, plus the optional
// numerical self-checks and CSV / report emission.

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <future>
#include <sstream>
#include <string>
#include <vector>

#include "rabisim/config.hpp"
#include "rabisim/dynamics.hpp"
#include "rabisim/models.hpp"
#include "rabisim/physical_mapping.hpp"

namespace rabisim {

/// Ordered key/value record with stable field names.
class RunReport {
 public:
  void set(const std::string& key, std::string value) {
    for (auto& kv : fields_)
      if (kv.first == key) {
        kv.second = std::move(value);
        return;
      }
    fields_.emplace_back(key, std::move(value));
  }
  void set(const std::string& key, double value) { set(key, detail::format_double(value)); }
  void set(const std::string& key, int value) { set(key, std::to_string(value)); }
  void set(const std::string& key, long long value) { set(key, std::to_string(value)); }
  void set(const std::string& key, std::size_t value) { set(key, std::to_string(value)); }
  void set(const std::string& key, const char* value) { set(key, std::string(value)); }
  void set(const std::string& key, std::string_view value) { set(key, std::string(value)); }

  std::optional<std::string> get(const std::string& key) const {
    for (const auto& kv : fields_)
      if (kv.first == key) return kv.second;
    return std::nullopt;
  }
  std::string text() const {
    std::string out;
    for (const auto& [k, v] : fields_) out += k + " = " + v + "\n";
    return out;
  }

 private:
  std::vector<std::pair<std::string, std::string>> fields_;
};

inline constexpr double kCutoffCheckTolerance = 1e-6;
inline constexpr int kCutoffCheckIncrement = 10;
inline constexpr double kStepHalvingLow = 12.0;
inline constexpr double kStepHalvingHigh = 20.0;

struct SimulationOutput {
  TimeSeries series;
  bool open = false;
  IntegrationStats stats;
  std::size_t channels = 0;
  double mode_occupation = 0.0;
  double truncated_weight = 0.0;
  Warnings warnings;
};

/// One evolution of `spec` at the given cutoff. max_step <= 0 selects default_step().
inline SimulationOutput simulate(const ModelSpec& spec, const BathSpec& bath, const InitialSpec& initial,
                                 const TimeGrid& grid, int fock_cutoff, double max_step = 0.0) {
  spec.validate();
  bath.validate();
  const HilbertLayout layout(spec.n_qubits(), fock_cutoff);
  const Operator h = build_hamiltonian(spec, layout);

  SimulationOutput out;
  const auto mode = thermal_state(spec.omega_f, initial.mode_temperature, fock_cutoff, &out.warnings);
  out.mode_occupation = bose_occupation(spec.omega_f, initial.mode_temperature);
  out.truncated_weight = thermal_tail_weight(spec.omega_f, initial.mode_temperature, fock_cutoff);
  const auto rho0 = DensityState::product(initial.qubits, mode);

  auto frame = std::make_shared<const DressedFrame>(h);
  ObservableSet obs(*frame, static_cast<std::size_t>(grid.n_samples));
  if (bath.gamma == 0.0) {
    evolve_closed(*frame, rho0, grid, obs.visitor());
  } else {
    const auto channels =
        build_microscopic_dissipator(frame, mode_coupling_operator(layout), bath, DissipatorOptions::for_mode(spec.omega_f));
    IntegratorOptions opts;
    opts.max_step = max_step > 0.0 ? max_step : default_step(spec, bath);
    out.open = true;
    out.channels = channels.channels().size();
    out.stats = evolve_open(channels, rho0, grid, obs.visitor(), opts);
  }
  out.series = obs.series();
  return out;
}

/// Largest absolute difference between matching columns of two series.
inline double max_column_delta(const TimeSeries& a, const TimeSeries& b) {
  double delta = 0.0;
  for (const auto& [name, values] : a.columns()) {
    const auto& other = b.column(name);
    for (std::size_t i = 0; i < values.size(); ++i) delta = std::max(delta, std::abs(values[i] - other[i]));
  }
  return delta;
}

struct StepHalvingResult {
  double error_h = 0.0;   // max |O(h) - O(h/2)|
  double error_h2 = 0.0;  // max |O(h/2) - O(h/4)|
  double ratio() const { return error_h / error_h2; }
};

inline StepHalvingResult step_halving_check(const ModelSpec& spec, const BathSpec& bath, const InitialSpec& initial,
                                            const TimeGrid& grid, int fock_cutoff, double base_step) {
  const auto r1 = simulate(spec, bath, initial, grid, fock_cutoff, base_step);
  const double h = r1.stats.step;
  const auto r2 = simulate(spec, bath, initial, grid, fock_cutoff, h / 2);
  const auto r4 = simulate(spec, bath, initial, grid, fock_cutoff, h / 4);
  return {max_column_delta(r1.series, r2.series), max_column_delta(r2.series, r4.series)};
}

struct RunResult {
  RunConfig config;
  TimeSeries series;
  RunReport report;
  bool checks_passed = true;
};

inline RunResult run(const RunConfig& config) {
  const auto started = std::chrono::steady_clock::now();
  config.validate();
  const ModelSpec spec = config.model_spec();

  RunResult result{config, {}, {}, true};
  auto& rep = result.report;
  rep.set("output", config.output_file);
  rep.set("model.kind", to_string(spec.kind));
  rep.set("model.omega_f", spec.omega_f);
  rep.set("model.omega_d", detail::join_numbers(spec.omega_d));
  rep.set("model.g", detail::join_numbers(spec.g));
  rep.set("model.source", std::holds_alternative<ModelSpec>(config.model) ? "model" : "condensate");
  rep.set("regime", to_string(regime_classifier(spec)));
  double gmax = 0.0;
  for (double c : spec.g) gmax = std::max(gmax, std::abs(c));
  rep.set("regime.coupling_ratio", gmax / spec.omega_f);
  if (spec.kind == ModelKind::sw_effective || (spec.kind == ModelKind::dicke && spec.n_qubits() > 1)) {
    try {
      const auto c = effective_couplings(spec);
      for (int n = 0; n < spec.n_qubits(); ++n)
        for (int m = 0; m < n; ++m)
          rep.set("effective.J_" + std::to_string(m + 1) + std::to_string(n + 1), c.J(n, m));
    } catch (const ResonanceError&) {
      rep.set("effective.J", "resonant");
    }
  }
  rep.set("cutoff", config.fock_cutoff);

  auto sim = simulate(spec, config.bath, config.initial, config.grid, config.fock_cutoff, config.max_step);
  rep.set("evolution", sim.open ? "open" : "closed");
  if (sim.open) {
    rep.set("integrator", "rk4");
    rep.set("integrator.step", sim.stats.step);
    rep.set("integrator.substeps", sim.stats.substeps);
    rep.set("integrator.total_steps", sim.stats.total_steps);
    rep.set("integrator.max_trace_drift", sim.stats.max_trace_drift);
    rep.set("dissipator.channels", sim.channels);
  } else {
    rep.set("integrator", "exact-diagonalization");
  }
  rep.set("dissipator.basis", "dressed");
  rep.set("dissipator.coupling", "a+adag");
  rep.set("dissipator.spectral_density", "flat");
  rep.set("thermal.mode_occupation", sim.mode_occupation);
  rep.set("thermal.truncated_weight", sim.truncated_weight);

  if (config.check_cutoff) {
    const auto ref = simulate(spec, config.bath, config.initial, config.grid, config.fock_cutoff + kCutoffCheckIncrement,
                              sim.open ? sim.stats.step : config.max_step);
    // The larger cutoff may force a smaller stable step; compare at equal steps.
    double delta = 0.0;
    if (sim.open && ref.stats.step != sim.stats.step) {
      const auto base =
          simulate(spec, config.bath, config.initial, config.grid, config.fock_cutoff, ref.stats.step);
      delta = max_column_delta(base.series, ref.series);
    } else {
      delta = max_column_delta(sim.series, ref.series);
    }
    const bool ok = delta < kCutoffCheckTolerance;
    rep.set("checks.cutoff", ok ? "pass" : "fail");
    rep.set("checks.cutoff.reference", config.fock_cutoff + kCutoffCheckIncrement);
    if (sim.open) rep.set("checks.cutoff.step", ref.stats.step);
    rep.set("checks.cutoff.delta", delta);
    result.checks_passed = result.checks_passed && ok;
  } else {
    rep.set("checks.cutoff", "off");
  }
  if (config.check_step_halving) {
    if (sim.open) {
      const auto sh = step_halving_check(spec, config.bath, config.initial, config.grid, config.fock_cutoff, sim.stats.step);
      const bool ok = sh.ratio() >= kStepHalvingLow && sh.ratio() <= kStepHalvingHigh;
      rep.set("checks.step_halving", ok ? "pass" : "fail");
      rep.set("checks.step_halving.error_h", sh.error_h);
      rep.set("checks.step_halving.error_h2", sh.error_h2);
      rep.set("checks.step_halving.ratio", sh.ratio());
      result.checks_passed = result.checks_passed && ok;
    } else {
      rep.set("checks.step_halving", "not-applicable");
    }
  } else {
    rep.set("checks.step_halving", "off");
  }

  if (config.quench) {
    const auto q = quench_feasibility(config.quench->g_before, spec.g.front(), config.quench->time, spec);
    rep.set("quench.time", q.quench_time);
    rep.set("quench.ratio", q.ratio);
    rep.set("quench.instantaneous", q.instantaneous ? "true" : "false");
  }
  std::string warnings;
  for (const auto& w : sim.warnings) warnings += (warnings.empty() ? "" : " | ") + w;
  rep.set("warnings", warnings.empty() ? "none" : warnings);
  rep.set("checks", result.checks_passed ? "pass" : "fail");
  rep.set("timings.wall_s", std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count());

  result.series = std::move(sim.series);
  result.series.set_meta("config", emit_config_line(config));
  result.series.set_meta("dissipation", "dressed-state master equation via (a + a†), flat spectral density");
  return result;
}

/// Runs independent configurations concurrently; results keep input order.
inline std::vector<RunResult> run_all(const std::vector<RunConfig>& configs) {
  std::vector<std::future<RunResult>> jobs;
  for (const auto& c : configs) jobs.push_back(std::async(std::launch::async, [c] { return run(c); }));
  std::vector<RunResult> out;
  for (auto& j : jobs) out.push_back(j.get());
  return out;
}

/// DerivedPlatform of a condensate-parameter config, as structured text fields.
inline RunReport map_params(const RunConfig& config) {
  const auto* cm = std::get_if<CondensateModel>(&config.model);
  if (!cm) throw ValidationError("map-params needs a condensate.* parameter block");
  const auto& p = cm->params;
  const double temperature = config.initial.mode_temperature;
  const auto d = derive_platform(p, temperature);
  const auto spec = config.model_spec();

  RunReport r;
  r.set("geometry", p.quasi_1d() ? "quasi-1d" : "3d");
  r.set("platform.g_aa", d.g_aa);
  r.set("platform.g_ab", d.g_ab);
  r.set("platform.sound_speed", d.sound_speed);
  r.set("platform.mode_frequency", d.mode_frequency);
  r.set("platform.mode_frequency_hz", d.mode_frequency / (2.0 * constants::pi));
  r.set("platform.coupling", d.coupling);
  r.set("platform.coupling_hz", d.coupling / (2.0 * constants::pi));
  r.set("platform.coupling_ratio", d.coupling / d.mode_frequency);
  r.set("platform.normalization", d.normalization);
  r.set("platform.temperature", d.temperature);
  r.set("platform.thermal_occupation", d.thermal_occupation);
  if (p.quasi_1d()) {
    r.set("platform.aspect_ratio", p.aspect_ratio());
    r.set("platform.enhancement_1d", 1.0 / std::sqrt(p.aspect_ratio()));
  }
  r.set("regime", to_string(regime_classifier(spec)));
  r.set("assumption.volume", p.quasi_1d() ? "V replaced by L; g_ij replaced by g_ij / L_r^2" : "V = L^3");
  r.set("assumption.volume_value", p.quasi_1d() ? p.box_length : p.volume());
  r.set("assumption.density", p.density);
  r.set("assumption.mode", "lowest hard-wall mode, Omega_f = 2 pi v / (2 L)");
  r.set("assumption.delta_prime", "0");
  r.set("constants.table_version", constants::kTableVersion);
  if (p.raman_rabi) r.set("metadata.raman_rabi", *p.raman_rabi);
  if (p.raman_detuning) r.set("metadata.raman_detuning", *p.raman_detuning);
  if (p.scattering_bb) r.set("metadata.scattering_bb", *p.scattering_bb);
  if (config.quench) {
    const auto q = quench_feasibility(config.quench->g_before, d.coupling, config.quench->time, spec);
    r.set("quench.time", q.quench_time);
    r.set("quench.mode_period", q.mode_period);
    r.set("quench.ratio", q.ratio);
    r.set("quench.instantaneous", q.instantaneous ? "true" : "false");
    r.set("quench.message", q.message);
  }
  return r;
}

// ---------------------------------------------------------------------------
// Output

inline std::string format_csv_value(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.16e", v);
  return buf;
}

/// `# config: ...`, header line starting with time_s, then one row per sample
/// with 17 significant digits in scientific notation. LF line endings.
inline std::string format_csv(const RunConfig& config, const TimeSeries& series) {
  std::string out = "# config: " + emit_config_line(config) + "\n";
  out += "time_s";
  for (const auto& [name, values] : series.columns()) out += "," + name;
  out += "\n";
  for (std::size_t i = 0; i < series.size(); ++i) {
    out += format_csv_value(series.times[i]);
    for (const auto& [name, values] : series.columns()) out += "," + format_csv_value(values[i]);
    out += "\n";
  }
  return out;
}

inline void write_text_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw IoError("cannot open " + path.string() + " for writing");
  f << text;
  if (!f) throw IoError("failed writing " + path.string());
}

/// Writes <output.file> and <stem>.report into `dir`; returns the CSV path.
inline std::filesystem::path write_outputs(const RunResult& r, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  const auto csv = dir / r.config.output_file;
  write_text_file(csv, format_csv(r.config, r.series));
  auto report_path = csv;
  report_path.replace_extension(".report");
  write_text_file(report_path, r.report.text());
  return csv;
}

}  // namespace rabisim
