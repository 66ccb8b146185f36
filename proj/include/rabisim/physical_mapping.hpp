#pragma once

// Experimental condensate / atomic-quantum-dot parameters -> model parameters.
// SI units throughout; frequencies are angular (rad/s).

#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include "rabisim/constants.hpp"
#include "rabisim/models.hpp"

namespace rabisim {

struct CondensateParams {
  double atom_mass = constants::mass_rb87;  // kg, condensate species
  double scattering_aa = 0.0;               // m, condensate-condensate
  double scattering_ab = 0.0;               // m, dot-condensate
  double density = 0.0;                     // m^-3
  double box_length = 0.0;                  // m
  std::optional<double> radial_length;      // m; present => quasi-1D geometry

  // Pass-through metadata. None of these enter the model (delta' = 0 is assumed).
  std::optional<double> raman_rabi;      // rad/s
  std::optional<double> raman_detuning;  // rad/s
  std::optional<double> scattering_bb;   // m

  bool quasi_1d() const noexcept { return radial_length.has_value(); }
  double volume() const noexcept { return box_length * box_length * box_length; }
  /// lambda = (L_r / L)^2; only meaningful in quasi-1D.
  double aspect_ratio() const {
    return radial_length ? (*radial_length / box_length) * (*radial_length / box_length) : 1.0;
  }

  void validate() const {
    if (!(atom_mass > 0.0)) throw ParameterError("atom mass must be positive");
    if (!(scattering_aa > 0.0)) throw ParameterError("condensate scattering length must be positive");
    if (!std::isfinite(scattering_ab)) throw ParameterError("dot-condensate scattering length must be finite");
    if (!(density > 0.0)) throw ParameterError("condensate density must be positive");
    if (!(box_length > 0.0)) throw ParameterError("box length must be positive");
    if (radial_length && !(*radial_length > 0.0 && *radial_length < box_length))
      throw ParameterError("radial length must be positive and smaller than the box length");
  }

  friend bool operator==(const CondensateParams&, const CondensateParams&) = default;
};

struct DerivedPlatform {
  double g_aa = 0.0;            // J m^3
  double g_ab = 0.0;            // J m^3
  double sound_speed = 0.0;     // m/s
  double mode_frequency = 0.0;  // rad/s
  double coupling = 0.0;        // rad/s
  double normalization = 0.0;   // hbar / (2 V g_aa), in the geometry's units
  double temperature = 0.0;     // K, at which thermal_occupation is evaluated
  double thermal_occupation = 0.0;
};

/// 4 pi hbar^2 a / m
inline double interaction_strength(double scattering_length, double mass) {
  if (!(mass > 0.0)) throw ParameterError("interaction_strength needs a positive mass");
  return 4.0 * constants::pi * constants::hbar * constants::hbar * scattering_length / mass;
}

/// Bogoliubov sound speed from m v^2 = rho_a g_aa.
inline double sound_speed(const CondensateParams& p) {
  if (!(p.density > 0.0) || !(p.atom_mass > 0.0)) throw ParameterError("sound_speed needs positive density and mass");
  return std::sqrt(p.density * interaction_strength(p.scattering_aa, p.atom_mass) / p.atom_mass);
}

/// Lowest hard-wall phonon mode of a box of length L: 2 pi v / (2 L).
inline double mode_frequency(double v, double length) {
  if (!(v > 0.0) || !(length > 0.0)) throw ParameterError("mode_frequency needs v > 0 and L > 0");
  return 2.0 * constants::pi * v / (2.0 * length);
}

/// Dot-phonon coupling g = sqrt(N omega / hbar^2) (g_ab - g_aa), N = hbar / (2 V g_aa).
/// In quasi-1D the volume becomes L and every g_ij becomes g_ij / L_r^2.
inline double coupling_strength(const CondensateParams& p, double mode_freq) {
  double g_aa = interaction_strength(p.scattering_aa, p.atom_mass);
  double g_ab = interaction_strength(p.scattering_ab, p.atom_mass);
  double volume = p.volume();
  if (p.quasi_1d()) {
    const double area = *p.radial_length * *p.radial_length;
    g_aa /= area;
    g_ab /= area;
    volume = p.box_length;
  }
  if (!(g_aa > 0.0) || !(volume > 0.0)) throw ParameterError("coupling_strength needs g_aa > 0 and V > 0");
  const double normalization = constants::hbar / (2.0 * volume * g_aa);
  return std::sqrt(normalization * mode_freq / (constants::hbar * constants::hbar)) * (g_ab - g_aa);
}

inline double thermal_occupation(double omega, double temperature) {
  if (!(omega > 0.0)) throw ParameterError("thermal_occupation needs omega > 0");
  if (temperature < 0.0) throw ParameterError("thermal_occupation needs T >= 0");
  return bose_occupation(omega, temperature);
}

inline DerivedPlatform derive_platform(const CondensateParams& p, double temperature = 0.0) {
  p.validate();
  DerivedPlatform d;
  d.g_aa = interaction_strength(p.scattering_aa, p.atom_mass);
  d.g_ab = interaction_strength(p.scattering_ab, p.atom_mass);
  d.sound_speed = sound_speed(p);
  d.mode_frequency = mode_frequency(d.sound_speed, p.box_length);
  d.coupling = coupling_strength(p, d.mode_frequency);
  if (p.quasi_1d()) {
    const double area = *p.radial_length * *p.radial_length;
    d.normalization = constants::hbar / (2.0 * p.box_length * d.g_aa / area);
  } else {
    d.normalization = constants::hbar / (2.0 * p.volume() * d.g_aa);
  }
  d.temperature = temperature;
  d.thermal_occupation = thermal_occupation(d.mode_frequency, temperature);
  return d;
}

/// Every dot couples identically: one g per entry of omega_d.
inline ModelSpec to_model_spec(const CondensateParams& p, ModelKind kind, const std::vector<double>& omega_d) {
  const auto d = derive_platform(p);
  ModelSpec spec{kind, d.mode_frequency, omega_d, std::vector<double>(omega_d.size(), d.coupling)};
  spec.validate();
  return spec;
}

// ---------------------------------------------------------------------------
// Diagnostics

enum class Regime { sc, usc, dsc };

inline std::string_view to_string(Regime r) {
  switch (r) {
    case Regime::sc: return "SC";
    case Regime::usc: return "USC";
    case Regime::dsc: return "DSC";
  }
  return "?";
}

/// Bounds on max_n |g_n| / Omega_f. Defaults: SC below 0.1, DSC from 1.
struct RegimeThresholds {
  double usc = 0.1;
  double dsc = 1.0;
};

inline Regime regime_classifier(const ModelSpec& spec, RegimeThresholds t = {}) {
  spec.validate();
  double gmax = 0.0;
  for (double c : spec.g) gmax = std::max(gmax, std::abs(c));
  const double ratio = gmax / spec.omega_f;
  if (ratio >= t.dsc) return Regime::dsc;
  if (ratio >= t.usc) return Regime::usc;
  return Regime::sc;
}

struct QuenchReport {
  double g_before = 0.0;
  double g_after = 0.0;
  double quench_time = 0.0;
  double mode_period = 0.0;  // 2 pi / Omega_f
  double ratio = 0.0;        // quench_time / mode_period
  bool instantaneous = false;
  std::string message;
};

/// A quench counts as instantaneous when quench_time <= 0.01 x mode period (inclusive).
inline QuenchReport quench_feasibility(double g_before, double g_after, double quench_time, const ModelSpec& spec) {
  if (!(quench_time > 0.0)) throw ParameterError("quench_time must be positive");
  spec.validate();
  QuenchReport r;
  r.g_before = g_before;
  r.g_after = g_after;
  r.quench_time = quench_time;
  r.mode_period = 2.0 * constants::pi / spec.omega_f;
  r.ratio = quench_time / r.mode_period;
  r.instantaneous = quench_time <= 0.01 * r.mode_period;
  r.message = r.instantaneous
                  ? "quench is effectively instantaneous on the mode timescale"
                  : "warning: quench lasts " + std::to_string(r.ratio) +
                        " mode periods; a sudden-switch initial state is not justified";
  return r;
}

}  // namespace rabisim
