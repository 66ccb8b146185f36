#include <gtest/gtest.h>

#include <cmath>

#include "rabisim/physical_mapping.hpp"

using namespace rabisim;

namespace {

constexpr double kPi = constants::pi;

CondensateParams box_10um(double ratio_ab = 1.0) {
  CondensateParams p;
  p.scattering_aa = 102 * constants::bohr_radius;
  p.scattering_ab = ratio_ab * p.scattering_aa;
  p.density = 2.761e21;
  p.box_length = 10e-6;
  return p;
}

}  // namespace

TEST(InteractionStrength, ZeroAndLinear) {
  EXPECT_EQ(interaction_strength(0.0, constants::mass_rb87), 0.0);
  const double a = 50 * constants::bohr_radius;
  EXPECT_NEAR(interaction_strength(2 * a, constants::mass_rb87), 2 * interaction_strength(a, constants::mass_rb87),
              1e-15 * interaction_strength(a, constants::mass_rb87));
  EXPECT_THROW(interaction_strength(a, 0.0), ParameterError);
  EXPECT_THROW(interaction_strength(a, -1.0), ParameterError);
}

TEST(InteractionStrength, Rubidium87) {
  const double g = interaction_strength(102 * constants::bohr_radius, constants::mass_rb87);
  // 4 pi hbar^2 a / m with CODATA constants and m = 86.909180531 u.
  EXPECT_NEAR(g, 5.2270e-51, 0.0005e-51);
  // Same arithmetic with the rounded 1.4432e-25 kg mass.
  EXPECT_NEAR(interaction_strength(102 * 5.29177e-11, 1.4432e-25), 5.2265e-51, 0.0005e-51);
}

TEST(SoundSpeed, SquareRootScaling) {
  auto p = box_10um();
  const double v1 = sound_speed(p);
  p.scattering_aa *= 2;
  EXPECT_NEAR(sound_speed(p) / v1, std::sqrt(2.0), 1e-14);
}

TEST(SoundSpeed, InversionGivesTenMillimetresPerSecond) {
  auto p = box_10um();
  p.density = 1e-4 * p.atom_mass / interaction_strength(p.scattering_aa, p.atom_mass);
  EXPECT_NEAR(sound_speed(p), 10e-3, 1e-15);
}

TEST(SoundSpeed, RubidiumDensities) {
  auto p = box_10um();
  EXPECT_NEAR(sound_speed(p), 10e-3, 0.01e-3);
  p.density = 2.76e20;
  EXPECT_NEAR(sound_speed(p), 3.16e-3, 0.01e-3);
}

TEST(ModeFrequency, Examples) {
  EXPECT_DOUBLE_EQ(mode_frequency(10e-3, 10e-6), 2 * kPi * 500);
  EXPECT_DOUBLE_EQ(mode_frequency(10e-3, 5e-6), 2 * kPi * 1000);
  EXPECT_DOUBLE_EQ(mode_frequency(10e-3, 20e-6), mode_frequency(10e-3, 10e-6) / 2);
  EXPECT_THROW(mode_frequency(0.0, 1e-6), ParameterError);
  EXPECT_THROW(mode_frequency(1e-3, 0.0), ParameterError);
}

TEST(ModeFrequency, TimesLengthOverSpeedIsPi) {
  for (double v : {1e-3, 4.2e-3, 2e-2})
    for (double L : {1e-6, 7.5e-6, 3e-5}) EXPECT_NEAR(mode_frequency(v, L) * L / v, kPi, 1e-14);
}

TEST(Coupling, VanishesAtEqualScattering) {
  const auto p = box_10um(1.0);
  EXPECT_EQ(coupling_strength(p, 2 * kPi * 500), 0.0);
}

TEST(Coupling, LinearInScatteringDifference) {
  const double w = 2 * kPi * 500;
  const double g1 = coupling_strength(box_10um(2.0), w);
  const double g3 = coupling_strength(box_10um(4.0), w);
  const double gm = coupling_strength(box_10um(0.5), w);
  EXPECT_NEAR(g3 / g1, 3.0, 1e-12);
  EXPECT_NEAR(gm / g1, -0.5, 1e-12);
  EXPECT_LT(gm, 0.0);
}

TEST(Coupling, ThreeDimensionalPrefactor) {
  // g = sqrt(w / (2 hbar V g_aa)) g_aa (r - 1) with V = L^3; independent of density.
  const double w = 2 * kPi * 500;
  const double g_aa = interaction_strength(102 * constants::bohr_radius, constants::mass_rb87);
  const double prefactor = std::sqrt(w / (2 * constants::hbar * 1e-15 * g_aa)) * g_aa;
  EXPECT_NEAR(prefactor, 8.8236, 1e-3);
  EXPECT_NEAR(coupling_strength(box_10um(5.0), w), 4 * prefactor, 1e-9 * prefactor);
  // 2 pi x 5 Hz and 2 pi x 100 Hz bracket ratios of about 4.6 and 72.
  EXPECT_NEAR(1 + 2 * kPi * 5 / prefactor, 4.56, 0.01);
  EXPECT_NEAR(1 + 2 * kPi * 100 / prefactor, 72.2, 0.1);
}

TEST(Coupling, QuasiOneDimensionalEnhancement) {
  const double w = 2 * kPi * 500;
  auto p3 = box_10um(3.0);
  auto p1 = p3;
  const double lambda = 1e-3;
  p1.radial_length = std::sqrt(lambda) * p1.box_length;
  EXPECT_NEAR(p1.aspect_ratio(), lambda, 1e-18);
  const double ratio = coupling_strength(p1, w) / coupling_strength(p3, w);
  EXPECT_NEAR(ratio, 1 / std::sqrt(lambda), 1e-9);
  EXPECT_NEAR(ratio, 31.6228, 1e-4);
}

TEST(ThermalOccupation, TenNanokelvin) {
  const double n = thermal_occupation(2 * kPi * 500, 10e-9);
  EXPECT_NEAR(n, 0.0998, 1e-3);
  EXPECT_LT(n, 0.1);
  EXPECT_EQ(thermal_occupation(2 * kPi * 500, 0.0), 0.0);
}

TEST(ThermalOccupation, MonotoneAndDetailedBalance) {
  const double w = 2 * kPi * 500;
  double prev = 0.0;
  for (double T = 1e-9; T < 1e-6; T *= 1.5) {
    const double n = thermal_occupation(w, T);
    EXPECT_GT(n, prev);
    prev = n;
    const double boltzmann = std::exp(w / (constants::kB_over_hbar * T));
    EXPECT_NEAR(n + 1, boltzmann * n, 1e-12 * (n + 1));
  }
  EXPECT_THROW(thermal_occupation(0.0, 1e-9), ParameterError);
  EXPECT_THROW(thermal_occupation(w, -1.0), ParameterError);
}

TEST(DerivePlatform, FieldsConsistent) {
  const auto d = derive_platform(box_10um(3.0), 10e-9);
  EXPECT_NEAR(d.sound_speed, 10e-3, 0.01e-3);
  EXPECT_NEAR(d.mode_frequency, kPi * d.sound_speed / 10e-6, 1e-12 * d.mode_frequency);
  EXPECT_NEAR(d.normalization, constants::hbar / (2 * 1e-15 * d.g_aa), 1e-12 * d.normalization);
  EXPECT_NEAR(d.coupling, std::sqrt(d.normalization * d.mode_frequency) / constants::hbar * (d.g_ab - d.g_aa),
              1e-10 * std::abs(d.coupling));
  EXPECT_NEAR(d.thermal_occupation, thermal_occupation(d.mode_frequency, 10e-9), 1e-15);
}

TEST(DerivePlatform, ValidationErrors) {
  auto p = box_10um();
  p.density = 0;
  EXPECT_THROW(derive_platform(p), ParameterError);
  p = box_10um();
  p.radial_length = 2 * p.box_length;
  EXPECT_THROW(derive_platform(p), ParameterError);
  p = box_10um();
  p.box_length = -1;
  EXPECT_THROW(derive_platform(p), ParameterError);
}

TEST(ToModelSpec, SharedCoupling) {
  const auto spec = to_model_spec(box_10um(2.0), ModelKind::dicke, {100.0, 200.0});
  EXPECT_EQ(spec.n_qubits(), 2);
  EXPECT_EQ(spec.g[0], spec.g[1]);
  EXPECT_EQ(spec.omega_f, derive_platform(box_10um(2.0)).mode_frequency);
}

TEST(Regime, Classification) {
  auto spec = [](double ratio) { return ModelSpec{ModelKind::qrm, 1.0, {1.0}, {ratio}}; };
  EXPECT_EQ(regime_classifier(spec(0.05)), Regime::sc);
  EXPECT_EQ(regime_classifier(spec(0.5)), Regime::usc);
  EXPECT_EQ(regime_classifier(spec(1.0)), Regime::dsc);
  EXPECT_EQ(regime_classifier(spec(0.1)), Regime::usc);
  EXPECT_EQ(regime_classifier(spec(-0.5)), Regime::usc);
  EXPECT_EQ(regime_classifier(spec(0.5), RegimeThresholds{0.6, 2.0}), Regime::sc);
  EXPECT_EQ(to_string(Regime::dsc), "DSC");
}

TEST(Quench, Feasibility) {
  const ModelSpec spec{ModelKind::qrm, 2 * kPi * 500, {2 * kPi * 500}, {1.0}};
  const auto slow = quench_feasibility(0.0, 1.0, 1e-3, spec);
  EXPECT_NEAR(slow.ratio, 0.5, 1e-12);
  EXPECT_FALSE(slow.instantaneous);
  EXPECT_NE(slow.message.find("warning"), std::string::npos);
  EXPECT_TRUE(quench_feasibility(0.0, 1.0, 1e-6, spec).instantaneous);
  const double period = 2 * kPi / spec.omega_f;
  EXPECT_TRUE(quench_feasibility(0.0, 1.0, 0.01 * period, spec).instantaneous);
  EXPECT_FALSE(quench_feasibility(0.0, 1.0, std::nextafter(0.01 * period, 1.0), spec).instantaneous);
  EXPECT_THROW(quench_feasibility(0.0, 1.0, 0.0, spec), ParameterError);
}
