#pragma once

#include <numbers>

namespace rabisim::constants {

// CODATA 2018 values. Bump kTableVersion whenever any entry changes.
inline constexpr int kTableVersion = 1;

inline constexpr double pi = std::numbers::pi;
inline constexpr double hbar = 1.054571817e-34;           // J s
inline constexpr double k_boltzmann = 1.380649e-23;       // J / K
inline constexpr double bohr_radius = 5.29177210903e-11;  // m
inline constexpr double atomic_mass_unit = 1.66053906660e-27;  // kg

// Temperature to angular frequency, k_B / hbar in rad s^-1 K^-1 (~1.30920e11).
inline constexpr double kB_over_hbar = k_boltzmann / hbar;

inline constexpr double mass_rb87 = 86.909180531 * atomic_mass_unit;
inline constexpr double mass_k40 = 39.96399848 * atomic_mass_unit;

}  // namespace rabisim::constants
