// constants.hpp — Physical constants (CODATA 2018 / SI 2019 exact values)

#pragma once

namespace ionheat::phys {

inline constexpr double hbar = 1.054571817e-34;               // J s
inline constexpr double k_boltzmann = 1.380649e-23;           // J / K
inline constexpr double atomic_mass_unit = 1.66053906660e-27; // kg
inline constexpr double electron_volt = 1.602176634e-19;      // J
inline constexpr double two_pi = 6.283185307179586476925287;

// Thermal frequency k_B T / hbar in rad/s; the internal unit system sets
// hbar = k_B = 1 with all energies and temperatures carried as angular
// frequencies, so Kelvin only appears at the I/O boundary.
inline constexpr double thermal_frequency(double T_kelvin) {
    return k_boltzmann * T_kelvin / hbar;
}

} // namespace ionheat::phys
