// trap.hpp — Tapered-trap geometry, potentials and derived engine parameters

#pragma once

#include <stdexcept>

namespace ionheat::trap {

// Funnel-shaped trap: radial confinement stiffens as the ion moves along -z,
// parameterized by the taper angle theta and the waist radius r0 at z = 0.
// Angular frequencies throughout (rad/s).
struct TrapGeometry {
    double theta{};   // taper angle, rad, in (0, pi/2)
    double r0{};      // trap radius at z = 0, m
    double mass{};    // ion mass, kg
    double omega_r{}; // mean radial angular frequency, rad/s
    double omega_z{}; // axial angular frequency, rad/s

    double epsilon() const; // tan(theta)/r0, 1/m
    double taper_g() const; // 4*epsilon, 1/m
    void validate() const;  // throws std::invalid_argument
};

// Engine-level parameters: mode-mode coupling, bath rates and occupations,
// hot-bath switching. Rates are angular (rad/s), temperatures in Kelvin.
struct EngineParams {
    double beta{};    // radial-axial coupling, rad/s
    double kappa_a{}; // radial cold-bath rate
    double kappa_h{}; // radial hot-bath rate (peak value of the square wave)
    double kappa_b{}; // axial cold-bath rate
    double T_h{}, T_a{}, T_b{}, T_0{};
    double nbar_h{}, nbar_a{}, nbar_b{};
    double heating_period{}; // s
    double heating_duty{0.5};
    double heating_phase{0.0}; // s, offset of the on-edge
};

struct PotentialSample {
    double r{}; // m
    double z{}; // m
    double value_exact{};  // eV
    double value_approx{}; // eV
};

enum class PotentialForm { exact, approx };

// beta = g * omega_r * sqrt(hbar / (2 m omega_z)); scales as tan(theta)/r0.
double compute_beta(const TrapGeometry& geom);

// Mean thermal occupation 1/(exp(hbar*omega/kB*T) - 1). T <= 0 is a domain error.
double planck_occupation(double omega, double T_kelvin);

// Trap potential in eV at (r, z). The exact form uses the z-dependent radial
// frequency omega_r/(1+eps z)^2; the approximate form its first-order taper
// expansion (1 - g z). epsilon*z <= -1 is a singular-geometry error.
double potential(const TrapGeometry& geom, double r, double z, PotentialForm form);

PotentialSample sample_potential(const TrapGeometry& geom, double r, double z);

// Fills beta and the Planck occupations from the geometry, temperatures and
// rates. nbar_h/a are evaluated at omega_r, nbar_b at omega_z.
EngineParams derive_engine_params(const TrapGeometry& geom,
                                  double T_h, double T_a, double T_b, double T_0,
                                  double kappa_a, double kappa_h, double kappa_b,
                                  double heating_period, double heating_duty,
                                  double heating_phase = 0.0);

// Invariant checks (beta < omega_r, positive rates/temperatures, Planck
// consistency of the (T, nbar) pairs, duty in (0,1)). Throws on violation.
void validate_engine_params(const EngineParams& p, const TrapGeometry& geom);

} // namespace ionheat::trap
