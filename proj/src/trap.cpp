#include "ionheat/trap.hpp"
#include "ionheat/constants.hpp"

#include <cmath>
#include <string>

namespace ionheat::trap {

double TrapGeometry::epsilon() const { return std::tan(theta) / r0; }

double TrapGeometry::taper_g() const { return 4.0 * epsilon(); }

void TrapGeometry::validate() const {
    if (!(theta > 0.0) || !(theta < phys::two_pi / 4.0))
        throw std::invalid_argument("trap: theta must lie in (0, pi/2)");
    if (!(r0 > 0.0)) throw std::invalid_argument("trap: r0 must be positive");
    if (!(mass > 0.0)) throw std::invalid_argument("trap: mass must be positive");
    if (!(omega_r > 0.0) || !(omega_z > 0.0) || !(omega_r > omega_z))
        throw std::invalid_argument("trap: need omega_r > omega_z > 0");
}

double compute_beta(const TrapGeometry& geom) {
    geom.validate();
    const double zpl = std::sqrt(phys::hbar / (2.0 * geom.mass * geom.omega_z));
    return geom.taper_g() * geom.omega_r * zpl;
}

double planck_occupation(double omega, double T_kelvin) {
    if (!(omega > 0.0)) throw std::domain_error("planck_occupation: omega must be positive");
    if (!(T_kelvin > 0.0)) throw std::domain_error("planck_occupation: T must be positive");
    const double x = phys::hbar * omega / (phys::k_boltzmann * T_kelvin);
    if (x > 700.0) return 0.0; // frozen mode; exp would overflow
    return 1.0 / std::expm1(x);
}

double potential(const TrapGeometry& geom, double r, double z, PotentialForm form) {
    const double eps_z = geom.epsilon() * z;
    double radial_term = 0.0;
    if (form == PotentialForm::exact) {
        if (eps_z <= -1.0)
            throw std::domain_error("potential: singular geometry, epsilon*z <= -1");
        const double scale = 1.0 + eps_z;
        radial_term = geom.omega_r * geom.omega_r * r * r / (scale * scale * scale * scale);
    } else {
        radial_term = geom.omega_r * geom.omega_r * r * r * (1.0 - geom.taper_g() * z);
    }
    const double joules =
        0.5 * geom.mass * (radial_term + geom.omega_z * geom.omega_z * z * z);
    return joules / phys::electron_volt;
}

PotentialSample sample_potential(const TrapGeometry& geom, double r, double z) {
    return PotentialSample{r, z, potential(geom, r, z, PotentialForm::exact),
                           potential(geom, r, z, PotentialForm::approx)};
}

EngineParams derive_engine_params(const TrapGeometry& geom,
                                  double T_h, double T_a, double T_b, double T_0,
                                  double kappa_a, double kappa_h, double kappa_b,
                                  double heating_period, double heating_duty,
                                  double heating_phase) {
    EngineParams p;
    p.beta = compute_beta(geom);
    p.kappa_a = kappa_a;
    p.kappa_h = kappa_h;
    p.kappa_b = kappa_b;
    p.T_h = T_h;
    p.T_a = T_a;
    p.T_b = T_b;
    p.T_0 = T_0;
    p.nbar_h = planck_occupation(geom.omega_r, T_h);
    p.nbar_a = planck_occupation(geom.omega_r, T_a);
    p.nbar_b = planck_occupation(geom.omega_z, T_b);
    p.heating_period = heating_period;
    p.heating_duty = heating_duty;
    p.heating_phase = heating_phase;
    return p;
}

void validate_engine_params(const EngineParams& p, const TrapGeometry& geom) {
    geom.validate();
    if (!(p.beta >= 0.0) || !(p.beta < geom.omega_r))
        throw std::invalid_argument(
            "engine: beta must be smaller than the radial frequency");
    if (!(p.kappa_a > 0.0) || !(p.kappa_h > 0.0) || !(p.kappa_b > 0.0))
        throw std::invalid_argument("engine: all rates must be positive");
    if (!(p.T_h > 0.0) || !(p.T_a > 0.0) || !(p.T_b > 0.0) || !(p.T_0 > 0.0))
        throw std::invalid_argument("engine: all temperatures must be positive");
    if (!(p.heating_period > 0.0))
        throw std::invalid_argument("engine: heating_period must be positive");
    if (!(p.heating_duty > 0.0) || !(p.heating_duty < 1.0))
        throw std::invalid_argument("engine: heating_duty must lie in (0, 1)");
    const double tol = 5e-2;
    auto check_nbar = [&](double nbar, double omega, double T, const std::string& name) {
        const double ref = planck_occupation(omega, T);
        if (std::abs(nbar - ref) > tol * std::max(ref, 1e-12))
            throw std::invalid_argument("engine: " + name +
                                        " inconsistent with the Planck distribution");
    };
    check_nbar(p.nbar_h, geom.omega_r, p.T_h, "nbar_h");
    check_nbar(p.nbar_a, geom.omega_r, p.T_a, "nbar_a");
    check_nbar(p.nbar_b, geom.omega_z, p.T_b, "nbar_b");
}

} // namespace ionheat::trap
