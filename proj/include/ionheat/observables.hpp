// observables.hpp — Expectation values and phase-space diagnostics
//
// Conventions: canonical quadratures q = (a^dag + a)/sqrt(2), p = i(a^dag - a)/sqrt(2)
// with [q, p] = i, so the vacuum has <q^2> = 1/2. Reported quadrature variances
// use the vacuum-1/4 normalization Var[(a + a^dag)/2], i.e. half the canonical
// second moment; squeezing means a value below 1/4. Wigner grids use the
// canonical axes (vacuum peak 1/pi).

#pragma once

#include "ionheat/fock.hpp"
#include "ionheat/trap.hpp"

#include <vector>

namespace ionheat::obs {

using fock::FockDims;
using fock::MatrixXcd;

struct Moments {
    double n_r{}, n_z{};
    double q_r_mean{}, p_r_mean{}, q_z_mean{}, p_z_mean{};
    double q_r_sq{}, p_r_sq{};  // canonical second moments
    double var_qr{}, var_pr{};  // vacuum-1/4 normalization
    double q_z_displacement{};  // <b + b^dag>
    double corr_qr2_pz{};       // <q_r^2 p_z> - <q_r^2><p_z>
    double max_imag_residual{};
};

Moments expectations(const MatrixXcd& rho, const FockDims& dims);

// Re Tr[rho (A_radial (x) B_axial)] for small single-mode matrices.
double expect_product(const MatrixXcd& rho, const FockDims& dims,
                      const Eigen::MatrixXd& radial, const Eigen::MatrixXd& axial);

// Net energy flux into the cold axial bath, hbar omega_z kappa_b (n_z - nbar_b).
double dissipated_power_w(double n_z, double omega_z, double kappa_b, double nbar_b);
// The same in units of hbar*omega_z*omega_z.
double dissipated_power_scaled(double n_z, double omega_z, double kappa_b, double nbar_b);

struct TraceRow {
    double time_s{}, scaled_time{};
    double n_r{}, n_z{};
    double var_qr{}, var_pr{};
    double corr_qr2_pz{};
    double p_dis_w{};
    double u_t{};
};

struct ModeMoments {
    double n{}, q_mean{}, p_mean{}, q_sq{}, p_sq{}, qp_sym{};
    double var_q{}, var_p{}; // canonical variances
};

ModeMoments mode_moments(const MatrixXcd& rho_mode);

struct WignerGridSpec {
    double halfwidth{6.0};
    int points{121};
};

struct WignerGrid {
    std::vector<double> q, p;
    Eigen::MatrixXd values; // values(iq, ip)
    double normalization{};
    bool normalization_ok{};
};

// Displaced-parity form W(q,p) = (2/pi) Tr[rho D(alpha) Pi D(-alpha)],
// alpha = (q + i p)/sqrt(2), evaluated on the truncated basis.
WignerGrid wigner(const MatrixXcd& rho_mode, const WignerGridSpec& spec);

// Ratio (>= 1) of the principal variances of the (q, p) covariance matrix;
// 1 for thermal and vacuum states, > 1 under squeezing.
double covariance_eccentricity(const MatrixXcd& rho_mode);

} // namespace ionheat::obs
