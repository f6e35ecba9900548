#include "ionheat/observables.hpp"
#include "ionheat/constants.hpp"
#include "ionheat/errors.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>

namespace ionheat::obs {

namespace {

using cplx = std::complex<double>;

double real_checked(cplx v, double scale, double& max_imag) {
    const double im = std::abs(v.imag());
    max_imag = std::max(max_imag, im);
    if (im > 1e-6 * std::max(1.0, scale))
        throw InvariantViolation("observable with large imaginary part");
    return v.real();
}

} // namespace

double expect_product(const MatrixXcd& rho, const FockDims& dims,
                      const Eigen::MatrixXd& radial, const Eigen::MatrixXd& axial) {
    // Tr[rho (A (x) B)] = sum_{k,i} rho(i,k) A(k_r,i_r) B(k_z,i_z)
    const int nr = dims.n_r, nz = dims.n_z;
    cplx acc(0.0, 0.0);
    for (int kr = 0; kr < nr; ++kr)
        for (int ir = 0; ir < nr; ++ir) {
            const double a = radial(kr, ir);
            if (a == 0.0) continue;
            for (int kz = 0; kz < nz; ++kz)
                for (int iz = 0; iz < nz; ++iz) {
                    const double b = axial(kz, iz);
                    if (b == 0.0) continue;
                    acc += rho(ir * nz + iz, kr * nz + kz) * (a * b);
                }
        }
    return acc.real();
}

ModeMoments mode_moments(const MatrixXcd& rho_mode) {
    const int n = int(rho_mode.rows());
    const Eigen::MatrixXd a = fock::ladder(n);
    const Eigen::MatrixXd x2 = a + a.transpose(); // sqrt(2) q
    const Eigen::MatrixXd num = a.transpose() * a;

    auto tr = [&](const Eigen::MatrixXd& m) {
        return (rho_mode * m.cast<cplx>()).trace();
    };

    ModeMoments mm;
    double junk = 0.0;
    mm.n = real_checked(tr(num), 1.0, junk);
    const cplx a_mean = (rho_mode * a.cast<cplx>()).trace();
    // q = (a^dag + a)/sqrt2 and p = i(a^dag - a)/sqrt2, so
    // <q> = sqrt2 Re<a> and <p> = sqrt2 Im<a>.
    mm.q_mean = std::sqrt(2.0) * a_mean.real();
    mm.p_mean = std::sqrt(2.0) * a_mean.imag();
    const cplx a2 = (rho_mode * (a * a).cast<cplx>()).trace();
    // q^2 = (a^2 + a^dag^2 + 2n + 1)/2, p^2 = -(a^2 + a^dag^2 - 2n - 1)/2
    mm.q_sq = (2.0 * a2.real() + 2.0 * mm.n + 1.0) / 2.0;
    mm.p_sq = (-2.0 * a2.real() + 2.0 * mm.n + 1.0) / 2.0;
    // (qp + pq)/2 = Im<a^2>
    mm.qp_sym = a2.imag();
    mm.var_q = mm.q_sq - mm.q_mean * mm.q_mean;
    mm.var_p = mm.p_sq - mm.p_mean * mm.p_mean;
    return mm;
}

Moments expectations(const MatrixXcd& rho, const FockDims& dims) {
    dims.validate();
    if (rho.rows() != dims.dim() || rho.cols() != dims.dim())
        throw std::invalid_argument("expectations: shape mismatch");

    const MatrixXcd rho_a = fock::partial_trace_axial(rho, dims);
    const MatrixXcd rho_b = fock::partial_trace_radial(rho, dims);
    const ModeMoments ma = mode_moments(rho_a);
    const ModeMoments mb = mode_moments(rho_b);

    Moments m;
    m.n_r = ma.n;
    m.n_z = mb.n;
    m.q_r_mean = ma.q_mean;
    m.p_r_mean = ma.p_mean;
    m.q_z_mean = mb.q_mean;
    m.p_z_mean = mb.p_mean;
    m.q_r_sq = ma.q_sq;
    m.p_r_sq = ma.p_sq;
    m.var_qr = ma.var_q / 2.0;
    m.var_pr = ma.var_p / 2.0;
    m.q_z_displacement = std::sqrt(2.0) * mb.q_mean;

    // <q_r^2 (x) p_z> via the banded product rule; p_z = i(b^dag - b)/sqrt(2)
    // has a purely imaginary matrix, so fold the i into the radial factor.
    const int nr = dims.n_r, nz = dims.n_z;
    const Eigen::MatrixXd ar = fock::ladder(nr);
    const Eigen::MatrixXd az = fock::ladder(nz);
    const Eigen::MatrixXd q2 =
        0.5 * (ar * ar + (ar * ar).transpose() + 2.0 * ar.transpose() * ar +
               Eigen::MatrixXd::Identity(nr, nr));
    const Eigen::MatrixXd bdiff = (az.transpose() - az) / std::sqrt(2.0); // p_z / i
    // Tr[rho (q2 (x) i*bdiff)]: compute complex trace with the imaginary unit.
    cplx acc(0.0, 0.0);
    for (int kr = 0; kr < nr; ++kr)
        for (int ir = 0; ir < nr; ++ir) {
            const double a = q2(kr, ir);
            if (a == 0.0) continue;
            for (int kz = 0; kz < nz; ++kz)
                for (int iz = 0; iz < nz; ++iz) {
                    const double b = bdiff(kz, iz);
                    if (b == 0.0) continue;
                    acc += rho(ir * nz + iz, kr * nz + kz) * cplx(0.0, a * b);
                }
        }
    const double q2pz = real_checked(acc, std::abs(acc.real()) + 1.0,
                                     m.max_imag_residual);
    m.corr_qr2_pz = q2pz - ma.q_sq * mb.p_mean;
    m.max_imag_residual = std::max(m.max_imag_residual, 0.0);
    return m;
}

double dissipated_power_w(double n_z, double omega_z, double kappa_b, double nbar_b) {
    if (!(kappa_b > 0.0))
        throw std::invalid_argument("dissipated_power: kappa_b must be positive");
    return phys::hbar * omega_z * kappa_b * (n_z - nbar_b);
}

double dissipated_power_scaled(double n_z, double omega_z, double kappa_b,
                               double nbar_b) {
    return dissipated_power_w(n_z, omega_z, kappa_b, nbar_b) /
           (phys::hbar * omega_z * omega_z);
}

WignerGrid wigner(const MatrixXcd& rho_mode, const WignerGridSpec& spec) {
    if (spec.points < 2) throw std::invalid_argument("wigner: need at least 2 points");
    const int n = int(rho_mode.rows());

    // The displacement operator on a truncated basis is only faithful while the
    // displaced state fits inside the truncation, so embed the state in a
    // basis large enough for the far grid corner.
    const double amax_sq = spec.halfwidth * spec.halfwidth; // |alpha|^2 at a corner
    const int pad =
        std::max(n, int(std::ceil(amax_sq + 4.0 * std::sqrt(amax_sq) + 8.0)));
    MatrixXcd rho = MatrixXcd::Zero(pad, pad);
    rho.topLeftCorner(n, n) = rho_mode;

    // D(alpha) = R(-phi) D(|alpha|) R(phi) with R diagonal phase rotations and
    // D(s) = exp(s(a^dag - a)); one eigendecomposition of i(a^dag - a) serves
    // every grid point.
    const Eigen::MatrixXd a = fock::ladder(pad);
    const Eigen::MatrixXcd gen =
        cplx(0.0, 1.0) * (a.transpose() - a).cast<cplx>();
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(gen);
    const Eigen::MatrixXcd& V = es.eigenvectors();
    const Eigen::VectorXd& lam = es.eigenvalues();

    Eigen::VectorXd parity(pad);
    for (int k = 0; k < pad; ++k) parity[k] = (k % 2 == 0) ? 1.0 : -1.0;

    WignerGrid grid;
    grid.q.resize(std::size_t(spec.points));
    grid.p.resize(std::size_t(spec.points));
    const double step = 2.0 * spec.halfwidth / (spec.points - 1);
    for (int i = 0; i < spec.points; ++i) {
        grid.q[std::size_t(i)] = -spec.halfwidth + i * step;
        grid.p[std::size_t(i)] = -spec.halfwidth + i * step;
    }
    grid.values.resize(spec.points, spec.points);

    const double inv_pi = 2.0 / phys::two_pi;
    Eigen::MatrixXcd scaled(pad, pad), disp(pad, pad), rho_rot(pad, pad), b(pad, pad);
    Eigen::VectorXcd phase(pad);
    for (int iq = 0; iq < spec.points; ++iq) {
        for (int ip = 0; ip < spec.points; ++ip) {
            const cplx alpha(grid.q[std::size_t(iq)] / std::sqrt(2.0),
                             grid.p[std::size_t(ip)] / std::sqrt(2.0));
            const double s = std::abs(alpha);
            const double phi = std::arg(alpha);
            for (int k = 0; k < pad; ++k)
                phase[k] = std::exp(cplx(0.0, -s * lam[k]));
            scaled = V * phase.asDiagonal();
            disp.noalias() = scaled * V.adjoint(); // D(s)
            // rho' = R(phi) rho R(-phi): pure phase scaling of the entries.
            for (int col = 0; col < pad; ++col)
                for (int row = 0; row < pad; ++row)
                    rho_rot(row, col) =
                        rho(row, col) * std::exp(cplx(0.0, -phi * (row - col)));
            b.noalias() = rho_rot * disp;
            cplx tr(0.0, 0.0);
            for (int k = 0; k < pad; ++k) {
                cplx diag(0.0, 0.0);
                for (int i = 0; i < pad; ++i)
                    diag += std::conj(disp(i, k)) * b(i, k);
                tr += parity[k] * diag;
            }
            // 1/pi on the (q,p) grid: unit normalization under dq dp = 2 d^2alpha
            // and a vacuum peak of 1/pi.
            grid.values(iq, ip) = inv_pi * tr.real();
        }
    }
    grid.normalization = grid.values.sum() * step * step;
    grid.normalization_ok = std::abs(grid.normalization - 1.0) <= 0.02;
    return grid;
}

double covariance_eccentricity(const MatrixXcd& rho_mode) {
    const ModeMoments mm = mode_moments(rho_mode);
    const double vq = mm.var_q;
    const double vp = mm.var_p;
    const double c = mm.qp_sym - mm.q_mean * mm.p_mean;
    const double mean = 0.5 * (vq + vp);
    const double dev = std::sqrt(0.25 * (vq - vp) * (vq - vp) + c * c);
    const double lo = mean - dev;
    if (!(lo > 0.0))
        throw InvariantViolation("covariance matrix not positive definite");
    return (mean + dev) / lo;
}

} // namespace ionheat::obs
