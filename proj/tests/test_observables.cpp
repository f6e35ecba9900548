#include "ionheat/constants.hpp"
#include "ionheat/observables.hpp"
#include "ionheat/otto.hpp"

#include "test_helpers.hpp"

#include <doctest.h>

using namespace ionheat;
using fock::FockDims;
using fock::MatrixXcd;

namespace {

constexpr double pi = phys::two_pi / 2.0;

// Position distribution from the number basis via Hermite recursion; used as
// an independent oracle for the Wigner marginal.
double position_density(const MatrixXcd& rho, double q) {
    const int n = int(rho.rows());
    std::vector<double> psi(static_cast<std::size_t>(n), 0.0);
    psi[0] = std::pow(pi, -0.25) * std::exp(-q * q / 2.0);
    if (n > 1) psi[1] = std::sqrt(2.0) * q * psi[0];
    for (int k = 2; k < n; ++k)
        psi[std::size_t(k)] =
            std::sqrt(2.0 / k) * q * psi[std::size_t(k - 1)] -
            std::sqrt(double(k - 1) / k) * psi[std::size_t(k - 2)];
    std::complex<double> acc(0.0, 0.0);
    for (int a = 0; a < n; ++a)
        for (int b = 0; b < n; ++b)
            acc += rho(a, b) * psi[std::size_t(a)] * psi[std::size_t(b)];
    return acc.real();
}

// Squeezed thermal single-mode state from the Gibbs state of a quadratic form.
MatrixXcd squeezed_thermal(int levels, double omega0, double lambda, double theta) {
    Eigen::MatrixXd a = fock::ladder(levels);
    Eigen::MatrixXd h = omega0 * (a.transpose() * a) +
                        0.5 * lambda * (a * a + (a * a).transpose());
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(h);
    Eigen::VectorXd w = (-(es.eigenvalues().array() - es.eigenvalues().minCoeff()) /
                         theta)
                            .exp();
    w /= w.sum();
    Eigen::MatrixXd rho = es.eigenvectors() * w.asDiagonal() *
                          es.eigenvectors().transpose();
    return rho.cast<std::complex<double>>();
}

} // namespace

TEST_CASE("vacuum moments") {
    const FockDims dims{4, 4};
    MatrixXcd rho = MatrixXcd::Zero(dims.dim(), dims.dim());
    rho(0, 0) = 1.0;
    const auto m = obs::expectations(rho, dims);
    CHECK(m.n_r == doctest::Approx(0.0));
    CHECK(m.n_z == doctest::Approx(0.0));
    CHECK(m.var_qr == doctest::Approx(0.25).epsilon(1e-12));
    CHECK(m.var_pr == doctest::Approx(0.25).epsilon(1e-12));
    CHECK(m.corr_qr2_pz == doctest::Approx(0.0));
}

TEST_CASE("thermal radial moments follow the gaussian oracle") {
    const FockDims dims{40, 2};
    const double nbar = 2.0;
    const MatrixXcd rho = fock::kron(testing::thermal_state(dims.n_r, nbar),
                                     testing::thermal_state(dims.n_z, 0.0));
    const auto m = obs::expectations(rho, dims);
    const double n_trunc = testing::truncated_thermal_mean(dims.n_r, nbar);
    CHECK(m.n_r == doctest::Approx(n_trunc).epsilon(1e-10));
    CHECK(m.var_qr == doctest::Approx((2.0 * n_trunc + 1.0) / 4.0).epsilon(1e-6));
    CHECK(m.var_pr == doctest::Approx((2.0 * n_trunc + 1.0) / 4.0).epsilon(1e-6));
}

TEST_CASE("expectations agree between the composite and reduced routes") {
    const FockDims dims{6, 7};
    const MatrixXcd rho = testing::random_density(dims.dim(), 7);
    const auto m = obs::expectations(rho, dims);

    const Eigen::MatrixXd ar = fock::ladder(dims.n_r);
    const Eigen::MatrixXd az = fock::ladder(dims.n_z);
    const Eigen::MatrixXd ir = Eigen::MatrixXd::Identity(dims.n_r, dims.n_r);
    const Eigen::MatrixXd iz = Eigen::MatrixXd::Identity(dims.n_z, dims.n_z);
    const double n_r_full =
        obs::expect_product(rho, dims, ar.transpose() * ar, iz);
    const double n_z_full =
        obs::expect_product(rho, dims, ir, az.transpose() * az);
    CHECK(m.n_r == doctest::Approx(n_r_full).epsilon(1e-12));
    CHECK(m.n_z == doctest::Approx(n_z_full).epsilon(1e-12));

    const Eigen::MatrixXd q2 =
        0.5 * (ar * ar + (ar * ar).transpose() + 2.0 * ar.transpose() * ar + ir);
    const double q2_full = obs::expect_product(rho, dims, q2, iz);
    CHECK(m.q_r_sq == doctest::Approx(q2_full).epsilon(1e-12));
}

TEST_CASE("dissipated power arithmetic") {
    const double omega_z = phys::two_pi * 5e4;
    const double kappa_b = phys::two_pi * 5e4;
    const double nbar_b = 1.2166;
    CHECK(obs::dissipated_power_w(nbar_b, omega_z, kappa_b, nbar_b) == 0.0);
    // One phonon above equilibrium: hbar * omega_z * kappa_b.
    const double one = obs::dissipated_power_w(nbar_b + 1.0, omega_z, kappa_b, nbar_b);
    CHECK(one == doctest::Approx(1.0409e-23).epsilon(1e-3));
    // Linear in the excess and in kappa_b.
    CHECK(obs::dissipated_power_w(nbar_b + 2.0, omega_z, kappa_b, nbar_b) ==
          doctest::Approx(2.0 * one).epsilon(1e-12));
    CHECK(obs::dissipated_power_w(nbar_b + 1.0, omega_z, 2.0 * kappa_b, nbar_b) ==
          doctest::Approx(2.0 * one).epsilon(1e-12));
    CHECK(obs::dissipated_power_scaled(nbar_b + 1.0, omega_z, kappa_b, nbar_b) ==
          doctest::Approx(kappa_b / omega_z).epsilon(1e-12));
}

TEST_CASE("wigner function of the vacuum") {
    MatrixXcd rho = MatrixXcd::Zero(10, 10);
    rho(0, 0) = 1.0;
    const auto grid = obs::wigner(rho, obs::WignerGridSpec{5.0, 81});
    CHECK(grid.normalization_ok);
    const int mid = 40;
    CHECK(grid.values(mid, mid) == doctest::Approx(1.0 / pi).epsilon(1e-6));
    // Circular contours: four-fold symmetry of samples.
    CHECK(grid.values(mid + 8, mid) ==
          doctest::Approx(grid.values(mid, mid + 8)).epsilon(1e-8));
}

TEST_CASE("wigner peak of a thermal state") {
    const double nbar = 1.5;
    const MatrixXcd rho = testing::thermal_state(30, nbar);
    const auto grid = obs::wigner(rho, obs::WignerGridSpec{7.0, 81});
    CHECK(grid.normalization_ok);
    const int mid = 40;
    CHECK(grid.values(mid, mid) ==
          doctest::Approx(1.0 / (pi * (2.0 * nbar + 1.0))).epsilon(1e-4));
}

TEST_CASE("wigner marginal reproduces the position distribution") {
    const MatrixXcd rho = squeezed_thermal(24, 1.0, -0.25, 0.8);
    const obs::WignerGridSpec spec{6.0, 81};
    const auto grid = obs::wigner(rho, spec);
    const double dq = grid.q[1] - grid.q[0];
    double l1 = 0.0;
    for (std::size_t iq = 0; iq < grid.q.size(); ++iq) {
        double marginal = 0.0;
        for (std::size_t ip = 0; ip < grid.p.size(); ++ip)
            marginal += grid.values(int(iq), int(ip)) * dq;
        l1 += std::abs(marginal - position_density(rho, grid.q[iq])) * dq;
    }
    CHECK(l1 < 0.02);
}

TEST_CASE("wigner flags a grid that is too narrow") {
    const MatrixXcd rho = testing::thermal_state(30, 4.0);
    const auto grid = obs::wigner(rho, obs::WignerGridSpec{1.5, 41});
    CHECK(!grid.normalization_ok);
}

TEST_CASE("covariance eccentricity of isotropic and squeezed states") {
    MatrixXcd vacuum = MatrixXcd::Zero(12, 12);
    vacuum(0, 0) = 1.0;
    CHECK(obs::covariance_eccentricity(vacuum) == doctest::Approx(1.0).epsilon(1e-10));
    CHECK(obs::covariance_eccentricity(testing::thermal_state(30, 3.0)) ==
          doctest::Approx(1.0).epsilon(1e-6));
    const MatrixXcd squeezed = squeezed_thermal(24, 1.0, -0.3, 0.7);
    CHECK(obs::covariance_eccentricity(squeezed) > 1.1);
}

TEST_CASE("uncertainty product respects the bound on random states") {
    const FockDims dims{6, 5};
    for (std::uint32_t seed = 0; seed < 25; ++seed) {
        const MatrixXcd rho = testing::random_density(dims.dim(), seed + 100);
        const auto m = obs::expectations(rho, dims);
        CHECK(m.var_qr * m.var_pr >= 1.0 / 16.0 - 1e-6);
    }
}

TEST_CASE("quadrature variances of a squeezed state dip below the vacuum value") {
    // Gibbs state of the reduced radial Hamiltonian at beta q_z = 0.4 omega_r:
    // one canonical variance drops below 1/2, i.e. reported variance < 1/4.
    const MatrixXcd rho = squeezed_thermal(24, 1.0, -0.2, 0.05);
    const auto mm = obs::mode_moments(rho);
    CHECK(std::min(mm.var_q, mm.var_p) / 2.0 < 0.25);
    CHECK(mm.var_q * mm.var_p / 4.0 >= 1.0 / 16.0 - 1e-9);
}
