#include "ionheat/constants.hpp"
#include "ionheat/trap.hpp"

#include "test_helpers.hpp"

#include <doctest.h>

using namespace ionheat;
using testing::reference_geometry;

TEST_CASE("beta reproduces the reference coupling of 2pi x 100 kHz") {
    const auto g = reference_geometry();
    const double beta = trap::compute_beta(g);
    CHECK(beta / phys::two_pi == doctest::Approx(100e3).epsilon(0.02));
}

TEST_CASE("beta vanishes with the taper angle") {
    auto g = reference_geometry();
    const double beta_ref = trap::compute_beta(g);
    g.theta = 1e-12;
    CHECK(trap::compute_beta(g) < 1e-11 * beta_ref);
}

TEST_CASE("beta at the millimetre-scale trap geometry") {
    // Direct evaluation of beta = 4 tan(theta)/r0 * omega_r * sqrt(hbar/2 m omega_z)
    // at theta = 30 deg, r0 = 1.1 mm: the taper constant g is about 2.1 /mm and
    // beta/2pi about 105.5 Hz.
    auto g = reference_geometry();
    g.theta = phys::two_pi / 12.0; // 30 degrees
    g.r0 = 1.1e-3;
    CHECK(g.taper_g() / 1e3 == doctest::Approx(2.1).epsilon(0.024));
    const double beta = trap::compute_beta(g);
    const double zpl = std::sqrt(phys::hbar / (2.0 * g.mass * g.omega_z));
    const double expected = 4.0 * std::tan(g.theta) / g.r0 * g.omega_r * zpl;
    CHECK(beta == doctest::Approx(expected).epsilon(1e-12));
    CHECK(beta / phys::two_pi == doctest::Approx(105.54).epsilon(1e-3));
}

TEST_CASE("beta scales as 1/r0") {
    auto g = reference_geometry();
    const double b1 = trap::compute_beta(g);
    g.r0 /= 2.0;
    CHECK(trap::compute_beta(g) == doctest::Approx(2.0 * b1).epsilon(1e-12));
}

TEST_CASE("planck occupation at the hot-bath point is about 3") {
    CHECK(trap::planck_occupation(phys::two_pi * 1e6, 166e-6) ==
          doctest::Approx(3.0).epsilon(0.02));
}

TEST_CASE("planck occupation of the axial bath") {
    CHECK(trap::planck_occupation(phys::two_pi * 5e4, 4e-6) ==
          doctest::Approx(1.2166).epsilon(1e-3));
}

TEST_CASE("planck occupation frozen-mode limit") {
    CHECK(trap::planck_occupation(1e15, 1e-9) == 0.0);
}

TEST_CASE("planck occupation rejects non-positive temperature") {
    CHECK_THROWS_AS(trap::planck_occupation(1e6, 0.0), std::domain_error);
    CHECK_THROWS_AS(trap::planck_occupation(1e6, -1.0), std::domain_error);
}

TEST_CASE("planck occupation is monotone in T and satisfies detailed balance") {
    const double omega = phys::two_pi * 1e6;
    double prev = 0.0;
    for (double T : {10e-6, 50e-6, 100e-6, 200e-6, 400e-6}) {
        const double n = trap::planck_occupation(omega, T);
        CHECK(n > prev);
        prev = n;
        const double x = phys::hbar * omega / (phys::k_boltzmann * T);
        CHECK(n / (n + 1.0) == doctest::Approx(std::exp(-x)).epsilon(1e-14));
    }
}

TEST_CASE("potential forms agree at the expansion point and on axis") {
    auto g = reference_geometry();
    g.theta = phys::two_pi / 12.0;
    g.r0 = 1.1e-3;
    for (double r : {0.0, 1e-5, 1e-4}) {
        const auto s = trap::sample_potential(g, r, 0.0);
        CHECK(s.value_exact == doctest::Approx(s.value_approx).epsilon(1e-14));
        const double expect =
            0.5 * g.mass * g.omega_r * g.omega_r * r * r / phys::electron_volt;
        CHECK(s.value_exact == doctest::Approx(expect).epsilon(1e-14));
    }
    for (double z : {-1e-4, 1e-4}) {
        const auto s = trap::sample_potential(g, 0.0, z);
        const double expect =
            0.5 * g.mass * g.omega_z * g.omega_z * z * z / phys::electron_volt;
        CHECK(s.value_exact == doctest::Approx(expect).epsilon(1e-14));
        CHECK(s.value_approx == doctest::Approx(expect).epsilon(1e-14));
    }
}

TEST_CASE("approximate potential tracks the exact one for small taper offsets") {
    auto g = reference_geometry();
    g.theta = phys::two_pi / 12.0;
    g.r0 = 1.1e-3;
    const double z_max = 0.05 * g.r0 / std::tan(g.theta);
    for (int i = -4; i <= 4; ++i) {
        if (i == 0) continue;
        const double z = z_max * i / 4.0;
        for (double r : {2e-5, 1e-4, 3e-4}) {
            const auto s = trap::sample_potential(g, r, z);
            CHECK(std::abs(s.value_approx - s.value_exact) / s.value_exact < 0.05);
        }
    }
}

TEST_CASE("taper expansion error is second order in z") {
    auto g = reference_geometry();
    g.theta = phys::two_pi / 12.0;
    g.r0 = 1.1e-3;
    const double r = 1e-4;
    double prev_residual = 0.0;
    double z = 1e-5;
    for (int halving = 0; halving < 3; ++halving) {
        const auto s = trap::sample_potential(g, r, z);
        const double residual = std::abs(s.value_exact - s.value_approx);
        if (halving > 0) {
            const double order = std::log2(prev_residual / residual);
            CHECK(order == doctest::Approx(2.0).epsilon(0.05));
        }
        prev_residual = residual;
        z /= 2.0;
    }
}

TEST_CASE("exact potential rejects the geometric singularity") {
    auto g = reference_geometry();
    const double z_sing = -1.0 / g.epsilon();
    CHECK_THROWS_AS(trap::potential(g, 1e-6, 1.5 * z_sing, trap::PotentialForm::exact),
                    std::domain_error);
}

TEST_CASE("derived engine parameters carry Planck-consistent occupations") {
    const auto g = reference_geometry();
    const auto e = testing::reference_engine(g);
    CHECK(e.nbar_h == doctest::Approx(2.983).epsilon(1e-3));
    CHECK(e.nbar_a == doctest::Approx(6.1e-6).epsilon(0.05));
    CHECK(e.nbar_b == doctest::Approx(1.2166).epsilon(1e-3));
    CHECK_NOTHROW(trap::validate_engine_params(e, g));
}

TEST_CASE("engine validation rejects beta above the radial frequency") {
    const auto g = reference_geometry();
    auto e = testing::reference_engine(g);
    e.beta = 1.5 * g.omega_r;
    CHECK_THROWS_AS(trap::validate_engine_params(e, g), std::invalid_argument);
}

TEST_CASE("engine validation rejects degenerate duty cycles") {
    const auto g = reference_geometry();
    auto e = testing::reference_engine(g);
    e.heating_duty = 1.0;
    CHECK_THROWS_AS(trap::validate_engine_params(e, g), std::invalid_argument);
}

TEST_CASE("geometry invariants are enforced") {
    auto g = reference_geometry();
    g.theta = 2.0; // > pi/2
    CHECK_THROWS_AS(g.validate(), std::invalid_argument);
    g = reference_geometry();
    g.omega_z = g.omega_r;
    CHECK_THROWS_AS(g.validate(), std::invalid_argument);
    g = reference_geometry();
    g.r0 = 0.0;
    CHECK_THROWS_AS(g.validate(), std::invalid_argument);
}
