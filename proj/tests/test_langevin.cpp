#include "ionheat/constants.hpp"
#include "ionheat/langevin.hpp"

#include "test_helpers.hpp"

#include <doctest.h>

using namespace ionheat;
using testing::reference_engine;
using testing::reference_geometry;

namespace {

langevin::LangevinParams quiet_params(double beta = 0.0) {
    const auto g = reference_geometry();
    auto e = reference_engine(g);
    e.beta = beta;
    auto p = langevin::classical_params(g, e);
    return p;
}

} // namespace

TEST_CASE("noise-free beta = 0 motion is a circle with second-order energy drift") {
    auto p = quiet_params();
    p.kappa_a = p.kappa_h = p.kappa_b = 0.0;
    p.nbar_a = p.nbar_h = p.nbar_b = 0.0;
    p.heating.duty = 0.0;

    langevin::LangevinState s;
    s.x_z = 1.0;
    const double e0 = langevin::classical_hamiltonian(s, p);
    const double radius0 = s.x_z * s.x_z + s.y_z * s.y_z;

    double prev_err = 0.0;
    for (int halving = 0; halving < 3; ++halving) {
        const double dt = 1e-3 / p.omega_r / std::pow(2.0, halving);
        langevin::LangevinState cur = s;
        const auto next = langevin::step(cur, p, dt, {});
        const double err = std::abs(langevin::classical_hamiltonian(next, p) - e0);
        if (halving > 0) CHECK(prev_err / err == doctest::Approx(4.0).epsilon(0.05));
        prev_err = err;
    }

    // A full axial revolution stays near the circle at small dt.
    const double dt = 1e-4 / p.omega_z;
    langevin::LangevinState cur = s;
    const long steps = long(phys::two_pi / (p.omega_z * dt));
    for (long i = 0; i < steps; ++i) cur = langevin::step(cur, p, dt, {});
    CHECK(cur.x_z * cur.x_z + cur.y_z * cur.y_z ==
          doctest::Approx(radius0).epsilon(1e-3));
}

TEST_CASE("constant drive term acts even from the origin") {
    auto p = quiet_params(phys::two_pi * 1e5);
    p.kappa_a = p.kappa_h = p.kappa_b = 0.0;
    p.nbar_a = p.nbar_h = p.nbar_b = 0.0;
    p.heating.duty = 0.0;

    langevin::LangevinState s; // all quadratures zero
    const double dt = 1e-9;
    const auto next = langevin::step(s, p, dt, {});
    CHECK(next.x_r == 0.0);
    CHECK(next.y_r == 0.0);
    CHECK(next.x_z == 0.0);
    CHECK(next.y_z ==
          doctest::Approx(std::sqrt(2.0) * p.beta / 4.0 * dt).epsilon(1e-12));
}

TEST_CASE("conservative drift: mixed partials of the coupling force agree") {
    // The force field of the drift (noise and damping off) must be curl-free
    // for the classical Hamiltonian to exist; probe it by finite differences.
    auto p = quiet_params(phys::two_pi * 1e5);
    p.kappa_a = p.kappa_h = p.kappa_b = 0.0;
    p.heating.duty = 0.0;
    const double h = 1e-6;
    auto f_r = [&](double x_r, double x_z) {
        // coupling force on Y_r
        return std::sqrt(2.0) * p.beta * x_r * x_z;
    };
    auto f_z = [&](double x_r, double x_z) {
        (void)x_z;
        return std::sqrt(2.0) * p.beta / 4.0 * (2.0 * x_r * x_r + 1.0);
    };
    for (double x_r : {0.3, 1.1}) {
        for (double x_z : {-0.4, 0.8}) {
            const double dfr_dxz = (f_r(x_r, x_z + h) - f_r(x_r, x_z - h)) / (2 * h);
            const double dfz_dxr = (f_z(x_r + h, x_z) - f_z(x_r - h, x_z)) / (2 * h);
            CHECK(dfr_dxz == doctest::Approx(dfz_dxr).epsilon(1e-6));
        }
    }
}

TEST_CASE("axial mode alone thermalizes to the bath occupation") {
    // beta = 0, axial bath only: stationary <n_z> = nbar_b within 3% at 1e4
    // trajectories (Ornstein-Uhlenbeck oracle).
    auto p = quiet_params();
    p.kappa_a = p.kappa_h = 0.0;
    p.nbar_a = p.nbar_h = 0.0;
    p.heating.duty = 0.0;

    const double dt = 2e-3 / p.omega_r;
    const double t_end = 16.0 / p.kappa_b;
    const auto stats = langevin::ensemble_run(p, 10000, t_end, dt, 1234, 1024, 2);
    CHECK(stats.discarded == 0);
    CHECK(stats.nz_mean.back() == doctest::Approx(p.nbar_b).epsilon(0.03));
    // Dissipated power at equilibrium vanishes within the standard error.
    CHECK(std::abs(stats.p_dis_w.back()) < 3.0 * stats.p_dis_stderr_w.back());
}

TEST_CASE("radial stationary second moments match the weighted OU value") {
    const auto g = reference_geometry();
    auto e = reference_engine(g);
    e.beta = 0.0;
    auto p = langevin::classical_params(g, e);
    p.heating.duty = 1.0; // both radial baths always on
    p.kappa_b = phys::two_pi * 5e4;

    // Track X_r^2 + Y_r^2 through the axial fields by borrowing the z-channel:
    // run a dedicated mini-ensemble here instead.
    std::mt19937_64 rng(77);
    std::normal_distribution<double> normal(0.0, 1.0);
    const double dt = 2e-3 / p.omega_r;
    const long steps = long(12.0 / ((p.kappa_a + p.kappa_h) * dt));
    const int n_traj = 4000;
    double acc = 0.0;
    for (int traj = 0; traj < n_traj; ++traj) {
        langevin::LangevinState s;
        s.x_r = std::sqrt(p.init_var_r) * normal(rng);
        s.y_r = std::sqrt(p.init_var_r) * normal(rng);
        for (long i = 0; i < steps; ++i) {
            langevin::NoiseDraws d;
            d.h_x = normal(rng);
            d.h_y = normal(rng);
            d.a_x = normal(rng);
            d.a_y = normal(rng);
            d.b_x = normal(rng);
            d.b_y = normal(rng);
            s = langevin::step(s, p, dt, d);
        }
        acc += 0.5 * (s.x_r * s.x_r + s.y_r * s.y_r);
    }
    const double weighted =
        (p.kappa_a * p.nbar_a + p.kappa_h * p.nbar_h) / (p.kappa_a + p.kappa_h);
    CHECK(acc / n_traj == doctest::Approx(weighted).epsilon(0.05));
}

TEST_CASE("ensembles are reproducible and thread-count independent") {
    auto p = quiet_params(phys::two_pi * 2e4);
    const double dt = 5e-3 / p.omega_r;
    const double t_end = 3.0 * p.heating.period;
    const auto a = langevin::ensemble_run(p, 512, t_end, dt, 42, 2048, 1);
    const auto b = langevin::ensemble_run(p, 512, t_end, dt, 42, 2048, 2);
    REQUIRE(a.nz_mean.size() == b.nz_mean.size());
    for (std::size_t i = 0; i < a.nz_mean.size(); ++i)
        CHECK(a.nz_mean[i] == doctest::Approx(b.nz_mean[i]).epsilon(1e-12));
}

TEST_CASE("standard errors scale as one over sqrt N") {
    auto p = quiet_params();
    p.kappa_a = p.kappa_h = 0.0;
    p.heating.duty = 0.0;
    const double dt = 5e-3 / p.omega_r;
    const double t_end = 6.0 / p.kappa_b;
    const auto small = langevin::ensemble_run(p, 1000, t_end, dt, 7, 4096, 2);
    const auto large = langevin::ensemble_run(p, 4000, t_end, dt, 7, 4096, 2);
    const double ratio = small.nz_stderr.back() / large.nz_stderr.back();
    CHECK(ratio == doctest::Approx(2.0).epsilon(0.25));
}

TEST_CASE("dt halving shifts ensemble means by less than the standard error") {
    auto p = quiet_params(phys::two_pi * 5e4);
    const double dt = 2e-3 / p.omega_r;
    const double t_end = 2.0 * p.heating.period;
    const auto coarse = langevin::ensemble_run(p, 10000, t_end, dt, 11, 4096, 2);
    const auto fine = langevin::ensemble_run(p, 10000, t_end, dt / 2.0, 11, 8192, 2);
    const double diff = std::abs(coarse.nz_mean.back() - fine.nz_mean.back());
    CHECK(diff < coarse.nz_stderr.back() + fine.nz_stderr.back());
}

TEST_CASE("classical limit cycle has the heating period") {
    auto p = quiet_params(phys::two_pi * 1e5);
    const double dt = 2e-3 / p.omega_r;
    const auto bins = langevin::classical_cycle_bins(p, 4000, 3, 16, dt, 5, 2);
    CHECK(bins.discarded == 0);
    // The profile responds to the drive: on-window mean exceeds the off-window
    // mean by many standard errors.
    double on = 0.0, off = 0.0;
    for (int b = 0; b < 8; ++b) on += bins.nz_mean[std::size_t(b)];
    for (int b = 8; b < 16; ++b) off += bins.nz_mean[std::size_t(b)];
    CHECK(on / 8.0 > off / 8.0);
    const double mid_se = bins.nz_stderr[4];
    CHECK((on - off) / 8.0 > 5.0 * mid_se);
}

TEST_CASE("ensemble run rejects undersized ensembles and unstable steps") {
    auto p = quiet_params();
    CHECK_THROWS_AS(langevin::ensemble_run(p, 10, 1e-5, 1e-10, 1, 16, 1),
                    std::invalid_argument);
    CHECK_THROWS_AS(langevin::ensemble_run(p, 1000, 1e-5, 1.0, 1, 16, 1),
                    std::invalid_argument);
}
