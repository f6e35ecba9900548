// langevin.hpp — Classical stochastic quadrature dynamics of the engine
//
// Euler-Maruyama integration of the four coupled quadrature SDEs with additive
// thermal noise, one Wiener increment of width sqrt(kappa nbar dt) per
// quadrature per active bath. Trajectories are independent and seeded by a
// counter scheme, so ensembles are reproducible and order-insensitive under
// parallel execution.

#pragma once

#include "ionheat/lindblad.hpp"
#include "ionheat/trap.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace ionheat::langevin {

struct LangevinParams {
    double omega_r{}, omega_z{}, beta{};
    double kappa_a{}, kappa_h{}, kappa_b{};
    double nbar_a{}, nbar_h{}, nbar_b{};
    lindblad::SquareWave heating{}; // duty 0 = never on, 1 = always on
    double init_var_r{}, init_var_z{}; // second moments of X, Y at t = 0
};

// Initial Gaussians match the quantum Gibbs second moments, nbar(T_0) + 1/2.
LangevinParams classical_params(const trap::TrapGeometry& geom,
                                const trap::EngineParams& engine);

struct LangevinState {
    double x_r{}, y_r{}, x_z{}, y_z{};
    double t{};
};

struct NoiseDraws {
    double h_x{}, h_y{}; // hot radial bath (ignored while the bath is off)
    double a_x{}, a_y{}; // cold radial bath
    double b_x{}, b_y{}; // axial bath
};

// One Euler-Maruyama update; draws are standard normal.
LangevinState step(const LangevinState& s, const LangevinParams& p, double dt,
                   const NoiseDraws& draws);

inline double classical_nz(const LangevinState& s) {
    return 0.5 * (s.x_z * s.x_z + s.y_z * s.y_z);
}

// Conserved energy function of the noise- and damping-free drift.
double classical_hamiltonian(const LangevinState& s, const LangevinParams& p);

struct EnsembleStats {
    std::vector<double> times;
    std::vector<double> nz_mean, nz_stderr;
    std::vector<double> p_dis_w, p_dis_stderr_w;
    std::uint64_t seed{};
    int trajectories{};
    int discarded{};
};

EnsembleStats ensemble_run(const LangevinParams& p, int n_traj, double t_end, double dt,
                           std::uint64_t seed, int record_stride, int threads);

// Ensemble means of n_z folded onto phase bins of the final heating period,
// after discarding a warmup of whole periods. Standard errors are computed
// across trajectories from per-trajectory bin averages.
struct PhaseBins {
    std::vector<double> nz_mean, nz_stderr;
    double t0{};     // start of the measured period
    double period{};
    int bins{};
    int trajectories{};
    int discarded{};
};

PhaseBins classical_cycle_bins(const LangevinParams& p, int n_traj, int warmup_periods,
                               int n_bins, double dt, std::uint64_t seed, int threads);

struct CrossoverRow {
    double beta{};
    double p_q_w{};        // quantum max dissipated power over the limit cycle
    double p_c_w{};        // classical max over phase bins
    double p_c_stderr_w{}; // standard error at the classical argmax bin
    PhaseBins bins;        // classical cycle profile backing the maximum
    bool ok{false};
    std::string error;
};

struct CrossoverOptions {
    fock::FockDims dims{};
    lindblad::LimitCycleOptions cycle{};
    int trajectories{10000};
    int warmup_periods{3};
    int phase_bins{32};
    double classical_dt{};
    std::uint64_t seed{1};
    int threads{2};
};

// Quantum and classical maximum dissipated power at identical bath and timing
// parameters, per coupling value.
std::vector<CrossoverRow> power_crossover_sweep(const std::vector<double>& beta_values,
                                                const trap::TrapGeometry& geom,
                                                const trap::EngineParams& engine,
                                                const CrossoverOptions& opts);

} // namespace ionheat::langevin
