// otto.hpp — Bogoliubov reduction of the radial mode and Otto-cycle extraction
//
// Freezing the flywheel displacement q_z = <b + b^dag> turns the radial part
// of the full Hamiltonian into a quadratic single-mode form that a Bogoliubov
// rotation diagonalizes: omega_eff c^dag c + offset. Entropy, effective
// temperature and mean energy of the radial Gibbsian state then trace out a
// finite-time Otto cycle over one heating period.

#pragma once

#include "ionheat/fock.hpp"
#include "ionheat/lindblad.hpp"
#include "ionheat/trap.hpp"

#include <string>
#include <vector>

namespace ionheat::otto {

using fock::FockDims;
using fock::MatrixXcd;

struct BogoliubovFrame {
    double q_z{};        // <b + b^dag>, dimensionless
    double x{};          // squeeze parameter, tanh(2x) = beta q_z / (2 omega_r - beta q_z)
    double omega_eff{};  // rad/s
    double offset{};     // scalar part of the diagonalized Hamiltonian, rad/s
};

// Throws ReductionSingular (a ConfigError) when beta*q_z >= omega_r.
BogoliubovFrame bogoliubov_reduce(double omega_r, double beta, double q_z);

// S = (1+n)ln(1+n) - n ln n, with S(0) = 0.
double effective_entropy(double n_c);

// T_eff = omega_eff / ln(1 + 1/n_c) in rad/s (hbar = k_B = 1 internally).
double effective_temperature(double omega_eff, double n_c);

// Normal-ordered c^dag c in the truncated radial basis, built from the inverse
// Bogoliubov map: cosh^2(x) n + sinh^2(x)(n+1) - (sinh 2x / 2)(a^2 + a^dag2).
Eigen::MatrixXd quasiparticle_number(int n_r, double x);

// Semi-classical radial Hamiltonian (omega_r - beta q_z/2) n
//   - (beta q_z/4)(a^2 + a^dag2) - beta q_z/4, in rad/s.
Eigen::MatrixXd reduced_radial_hamiltonian(int n_r, double omega_r, double beta,
                                           double q_z);

enum class Stroke { hot_isochore, expansion, cold_isochore, compression };
std::string to_string(Stroke s);

struct CyclePoint {
    double t{};          // s, absolute
    double q_z{};
    double x{};
    double omega_eff{};  // rad/s
    double n_c{};
    double u_scaled{};   // U in hbar*omega_z units
    double t_eff_scaled{}; // T_eff in hbar*omega_z/k_B units
    double entropy{};
    Stroke stroke{};
};

struct CycleRecord {
    std::vector<CyclePoint> points;
    double period{};
    double w_net_hbar_omega_z{};
    double w_net_joules{};
    double q_in_joules{};
    double eta{};
    double power_watts{};
    bool degenerate{false};
    std::string warning;
};

// One recorded modulation period of reduced radial states.
struct RadialCycleTrace {
    std::vector<double> times;
    std::vector<MatrixXcd> rho_radial;
    std::vector<double> q_z;
    double period{};
    double t_hot_on{};  // recorded cycle start (on-edge)
    double t_hot_off{};
    double omega_r{}, omega_z{}, beta{};
    double kappa_r_total{}; // kappa_a + kappa_h, sets the hot boundary layer
    double kappa_a{};       // cold boundary layer
};

// Isochores are boundary layers of a few thermalization times after each
// heating edge; the remainders of the two windows are the frequency strokes.
struct StrokeOptions {
    double hot_layers{6.0};
    double cold_layers{6.0};
};

CycleRecord extract_cycle(const RadialCycleTrace& trace,
                          const StrokeOptions& strokes = {});

// Runs the limit cycle for the given model and collects the reduced trace.
struct CycleRunSpec {
    fock::ModelKind kind{fock::ModelKind::cm};
    fock::HamiltonianParams params{};
    FockDims dims{};
    std::vector<lindblad::BathSpec> baths;
    lindblad::LimitCycleOptions cycle{};
    double T_0_kelvin{};
};

struct CycleRunResult {
    RadialCycleTrace trace;
    lindblad::LimitCycleResult limit_cycle;
};

CycleRunResult collect_cycle_trace(const CycleRunSpec& spec);

struct WorkSweepRow {
    double r0_m{};
    double beta{};
    double w_hbar_omega_z{};
    double eta{};
    bool ok{false};
    std::string error;
};

// Fig-style sweep of extracted work versus trap radius at fixed angle and
// frequencies; rows with beta >= omega_r carry error markers.
std::vector<WorkSweepRow> work_vs_radius(const std::vector<double>& r0_values,
                                         trap::TrapGeometry geom,
                                         const trap::EngineParams& engine,
                                         const CycleRunSpec& run_template,
                                         const StrokeOptions& strokes, int threads);

} // namespace ionheat::otto
