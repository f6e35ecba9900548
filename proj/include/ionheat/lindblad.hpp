// lindblad.hpp — Master-equation propagation with a periodically switched hot bath
//
// drho/dt = -i[H, rho] + sum_k gamma_k (L_k rho L_k^dag - 1/2 {L_k^dag L_k, rho})
// with jump operators a, a^dag (radial) and b, b^dag (axial). The hot radial
// bath carries a square-wave modulation; rates are constant inside each
// on/off window, and integration windows are aligned with the edges so the
// fixed-step RK4 never straddles a discontinuity.

#pragma once

#include "ionheat/errors.hpp"
#include "ionheat/fock.hpp"

#include <functional>
#include <vector>

namespace ionheat::lindblad {

using fock::FockDims;
using fock::HamiltonianParams;
using fock::MatrixXcd;
using fock::ModelKind;

struct SquareWave {
    double period{};
    double duty{};   // in [0,1]; 0 = never on, 1 = always on
    double phase{0.0};
    // Left-continuous: on within [k*period + phase, k*period + phase + duty*period).
    bool on(double t) const;
};

struct Modulation {
    enum class Kind { constant, square };
    Kind kind{Kind::constant};
    SquareWave wave{};

    double value(double t) const {
        return kind == Kind::constant ? 1.0 : (wave.on(t) ? 1.0 : 0.0);
    }
    static Modulation constant() { return {}; }
    static Modulation square(double period, double duty, double phase = 0.0) {
        return Modulation{Kind::square, SquareWave{period, duty, phase}};
    }
};

enum class BathMode { radial, axial };

struct BathSpec {
    BathMode mode{};
    double rate{};  // kappa, rad/s
    double nbar{};
    Modulation modulation{};
    void validate() const;
};

// Effective channel rates at a given time: gamma_down = sum kappa(t)(nbar+1),
// gamma_up = sum kappa(t) nbar, per mode.
struct ChannelRates {
    double a_down{}, a_up{}, b_down{}, b_up{};
};

ChannelRates channel_rates(const std::vector<BathSpec>& baths, double t);

struct StepDiagnostics {
    double time{};
    double trace_error{};
    double herm_error{};
    double min_eigenvalue{};
    bool min_eig_checked{false};
};

struct PropagationResult {
    std::vector<double> times;
    std::vector<MatrixXcd> states; // only when keep_states
    std::vector<StepDiagnostics> diagnostics;
    double max_trace_error{};
    double max_herm_error{};
    double min_eigenvalue_seen{1.0};
    long positivity_checks{};
    long steps{};
};

struct PropagateOptions {
    double dt{};                 // max step; stability bound dt <= 0.05/omega_r
    int snapshot_stride{1};      // steps between snapshots (edges always emit)
    int positivity_stride{50};   // steps between eigenvalue checks; 0 disables
    double trace_tol{1e-8};
    double herm_tol{1e-10};
    double positivity_floor{-1e-6};
    bool keep_states{true};
};

using Observer =
    std::function<void(double t, const MatrixXcd& rho, const StepDiagnostics&)>;

// gamma (L rho L^dag - 1/2 {L^dag L, rho})
MatrixXcd lindblad_dissipator(const MatrixXcd& rho, const MatrixXcd& op, double gamma);

// kappa(nbar+1) D[op] + kappa nbar D[op^dag]; the thermal pair on one mode.
MatrixXcd thermal_dissipator(const MatrixXcd& rho, const MatrixXcd& op, double kappa,
                             double nbar);

// Reference generator built from dense operators; the propagator's structured
// path is validated against this in the test suite.
MatrixXcd dense_rhs(const MatrixXcd& H, const MatrixXcd& rho,
                    const std::vector<BathSpec>& baths, double t, const FockDims& dims);

// Largest RK4-stable step for the given truncation and baths (all modulated
// baths counted at full rate), capped at the documented 0.05/omega_r bound.
// The spectral radius grows with the truncation, so large auxiliary
// truncations need smaller steps than the production dims.
double stable_dt(const HamiltonianParams& params, const FockDims& dims,
                 const std::vector<BathSpec>& baths);

// Structure-aware application of the generator. Dense storage; the ladder
// tensor structure of H and of the four jump channels is applied in closed
// form, O(D^2) per call. Input must be Hermitian.
class TwoModeRhs {
  public:
    TwoModeRhs(ModelKind kind, const HamiltonianParams& params, const FockDims& dims);
    void set_rates(const ChannelRates& rates);
    void apply(const MatrixXcd& x, MatrixXcd& out) const;
    const FockDims& dims() const { return dims_; }

  private:
    FockDims dims_;
    double coupling_{}; // -beta/4
    Eigen::VectorXd free_diag_;
    Eigen::VectorXd r_diag_;  // R[r, r]
    Eigen::VectorXd r_band2_; // R[r, r+2]
    Eigen::VectorXd sa_, sb_; // sqrt(r+1), sqrt(z+1)
    ChannelRates rates_{};
    Eigen::VectorXd gamma_diag_;
    mutable MatrixXcd work_;
    mutable Eigen::VectorXcd bcol_;
};

PropagationResult propagate(ModelKind kind, const HamiltonianParams& params,
                            const FockDims& dims, const MatrixXcd& rho0,
                            const std::vector<BathSpec>& baths, double t0, double t_end,
                            const PropagateOptions& opts, const Observer& observer = {});

struct LimitCycleOptions {
    int cycles{6};                // cycles-1 transient periods, then one recorded
    double warmup_override{-1.0}; // s; >= 0 replaces the default transient length
    double residual_tol{1e-4};    // above this the result is flagged non-converged
    PropagateOptions prop{};
};

struct LimitCycleResult {
    PropagationResult cycle; // snapshots over the recorded period
    double period{};
    double t_start{};        // absolute time of the recorded cycle's on-edge
    double periodicity_residual{};
    std::vector<double> residual_history; // per transient period boundary
    bool converged{true};
};

// Runs the transient, then records one full modulation period starting at an
// on-edge. Requires exactly one square-modulated bath.
LimitCycleResult run_limit_cycle(ModelKind kind, const HamiltonianParams& params,
                                 const FockDims& dims, const MatrixXcd& rho0,
                                 const std::vector<BathSpec>& baths,
                                 const LimitCycleOptions& opts,
                                 const Observer& observer = {});

} // namespace ionheat::lindblad
