// fock.hpp — Operators and states on the truncated two-mode Fock space

#pragma once

#include <Eigen/Dense>
#include <complex>
#include <stdexcept>
#include <string>

namespace ionheat::fock {

using Eigen::MatrixXcd;
using Eigen::MatrixXd;

// Truncations: radial mode keeps levels 0..n_r-1, axial 0..n_z-1. The
// composite basis index is i = r*n_z + z (radial-major).
struct FockDims {
    int n_r{};
    int n_z{};
    int dim() const { return n_r * n_z; }
    void validate() const {
        if (n_r < 2 || n_z < 2)
            throw std::invalid_argument("fock: truncations must be at least 2 levels");
    }
    bool operator==(const FockDims&) const = default;
};

// The four coupling models: full quadratic (cm), pure optomechanical (om),
// constant classical drive (class), squeezing-only (sq).
enum class ModelKind { cm, om, classical, sq };

std::string to_string(ModelKind kind);
ModelKind model_kind_from_string(const std::string& name);

struct HamiltonianParams {
    double omega_r{}; // rad/s
    double omega_z{}; // rad/s
    double beta{};    // rad/s
};

// Two-mode operators on the composite space. q = (a(dag)+a)/sqrt(2),
// p = i(a(dag)-a)/sqrt(2), so [q,p] = i away from the truncation edge.
struct ModeOperators {
    FockDims dims;
    MatrixXcd a, a_dag, b, b_dag;
    MatrixXcd n_r, n_z;
    MatrixXcd q_r, p_r, q_z, p_z;
};

struct DensityMatrix {
    FockDims dims;
    MatrixXcd rho;
};

// Single-mode lowering operator, a[n-1, n] = sqrt(n).
MatrixXd ladder(int levels);

MatrixXcd kron(const MatrixXcd& radial, const MatrixXcd& axial);

ModeOperators mode_operators(const FockDims& dims);

// Radial factor R of the coupling term: every model Hamiltonian reads
// H = omega_r n_r + omega_z n_z - (beta/4) R (x) (b + b^dag), with
//   cm:    R = a^2 + a^dag^2 + 2 a^dag a + 1
//   om:    R = 2 a^dag a
//   class: R = 1
//   sq:    R = a^2 + a^dag^2
MatrixXd radial_coupling(ModelKind kind, int n_r);

MatrixXcd build_hamiltonian(ModelKind kind, const HamiltonianParams& params,
                            const FockDims& dims);

// Canonical Gibbs state exp(-H/T)/Tr via eigendecomposition with spectral
// shift (T -> 0 safe). H in rad/s, T in Kelvin.
DensityMatrix gibbs_state(const MatrixXcd& H, const FockDims& dims, double T_kelvin);

MatrixXcd partial_trace_axial(const MatrixXcd& rho, const FockDims& dims);  // -> n_r x n_r
MatrixXcd partial_trace_radial(const MatrixXcd& rho, const FockDims& dims); // -> n_z x n_z

// State-health numbers used by the propagation monitors.
struct StateDiagnostics {
    double trace_error{};   // |Tr rho - 1|
    double herm_error{};    // max |rho - rho^dag|
    double min_eigenvalue{};
};

double herm_residual(const MatrixXcd& m);
StateDiagnostics diagnose(const MatrixXcd& rho, bool with_eigenvalues = false);

} // namespace ionheat::fock
