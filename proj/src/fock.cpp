#include "ionheat/fock.hpp"
#include "ionheat/constants.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>

namespace ionheat::fock {

std::string to_string(ModelKind kind) {
    switch (kind) {
        case ModelKind::cm: return "cm";
        case ModelKind::om: return "om";
        case ModelKind::classical: return "class";
        case ModelKind::sq: return "sq";
    }
    throw std::logic_error("unreachable model kind");
}

ModelKind model_kind_from_string(const std::string& name) {
    if (name == "cm") return ModelKind::cm;
    if (name == "om") return ModelKind::om;
    if (name == "class") return ModelKind::classical;
    if (name == "sq") return ModelKind::sq;
    throw std::invalid_argument("unknown model kind '" + name + "'");
}

MatrixXd ladder(int levels) {
    MatrixXd a = MatrixXd::Zero(levels, levels);
    for (int n = 1; n < levels; ++n) a(n - 1, n) = std::sqrt(double(n));
    return a;
}

MatrixXcd kron(const MatrixXcd& radial, const MatrixXcd& axial) {
    const auto nr = radial.rows(), nz = axial.rows();
    MatrixXcd out(nr * nz, nr * nz);
    for (Eigen::Index r = 0; r < nr; ++r)
        for (Eigen::Index rp = 0; rp < nr; ++rp)
            out.block(r * nz, rp * nz, nz, nz) = radial(r, rp) * axial;
    return out;
}

ModeOperators mode_operators(const FockDims& dims) {
    dims.validate();
    const MatrixXcd ar = ladder(dims.n_r).cast<std::complex<double>>();
    const MatrixXcd az = ladder(dims.n_z).cast<std::complex<double>>();
    const MatrixXcd ir = MatrixXcd::Identity(dims.n_r, dims.n_r);
    const MatrixXcd iz = MatrixXcd::Identity(dims.n_z, dims.n_z);
    const std::complex<double> im(0.0, 1.0);
    const double rt2 = std::sqrt(2.0);

    ModeOperators ops;
    ops.dims = dims;
    ops.a = kron(ar, iz);
    ops.a_dag = ops.a.adjoint();
    ops.b = kron(ir, az);
    ops.b_dag = ops.b.adjoint();
    ops.n_r = ops.a_dag * ops.a;
    ops.n_z = ops.b_dag * ops.b;
    ops.q_r = (ops.a_dag + ops.a) / rt2;
    ops.p_r = im * (ops.a_dag - ops.a) / rt2;
    ops.q_z = (ops.b_dag + ops.b) / rt2;
    ops.p_z = im * (ops.b_dag - ops.b) / rt2;
    return ops;
}

MatrixXd radial_coupling(ModelKind kind, int n_r) {
    const MatrixXd a = ladder(n_r);
    const MatrixXd n = a.transpose() * a;
    switch (kind) {
        case ModelKind::cm:
            return a * a + (a * a).transpose() + 2.0 * n + MatrixXd::Identity(n_r, n_r);
        case ModelKind::om:
            return 2.0 * n;
        case ModelKind::classical:
            return MatrixXd::Identity(n_r, n_r);
        case ModelKind::sq:
            return a * a + (a * a).transpose();
    }
    throw std::logic_error("unreachable model kind");
}

MatrixXcd build_hamiltonian(ModelKind kind, const HamiltonianParams& params,
                            const FockDims& dims) {
    dims.validate();
    if (!(params.beta < params.omega_r))
        throw std::invalid_argument("hamiltonian: beta must stay below omega_r");
    if ((kind == ModelKind::cm || kind == ModelKind::sq) && dims.n_r < 3)
        throw std::invalid_argument(
            "hamiltonian: n_r < 3 cannot represent the a^2 coupling of model " +
            to_string(kind));

    const MatrixXd ar = ladder(dims.n_r);
    const MatrixXd az = ladder(dims.n_z);
    const auto cplx = [](const MatrixXd& m) { return m.cast<std::complex<double>>(); };
    const MatrixXcd nr = cplx(ar.transpose() * ar);
    const MatrixXcd nz = cplx(az.transpose() * az);
    const MatrixXcd bx = cplx(az + az.transpose());
    const MatrixXcd ir = MatrixXcd::Identity(dims.n_r, dims.n_r);
    const MatrixXcd iz = MatrixXcd::Identity(dims.n_z, dims.n_z);
    const MatrixXcd coupling = cplx(radial_coupling(kind, dims.n_r));

    return params.omega_r * kron(nr, iz) + params.omega_z * kron(ir, nz) -
           0.25 * params.beta * kron(coupling, bx);
}

DensityMatrix gibbs_state(const MatrixXcd& H, const FockDims& dims, double T_kelvin) {
    if (!(T_kelvin > 0.0)) throw std::domain_error("gibbs_state: T must be positive");
    Eigen::SelfAdjointEigenSolver<MatrixXcd> es(H);
    const Eigen::VectorXd evals = es.eigenvalues();
    const double theta = phys::thermal_frequency(T_kelvin); // rad/s
    const double e0 = evals.minCoeff();
    Eigen::VectorXd w = (-(evals.array() - e0) / theta).exp();
    w /= w.sum();
    DensityMatrix out{dims, es.eigenvectors() * w.asDiagonal() *
                                es.eigenvectors().adjoint()};
    return out;
}

MatrixXcd partial_trace_axial(const MatrixXcd& rho, const FockDims& dims) {
    MatrixXcd out = MatrixXcd::Zero(dims.n_r, dims.n_r);
    for (int r = 0; r < dims.n_r; ++r)
        for (int rp = 0; rp < dims.n_r; ++rp)
            for (int z = 0; z < dims.n_z; ++z)
                out(r, rp) += rho(r * dims.n_z + z, rp * dims.n_z + z);
    return out;
}

MatrixXcd partial_trace_radial(const MatrixXcd& rho, const FockDims& dims) {
    MatrixXcd out = MatrixXcd::Zero(dims.n_z, dims.n_z);
    for (int z = 0; z < dims.n_z; ++z)
        for (int zp = 0; zp < dims.n_z; ++zp)
            for (int r = 0; r < dims.n_r; ++r)
                out(z, zp) += rho(r * dims.n_z + z, r * dims.n_z + zp);
    return out;
}

double herm_residual(const MatrixXcd& m) {
    return (m - m.adjoint()).cwiseAbs().maxCoeff();
}

StateDiagnostics diagnose(const MatrixXcd& rho, bool with_eigenvalues) {
    StateDiagnostics d;
    d.trace_error = std::abs(rho.trace() - std::complex<double>(1.0, 0.0));
    d.herm_error = herm_residual(rho);
    if (with_eigenvalues) {
        Eigen::SelfAdjointEigenSolver<MatrixXcd> es(rho, Eigen::EigenvaluesOnly);
        d.min_eigenvalue = es.eigenvalues().minCoeff();
    } else {
        d.min_eigenvalue = 0.0;
    }
    return d;
}

} // namespace ionheat::fock
