#include "ionheat/lindblad.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <sstream>

namespace ionheat::lindblad {

using cplx = std::complex<double>;

bool SquareWave::on(double t) const {
    if (duty <= 0.0) return false;
    if (duty >= 1.0) return true;
    const double s = (t - phase) / period;
    const double frac = s - std::floor(s);
    return frac < duty;
}

void BathSpec::validate() const {
    if (!(rate >= 0.0)) throw std::invalid_argument("bath: rate must be >= 0");
    if (!(nbar >= 0.0)) throw std::invalid_argument("bath: nbar must be >= 0");
    if (modulation.kind == Modulation::Kind::square) {
        const auto& w = modulation.wave;
        if (!(w.period > 0.0)) throw std::invalid_argument("bath: period must be > 0");
        if (w.duty < 0.0 || w.duty > 1.0)
            throw std::invalid_argument("bath: duty must lie in [0, 1]");
    }
}

ChannelRates channel_rates(const std::vector<BathSpec>& baths, double t) {
    ChannelRates r;
    for (const auto& bath : baths) {
        const double g = bath.rate * bath.modulation.value(t);
        if (bath.mode == BathMode::radial) {
            r.a_down += g * (bath.nbar + 1.0);
            r.a_up += g * bath.nbar;
        } else {
            r.b_down += g * (bath.nbar + 1.0);
            r.b_up += g * bath.nbar;
        }
    }
    return r;
}

MatrixXcd lindblad_dissipator(const MatrixXcd& rho, const MatrixXcd& op, double gamma) {
    const MatrixXcd op_dag = op.adjoint();
    const MatrixXcd n = op_dag * op;
    return gamma * (op * rho * op_dag - 0.5 * (n * rho + rho * n));
}

MatrixXcd thermal_dissipator(const MatrixXcd& rho, const MatrixXcd& op, double kappa,
                             double nbar) {
    return lindblad_dissipator(rho, op, kappa * (nbar + 1.0)) +
           lindblad_dissipator(rho, op.adjoint(), kappa * nbar);
}

MatrixXcd dense_rhs(const MatrixXcd& H, const MatrixXcd& rho,
                    const std::vector<BathSpec>& baths, double t,
                    const FockDims& dims) {
    const cplx im(0.0, 1.0);
    MatrixXcd out = -im * (H * rho - rho * H);
    const auto ops = fock::mode_operators(dims);
    for (const auto& bath : baths) {
        const double g = bath.rate * bath.modulation.value(t);
        if (g == 0.0) continue;
        const MatrixXcd& op = bath.mode == BathMode::radial ? ops.a : ops.b;
        out += thermal_dissipator(rho, op, g, bath.nbar);
    }
    return out;
}

TwoModeRhs::TwoModeRhs(ModelKind kind, const HamiltonianParams& params,
                       const FockDims& dims)
    : dims_(dims) {
    dims_.validate();
    if (!(params.beta < params.omega_r))
        throw std::invalid_argument("rhs: beta must stay below omega_r");
    if ((kind == ModelKind::cm || kind == ModelKind::sq) && dims.n_r < 3)
        throw std::invalid_argument("rhs: n_r < 3 cannot represent the a^2 coupling");

    const int nr = dims_.n_r, nz = dims_.n_z;
    coupling_ = -0.25 * params.beta;

    free_diag_.resize(dims_.dim());
    for (int r = 0; r < nr; ++r)
        for (int z = 0; z < nz; ++z)
            free_diag_[r * nz + z] = params.omega_r * r + params.omega_z * z;

    const Eigen::MatrixXd R = fock::radial_coupling(kind, nr);
    r_diag_.resize(nr);
    r_band2_ = Eigen::VectorXd::Zero(nr);
    for (int r = 0; r < nr; ++r) {
        r_diag_[r] = R(r, r);
        if (r + 2 < nr) r_band2_[r] = R(r, r + 2);
    }

    sa_.resize(nr);
    for (int r = 0; r < nr; ++r) sa_[r] = std::sqrt(double(r + 1));
    sb_.resize(nz);
    for (int z = 0; z < nz; ++z) sb_[z] = std::sqrt(double(z + 1));

    gamma_diag_ = Eigen::VectorXd::Zero(dims_.dim());
    work_.resize(dims_.dim(), dims_.dim());
    bcol_.resize(dims_.dim());
}

void TwoModeRhs::set_rates(const ChannelRates& rates) {
    rates_ = rates;
    const int nr = dims_.n_r, nz = dims_.n_z;
    for (int r = 0; r < nr; ++r) {
        // Truncation-consistent diagonals of a^dag a and a a^dag (top level of
        // a a^dag is 0, not n, so each thermal pair stays exactly trace-free).
        const double na = double(r);
        const double naa = r < nr - 1 ? double(r + 1) : 0.0;
        for (int z = 0; z < nz; ++z) {
            const double nb = double(z);
            const double nbb = z < nz - 1 ? double(z + 1) : 0.0;
            gamma_diag_[r * nz + z] = rates.a_down * na + rates.a_up * naa +
                                      rates.b_down * nb + rates.b_up * nbb;
        }
    }
}

void TwoModeRhs::apply(const MatrixXcd& x, MatrixXcd& out) const {
    const int nr = dims_.n_r, nz = dims_.n_z, D = dims_.dim();
    out.resize(D, D);
    const cplx* X = x.data();
    cplx* W = work_.data();
    cplx* O = out.data();
    cplx* bb = bcol_.data();
    const double c = coupling_;
    const bool band2 = r_band2_.cwiseAbs().maxCoeff() > 0.0;
    const bool diag = r_diag_.cwiseAbs().maxCoeff() > 0.0;

    // W = H x: free diagonal scaling plus the coupling stencil, column by column.
    for (int j = 0; j < D; ++j) {
        const cplx* xc = X + std::size_t(j) * D;
        cplx* wc = W + std::size_t(j) * D;
        // bb = (I (x) (b + b^dag)) xc
        for (int r = 0; r < nr; ++r) {
            const int base = r * nz;
            for (int z = 0; z < nz; ++z) {
                cplx acc(0.0, 0.0);
                if (z > 0) acc += sb_[z - 1] * xc[base + z - 1];
                if (z < nz - 1) acc += sb_[z] * xc[base + z + 1];
                bb[base + z] = acc;
            }
        }
        for (int r = 0; r < nr; ++r) {
            const int base = r * nz;
            for (int z = 0; z < nz; ++z) {
                const int i = base + z;
                cplx v(0.0, 0.0);
                if (diag) v += r_diag_[r] * bb[i];
                if (band2) {
                    if (r + 2 < nr) v += r_band2_[r] * bb[i + 2 * nz];
                    if (r >= 2) v += r_band2_[r - 2] * bb[i - 2 * nz];
                }
                wc[i] = free_diag_[i] * xc[i] + c * v;
            }
        }
    }

    // out = -i (W - W^dag); exactly Hermitian for Hermitian x.
    for (int j = 0; j < D; ++j) {
        for (int i = 0; i <= j; ++i) {
            const cplx wij = W[std::size_t(j) * D + i];
            const cplx wji = W[std::size_t(i) * D + j];
            const cplx d = wij - std::conj(wji);
            const cplx v(d.imag(), -d.real()); // -i * d
            O[std::size_t(j) * D + i] = v;
            O[std::size_t(i) * D + j] = std::conj(v);
        }
    }

    // Dissipators: ladder sandwiches as shifted scalings, anticommutator as a
    // diagonal scaling.
    const double gad = rates_.a_down, gau = rates_.a_up;
    const double gbd = rates_.b_down, gbu = rates_.b_up;
    for (int j = 0; j < D; ++j) {
        cplx* oc = O + std::size_t(j) * D;
        const cplx* xc = X + std::size_t(j) * D;
        const int rp = j / nz, zp = j % nz;
        const double gj = gamma_diag_[j];
        for (int i = 0; i < D; ++i) oc[i] -= 0.5 * (gamma_diag_[i] + gj) * xc[i];

        if (gad > 0.0 && rp < nr - 1) {
            const cplx* sc = X + std::size_t(j + nz) * D;
            const double f = gad * sa_[rp];
            for (int r = 0; r < nr - 1; ++r) {
                const int base = r * nz;
                const double fr = f * sa_[r];
                for (int z = 0; z < nz; ++z)
                    oc[base + z] += fr * sc[base + nz + z];
            }
        }
        if (gau > 0.0 && rp >= 1) {
            const cplx* sc = X + std::size_t(j - nz) * D;
            const double f = gau * sa_[rp - 1];
            for (int r = 1; r < nr; ++r) {
                const int base = r * nz;
                const double fr = f * sa_[r - 1];
                for (int z = 0; z < nz; ++z)
                    oc[base + z] += fr * sc[base - nz + z];
            }
        }
        if (gbd > 0.0 && zp < nz - 1) {
            const cplx* sc = X + std::size_t(j + 1) * D;
            const double f = gbd * sb_[zp];
            for (int r = 0; r < nr; ++r) {
                const int base = r * nz;
                for (int z = 0; z < nz - 1; ++z)
                    oc[base + z] += f * sb_[z] * sc[base + z + 1];
            }
        }
        if (gbu > 0.0 && zp >= 1) {
            const cplx* sc = X + std::size_t(j - 1) * D;
            const double f = gbu * sb_[zp - 1];
            for (int r = 0; r < nr; ++r) {
                const int base = r * nz;
                for (int z = 1; z < nz; ++z)
                    oc[base + z] += f * sb_[z - 1] * sc[base + z - 1];
            }
        }
    }
}

double stable_dt(const HamiltonianParams& params, const FockDims& dims,
                 const std::vector<BathSpec>& baths) {
    ChannelRates r;
    for (const auto& bath : baths) {
        const double g = bath.rate; // modulated baths at full strength
        if (bath.mode == BathMode::radial) {
            r.a_down += g * (bath.nbar + 1.0);
            r.a_up += g * bath.nbar;
        } else {
            r.b_down += g * (bath.nbar + 1.0);
            r.b_up += g * bath.nbar;
        }
    }
    const double span = params.omega_r * (dims.n_r - 1) +
                        params.omega_z * (dims.n_z - 1) + std::abs(params.beta);
    const double gamma = r.a_down * (dims.n_r - 1) + r.a_up * dims.n_r +
                         r.b_down * (dims.n_z - 1) + r.b_up * dims.n_z;
    const double radius = std::sqrt(span * span + gamma * gamma);
    return std::min(0.05 / params.omega_r, 1.8 / radius);
}

namespace {

std::vector<double> modulation_edges(const std::vector<BathSpec>& baths, double t0,
                                     double t_end) {
    std::vector<double> edges;
    for (const auto& bath : baths) {
        if (bath.modulation.kind != Modulation::Kind::square) continue;
        const auto& w = bath.modulation.wave;
        const long k0 = long(std::floor((t0 - w.phase) / w.period)) - 1;
        const long k1 = long(std::ceil((t_end - w.phase) / w.period)) + 1;
        for (long k = k0; k <= k1; ++k) {
            const double on = w.phase + double(k) * w.period;
            const double off = on + w.duty * w.period;
            for (double e : {on, off})
                if (e > t0 && e < t_end) edges.push_back(e);
        }
    }
    std::sort(edges.begin(), edges.end());
    const double eps = 1e-12 * std::max({std::abs(t0), std::abs(t_end), 1.0});
    edges.erase(std::unique(edges.begin(), edges.end(),
                            [eps](double a, double b) { return std::abs(a - b) < eps; }),
                edges.end());
    return edges;
}

[[noreturn]] void invariant_abort(const char* what, double t, double value) {
    std::ostringstream msg;
    msg << "propagation aborted: " << what << " at t = " << t << " (value " << value
        << ")";
    throw InvariantViolation(msg.str());
}

} // namespace

PropagationResult propagate(ModelKind kind, const HamiltonianParams& params,
                            const FockDims& dims, const MatrixXcd& rho0,
                            const std::vector<BathSpec>& baths, double t0, double t_end,
                            const PropagateOptions& opts, const Observer& observer) {
    dims.validate();
    for (const auto& bath : baths) bath.validate();
    if (rho0.rows() != dims.dim() || rho0.cols() != dims.dim())
        throw std::invalid_argument("propagate: rho0 shape does not match dims");
    if (!(opts.dt > 0.0)) throw std::invalid_argument("propagate: dt must be > 0");
    if (!(t_end > t0)) throw std::invalid_argument("propagate: t_end must exceed t0");

    TwoModeRhs rhs(kind, params, dims);
    const int D = dims.dim();

    PropagationResult res;
    MatrixXcd rho = rho0, acc(D, D), tmp(D, D), k(D, D);

    auto emit = [&](double t) {
        StepDiagnostics d;
        d.time = t;
        d.trace_error = std::abs(rho.trace() - cplx(1.0, 0.0));
        d.herm_error = fock::herm_residual(rho);
        if (!rho.allFinite()) invariant_abort("non-finite density matrix", t, 0.0);
        if (d.trace_error > opts.trace_tol)
            invariant_abort("trace error beyond tolerance", t, d.trace_error);
        if (d.herm_error > opts.herm_tol)
            invariant_abort("Hermiticity residual beyond tolerance", t, d.herm_error);
        res.max_trace_error = std::max(res.max_trace_error, d.trace_error);
        res.max_herm_error = std::max(res.max_herm_error, d.herm_error);
        res.times.push_back(t);
        res.diagnostics.push_back(d);
        if (opts.keep_states) res.states.push_back(rho);
        if (observer) observer(t, rho, d);
    };

    auto check_positivity = [&](double t) {
        Eigen::SelfAdjointEigenSolver<MatrixXcd> es(rho, Eigen::EigenvaluesOnly);
        const double lam = es.eigenvalues().minCoeff();
        res.min_eigenvalue_seen = std::min(res.min_eigenvalue_seen, lam);
        ++res.positivity_checks;
        if (lam < opts.positivity_floor)
            invariant_abort("negative eigenvalue beyond floor", t, lam);
    };

    emit(t0);

    std::vector<double> cuts = modulation_edges(baths, t0, t_end);
    cuts.push_back(t_end);

    long step_count = 0;
    double wa = t0;
    for (double wb : cuts) {
        if (!(wb > wa)) continue;
        rhs.set_rates(channel_rates(baths, wa));
        const long n = std::max<long>(1, long(std::ceil((wb - wa) / opts.dt - 1e-9)));
        const double h = (wb - wa) / double(n);
        for (long s = 1; s <= n; ++s) {
            // Classic RK4 with Hermiticity preserved at every stage.
            rhs.apply(rho, k);
            acc = rho + (h / 6.0) * k;
            tmp = rho + (h / 2.0) * k;
            rhs.apply(tmp, k);
            acc += (h / 3.0) * k;
            tmp = rho + (h / 2.0) * k;
            rhs.apply(tmp, k);
            acc += (h / 3.0) * k;
            tmp = rho + h * k;
            rhs.apply(tmp, k);
            rho = acc + (h / 6.0) * k;

            ++step_count;
            const double t = (s == n) ? wb : wa + double(s) * h;
            const bool window_end = (s == n);
            if (window_end || (opts.snapshot_stride > 0 &&
                               step_count % opts.snapshot_stride == 0))
                emit(t);
            if (opts.positivity_stride > 0 && step_count % opts.positivity_stride == 0)
                check_positivity(t);
        }
        wa = wb;
    }
    res.steps = step_count;
    return res;
}

LimitCycleResult run_limit_cycle(ModelKind kind, const HamiltonianParams& params,
                                 const FockDims& dims, const MatrixXcd& rho0,
                                 const std::vector<BathSpec>& baths,
                                 const LimitCycleOptions& opts,
                                 const Observer& observer) {
    const BathSpec* modulated = nullptr;
    for (const auto& bath : baths) {
        if (bath.modulation.kind == Modulation::Kind::square) {
            if (modulated)
                throw std::invalid_argument("limit cycle: expected one modulated bath");
            modulated = &bath;
        }
    }
    if (!modulated)
        throw std::invalid_argument("limit cycle: a square-modulated bath is required");

    const double period = modulated->modulation.wave.period;
    const double phase = modulated->modulation.wave.phase;
    const double warmup =
        opts.warmup_override >= 0.0 ? opts.warmup_override : (opts.cycles - 1) * period;

    // Recorded cycle starts at the first on-edge at or after the warmup.
    const double k_start = std::ceil((warmup - phase) / period - 1e-9);
    const double t_rec = phase + std::max(0.0, k_start) * period;
    const double t_end = t_rec + period;
    const double match_tol = 1e-9 * period;

    std::vector<double> boundaries;
    for (double e = phase; e <= t_end + match_tol; e += period)
        if (e >= -match_tol) boundaries.push_back(e);

    LimitCycleResult out;
    out.period = period;
    out.t_start = t_rec;

    std::vector<MatrixXcd> boundary_states;
    std::size_t next_boundary = 0;
    PropagationResult recorded;

    Observer inner = [&](double t, const MatrixXcd& rho, const StepDiagnostics& d) {
        while (next_boundary < boundaries.size() &&
               boundaries[next_boundary] < t - match_tol)
            ++next_boundary;
        if (next_boundary < boundaries.size() &&
            std::abs(boundaries[next_boundary] - t) <= match_tol) {
            boundary_states.push_back(rho);
            ++next_boundary;
        }
        if (t >= t_rec - match_tol) {
            recorded.times.push_back(t);
            recorded.diagnostics.push_back(d);
            if (opts.prop.keep_states) recorded.states.push_back(rho);
            if (observer) observer(t, rho, d);
        }
    };

    PropagateOptions prop = opts.prop;
    prop.keep_states = false;
    PropagationResult full =
        propagate(kind, params, dims, rho0, baths, 0.0, t_end, prop, inner);

    recorded.max_trace_error = full.max_trace_error;
    recorded.max_herm_error = full.max_herm_error;
    recorded.min_eigenvalue_seen = full.min_eigenvalue_seen;
    recorded.positivity_checks = full.positivity_checks;
    recorded.steps = full.steps;
    out.cycle = std::move(recorded);

    for (std::size_t i = 1; i < boundary_states.size(); ++i)
        out.residual_history.push_back(
            (boundary_states[i] - boundary_states[i - 1]).cwiseAbs().maxCoeff());
    if (!out.residual_history.empty())
        out.periodicity_residual = out.residual_history.back();
    out.converged = out.periodicity_residual <= opts.residual_tol;
    return out;
}

} // namespace ionheat::lindblad
