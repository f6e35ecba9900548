#include "ionheat/otto.hpp"
#include "ionheat/constants.hpp"

#include <atomic>
#include <cmath>
#include <thread>

namespace ionheat::otto {

BogoliubovFrame bogoliubov_reduce(double omega_r, double beta, double q_z) {
    if (!(omega_r > 0.0)) throw std::invalid_argument("reduce: omega_r must be > 0");
    const double bq = beta * q_z;
    if (bq >= omega_r)
        throw std::domain_error(
            "bogoliubov_reduce: singular reduction, beta*q_z >= omega_r");
    const double arg = bq / (2.0 * omega_r - bq);
    const double x = 0.25 * std::log((1.0 + arg) / (1.0 - arg)); // atanh(arg)/2
    const double c2 = std::cosh(2.0 * x);
    const double s2 = std::sinh(2.0 * x);
    BogoliubovFrame f;
    f.q_z = q_z;
    f.x = x;
    f.omega_eff = (omega_r - 0.5 * bq) * c2 - 0.5 * bq * s2;
    // Scalar part of the diagonalized Hamiltonian. Matches the ground energy
    // of the reduced quadratic form, (omega_eff - omega_0)/2 - beta q_z / 4.
    f.offset = omega_r * 0.5 * (c2 - 1.0) - 0.25 * bq * (s2 + c2);
    return f;
}

double effective_entropy(double n_c) {
    if (n_c < 0.0) throw std::domain_error("effective_entropy: n_c must be >= 0");
    if (n_c == 0.0) return 0.0;
    return (1.0 + n_c) * std::log1p(n_c) - n_c * std::log(n_c);
}

double effective_temperature(double omega_eff, double n_c) {
    if (n_c < 0.0) throw std::domain_error("effective_temperature: n_c must be >= 0");
    if (n_c == 0.0) return 0.0;
    return omega_eff / std::log1p(1.0 / n_c);
}

Eigen::MatrixXd quasiparticle_number(int n_r, double x) {
    const Eigen::MatrixXd a = fock::ladder(n_r);
    const Eigen::MatrixXd n = a.transpose() * a;
    const Eigen::MatrixXd sq = a * a + (a * a).transpose();
    const double ch2 = std::cosh(x) * std::cosh(x);
    const double sh2 = std::sinh(x) * std::sinh(x);
    const double s2x = std::sinh(2.0 * x);
    return ch2 * n + sh2 * (n + Eigen::MatrixXd::Identity(n_r, n_r)) - 0.5 * s2x * sq;
}

Eigen::MatrixXd reduced_radial_hamiltonian(int n_r, double omega_r, double beta,
                                           double q_z) {
    const double bq = beta * q_z;
    const Eigen::MatrixXd a = fock::ladder(n_r);
    const Eigen::MatrixXd n = a.transpose() * a;
    const Eigen::MatrixXd sq = a * a + (a * a).transpose();
    return (omega_r - 0.5 * bq) * n - 0.25 * bq * sq -
           0.25 * bq * Eigen::MatrixXd::Identity(n_r, n_r);
}

std::string to_string(Stroke s) {
    switch (s) {
        case Stroke::hot_isochore: return "A->B";
        case Stroke::expansion: return "B->C";
        case Stroke::cold_isochore: return "C->D";
        case Stroke::compression: return "D->A";
    }
    throw std::logic_error("unreachable stroke");
}

CycleRecord extract_cycle(const RadialCycleTrace& trace, const StrokeOptions& strokes) {
    if (trace.times.size() < 4)
        throw std::invalid_argument("extract_cycle: need at least 4 snapshots");
    if (trace.times.size() != trace.rho_radial.size() ||
        trace.times.size() != trace.q_z.size())
        throw std::invalid_argument("extract_cycle: trace arrays disagree");

    const double hot_len = trace.t_hot_off - trace.t_hot_on;
    const double off_len = trace.period - hot_len;
    const double tau_hot =
        std::min(hot_len, strokes.hot_layers / std::max(trace.kappa_r_total, 1e-300));
    const double tau_cold =
        std::min(off_len, strokes.cold_layers / std::max(trace.kappa_a, 1e-300));

    CycleRecord rec;
    rec.period = trace.period;
    rec.points.reserve(trace.times.size());

    for (std::size_t i = 0; i < trace.times.size(); ++i) {
        const BogoliubovFrame f =
            bogoliubov_reduce(trace.omega_r, trace.beta, trace.q_z[i]);
        const int n_r = int(trace.rho_radial[i].rows());
        const Eigen::MatrixXd nc_op = quasiparticle_number(n_r, f.x);
        double n_c =
            (trace.rho_radial[i] * nc_op.cast<std::complex<double>>()).trace().real();
        if (n_c < 0.0) {
            if (n_c < -1e-6)
                rec.warning = "negative quasiparticle occupation encountered";
            n_c = 0.0;
        }

        CyclePoint p;
        p.t = trace.times[i];
        p.q_z = trace.q_z[i];
        p.x = f.x;
        p.omega_eff = f.omega_eff;
        p.n_c = n_c;
        p.u_scaled = (f.omega_eff * n_c + f.offset) / trace.omega_z;
        p.t_eff_scaled = effective_temperature(f.omega_eff, n_c) / trace.omega_z;
        p.entropy = effective_entropy(n_c);

        double tau = p.t - trace.t_hot_on;
        tau -= trace.period * std::floor(tau / trace.period);
        if (tau < tau_hot)
            p.stroke = Stroke::hot_isochore;
        else if (tau < hot_len)
            p.stroke = Stroke::expansion;
        else if (tau < hot_len + tau_cold)
            p.stroke = Stroke::cold_isochore;
        else
            p.stroke = Stroke::compression;
        rec.points.push_back(p);
    }

    // Net work: cyclic trapezoid of T dS over the ordered loop.
    const std::size_t n = rec.points.size();
    double w_scaled = 0.0;
    double t_lo = rec.points[0].t_eff_scaled, t_hi = t_lo;
    double s_lo = rec.points[0].entropy, s_hi = s_lo;
    double w_lo = rec.points[0].omega_eff, w_hi = w_lo;
    for (std::size_t i = 0; i < n; ++i) {
        const auto& p0 = rec.points[i];
        const auto& p1 = rec.points[(i + 1) % n];
        w_scaled += 0.5 * (p0.t_eff_scaled + p1.t_eff_scaled) *
                    (p1.entropy - p0.entropy);
        t_lo = std::min(t_lo, p0.t_eff_scaled);
        t_hi = std::max(t_hi, p0.t_eff_scaled);
        s_lo = std::min(s_lo, p0.entropy);
        s_hi = std::max(s_hi, p0.entropy);
        w_lo = std::min(w_lo, p0.omega_eff);
        w_hi = std::max(w_hi, p0.omega_eff);
    }
    // With omega_eff constant, T is a function of S alone and the loop is a
    // retraced curve: the work vanishes identically, up to quadrature residue.
    const bool omega_flat = (w_hi - w_lo) < 1e-9 * w_hi;
    const double area_scale = (t_hi - t_lo) * (s_hi - s_lo);
    if (omega_flat || std::abs(w_scaled) < 1e-9 * area_scale || area_scale == 0.0) {
        rec.degenerate = true;
        if (rec.warning.empty()) rec.warning = "degenerate T-S loop, work set to zero";
        w_scaled = 0.0;
    }
    rec.w_net_hbar_omega_z = w_scaled;
    rec.w_net_joules = w_scaled * phys::hbar * trace.omega_z;

    double q_in_scaled = 0.0;
    for (std::size_t i = 0; i + 1 < n; ++i) {
        if (rec.points[i].stroke != Stroke::hot_isochore) continue;
        const auto& p0 = rec.points[i];
        const auto& p1 = rec.points[i + 1];
        q_in_scaled +=
            0.5 * (p0.t_eff_scaled + p1.t_eff_scaled) * (p1.entropy - p0.entropy);
    }
    rec.q_in_joules = q_in_scaled * phys::hbar * trace.omega_z;
    rec.eta = rec.q_in_joules > 0.0 ? rec.w_net_joules / rec.q_in_joules : 0.0;
    rec.power_watts = rec.w_net_joules / trace.period;
    return rec;
}

CycleRunResult collect_cycle_trace(const CycleRunSpec& spec) {
    const MatrixXcd H = fock::build_hamiltonian(spec.kind, spec.params, spec.dims);
    const fock::DensityMatrix rho0 = fock::gibbs_state(H, spec.dims, spec.T_0_kelvin);

    const lindblad::BathSpec* modulated = nullptr;
    double kappa_r_total = 0.0, kappa_a = 0.0;
    for (const auto& bath : spec.baths) {
        if (bath.mode == lindblad::BathMode::radial) {
            kappa_r_total += bath.rate;
            if (bath.modulation.kind == lindblad::Modulation::Kind::constant)
                kappa_a += bath.rate;
        }
        if (bath.modulation.kind == lindblad::Modulation::Kind::square)
            modulated = &bath;
    }
    if (!modulated)
        throw std::invalid_argument("collect_cycle_trace: modulated bath required");

    CycleRunResult out;
    RadialCycleTrace& trace = out.trace;
    const int nz = spec.dims.n_z;
    const Eigen::MatrixXd az = fock::ladder(nz);
    const Eigen::MatrixXcd bx = (az + az.transpose()).cast<std::complex<double>>();

    lindblad::Observer obs = [&](double t, const MatrixXcd& rho,
                                 const lindblad::StepDiagnostics&) {
        trace.times.push_back(t);
        trace.rho_radial.push_back(fock::partial_trace_axial(rho, spec.dims));
        const MatrixXcd rho_b = fock::partial_trace_radial(rho, spec.dims);
        trace.q_z.push_back((rho_b * bx).trace().real());
    };

    lindblad::LimitCycleOptions cycle = spec.cycle;
    cycle.prop.keep_states = false;
    out.limit_cycle = lindblad::run_limit_cycle(spec.kind, spec.params, spec.dims,
                                                rho0.rho, spec.baths, cycle, obs);

    trace.period = out.limit_cycle.period;
    trace.t_hot_on = out.limit_cycle.t_start;
    trace.t_hot_off =
        out.limit_cycle.t_start + modulated->modulation.wave.duty * trace.period;
    trace.omega_r = spec.params.omega_r;
    trace.omega_z = spec.params.omega_z;
    trace.beta = spec.params.beta;
    trace.kappa_r_total = kappa_r_total;
    trace.kappa_a = kappa_a;
    return out;
}

std::vector<WorkSweepRow> work_vs_radius(const std::vector<double>& r0_values,
                                         trap::TrapGeometry geom,
                                         const trap::EngineParams& engine,
                                         const CycleRunSpec& run_template,
                                         const StrokeOptions& strokes, int threads) {
    (void)engine; // bath rates and occupations already live in run_template.baths
    std::vector<WorkSweepRow> rows(r0_values.size());
    std::atomic<std::size_t> next{0};
    const int workers =
        std::max(1, std::min<int>(threads, int(r0_values.size())));

    auto work = [&]() {
        for (;;) {
            const std::size_t i = next.fetch_add(1);
            if (i >= r0_values.size()) return;
            WorkSweepRow& row = rows[i];
            row.r0_m = r0_values[i];
            try {
                trap::TrapGeometry g = geom;
                g.r0 = r0_values[i];
                row.beta = trap::compute_beta(g);
                if (row.beta >= g.omega_r) {
                    row.error = "beta >= omega_r";
                    continue;
                }
                CycleRunSpec spec = run_template;
                spec.params.beta = row.beta;
                const CycleRunResult run = collect_cycle_trace(spec);
                const CycleRecord rec = extract_cycle(run.trace, strokes);
                row.w_hbar_omega_z = rec.w_net_hbar_omega_z;
                row.eta = rec.eta;
                row.ok = true;
            } catch (const std::exception& e) {
                row.error = e.what();
            }
        }
    };

    std::vector<std::thread> pool;
    for (int w = 0; w < workers; ++w) pool.emplace_back(work);
    for (auto& t : pool) t.join();
    return rows;
}

} // namespace ionheat::otto
