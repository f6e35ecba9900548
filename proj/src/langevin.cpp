#include "ionheat/langevin.hpp"
#include "ionheat/constants.hpp"
#include "ionheat/observables.hpp"

#include <atomic>
#include <cmath>
#include <random>
#include <thread>

namespace ionheat::langevin {

using fock::MatrixXcd;

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

std::mt19937_64 trajectory_rng(std::uint64_t seed, std::uint64_t index) {
    return std::mt19937_64(splitmix64(seed * 0x9e3779b97f4a7c15ULL ^ (index + 1)));
}

constexpr double sqrt2 = 1.4142135623730951;

} // namespace

LangevinParams classical_params(const trap::TrapGeometry& geom,
                                const trap::EngineParams& engine) {
    LangevinParams p;
    p.omega_r = geom.omega_r;
    p.omega_z = geom.omega_z;
    p.beta = engine.beta;
    p.kappa_a = engine.kappa_a;
    p.kappa_h = engine.kappa_h;
    p.kappa_b = engine.kappa_b;
    p.nbar_a = engine.nbar_a;
    p.nbar_h = engine.nbar_h;
    p.nbar_b = engine.nbar_b;
    p.heating = lindblad::SquareWave{engine.heating_period, engine.heating_duty,
                                     engine.heating_phase};
    p.init_var_r = trap::planck_occupation(geom.omega_r, engine.T_0) + 0.5;
    p.init_var_z = trap::planck_occupation(geom.omega_z, engine.T_0) + 0.5;
    return p;
}

LangevinState step(const LangevinState& s, const LangevinParams& p, double dt,
                   const NoiseDraws& draws) {
    const bool hot = p.heating.on(s.t);
    const double kr = 0.5 * (p.kappa_a + (hot ? p.kappa_h : 0.0));
    const double kb = 0.5 * p.kappa_b;

    // Position-only coupling: forces enter the momentum-like quadratures. The
    // coupling drive carries the drift of the full quadratic interaction,
    // (sqrt2 beta / 4)(2 X_r^2 + 1), whose constant term acts even at X_r = 0.
    const double dx_r = (p.omega_r * s.y_r - kr * s.x_r) * dt;
    const double dy_r =
        (-p.omega_r * s.x_r + sqrt2 * p.beta * s.x_r * s.x_z - kr * s.y_r) * dt;
    const double dx_z = (p.omega_z * s.y_z - kb * s.x_z) * dt;
    const double dy_z = (-p.omega_z * s.x_z +
                         (sqrt2 * p.beta / 4.0) * (2.0 * s.x_r * s.x_r + 1.0) -
                         kb * s.y_z) *
                        dt;

    const double w_a = std::sqrt(p.kappa_a * p.nbar_a * dt);
    const double w_h = hot ? std::sqrt(p.kappa_h * p.nbar_h * dt) : 0.0;
    const double w_b = std::sqrt(p.kappa_b * p.nbar_b * dt);

    LangevinState out;
    out.x_r = s.x_r + dx_r + w_a * draws.a_x + w_h * draws.h_x;
    out.y_r = s.y_r + dy_r + w_a * draws.a_y + w_h * draws.h_y;
    out.x_z = s.x_z + dx_z + w_b * draws.b_x;
    out.y_z = s.y_z + dy_z + w_b * draws.b_y;
    out.t = s.t + dt;
    return out;
}

double classical_hamiltonian(const LangevinState& s, const LangevinParams& p) {
    const double e_r = 0.5 * p.omega_r * (s.x_r * s.x_r + s.y_r * s.y_r);
    const double e_z = 0.5 * p.omega_z * (s.x_z * s.x_z + s.y_z * s.y_z);
    const double v =
        -(sqrt2 * p.beta / 4.0) * (2.0 * s.x_r * s.x_r + 1.0) * s.x_z;
    return e_r + e_z + v;
}

namespace {

struct ChunkAccumulator {
    std::vector<double> sum, sum_sq;
    int discarded{};
    void init(std::size_t n) {
        sum.assign(n, 0.0);
        sum_sq.assign(n, 0.0);
    }
};

} // namespace

EnsembleStats ensemble_run(const LangevinParams& p, int n_traj, double t_end, double dt,
                           std::uint64_t seed, int record_stride, int threads) {
    if (n_traj < 100) throw std::invalid_argument("ensemble_run: need at least 100 trajectories");
    if (!(dt > 0.0) || !(dt * p.omega_r <= 0.05))
        throw std::invalid_argument("ensemble_run: require dt * omega_r <= 0.05");

    const long n_steps = std::max<long>(1, long(std::llround(t_end / dt)));
    std::vector<double> times;
    for (long s = 0; s <= n_steps; s += record_stride) times.push_back(double(s) * dt);
    const std::size_t n_rec = times.size();

    const int chunk = 128;
    const int n_chunks = (n_traj + chunk - 1) / chunk;
    std::vector<ChunkAccumulator> acc(static_cast<std::size_t>(n_chunks));
    std::atomic<int> next{0};

    auto work = [&]() {
        std::normal_distribution<double> normal(0.0, 1.0);
        for (;;) {
            const int c = next.fetch_add(1);
            if (c >= n_chunks) return;
            ChunkAccumulator& a = acc[std::size_t(c)];
            a.init(n_rec);
            const int lo = c * chunk, hi = std::min(n_traj, lo + chunk);
            for (int traj = lo; traj < hi; ++traj) {
                auto rng = trajectory_rng(seed, std::uint64_t(traj));
                LangevinState s;
                s.x_r = std::sqrt(p.init_var_r) * normal(rng);
                s.y_r = std::sqrt(p.init_var_r) * normal(rng);
                s.x_z = std::sqrt(p.init_var_z) * normal(rng);
                s.y_z = std::sqrt(p.init_var_z) * normal(rng);
                s.t = 0.0;

                std::vector<double> rec(n_rec, 0.0);
                std::size_t ri = 0;
                bool bad = false;
                rec[ri++] = classical_nz(s);
                for (long st = 1; st <= n_steps; ++st) {
                    NoiseDraws d;
                    if (p.heating.on(s.t)) {
                        d.h_x = normal(rng);
                        d.h_y = normal(rng);
                    }
                    d.a_x = normal(rng);
                    d.a_y = normal(rng);
                    d.b_x = normal(rng);
                    d.b_y = normal(rng);
                    s = step(s, p, dt, d);
                    if (st % record_stride == 0 && ri < n_rec) {
                        const double nz = classical_nz(s);
                        if (!std::isfinite(nz)) {
                            bad = true;
                            break;
                        }
                        rec[ri++] = nz;
                    }
                }
                if (bad) {
                    ++a.discarded;
                    continue;
                }
                for (std::size_t i = 0; i < n_rec; ++i) {
                    a.sum[i] += rec[i];
                    a.sum_sq[i] += rec[i] * rec[i];
                }
            }
        }
    };

    std::vector<std::thread> pool;
    const int workers = std::max(1, threads);
    for (int w = 0; w < workers; ++w) pool.emplace_back(work);
    for (auto& t : pool) t.join();

    EnsembleStats out;
    out.times = times;
    out.seed = seed;
    out.trajectories = n_traj;
    std::vector<double> sum(n_rec, 0.0), sum_sq(n_rec, 0.0);
    for (const auto& a : acc) {
        out.discarded += a.discarded;
        for (std::size_t i = 0; i < n_rec; ++i) {
            sum[i] += a.sum[i];
            sum_sq[i] += a.sum_sq[i];
        }
    }
    if (out.discarded > n_traj / 100)
        throw InvariantViolation("ensemble_run: more than 1% of trajectories diverged");
    const double n_eff = double(n_traj - out.discarded);
    out.nz_mean.resize(n_rec);
    out.nz_stderr.resize(n_rec);
    out.p_dis_w.resize(n_rec);
    out.p_dis_stderr_w.resize(n_rec);
    const double p_scale = phys::hbar * p.omega_z * p.kappa_b;
    for (std::size_t i = 0; i < n_rec; ++i) {
        const double mean = sum[i] / n_eff;
        const double var = std::max(0.0, sum_sq[i] / n_eff - mean * mean);
        out.nz_mean[i] = mean;
        out.nz_stderr[i] = std::sqrt(var / n_eff);
        out.p_dis_w[i] = p_scale * (mean - p.nbar_b);
        out.p_dis_stderr_w[i] = p_scale * out.nz_stderr[i];
    }
    return out;
}

PhaseBins classical_cycle_bins(const LangevinParams& p, int n_traj, int warmup_periods,
                               int n_bins, double dt, std::uint64_t seed, int threads) {
    if (!(p.heating.period > 0.0))
        throw std::invalid_argument("cycle_bins: heating period required");
    if (n_bins < 2) throw std::invalid_argument("cycle_bins: need at least 2 bins");

    const double period = p.heating.period;
    const long steps_per_period = std::max<long>(1, long(std::llround(period / dt)));
    const double h = period / double(steps_per_period);
    const long warm_steps = steps_per_period * warmup_periods;
    const long total_steps = warm_steps + steps_per_period;

    const int chunk = 128;
    const int n_chunks = (n_traj + chunk - 1) / chunk;
    std::vector<ChunkAccumulator> acc(static_cast<std::size_t>(n_chunks));
    std::atomic<int> next{0};

    auto work = [&]() {
        std::normal_distribution<double> normal(0.0, 1.0);
        for (;;) {
            const int c = next.fetch_add(1);
            if (c >= n_chunks) return;
            ChunkAccumulator& a = acc[std::size_t(c)];
            a.init(std::size_t(n_bins));
            const int lo = c * chunk, hi = std::min(n_traj, lo + chunk);
            std::vector<double> bin_sum(static_cast<std::size_t>(n_bins));
            std::vector<long> bin_count(static_cast<std::size_t>(n_bins));
            for (int traj = lo; traj < hi; ++traj) {
                auto rng = trajectory_rng(seed, std::uint64_t(traj));
                LangevinState s;
                s.x_r = std::sqrt(p.init_var_r) * normal(rng);
                s.y_r = std::sqrt(p.init_var_r) * normal(rng);
                s.x_z = std::sqrt(p.init_var_z) * normal(rng);
                s.y_z = std::sqrt(p.init_var_z) * normal(rng);
                s.t = 0.0;
                std::fill(bin_sum.begin(), bin_sum.end(), 0.0);
                std::fill(bin_count.begin(), bin_count.end(), 0L);
                bool bad = false;
                for (long st = 0; st < total_steps; ++st) {
                    NoiseDraws d;
                    if (p.heating.on(s.t)) {
                        d.h_x = normal(rng);
                        d.h_y = normal(rng);
                    }
                    d.a_x = normal(rng);
                    d.a_y = normal(rng);
                    d.b_x = normal(rng);
                    d.b_y = normal(rng);
                    s = step(s, p, h, d);
                    if (st >= warm_steps) {
                        const long in_period = st - warm_steps;
                        const int bin =
                            int((in_period * n_bins) / steps_per_period) % n_bins;
                        const double nz = classical_nz(s);
                        if (!std::isfinite(nz)) {
                            bad = true;
                            break;
                        }
                        bin_sum[std::size_t(bin)] += nz;
                        ++bin_count[std::size_t(bin)];
                    }
                }
                if (bad) {
                    ++a.discarded;
                    continue;
                }
                for (int b = 0; b < n_bins; ++b) {
                    const double mean =
                        bin_sum[std::size_t(b)] / double(bin_count[std::size_t(b)]);
                    a.sum[std::size_t(b)] += mean;
                    a.sum_sq[std::size_t(b)] += mean * mean;
                }
            }
        }
    };

    std::vector<std::thread> pool;
    for (int w = 0; w < std::max(1, threads); ++w) pool.emplace_back(work);
    for (auto& t : pool) t.join();

    PhaseBins out;
    out.bins = n_bins;
    out.period = period;
    out.t0 = double(warm_steps) * h;
    out.trajectories = n_traj;
    std::vector<double> sum(static_cast<std::size_t>(n_bins), 0.0);
    std::vector<double> sum_sq(static_cast<std::size_t>(n_bins), 0.0);
    for (const auto& a : acc) {
        out.discarded += a.discarded;
        for (int b = 0; b < n_bins; ++b) {
            sum[std::size_t(b)] += a.sum[std::size_t(b)];
            sum_sq[std::size_t(b)] += a.sum_sq[std::size_t(b)];
        }
    }
    if (out.discarded > n_traj / 100)
        throw InvariantViolation("cycle_bins: more than 1% of trajectories diverged");
    const double n_eff = double(n_traj - out.discarded);
    out.nz_mean.resize(std::size_t(n_bins));
    out.nz_stderr.resize(std::size_t(n_bins));
    for (int b = 0; b < n_bins; ++b) {
        const double mean = sum[std::size_t(b)] / n_eff;
        const double var = std::max(0.0, sum_sq[std::size_t(b)] / n_eff - mean * mean);
        out.nz_mean[std::size_t(b)] = mean;
        out.nz_stderr[std::size_t(b)] = std::sqrt(var / n_eff);
    }
    return out;
}

std::vector<CrossoverRow> power_crossover_sweep(const std::vector<double>& beta_values,
                                                const trap::TrapGeometry& geom,
                                                const trap::EngineParams& engine,
                                                const CrossoverOptions& opts) {
    std::vector<CrossoverRow> rows(beta_values.size());
    for (std::size_t i = 0; i < beta_values.size(); ++i) {
        CrossoverRow& row = rows[i];
        row.beta = beta_values[i];
        try {
            if (!(row.beta < geom.omega_r))
                throw std::invalid_argument("beta >= omega_r");
            trap::EngineParams ep = engine;
            ep.beta = row.beta;

            // Quantum side: maximum dissipated power over the recorded cycle.
            fock::HamiltonianParams hp{geom.omega_r, geom.omega_z, ep.beta};
            std::vector<lindblad::BathSpec> baths{
                {lindblad::BathMode::radial, ep.kappa_a, ep.nbar_a,
                 lindblad::Modulation::constant()},
                {lindblad::BathMode::radial, ep.kappa_h, ep.nbar_h,
                 lindblad::Modulation::square(ep.heating_period, ep.heating_duty,
                                              ep.heating_phase)},
                {lindblad::BathMode::axial, ep.kappa_b, ep.nbar_b,
                 lindblad::Modulation::constant()}};
            const MatrixXcd H =
                fock::build_hamiltonian(fock::ModelKind::cm, hp, opts.dims);
            const fock::DensityMatrix rho0 =
                fock::gibbs_state(H, opts.dims, ep.T_0);
            std::vector<double> q_times, q_nz;
            lindblad::Observer obs = [&](double t, const MatrixXcd& rho,
                                         const lindblad::StepDiagnostics&) {
                q_times.push_back(t);
                q_nz.push_back(obs::expectations(rho, opts.dims).n_z);
            };
            lindblad::LimitCycleOptions cycle = opts.cycle;
            cycle.prop.keep_states = false;
            const auto lc = lindblad::run_limit_cycle(fock::ModelKind::cm, hp,
                                                      opts.dims, rho0.rho, baths,
                                                      cycle, obs);
            // Same phase-bin estimator on both sides of the comparison.
            std::vector<double> q_bin_sum(std::size_t(opts.phase_bins), 0.0);
            std::vector<long> q_bin_n(std::size_t(opts.phase_bins), 0);
            for (std::size_t k = 0; k < q_times.size(); ++k) {
                double tau = (q_times[k] - lc.t_start) / lc.period;
                tau -= std::floor(tau);
                const int b =
                    std::min(opts.phase_bins - 1, int(tau * opts.phase_bins));
                q_bin_sum[std::size_t(b)] += q_nz[k];
                ++q_bin_n[std::size_t(b)];
            }
            double nz_q_max = -1e300;
            for (int b = 0; b < opts.phase_bins; ++b)
                if (q_bin_n[std::size_t(b)] > 0)
                    nz_q_max = std::max(nz_q_max, q_bin_sum[std::size_t(b)] /
                                                      double(q_bin_n[std::size_t(b)]));
            row.p_q_w = phys::hbar * geom.omega_z * ep.kappa_b *
                        (nz_q_max - ep.nbar_b);

            // Classical side: identical bath and timing parameters.
            LangevinParams lp = classical_params(geom, ep);
            const double dt =
                opts.classical_dt > 0.0 ? opts.classical_dt : 2e-3 / geom.omega_r;
            const PhaseBins bins =
                classical_cycle_bins(lp, opts.trajectories, opts.warmup_periods,
                                     opts.phase_bins, dt, opts.seed, opts.threads);
            const double p_scale = phys::hbar * geom.omega_z * ep.kappa_b;
            std::size_t arg = 0;
            for (std::size_t b = 1; b < bins.nz_mean.size(); ++b)
                if (bins.nz_mean[b] > bins.nz_mean[arg]) arg = b;
            row.p_c_w = p_scale * (bins.nz_mean[arg] - ep.nbar_b);
            row.p_c_stderr_w = p_scale * bins.nz_stderr[arg];
            row.bins = bins;
            row.ok = true;
        } catch (const std::exception& e) {
            row.error = e.what();
        }
    }
    return rows;
}

} // namespace ionheat::langevin
