#include "ionheat/scenarios.hpp"
#include "ionheat/constants.hpp"
#include "ionheat/errors.hpp"
#include "ionheat/io_util.hpp"
#include "ionheat/langevin.hpp"
#include "ionheat/lindblad.hpp"
#include "ionheat/observables.hpp"
#include "ionheat/otto.hpp"

#include <json.hpp>

#include <array>
#include <atomic>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <iostream>
#include <mutex>
#include <thread>

namespace ionheat::scenarios {

namespace {

namespace fs = std::filesystem;
using nlohmann::json;
using config::ScenarioConfig;

struct Assembled {
    fock::HamiltonianParams hp{};
    std::vector<lindblad::BathSpec> baths;
    lindblad::PropagateOptions prop{};
    lindblad::LimitCycleOptions cycle{};
    double dt{};
    int threads{2};
};

Assembled assemble(const ScenarioConfig& cfg) {
    Assembled a;
    const auto& g = cfg.geometry;
    const auto& e = cfg.engine;
    a.hp = fock::HamiltonianParams{g.omega_r, g.omega_z, e.beta};
    a.baths = {{lindblad::BathMode::radial, e.kappa_a, e.nbar_a,
                lindblad::Modulation::constant()},
               {lindblad::BathMode::radial, e.kappa_h, e.nbar_h,
                lindblad::Modulation::square(e.heating_period, e.heating_duty,
                                             e.heating_phase)},
               {lindblad::BathMode::axial, e.kappa_b, e.nbar_b,
                lindblad::Modulation::constant()}};
    a.dt = cfg.integrator.dt_s > 0.0 ? cfg.integrator.dt_s
                                     : cfg.integrator.dt_factor / g.omega_r;
    a.prop.dt = a.dt;
    a.prop.snapshot_stride = cfg.integrator.snapshot_stride;
    a.prop.positivity_stride = cfg.integrator.positivity_stride;
    a.prop.keep_states = false;
    a.cycle.cycles = cfg.integrator.cycles;
    a.cycle.warmup_override = cfg.integrator.warmup_s;
    a.cycle.residual_tol = cfg.integrator.residual_tol;
    a.cycle.prop = a.prop;
    a.threads = cfg.threads > 0 ? cfg.threads
                                : int(std::max(1u, std::thread::hardware_concurrency()));
    return a;
}

struct InvariantEntry {
    std::string name;
    double value{};
    double threshold{};
    bool pass{};
};

class Manifest {
  public:
    Manifest(fs::path dir, std::string scenario, json config_echo)
        : dir_(std::move(dir)), scenario_(std::move(scenario)),
          config_echo_(std::move(config_echo)),
          started_(std::chrono::steady_clock::now()) {}

    void add_invariant(const std::string& name, double value, double threshold,
                       bool pass) {
        std::lock_guard lock(mutex_);
        invariants_.push_back({name, value, threshold, pass});
    }
    void add_warning(const std::string& msg) {
        std::lock_guard lock(mutex_);
        warnings_.push_back(msg);
    }
    void write_text(const std::string& name, const std::string& content) {
        io::write_file_atomic(dir_ / name, content);
        std::lock_guard lock(mutex_);
        files_.push_back(name);
    }
    void write_json(const std::string& name, const json& j) {
        write_text(name, j.dump(2) + "\n");
    }
    bool all_invariants_pass() const {
        for (const auto& e : invariants_)
            if (!e.pass) return false;
        return true;
    }

    void finalize(const std::string& status, const std::string& error) {
        json j;
        j["version"] = version;
        j["scenario"] = scenario_;
        j["status"] = status;
        if (!error.empty()) j["error"] = error;
        j["wall_seconds"] =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - started_)
                .count();
        j["config"] = config_echo_;
        json inv = json::array();
        for (const auto& e : invariants_)
            inv.push_back({{"name", e.name},
                           {"value", e.value},
                           {"threshold", e.threshold},
                           {"pass", e.pass}});
        j["invariants"] = inv;
        j["warnings"] = warnings_;
        json files = json::array();
        for (const auto& f : files_) {
            const std::string content = io::read_file(dir_ / f);
            char hex[24];
            std::snprintf(hex, sizeof(hex), "%016llx",
                          static_cast<unsigned long long>(io::fnv1a64(content)));
            files.push_back(
                {{"name", f}, {"bytes", content.size()}, {"fnv1a64", hex}});
        }
        j["files"] = files;
        io::write_file_atomic(dir_ / "manifest.json", j.dump(2) + "\n");
    }

  private:
    fs::path dir_;
    std::string scenario_;
    json config_echo_;
    std::chrono::steady_clock::time_point started_;
    std::vector<InvariantEntry> invariants_;
    std::vector<std::string> warnings_;
    std::vector<std::string> files_;
    std::mutex mutex_;
};

struct ScenarioRow {
    obs::TraceRow row;
    obs::Moments m;
};

struct QuantumRunStats {
    double min_uncertainty{1e300};
    double max_imag{0.0};
};

ScenarioRow make_row(double t, const fock::MatrixXcd& rho, const ScenarioConfig& cfg,
                     QuantumRunStats* stats) {
    const auto& g = cfg.geometry;
    const auto& e = cfg.engine;
    ScenarioRow r;
    r.m = obs::expectations(rho, cfg.dims);
    r.row.time_s = t;
    r.row.scaled_time = g.omega_z * t / phys::two_pi;
    r.row.n_r = r.m.n_r;
    r.row.n_z = r.m.n_z;
    r.row.var_qr = r.m.var_qr;
    r.row.var_pr = r.m.var_pr;
    r.row.corr_qr2_pz = r.m.corr_qr2_pz;
    r.row.p_dis_w = obs::dissipated_power_w(r.m.n_z, g.omega_z, e.kappa_b, e.nbar_b);
    r.row.u_t = lindblad::SquareWave{e.heating_period, e.heating_duty, e.heating_phase}
                        .on(t)
                    ? 1.0
                    : 0.0;
    if (stats) {
        stats->min_uncertainty =
            std::min(stats->min_uncertainty, r.row.var_qr * r.row.var_pr);
        stats->max_imag = std::max(stats->max_imag, r.m.max_imag_residual);
    }
    return r;
}

std::string trace_csv(const std::vector<ScenarioRow>& rows) {
    std::string out = io::csv_row(std::vector<std::string>{
        "time_s", "scaled_time", "n_r", "n_z", "var_qr", "var_pr", "corr_qr2_pz",
        "P_dis_w", "u_t"});
    for (const auto& r : rows)
        out += io::csv_row(std::vector<double>{
            r.row.time_s, r.row.scaled_time, r.row.n_r, r.row.n_z, r.row.var_qr,
            r.row.var_pr, r.row.corr_qr2_pz, r.row.p_dis_w, r.row.u_t});
    return out;
}

void record_run_invariants(Manifest& man, const std::string& tag,
                           const lindblad::PropagationResult& res,
                           const QuantumRunStats& stats,
                           const lindblad::PropagateOptions& prop) {
    man.add_invariant(tag + ".trace_error", res.max_trace_error, prop.trace_tol,
                      res.max_trace_error < prop.trace_tol);
    man.add_invariant(tag + ".herm_error", res.max_herm_error, prop.herm_tol,
                      res.max_herm_error < prop.herm_tol);
    if (res.positivity_checks > 0)
        man.add_invariant(tag + ".min_eigenvalue", res.min_eigenvalue_seen,
                          prop.positivity_floor,
                          res.min_eigenvalue_seen > prop.positivity_floor);
    man.add_invariant(tag + ".uncertainty_product_min", stats.min_uncertainty,
                      1.0 / 16.0 - 1e-6, stats.min_uncertainty >= 1.0 / 16.0 - 1e-6);
    man.add_invariant(tag + ".imag_residual", stats.max_imag, 1e-10,
                      stats.max_imag < 1e-10);
}

void write_params_report(const ScenarioConfig& cfg, const Assembled& a, Manifest& man) {
    const auto& g = cfg.geometry;
    const auto& e = cfg.engine;
    json j;
    j["beta_rad_per_s"] = e.beta;
    j["beta_khz"] = e.beta / phys::two_pi / 1e3;
    j["beta_source"] = cfg.beta_overridden ? "override" : "derived";
    j["beta_derived_rad_per_s"] = trap::compute_beta(g);
    j["epsilon_per_m"] = g.epsilon();
    j["g_per_m"] = g.taper_g();
    j["g_per_mm"] = g.taper_g() / 1e3;
    j["omega_r_rad_per_s"] = g.omega_r;
    j["omega_z_rad_per_s"] = g.omega_z;
    j["nbar_h"] = e.nbar_h;
    j["nbar_a"] = e.nbar_a;
    j["nbar_b"] = e.nbar_b;
    j["nbar_r_T0"] = trap::planck_occupation(g.omega_r, e.T_0);
    j["nbar_z_T0"] = trap::planck_occupation(g.omega_z, e.T_0);
    j["dt_s"] = a.dt;
    j["dims"] = {{"n_r", cfg.dims.n_r}, {"n_z", cfg.dims.n_z}};
    j["heating"] = {{"period_s", e.heating_period},
                    {"duty", e.heating_duty},
                    {"phase_s", e.heating_phase}};
    man.write_json("params_report.json", j);
}

// ---------------------------------------------------------------------------

void run_fig2(const ScenarioConfig& cfg, const Assembled& a, Manifest& man) {
    const std::array<fock::ModelKind, 4> kinds{
        fock::ModelKind::cm, fock::ModelKind::om, fock::ModelKind::classical,
        fock::ModelKind::sq};
    std::array<std::vector<ScenarioRow>, 4> rows;
    std::array<QuantumRunStats, 4> stats;
    std::array<lindblad::PropagationResult, 4> results;
    const double t_end = cfg.integrator.cycles * cfg.engine.heating_period;

    std::atomic<int> next{0};
    auto work = [&]() {
        for (;;) {
            const int i = next.fetch_add(1);
            if (i >= 4) return;
            const auto kind = kinds[std::size_t(i)];
            const fock::MatrixXcd H = fock::build_hamiltonian(kind, a.hp, cfg.dims);
            const auto rho0 = fock::gibbs_state(H, cfg.dims, cfg.engine.T_0);
            lindblad::Observer obs = [&, i](double t, const fock::MatrixXcd& rho,
                                            const lindblad::StepDiagnostics&) {
                rows[std::size_t(i)].push_back(
                    make_row(t, rho, cfg, &stats[std::size_t(i)]));
            };
            results[std::size_t(i)] = lindblad::propagate(
                kind, a.hp, cfg.dims, rho0.rho, a.baths, 0.0, t_end, a.prop, obs);
        }
    };
    std::vector<std::thread> pool;
    for (int w = 0; w < std::min(a.threads, 4); ++w) pool.emplace_back(work);
    for (auto& t : pool) t.join();

    for (std::size_t i = 0; i < 4; ++i)
        record_run_invariants(man, to_string(kinds[i]), results[i], stats[i], a.prop);

    // Combined four-model table on the shared snapshot grid.
    std::string nz = io::csv_row(std::vector<std::string>{
        "scaled_time", "nz_cm", "nz_om", "nz_class", "nz_sq"});
    for (std::size_t k = 0; k < rows[0].size(); ++k)
        nz += io::csv_row(std::vector<double>{rows[0][k].row.scaled_time,
                                              rows[0][k].row.n_z, rows[1][k].row.n_z,
                                              rows[2][k].row.n_z, rows[3][k].row.n_z});
    man.write_text("fig2_nz.csv", nz);
    for (std::size_t i = 0; i < 4; ++i)
        man.write_text("trace_" + to_string(kinds[i]) + ".csv", trace_csv(rows[i]));

    json summary;
    for (std::size_t i = 0; i < 4; ++i) {
        const auto& rr = rows[i];
        const double period = cfg.engine.heating_period;
        const double t_last = rr.back().row.time_s;
        double late_sum = 0.0, prev_sum = 0.0;
        int late_n = 0, prev_n = 0;
        for (const auto& r : rr) {
            if (r.row.time_s > t_last - period) {
                late_sum += r.row.n_z;
                ++late_n;
            } else if (r.row.time_s > t_last - 2 * period) {
                prev_sum += r.row.n_z;
                ++prev_n;
            }
        }
        json m;
        m["late_cycle_mean_nz"] = late_sum / std::max(1, late_n);
        m["previous_cycle_mean_nz"] = prev_sum / std::max(1, prev_n);
        m["initial_nz"] = rr.front().row.n_z;
        summary[to_string(kinds[i])] = m;
    }
    man.write_json("fig2_summary.json", summary);
}

void run_squeezing(const ScenarioConfig& cfg, const Assembled& a, Manifest& man) {
    const auto kind = fock::ModelKind::cm;
    const fock::MatrixXcd H = fock::build_hamiltonian(kind, a.hp, cfg.dims);
    const auto rho0 = fock::gibbs_state(H, cfg.dims, cfg.engine.T_0);

    std::vector<ScenarioRow> rows;
    QuantumRunStats stats;
    lindblad::Observer obs = [&](double t, const fock::MatrixXcd& rho,
                                 const lindblad::StepDiagnostics&) {
        rows.push_back(make_row(t, rho, cfg, &stats));
    };
    const auto lc = lindblad::run_limit_cycle(kind, a.hp, cfg.dims, rho0.rho, a.baths,
                                              a.cycle, obs);
    record_run_invariants(man, "cm", lc.cycle, stats, a.prop);
    man.add_invariant("cm.limit_cycle_residual", lc.periodicity_residual,
                      a.cycle.residual_tol, lc.converged);
    if (!lc.converged) man.add_warning("limit cycle not converged to residual_tol");

    double min_var = 1e300;
    for (const auto& r : rows)
        min_var = std::min(min_var, std::min(r.row.var_qr, r.row.var_pr));

    // Ehrenfest check of d<n_z>/dt against centered differences on uniformly
    // spaced snapshot triples.
    const double beta = cfg.engine.beta;
    const double kb = cfg.engine.kappa_b, nb = cfg.engine.nbar_b;
    double max_err = 0.0, max_pred = 0.0;
    for (std::size_t i = 1; i + 1 < rows.size(); ++i) {
        const double dl = rows[i].row.time_s - rows[i - 1].row.time_s;
        const double dr = rows[i + 1].row.time_s - rows[i].row.time_s;
        if (std::abs(dl - dr) > 1e-9 * dl) continue;
        const double fd = (rows[i + 1].row.n_z - rows[i - 1].row.n_z) / (dl + dr);
        const double full_moment =
            rows[i].m.corr_qr2_pz + rows[i].m.q_r_sq * rows[i].m.p_z_mean;
        const double pred =
            beta / std::sqrt(2.0) * full_moment - kb * (rows[i].row.n_z - nb);
        max_err = std::max(max_err, std::abs(fd - pred));
        max_pred = std::max(max_pred, std::abs(pred));
    }
    const double rel = max_pred > 0.0 ? max_err / max_pred : 0.0;
    man.add_invariant("cm.ehrenfest_rel_error", rel, 0.01, rel < 0.01);

    man.write_text("trace_cm.csv", trace_csv(rows));
    json summary;
    summary["min_variance"] = min_var;
    summary["squeezing_window"] = min_var < 0.25;
    summary["ehrenfest_max_rel_error"] = rel;
    summary["periodicity_residual"] = lc.periodicity_residual;
    man.write_json("squeezing_summary.json", summary);
}

void run_wigner(const ScenarioConfig& cfg, const Assembled& a, Manifest& man) {
    std::vector<double> betas = cfg.sweep_beta;
    if (betas.empty())
        for (double khz : {10.0, 100.0, 200.0})
            betas.push_back(khz * 1e3 * phys::two_pi);

    struct PhasePoint {
        double beta{};
        double eccentricity{};
        double min_var{};
        obs::WignerGrid grid;
        bool ok{false};
        std::string error;
    };
    std::vector<PhasePoint> points(betas.size());

    std::atomic<std::size_t> next{0};
    auto work = [&]() {
        for (;;) {
            const std::size_t i = next.fetch_add(1);
            if (i >= betas.size()) return;
            PhasePoint& pt = points[i];
            pt.beta = betas[i];
            try {
                fock::HamiltonianParams hp = a.hp;
                hp.beta = betas[i];
                const fock::MatrixXcd H =
                    fock::build_hamiltonian(fock::ModelKind::cm, hp, cfg.dims);
                const auto rho0 = fock::gibbs_state(H, cfg.dims, cfg.engine.T_0);

                fock::MatrixXcd snap;
                double best = 1e300;
                double t_target = 0.0;
                bool have_target = false;
                lindblad::Observer obs = [&](double t, const fock::MatrixXcd& rho,
                                             const lindblad::StepDiagnostics&) {
                    if (!have_target) return;
                    const double d = std::abs(t - t_target);
                    if (d < best) {
                        best = d;
                        snap = rho;
                    }
                };
                lindblad::LimitCycleOptions cyc = a.cycle;
                // The observer needs the recorded window start; run once to get
                // deterministic timing, then capture in a single pass.
                const double period = cfg.engine.heating_period;
                const double warmup = cyc.warmup_override >= 0.0
                                          ? cyc.warmup_override
                                          : (cyc.cycles - 1) * period;
                const double k_start = std::ceil(
                    (warmup - cfg.engine.heating_phase) / period - 1e-9);
                t_target = cfg.engine.heating_phase +
                           std::max(0.0, k_start) * period +
                           cfg.wigner.phase * period;
                have_target = true;
                const auto lc = lindblad::run_limit_cycle(
                    fock::ModelKind::cm, hp, cfg.dims, rho0.rho, a.baths, cyc, obs);
                (void)lc;
                const fock::MatrixXcd rho_a =
                    fock::partial_trace_axial(snap, cfg.dims);
                pt.eccentricity = obs::covariance_eccentricity(rho_a);
                const auto mm = obs::mode_moments(rho_a);
                pt.min_var = std::min(mm.var_q, mm.var_p) / 2.0;
                pt.grid = obs::wigner(
                    rho_a, obs::WignerGridSpec{cfg.wigner.halfwidth, cfg.wigner.points});
                pt.ok = true;
            } catch (const std::exception& e) {
                pt.error = e.what();
            }
        }
    };
    std::vector<std::thread> pool;
    for (int w = 0; w < std::min<int>(a.threads, int(betas.size())); ++w)
        pool.emplace_back(work);
    for (auto& t : pool) t.join();

    std::string ecc = io::csv_row(std::vector<std::string>{
        "beta_khz", "eccentricity", "min_var", "wigner_normalization", "status"});
    for (auto& pt : points) {
        const double khz = pt.beta / phys::two_pi / 1e3;
        char label[32];
        std::snprintf(label, sizeof(label), "%g", khz);
        if (pt.ok) {
            std::string g = "q_p";
            for (double p : pt.grid.p) g += "," + io::format_number(p);
            g += "\r\n";
            for (std::size_t iq = 0; iq < pt.grid.q.size(); ++iq) {
                g += io::format_number(pt.grid.q[iq]);
                for (std::size_t ip = 0; ip < pt.grid.p.size(); ++ip)
                    g += "," + io::format_number(pt.grid.values(int(iq), int(ip)));
                g += "\r\n";
            }
            man.write_text(std::string("wigner_beta_") + label + "khz.csv", g);
            if (!pt.grid.normalization_ok)
                man.add_warning("wigner grid too narrow at beta " +
                                std::string(label) + " kHz");
            ecc += io::csv_row(std::vector<std::string>{
                io::format_number(khz), io::format_number(pt.eccentricity),
                io::format_number(pt.min_var),
                io::format_number(pt.grid.normalization), "ok"});
        } else {
            ecc += io::csv_row(
                std::vector<std::string>{io::format_number(khz), "", "", "", pt.error});
        }
    }
    man.write_text("eccentricity.csv", ecc);
}

otto::RadialCycleTrace
build_radial_trace(const ScenarioConfig& cfg, const Assembled& a,
                   const lindblad::LimitCycleResult& lc,
                   const std::vector<ScenarioRow>& rows,
                   const std::vector<fock::MatrixXcd>& rho_a) {
    otto::RadialCycleTrace trace;
    trace.period = lc.period;
    trace.t_hot_on = lc.t_start;
    trace.t_hot_off = lc.t_start + cfg.engine.heating_duty * lc.period;
    trace.omega_r = cfg.geometry.omega_r;
    trace.omega_z = cfg.geometry.omega_z;
    trace.beta = cfg.engine.beta;
    trace.kappa_r_total = cfg.engine.kappa_a + cfg.engine.kappa_h;
    trace.kappa_a = cfg.engine.kappa_a;
    for (std::size_t i = 0; i < rows.size(); ++i) {
        trace.times.push_back(rows[i].row.time_s);
        trace.q_z.push_back(std::sqrt(2.0) * rows[i].m.q_z_mean);
        trace.rho_radial.push_back(rho_a[i]);
    }
    (void)a;
    return trace;
}

void run_otto(const ScenarioConfig& cfg, const Assembled& a, Manifest& man) {
    const auto kind = fock::ModelKind::cm;
    const fock::MatrixXcd H = fock::build_hamiltonian(kind, a.hp, cfg.dims);
    const auto rho0 = fock::gibbs_state(H, cfg.dims, cfg.engine.T_0);

    std::vector<ScenarioRow> rows;
    std::vector<fock::MatrixXcd> rho_a;
    QuantumRunStats stats;
    lindblad::Observer obs = [&](double t, const fock::MatrixXcd& rho,
                                 const lindblad::StepDiagnostics&) {
        rows.push_back(make_row(t, rho, cfg, &stats));
        rho_a.push_back(fock::partial_trace_axial(rho, cfg.dims));
    };
    const auto lc = lindblad::run_limit_cycle(kind, a.hp, cfg.dims, rho0.rho, a.baths,
                                              a.cycle, obs);
    record_run_invariants(man, "cm", lc.cycle, stats, a.prop);
    man.add_invariant("cm.limit_cycle_residual", lc.periodicity_residual,
                      a.cycle.residual_tol, lc.converged);
    if (!lc.converged) man.add_warning("limit cycle not converged to residual_tol");

    const otto::RadialCycleTrace trace = build_radial_trace(cfg, a, lc, rows, rho_a);
    const otto::CycleRecord rec = otto::extract_cycle(trace);
    if (!rec.warning.empty()) man.add_warning(rec.warning);

    std::string pts = io::csv_row(std::vector<std::string>{
        "time_s", "tau_s", "q_z", "x", "omega_eff_rad_s", "n_c", "U_hbar_wz",
        "T_hbar_wz", "S", "stroke"});
    for (const auto& p : rec.points)
        pts += io::csv_row(std::vector<std::string>{
            io::format_number(p.t), io::format_number(p.t - trace.t_hot_on),
            io::format_number(p.q_z), io::format_number(p.x),
            io::format_number(p.omega_eff), io::format_number(p.n_c),
            io::format_number(p.u_scaled), io::format_number(p.t_eff_scaled),
            io::format_number(p.entropy), otto::to_string(p.stroke)});
    man.write_text("cycle_points.csv", pts);

    std::string uw =
        io::csv_row(std::vector<std::string>{"omega_eff_rad_s", "U_hbar_wz"});
    std::string ts = io::csv_row(std::vector<std::string>{"S", "T_hbar_wz"});
    for (const auto& p : rec.points) {
        uw += io::csv_row(std::vector<double>{p.omega_eff, p.u_scaled});
        ts += io::csv_row(std::vector<double>{p.entropy, p.t_eff_scaled});
    }
    man.write_text("u_omega.csv", uw);
    man.write_text("ts_diagram.csv", ts);
    man.write_text("trace_cm.csv", trace_csv(rows));

    auto stroke_variation = [&](otto::Stroke s) {
        double lo = 1e300, hi = -1e300;
        for (const auto& p : rec.points)
            if (p.stroke == s) {
                lo = std::min(lo, p.omega_eff);
                hi = std::max(hi, p.omega_eff);
            }
        return hi >= lo ? (hi - lo) / (0.5 * (hi + lo)) : 0.0;
    };

    json summary;
    summary["w_net_hbar_omega_z"] = rec.w_net_hbar_omega_z;
    summary["w_net_joules"] = rec.w_net_joules;
    summary["q_in_joules"] = rec.q_in_joules;
    summary["eta"] = rec.eta;
    summary["power_watts"] = rec.power_watts;
    summary["period_s"] = rec.period;
    summary["period_axial_periods"] =
        rec.period * cfg.geometry.omega_z / phys::two_pi;
    summary["periodicity_residual"] = lc.periodicity_residual;
    summary["degenerate"] = rec.degenerate;
    summary["omega_eff_variation_hot_isochore"] =
        stroke_variation(otto::Stroke::hot_isochore);
    summary["omega_eff_variation_cold_isochore"] =
        stroke_variation(otto::Stroke::cold_isochore);
    man.write_json("otto_summary.json", summary);
}

void run_work_sweep(const ScenarioConfig& cfg, const Assembled& a, Manifest& man) {
    std::vector<double> r0s = cfg.sweep_r0;
    if (r0s.empty())
        for (double um : {2.0, 3.0, 5.0, 8.0, 12.0, 20.0}) r0s.push_back(um * 1e-6);

    otto::CycleRunSpec tmpl;
    tmpl.kind = fock::ModelKind::cm;
    tmpl.params = a.hp;
    tmpl.dims = cfg.dims;
    tmpl.baths = a.baths;
    tmpl.cycle = a.cycle;
    tmpl.T_0_kelvin = cfg.engine.T_0;

    const auto rows = otto::work_vs_radius(r0s, cfg.geometry, cfg.engine, tmpl,
                                           otto::StrokeOptions{}, a.threads);

    std::string csv = io::csv_row(std::vector<std::string>{
        "r0_um", "beta_khz", "W_hbar_omega_z", "eta", "status"});
    for (const auto& r : rows)
        csv += io::csv_row(std::vector<std::string>{
            io::format_number(r.r0_m * 1e6),
            io::format_number(r.beta / phys::two_pi / 1e3),
            io::format_number(r.w_hbar_omega_z), io::format_number(r.eta),
            r.ok ? "ok" : r.error});
    man.write_text("work_vs_radius.csv", csv);

    for (const auto& r : rows)
        if (!r.ok) man.add_warning("sweep point r0 = " +
                                   io::format_number(r.r0_m * 1e6) + " um: " + r.error);
}

void run_crossover(const ScenarioConfig& cfg, const Assembled& a, Manifest& man) {
    if (cfg.sweep_beta.empty()) throw ConfigError("sweep axis empty");

    langevin::CrossoverOptions opts;
    opts.dims = cfg.dims;
    opts.cycle = a.cycle;
    opts.trajectories = cfg.ensemble.trajectories;
    opts.warmup_periods = cfg.ensemble.warmup_periods;
    opts.phase_bins = cfg.ensemble.phase_bins;
    opts.classical_dt = cfg.ensemble.dt_factor / cfg.geometry.omega_r;
    opts.seed = cfg.ensemble.seed;
    opts.threads = a.threads;

    const auto rows = langevin::power_crossover_sweep(cfg.sweep_beta, cfg.geometry,
                                                      cfg.engine, opts);

    const double p_unit = phys::hbar * cfg.geometry.omega_z * cfg.geometry.omega_z;
    std::string csv = io::csv_row(std::vector<std::string>{
        "beta_khz", "P_q_w", "P_c_w", "stderr_c_w", "P_q_scaled", "P_c_scaled",
        "stderr_c_scaled", "status"});
    double crossover_khz = -1.0;
    for (const auto& r : rows) {
        const double khz = r.beta / phys::two_pi / 1e3;
        if (r.ok) {
            csv += io::csv_row(std::vector<std::string>{
                io::format_number(khz), io::format_number(r.p_q_w),
                io::format_number(r.p_c_w), io::format_number(r.p_c_stderr_w),
                io::format_number(r.p_q_w / p_unit), io::format_number(r.p_c_w / p_unit),
                io::format_number(r.p_c_stderr_w / p_unit), "ok"});
            if (crossover_khz < 0.0 && r.p_q_w - r.p_c_w > 2.0 * r.p_c_stderr_w)
                crossover_khz = khz;
            char label[32];
            std::snprintf(label, sizeof(label), "%g", khz);
            std::string bins = io::csv_row(std::vector<std::string>{
                "phase_time_s", "nz_mean", "nz_stderr", "p_dis_w", "p_dis_stderr_w"});
            const double bin_dt = r.bins.period / r.bins.bins;
            const double p_scale =
                phys::hbar * cfg.geometry.omega_z * cfg.engine.kappa_b;
            for (int b = 0; b < r.bins.bins; ++b)
                bins += io::csv_row(std::vector<double>{
                    (b + 0.5) * bin_dt, r.bins.nz_mean[std::size_t(b)],
                    r.bins.nz_stderr[std::size_t(b)],
                    p_scale * (r.bins.nz_mean[std::size_t(b)] - cfg.engine.nbar_b),
                    p_scale * r.bins.nz_stderr[std::size_t(b)]});
            man.write_text(std::string("classical_cycle_beta_") + label + "khz.csv",
                           bins);
        } else {
            csv += io::csv_row(std::vector<std::string>{io::format_number(khz), "", "",
                                                        "", "", "", "", r.error});
            man.add_warning("crossover point " + io::format_number(khz) +
                            " kHz: " + r.error);
        }
    }
    man.write_text("crossover.csv", csv);

    json summary;
    summary["crossover_beta_khz_reported"] = crossover_khz;
    summary["note"] = "smallest swept coupling where the quantum maximum exceeds "
                      "the classical one by more than two standard errors";
    man.write_json("crossover_summary.json", summary);
}

} // namespace

int run(const RunOptions& opts) {
    ScenarioConfig cfg;
    json echo;
    try {
        cfg = config::load_config(opts.config_path);
        if (!opts.scenario_override.empty()) cfg.scenario = opts.scenario_override;
        if (!opts.out_override.empty()) cfg.output_dir = opts.out_override;
        if (opts.threads_override > 0) cfg.threads = opts.threads_override;
        if (cfg.scenario.empty()) throw ConfigError("no scenario selected");
        const auto report = config::validate(cfg);
        if (!report.ok()) {
            std::cerr << config::format_report(report);
            return 2;
        }
        for (const auto& w : report.warnings)
            std::cerr << "warning: " << w.field << ": " << w.message << "\n";
        echo = json::parse(io::read_file(opts.config_path));
    } catch (const ConfigError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }

    fs::create_directories(cfg.output_dir);
    Manifest man(cfg.output_dir, cfg.scenario, echo);
    const Assembled a = assemble(cfg);
    write_params_report(cfg, a, man);

    try {
        if (cfg.scenario == "fig2")
            run_fig2(cfg, a, man);
        else if (cfg.scenario == "squeezing")
            run_squeezing(cfg, a, man);
        else if (cfg.scenario == "wigner")
            run_wigner(cfg, a, man);
        else if (cfg.scenario == "otto")
            run_otto(cfg, a, man);
        else if (cfg.scenario == "work-sweep")
            run_work_sweep(cfg, a, man);
        else if (cfg.scenario == "crossover")
            run_crossover(cfg, a, man);
        else
            throw ConfigError("unknown scenario '" + cfg.scenario + "'");
    } catch (const ConfigError& e) {
        std::cerr << "error: " << e.what() << "\n";
        man.finalize("config_error", e.what());
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        man.finalize("invariant_violation", e.what());
        return 3;
    }

    const bool ok = man.all_invariants_pass();
    man.finalize(ok ? "ok" : "invariant_violation",
                 ok ? "" : "monitored invariant out of tolerance");
    return ok ? 0 : 3;
}

int validate_cli(const std::string& config_path) {
    const auto report = config::validate_file(config_path);
    std::cout << config::format_report(report);
    return report.ok() ? 0 : 2;
}

} // namespace ionheat::scenarios
