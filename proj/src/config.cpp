#include "ionheat/config.hpp"
#include "ionheat/constants.hpp"
#include "ionheat/errors.hpp"

#include <json.hpp>

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

namespace ionheat::config {

namespace {

using nlohmann::json;

constexpr double pi = phys::two_pi / 2.0;

// Tracks consumed keys so typos surface as errors instead of silent defaults.
struct Block {
    const json& j;
    std::string name;
    std::set<std::string> seen;

    bool has(const std::string& key) {
        if (j.contains(key)) {
            seen.insert(key);
            return true;
        }
        return false;
    }
    double number(const std::string& key, double fallback) {
        if (!has(key)) return fallback;
        if (!j.at(key).is_number())
            throw ConfigError(name + "." + key + ": expected a number");
        return j.at(key).get<double>();
    }
    double required(const std::string& key) {
        if (!has(key)) throw ConfigError(name + "." + key + ": missing required key");
        if (!j.at(key).is_number())
            throw ConfigError(name + "." + key + ": expected a number");
        return j.at(key).get<double>();
    }
    void finish() const {
        for (auto it = j.begin(); it != j.end(); ++it)
            if (!seen.count(it.key()))
                throw ConfigError(name + "." + it.key() + ": unknown key");
    }
};

std::vector<double> number_list(const json& j, const std::string& field) {
    if (!j.is_array()) throw ConfigError(field + ": expected an array of numbers");
    std::vector<double> out;
    for (const auto& v : j) {
        if (!v.is_number()) throw ConfigError(field + ": expected numbers");
        out.push_back(v.get<double>());
    }
    return out;
}

} // namespace

ScenarioConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file '" + path + "'");
    json root;
    try {
        in >> root;
    } catch (const std::exception& e) {
        throw ConfigError("config parse error in '" + path + "': " + e.what());
    }
    if (!root.is_object()) throw ConfigError("config root must be a JSON object");

    ScenarioConfig cfg;
    std::set<std::string> top_seen;
    auto top = [&](const std::string& key) -> const json* {
        if (root.contains(key)) {
            top_seen.insert(key);
            return &root.at(key);
        }
        return nullptr;
    };

    if (const json* j = top("scenario")) {
        if (!j->is_string()) throw ConfigError("scenario: expected a string");
        cfg.scenario = j->get<std::string>();
    }
    if (const json* j = top("output_dir")) {
        if (!j->is_string()) throw ConfigError("output_dir: expected a string");
        cfg.output_dir = j->get<std::string>();
    }
    if (const json* j = top("threads")) {
        if (!j->is_number_integer()) throw ConfigError("threads: expected an integer");
        cfg.threads = j->get<int>();
    }

    const json* jt = top("trap");
    if (!jt || !jt->is_object()) throw ConfigError("trap: missing required block");
    {
        Block b{*jt, "trap", {}};
        cfg.geometry.theta = b.required("theta_deg") * pi / 180.0;
        cfg.geometry.r0 = b.required("r0_um") * 1e-6;
        cfg.geometry.mass = b.required("mass_u") * phys::atomic_mass_unit;
        cfg.geometry.omega_r = b.required("omega_r_hz") * phys::two_pi;
        cfg.geometry.omega_z = b.required("omega_z_hz") * phys::two_pi;
        b.finish();
    }

    const json* je = top("engine");
    if (!je || !je->is_object()) throw ConfigError("engine: missing required block");
    {
        Block b{*je, "engine", {}};
        const double T_h = b.required("T_h_uK") * 1e-6;
        const double T_a = b.required("T_a_uK") * 1e-6;
        const double T_b = b.required("T_b_uK") * 1e-6;
        const double T_0 = b.required("T_0_uK") * 1e-6;
        const double kappa_a = b.required("kappa_a_khz") * 1e3 * phys::two_pi;
        const double kappa_h = b.required("kappa_h_khz") * 1e3 * phys::two_pi;
        const double kappa_b = b.required("kappa_b_khz") * 1e3 * phys::two_pi;

        double period = b.number("heating_period_s", -1.0);
        if (period <= 0.0) {
            const double axial = b.number("heating_period_axial", 2.0);
            period = axial * phys::two_pi / cfg.geometry.omega_z;
        }
        const double duty = b.number("heating_duty", 0.5);
        const double phase = b.number("heating_phase_s", 0.0);

        cfg.engine = trap::derive_engine_params(cfg.geometry, T_h, T_a, T_b, T_0,
                                                kappa_a, kappa_h, kappa_b, period,
                                                duty, phase);
        if (b.has("beta_khz")) {
            cfg.engine.beta = je->at("beta_khz").get<double>() * 1e3 * phys::two_pi;
            cfg.beta_overridden = true;
        }
        if (b.has("nbar_h")) cfg.engine.nbar_h = je->at("nbar_h").get<double>();
        if (b.has("nbar_a")) cfg.engine.nbar_a = je->at("nbar_a").get<double>();
        if (b.has("nbar_b")) cfg.engine.nbar_b = je->at("nbar_b").get<double>();
        b.finish();
    }

    if (const json* j = top("fock")) {
        Block b{*j, "fock", {}};
        cfg.dims.n_r = int(b.number("n_r", 12));
        cfg.dims.n_z = int(b.number("n_z", 16));
        b.finish();
    }

    if (const json* j = top("integrator")) {
        Block b{*j, "integrator", {}};
        cfg.integrator.dt_factor = b.number("dt_factor", cfg.integrator.dt_factor);
        cfg.integrator.dt_s = b.number("dt_s", cfg.integrator.dt_s);
        cfg.integrator.cycles = int(b.number("cycles", cfg.integrator.cycles));
        cfg.integrator.warmup_s = b.number("warmup_s", cfg.integrator.warmup_s);
        cfg.integrator.snapshot_stride =
            int(b.number("snapshot_stride", cfg.integrator.snapshot_stride));
        cfg.integrator.positivity_stride =
            int(b.number("positivity_stride", cfg.integrator.positivity_stride));
        cfg.integrator.residual_tol =
            b.number("residual_tol", cfg.integrator.residual_tol);
        b.finish();
    }

    if (const json* j = top("ensemble")) {
        Block b{*j, "ensemble", {}};
        cfg.ensemble.trajectories =
            int(b.number("trajectories", cfg.ensemble.trajectories));
        if (b.has("seed"))
            cfg.ensemble.seed = j->at("seed").get<std::uint64_t>();
        cfg.ensemble.dt_factor = b.number("dt_factor", cfg.ensemble.dt_factor);
        cfg.ensemble.record_stride =
            int(b.number("record_stride", cfg.ensemble.record_stride));
        cfg.ensemble.phase_bins = int(b.number("phase_bins", cfg.ensemble.phase_bins));
        cfg.ensemble.warmup_periods =
            int(b.number("warmup_periods", cfg.ensemble.warmup_periods));
        b.finish();
    }

    if (const json* j = top("sweep")) {
        if (!j->is_object()) throw ConfigError("sweep: expected an object");
        for (auto it = j->begin(); it != j->end(); ++it) {
            if (it.key() == "beta_khz") {
                for (double v : number_list(it.value(), "sweep.beta_khz"))
                    cfg.sweep_beta.push_back(v * 1e3 * phys::two_pi);
            } else if (it.key() == "r0_um") {
                for (double v : number_list(it.value(), "sweep.r0_um"))
                    cfg.sweep_r0.push_back(v * 1e-6);
            } else {
                throw ConfigError("sweep." + it.key() + ": unknown key");
            }
        }
    }

    if (const json* j = top("wigner")) {
        Block b{*j, "wigner", {}};
        cfg.wigner.halfwidth = b.number("halfwidth", cfg.wigner.halfwidth);
        cfg.wigner.points = int(b.number("points", cfg.wigner.points));
        cfg.wigner.phase = b.number("phase", cfg.wigner.phase);
        b.finish();
    }

    for (auto it = root.begin(); it != root.end(); ++it)
        if (!top_seen.count(it.key()))
            throw ConfigError(it.key() + ": unknown top-level key");
    return cfg;
}

ValidationReport validate(const ScenarioConfig& cfg) {
    ValidationReport rep;
    auto error = [&](const std::string& field, const std::string& msg) {
        rep.errors.push_back({field, msg});
    };
    auto warn = [&](const std::string& field, const std::string& msg) {
        rep.warnings.push_back({field, msg});
    };

    try {
        cfg.geometry.validate();
    } catch (const std::exception& e) {
        error("trap", e.what());
        return rep;
    }

    const auto& p = cfg.engine;
    if (!(p.beta < cfg.geometry.omega_r))
        error("engine.beta", "beta must be smaller than the radial frequency");
    if (!(p.kappa_a > 0.0 && p.kappa_h > 0.0 && p.kappa_b > 0.0))
        error("engine", "all rates must be positive");
    if (!(p.T_h > 0.0 && p.T_a > 0.0 && p.T_b > 0.0 && p.T_0 > 0.0))
        error("engine", "all temperatures must be positive");
    if (!(p.heating_duty > 0.0 && p.heating_duty < 1.0))
        error("engine.heating_duty", "duty must lie in the open interval (0, 1)");
    if (!(p.heating_period > 0.0))
        error("engine.heating_period", "period must be positive");

    // Planck consistency of each (T, nbar) pair.
    struct Pair {
        const char* name;
        double nbar, omega, T;
    } pairs[] = {{"nbar_h", p.nbar_h, cfg.geometry.omega_r, p.T_h},
                 {"nbar_a", p.nbar_a, cfg.geometry.omega_r, p.T_a},
                 {"nbar_b", p.nbar_b, cfg.geometry.omega_z, p.T_b}};
    for (const auto& q : pairs) {
        if (!(q.T > 0.0)) continue;
        const double ref = trap::planck_occupation(q.omega, q.T);
        if (std::abs(q.nbar - ref) > 0.05 * std::max(ref, 1e-12))
            error(std::string("engine.") + q.name,
                  "inconsistent with the Planck distribution at the stated temperature");
    }

    try {
        cfg.dims.validate();
    } catch (const std::exception& e) {
        error("fock", e.what());
    }

    // Truncation sanity: thermal weight of the first excluded level under the
    // steady bath-driven occupations must stay below 1e-3.
    if (rep.errors.empty()) {
        const double nbar_r_steady =
            (p.kappa_a * p.nbar_a + p.kappa_h * p.nbar_h) / (p.kappa_a + p.kappa_h);
        auto excluded_weight = [](double nbar, int levels) {
            if (nbar <= 0.0) return 0.0;
            const double x = nbar / (nbar + 1.0);
            return (1.0 - x) * std::pow(x, double(levels));
        };
        const double w_r = excluded_weight(nbar_r_steady, cfg.dims.n_r);
        const double w_z = excluded_weight(p.nbar_b, cfg.dims.n_z);
        if (w_r >= 1e-3)
            error("fock.n_r", "steady-state thermal weight of the first excluded "
                              "radial level reaches " +
                                  std::to_string(w_r));
        if (w_z >= 1e-3)
            error("fock.n_z", "steady-state thermal weight of the first excluded "
                              "axial level reaches " +
                                  std::to_string(w_z));
        const double w_z0 =
            excluded_weight(trap::planck_occupation(cfg.geometry.omega_z, p.T_0),
                            cfg.dims.n_z);
        if (w_z0 >= 5e-2)
            warn("fock.n_z", "initial thermal state has a sizable truncated tail; "
                             "verify with the truncation-convergence check");
    }

    // Integrator stability bounds.
    const double dt = cfg.integrator.dt_s > 0.0
                          ? cfg.integrator.dt_s
                          : cfg.integrator.dt_factor / cfg.geometry.omega_r;
    if (!(dt > 0.0) || dt * cfg.geometry.omega_r > 0.05 + 1e-12)
        error("integrator.dt", "RK4 stability bound requires dt <= 0.05/omega_r");
    if (cfg.ensemble.dt_factor <= 0.0 || cfg.ensemble.dt_factor > 0.05 + 1e-12)
        error("ensemble.dt_factor", "Euler-Maruyama bound requires dt*omega_r <= 0.05");

    static const std::set<std::string> known = {"fig2",  "squeezing", "wigner",
                                                "otto",  "work-sweep", "crossover"};
    if (!cfg.scenario.empty() && !known.count(cfg.scenario))
        error("scenario", "unknown scenario '" + cfg.scenario + "'");

    return rep;
}

ValidationReport validate_file(const std::string& path) {
    try {
        return validate(load_config(path));
    } catch (const std::exception& e) {
        ValidationReport rep;
        rep.errors.push_back({"config", e.what()});
        return rep;
    }
}

std::string format_report(const ValidationReport& report) {
    std::ostringstream out;
    for (const auto& e : report.errors)
        out << "error: " << e.field << ": " << e.message << "\n";
    for (const auto& w : report.warnings)
        out << "warning: " << w.field << ": " << w.message << "\n";
    if (report.ok()) out << "all checks passed\n";
    return out.str();
}

} // namespace ionheat::config
