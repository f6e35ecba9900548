// config.hpp — Scenario configuration: JSON with explicit SI-unit key suffixes
//
// All user-facing frequencies are ordinary frequencies (Hz/kHz) and are
// converted to angular quantities internally, matching how experimental
// parameters are usually quoted (omega/2pi). See README for the schema.

#pragma once

#include "ionheat/fock.hpp"
#include "ionheat/trap.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace ionheat::config {

struct IntegratorConfig {
    double dt_factor{0.05}; // dt = dt_factor / omega_r
    double dt_s{-1.0};      // explicit override when > 0
    int cycles{6};
    double warmup_s{-1.0};  // >= 0 overrides the (cycles-1)-period transient
    int snapshot_stride{8};
    int positivity_stride{50};
    double residual_tol{1e-4};
};

struct EnsembleConfig {
    int trajectories{10000};
    std::uint64_t seed{20260810};
    double dt_factor{2e-3}; // dt = dt_factor / omega_r
    int record_stride{64};
    int phase_bins{32};
    int warmup_periods{3};
};

struct WignerConfig {
    double halfwidth{6.0};
    int points{121};
    double phase{0.98}; // cycle fraction at which snapshots are taken
};

struct ScenarioConfig {
    std::string scenario;
    std::string output_dir{"out"};
    trap::TrapGeometry geometry{};
    trap::EngineParams engine{};
    bool beta_overridden{false};
    fock::FockDims dims{12, 16};
    IntegratorConfig integrator{};
    EnsembleConfig ensemble{};
    std::vector<double> sweep_beta; // rad/s
    std::vector<double> sweep_r0;   // m
    WignerConfig wigner{};
    int threads{0}; // 0 = hardware concurrency
};

// Parses and unit-converts; throws ConfigError with field-level context.
ScenarioConfig load_config(const std::string& path);

struct ValidationIssue {
    std::string field;
    std::string message;
};

struct ValidationReport {
    std::vector<ValidationIssue> errors;
    std::vector<ValidationIssue> warnings;
    bool ok() const { return errors.empty(); }
};

// Static checks only (no physics): beta < omega_r, Planck consistency,
// truncation sanity, dt stability bounds, duty range.
ValidationReport validate(const ScenarioConfig& cfg);

// Parse + validate; parse failures come back as a report with one error.
ValidationReport validate_file(const std::string& path);

std::string format_report(const ValidationReport& report);

} // namespace ionheat::config
