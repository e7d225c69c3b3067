// run_config.hpp — Declarative run configuration for the floquet-if command line tool

#pragma once

#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "floquet_if/bath.hpp"
#include "floquet_if/embedding.hpp"
#include "floquet_if/system_model.hpp"

namespace floquet::app {

/// All frequencies and times are in units of the tunneling amplitude Omega.
struct BathConfig {
    double alpha = 0.1;
    double omega_c = 2.5;
    double temperature = 0.0;
    int fit_terms = 4;
    double window = 0.0;       ///< 0: automatic
    double sample_step = 0.0;  ///< 0: automatic
};

struct EmbeddingConfig {
    int cutoff = 4;
    int excitation_cap = 3;
    double memory_budget_gib = 3.0;
};

struct SystemConfig {
    std::string preset = "single-spin";  ///< single-spin | two-spin
    double omega = 1.0;
    model::DriveType drive = model::DriveType::transversal;
    double eps_d = 0.0;
    double omega_d = 0.0;
    double phase = 0.0;
    std::string initial_state;  ///< single spin: up | down | plus | minus; two spin: 00 | 01 | 10 | 11
};

struct GridConfig {
    double dt = 0.05;
    long n_steps = 0;  ///< 0: derived from t_final
    double t_final = 30.0;
    double tau_max = 40.0;
    int substeps = 4;
    std::string method = "magnus4";  ///< magnus4 | midpoint
};

struct SweepConfig {
    std::vector<double> omega_d;
    std::vector<double> eps_d;
    std::vector<model::DriveType> drives;
};

struct SteadyConfig {
    std::string method = "automatic";  ///< automatic | spectral | power
    double power_tolerance = 1e-12;
};

struct HeatConfig {
    double omega_max = 10.0;
    int n_omega = 400;
    bool taper = false;
    int n_max = 8;
    double decay_threshold = 1e-4;
    int max_doublings = 3;
};

struct SpectralConfig {
    int scan_points = 200;
    double positivity_tolerance = 1e-6;
};

struct BenchmarkConfig {
    std::vector<double> omega_d{1.5, 10.0};
    double dt_me = 0.01;
};

struct OutputConfig {
    std::string directory = "out";
};

struct CacheConfig {
    std::string path = ".floquet-if-cache";
    bool enable = true;
};

struct RunConfig {
    BathConfig bath;
    EmbeddingConfig embedding;
    SystemConfig system;
    GridConfig grid;
    SweepConfig sweep;
    SteadyConfig steady;
    HeatConfig heat;
    SpectralConfig spectral;
    BenchmarkConfig benchmark;
    OutputConfig output;
    CacheConfig cache;
    int workers = 0;  ///< 0: available cores

    bath::BathSpec bath_spec() const;
    bath::FitOptions fit_options() const;
    embedding::PseudomodeSpec pseudomode_spec() const;
    model::ChannelOptions channel_options() const;
    model::SystemModel system_model(double omega_d, double eps_d) const;
    model::SystemModel system_model() const { return system_model(system.omega_d, system.eps_d); }
    /// Initial density matrix selected by system.initial_state.
    Matrix initial_state() const;
    long quench_steps(double dt) const;
};

/// Parses and validates; errors are InputError naming the offending field (e.g. "bath.alpha").
RunConfig parse_config(const nlohmann::json& doc);
RunConfig load_config(const std::string& path);
/// Fully resolved configuration, defaults included.
nlohmann::json to_json(const RunConfig& config);

}  // namespace floquet::app
