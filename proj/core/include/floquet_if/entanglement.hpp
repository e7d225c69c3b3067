// entanglement.hpp — Two-qubit concurrence, concurrence maps and spectral mode analysis

#pragma once

#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "floquet_if/floquet.hpp"

namespace floquet::obs {

/// Wootters concurrence of a two-qubit state.
///
/// Negative eigenvalues down to -clip_tolerance are clipped (and the state
/// renormalized); anything more negative or non-Hermitian is rejected.
double concurrence(const Matrix& rho, double clip_tolerance = 1e-6);

/// Supplies the semi-group IF for a given step; implementations may cache.
using IfProvider = std::function<std::shared_ptr<const embedding::SemiGroupIF>(double dt)>;
/// Builds the system model for one (omega_d, eps_d) grid point.
using ModelFactory = std::function<model::SystemModel(double omega_d, double eps_d)>;

struct ConcurrenceMapOptions {
    double dt_target = 0.05;
    int workers = 1;
    model::ChannelOptions channels;
    engine::SteadyStateOptions steady;  ///< reference defaults to |00><00|
};

struct ConcurrencePoint {
    double omega_d = 0.0;
    double eps_d = 0.0;
    double value = 0.0;  ///< period-averaged concurrence; NaN when flagged
    bool ok = false;
    std::string flag;    ///< empty or the failure diagnostic
    double dt = 0.0;
    int steps_per_period = 0;
};

struct ConcurrenceMap {
    std::vector<double> omega_d;
    std::vector<double> eps_d;
    std::vector<ConcurrencePoint> points;  ///< row-major over (eps_d, omega_d)

    const ConcurrencePoint& at(std::size_t i_eps, std::size_t i_omega) const {
        return points[i_eps * omega_d.size() + i_omega];
    }
};

/// Period average of the concurrence over the M micromotion states of the steady state.
double period_averaged_concurrence(const engine::SteadyState& ss);

/// Steady-state concurrence at a single grid point (the unit of work of the map).
ConcurrencePoint concurrence_point(const ModelFactory& factory, const IfProvider& provider, double omega_d, double eps_d,
                                   const ConcurrenceMapOptions& options);

ConcurrenceMap concurrence_map(const ModelFactory& factory, const IfProvider& provider,
                               const std::vector<double>& omega_d, const std::vector<double>& eps_d,
                               const ConcurrenceMapOptions& options = {});

struct SpectralMode {
    cd eigenvalue;       ///< z_n of Q_1
    cd rate;             ///< gamma_n = log(z_n) / dt
    Matrix rho;          ///< reduced mode rho_n (overlap-weighted)
    double weight = 0.0; ///< max-abs entry of rho_n
    double condition = 1.0;
    double max_concurrence = 0.0;  ///< of rho_1 + s(rho_n e^{gamma t} + h.c.); NaN if not scanned
    double scale = 1.0;            ///< smallest positivity rescale applied during the scan
    bool scanned = false;
};

struct SpectralAnalysisOptions {
    Matrix reference;              ///< empty: |0...0><0...0|
    double unit_tolerance = 1e-6;  ///< |gamma| below this joins the steady cluster
    double weight_floor = 1e-10;   ///< modes with smaller rho_n are not scanned
    int scan_points = 200;
    double positivity_tolerance = 1e-6;
    int bisection_steps = 40;
    double decay_scan_factor = 5.0;  ///< scan window for real rates: factor / |Re gamma|
    double mode_condition_limit = 1e8;
    bool scan_concurrence = true;
};

struct SpectralAnalysis {
    double dt = 0.0;
    std::vector<SpectralMode> modes;  ///< eigenvalue order of Q_1
    std::vector<int> steady_cluster;  ///< indices with gamma ~ 0
    Matrix rho_steady;                ///< rho_1 (sum over the cluster)
    int skipped_ill_conditioned = 0;
    double condition_number = 1.0;

    /// sum_n rho_n e^{gamma_n t}
    Matrix reconstruct(double t) const;
};

/// Eigenmode decomposition of the undriven one-step propagator.
SpectralAnalysis spectral_analysis(const engine::FloquetPropagator& undriven, const SpectralAnalysisOptions& options = {});

}  // namespace floquet::obs
