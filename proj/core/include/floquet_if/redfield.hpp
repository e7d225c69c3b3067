// redfield.hpp — Magnus effective model with kick operators and a time-local Redfield propagator

#pragma once

#include <string>
#include <vector>

#include "floquet_if/bath.hpp"
#include "floquet_if/floquet.hpp"
#include "floquet_if/system_model.hpp"

namespace floquet::redfield {

/// First-order Magnus model in the frame that removes a self-commuting drive.
///
/// Lab-frame states follow from rho(t) = K(t) rho_eff(t) K(t)^dagger with
/// K(t) = exp(-i Lambda(t) P), Lambda(t) = (eps/omega_d) sin(omega_d t + phase)
/// and P the drive operator.
struct EffectiveModel {
    Matrix h_eff;          ///< period-averaged rotated static Hamiltonian
    Matrix coupling;       ///< S (unchanged: it commutes with the drive)
    Matrix drive_op;       ///< P; zero when undriven
    double omega = 0.0;    ///< bare tunneling Omega (from the static part, 2|h_01|)
    double omega_eff = 0.0;
    double eps_d = 0.0;
    double omega_d = 0.0;
    double phase = 0.0;

    double lambda(double t) const;
};

struct MagnusOptions {
    int average_points = 512;  ///< uniform samples over one period
};

EffectiveModel magnus_effective_model(const model::SystemModel& model, const MagnusOptions& options = {});

/// exp(-i Lambda(t) P)
Matrix kick_operator(const EffectiveModel& em, double t);

struct RedfieldOptions {
    double trace_tolerance = 1e-6;  ///< cumulative trace drift triggering a step-size error
    int record_every = 1;
};

/// Time-local second-order master equation for H_eff with the bath given by exponential terms.
engine::Trajectory redfield_propagate(const EffectiveModel& em, const bath::ExponentialBathFit& fit, const Matrix& rho0,
                                      double t_final, double dt_me, const RedfieldOptions& options = {});
engine::Trajectory redfield_propagate(const EffectiveModel& em, const bath::BathSpec& bath, const Matrix& rho0,
                                      double t_final, double dt_me, const bath::FitOptions& fit_options = {},
                                      const RedfieldOptions& options = {});

struct ObservableDeviation {
    std::string name;
    double max_abs = 0.0;
    double mean_abs = 0.0;
};

struct TrajectoryComparison {
    std::vector<ObservableDeviation> observables;
    std::size_t points = 0;  ///< samples of the coarser grid inside the common range
    double t_begin = 0.0;
    double t_end = 0.0;
};

/// Deviation of Re tr(O rho) between two trajectories on the coarser grid (linear interpolation of the finer one).
TrajectoryComparison compare_trajectories(const engine::Trajectory& a, const engine::Trajectory& b,
                                          const std::vector<std::pair<std::string, Matrix>>& observables);

}  // namespace floquet::redfield
