// system_model.hpp — Driven system Hamiltonians, Trotter grids and unitary step channels

#pragma once

#include <string>
#include <vector>

#include "floquet_if/types.hpp"

namespace floquet::model {

enum class DriveType { none, longitudinal, transversal };

DriveType parse_drive_type(const std::string& name);
std::string to_string(DriveType type);

/// amplitude * cos(frequency * t + phase) * op
struct DriveTerm {
    double amplitude = 0.0;
    double frequency = 0.0;
    double phase = 0.0;
    Matrix op;
};

struct SystemModel {
    Eigen::Index d = 2;
    Matrix h_static;
    std::vector<DriveTerm> drives;
    Matrix coupling;  ///< S

    /// Hermiticity of every operator and commensurability of the drive frequencies.
    void validate() const;
    Matrix hamiltonian(double t) const;
    /// Smallest drive frequency (0 when undriven); every drive is an integer multiple of it.
    double base_frequency() const;
    bool time_dependent() const;
};

/// (Omega/2) sigma_x + drive, S = sigma_z. Longitudinal drive: eps cos(wd t + phase) sigma_x;
/// transversal drive: eps cos(wd t + phase) sigma_z.
SystemModel single_spin(double omega, DriveType drive, double eps_d, double omega_d, double phase = 0.0);
/// (Omega/2)(sx_A + sx_B) + (eps/2) cos(wd t + phase)(sx_A + sx_B), S = (sz_A + sz_B)/2.
SystemModel two_spin(double omega, double eps_d, double omega_d, double phase = 0.0);

/// Uniform stroboscopic grid with T = M dt.
struct TrotterGrid {
    double dt = 0.0;
    int steps_per_period = 1;  ///< M
    double period = 0.0;       ///< T; equals dt for undriven grids

    double time(long n) const { return static_cast<double>(n) * dt; }
    void validate() const;

    /// M = round(2 pi / (omega_d dt_target)) (at least 2), dt = 2 pi / (omega_d M).
    static TrotterGrid for_drive(double omega_d, double dt_target);
    /// Undriven dynamics: a single step per "period".
    static TrotterGrid undriven(double dt);
    /// Grid for the model's base frequency, or an undriven grid.
    static TrotterGrid for_model(const SystemModel& model, double dt_target);
};

enum class PropagatorMethod { magnus4, midpoint };

struct ChannelOptions {
    PropagatorMethod method = PropagatorMethod::magnus4;
    int substeps = 4;  ///< per interval handed to system_propagator
};

/// Time-ordered exp(-i int H) over [t_i, t_f].
Matrix system_propagator(const SystemModel& model, double t_i, double t_f, const ChannelOptions& options = {});
/// Vectorized U ⊗ U* for the interval [t_i, t_f].
Matrix system_step_channel(const SystemModel& model, double t_i, double t_f, const ChannelOptions& options = {});

}  // namespace floquet::model
