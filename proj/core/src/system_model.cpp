// system_model.cpp — System Hamiltonians, grids and step channels

#include "floquet_if/system_model.hpp"

#include <algorithm>
#include <cmath>

#include "floquet_if/errors.hpp"
#include "floquet_if/linalg.hpp"
#include "floquet_if/operators.hpp"

namespace floquet::model {

DriveType parse_drive_type(const std::string& name) {
    if (name == "none") return DriveType::none;
    if (name == "longitudinal") return DriveType::longitudinal;
    if (name == "transversal") return DriveType::transversal;
    throw InputError("system.drive_type must be one of none|longitudinal|transversal, got '" + name + "'");
}

std::string to_string(DriveType type) {
    switch (type) {
        case DriveType::none: return "none";
        case DriveType::longitudinal: return "longitudinal";
        case DriveType::transversal: return "transversal";
    }
    return "none";
}

void SystemModel::validate() const {
    auto check = [this](const Matrix& m, const char* what) {
        if (m.rows() != d || m.cols() != d) throw DimensionError(std::string(what) + " has the wrong dimension");
        if (!m.allFinite()) throw InputError(std::string(what) + " has non-finite entries");
        if (!ops::is_hermitian(m, 1e-12)) throw InputError(std::string(what) + " is not Hermitian");
    };
    if (d < 1) throw InputError("system dimension must be positive");
    check(h_static, "static Hamiltonian");
    check(coupling, "coupling operator");
    for (const auto& dr : drives) {
        check(dr.op, "drive operator");
        if (!std::isfinite(dr.amplitude) || !std::isfinite(dr.phase)) throw InputError("drive parameters must be finite");
        if (!(dr.frequency > 0.0)) throw InputError("drive frequency must be positive");
    }
    const double base = base_frequency();
    for (const auto& dr : drives) {
        const double ratio = dr.frequency / base;
        if (std::abs(ratio - std::round(ratio)) > 1e-9 * ratio)
            throw InputError("drive frequencies must be integer multiples of a common base frequency");
    }
}

Matrix SystemModel::hamiltonian(double t) const {
    Matrix h = h_static;
    for (const auto& dr : drives) h += dr.amplitude * std::cos(dr.frequency * t + dr.phase) * dr.op;
    return h;
}

double SystemModel::base_frequency() const {
    double base = 0.0;
    for (const auto& dr : drives) base = base == 0.0 ? dr.frequency : std::min(base, dr.frequency);
    return base;
}

bool SystemModel::time_dependent() const {
    return std::any_of(drives.begin(), drives.end(), [](const DriveTerm& d) { return d.amplitude != 0.0; });
}

SystemModel single_spin(double omega, DriveType drive, double eps_d, double omega_d, double phase) {
    SystemModel m;
    m.d = 2;
    m.h_static = 0.5 * omega * ops::pauli_x();
    m.coupling = ops::pauli_z();
    if (drive != DriveType::none) {
        DriveTerm dr;
        dr.amplitude = eps_d;
        dr.frequency = omega_d;
        dr.phase = phase;
        dr.op = drive == DriveType::longitudinal ? ops::pauli_x() : ops::pauli_z();
        m.drives.push_back(dr);
    }
    return m;
}

SystemModel two_spin(double omega, double eps_d, double omega_d, double phase) {
    SystemModel m;
    m.d = 4;
    const Matrix sx = ops::on_qubit_a(ops::pauli_x()) + ops::on_qubit_b(ops::pauli_x());
    m.h_static = 0.5 * omega * sx;
    m.coupling = 0.5 * (ops::on_qubit_a(ops::pauli_z()) + ops::on_qubit_b(ops::pauli_z()));
    if (omega_d > 0.0) {
        DriveTerm dr;
        dr.amplitude = 0.5 * eps_d;
        dr.frequency = omega_d;
        dr.phase = phase;
        dr.op = sx;
        m.drives.push_back(dr);
    }
    return m;
}

// ---------------------------------------------------------------------------

void TrotterGrid::validate() const {
    if (!(dt > 0.0)) throw InputError("grid time step must be positive");
    if (steps_per_period < 1) throw InputError("grid must have at least one step per period");
    if (std::abs(period - steps_per_period * dt) > 1e-12 * std::max(1.0, period))
        throw ConsistencyError("grid period differs from M dt");
}

TrotterGrid TrotterGrid::for_drive(double omega_d, double dt_target) {
    if (!(omega_d > 0.0)) throw InputError("drive frequency must be positive");
    if (!(dt_target > 0.0)) throw InputError("target time step must be positive");
    TrotterGrid g;
    g.period = 2.0 * kPi / omega_d;
    g.steps_per_period = std::max(2, static_cast<int>(std::lround(g.period / dt_target)));
    g.dt = g.period / g.steps_per_period;
    return g;
}

TrotterGrid TrotterGrid::undriven(double dt) {
    if (!(dt > 0.0)) throw InputError("time step must be positive");
    return {dt, 1, dt};
}

TrotterGrid TrotterGrid::for_model(const SystemModel& model, double dt_target) {
    const double base = model.base_frequency();
    return base > 0.0 ? for_drive(base, dt_target) : undriven(dt_target);
}

// ---------------------------------------------------------------------------

Matrix system_propagator(const SystemModel& model, double t_i, double t_f, const ChannelOptions& options) {
    if (!(t_f >= t_i)) throw InputError("system_propagator requires t_f >= t_i");
    if (options.substeps < 1) throw InputError("substeps must be >= 1");
    const Eigen::Index d = model.d;
    if (t_f == t_i) return Matrix::Identity(d, d);
    if (!model.time_dependent()) return num::matrix_exponential(-kI * (t_f - t_i) * model.h_static);

    const double h = (t_f - t_i) / options.substeps;
    Matrix u = Matrix::Identity(d, d);
    for (int s = 0; s < options.substeps; ++s) {
        const double t0 = t_i + s * h;
        Matrix omega;
        if (options.method == PropagatorMethod::midpoint) {
            omega = -kI * h * model.hamiltonian(t0 + 0.5 * h);
        } else {
            // Fourth-order Magnus step on the two Gauss-Legendre nodes.
            const double c = std::sqrt(3.0) / 6.0;
            const Matrix h1 = model.hamiltonian(t0 + (0.5 - c) * h);
            const Matrix h2 = model.hamiltonian(t0 + (0.5 + c) * h);
            omega = -kI * (0.5 * h) * (h1 + h2) - (std::sqrt(3.0) / 12.0) * h * h * (h2 * h1 - h1 * h2);
        }
        u = num::matrix_exponential(omega) * u;
    }
    return u;
}

Matrix system_step_channel(const SystemModel& model, double t_i, double t_f, const ChannelOptions& options) {
    return ops::unitary_channel(system_propagator(model, t_i, t_f, options));
}

}  // namespace floquet::model
