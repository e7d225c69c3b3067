// floquet.hpp — Step propagators, stroboscopic Floquet propagator, steady states and quenches

#pragma once

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "floquet_if/embedding.hpp"
#include "floquet_if/linalg.hpp"
#include "floquet_if/system_model.hpp"

namespace floquet::engine {

using embedding::SemiGroupIF;

/// Q_n = post_n q pre_n with system half-step channels acting on the physical leg.
struct StepChannels {
    Matrix pre;   ///< U_sys(t_n - dt/2, t_{n-1})
    Matrix post;  ///< U_sys(t_n, t_n - dt/2)
};

class FloquetPropagator {
public:
    FloquetPropagator(std::shared_ptr<const SemiGroupIF> sg, model::TrotterGrid grid, std::vector<StepChannels> steps);

    const SemiGroupIF& semigroup() const noexcept { return *sg_; }
    std::shared_ptr<const SemiGroupIF> semigroup_ptr() const noexcept { return sg_; }
    const model::TrotterGrid& grid() const noexcept { return grid_; }
    int steps_per_period() const noexcept { return static_cast<int>(steps_.size()); }
    Eigen::Index dimension() const noexcept { return sg_->joint_dimension(); }
    const StepChannels& channels(long n) const;

    /// Q_n x for step n >= 1 (periodic in n).
    Vector apply_step(long n, const Vector& x) const;
    Matrix apply_step(long n, const Matrix& x) const;
    /// y Q_n
    RowVector apply_step_left(const RowVector& y, long n) const;
    /// Dense Q_n.
    Matrix step_matrix(long n) const;
    /// Q_F x = Q_M ... Q_1 x.
    Vector apply_period(const Vector& x) const;

    /// Q_{k+M} ... Q_{k+1}, the period product starting after step k (k = 0 gives Q_F).
    Matrix period_product(int k = 0) const;

    bool has_floquet_matrix() const noexcept { return qf_.size() > 0; }
    const Matrix& floquet_matrix() const;
    const num::EigenDecomposition& spectrum() const;
    bool has_spectrum() const noexcept { return spectrum_.has_value(); }

    /// Forms Q_F (and its eigendecomposition when requested).
    void assemble(bool with_spectrum = true, const num::EigOptions& options = {});

private:
    std::shared_ptr<const SemiGroupIF> sg_;
    model::TrotterGrid grid_;
    std::vector<StepChannels> steps_;
    Matrix qf_;
    std::optional<num::EigenDecomposition> spectrum_;
};

FloquetPropagator assemble_step_propagators(std::shared_ptr<const SemiGroupIF> sg, const model::SystemModel& model,
                                            const model::TrotterGrid& grid, const model::ChannelOptions& options = {});

/// Builds Q_F and its spectrum in place; returns the same propagator for chaining.
FloquetPropagator& assemble_floquet_propagator(FloquetPropagator& fp, const num::EigOptions& options = {});

struct FloquetSpectrum {
    Vector eigenvalues;
    Vector rates;  ///< log(lambda)/T, principal branch (-inf real part for lambda = 0)
    int unit_index = -1;
    double unit_distance = 0.0;
};

FloquetSpectrum floquet_spectrum(const FloquetPropagator& fp, double unit_tolerance = 1e-4);

enum class SteadyStateMethod { automatic, spectral, power };

struct SteadyStateOptions {
    /// Selects the steady state inside a degenerate unit-eigenvalue cluster by spectral projection of
    /// reference ⊗ v_r. Without it, degeneracy raises DegeneracyError.
    std::optional<Matrix> reference;
    SteadyStateMethod method = SteadyStateMethod::automatic;
    double unit_tolerance = 1e-4;     ///< leading eigenvalue must be this close to 1
    double cluster_tolerance = 1e-8;  ///< eigenvalues this close to modulus 1 form the unit cluster
    double power_tolerance = 1e-13;
    int power_max_periods = 200000;
    Eigen::Index spectral_size_limit = 2000;  ///< automatic: power iteration above this dimension
};

struct SteadyState {
    Vector joint;                       ///< normalized so that (tr ⊗ v_l) joint = 1
    Matrix rho;                         ///< stroboscopic reduced state
    std::vector<Matrix> micromotion;    ///< rho(t_1) ... rho(t_M)
    cd leading_eigenvalue = 1.0;
    int cluster_size = 1;
    std::string method;
    double residual = 0.0;  ///< ||Q_F w - w||
};

SteadyState steady_state(const FloquetPropagator& fp, const SteadyStateOptions& options = {});

struct Trajectory {
    std::vector<double> times;
    std::vector<Matrix> states;
};

/// rho_0 ⊗ v_r propagated n_steps steps; states at t_0 ... t_{n_steps}.
Trajectory propagate_quench(const FloquetPropagator& fp, const Matrix& rho0, long n_steps);

struct ObservableInsertion {
    long step = 0;      ///< applied after the n-th step (0: on the initial state)
    Matrix superop;     ///< d^2 x d^2
};

/// tr ⊗ v_l closing of the propagated joint state with insertions.
cd multitime_correlation(const FloquetPropagator& fp, const Matrix& rho0, const std::vector<ObservableInsertion>& insertions);

/// Max-abs trace drift max_n ||(tr ⊗ v_l) Q_n - (tr ⊗ v_l)|| over one period.
double stepwise_trace_drift(const FloquetPropagator& fp);

}  // namespace floquet::engine
