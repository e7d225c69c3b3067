// floquet.cpp — Trotterized step propagators and stroboscopic Floquet analysis

#include "floquet_if/floquet.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "floquet_if/errors.hpp"
#include "floquet_if/operators.hpp"

namespace floquet::engine {

FloquetPropagator::FloquetPropagator(std::shared_ptr<const SemiGroupIF> sg, model::TrotterGrid grid,
                                     std::vector<StepChannels> steps)
    : sg_(std::move(sg)), grid_(grid), steps_(std::move(steps)) {
    if (!sg_) throw InputError("FloquetPropagator needs a semi-group IF");
    if (steps_.empty()) throw InputError("FloquetPropagator needs at least one step");
}

const StepChannels& FloquetPropagator::channels(long n) const {
    if (n < 1) throw InputError("step index must be >= 1");
    return steps_[static_cast<std::size_t>((n - 1) % static_cast<long>(steps_.size()))];
}

Vector FloquetPropagator::apply_step(long n, const Vector& x) const {
    const auto& ch = channels(n);
    Vector y = num::apply_lifted(ch.pre, x, sg_->chi);
    Vector z = sg_->q * y;
    return num::apply_lifted(ch.post, z, sg_->chi);
}

Matrix FloquetPropagator::apply_step(long n, const Matrix& x) const {
    const auto& ch = channels(n);
    Matrix y = num::apply_lifted(ch.pre, x, sg_->chi);
    Matrix z = sg_->q * y;
    return num::apply_lifted(ch.post, z, sg_->chi);
}

RowVector FloquetPropagator::apply_step_left(const RowVector& y, long n) const {
    const auto& ch = channels(n);
    RowVector a = num::apply_lifted_right(y, ch.post, sg_->chi);
    RowVector b = a * sg_->q;
    return num::apply_lifted_right(b, ch.pre, sg_->chi);
}

Matrix FloquetPropagator::step_matrix(long n) const {
    return apply_step(n, Matrix(Matrix::Identity(dimension(), dimension())));
}

Vector FloquetPropagator::apply_period(const Vector& x) const {
    Vector w = x;
    for (int n = 1; n <= steps_per_period(); ++n) w = apply_step(n, w);
    return w;
}

Matrix FloquetPropagator::period_product(int k) const {
    Matrix x = Matrix::Identity(dimension(), dimension());
    for (int j = k + 1; j <= k + steps_per_period(); ++j) x = apply_step(j, x);
    return x;
}

const Matrix& FloquetPropagator::floquet_matrix() const {
    if (qf_.size() == 0) throw ConsistencyError("Floquet propagator has not been assembled");
    return qf_;
}

const num::EigenDecomposition& FloquetPropagator::spectrum() const {
    if (!spectrum_) throw ConsistencyError("Floquet spectrum has not been computed");
    return *spectrum_;
}

void FloquetPropagator::assemble(bool with_spectrum, const num::EigOptions& options) {
    qf_ = period_product(0);
    if (with_spectrum) spectrum_ = num::eig_general(qf_, options);
}

FloquetPropagator assemble_step_propagators(std::shared_ptr<const SemiGroupIF> sg, const model::SystemModel& model,
                                            const model::TrotterGrid& grid, const model::ChannelOptions& options) {
    model.validate();
    grid.validate();
    if (!sg) throw InputError("missing semi-group IF");
    if (sg->d != model.d) throw DimensionError("IF and system model dimensions differ");
    if (std::abs(sg->dt - grid.dt) > 1e-12 * grid.dt)
        throw InputError("IF time step " + std::to_string(sg->dt) + " differs from grid time step " +
                         std::to_string(grid.dt));
    const double base = model.base_frequency();
    if (base > 0.0 && grid.steps_per_period > 1 && std::abs(grid.period - 2.0 * kPi / base) > 1e-12 * grid.period)
        throw InputError("grid period does not match the drive period");

    std::vector<StepChannels> steps;
    steps.reserve(static_cast<std::size_t>(grid.steps_per_period));
    for (int n = 1; n <= grid.steps_per_period; ++n) {
        const double tn = grid.time(n), mid = tn - 0.5 * grid.dt, prev = grid.time(n - 1);
        steps.push_back({model::system_step_channel(model, prev, mid, options),
                         model::system_step_channel(model, mid, tn, options)});
    }
    return FloquetPropagator(std::move(sg), grid, std::move(steps));
}

FloquetPropagator& assemble_floquet_propagator(FloquetPropagator& fp, const num::EigOptions& options) {
    fp.assemble(true, options);
    return fp;
}

FloquetSpectrum floquet_spectrum(const FloquetPropagator& fp, double unit_tolerance) {
    const auto& dec = fp.spectrum();
    FloquetSpectrum out;
    out.eigenvalues = dec.values;
    out.rates.resize(dec.values.size());
    const double T = fp.grid().period;
    double best = INFINITY;
    for (Eigen::Index i = 0; i < dec.values.size(); ++i) {
        const cd z = dec.values(i);
        out.rates(i) = std::abs(z) > 0.0 ? std::log(z) / T : cd(-INFINITY, 0.0);
        const double dist = std::abs(z - 1.0);
        if (dist < best) {
            best = dist;
            out.unit_index = static_cast<int>(i);
        }
    }
    out.unit_distance = best;
    if (!(best <= unit_tolerance)) {
        std::ostringstream os;
        os << "Floquet spectrum has no eigenvalue within " << unit_tolerance << " of 1 (closest at distance " << best
           << "); trace preservation is broken";
        throw ConsistencyError(os.str());
    }
    return out;
}

namespace {

Matrix default_reference(Eigen::Index d) {
    return Matrix::Identity(d, d) / static_cast<double>(d);
}

void fill_micromotion(const FloquetPropagator& fp, SteadyState& ss) {
    const auto& sg = fp.semigroup();
    ss.rho = sg.reduce(ss.joint);
    ss.micromotion.clear();
    Vector w = ss.joint;
    for (int n = 1; n <= fp.steps_per_period(); ++n) {
        w = fp.apply_step(n, w);
        ss.micromotion.push_back(sg.reduce(w));
    }
    ss.residual = (w - ss.joint).cwiseAbs().maxCoeff();
}

SteadyState power_steady_state(const FloquetPropagator& fp, const SteadyStateOptions& options) {
    const auto& sg = fp.semigroup();
    const RowVector tf = sg.trace_functional();
    Vector w = sg.embed(options.reference ? *options.reference : default_reference(sg.d));
    SteadyState ss;
    ss.method = "power";
    for (int it = 0; it < options.power_max_periods; ++it) {
        Vector next = fp.apply_period(w);
        const cd norm = (tf * next)(0, 0);
        if (std::abs(norm) < 1e-300) throw ConsistencyError("power iteration lost the trace of the joint state");
        next /= norm;
        const double change = (next - w).cwiseAbs().maxCoeff();
        w = std::move(next);
        if (change <= options.power_tolerance) {
            ss.joint = w;
            ss.leading_eigenvalue = norm;
            fill_micromotion(fp, ss);
            return ss;
        }
    }
    throw ConvergenceError("steady state power iteration did not converge within " +
                           std::to_string(options.power_max_periods) + " periods");
}

SteadyState spectral_steady_state(const FloquetPropagator& fp, const num::EigenDecomposition& dec,
                                  const SteadyStateOptions& options) {
    const auto& sg = fp.semigroup();
    const RowVector tf = sg.trace_functional();
    SteadyState ss;
    ss.method = "spectral";
    if (dec.size() == 0) throw ConsistencyError("empty Floquet spectrum");
    ss.leading_eigenvalue = dec.values(0);
    if (std::abs(dec.values(0) - 1.0) > options.unit_tolerance) {
        std::ostringstream os;
        os << "leading Floquet eigenvalue " << dec.values(0) << " is not within " << options.unit_tolerance << " of 1";
        throw ConsistencyError(os.str());
    }
    std::vector<Eigen::Index> on_circle, at_one;
    for (Eigen::Index i = 0; i < dec.size(); ++i) {
        if (std::abs(std::abs(dec.values(i)) - 1.0) <= options.cluster_tolerance) on_circle.push_back(i);
        if (std::abs(dec.values(i) - 1.0) <= options.unit_tolerance) at_one.push_back(i);
    }
    if (on_circle.empty()) on_circle.push_back(0);
    if (at_one.empty()) at_one.push_back(0);
    ss.cluster_size = static_cast<int>(at_one.size());
    const bool degenerate = on_circle.size() > 1 || at_one.size() > 1;
    if (degenerate && (!options.reference || on_circle.size() > at_one.size())) {
        std::ostringstream os;
        os << "degenerate leading Floquet eigenvalues:";
        for (auto i : on_circle.size() > at_one.size() ? on_circle : at_one) {
            os << " lambda[" << i << "] = " << dec.values(i) << " (eigenvector norm-1 head:";
            for (Eigen::Index k = 0; k < std::min<Eigen::Index>(4, dec.right.rows()); ++k) os << ' ' << dec.right(k, i);
            os << ")";
        }
        if (!options.reference) os << "; supply a reference state to select the steady state by spectral projection";
        throw DegeneracyError(os.str());
    }
    Vector w;
    if (at_one.size() == 1) {
        w = dec.right.col(at_one.front());
    } else {
        const Vector start = sg.embed(*options.reference);
        w = Vector::Zero(dec.right.rows());
        for (auto i : at_one) w += dec.right.col(i) * (dec.left.row(i) * start)(0, 0);
    }
    const cd norm = (tf * w)(0, 0);
    if (std::abs(norm) < 1e-12) throw ConsistencyError("steady eigenvector has vanishing trace");
    ss.joint = w / norm;
    fill_micromotion(fp, ss);
    return ss;
}

}  // namespace

SteadyState steady_state(const FloquetPropagator& fp, const SteadyStateOptions& options) {
    if (options.reference) ops::validate_density_matrix(*options.reference, 1e-8);
    SteadyStateMethod method = options.method;
    if (method == SteadyStateMethod::automatic)
        method = fp.has_spectrum() || fp.dimension() <= options.spectral_size_limit ? SteadyStateMethod::spectral
                                                                                   : SteadyStateMethod::power;
    if (method == SteadyStateMethod::power) return power_steady_state(fp, options);

    std::optional<num::EigenDecomposition> local;
    const num::EigenDecomposition* dec = nullptr;
    if (fp.has_spectrum()) {
        dec = &fp.spectrum();
    } else {
        local = num::eig_general(fp.has_floquet_matrix() ? fp.floquet_matrix() : fp.period_product(0));
        dec = &*local;
    }
    if (dec->ill_conditioned) {
        SteadyState ss = power_steady_state(fp, options);
        ss.method = "power (ill-conditioned spectrum)";
        return ss;
    }
    return spectral_steady_state(fp, *dec, options);
}

Trajectory propagate_quench(const FloquetPropagator& fp, const Matrix& rho0, long n_steps) {
    ops::validate_density_matrix(rho0, 1e-10);
    if (n_steps < 0) throw InputError("n_steps must be non-negative");
    const auto& sg = fp.semigroup();
    Trajectory tr;
    tr.times.reserve(static_cast<std::size_t>(n_steps + 1));
    tr.states.reserve(static_cast<std::size_t>(n_steps + 1));
    Vector w = sg.embed(rho0);
    tr.times.push_back(0.0);
    tr.states.push_back(rho0);
    for (long n = 1; n <= n_steps; ++n) {
        w = fp.apply_step(n, w);
        tr.times.push_back(fp.grid().time(n));
        tr.states.push_back(sg.reduce(w));
    }
    return tr;
}

cd multitime_correlation(const FloquetPropagator& fp, const Matrix& rho0, const std::vector<ObservableInsertion>& insertions) {
    for (std::size_t i = 0; i < insertions.size(); ++i) {
        if (insertions[i].step < 0) throw InputError("insertion step must be non-negative");
        if (i > 0 && insertions[i].step < insertions[i - 1].step) throw InputError("insertions must be sorted by step");
        const auto D = fp.semigroup().d * fp.semigroup().d;
        if (insertions[i].superop.rows() != D || insertions[i].superop.cols() != D)
            throw DimensionError("insertion superoperator must be d^2 x d^2");
    }
    const auto& sg = fp.semigroup();
    Vector w = sg.embed(rho0);
    long current = 0;
    for (const auto& ins : insertions) {
        for (long n = current + 1; n <= ins.step; ++n) w = fp.apply_step(n, w);
        current = ins.step;
        w = num::apply_lifted(ins.superop, w, sg.chi);
    }
    return (sg.trace_functional() * w)(0, 0);
}

double stepwise_trace_drift(const FloquetPropagator& fp) {
    const RowVector tf = fp.semigroup().trace_functional();
    double worst = 0.0;
    for (int n = 1; n <= fp.steps_per_period(); ++n)
        worst = std::max(worst, (fp.apply_step_left(tf, n) - tf).cwiseAbs().maxCoeff());
    return worst;
}

}  // namespace floquet::engine
