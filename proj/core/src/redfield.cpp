// redfield.cpp — Magnus effective model, kick operators and time-local Redfield propagation

#include "floquet_if/redfield.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "floquet_if/errors.hpp"
#include "floquet_if/operators.hpp"

namespace floquet::redfield {

double EffectiveModel::lambda(double t) const {
    if (omega_d <= 0.0 || eps_d == 0.0) return 0.0;
    return eps_d / omega_d * std::sin(omega_d * t + phase);
}

Matrix kick_operator(const EffectiveModel& em, double t) {
    const Eigen::Index d = em.h_eff.rows();
    if (em.drive_op.size() == 0) return Matrix::Identity(d, d);
    // P is Hermitian: exponentiate through its eigenbasis.
    Eigen::SelfAdjointEigenSolver<Matrix> es(em.drive_op);
    const double lam = em.lambda(t);
    Vector phases(d);
    for (Eigen::Index i = 0; i < d; ++i) phases(i) = std::exp(-kI * lam * es.eigenvalues()(i));
    return es.eigenvectors() * phases.asDiagonal() * es.eigenvectors().adjoint();
}

EffectiveModel magnus_effective_model(const model::SystemModel& model, const MagnusOptions& options) {
    model.validate();
    if (model.drives.size() > 1)
        throw UnsupportedConfigurationError("Magnus benchmark supports a single drive term");
    if (options.average_points < 8) throw InputError("Magnus average needs at least 8 points");
    EffectiveModel em;
    em.coupling = model.coupling;
    const Eigen::Index d = model.d;
    if (!model.drives.empty()) {
        const auto& dr = model.drives.front();
        const Matrix comm = dr.op * model.coupling - model.coupling * dr.op;
        if (comm.cwiseAbs().maxCoeff() > 1e-12)
            throw UnsupportedConfigurationError("drive operator does not commute with the coupling operator");
        em.drive_op = dr.op;
        em.eps_d = dr.amplitude;
        em.omega_d = dr.frequency;
        em.phase = dr.phase;
    }
    if (em.drive_op.size() == 0 || em.eps_d == 0.0 || em.omega_d <= 0.0) {
        em.h_eff = model.h_static;
    } else {
        const double period = 2.0 * kPi / em.omega_d;
        em.h_eff = Matrix::Zero(d, d);
        for (int k = 0; k < options.average_points; ++k) {
            const Matrix kick = kick_operator(em, period * k / options.average_points);
            em.h_eff += kick.adjoint() * model.h_static * kick;
        }
        em.h_eff /= static_cast<double>(options.average_points);
        em.h_eff = 0.5 * (em.h_eff + em.h_eff.adjoint());
    }
    if (d == 2) {
        em.omega = 2.0 * model.h_static(0, 1).real();
        em.omega_eff = 2.0 * em.h_eff(0, 1).real();
    }
    return em;
}

namespace {

/// Right-hand side -i[H, rho] - [S, L rho - rho L^dagger] in the H_eff eigenbasis.
class RedfieldRhs {
public:
    RedfieldRhs(const EffectiveModel& em, const bath::ExponentialBathFit& fit) : terms_(fit.terms) {
        Eigen::SelfAdjointEigenSolver<Matrix> es(em.h_eff);
        basis_ = es.eigenvectors();
        energies_ = es.eigenvalues();
        h_ = energies_.cast<cd>().asDiagonal();
        s_ = basis_.adjoint() * em.coupling * basis_;
    }

    const Matrix& basis() const { return basis_; }

    Matrix kernel(double t) const {
        const Eigen::Index d = s_.rows();
        Matrix lam = Matrix::Zero(d, d);
        for (Eigen::Index i = 0; i < d; ++i)
            for (Eigen::Index j = 0; j < d; ++j) {
                if (s_(i, j) == cd(0.0)) continue;
                const double w = energies_(i) - energies_(j);
                cd acc = 0.0;
                for (const auto& term : terms_) {
                    const cd z = term.rate + kI * w;
                    acc += std::abs(z) > 1e-300 ? term.amplitude * (1.0 - std::exp(-z * t)) / z : term.amplitude * t;
                }
                lam(i, j) = s_(i, j) * acc;
            }
        return lam;
    }

    Matrix operator()(double t, const Matrix& rho) const {
        const Matrix lam = kernel(t);
        const Matrix x = lam * rho - rho * lam.adjoint();
        return -kI * (h_ * rho - rho * h_) - (s_ * x - x * s_);
    }

private:
    std::vector<bath::ExpTerm> terms_;
    Matrix basis_;
    RealVector energies_;
    Matrix h_;
    Matrix s_;
};

}  // namespace

engine::Trajectory redfield_propagate(const EffectiveModel& em, const bath::ExponentialBathFit& fit, const Matrix& rho0,
                                      double t_final, double dt_me, const RedfieldOptions& options) {
    if (!(dt_me > 0.0)) throw InputError("Redfield step must be positive");
    if (!(t_final >= 0.0)) throw InputError("final time must be non-negative");
    if (options.record_every < 1) throw InputError("record_every must be positive");
    ops::validate_density_matrix(rho0, 1e-10);
    if (rho0.rows() != em.h_eff.rows()) throw DimensionError("initial state does not match the effective model");

    const RedfieldRhs rhs(em, fit);
    const Matrix& V = rhs.basis();
    const long steps = static_cast<long>(std::llround(t_final / dt_me));
    const double h = steps > 0 ? t_final / static_cast<double>(steps) : dt_me;

    // Rotating frame: rho_eff(0) = K(0)^dagger rho0 K(0).
    const Matrix k0 = kick_operator(em, 0.0);
    Matrix rho = V.adjoint() * (k0.adjoint() * rho0 * k0) * V;

    engine::Trajectory tr;
    auto record = [&](double t) {
        const Matrix kick = kick_operator(em, t);
        Matrix lab = kick * (V * rho * V.adjoint()) * kick.adjoint();
        tr.times.push_back(t);
        tr.states.push_back(std::move(lab));
    };
    record(0.0);
    for (long n = 0; n < steps; ++n) {
        const double t = h * static_cast<double>(n);
        const Matrix k1 = rhs(t, rho);
        const Matrix k2 = rhs(t + 0.5 * h, rho + 0.5 * h * k1);
        const Matrix k3 = rhs(t + 0.5 * h, rho + 0.5 * h * k2);
        const Matrix k4 = rhs(t + h, rho + h * k3);
        rho += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        rho = 0.5 * (rho + rho.adjoint());
        const double drift = std::abs(rho.trace() - 1.0);
        if (!rho.allFinite() || drift > options.trace_tolerance || rho.cwiseAbs().maxCoeff() > 1e3) {
            std::ostringstream os;
            os << "Redfield integration unstable at t = " << t + h << " (trace drift " << drift << ", step " << h << ")";
            throw StepSizeError(os.str());
        }
        if ((n + 1) % options.record_every == 0 || n + 1 == steps) record(h * static_cast<double>(n + 1));
    }
    return tr;
}

engine::Trajectory redfield_propagate(const EffectiveModel& em, const bath::BathSpec& bath, const Matrix& rho0,
                                      double t_final, double dt_me, const bath::FitOptions& fit_options,
                                      const RedfieldOptions& options) {
    return redfield_propagate(em, bath::fit_exponentials(bath, fit_options), rho0, t_final, dt_me, options);
}

namespace {

std::vector<double> expectation_series(const engine::Trajectory& tr, const Matrix& op) {
    std::vector<double> out;
    out.reserve(tr.states.size());
    for (const auto& r : tr.states) out.push_back(ops::expectation(op, r).real());
    return out;
}

double interpolate(const std::vector<double>& t, const std::vector<double>& y, double x) {
    auto it = std::lower_bound(t.begin(), t.end(), x);
    if (it == t.begin()) return y.front();
    if (it == t.end()) return y.back();
    const std::size_t i = static_cast<std::size_t>(it - t.begin());
    if (t[i] == x) return y[i];
    const double f = (x - t[i - 1]) / (t[i] - t[i - 1]);
    return (1.0 - f) * y[i - 1] + f * y[i];
}

}  // namespace

TrajectoryComparison compare_trajectories(const engine::Trajectory& a, const engine::Trajectory& b,
                                          const std::vector<std::pair<std::string, Matrix>>& observables) {
    if (a.times.empty() || b.times.empty()) throw InputError("cannot compare empty trajectories");
    if (a.times.size() != a.states.size() || b.times.size() != b.states.size())
        throw InputError("trajectory times and states differ in length");
    TrajectoryComparison cmp;
    cmp.t_begin = std::max(a.times.front(), b.times.front());
    cmp.t_end = std::min(a.times.back(), b.times.back());
    const double slack = 1e-12 * std::max({1.0, std::abs(cmp.t_begin), std::abs(cmp.t_end)});
    if (cmp.t_begin > cmp.t_end + slack) throw InputError("trajectories have disjoint time ranges");

    // Coarser grid = fewer samples inside the common range.
    auto inside = [&](const engine::Trajectory& tr) {
        std::vector<std::size_t> idx;
        for (std::size_t i = 0; i < tr.times.size(); ++i)
            if (tr.times[i] >= cmp.t_begin - slack && tr.times[i] <= cmp.t_end + slack) idx.push_back(i);
        return idx;
    };
    const auto ia = inside(a);
    const auto ib = inside(b);
    const bool a_coarse = ia.size() <= ib.size();
    const auto& coarse = a_coarse ? a : b;
    const auto& fine = a_coarse ? b : a;
    const auto& idx = a_coarse ? ia : ib;
    if (idx.empty()) throw InputError("trajectories share no sample inside the common time range");
    cmp.points = idx.size();

    for (const auto& [name, op] : observables) {
        const auto yc = expectation_series(coarse, op);
        const auto yf = expectation_series(fine, op);
        ObservableDeviation dev;
        dev.name = name;
        double sum = 0.0;
        for (std::size_t i : idx) {
            const double diff = std::abs(yc[i] - interpolate(fine.times, yf, coarse.times[i]));
            dev.max_abs = std::max(dev.max_abs, diff);
            sum += diff;
        }
        dev.mean_abs = sum / static_cast<double>(idx.size());
        cmp.observables.push_back(dev);
    }
    return cmp;
}

}  // namespace floquet::redfield
