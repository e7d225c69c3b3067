// test_support.hpp — Shared fixtures and independent oracles for the test suites

#pragma once

#include <cmath>
#include <complex>
#include <memory>
#include <random>
#include <vector>

#include <boost/numeric/odeint.hpp>

#include "floquet_if/bath.hpp"
#include "floquet_if/embedding.hpp"
#include "floquet_if/floquet.hpp"
#include "floquet_if/system_model.hpp"

namespace floquet::testing {

inline bath::BathSpec ohmic(double alpha, double omega_c, double temperature = 0.0) {
    bath::BathSpec b;
    b.density = bath::SpectralDensityOhmic{alpha, omega_c};
    b.temperature = temperature;
    return b;
}

inline std::shared_ptr<const embedding::SemiGroupIF> make_if(const bath::ExponentialBathFit& fit, const Matrix& S,
                                                             double dt, const embedding::PseudomodeSpec& pm = {}) {
    const auto gen = embedding::build_environment_generator(fit, pm, S);
    return std::make_shared<const embedding::SemiGroupIF>(embedding::build_semigroup_if(gen, dt));
}

/// Closed-form zero-temperature Ohmic correlation (alpha/2) omega_c^2 / (1 + i omega_c t)^2.
inline cd ohmic_correlation_t0(double alpha, double omega_c, double t) {
    const cd z(1.0, omega_c * t);
    return 0.5 * alpha * omega_c * omega_c / (z * z);
}

inline Matrix random_unitary(std::mt19937_64& rng, Eigen::Index d) {
    std::normal_distribution<double> g;
    Matrix a(d, d);
    for (Eigen::Index i = 0; i < d; ++i)
        for (Eigen::Index j = 0; j < d; ++j) a(i, j) = cd(g(rng), g(rng));
    Eigen::HouseholderQR<Matrix> qr(a);
    return qr.householderQ();
}

inline Matrix random_density(std::mt19937_64& rng, Eigen::Index d) {
    std::normal_distribution<double> g;
    Matrix a(d, d);
    for (Eigen::Index i = 0; i < d; ++i)
        for (Eigen::Index j = 0; j < d; ++j) a(i, j) = cd(g(rng), g(rng));
    Matrix r = a * a.adjoint();
    return r / r.trace();
}

inline Matrix pure(const Vector& psi) { return psi * psi.adjoint() / psi.squaredNorm(); }

/// Time-ordered propagator of i dU/dt = H(t) U by adaptive Dormand-Prince integration.
inline Matrix ode_propagator(const model::SystemModel& m, double t0, double t1, double tol = 1e-13) {
    namespace odeint = boost::numeric::odeint;
    using State = std::vector<cd>;
    const Eigen::Index d = m.d;
    State u(static_cast<std::size_t>(d * d), 0.0);
    for (Eigen::Index i = 0; i < d; ++i) u[static_cast<std::size_t>(i * d + i)] = 1.0;
    auto rhs = [&](const State& x, State& dxdt, double t) {
        Eigen::Map<const Matrix> U(x.data(), d, d);
        Eigen::Map<Matrix> dU(dxdt.data(), d, d);
        dU = -kI * m.hamiltonian(t) * U;
    };
    auto stepper = odeint::make_controlled(tol, tol, odeint::runge_kutta_dopri5<State>());
    odeint::integrate_adaptive(stepper, rhs, u, t0, t1, (t1 - t0) / 1000.0);
    return Eigen::Map<Matrix>(u.data(), d, d);
}

/// Largest distance from an element of a to its nearest element of b.
inline double nearest_match_distance(const Vector& a, const Vector& b) {
    double worst = 0.0;
    for (Eigen::Index i = 0; i < a.size(); ++i) {
        double best = INFINITY;
        for (Eigen::Index j = 0; j < b.size(); ++j) best = std::min(best, std::abs(a(i) - b(j)));
        worst = std::max(worst, best);
    }
    return worst;
}

}  // namespace floquet::testing
