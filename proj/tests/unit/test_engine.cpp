// test_engine.cpp — System channels, step propagators, Floquet spectra, steady states and quenches

#include <gtest/gtest.h>

#include "floquet_if/errors.hpp"
#include "floquet_if/floquet.hpp"
#include "floquet_if/operators.hpp"
#include "test_support.hpp"

using namespace floquet;
using floquet::testing::make_if;
using floquet::testing::ohmic;

namespace {

const bath::ExponentialBathFit& fit_for(double alpha, double omega_c, int K) {
    static std::map<std::tuple<double, double, int>, bath::ExponentialBathFit> cache;
    auto key = std::make_tuple(alpha, omega_c, K);
    auto it = cache.find(key);
    if (it == cache.end()) {
        bath::FitOptions fo;
        fo.terms = K;
        it = cache.emplace(key, bath::fit_exponentials(ohmic(alpha, omega_c), fo)).first;
    }
    return it->second;
}

}  // namespace

TEST(SystemModel, PresetsAndValidation) {
    const auto m = model::single_spin(1.0, model::DriveType::transversal, 0.5, 3.0);
    EXPECT_EQ(m.d, 2);
    EXPECT_LE((m.hamiltonian(0.0) - (0.5 * ops::pauli_x() + 0.5 * ops::pauli_z())).norm(), 1e-15);
    EXPECT_LE((m.coupling - ops::pauli_z()).norm(), 0.0);
    EXPECT_EQ(model::parse_drive_type("longitudinal"), model::DriveType::longitudinal);
    EXPECT_THROW(model::parse_drive_type("diagonal"), InputError);

    const auto g = model::TrotterGrid::for_drive(4.0, kPi / 60.0);
    EXPECT_EQ(g.steps_per_period, 30);
    EXPECT_NEAR(g.period, 2.0 * kPi / 4.0, 1e-14);
    EXPECT_EQ(model::TrotterGrid::for_drive(2.15, kPi / 48.0).steps_per_period, 45);
}

TEST(SystemChannel, MatchesAdaptiveOdeIntegration) {
    for (auto type : {model::DriveType::longitudinal, model::DriveType::transversal}) {
        const auto m = model::single_spin(1.0, type, 1.3, 5.0, 0.4);
        for (double t0 : {0.0, 0.37}) {
            const double t1 = t0 + 0.05;
            const Matrix u = model::system_propagator(m, t0, t1);
            const Matrix ref = floquet::testing::ode_propagator(m, t0, t1);
            EXPECT_LE((u - ref).cwiseAbs().maxCoeff(), 1e-9);
            // Fourth order: four times the substeps shrink the error ~256-fold.
            model::ChannelOptions fine;
            fine.substeps = 16;
            EXPECT_LE((model::system_propagator(m, t0, t1, fine) - ref).cwiseAbs().maxCoeff(), 1e-11);
        }
    }
    const auto m2 = model::two_spin(1.0, 1.15, 2.15);
    EXPECT_LE((model::system_propagator(m2, 0.1, 0.2) - floquet::testing::ode_propagator(m2, 0.1, 0.2)).cwiseAbs().maxCoeff(),
              1e-9);
}

TEST(FloquetPropagator, UndrivenPeriodProductIsStepPower) {
    const auto& fit = fit_for(0.1, 2.5, 2);
    const auto m = model::single_spin(1.0, model::DriveType::none, 0.0, 0.0);
    const auto grid = model::TrotterGrid::for_drive(6.0, kPi / 60.0);  // M = 20 steps of a static model
    const auto fp = engine::assemble_step_propagators(make_if(fit, m.coupling, grid.dt), m, grid);
    Matrix q1 = fp.step_matrix(1);
    Matrix power = Matrix::Identity(q1.rows(), q1.cols());
    for (int k = 0; k < grid.steps_per_period; ++k) power = q1 * power;
    EXPECT_LE((fp.period_product(0) - power).cwiseAbs().maxCoeff(), 1e-11);

    // A single-step undriven grid gives Q_F = Q_1.
    const auto fp1 = engine::assemble_step_propagators(make_if(fit, m.coupling, grid.dt), m,
                                                       model::TrotterGrid::undriven(grid.dt));
    EXPECT_EQ(fp1.steps_per_period(), 1);
    EXPECT_LE((fp1.period_product(0) - q1).cwiseAbs().maxCoeff(), 0.0);
}

TEST(FloquetPropagator, ApplyPeriodMatchesDenseProduct) {
    const auto& fit = fit_for(0.1, 2.5, 2);
    const auto m = model::single_spin(1.0, model::DriveType::transversal, 1.0, 10.0);
    const auto grid = model::TrotterGrid::for_drive(10.0, kPi / 60.0);
    auto fp = engine::assemble_step_propagators(make_if(fit, m.coupling, grid.dt), m, grid);
    std::mt19937_64 rng(21);
    const Vector w = fp.semigroup().embed(floquet::testing::random_density(rng, 2));
    fp.assemble(true);
    EXPECT_LE((fp.apply_period(w) - fp.floquet_matrix() * w).cwiseAbs().maxCoeff(), 1e-12);
    const auto spec = engine::floquet_spectrum(fp);
    EXPECT_GE(spec.unit_index, 0);
    EXPECT_LE(spec.unit_distance, 1e-8);
    EXPECT_LE(engine::stepwise_trace_drift(fp), 1e-10);
}

TEST(SteadyState, MicromotionClosesThePeriod) {
    const auto& fit = fit_for(0.1, 2.5, 3);
    const auto m = model::single_spin(1.0, model::DriveType::longitudinal, 1.0, 6.0);
    const auto grid = model::TrotterGrid::for_drive(6.0, kPi / 60.0);
    const auto fp = engine::assemble_step_propagators(make_if(fit, m.coupling, grid.dt), m, grid);
    const auto ss = engine::steady_state(fp);
    ASSERT_EQ(ss.micromotion.size(), static_cast<std::size_t>(grid.steps_per_period));
    EXPECT_LE((ss.micromotion.back() - ss.rho).cwiseAbs().maxCoeff(), 1e-9);
    EXPECT_NEAR(ss.rho.trace().real(), 1.0, 1e-12);
    EXPECT_GE(ops::min_eigenvalue(ss.rho), -1e-8);

    engine::SteadyStateOptions power;
    power.method = engine::SteadyStateMethod::power;
    power.power_tolerance = 1e-13;
    const auto ps = engine::steady_state(fp, power);
    EXPECT_LE((ps.rho - ss.rho).cwiseAbs().maxCoeff(), 1e-9);
}

TEST(SteadyState, WeakCouplingRelaxesToGroundState) {
    const auto& fit = fit_for(0.01, 2.5, 4);
    const auto m = model::single_spin(1.0, model::DriveType::none, 0.0, 0.0);
    const auto grid = model::TrotterGrid::undriven(0.05);
    const auto fp = engine::assemble_step_propagators(make_if(fit, m.coupling, grid.dt), m, grid);
    const auto ss = engine::steady_state(fp);
    Vector ground(2);
    ground << 1.0, -1.0;
    ground /= std::sqrt(2.0);
    const double fidelity = (ground.adjoint() * ss.rho * ground)(0, 0).real();
    EXPECT_GE(fidelity, 0.99);
}

TEST(SteadyState, TwoSpinDegeneracyNeedsReference) {
    const auto& fit = fit_for(0.2, 5.0, 2);
    const auto m = model::two_spin(1.0, 0.0, 0.0);
    const auto grid = model::TrotterGrid::undriven(0.1);
    const auto fp = engine::assemble_step_propagators(make_if(fit, m.coupling, grid.dt), m, grid);
    EXPECT_THROW(engine::steady_state(fp), DegeneracyError);

    // The singlet is decoupled from bath and Hamiltonian: its population is conserved.
    engine::SteadyStateOptions so;
    Matrix ref = Matrix::Zero(4, 4);
    ref(0, 0) = 1.0;
    so.reference = ref;
    const auto ss = engine::steady_state(fp, so);
    EXPECT_NEAR(ops::expectation(ops::singlet_projector(), ss.rho).real(), 0.0, 1e-9);

    Vector mix(4);
    mix << 0.6, 0.0, 0.8, 0.0;  // |00> and |10> mixture with singlet weight 0.32
    const Matrix rho0 = floquet::testing::pure(mix);
    const double p0 = ops::expectation(ops::singlet_projector(), rho0).real();
    const auto tr = engine::propagate_quench(fp, rho0, 100);
    for (const auto& r : tr.states) EXPECT_NEAR(ops::expectation(ops::singlet_projector(), r).real(), p0, 1e-10);
}

TEST(Quench, TrivialBathReproducesUnitaryEvolution) {
    const auto m = model::single_spin(1.0, model::DriveType::transversal, 0.8, 4.0);
    const auto grid = model::TrotterGrid::for_drive(4.0, kPi / 60.0);
    const auto sg = std::make_shared<const embedding::SemiGroupIF>(embedding::identity_if(2, grid.dt, m.coupling));
    const auto fp = engine::assemble_step_propagators(sg, m, grid);
    Matrix rho0 = Matrix::Zero(2, 2);
    rho0(0, 0) = 1.0;
    const long n = 2 * grid.steps_per_period;
    const auto tr = engine::propagate_quench(fp, rho0, n);
    const Matrix u = floquet::testing::ode_propagator(m, 0.0, grid.time(n));
    EXPECT_LE((tr.states.back() - u * rho0 * u.adjoint()).cwiseAbs().maxCoeff(), 1e-9);
}

TEST(Quench, InputValidation) {
    const auto m = model::single_spin(1.0, model::DriveType::none, 0.0, 0.0);
    const auto sg = std::make_shared<const embedding::SemiGroupIF>(embedding::identity_if(2, 0.1, m.coupling));
    EXPECT_THROW(engine::assemble_step_propagators(sg, m, model::TrotterGrid::undriven(0.2)), InputError);
    const auto fp = engine::assemble_step_propagators(sg, m, model::TrotterGrid::undriven(0.1));
    EXPECT_THROW(engine::propagate_quench(fp, Matrix(0.5 * Matrix::Identity(2, 2)), -1), InputError);
    EXPECT_THROW(fp.floquet_matrix(), ConsistencyError);
}
