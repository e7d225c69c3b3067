// test_observables.cpp — Steady-state correlations, heat-current densities and transient currents

#include <gtest/gtest.h>

#include "floquet_if/errors.hpp"
#include "floquet_if/observables.hpp"
#include "floquet_if/operators.hpp"
#include "test_support.hpp"

using namespace floquet;
using floquet::testing::make_if;
using floquet::testing::ohmic;

namespace {

struct DrivenSetup {
    bath::BathSpec spec = ohmic(0.1, 2.5);
    bath::ExponentialBathFit fit;
    std::optional<engine::FloquetPropagator> fp;
    engine::SteadyState ss;

    explicit DrivenSetup(model::DriveType type) {
        bath::FitOptions fo;
        fo.terms = 2;
        fit = bath::fit_exponentials(spec, fo);
        const auto m = model::single_spin(1.0, type, 1.0, 6.0);
        const auto grid = model::TrotterGrid::for_drive(6.0, kPi / 30.0);
        fp.emplace(engine::assemble_step_propagators(make_if(fit, m.coupling, grid.dt), m, grid));
        ss = engine::steady_state(*fp);
    }
};

const DrivenSetup& transversal() {
    static const DrivenSetup s(model::DriveType::transversal);
    return s;
}

}  // namespace

TEST(SteadyCorrelation, SplitsIntoDecayingAndFactorizedParts) {
    const auto& s = transversal();
    const auto corr = obs::steady_two_time_correlation(*s.fp, s.ss);
    ASSERT_EQ(corr.full.size(), corr.tau.size());
    for (std::size_t i = 0; i < corr.tau.size(); ++i) EXPECT_LE(std::abs(corr.full[i] - corr.decay[i] - corr.asym[i]), 1e-15);
    EXPECT_LE(corr.decay_tail, corr.decay_threshold);
    // <S S> at tau = 0 is <S^2> = 1 for S = sigma_z.
    EXPECT_NEAR(corr.full[0].real(), 1.0, 1e-10);
    EXPECT_NEAR(corr.full[0].imag(), 0.0, 1e-10);
}

TEST(SteadyCorrelation, FourierAndProjectionRoutesAgree) {
    const auto& s = transversal();
    const auto corr = obs::steady_two_time_correlation(*s.fp, s.ss);
    ASSERT_EQ(corr.c.size(), corr.c_projection.size());
    ASSERT_GE(corr.c.size(), 4u);
    for (std::size_t n = 0; n < corr.c.size(); ++n) {
        EXPECT_NEAR(corr.c[n], corr.c_projection[n], 1e-8) << "n = " << n;
        EXPECT_GE(corr.c[n], -1e-10);
    }
}

TEST(HeatCurrent, DeltaWeightsFollowFromHarmonics) {
    const auto& s = transversal();
    const auto corr = obs::steady_two_time_correlation(*s.fp, s.ss);
    const auto hc = obs::heat_current_density(corr, s.spec, obs::frequency_grid(10.0, 50));
    ASSERT_EQ(hc.weights.size(), corr.c.size());
    double sum = 0.0;
    for (std::size_t i = 0; i < hc.weights.size(); ++i) {
        const int n = hc.harmonic[i];
        const double w = n * corr.omega_d;
        const double expected = n == 0 ? 0.0 : kPi * bath::evaluate_spectral_density(s.spec, w) * w * corr.c[static_cast<std::size_t>(n)];
        EXPECT_DOUBLE_EQ(hc.weights[i], expected);
        sum += hc.weights[i];
    }
    EXPECT_GE(hc.total, sum - 1e-15);  // the continuous part is added on top
    EXPECT_THROW(obs::heat_current_density(corr, s.spec, {0.0, 1.0}), DomainError);
}

TEST(SteadyCorrelation, ClosedSystemNeverDecays) {
    // alpha = 0: the connected correlation oscillates forever.
    const auto spec = ohmic(0.0, 2.5);
    const auto fit = bath::fit_exponentials(spec);
    EXPECT_TRUE(fit.terms.empty());
    const auto m = model::single_spin(1.0, model::DriveType::transversal, 1.0, 6.0);
    const auto grid = model::TrotterGrid::for_drive(6.0, kPi / 30.0);
    const auto fp = engine::assemble_step_propagators(make_if(fit, m.coupling, grid.dt), m, grid);
    engine::SteadyStateOptions so;
    so.method = engine::SteadyStateMethod::power;
    so.power_max_periods = 10;
    engine::SteadyState ss;
    ss.joint = fp.semigroup().embed(Matrix(0.5 * Matrix::Identity(2, 2) + 0.3 * ops::pauli_x()));
    ss.rho = fp.semigroup().reduce(ss.joint);
    obs::CorrelationOptions co;
    co.tau_max = 5.0;
    co.max_doublings = 1;
    EXPECT_THROW(obs::steady_two_time_correlation(fp, ss, co), MemoryTimeError);
}

TEST(Transient, RowMatchesMultitimeCorrelation) {
    const auto& s = transversal();
    Matrix rho0 = Matrix::Zero(2, 2);
    rho0(0, 0) = 1.0;
    const long n = 17;
    const auto hist = obs::record_quench(*s.fp, rho0, n);
    const auto row = obs::two_time_correlation_row(hist, n);
    const Matrix SL = ops::left_multiplication(ops::pauli_z());
    for (long k : {0L, 5L, 16L, 17L}) {
        const cd ref = engine::multitime_correlation(*s.fp, rho0, {{k, SL}, {n, SL}});
        EXPECT_LE(std::abs(row[static_cast<std::size_t>(k)] - ref), 1e-12) << "k = " << k;
    }
    EXPECT_THROW(obs::two_time_correlation_row(hist, n + 1), InputError);
}

TEST(Transient, CurrentVanishesAtTheInitialTime) {
    const auto& s = transversal();
    Matrix rho0 = Matrix::Zero(2, 2);
    rho0(1, 1) = 1.0;
    const auto hist = obs::record_quench(*s.fp, rho0, 4);
    for (double j : obs::transient_heat_current(hist, 0, s.spec, obs::frequency_grid(5.0, 20))) EXPECT_EQ(j, 0.0);
    const auto later = obs::transient_heat_current(hist, 4, s.spec, obs::frequency_grid(5.0, 20));
    for (double j : later) EXPECT_TRUE(std::isfinite(j));
}

TEST(FrequencyGrid, UniformExcludingZero) {
    const auto g = obs::frequency_grid(2.0, 4);
    EXPECT_EQ(g, (std::vector<double>{0.5, 1.0, 1.5, 2.0}));
    EXPECT_THROW(obs::frequency_grid(0.0, 4), InputError);
}
