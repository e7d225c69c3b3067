// test_embedding.cpp — Pseudomode bond basis, environment generator and semi-group influence functional

#include <gtest/gtest.h>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "floquet_if/embedding.hpp"
#include "floquet_if/errors.hpp"
#include "floquet_if/floquet.hpp"
#include "floquet_if/operators.hpp"
#include "test_support.hpp"

using namespace floquet;
using floquet::testing::make_if;
using floquet::testing::ohmic;

namespace {

const bath::ExponentialBathFit& weak_fit() {
    static const auto fit = [] {
        bath::FitOptions fo;
        fo.terms = 3;
        return bath::fit_exponentials(ohmic(0.1, 2.5), fo);
    }();
    return fit;
}

/// 4 int_0^t ds int_0^s du Re C_fit(u) by nested Gauss-Kronrod quadrature.
double dephasing_exponent(const bath::ExponentialBathFit& fit, double t) {
    using GK = boost::math::quadrature::gauss_kronrod<double, 21>;
    auto inner = [&](double s) { return GK::integrate([&](double u) { return fit.evaluate(u).real(); }, 0.0, s, 10, 1e-12); };
    return 4.0 * GK::integrate(inner, 0.0, t, 10, 1e-11);
}

}  // namespace

TEST(BondBasis, SizesUnderExcitationCap) {
    // Six modes with at most three excitations in total: C(9, 3).
    EXPECT_EQ(embedding::BondBasis(std::vector<int>(6, 4), 3).size(), 84);
    EXPECT_EQ(embedding::BondBasis(std::vector<int>(8, 4), 3).size(), 165);
    // No cap: full product space.
    EXPECT_EQ(embedding::BondBasis({3, 2, 4}, -1).size(), 24);
}

TEST(BondBasis, MirrorSwapsPairedModesAndIsAnInvolution) {
    const embedding::BondBasis basis({3, 3, 3, 3}, 2);
    const auto& m = basis.mirror();
    for (Eigen::Index s = 0; s < basis.size(); ++s) {
        const auto t = m[static_cast<std::size_t>(s)];
        EXPECT_EQ(m[static_cast<std::size_t>(t)], s);
        for (std::size_t k = 0; k < 2; ++k) {
            EXPECT_EQ(basis.occupation(t, 2 * k), basis.occupation(s, 2 * k + 1));
            EXPECT_EQ(basis.occupation(t, 2 * k + 1), basis.occupation(s, 2 * k));
        }
    }
}

TEST(PseudomodeSpec, ValidationAndMemoryBudget) {
    embedding::PseudomodeSpec pm;
    pm.cutoffs = {4, 4};
    EXPECT_THROW(pm.validate(3), InputError);
    pm.cutoffs.clear();
    pm.default_cutoff = 1;
    EXPECT_THROW(pm.validate(2), InputError);

    embedding::PseudomodeSpec tight;
    tight.memory_budget_bytes = 1024;
    EXPECT_THROW(embedding::build_environment_generator(weak_fit(), tight, ops::pauli_z()), ResourceError);
}

TEST(SemiGroupIF, TraceDualityAndSpectralRadius) {
    const auto sg = make_if(weak_fit(), ops::pauli_z(), 0.05);
    EXPECT_EQ(sg->chi, 84);
    const auto diag = embedding::if_diagnostics(*sg, false);
    EXPECT_LE(diag.trace_duality_residual, 1e-10);
    EXPECT_LE(diag.spectral_radius, 1.0 + 1e-6);
    EXPECT_NEAR(diag.boundary_overlap, 1.0, 1e-12);
}

TEST(SemiGroupIF, PreservesJointHermiticity) {
    const auto sg = make_if(weak_fit(), ops::pauli_z(), 0.05);
    std::mt19937_64 rng(11);
    const Matrix rho = floquet::testing::random_density(rng, 2);
    Vector w = sg->embed(rho);
    for (int k = 0; k < 5; ++k) w = sg->q * w;
    EXPECT_LE((sg->joint_adjoint(w) - w).cwiseAbs().maxCoeff(), 1e-12);
    const Matrix r = sg->reduce(w);
    EXPECT_LE(ops::hermiticity_deviation(r), 1e-12);
    EXPECT_NEAR(r.trace().real(), 1.0, 1e-12);
}

TEST(SemiGroupIF, IdentityIfIsTrivial) {
    const auto sg = embedding::identity_if(2, 0.1, ops::pauli_z());
    EXPECT_EQ(sg.chi, 1);
    EXPECT_LE((sg.q - Matrix::Identity(4, 4)).cwiseAbs().maxCoeff(), 0.0);
    std::mt19937_64 rng(12);
    const Matrix rho = floquet::testing::random_density(rng, 2);
    EXPECT_LE((sg.reduce(sg.embed(rho)) - rho).cwiseAbs().maxCoeff(), 1e-15);
}

TEST(SemiGroupIF, PureDephasingMatchesDoubleIntegralOfFit) {
    // Omega = 0: the embedding is exact up to truncation, so |rho_01(t)| = exp(-4 int int Re C_fit) / 2.
    const double dt = 0.02;
    const auto& fit = weak_fit();
    const auto sg = make_if(fit, ops::pauli_z(), dt);
    const auto m = model::single_spin(0.0, model::DriveType::none, 0.0, 0.0);
    const auto fp = engine::assemble_step_propagators(sg, m, model::TrotterGrid::undriven(dt));
    Matrix plus(2, 2);
    plus << 0.5, 0.5, 0.5, 0.5;
    const auto tr = engine::propagate_quench(fp, plus, 200);
    for (long n : {25L, 50L, 100L, 200L}) {
        const double t = tr.times[static_cast<std::size_t>(n)];
        const double expected = 0.5 * std::exp(-dephasing_exponent(fit, t));
        EXPECT_NEAR(std::abs(tr.states[static_cast<std::size_t>(n)](0, 1)), expected, 2e-4) << "t = " << t;
    }
}

TEST(SemiGroupIF, EmbedReduceValidation) {
    const auto sg = embedding::identity_if(2, 0.1, ops::pauli_z());
    EXPECT_THROW(sg.embed(Matrix::Identity(3, 3)), DimensionError);
    EXPECT_THROW(sg.reduce(Vector::Zero(3)), DimensionError);
    EXPECT_THROW(embedding::build_environment_generator(weak_fit(), {}, Matrix::Zero(2, 3)), InputError);
}
