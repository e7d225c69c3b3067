// test_numerics.cpp — Tensors, FIFT serialization, matrix exponential, eigendecomposition and SVD

#include <gtest/gtest.h>

#include <random>
#include <sstream>

#include "floquet_if/errors.hpp"
#include "floquet_if/linalg.hpp"
#include "floquet_if/tensor.hpp"
#include "test_support.hpp"

using namespace floquet;
using num::ComplexTensor;

namespace {

Matrix random_matrix(std::mt19937_64& rng, Eigen::Index n, double scale = 1.0) {
    std::normal_distribution<double> g(0.0, scale);
    Matrix a(n, n);
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = 0; j < n; ++j) a(i, j) = cd(g(rng), g(rng));
    return a;
}

/// Truncated Taylor series with scaling and squaring in long double precision.
Matrix series_exponential(const Matrix& a) {
    using LMatrix = Eigen::Matrix<std::complex<long double>, Eigen::Dynamic, Eigen::Dynamic>;
    const double norm = a.cwiseAbs().rowwise().sum().maxCoeff();
    int s = 0;
    while (norm / std::ldexp(1.0, s) > 0.25) ++s;
    const LMatrix x = a.cast<std::complex<long double>>() / static_cast<long double>(std::ldexp(1.0, s));
    LMatrix term = LMatrix::Identity(a.rows(), a.cols());
    LMatrix sum = term;
    for (int k = 1; k < 40; ++k) {
        term = term * x / static_cast<long double>(k);
        sum += term;
    }
    for (int i = 0; i < s; ++i) sum = sum * sum;
    return sum.cast<cd>();
}

}  // namespace

TEST(Tensor, FiftRoundTripIsBitExact) {
    std::mt19937_64 rng(1);
    std::normal_distribution<double> g;
    std::vector<cd> data(2 * 3 * 4);
    for (auto& x : data) x = cd(g(rng), g(rng));
    data[5] = cd(-0.0, 1e-310);  // signed zero and a subnormal survive
    const ComplexTensor t({2, 3, 4}, data);
    std::stringstream ss;
    num::write_tensor(ss, t);
    const auto back = num::read_tensor(ss);
    ASSERT_EQ(back.shape(), t.shape());
    EXPECT_EQ(0, std::memcmp(back.data().data(), t.data().data(), t.size() * sizeof(cd)));
    EXPECT_TRUE(back == t);
}

TEST(Tensor, RejectsCorruptStreams) {
    std::stringstream bad("NOPE0000");
    EXPECT_THROW(num::read_tensor(bad), InputError);
    std::stringstream ss;
    num::write_tensor(ss, ComplexTensor({3}, {1.0, 2.0, 3.0}));
    std::string bytes = ss.str();
    bytes.resize(bytes.size() - 4);
    std::stringstream truncated(bytes);
    EXPECT_THROW(num::read_tensor(truncated), InputError);
}

TEST(Tensor, PermuteAndContractMatchExplicitLoops) {
    std::mt19937_64 rng(2);
    std::normal_distribution<double> g;
    std::vector<cd> da(2 * 3 * 4), db(4 * 3 * 5);
    for (auto& x : da) x = cd(g(rng), g(rng));
    for (auto& x : db) x = cd(g(rng), g(rng));
    const ComplexTensor a({2, 3, 4}, da), b({4, 3, 5}, db);

    const std::size_t axes[] = {2, 0, 1};
    const auto p = a.permute(axes);
    ASSERT_EQ(p.shape(), (ComplexTensor::Shape{4, 2, 3}));
    for (std::size_t i = 0; i < 2; ++i)
        for (std::size_t j = 0; j < 3; ++j)
            for (std::size_t k = 0; k < 4; ++k) EXPECT_EQ(p.at({k, i, j}), a.at({i, j, k}));

    const auto c = num::contract(a, b, {{2, 0}, {1, 1}});
    ASSERT_EQ(c.shape(), (ComplexTensor::Shape{2, 5}));
    for (std::size_t i = 0; i < 2; ++i)
        for (std::size_t l = 0; l < 5; ++l) {
            cd acc = 0.0;
            for (std::size_t j = 0; j < 3; ++j)
                for (std::size_t k = 0; k < 4; ++k) acc += a.at({i, j, k}) * b.at({k, j, l});
            EXPECT_NEAR(std::abs(c.at({i, l}) - acc), 0.0, 1e-12);
        }
    EXPECT_THROW(num::contract(a, b, {{0, 0}}), DimensionError);
    EXPECT_THROW(a.reshape({5, 5}), DimensionError);
}

TEST(MatrixExponential, MatchesLongDoubleSeries) {
    std::mt19937_64 rng(3);
    for (double scale : {0.01, 0.5, 3.0}) {
        const Matrix a = random_matrix(rng, 12, scale);
        const Matrix e = num::matrix_exponential(a);
        const Matrix ref = series_exponential(a);
        EXPECT_LE((e - ref).norm() / ref.norm(), 1e-11) << "scale " << scale;
    }
}

TEST(MatrixExponential, HermitianGeneratorGivesUnitary) {
    std::mt19937_64 rng(4);
    const Matrix a = random_matrix(rng, 8);
    const Matrix h = 0.5 * (a + a.adjoint());
    const Matrix u = num::matrix_exponential(-kI * h);
    EXPECT_LE((u * u.adjoint() - Matrix::Identity(8, 8)).norm(), 1e-12);
    EXPECT_THROW(num::matrix_exponential(Matrix::Zero(2, 3)), DimensionError);
    Matrix nan = Matrix::Zero(2, 2);
    nan(0, 0) = std::numeric_limits<double>::quiet_NaN();
    EXPECT_THROW(num::matrix_exponential(nan), InputError);
}

TEST(EigGeneral, RootsOfKnownCompanionMatrix) {
    // Companion matrix of prod (z - r_k): its eigenvalues are exactly the roots.
    const std::vector<cd> roots{cd(1.0, 0.5), cd(-0.3, 0.2), cd(0.9, -1.1), cd(0.05, 0.0), cd(-2.0, 0.7)};
    std::vector<cd> coeff{1.0};
    for (const cd& r : roots) {
        std::vector<cd> next(coeff.size() + 1, 0.0);
        for (std::size_t i = 0; i < coeff.size(); ++i) {
            next[i] += coeff[i];
            next[i + 1] -= r * coeff[i];
        }
        coeff = next;
    }
    const auto n = static_cast<Eigen::Index>(roots.size());
    Matrix c = Matrix::Zero(n, n);
    for (Eigen::Index j = 0; j < n; ++j) c(0, j) = -coeff[static_cast<std::size_t>(j + 1)];
    for (Eigen::Index i = 1; i < n; ++i) c(i, i - 1) = 1.0;
    const auto dec = num::eig_general(c);
    Vector expected(n);
    for (Eigen::Index i = 0; i < n; ++i) expected(i) = roots[static_cast<std::size_t>(i)];
    EXPECT_LE(floquet::testing::nearest_match_distance(dec.values, expected), 1e-10);
    EXPECT_LE(floquet::testing::nearest_match_distance(expected, dec.values), 1e-10);
}

TEST(EigGeneral, EigenpairsAndBiorthogonality) {
    std::mt19937_64 rng(5);
    const Matrix a = random_matrix(rng, 30);
    const auto dec = num::eig_general(a);
    for (Eigen::Index i = 0; i < dec.size(); ++i) {
        // Characteristic polynomial vanishes: the shifted matrix is singular.
        const Matrix shifted = a - dec.values(i) * Matrix::Identity(30, 30);
        Eigen::JacobiSVD<Matrix> sv(shifted);
        EXPECT_LE(sv.singularValues()(29) / sv.singularValues()(0), 1e-11);
        EXPECT_LE((a * dec.right.col(i) - dec.values(i) * dec.right.col(i)).norm(), 1e-10 * a.norm());
    }
    EXPECT_LE((dec.left * dec.right - Matrix::Identity(30, 30)).cwiseAbs().maxCoeff(), 1e-9);
    EXPECT_LE(dec.reconstruction_residual, 1e-12);
    for (Eigen::Index i = 1; i < dec.size(); ++i) EXPECT_GE(std::abs(dec.values(i - 1)), std::abs(dec.values(i)) - 1e-14);
}

TEST(Svd, ReconstructsAndOrdersSingularValues) {
    std::mt19937_64 rng(6);
    Matrix a(7, 4);
    std::normal_distribution<double> g;
    for (Eigen::Index i = 0; i < 7; ++i)
        for (Eigen::Index j = 0; j < 4; ++j) a(i, j) = cd(g(rng), g(rng));
    const auto r = num::svd(a);
    EXPECT_LE((r.u * r.singular_values.cast<cd>().asDiagonal() * r.v.adjoint() - a).norm() / a.norm(), 1e-13);
    for (Eigen::Index i = 1; i < r.singular_values.size(); ++i) EXPECT_GE(r.singular_values(i - 1), r.singular_values(i));
    EXPECT_GE(r.singular_values.minCoeff(), 0.0);
}

TEST(PowerIteration, FindsDominantEigenvalue) {
    Matrix a = Matrix::Zero(3, 3);
    a.diagonal() << 1.0, 0.5, -0.2;
    const auto r = num::power_iteration([&](const Vector& x) { return Vector(a * x); }, Vector::Ones(3), 1e-13);
    EXPECT_NEAR(std::abs(r.value - 1.0), 0.0, 1e-12);
}
