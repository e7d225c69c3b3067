// linalg.cpp — Dense linear algebra backed by Eigen and LAPACK

#include "floquet_if/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include <unsupported/Eigen/MatrixFunctions>

#define lapack_complex_float std::complex<float>
#define lapack_complex_double std::complex<double>
#include <lapacke.h>

#include "floquet_if/errors.hpp"

namespace floquet::num {

namespace {

void require_square(const Matrix& a, const char* what) {
    if (a.rows() != a.cols())
        throw DimensionError(std::string(what) + ": matrix must be square, got " + std::to_string(a.rows()) +
                             "x" + std::to_string(a.cols()));
}

double one_norm(const Matrix& a) {
    return a.cwiseAbs().colwise().sum().maxCoeff();
}

}  // namespace

bool all_finite(const Matrix& a) {
    return a.allFinite();
}

double hermiticity_deviation(const Matrix& a) {
    if (a.size() == 0) return 0.0;
    return (a - a.adjoint()).cwiseAbs().maxCoeff();
}

Matrix matrix_exponential(const Matrix& a, double tolerance) {
    require_square(a, "matrix_exponential");
    if (!(tolerance > 0.0)) throw DomainError("matrix_exponential: tolerance must be positive");
    if (!a.allFinite()) throw InputError("matrix_exponential: non-finite input");
    if (a.size() == 0) return a;
    // The Padé-13 core has a backward error at unit roundoff, well inside any
    // positive tolerance we accept.
    Matrix result = a.exp();
    if (!result.allFinite()) throw ConvergenceError("matrix_exponential: overflow in scaling and squaring");
    return result;
}

ComplexTensor matrix_exponential(const ComplexTensor& a, double tolerance) {
    if (a.rank() != 2 || a.shape()[0] != a.shape()[1])
        throw DimensionError("matrix_exponential: tensor must be a square matrix");
    return ComplexTensor::from_matrix(matrix_exponential(a.as_matrix(), tolerance));
}

bool eigenvalue_order(cd a, cd b) {
    const double ma = std::abs(a), mb = std::abs(b);
    const double tol = 1e-12 * std::max({1.0, ma, mb});
    if (std::abs(ma - mb) > tol) return ma > mb;
    if (std::abs(a.real() - b.real()) > tol) return a.real() > b.real();
    return a.imag() > b.imag();
}

double EigenDecomposition::eigenvalue_condition(Eigen::Index i) const {
    return left.row(i).norm() * right.col(i).norm();
}

EigenDecomposition eig_general(const Matrix& a, const EigOptions& options) {
    require_square(a, "eig_general");
    if (!a.allFinite()) throw InputError("eig_general: input contains NaN or Inf");
    const Eigen::Index n = a.rows();
    EigenDecomposition out;
    if (n == 0) return out;

    Matrix work = a;
    Vector w(n);
    Matrix vl(n, n), vr(n, n);
    const lapack_int info =
        LAPACKE_zgeev(LAPACK_COL_MAJOR, 'V', 'V', static_cast<lapack_int>(n), work.data(),
                      static_cast<lapack_int>(n), w.data(), vl.data(), static_cast<lapack_int>(n), vr.data(),
                      static_cast<lapack_int>(n));
    if (info > 0)
        throw ConvergenceError("eig_general: QR iteration failed to converge; " + std::to_string(info) +
                               " eigenvalues unconverged");
    if (info < 0) throw InputError("eig_general: invalid argument " + std::to_string(-info) + " to zgeev");

    std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](Eigen::Index i, Eigen::Index j) { return eigenvalue_order(w(i), w(j)); });

    out.values.resize(n);
    out.right.resize(n, n);
    Matrix lapack_left(n, n);
    for (Eigen::Index k = 0; k < n; ++k) {
        const auto src = order[static_cast<std::size_t>(k)];
        out.values(k) = w(src);
        out.right.col(k) = vr.col(src).normalized();
        lapack_left.row(k) = vl.col(src).adjoint();
    }

    Eigen::PartialPivLU<Matrix> lu(out.right);
    Matrix inv = lu.inverse();
    const double cond = one_norm(out.right) * (inv.allFinite() ? one_norm(inv) : INFINITY);
    out.condition_number = std::isfinite(cond) ? cond : INFINITY;
    out.ill_conditioned = !(out.condition_number <= options.conditioning_threshold);
    if (!out.ill_conditioned) {
        out.left = std::move(inv);
    } else {
        // zgeev's own left vectors, scaled pairwise; biorthogonality inside
        // degenerate clusters is not guaranteed and shows in the residual.
        out.left = std::move(lapack_left);
        for (Eigen::Index k = 0; k < n; ++k) {
            const cd s = out.left.row(k) * out.right.col(k);
            if (std::abs(s) > 0.0) out.left.row(k) /= s;
        }
    }

    const Matrix overlap = out.left * out.right;
    out.biorthogonality_residual = (overlap - Matrix::Identity(n, n)).cwiseAbs().maxCoeff();

    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = i + 1; j < n; ++j) {
            const double scale = std::max({1.0, std::abs(out.values(i)), std::abs(out.values(j))});
            if (std::abs(out.values(i) - out.values(j)) <= options.degeneracy_tolerance * scale)
                out.degenerate_pairs.emplace_back(static_cast<int>(i), static_cast<int>(j));
        }

    if (options.compute_reconstruction) {
        const double anorm = std::max(a.norm(), 1e-300);
        const Matrix ar = a * out.right;
        double worst = 0.0;
        for (Eigen::Index k = 0; k < n; ++k)
            worst = std::max(worst, (ar.col(k) - out.values(k) * out.right.col(k)).norm());
        out.eigenpair_residual = worst / anorm;
        const Matrix recon = out.right * out.values.asDiagonal() * out.left;
        out.reconstruction_residual = (a - recon).norm() / anorm;
    }
    return out;
}

SvdResult svd(const Matrix& a) {
    if (!a.allFinite()) throw InputError("svd: input contains NaN or Inf");
    SvdResult out;
    if (a.size() == 0) return out;
    Eigen::BDCSVD<Matrix> dec(a, Eigen::ComputeThinU | Eigen::ComputeThinV);
    if (dec.info() != Eigen::Success) throw ConvergenceError("svd: bidiagonal divide-and-conquer did not converge");
    out.u = dec.matrixU();
    out.singular_values = dec.singularValues();
    out.v = dec.matrixV();
    const double anorm = a.norm();
    if (anorm > 0.0) {
        const Matrix recon = out.u * out.singular_values.cast<cd>().asDiagonal() * out.v.adjoint();
        out.residual = (a - recon).norm() / anorm;
    }
    return out;
}

SvdResult svd(const ComplexTensor& t, std::size_t row_axes) {
    return svd(t.as_matrix(row_axes));
}

LeadingEigenpair power_iteration(const std::function<Vector(const Vector&)>& apply, Vector start,
                                 double tolerance, int max_iterations) {
    if (start.size() == 0) throw DimensionError("power_iteration: empty start vector");
    double nrm = start.norm();
    if (!(nrm > 0.0)) throw InputError("power_iteration: zero start vector");
    Vector v = start / nrm;
    LeadingEigenpair out;
    for (int it = 1; it <= max_iterations; ++it) {
        Vector av = apply(v);
        const cd lambda = v.dot(av);  // v^H A v
        const double res = (av - lambda * v).norm();
        out.value = lambda;
        out.iterations = it;
        out.residual = res;
        nrm = av.norm();
        if (!(nrm > 0.0)) throw ConvergenceError("power_iteration: iterate collapsed to zero");
        if (res <= tolerance * std::max(1.0, std::abs(lambda))) {
            out.vector = v;
            return out;
        }
        v = av / nrm;
    }
    throw ConvergenceError("power_iteration: no convergence after " + std::to_string(max_iterations) +
                           " iterations (residual " + std::to_string(out.residual) + ")");
}

Matrix apply_lifted(const Matrix& p, const Matrix& x, Eigen::Index chi) {
    const Eigen::Index dim = p.rows();
    if (p.cols() != dim || x.rows() != dim * chi)
        throw DimensionError("apply_lifted: superoperator/joint dimension mismatch");
    Matrix out(x.rows(), x.cols());
    const Eigen::Index m = x.cols();
    Eigen::Map<const Matrix> xin(x.data(), chi, dim * m);
    Eigen::Map<Matrix> xout(out.data(), chi, dim * m);
    const Matrix pt = p.transpose();
    for (Eigen::Index c = 0; c < m; ++c) xout.middleCols(c * dim, dim).noalias() = xin.middleCols(c * dim, dim) * pt;
    return out;
}

Vector apply_lifted(const Matrix& p, const Vector& x, Eigen::Index chi) {
    const Eigen::Index dim = p.rows();
    if (p.cols() != dim || x.size() != dim * chi)
        throw DimensionError("apply_lifted: superoperator/joint dimension mismatch");
    Vector out(x.size());
    Eigen::Map<const Matrix> xin(x.data(), chi, dim);
    Eigen::Map<Matrix> xout(out.data(), chi, dim);
    xout.noalias() = xin * p.transpose();
    return out;
}

RowVector apply_lifted_right(const RowVector& x, const Matrix& p, Eigen::Index chi) {
    const Eigen::Index dim = p.rows();
    if (p.cols() != dim || x.size() != dim * chi)
        throw DimensionError("apply_lifted_right: superoperator/joint dimension mismatch");
    RowVector out(x.size());
    Eigen::Map<const Matrix> xin(x.data(), chi, dim);
    Eigen::Map<Matrix> xout(out.data(), chi, dim);
    xout.noalias() = xin * p;
    return out;
}

}  // namespace floquet::num
