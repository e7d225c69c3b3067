// operators.cpp — Spin operators and vectorized superoperators

#include "floquet_if/operators.hpp"

#include <algorithm>
#include <string>

#include <Eigen/Eigenvalues>

#include "floquet_if/errors.hpp"

namespace floquet::ops {

Matrix pauli_x() {
    Matrix m(2, 2);
    m << 0, 1, 1, 0;
    return m;
}

Matrix pauli_y() {
    Matrix m(2, 2);
    m << 0, -kI, kI, 0;
    return m;
}

Matrix pauli_z() {
    Matrix m(2, 2);
    m << 1, 0, 0, -1;
    return m;
}

Matrix identity(Eigen::Index d) {
    return Matrix::Identity(d, d);
}

Matrix kron(const Matrix& a, const Matrix& b) {
    Matrix out(a.rows() * b.rows(), a.cols() * b.cols());
    for (Eigen::Index i = 0; i < a.rows(); ++i)
        for (Eigen::Index j = 0; j < a.cols(); ++j)
            out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    return out;
}

Vector vec(const Matrix& rho) {
    const Eigen::Index d = rho.rows();
    Vector v(rho.size());
    for (Eigen::Index i = 0; i < d; ++i)
        for (Eigen::Index j = 0; j < rho.cols(); ++j) v(i * rho.cols() + j) = rho(i, j);
    return v;
}

Matrix unvec(const Vector& v, Eigen::Index d) {
    if (v.size() != d * d) throw DimensionError("unvec: vector length " + std::to_string(v.size()) +
                                                " is not d^2 for d = " + std::to_string(d));
    Matrix rho(d, d);
    for (Eigen::Index i = 0; i < d; ++i)
        for (Eigen::Index j = 0; j < d; ++j) rho(i, j) = v(i * d + j);
    return rho;
}

Matrix left_multiplication(const Matrix& a) {
    return kron(a, identity(a.rows()));
}

Matrix right_multiplication(const Matrix& b) {
    return kron(identity(b.rows()), b.transpose());
}

Matrix commutator_generator(const Matrix& h) {
    return -kI * (left_multiplication(h) - right_multiplication(h));
}

Matrix unitary_channel(const Matrix& u) {
    return kron(u, u.conjugate());
}

RowVector trace_row(Eigen::Index d) {
    RowVector t = RowVector::Zero(d * d);
    for (Eigen::Index i = 0; i < d; ++i) t(i * d + i) = 1.0;
    return t;
}

double hermiticity_deviation(const Matrix& a) {
    if (a.size() == 0) return 0.0;
    return (a - a.adjoint()).cwiseAbs().maxCoeff();
}

bool is_hermitian(const Matrix& a, double tol) {
    return a.rows() == a.cols() && hermiticity_deviation(a) <= tol;
}

double min_eigenvalue(const Matrix& a) {
    const Matrix h = 0.5 * (a + a.adjoint());
    Eigen::SelfAdjointEigenSolver<Matrix> es(h, Eigen::EigenvaluesOnly);
    return es.eigenvalues().minCoeff();
}

void validate_density_matrix(const Matrix& rho, double tol) {
    if (rho.rows() != rho.cols()) throw InputError("density matrix must be square");
    if (!rho.allFinite()) throw InputError("density matrix has non-finite entries");
    if (hermiticity_deviation(rho) > tol) throw InputError("density matrix is not Hermitian");
    if (std::abs(rho.trace() - 1.0) > tol) throw InputError("density matrix trace is not 1");
    if (min_eigenvalue(rho) < -tol) throw InputError("density matrix is not positive semidefinite");
}

Matrix on_qubit_a(const Matrix& op) {
    return kron(op, identity(2));
}

Matrix on_qubit_b(const Matrix& op) {
    return kron(identity(2), op);
}

Matrix singlet_projector() {
    Vector s = Vector::Zero(4);
    s(1) = 1.0 / std::sqrt(2.0);
    s(2) = -1.0 / std::sqrt(2.0);
    return s * s.adjoint();
}

cd expectation(const Matrix& op, const Matrix& rho) {
    return (op * rho).trace();
}

}  // namespace floquet::ops
