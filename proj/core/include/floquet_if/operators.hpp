// operators.hpp — Spin operators and Liouville-space (vectorized) superoperators

#pragma once

#include "floquet_if/types.hpp"

namespace floquet::ops {

// Vectorization is row-major: rho^mu = <mu+|rho|mu->, mu = mu+ * d + mu-.
// With this convention A rho B  <->  (A ⊗ B^T) vec(rho).

Matrix pauli_x();
Matrix pauli_y();
Matrix pauli_z();
Matrix identity(Eigen::Index d);

Matrix kron(const Matrix& a, const Matrix& b);

Vector vec(const Matrix& rho);
Matrix unvec(const Vector& v, Eigen::Index d);

/// rho -> A rho
Matrix left_multiplication(const Matrix& a);
/// rho -> rho B
Matrix right_multiplication(const Matrix& b);
/// rho -> -i [H, rho]
Matrix commutator_generator(const Matrix& h);
/// rho -> U rho U^dagger
Matrix unitary_channel(const Matrix& u);

/// Row vector t with t . vec(rho) = tr(rho).
RowVector trace_row(Eigen::Index d);

/// Max-norm of A - A^H.
double hermiticity_deviation(const Matrix& a);
bool is_hermitian(const Matrix& a, double tol = 1e-12);

/// Throws InputError unless rho is Hermitian, unit trace and positive to `tol`.
void validate_density_matrix(const Matrix& rho, double tol = 1e-10);

/// Smallest eigenvalue of the Hermitian part of a.
double min_eigenvalue(const Matrix& a);

/// sigma on qubit A (first factor) or B (second factor) of a two-qubit space.
Matrix on_qubit_a(const Matrix& op);
Matrix on_qubit_b(const Matrix& op);

/// Projector onto the two-qubit singlet (|01> - |10>)/sqrt 2.
Matrix singlet_projector();

/// Expectation tr(op rho).
cd expectation(const Matrix& op, const Matrix& rho);

}  // namespace floquet::ops
