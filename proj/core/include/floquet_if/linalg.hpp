// linalg.hpp — Matrix exponential, general eigendecomposition, SVD

#pragma once

#include <functional>
#include <optional>
#include <utility>
#include <vector>

#include "floquet_if/tensor.hpp"
#include "floquet_if/types.hpp"

namespace floquet::num {

inline constexpr double kDefaultExpmTolerance = 1e-12;
inline constexpr double kDefaultConditioningThreshold = 1e10;

/// exp(a) by scaling and squaring around a degree-13 Padé approximant.
Matrix matrix_exponential(const Matrix& a, double tolerance = kDefaultExpmTolerance);
ComplexTensor matrix_exponential(const ComplexTensor& a, double tolerance = kDefaultExpmTolerance);

struct EigOptions {
    /// Above this eigenvector-matrix condition number the decomposition is flagged.
    double conditioning_threshold = kDefaultConditioningThreshold;
    /// Relative gap below which two eigenvalues are reported as degenerate.
    double degeneracy_tolerance = 1e-8;
    /// ||A - R diag(l) L|| / ||A|| costs one extra matrix product.
    bool compute_reconstruction = true;
};

/// Eigenpairs of a general square matrix.
///
/// Eigenvalues are sorted by descending modulus, ties broken by descending real
/// part and then descending imaginary part. Right eigenvectors are the columns
/// of `right` (unit 2-norm); left eigenvectors are the rows of `left`,
/// scaled so that left * right = identity.
struct EigenDecomposition {
    Vector values;
    Matrix right;
    Matrix left;
    double biorthogonality_residual = 0.0;  ///< max |left*right - I|
    double reconstruction_residual = 0.0;   ///< ||A - R diag L|| / ||A||
    double eigenpair_residual = 0.0;        ///< max_i ||A r_i - l_i r_i|| / ||A||
    double condition_number = 1.0;          ///< ||R||_1 ||R^-1||_1
    bool ill_conditioned = false;
    /// Index pairs (i, j) of eigenvalues closer than the degeneracy tolerance.
    std::vector<std::pair<int, int>> degenerate_pairs;

    Eigen::Index size() const noexcept { return values.size(); }
    /// Eigenvalue condition number ||l_i|| ||r_i||.
    double eigenvalue_condition(Eigen::Index i) const;
};

EigenDecomposition eig_general(const Matrix& a, const EigOptions& options = {});

/// Ordering used for eigenvalue lists; exposed for reuse.
bool eigenvalue_order(cd a, cd b);

struct SvdResult {
    Matrix u;
    RealVector singular_values;  ///< non-negative, descending
    Matrix v;
    double residual = 0.0;  ///< ||A - U S V^H|| / ||A||
};

SvdResult svd(const Matrix& a);
SvdResult svd(const ComplexTensor& t, std::size_t row_axes);

struct LeadingEigenpair {
    cd value;
    Vector vector;
    int iterations = 0;
    double residual = 0.0;
};

/// Power iteration for the dominant eigenpair of a linear map given by `apply`.
LeadingEigenpair power_iteration(const std::function<Vector(const Vector&)>& apply, Vector start,
                                 double tolerance = 1e-12, int max_iterations = 100000);

// ---------------------------------------------------------------------------
// Joint (system x bond) vectors are laid out with the system Liouville index
// outermost: index = mu * chi + r.

/// (P ⊗ 1_chi) X for a system superoperator P acting on the leading index.
Matrix apply_lifted(const Matrix& p, const Matrix& x, Eigen::Index chi);
Vector apply_lifted(const Matrix& p, const Vector& x, Eigen::Index chi);
/// X (P ⊗ 1_chi), i.e. the action on a row vector.
RowVector apply_lifted_right(const RowVector& x, const Matrix& p, Eigen::Index chi);

/// Max-norm of A - A^H.
double hermiticity_deviation(const Matrix& a);
bool all_finite(const Matrix& a);

}  // namespace floquet::num
