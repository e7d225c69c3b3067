// embedding.hpp — Pseudomode embedding of a fitted bath and the semi-group influence functional

#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <unordered_map>
#include <vector>

#include "floquet_if/bath.hpp"
#include "floquet_if/tensor.hpp"
#include "floquet_if/types.hpp"

namespace floquet::embedding {

/// Auxiliary-space truncation.
///
/// Every fit term k is carried by two damped oscillators, one attached to the
/// left (ket) and one to the right (bra) side of the system density matrix.
/// Both are truncated at N_k levels, so without an excitation cap the bond
/// dimension is chi = (prod_k N_k)^2. The optional cap bounds the total
/// number of excitations across all oscillators.
struct PseudomodeSpec {
    std::vector<int> cutoffs;  ///< N_k per fit term (descending |a_k| order); empty: default_cutoff
    int default_cutoff = 4;
    int excitation_cap = 3;  ///< < 0 disables the cap
    std::size_t memory_budget_bytes = std::size_t{3} << 30;

    int cutoff_for(std::size_t term) const;
    void validate(std::size_t n_terms) const;
};

/// Multi-index basis of the truncated oscillator space, vacuum first.
class BondBasis {
public:
    BondBasis() = default;
    BondBasis(std::vector<int> levels, int cap);

    Eigen::Index size() const noexcept { return static_cast<Eigen::Index>(n_states_); }
    std::size_t modes() const noexcept { return levels_.size(); }
    int occupation(Eigen::Index state, std::size_t mode) const {
        return occupations_[static_cast<std::size_t>(state) * levels_.size() + mode];
    }
    /// Index of the occupation pattern or -1 if truncated away.
    Eigen::Index index_of(const std::vector<int>& occ) const;
    /// Image of each state when paired left/right oscillators are exchanged.
    const std::vector<Eigen::Index>& mirror() const noexcept { return mirror_; }
    const std::vector<int>& levels() const noexcept { return levels_; }
    int cap() const noexcept { return cap_; }

private:
    std::uint64_t code(const int* occ) const;

    std::vector<int> levels_;
    int cap_ = -1;
    std::size_t n_states_ = 1;
    std::vector<int> occupations_;
    std::unordered_map<std::uint64_t, Eigen::Index> lookup_;
    std::vector<Eigen::Index> mirror_;
};

/// Environment-only generator on the joint (system Liouville ⊗ bond) space.
struct EnvironmentGenerator {
    Matrix generator;  ///< index mu * chi + r
    Eigen::Index d = 0;
    Eigen::Index chi = 1;
    BondBasis basis;
    std::vector<bath::ExpTerm> terms;  ///< ordering used in the bond space
    Matrix coupling;                   ///< S
};

EnvironmentGenerator build_environment_generator(const bath::ExponentialBathFit& fit, const PseudomodeSpec& pm,
                                                 const Matrix& S);

/// Repeating tensor q = exp(L dt) with boundary vectors.
struct SemiGroupIF {
    Matrix q;        ///< (mu, r; mu', r') flattened as rows mu*chi+r, columns mu'*chi+r'
    RowVector v_l;   ///< closes the bond leg
    Vector v_r;      ///< initial bond state (oscillator vacuum)
    double dt = 0.0;
    Eigen::Index d = 0;
    Eigen::Index chi = 1;
    std::vector<Eigen::Index> mirror;  ///< bond-space left/right exchange
    Matrix coupling;                   ///< S the environment couples to

    Eigen::Index joint_dimension() const noexcept { return d * d * chi; }
    /// q as a rank-4 tensor (mu, r, mu', r').
    num::ComplexTensor tensor() const;
    /// (system trace ⊗ v_l).
    RowVector trace_functional() const;
    /// vec(rho) ⊗ v_r.
    Vector embed(const Matrix& rho) const;
    /// Contract the bond leg with v_l.
    Matrix reduce(const Vector& joint) const;
    /// Joint analogue of the adjoint: rho -> rho^dagger with left/right oscillators exchanged.
    Vector joint_adjoint(const Vector& joint) const;
};

SemiGroupIF build_semigroup_if(const EnvironmentGenerator& gen, double dt, double expm_tolerance = 1e-12);
/// Trivial IF (no environment): chi = 1, q = identity.
SemiGroupIF identity_if(Eigen::Index d, double dt, const Matrix& coupling = Matrix());

struct IfDiagnostics {
    Eigen::Index chi = 0;
    double spectral_radius = 0.0;
    double trace_duality_residual = 0.0;
    double boundary_overlap = 0.0;  ///< v_l . v_r
    RealVector singular_values;     ///< of the (mu mu') x (r r') matricization
    std::string construction_note;
};

IfDiagnostics if_diagnostics(const SemiGroupIF& sg, bool singular_profile = true);

/// Outcome of raising every N_k until an observable stops changing.
struct CutoffStudy {
    PseudomodeSpec accepted;
    double last_change = 0.0;
    bool converged = false;
    std::vector<double> changes;  ///< change after each increment
};

/// Increases all cutoffs (and the excitation cap, when set) by one until the
/// max-abs change of `observable` drops below `threshold` or the memory
/// budget is hit.
CutoffStudy converge_cutoffs(const bath::ExponentialBathFit& fit, PseudomodeSpec start, const Matrix& S, double dt,
                             const std::function<Vector(const SemiGroupIF&)>& observable, double threshold = 1e-6,
                             int max_rounds = 4);

}  // namespace floquet::embedding
