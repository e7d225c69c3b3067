// embedding.cpp — Liouville-space pseudomode generator and semi-group IF construction

#include "floquet_if/embedding.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "floquet_if/errors.hpp"
#include "floquet_if/linalg.hpp"
#include "floquet_if/operators.hpp"

namespace floquet::embedding {

// Each fit term a e^{-nu t} is realized by a pair of one-sided oscillators
// with rates nu (ket side) and conj(nu) (bra side). Writing s = sqrt|a| and
// S_- = S_L - S_R for the commutator action, the generator is
//   sum_j -rate_j n_j
//   + sum_k [ -i (a_k/s_k) S_L c_kL^+  + i (conj a_k / s_k) S_R c_kR^+  - i s_k S_- (c_kL + c_kR) ]
// with c^+, c the truncated ladder maps on the auxiliary Liouville index.
// Tracing the hierarchy with the vacuum functional reproduces the Gaussian
// influence of C(t) = sum_k a_k e^{-nu_k t} exactly for complex a_k.

int PseudomodeSpec::cutoff_for(std::size_t term) const {
    return term < cutoffs.size() ? cutoffs[term] : default_cutoff;
}

void PseudomodeSpec::validate(std::size_t n_terms) const {
    if (!cutoffs.empty() && cutoffs.size() != n_terms)
        throw InputError("embedding.cutoffs must list one N_k per fit term (" + std::to_string(n_terms) + ")");
    for (std::size_t k = 0; k < n_terms; ++k)
        if (cutoff_for(k) < 2) throw InputError("embedding cutoff N_k must be >= 2");
    if (memory_budget_bytes == 0) throw InputError("embedding memory budget must be positive");
}

// ---------------------------------------------------------------------------

BondBasis::BondBasis(std::vector<int> levels, int cap) : levels_(std::move(levels)), cap_(cap) {
    const std::size_t m = levels_.size();
    // Mixed-radix codes must fit in 64 bits.
    long double span = 1.0L;
    for (int l : levels_) span *= static_cast<long double>(l);
    if (span > 1.8e19L) throw ResourceError("bond basis too large to index");

    std::vector<int> occ(m, 0);
    n_states_ = 0;
    occupations_.clear();
    if (m == 0) {
        n_states_ = 1;
    } else {
        while (true) {
            const int total = std::accumulate(occ.begin(), occ.end(), 0);
            if (cap_ < 0 || total <= cap_) {
                occupations_.insert(occupations_.end(), occ.begin(), occ.end());
                ++n_states_;
            }
            // lexicographic odometer, first mode most significant
            std::size_t ax = m;
            while (ax-- > 0) {
                if (++occ[ax] < levels_[ax]) break;
                occ[ax] = 0;
            }
            if (ax == static_cast<std::size_t>(-1)) break;
        }
    }
    lookup_.reserve(n_states_);
    for (std::size_t i = 0; i < n_states_; ++i)
        lookup_.emplace(code(occupations_.data() + i * m), static_cast<Eigen::Index>(i));

    mirror_.resize(n_states_);
    std::vector<int> swapped(m);
    for (std::size_t i = 0; i < n_states_; ++i) {
        for (std::size_t j = 0; j + 1 < m; j += 2) {
            swapped[j] = occupations_[i * m + j + 1];
            swapped[j + 1] = occupations_[i * m + j];
        }
        if (m % 2 == 1) swapped[m - 1] = occupations_[i * m + m - 1];
        const Eigen::Index k = m ? index_of(swapped) : 0;
        mirror_[i] = k < 0 ? static_cast<Eigen::Index>(i) : k;
    }
}

std::uint64_t BondBasis::code(const int* occ) const {
    std::uint64_t c = 0;
    for (std::size_t j = 0; j < levels_.size(); ++j) c = c * static_cast<std::uint64_t>(levels_[j]) + static_cast<std::uint64_t>(occ[j]);
    return c;
}

Eigen::Index BondBasis::index_of(const std::vector<int>& occ) const {
    if (occ.size() != levels_.size()) return -1;
    for (std::size_t j = 0; j < occ.size(); ++j)
        if (occ[j] < 0 || occ[j] >= levels_[j]) return -1;
    const auto it = lookup_.find(code(occ.data()));
    return it == lookup_.end() ? -1 : it->second;
}

// ---------------------------------------------------------------------------

EnvironmentGenerator build_environment_generator(const bath::ExponentialBathFit& fit, const PseudomodeSpec& pm,
                                                 const Matrix& S) {
    if (S.rows() != S.cols() || S.rows() == 0) throw InputError("coupling operator S must be square and non-empty");
    if (!ops::is_hermitian(S, 1e-12)) throw InputError("coupling operator S must be Hermitian");
    for (const auto& t : fit.terms)
        if (!(t.rate.real() > 0.0)) throw InputError("fit term with non-decaying rate passed to the embedding");

    EnvironmentGenerator gen;
    gen.d = S.rows();
    gen.coupling = S;
    gen.terms = fit.terms;
    std::stable_sort(gen.terms.begin(), gen.terms.end(),
                     [](const bath::ExpTerm& a, const bath::ExpTerm& b) { return std::abs(a.amplitude) > std::abs(b.amplitude); });
    pm.validate(gen.terms.size());

    std::vector<int> levels;
    for (std::size_t k = 0; k < gen.terms.size(); ++k) {
        levels.push_back(pm.cutoff_for(k));
        levels.push_back(pm.cutoff_for(k));
    }
    gen.basis = BondBasis(levels, pm.excitation_cap);
    gen.chi = gen.basis.size();

    const Eigen::Index D = gen.d * gen.d;
    const Eigen::Index n = D * gen.chi;
    // generator + exponential workspace of a handful of dense n x n matrices
    const long double need = 8.0L * static_cast<long double>(n) * static_cast<long double>(n) * sizeof(cd);
    if (need > static_cast<long double>(pm.memory_budget_bytes)) {
        std::ostringstream os;
        os << "joint dimension " << n << " (chi = " << gen.chi << ") needs ~" << static_cast<double>(need) / (1 << 20)
           << " MiB, above the memory budget of " << pm.memory_budget_bytes / (1 << 20) << " MiB";
        throw ResourceError(os.str());
    }

    const Matrix SL = ops::left_multiplication(S);
    const Matrix SR = ops::right_multiplication(S);
    const Matrix Sminus = -kI * (SL - SR);

    const std::size_t modes = 2 * gen.terms.size();
    std::vector<cd> rate(modes), scale(modes);
    std::vector<Matrix> source(modes);
    for (std::size_t k = 0; k < gen.terms.size(); ++k) {
        const cd a = gen.terms[k].amplitude;
        const double s = std::sqrt(std::abs(a));
        rate[2 * k] = gen.terms[k].rate;
        rate[2 * k + 1] = std::conj(gen.terms[k].rate);
        scale[2 * k] = scale[2 * k + 1] = s;
        if (s > 0.0) {
            source[2 * k] = (-kI * a / s) * SL;
            source[2 * k + 1] = (kI * std::conj(a) / s) * SR;
        } else {
            source[2 * k] = Matrix::Zero(D, D);
            source[2 * k + 1] = Matrix::Zero(D, D);
        }
    }

    const Eigen::Index chi = gen.chi;
    gen.generator = Matrix::Zero(n, n);
    Matrix& G = gen.generator;
    std::vector<int> occ(modes);
    for (Eigen::Index i = 0; i < chi; ++i) {
        cd diag = 0.0;
        for (std::size_t j = 0; j < modes; ++j) {
            occ[j] = gen.basis.occupation(i, j);
            diag -= rate[j] * static_cast<double>(occ[j]);
        }
        for (Eigen::Index mu = 0; mu < D; ++mu) G(mu * chi + i, mu * chi + i) += diag;
        for (std::size_t j = 0; j < modes; ++j) {
            // raising: state i -> i + e_j
            ++occ[j];
            const Eigen::Index up = gen.basis.index_of(occ);
            --occ[j];
            if (up >= 0) {
                const double f = std::sqrt(static_cast<double>(occ[j] + 1));
                for (Eigen::Index mu = 0; mu < D; ++mu)
                    for (Eigen::Index nu = 0; nu < D; ++nu)
                        if (source[j](mu, nu) != 0.0) G(mu * chi + up, nu * chi + i) += f * source[j](mu, nu);
            }
            if (occ[j] > 0) {
                --occ[j];
                const Eigen::Index dn = gen.basis.index_of(occ);
                ++occ[j];
                const cd f = std::sqrt(static_cast<double>(occ[j])) * scale[j];
                if (dn >= 0 && f != 0.0)
                    for (Eigen::Index mu = 0; mu < D; ++mu)
                        for (Eigen::Index nu = 0; nu < D; ++nu)
                            if (Sminus(mu, nu) != 0.0) G(mu * chi + dn, nu * chi + i) += f * Sminus(mu, nu);
            }
        }
    }
    return gen;
}

// ---------------------------------------------------------------------------

num::ComplexTensor SemiGroupIF::tensor() const {
    const auto D = static_cast<std::size_t>(d * d), c = static_cast<std::size_t>(chi);
    return num::ComplexTensor::from_matrix(q, {D, c, D, c});
}

RowVector SemiGroupIF::trace_functional() const {
    const RowVector tr = ops::trace_row(d);
    RowVector out = RowVector::Zero(joint_dimension());
    for (Eigen::Index mu = 0; mu < d * d; ++mu)
        if (tr(mu) != 0.0) out.segment(mu * chi, chi) = tr(mu) * v_l;
    return out;
}

Vector SemiGroupIF::embed(const Matrix& rho) const {
    if (rho.rows() != d || rho.cols() != d) throw DimensionError("embed: density matrix has wrong dimension");
    const Vector v = ops::vec(rho);
    Vector out(joint_dimension());
    for (Eigen::Index mu = 0; mu < d * d; ++mu) out.segment(mu * chi, chi) = v(mu) * v_r;
    return out;
}

Matrix SemiGroupIF::reduce(const Vector& joint) const {
    if (joint.size() != joint_dimension()) throw DimensionError("reduce: joint vector has wrong length");
    Vector v(d * d);
    for (Eigen::Index mu = 0; mu < d * d; ++mu) v(mu) = (v_l * joint.segment(mu * chi, chi))(0, 0);
    return ops::unvec(v, d);
}

Vector SemiGroupIF::joint_adjoint(const Vector& joint) const {
    if (joint.size() != joint_dimension()) throw DimensionError("joint_adjoint: joint vector has wrong length");
    Vector out(joint.size());
    for (Eigen::Index a = 0; a < d; ++a)
        for (Eigen::Index b = 0; b < d; ++b) {
            const Eigen::Index mu = a * d + b, mu_t = b * d + a;
            for (Eigen::Index r = 0; r < chi; ++r)
                out(mu * chi + r) = std::conj(joint(mu_t * chi + mirror[static_cast<std::size_t>(r)]));
        }
    return out;
}

SemiGroupIF build_semigroup_if(const EnvironmentGenerator& gen, double dt, double expm_tolerance) {
    if (!(dt > 0.0)) throw InputError("build_semigroup_if: dt must be positive");
    SemiGroupIF sg;
    sg.d = gen.d;
    sg.chi = gen.chi;
    sg.dt = dt;
    sg.q = num::matrix_exponential(gen.generator * dt, expm_tolerance);
    sg.v_l = RowVector::Zero(gen.chi);
    sg.v_l(0) = 1.0;
    sg.v_r = Vector::Zero(gen.chi);
    sg.v_r(0) = 1.0;
    sg.mirror = gen.basis.mirror();
    sg.coupling = gen.coupling;
    return sg;
}

SemiGroupIF identity_if(Eigen::Index d, double dt, const Matrix& coupling) {
    SemiGroupIF sg;
    sg.d = d;
    sg.chi = 1;
    sg.dt = dt;
    sg.q = Matrix::Identity(d * d, d * d);
    sg.v_l = RowVector::Ones(1);
    sg.v_r = Vector::Ones(1);
    sg.mirror = {0};
    sg.coupling = coupling.size() ? coupling : Matrix(Matrix::Zero(d, d));
    return sg;
}

IfDiagnostics if_diagnostics(const SemiGroupIF& sg, bool singular_profile) {
    IfDiagnostics rep;
    rep.chi = sg.chi;
    const RowVector tf = sg.trace_functional();
    rep.trace_duality_residual = (tf * sg.q - tf).cwiseAbs().maxCoeff();
    rep.boundary_overlap = std::abs((sg.v_l * sg.v_r)(0, 0));
    num::EigOptions opt;
    opt.compute_reconstruction = false;
    const auto dec = num::eig_general(sg.q, opt);
    rep.spectral_radius = dec.size() ? std::abs(dec.values(0)) : 0.0;
    if (singular_profile) {
        const std::size_t axes[] = {0, 2, 1, 3};
        const auto t = sg.tensor().permute(axes);
        rep.singular_values = num::svd(t, 2).singular_values;
    }
    rep.construction_note =
        "Liouville-space pseudomode pairs (ket/bra oscillators per fit term); the auxiliary space is not a "
        "physical density matrix, only the reduced system dynamics is required to be physical";
    return rep;
}

CutoffStudy converge_cutoffs(const bath::ExponentialBathFit& fit, PseudomodeSpec start, const Matrix& S, double dt,
                             const std::function<Vector(const SemiGroupIF&)>& observable, double threshold,
                             int max_rounds) {
    CutoffStudy study;
    auto evaluate = [&](const PseudomodeSpec& pm) {
        return observable(build_semigroup_if(build_environment_generator(fit, pm, S), dt));
    };
    Vector previous = evaluate(start);
    study.accepted = start;
    for (int round = 0; round < max_rounds; ++round) {
        PseudomodeSpec next = study.accepted;
        if (next.cutoffs.empty()) ++next.default_cutoff;
        for (auto& n : next.cutoffs) ++n;
        if (next.excitation_cap >= 0) ++next.excitation_cap;
        Vector current;
        try {
            current = evaluate(next);
        } catch (const ResourceError&) {
            break;
        }
        const double change = (current - previous).cwiseAbs().maxCoeff();
        study.changes.push_back(change);
        study.last_change = change;
        if (change < threshold) {
            study.converged = true;
            return study;
        }
        study.accepted = next;
        previous = std::move(current);
    }
    return study;
}

}  // namespace floquet::embedding
