// entanglement.cpp — Two-qubit concurrence, concurrence maps and spectral mode analysis

#include "floquet_if/entanglement.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <mutex>
#include <sstream>
#include <thread>

#include "floquet_if/errors.hpp"
#include "floquet_if/operators.hpp"

namespace floquet::obs {

namespace {

Matrix default_reference(Eigen::Index d) {
    Matrix r = Matrix::Zero(d, d);
    r(0, 0) = 1.0;
    return r;
}

/// Hermitian part with eigenvalues clipped at zero, or nullopt-like flag when too negative.
bool clipped_state(const Matrix& rho, double tol, Matrix& out) {
    const Matrix h = 0.5 * (rho + rho.adjoint());
    Eigen::SelfAdjointEigenSolver<Matrix> es(h);
    RealVector ev = es.eigenvalues();
    if (ev.minCoeff() < -tol) return false;
    ev = ev.cwiseMax(0.0);
    const double tr = ev.sum();
    if (!(tr > 0.0)) return false;
    out = es.eigenvectors() * (ev / tr).cast<cd>().asDiagonal() * es.eigenvectors().adjoint();
    return true;
}

double min_hermitian_eigenvalue(const Matrix& a) {
    Eigen::SelfAdjointEigenSolver<Matrix> es(0.5 * (a + a.adjoint()), Eigen::EigenvaluesOnly);
    return es.eigenvalues().minCoeff();
}

}  // namespace

double concurrence(const Matrix& rho, double clip_tolerance) {
    if (rho.rows() != 4 || rho.cols() != 4) throw DimensionError("concurrence needs a 4x4 density matrix");
    const double scale = std::max(1.0, rho.cwiseAbs().maxCoeff());
    if (ops::hermiticity_deviation(rho) > 1e-8 * scale) throw InputError("concurrence: state is not Hermitian");
    if (std::abs(rho.trace() - 1.0) > 1e-8) throw InputError("concurrence: state does not have unit trace");
    Matrix r;
    if (!clipped_state(rho, clip_tolerance, r)) throw InputError("concurrence: state has negative eigenvalues");

    const Matrix yy = ops::kron(ops::pauli_y(), ops::pauli_y());
    const Matrix tilde = yy * r.conjugate() * yy;
    Eigen::SelfAdjointEigenSolver<Matrix> es(r);
    const Matrix sq = es.eigenvectors() * es.eigenvalues().cwiseMax(0.0).cwiseSqrt().cast<cd>().asDiagonal() *
                      es.eigenvectors().adjoint();
    const Matrix m = sq * tilde * sq;
    Eigen::SelfAdjointEigenSolver<Matrix> ms(0.5 * (m + m.adjoint()), Eigen::EigenvaluesOnly);
    RealVector lam = ms.eigenvalues().cwiseMax(0.0).cwiseSqrt();
    std::sort(lam.data(), lam.data() + lam.size(), std::greater<>());
    return std::clamp(lam(0) - lam(1) - lam(2) - lam(3), 0.0, 1.0);
}

double period_averaged_concurrence(const engine::SteadyState& ss) {
    if (ss.micromotion.empty()) return concurrence(ss.rho);
    double acc = 0.0;
    for (const auto& r : ss.micromotion) acc += concurrence(r);
    return acc / static_cast<double>(ss.micromotion.size());
}

ConcurrencePoint concurrence_point(const ModelFactory& factory, const IfProvider& provider, double omega_d, double eps_d,
                                   const ConcurrenceMapOptions& options) {
    ConcurrencePoint p;
    p.omega_d = omega_d;
    p.eps_d = eps_d;
    p.value = std::numeric_limits<double>::quiet_NaN();
    try {
        const model::SystemModel m = factory(omega_d, eps_d);
        const auto grid = model::TrotterGrid::for_model(m, options.dt_target);
        p.dt = grid.dt;
        p.steps_per_period = grid.steps_per_period;
        auto sg = provider(grid.dt);
        auto fp = engine::assemble_step_propagators(sg, m, grid, options.channels);
        engine::SteadyStateOptions so = options.steady;
        if (!so.reference) so.reference = default_reference(m.d);
        const auto ss = engine::steady_state(fp, so);
        p.value = period_averaged_concurrence(ss);
        p.ok = true;
    } catch (const std::exception& e) {
        p.ok = false;
        p.flag = e.what();
    }
    return p;
}

ConcurrenceMap concurrence_map(const ModelFactory& factory, const IfProvider& provider,
                               const std::vector<double>& omega_d, const std::vector<double>& eps_d,
                               const ConcurrenceMapOptions& options) {
    if (omega_d.empty() || eps_d.empty()) throw InputError("concurrence map grids must be nonempty");
    ConcurrenceMap map;
    map.omega_d = omega_d;
    map.eps_d = eps_d;
    const std::size_t total = omega_d.size() * eps_d.size();
    map.points.resize(total);

    std::mutex provider_mutex;
    const IfProvider guarded = [&](double dt) {
        std::lock_guard<std::mutex> lock(provider_mutex);
        return provider(dt);
    };
    std::atomic<std::size_t> next{0};
    auto work = [&] {
        for (std::size_t i = next++; i < total; i = next++) {
            const std::size_t ie = i / omega_d.size();
            const std::size_t iw = i % omega_d.size();
            map.points[i] = concurrence_point(factory, guarded, omega_d[iw], eps_d[ie], options);
        }
    };
    const int workers = std::clamp<int>(options.workers, 1, static_cast<int>(total));
    if (workers == 1) {
        work();
    } else {
        std::vector<std::jthread> pool;
        for (int w = 0; w < workers; ++w) pool.emplace_back(work);
    }
    return map;
}

Matrix SpectralAnalysis::reconstruct(double t) const {
    Matrix out = Matrix::Zero(rho_steady.rows(), rho_steady.cols());
    for (const auto& m : modes) {
        if (std::isfinite(m.rate.real()))
            out += m.rho * std::exp(m.rate * t);
        else if (t == 0.0)
            out += m.rho;  // z = 0: contributes only at the initial time
    }
    return out;
}

SpectralAnalysis spectral_analysis(const engine::FloquetPropagator& undriven, const SpectralAnalysisOptions& options) {
    if (undriven.steps_per_period() != 1) throw InputError("spectral analysis needs an undriven single-step propagator");
    const auto& sg = undriven.semigroup();
    const Matrix ref = options.reference.size() ? options.reference : default_reference(sg.d);
    ops::validate_density_matrix(ref, 1e-10);

    SpectralAnalysis out;
    out.dt = undriven.grid().dt;
    num::EigOptions eo;
    eo.compute_reconstruction = false;
    const num::EigenDecomposition dec =
        undriven.has_spectrum() ? undriven.spectrum() : num::eig_general(undriven.step_matrix(1), eo);
    out.condition_number = dec.condition_number;

    const Vector overlap = dec.left * sg.embed(ref);
    out.rho_steady = Matrix::Zero(sg.d, sg.d);
    for (Eigen::Index i = 0; i < dec.size(); ++i) {
        SpectralMode mode;
        mode.eigenvalue = dec.values(i);
        mode.rate = std::abs(dec.values(i)) > 0.0 ? std::log(dec.values(i)) / out.dt
                                                   : cd(-std::numeric_limits<double>::infinity(), 0.0);
        mode.rho = sg.reduce(dec.right.col(i) * overlap(i));
        mode.weight = mode.rho.cwiseAbs().maxCoeff();
        mode.condition = dec.eigenvalue_condition(i);
        mode.max_concurrence = std::numeric_limits<double>::quiet_NaN();
        if (std::abs(mode.rate) <= options.unit_tolerance) {
            out.steady_cluster.push_back(static_cast<int>(i));
            out.rho_steady += mode.rho;
        }
        out.modes.push_back(std::move(mode));
    }
    if (out.steady_cluster.empty()) throw ConsistencyError("undriven propagator has no unit eigenvalue");
    if (!options.scan_concurrence || sg.d != 4) return out;

    const Matrix& r1 = out.rho_steady;
    const double tol = options.positivity_tolerance;
    auto positive = [&](const Matrix& x, double s) { return min_hermitian_eigenvalue(r1 + s * x) >= -tol; };

    for (std::size_t i = 0; i < out.modes.size(); ++i) {
        auto& mode = out.modes[i];
        if (std::find(out.steady_cluster.begin(), out.steady_cluster.end(), static_cast<int>(i)) != out.steady_cluster.end())
            continue;
        if (!std::isfinite(mode.rate.real()) || mode.weight < options.weight_floor) continue;
        if (mode.rate.imag() < -1e-9) continue;  // conjugate partner of a scanned mode
        if (mode.condition > options.mode_condition_limit) {
            ++out.skipped_ill_conditioned;
            continue;
        }
        const bool oscillating = std::abs(mode.rate.imag()) > 1e-9;
        const double window = oscillating ? 2.0 * kPi / std::abs(mode.rate.imag())
                                          : options.decay_scan_factor / std::max(std::abs(mode.rate.real()), 1e-12);
        double best = 0.0;
        double min_scale = 1.0;
        for (int k = 0; k < options.scan_points; ++k) {
            const double t = window * k / (options.scan_points - 1);
            const Matrix a = mode.rho * std::exp(mode.rate * t);
            const Matrix x = a + a.adjoint();
            double s = 1.0;
            if (!positive(x, 1.0)) {
                double lo = 0.0, hi = 1.0;
                for (int b = 0; b < options.bisection_steps; ++b) {
                    const double mid = 0.5 * (lo + hi);
                    (positive(x, mid) ? lo : hi) = mid;
                }
                s = lo;
            }
            min_scale = std::min(min_scale, s);
            Matrix state = r1 + s * x;
            state = 0.5 * (state + state.adjoint()) / state.trace().real();
            try {
                best = std::max(best, concurrence(state, tol));
            } catch (const InputError&) {
                // skipped: fails positivity after rescaling
            }
        }
        mode.max_concurrence = best;
        mode.scale = min_scale;
        mode.scanned = true;
    }
    return out;
}

}  // namespace floquet::obs
