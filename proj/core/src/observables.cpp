// observables.cpp — Steady-state correlation functions and heat-current densities

#include "floquet_if/observables.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "floquet_if/errors.hpp"
#include "floquet_if/operators.hpp"

namespace floquet::obs {

namespace {

/// Advance column m of x by step (m + k); all columns share the same q.
void advance_columns(const engine::FloquetPropagator& fp, Matrix& x, long k) {
    const Eigen::Index chi = fp.semigroup().chi;
    for (Eigen::Index m = 0; m < x.cols(); ++m)
        x.col(m) = num::apply_lifted(fp.channels(m + k).pre, Vector(x.col(m)), chi);
    x = fp.semigroup().q * x;
    for (Eigen::Index m = 0; m < x.cols(); ++m)
        x.col(m) = num::apply_lifted(fp.channels(m + k).post, Vector(x.col(m)), chi);
}

double thermal_factor(double omega, double temperature) {
    return 1.0 + 2.0 * bath::bose_occupation(omega, temperature);
}

}  // namespace

SteadyCorrelation steady_two_time_correlation(const engine::FloquetPropagator& fp, const engine::SteadyState& ss,
                                              const CorrelationOptions& options) {
    const auto& sg = fp.semigroup();
    const auto& grid = fp.grid();
    if (!(options.tau_max > 0.0)) throw InputError("tau_max must be positive");
    if (ss.joint.size() != fp.dimension()) throw DimensionError("steady state does not match the propagator");
    const int M = fp.steps_per_period();
    const Matrix& S = sg.coupling;
    const Matrix SL = ops::left_multiplication(S);
    // Closing functional tr(S .) ⊗ v_l.
    const RowVector tf = num::apply_lifted_right(sg.trace_functional(), SL, sg.chi);

    SteadyCorrelation out;
    out.dt = grid.dt;
    out.steps_per_period = M;
    out.omega_d = M > 1 ? 2.0 * kPi / grid.period : 0.0;

    // Steady joint states at the M start points of one period.
    Matrix x(fp.dimension(), M);
    Vector w = ss.joint;
    for (int m = 0; m < M; ++m) {
        const Matrix rho = sg.reduce(w);
        out.signal.push_back(ops::expectation(S, rho).real());
        x.col(m) = num::apply_lifted(SL, w, sg.chi);
        w = fp.apply_step(m + 1, w);
    }

    auto record = [&](long k) {
        const cd c = (tf * x).sum() / static_cast<double>(M);
        double a = 0.0;
        for (int m = 0; m < M; ++m) a += out.signal[static_cast<std::size_t>((m + k) % M)] * out.signal[static_cast<std::size_t>(m)];
        a /= M;
        out.tau.push_back(static_cast<double>(k) * grid.dt);
        out.full.push_back(c);
        out.asym.push_back(a);
        out.decay.push_back(c - a);
    };

    long steps = std::max<long>(static_cast<long>(std::lround(options.tau_max / grid.dt)), 2L * M);
    record(0);
    out.decay_threshold = options.relative_decay_threshold * std::abs(out.full.front());
    long k = 0;
    for (int attempt = 0;; ++attempt) {
        for (; k < steps;) {
            advance_columns(fp, x, k + 1);
            ++k;
            record(k);
        }
        const std::size_t tail = static_cast<std::size_t>(std::max(M, 10));
        double worst = 0.0;
        for (std::size_t i = out.decay.size() - std::min(tail, out.decay.size()); i < out.decay.size(); ++i)
            worst = std::max(worst, std::abs(out.decay[i]));
        out.decay_tail = worst;
        if (worst <= out.decay_threshold) break;
        if (attempt >= options.max_doublings) {
            std::ostringstream os;
            os << "connected correlation did not decay: |C_decay| = " << worst << " over the tail at tau = " << out.tau.back()
               << ", threshold " << out.decay_threshold << " (after " << attempt << " doublings)";
            throw MemoryTimeError(os.str());
        }
        steps *= 2;
    }

    // Fourier route: s_n of the periodic <S(t)>.
    const int n_max = M > 1 ? std::min(options.n_max, (M - 1) / 2) : 0;
    for (int n = 0; n <= n_max; ++n) {
        cd s = 0.0;
        for (int m = 0; m < M; ++m)
            s += out.signal[static_cast<std::size_t>(m)] * std::exp(-kI * (out.omega_d * n * grid.time(m)));
        s /= static_cast<double>(M);
        out.signal_fourier.push_back(s);
        out.c.push_back(n == 0 ? std::norm(s) : 2.0 * std::norm(s));
    }
    // Direct route: cosine projection of the factorized part over one period.
    for (int n = 0; n <= n_max; ++n) {
        double acc = 0.0;
        for (int j = 0; j < M; ++j)
            acc += out.asym[static_cast<std::size_t>(j)].real() * std::cos(out.omega_d * n * out.tau[static_cast<std::size_t>(j)]);
        out.c_projection.push_back((n == 0 ? 1.0 : 2.0) * acc / M);
    }
    return out;
}

HeatCurrentSpectrum heat_current_density(const SteadyCorrelation& corr, const bath::BathSpec& bath,
                                         const std::vector<double>& omega, const HeatOptions& options) {
    bath.validate();
    if (corr.tau.size() < 2) throw InputError("correlation needs at least two tau samples");
    HeatCurrentSpectrum out;
    out.omega = omega;
    const std::size_t K = corr.tau.size();
    const double tau_max = corr.tau.back();
    std::vector<double> weight(K, corr.dt);
    weight.front() = weight.back() = 0.5 * corr.dt;
    if (options.taper) {
        const double start = (1.0 - options.taper_fraction) * tau_max;
        for (std::size_t k = 0; k < K; ++k)
            if (corr.tau[k] > start)
                weight[k] *= 0.5 * (1.0 + std::cos(kPi * (corr.tau[k] - start) / (options.taper_fraction * tau_max)));
    }
    for (double w : omega) {
        if (!(w > 0.0)) throw DomainError("heat current frequencies must be positive");
        const double th = thermal_factor(w, bath.temperature);
        double acc = 0.0;
        for (std::size_t k = 0; k < K; ++k) {
            const double t = corr.tau[k];
            const cd kernel(th * std::sin(w * t), std::cos(w * t));
            acc += weight[k] * (kernel * corr.decay[k]).imag();
        }
        out.j_cont.push_back(2.0 * bath::evaluate_spectral_density(bath, w) * w * acc);
    }
    for (std::size_t n = 0; n < corr.c.size(); ++n) {
        const double wn = static_cast<double>(n) * corr.omega_d;
        out.harmonic.push_back(static_cast<int>(n));
        out.harmonic_omega.push_back(wn);
        out.weights.push_back(kPi * bath::evaluate_spectral_density(bath, wn) * wn * corr.c[n]);
    }
    out.total = total_heat_current(out);
    return out;
}

double total_heat_current(const HeatCurrentSpectrum& hcs) {
    double total = 0.0;
    if (!hcs.omega.empty()) {
        // j vanishes at omega = 0 with J(0) = 0; include the first panel from the origin.
        total += 0.5 * hcs.omega.front() * hcs.j_cont.front();
        for (std::size_t i = 1; i < hcs.omega.size(); ++i)
            total += 0.5 * (hcs.omega[i] - hcs.omega[i - 1]) * (hcs.j_cont[i] + hcs.j_cont[i - 1]);
    }
    for (double w : hcs.weights) total += w;
    return total;
}

QuenchHistory record_quench(const engine::FloquetPropagator& fp, const Matrix& rho0, long n_steps) {
    ops::validate_density_matrix(rho0, 1e-10);
    if (n_steps < 0) throw InputError("n_steps must be non-negative");
    QuenchHistory h;
    h.fp = &fp;
    h.joint.reserve(static_cast<std::size_t>(n_steps + 1));
    h.joint.push_back(fp.semigroup().embed(rho0));
    for (long n = 1; n <= n_steps; ++n) h.joint.push_back(fp.apply_step(n, h.joint.back()));
    return h;
}

std::vector<cd> two_time_correlation_row(const QuenchHistory& history, long n) {
    if (!history.fp) throw InputError("empty quench history");
    if (n < 0 || n >= static_cast<long>(history.joint.size()))
        throw InputError("time index " + std::to_string(n) + " lies beyond the computed trajectory");
    const auto& fp = *history.fp;
    const auto& sg = fp.semigroup();
    const Matrix SL = ops::left_multiplication(sg.coupling);
    RowVector row = num::apply_lifted_right(sg.trace_functional(), SL, sg.chi);
    std::vector<cd> out(static_cast<std::size_t>(n + 1));
    for (long s = n; s >= 0; --s) {
        out[static_cast<std::size_t>(s)] = (row * num::apply_lifted(SL, history.joint[static_cast<std::size_t>(s)], sg.chi))(0, 0);
        if (s > 0) row = fp.apply_step_left(row, s);
    }
    return out;
}

std::vector<double> transient_heat_current(const QuenchHistory& history, long n, const bath::BathSpec& bath,
                                           const std::vector<double>& omega) {
    const auto corr = two_time_correlation_row(history, n);
    const double dt = history.fp->grid().dt;
    const double t = static_cast<double>(n) * dt;
    std::vector<double> out;
    out.reserve(omega.size());
    for (double w : omega) {
        if (!(w > 0.0)) throw DomainError("heat current frequencies must be positive");
        const double th = thermal_factor(w, bath.temperature);
        double acc = 0.0;
        for (long s = 0; s <= n; ++s) {
            const double lag = t - static_cast<double>(s) * dt;
            const double wt = (s == 0 || s == n) ? 0.5 * dt : dt;
            acc += wt * (cd(th * std::sin(w * lag), std::cos(w * lag)) * corr[static_cast<std::size_t>(s)]).imag();
        }
        out.push_back(n == 0 ? 0.0 : 2.0 * bath::evaluate_spectral_density(bath, w) * w * acc);
    }
    return out;
}

std::vector<double> frequency_grid(double omega_max, int n) {
    if (!(omega_max > 0.0) || n < 1) throw InputError("frequency grid needs omega_max > 0 and n >= 1");
    std::vector<double> g(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) g[static_cast<std::size_t>(i)] = omega_max * (i + 1) / n;
    return g;
}

}  // namespace floquet::obs
