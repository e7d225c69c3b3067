// bath.cpp — Spectral densities, correlation quadrature and matrix-pencil fits

#include "floquet_if/bath.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <istream>
#include <map>
#include <numeric>
#include <ostream>
#include <sstream>

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <Eigen/Eigenvalues>
#include <Eigen/SVD>
#include <unsupported/Eigen/NonLinearOptimization>

#include "floquet_if/errors.hpp"

namespace floquet::bath {

// ---------------------------------------------------------------------------
// Spectral densities

void SpectralDensityOhmic::validate() const {
    if (!(alpha >= 0.0) || !std::isfinite(alpha)) throw InputError("bath.alpha must be finite and >= 0");
    if (!(omega_c > 0.0) || !std::isfinite(omega_c)) throw InputError("bath.omega_c must be finite and > 0");
}

void TabulatedSpectralDensity::validate() const {
    if (omega.size() < 2 || omega.size() != values.size())
        throw InputError("tabulated spectral density needs >= 2 matching omega/value entries");
    for (std::size_t i = 0; i < omega.size(); ++i) {
        if (!std::isfinite(omega[i]) || !std::isfinite(values[i])) throw InputError("tabulated J has non-finite entries");
        if (values[i] < 0.0) throw InputError("tabulated J must be non-negative");
        if (omega[i] < 0.0) throw InputError("tabulated J grid must be non-negative");
        if (i > 0 && !(omega[i] > omega[i - 1])) throw InputError("tabulated J grid must be strictly increasing");
    }
}

void BathSpec::validate() const {
    std::visit([](const auto& sd) { sd.validate(); }, density);
    if (!(temperature >= 0.0) || !std::isfinite(temperature)) throw InputError("bath.temperature must be finite and >= 0");
}

double BathSpec::characteristic_frequency() const {
    if (const auto* o = std::get_if<SpectralDensityOhmic>(&density)) return o->omega_c;
    const auto& tab = std::get<TabulatedSpectralDensity>(density);
    const auto it = std::max_element(tab.values.begin(), tab.values.end());
    const double w = tab.omega[static_cast<std::size_t>(it - tab.values.begin())];
    return w > 0.0 ? w : tab.omega.back();
}

double evaluate_spectral_density(const SpectralDensityOhmic& sd, double omega) {
    if (omega < 0.0) throw DomainError("spectral density evaluated at negative frequency");
    return 0.5 * sd.alpha * omega * std::exp(-omega / sd.omega_c);
}

double evaluate_spectral_density(const TabulatedSpectralDensity& sd, double omega) {
    if (omega < 0.0) throw DomainError("spectral density evaluated at negative frequency");
    if (omega < sd.omega.front() || omega > sd.omega.back()) return 0.0;
    const auto it = std::upper_bound(sd.omega.begin(), sd.omega.end(), omega);
    if (it == sd.omega.end()) return sd.values.back();
    const auto i = static_cast<std::size_t>(it - sd.omega.begin());
    const double x0 = sd.omega[i - 1], x1 = sd.omega[i];
    const double f = (omega - x0) / (x1 - x0);
    return (1.0 - f) * sd.values[i - 1] + f * sd.values[i];
}

double evaluate_spectral_density(const BathSpec& spec, double omega) {
    return std::visit([omega](const auto& sd) { return evaluate_spectral_density(sd, omega); }, spec.density);
}

double bose_occupation(double omega, double temperature) {
    if (!(omega > 0.0)) throw DomainError("bose_occupation requires omega > 0");
    if (temperature < 0.0) throw DomainError("bose_occupation requires temperature >= 0");
    if (temperature == 0.0) return 0.0;
    return 1.0 / std::expm1(omega / temperature);
}

// ---------------------------------------------------------------------------
// Correlation function

cd bath_correlation(const BathSpec& spec, double t, const QuadratureOptions& options) {
    spec.validate();
    double lo = 0.0, hi = 0.0;
    if (const auto* o = std::get_if<SpectralDensityOhmic>(&spec.density)) {
        if (o->alpha == 0.0) return 0.0;
        hi = 60.0 * o->omega_c;  // exp(-60) tail is below double resolution
    } else {
        const auto& tab = std::get<TabulatedSpectralDensity>(spec.density);
        lo = tab.omega.front();
        hi = tab.omega.back();
    }
    const double T = spec.temperature;
    auto thermal = [T](double w) { return T == 0.0 ? 1.0 : 1.0 + 2.0 * bose_occupation(w, T); };
    auto re = [&](double w) { return w <= 0.0 ? 0.0 : evaluate_spectral_density(spec, w) * thermal(w) * std::cos(w * t); };
    auto im = [&](double w) { return -evaluate_spectral_density(spec, w) * std::sin(w * t); };

    // Split the range so every panel holds only a few oscillations.
    const double span = hi - lo;
    const int panels = std::max(1, static_cast<int>(std::ceil(span * std::abs(t) / (8.0 * kPi))));
    using GK = boost::math::quadrature::gauss_kronrod<double, 31>;
    double sum_re = 0.0, sum_im = 0.0, err = 0.0, l1 = 0.0;
    for (int p = 0; p < panels; ++p) {
        const double a = lo + span * p / panels, b = lo + span * (p + 1) / panels;
        double e1 = 0.0, e2 = 0.0, n1 = 0.0, n2 = 0.0;
        sum_re += GK::integrate(re, a, b, options.max_depth, options.relative_tolerance, &e1, &n1);
        sum_im += GK::integrate(im, a, b, options.max_depth, options.relative_tolerance, &e2, &n2);
        err += e1 + e2;
        l1 += n1 + n2;
    }
    if (err > 10.0 * options.relative_tolerance * std::max(l1, 1e-300) && err > 1e-15 * l1)
        throw ConvergenceError("bath_correlation: quadrature did not converge at t = " + std::to_string(t) +
                               " (achieved error " + std::to_string(err) + ", scale " + std::to_string(l1) + ")");
    return {sum_re, sum_im};
}

// ---------------------------------------------------------------------------
// Exponential fits

cd ExponentialBathFit::evaluate(double t) const {
    cd s = 0.0;
    for (const auto& term : terms) s += term.amplitude * std::exp(-term.rate * t);
    return s;
}

namespace {

struct PencilResult {
    Eigen::VectorXcd rates;
    Eigen::VectorXcd amplitudes;
    int resolvable_rank = 0;
};

Eigen::VectorXcd least_squares_amplitudes(const std::vector<double>& t, const Eigen::VectorXcd& y,
                                          const Eigen::VectorXcd& rates) {
    Matrix basis(static_cast<Eigen::Index>(t.size()), rates.size());
    for (Eigen::Index j = 0; j < basis.rows(); ++j)
        for (Eigen::Index k = 0; k < rates.size(); ++k) basis(j, k) = std::exp(-rates(k) * t[static_cast<std::size_t>(j)]);
    return basis.colPivHouseholderQr().solve(y);
}

PencilResult matrix_pencil(const std::vector<cd>& samples, double dt, int K) {
    const auto N = static_cast<Eigen::Index>(samples.size());
    const Eigen::Index L = N / 2;
    Matrix hankel(N - L, L + 1);
    for (Eigen::Index i = 0; i < hankel.rows(); ++i)
        for (Eigen::Index j = 0; j < hankel.cols(); ++j) hankel(i, j) = samples[static_cast<std::size_t>(i + j)];
    Eigen::BDCSVD<Matrix> dec(hankel, Eigen::ComputeThinV);
    const auto& s = dec.singularValues();
    int rank = 0;
    for (Eigen::Index i = 0; i < s.size(); ++i)
        if (s(i) > 1e-12 * s(0)) ++rank;
    PencilResult out;
    out.resolvable_rank = rank;
    const int k_eff = std::min({K, rank, static_cast<int>(hankel.cols()) - 1});
    if (k_eff <= 0) return out;
    // Signal subspace spanned by the leading right singular vectors.
    const Matrix v = dec.matrixV().leftCols(k_eff).conjugate();
    const Matrix v1 = v.topRows(v.rows() - 1);
    const Matrix v2 = v.bottomRows(v.rows() - 1);
    const Matrix phi = v1.completeOrthogonalDecomposition().solve(v2);
    Eigen::ComplexEigenSolver<Matrix> es(phi, false);
    out.rates.resize(k_eff);
    for (int k = 0; k < k_eff; ++k) out.rates(k) = -std::log(es.eigenvalues()(k)) / dt;
    std::vector<double> t(samples.size());
    for (std::size_t j = 0; j < t.size(); ++j) t[j] = static_cast<double>(j) * dt;
    Eigen::VectorXcd y = Eigen::Map<const Eigen::VectorXcd>(samples.data(), N);
    out.amplitudes = least_squares_amplitudes(t, y, out.rates);
    return out;
}

/// Weighted complex residual of sum a_k exp(-nu_k t) against data, as real least-squares problem.
struct ExpSumFunctor {
    const std::vector<double>* t;
    const Eigen::VectorXcd* y;
    const Eigen::VectorXd* sqrt_w;
    int K;

    int inputs() const { return 4 * K; }
    int values() const { return 2 * static_cast<int>(t->size()); }

    void unpack(const Eigen::VectorXd& p, Eigen::VectorXcd& a, Eigen::VectorXcd& nu) const {
        a.resize(K);
        nu.resize(K);
        for (int k = 0; k < K; ++k) {
            a(k) = {p(k), p(K + k)};
            nu(k) = {p(2 * K + k), p(3 * K + k)};
        }
    }

    int operator()(const Eigen::VectorXd& p, Eigen::VectorXd& f) const {
        Eigen::VectorXcd a, nu;
        unpack(p, a, nu);
        const auto P = static_cast<Eigen::Index>(t->size());
        for (Eigen::Index j = 0; j < P; ++j) {
            cd s = 0.0;
            for (int k = 0; k < K; ++k) s += a(k) * std::exp(-nu(k) * (*t)[static_cast<std::size_t>(j)]);
            const cd r = (s - (*y)(j)) * (*sqrt_w)(j);
            f(2 * j) = r.real();
            f(2 * j + 1) = r.imag();
        }
        return 0;
    }

    int df(const Eigen::VectorXd& p, Eigen::MatrixXd& J) const {
        Eigen::VectorXcd a, nu;
        unpack(p, a, nu);
        const auto P = static_cast<Eigen::Index>(t->size());
        for (Eigen::Index j = 0; j < P; ++j) {
            const double tj = (*t)[static_cast<std::size_t>(j)];
            const double w = (*sqrt_w)(j);
            for (int k = 0; k < K; ++k) {
                const cd e = std::exp(-nu(k) * tj) * w;
                const cd d_re_a = e, d_im_a = kI * e;
                const cd d_re_nu = -tj * a(k) * e, d_im_nu = -kI * tj * a(k) * e;
                const cd cols[4] = {d_re_a, d_im_a, d_re_nu, d_im_nu};
                for (int c = 0; c < 4; ++c) {
                    J(2 * j, c * K + k) = cols[c].real();
                    J(2 * j + 1, c * K + k) = cols[c].imag();
                }
            }
        }
        return 0;
    }
};

double max_abs_error(const std::vector<double>& t, const Eigen::VectorXcd& y, const Eigen::VectorXcd& a,
                     const Eigen::VectorXcd& nu, Eigen::VectorXd* abs_residual = nullptr) {
    double worst = 0.0;
    if (abs_residual) abs_residual->resize(static_cast<Eigen::Index>(t.size()));
    for (std::size_t j = 0; j < t.size(); ++j) {
        cd s = 0.0;
        for (Eigen::Index k = 0; k < nu.size(); ++k) s += a(k) * std::exp(-nu(k) * t[j]);
        const double r = std::abs(s - y(static_cast<Eigen::Index>(j)));
        if (abs_residual) (*abs_residual)(static_cast<Eigen::Index>(j)) = r;
        worst = std::max(worst, r);
    }
    return worst;
}

/// Lawson-style iteratively reweighted least squares driving the fit toward minimax.
void minimax_refine(const std::vector<double>& t, const Eigen::VectorXcd& y, Eigen::VectorXcd& a,
                    Eigen::VectorXcd& nu, int sweeps) {
    const int K = static_cast<int>(nu.size());
    if (K == 0) return;
    Eigen::VectorXd sqrt_w = Eigen::VectorXd::Ones(static_cast<Eigen::Index>(t.size()));
    Eigen::VectorXd w = sqrt_w;
    Eigen::VectorXd p(4 * K);
    for (int k = 0; k < K; ++k) {
        p(k) = a(k).real();
        p(K + k) = a(k).imag();
        p(2 * K + k) = nu(k).real();
        p(3 * K + k) = nu(k).imag();
    }
    double best = max_abs_error(t, y, a, nu);
    Eigen::VectorXcd best_a = a, best_nu = nu;
    ExpSumFunctor functor{&t, &y, &sqrt_w, K};
    for (int sweep = 0; sweep < sweeps; ++sweep) {
        Eigen::LevenbergMarquardt<ExpSumFunctor> lm(functor);
        lm.parameters.maxfev = 2000;
        lm.minimize(p);
        Eigen::VectorXcd ca, cnu;
        functor.unpack(p, ca, cnu);
        if (!ca.allFinite() || !cnu.allFinite()) break;
        Eigen::VectorXd r;
        const double err = max_abs_error(t, y, ca, cnu, &r);
        const bool decaying = (cnu.real().array() > 0.0).all();
        if (decaying && err < best) {
            best = err;
            best_a = ca;
            best_nu = cnu;
        }
        if (!(err > 0.0)) break;
        w = w.cwiseProduct((r / err).array().matrix() + Eigen::VectorXd::Constant(r.size(), 1e-3));
        w /= w.mean();
        sqrt_w = w.cwiseSqrt();
    }
    a = best_a;
    nu = best_nu;
}

void sort_terms(std::vector<ExpTerm>& terms) {
    std::stable_sort(terms.begin(), terms.end(), [](const ExpTerm& x, const ExpTerm& y) {
        const double ax = std::abs(x.amplitude), ay = std::abs(y.amplitude);
        if (ax != ay) return ax > ay;
        return x.rate.real() < y.rate.real();
    });
}

}  // namespace

ExponentialBathFit fit_exponentials_samples(const std::vector<cd>& samples, double dt, int K) {
    if (K < 1) throw InputError("fit: term count K must be >= 1");
    if (!(dt > 0.0)) throw InputError("fit: sample step must be positive");
    if (samples.size() < static_cast<std::size_t>(2 * K + 2)) throw InputError("fit: too few samples for K terms");
    ExponentialBathFit fit;
    fit.requested_terms = K;
    fit.sample_step = dt;
    fit.window = dt * static_cast<double>(samples.size() - 1);
    fit.reference_magnitude = std::abs(samples.front());
    const PencilResult pr = matrix_pencil(samples, dt, K);
    for (Eigen::Index k = 0; k < pr.rates.size(); ++k) {
        const ExpTerm term{pr.amplitudes(k), pr.rates(k)};
        (term.rate.real() > 0.0 ? fit.terms : fit.discarded).push_back(term);
    }
    if (static_cast<int>(pr.rates.size()) < K)
        fit.warnings.push_back("requested " + std::to_string(K) + " terms but only " +
                               std::to_string(pr.rates.size()) + " are numerically resolvable");
    sort_terms(fit.terms);
    double worst = 0.0;
    for (std::size_t j = 0; j < samples.size(); ++j)
        worst = std::max(worst, std::abs(fit.evaluate(static_cast<double>(j) * dt) - samples[j]));
    fit.max_error = worst;
    return fit;
}

ExponentialBathFit fit_exponentials(const BathSpec& spec, const FitOptions& options) {
    spec.validate();
    const int K = options.terms;
    if (K < 1) throw InputError("fit: term count K must be >= 1");
    const double window = options.window > 0.0 ? options.window : 10.0 / spec.characteristic_frequency();
    const double dt = options.sample_step > 0.0 ? options.sample_step : window / (16.0 * K);
    if (dt > window / (4.0 * K) * (1.0 + 1e-12))
        throw InputError("fit: sample step must not exceed window/(4K)");
    if (options.validation_points < 2) throw InputError("fit: validation grid needs >= 2 points");

    const auto n_samples = static_cast<std::size_t>(std::floor(window / dt + 1e-9)) + 1;
    std::vector<cd> samples(n_samples);
    for (std::size_t j = 0; j < n_samples; ++j) samples[j] = bath_correlation(spec, static_cast<double>(j) * dt, options.quadrature);

    const auto P = static_cast<std::size_t>(options.validation_points);
    std::vector<double> tv(P);
    Eigen::VectorXcd yv(static_cast<Eigen::Index>(P));
    for (std::size_t j = 0; j < P; ++j) {
        tv[j] = window * static_cast<double>(j) / static_cast<double>(P - 1);
        yv(static_cast<Eigen::Index>(j)) = bath_correlation(spec, tv[j], options.quadrature);
    }

    ExponentialBathFit best;
    best.requested_terms = K;
    best.window = window;
    best.sample_step = dt;
    best.reference_magnitude = std::abs(samples.front());
    best.max_error = yv.cwiseAbs().maxCoeff();  // the empty fit
    if (best.reference_magnitude == 0.0 && best.max_error == 0.0) return best;  // uncoupled bath

    for (int k = 1; k <= K; ++k) {
        const PencilResult pr = matrix_pencil(samples, dt, k);
        if (pr.rates.size() == 0) continue;
        std::vector<ExpTerm> discarded;
        std::vector<Eigen::Index> keep;
        for (Eigen::Index i = 0; i < pr.rates.size(); ++i) {
            if (pr.rates(i).real() > 0.0) keep.push_back(i);
            else discarded.push_back({pr.amplitudes(i), pr.rates(i)});
        }
        if (keep.empty()) continue;
        Eigen::VectorXcd nu(static_cast<Eigen::Index>(keep.size()));
        for (std::size_t i = 0; i < keep.size(); ++i) nu(static_cast<Eigen::Index>(i)) = pr.rates(keep[i]);
        // Re-solve amplitudes without the dropped terms.
        std::vector<double> ts(n_samples);
        for (std::size_t j = 0; j < n_samples; ++j) ts[j] = static_cast<double>(j) * dt;
        Eigen::VectorXcd a = least_squares_amplitudes(ts, Eigen::Map<const Eigen::VectorXcd>(samples.data(), static_cast<Eigen::Index>(n_samples)), nu);
        if (options.refine) minimax_refine(tv, yv, a, nu, options.refine_sweeps);
        const double err = max_abs_error(tv, yv, a, nu);
        if (err < best.max_error) {
            best.max_error = err;
            best.terms.clear();
            for (Eigen::Index i = 0; i < nu.size(); ++i) best.terms.push_back({a(i), nu(i)});
            best.discarded = discarded;
        }
    }
    sort_terms(best.terms);
    if (static_cast<int>(best.terms.size()) < K)
        best.warnings.push_back("requested " + std::to_string(K) + " terms; best fit uses " +
                                std::to_string(best.terms.size()));
    if (!best.discarded.empty())
        best.warnings.push_back(std::to_string(best.discarded.size()) + " non-decaying term(s) discarded");
    if (best.max_error > options.error_bound) {
        std::ostringstream os;
        os << "fit error " << best.max_error << " exceeds bound " << options.error_bound << " with K = " << K;
        throw FitQualityError(os.str());
    }
    return best;
}

// ---------------------------------------------------------------------------
// Text export

void write_fit(std::ostream& out, const ExponentialBathFit& fit, const BathSpec& spec) {
    out << std::setprecision(17);
    if (const auto* o = std::get_if<SpectralDensityOhmic>(&spec.density))
        out << "# alpha=" << o->alpha << " omega_c=" << o->omega_c << '\n';
    else
        out << "# tabulated_points=" << std::get<TabulatedSpectralDensity>(spec.density).omega.size() << '\n';
    out << "# temperature=" << spec.temperature << " window=" << fit.window << " sample_step=" << fit.sample_step
        << " max_error=" << fit.max_error << " reference=" << fit.reference_magnitude
        << " requested_terms=" << fit.requested_terms << '\n';
    out << "# re_a im_a re_nu im_nu\n";
    for (const auto& t : fit.terms)
        out << t.amplitude.real() << ' ' << t.amplitude.imag() << ' ' << t.rate.real() << ' ' << t.rate.imag() << '\n';
}

ExponentialBathFit read_fit(std::istream& in) {
    ExponentialBathFit fit;
    std::map<std::string, double> header;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::istringstream ls(line);
        if (line[0] == '#') {
            std::string tok;
            ls.ignore(1);
            while (ls >> tok) {
                const auto eq = tok.find('=');
                if (eq == std::string::npos) continue;
                try {
                    header[tok.substr(0, eq)] = std::stod(tok.substr(eq + 1));
                } catch (const std::exception&) {
                    throw InputError("fit file: malformed header value '" + tok + "'");
                }
            }
            continue;
        }
        double ra, ia, rn, in_;
        if (!(ls >> ra >> ia >> rn >> in_)) throw InputError("fit file: malformed term line '" + line + "'");
        fit.terms.push_back({{ra, ia}, {rn, in_}});
    }
    auto get = [&](const char* key) { return header.count(key) ? header[key] : 0.0; };
    fit.window = get("window");
    fit.sample_step = get("sample_step");
    fit.max_error = get("max_error");
    fit.reference_magnitude = get("reference");
    fit.requested_terms = static_cast<int>(get("requested_terms"));
    return fit;
}

}  // namespace floquet::bath
