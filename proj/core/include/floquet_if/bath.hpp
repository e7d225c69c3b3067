// bath.hpp — Spectral densities, bath correlation functions and exponential fits

#pragma once

#include <iosfwd>
#include <limits>
#include <string>
#include <variant>
#include <vector>

#include "floquet_if/types.hpp"

namespace floquet::bath {

/// J(w) = (alpha/2) w exp(-w/omega_c).
struct SpectralDensityOhmic {
    double alpha = 0.0;
    double omega_c = 1.0;

    void validate() const;
};

/// J(w) given on a grid, linearly interpolated and zero outside the grid.
struct TabulatedSpectralDensity {
    std::vector<double> omega;
    std::vector<double> values;

    void validate() const;
};

using SpectralDensity = std::variant<SpectralDensityOhmic, TabulatedSpectralDensity>;

struct BathSpec {
    SpectralDensity density = SpectralDensityOhmic{};
    /// Temperature in units of Omega; 0 is the exact zero-temperature limit.
    double temperature = 0.0;

    void validate() const;
    /// Frequency scale used for default fit windows.
    double characteristic_frequency() const;
};

double evaluate_spectral_density(const SpectralDensityOhmic& sd, double omega);
double evaluate_spectral_density(const TabulatedSpectralDensity& sd, double omega);
double evaluate_spectral_density(const BathSpec& spec, double omega);

/// 1/(exp(w/T) - 1), exactly 0 at T = 0.
double bose_occupation(double omega, double temperature);

struct QuadratureOptions {
    double relative_tolerance = 1e-9;
    unsigned max_depth = 25;
};

/// C(t) = int_0^inf dw J(w) [coth(w/2T) cos wt - i sin wt] by adaptive Gauss-Kronrod quadrature.
cd bath_correlation(const BathSpec& spec, double t, const QuadratureOptions& options = {});

struct ExpTerm {
    cd amplitude;
    cd rate;
};

/// C(t) ≈ sum_k a_k exp(-nu_k t) on [0, window].
struct ExponentialBathFit {
    std::vector<ExpTerm> terms;  ///< sorted by descending |a_k|
    double max_error = 0.0;      ///< max |fit - C| on the validation grid
    double reference_magnitude = 0.0;  ///< |C(0)|
    double window = 0.0;
    double sample_step = 0.0;
    int requested_terms = 0;
    std::vector<ExpTerm> discarded;  ///< non-decaying terms dropped from the fit
    std::vector<std::string> warnings;

    cd evaluate(double t) const;
    double relative_error() const { return reference_magnitude > 0 ? max_error / reference_magnitude : max_error; }
};

struct FitOptions {
    int terms = 4;
    double window = 0.0;       ///< 0 selects 10 / characteristic frequency
    double sample_step = 0.0;  ///< 0 selects window / (16 K)
    bool refine = true;        ///< minimax (Lawson-weighted) nonlinear refinement
    int refine_sweeps = 30;
    int validation_points = 1991;
    double error_bound = std::numeric_limits<double>::infinity();  ///< absolute
    QuadratureOptions quadrature{};
};

/// Matrix-pencil extraction plus least-squares amplitudes (and optional refinement).
/// The returned error never increases with the requested K: fits with 1..K terms are
/// all computed and the most accurate one is kept.
ExponentialBathFit fit_exponentials(const BathSpec& spec, const FitOptions& options = {});

/// Matrix-pencil fit of uniform samples y_j = y(j dt) with at most K terms, no refinement.
ExponentialBathFit fit_exponentials_samples(const std::vector<cd>& samples, double dt, int K);

/// Text export: '#' header with bath parameters, then "Re a  Im a  Re nu  Im nu" per line.
void write_fit(std::ostream& out, const ExponentialBathFit& fit, const BathSpec& spec);
ExponentialBathFit read_fit(std::istream& in);

}  // namespace floquet::bath
