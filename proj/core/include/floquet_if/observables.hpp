// observables.hpp — Steady-state correlations and bath heat currents

#pragma once

#include <vector>

#include "floquet_if/bath.hpp"
#include "floquet_if/floquet.hpp"

namespace floquet::obs {

struct CorrelationOptions {
    double tau_max = 40.0;
    /// |C_decay| over the final drive period (at least the last 10 samples) must stay below
    /// relative_decay_threshold * |C(0)|.
    double relative_decay_threshold = 1e-4;
    int max_doublings = 3;
    int n_max = 8;  ///< Fourier harmonics kept (limited by the Nyquist index of the M-point grid)
};

struct SteadyCorrelation {
    double dt = 0.0;
    double omega_d = 0.0;  ///< 0 when undriven
    int steps_per_period = 1;
    std::vector<double> tau;
    std::vector<cd> full;   ///< period-averaged <S(t'+tau) S(t')>
    std::vector<cd> decay;  ///< connected part
    std::vector<cd> asym;   ///< factorized part
    std::vector<double> signal;        ///< <S(t_m)>, m = 0..M-1
    std::vector<cd> signal_fourier;    ///< s_n
    std::vector<double> c;             ///< c_n from the Fourier coefficients of <S(t)>
    std::vector<double> c_projection;  ///< c_n by cosine projection of C_asym over one period
    double decay_threshold = 0.0;
    double decay_tail = 0.0;  ///< max |C_decay| over the checked tail
};

/// Period-averaged two-time correlation of S in the Floquet steady state.
SteadyCorrelation steady_two_time_correlation(const engine::FloquetPropagator& fp, const engine::SteadyState& ss,
                                              const CorrelationOptions& options = {});

struct HeatCurrentSpectrum {
    std::vector<double> omega;
    std::vector<double> j_cont;
    std::vector<int> harmonic;          ///< n
    std::vector<double> harmonic_omega; ///< n omega_d
    std::vector<double> weights;        ///< w_n
    double total = 0.0;
};

struct HeatOptions {
    bool taper = false;            ///< cosine taper over the final fraction of tau_max
    double taper_fraction = 0.1;
};

HeatCurrentSpectrum heat_current_density(const SteadyCorrelation& corr, const bath::BathSpec& bath,
                                         const std::vector<double>& omega, const HeatOptions& options = {});

/// trapezoid over the continuous part plus all delta weights.
double total_heat_current(const HeatCurrentSpectrum& hcs);

/// Forward joint states of a quench, kept for finite-time correlation functions.
struct QuenchHistory {
    const engine::FloquetPropagator* fp = nullptr;
    std::vector<Vector> joint;  ///< w_0 ... w_N
};

QuenchHistory record_quench(const engine::FloquetPropagator& fp, const Matrix& rho0, long n_steps);

/// <S(t_n) S(t_s)> for s = 0..n.
std::vector<cd> two_time_correlation_row(const QuenchHistory& history, long n);

/// Finite-time heat current density j(t_n, omega).
std::vector<double> transient_heat_current(const QuenchHistory& history, long n, const bath::BathSpec& bath,
                                           const std::vector<double>& omega);

/// Uniform grid (0, omega_max] with n points.
std::vector<double> frequency_grid(double omega_max, int n);

}  // namespace floquet::obs
