// fitting.hpp - log-linear least-squares parameter extraction.
//
// Every model here is linear after taking a logarithm, so each fit is a single
// closed-form unweighted regression. Residuals are reported in log space.

#pragma once

#include "qcr/core.hpp"

#include <span>

namespace qcr::fitting {

struct LineFit {
    double slope = 0.0;
    double intercept = 0.0;
    double rms_residual = 0.0;
};

/// Ordinary least squares y = slope * x + intercept on centred data.
LineFit fit_line(std::span<const double> x, std::span<const double> y);

/// contrast ~ amplitude * exp(-c t / tau). Samples below noise_floor_rel * max
/// are excluded. Params: tau_ps, amplitude.
///
/// Throws numerical_error when fewer than 3 usable samples remain or when the
/// data shows no decay.
FitResult fit_exp_decay(const ContrastEnvelope& envelope, double exponent_factor,
                        double noise_floor_rel = 1e-3);

/// y ~ prefactor * x^(-beta). Params: beta, prefactor.
FitResult fit_power_law(std::span<const double> x, std::span<const double> y);

/// y ~ prefactor * exp(-T / T0). Params: t0_K, prefactor.
FitResult fit_exp_temperature(std::span<const double> temperature_K, std::span<const double> y);

/// Shared exponential decay height ~ A_g * exp(-t / tau) with one amplitude per
/// group label. Used for revival peaks, where full and fractional revivals have
/// different undamped heights but decay with the same T2.
/// Params: tau_ps and amplitude_<g> for every group present.
FitResult fit_grouped_exp_decay(std::span<const double> times_fs, std::span<const double> heights,
                                std::span<const int> groups);

}  // namespace qcr::fitting
