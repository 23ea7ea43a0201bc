// analytic.hpp - closed-form multi-mode revival model.
//
// The ensemble response is a sum of uncoupled damped modes,
//   s(t) = exp(-t/T2) * sum_k a_k sin(2 pi t / t_k),
// whose slowly varying magnitude in the frame of the carrier t0 is
//   E(t) = exp(-t/T2) * | sum_k a_k exp(i 2 pi (1/t_k - 1/t0) t) |.
// Overloads without a T2 argument damp each mode with its own T2.

#pragma once

#include "qcr/core.hpp"

#include <vector>

namespace qcr::analytic {

double revival_signal(double t_fs, const EnsembleSpec& ensemble, double t2_ps);
double revival_signal(double t_fs, const EnsembleSpec& ensemble);

double revival_envelope(double t_fs, const EnsembleSpec& ensemble, double t2_ps);
double revival_envelope(double t_fs, const EnsembleSpec& ensemble);

enum class RevivalKind { full, fractional };

struct RevivalTime {
    double time_fs;
    RevivalKind kind;
};

const char* to_string(RevivalKind kind);

/// Mean spacing of the sorted mode detunings (fs^-1). Throws
/// std::invalid_argument when the spacing deviates from uniform by 10% or more.
double mean_detuning_spacing(const EnsembleSpec& ensemble);

/// Rephasing times up to horizon_fs: full revivals at multiples of 1/df and
/// fractional revivals at odd multiples of 1/(2 df), the latter only where the
/// undamped envelope actually has a local maximum. Empty for a single mode.
std::vector<RevivalTime> revival_times(const EnsembleSpec& ensemble, double horizon_fs = 15000.0);

/// Full linewidth dE = 2h/T2 in meV, and its inverse.
double linewidth_from_t2(double t2_ps);
double t2_from_linewidth(double linewidth_mev);

/// First local minimum of the (per-mode damped) envelope after t = 0, refined
/// to sub-femtosecond precision. Throws numerical_error if none lies within
/// the horizon.
double first_envelope_minimum(const EnsembleSpec& ensemble, double horizon_fs = 15000.0);

/// Effective inhomogeneous dephasing time from the initial collapse: the
/// envelope is sampled on [0, first minimum] and the readout intensity
/// (envelope squared) is fitted with exp(-2t/T2*). Needs at least two modes.
double effective_t2star(const EnsembleSpec& ensemble, double horizon_fs = 15000.0);

}  // namespace qcr::analytic
