// propagate.hpp - reduced propagation map: a Ramsey pulse pair travels through
// z slices of the medium, each slice a set of independent detuning channels.
//
// Pulse area entering slice j is area0 * gain^j clamped to [0, pi]. Every
// slice starts from the equilibrium state, so the map is linear in the sense
// that slices only differ by the area they see.

#pragma once

#include "qcr/core.hpp"
#include "qcr/peaks.hpp"

#include <cstddef>
#include <span>
#include <vector>

namespace qcr::propagate {

inline constexpr std::size_t min_channels = 64;

struct PropagationOptions {
    double area_rad = std::numbers::pi / 2.0;
    std::size_t z_steps = 1;
    double gain_per_step = 1.0;
    double w_eq = -1.0;
    unsigned threads = 1;
};

/// Row-major z-by-channel matrix.
struct Map2D {
    std::size_t rows = 0;
    std::size_t cols = 0;
    std::vector<double> data;

    double at(std::size_t r, std::size_t c) const { return data[r * cols + c]; }
    std::span<const double> row(std::size_t r) const { return {data.data() + r * cols, cols}; }
};

struct PropagationMap {
    /// Channel detunings in fs^-1, ascending.
    std::vector<double> detunings_inv_fs;
    /// Channel weights, same order.
    std::vector<double> weights;
    /// Pulse area entering each slice.
    std::vector<double> areas_rad;
    Map2D inversion;
    Map2D coherence;
};

/// Requires at least 64 channels and z_steps >= 1; the delay may be zero.
PropagationMap propagate_map(const EnsembleSpec& dense, double delay_fs, const PropagationOptions& opts = {});

/// Channels uniformly spaced in detuning over [-half_span, +half_span] around
/// the reference carrier, all with the same weight, T2 and T1.
EnsembleSpec make_dense_ensemble(double reference_period_fs, double half_span_inv_fs, std::size_t channels,
                                 double t2_ps, double t1_ps = infinity);

/// Replaces the channel weights with a sum of Gaussian lobes, one per mode of
/// `lobes`, centred on its detuning with the mode weight as height.
EnsembleSpec with_lobe_weights(const EnsembleSpec& dense, const EnsembleSpec& lobes, double sigma_inv_fs);

struct FringeStats {
    std::size_t count = 0;
    /// Mean distance between neighbouring fringe maxima; 0 with fewer than two.
    double spacing_inv_fs = 0.0;
    std::vector<double> positions_inv_fs;
};

/// Maxima of the raw inversion of one slice against detuning, with prominence
/// of at least min_prominence_rel times the inversion range.
FringeStats spectral_fringes(const PropagationMap& map, std::size_t slice = 0, double min_prominence_rel = 0.1);

/// Slice-averaged weight * |rho12| per channel.
std::vector<double> weighted_coherence_spectrum(const PropagationMap& map);

/// Maxima of a spectrum with prominence >= min_prominence_rel * max.
std::vector<Peak> dominant_maxima(std::span<const double> detunings_inv_fs, std::span<const double> spectrum,
                                  double min_prominence_rel = 0.05);

/// Each channel's value multiplied by its weight, then the whole matrix
/// divided by its largest magnitude.
Map2D weighted_normalized(const Map2D& m, std::span<const double> weights);

}  // namespace qcr::propagate
