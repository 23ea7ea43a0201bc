// experiments.hpp - virtual Ramsey and Ramsey-echo delay scans over a mode
// ensemble, and the fringe-contrast analysis applied to their traces.
//
// Scans are lab-frame delay scans: the scanned pulse carries the optical
// phase accumulated by the carrier over the delay, so fringes appear at the
// carrier period t0 without resolving optical cycles in time. Each mode
// starts in the ground state; the readout is the weight-averaged inversion w
// after the last pulse, normalized by the total weight.

#pragma once

#include "qcr/analytic.hpp"
#include "qcr/bloch.hpp"
#include "qcr/core.hpp"
#include "qcr/peaks.hpp"

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

namespace qcr::experiments {

struct ScanOptions {
    /// Area of each Ramsey pulse. Echo sequences always use pi/2, pi, pi/2.
    double pulse_area_rad = std::numbers::pi / 2.0;
    Envelope envelope = Envelope::delta;
    double fwhm_fs = 90.0;
    double dt_fs = 2.25;
    /// Smallest admissible pulse separation.
    double min_delay_fs = 600.0;
    double w_eq = -1.0;
    unsigned threads = 1;
};

/// start, start + step, ... up to stop (inclusive within a 1e-9 step tolerance).
std::vector<double> delay_grid(double start_fs, double stop_fs, double step_fs);

/// Rotation-axis phase of a pulse delayed by delay_fs relative to the first one.
double carrier_phase_rad(double delay_fs, double reference_period_fs);

/// Final Bloch state of one mode after a two-pulse Ramsey sequence.
BlochState ramsey_mode_state(double detuning_inv_fs, const bloch::Relaxation& relax, double delay_fs,
                             double reference_period_fs, double area_rad, const ScanOptions& opts);

/// Final Bloch state of one mode after pi/2 - pi - pi/2 with the rephasing pulse
/// at delay/2. The rephasing pulse keeps a fixed carrier phase; only the last
/// pulse is scanned.
BlochState echo_mode_state(double detuning_inv_fs, const bloch::Relaxation& relax, double delay_fs,
                           double reference_period_fs, const ScanOptions& opts);

FringeTrace ramsey_scan(const EnsembleSpec& ensemble, std::span<const double> delays_fs,
                        const ScanOptions& opts = {});
FringeTrace echo_scan(const EnsembleSpec& ensemble, std::span<const double> delays_fs,
                      const ScanOptions& opts = {});

// ---------------------------------------------------------------------------

struct ContrastOptions {
    /// Use the trace's nominal baseline instead of each window's mean.
    bool use_trace_baseline = false;
};

/// Centres of the complete one-carrier-period windows of a delay grid.
std::vector<double> window_centres(std::span<const double> delays_fs, double carrier_period_fs);

/// Fringe contrast per carrier-period window: (max + |min|)/2 of the signal
/// relative to the baseline, reported at the window centre.
///
/// Extrema are refined below the sample spacing by fitting a sinusoid at the
/// carrier period through the extreme sample and its two neighbours. Each
/// estimate belongs to the midpoint of its two extrema and is interpolated
/// linearly from there onto the window centres. Windows
/// with fewer than 4 samples and the trailing partial window are dropped.
/// Throws std::invalid_argument if the trace has fewer than 8 samples per
/// carrier period.
ContrastEnvelope extract_contrast(const FringeTrace& trace, double carrier_period_fs,
                                  const ContrastOptions& opts = {});

/// Local maxima with prominence >= min_prominence * max(envelope), sorted by
/// time. Positions are refined by parabolic interpolation.
std::vector<Peak> find_revival_peaks(const ContrastEnvelope& envelope, double min_prominence);

/// Multiplies out a homogeneous decay exp(-t/T2).
ContrastEnvelope compensate_decay(const ContrastEnvelope& envelope, double t2_ps);

/// Divides by the maximum over the envelope.
ContrastEnvelope normalize_to_max(const ContrastEnvelope& envelope);

struct RevivalOptions {
    /// Prominence threshold on the raw (damped) envelope.
    double raw_prominence = 0.01;
    /// Prominence threshold on the decay-compensated envelope.
    double min_prominence = 0.05;
};

struct RevivalAnalysis {
    /// Maxima of the damped envelope. Damping pulls each maximum slightly
    /// ahead of the rephasing time.
    std::vector<Peak> raw_peaks;
    /// Kind of the expected revival each raw peak was matched to, if any.
    std::vector<std::optional<analytic::RevivalKind>> raw_kinds;
    /// T2 from the matched raw peak heights (shared decay, one amplitude per kind).
    std::optional<FitResult> t2_fit;
    /// Maxima after multiplying out the fitted decay; these sit at the
    /// rephasing times of the ensemble.
    std::vector<Peak> rephasing_peaks;
};

RevivalAnalysis analyze_revivals(const ContrastEnvelope& envelope, const EnsembleSpec& ensemble,
                                 const RevivalOptions& opts = {});

/// End of the collapse window used for T2*: the first envelope minimum, or the
/// horizon if the envelope has none before it.
double collapse_window_end(const EnsembleSpec& ensemble, double horizon_fs);

/// T2* from a Ramsey contrast: readout intensity (contrast squared) on
/// [start, window_end] fitted with exp(-2t/T2*).
FitResult fit_ramsey_t2star(const ContrastEnvelope& envelope, double window_end_fs,
                            double noise_floor_rel = 1e-3);

/// T2 from an echo contrast: readout intensity against the pi/2-to-pi
/// separation (delay/2) fitted with exp(-4t/T2).
FitResult fit_echo_t2(const ContrastEnvelope& envelope, double noise_floor_rel = 1e-3);

/// T2* the Ramsey analysis would report for this ensemble on this delay grid,
/// evaluated from the closed-form envelope at the contrast window centres.
double predicted_ramsey_t2star(const EnsembleSpec& ensemble, std::span<const double> delays_fs,
                               double window_end_fs, double noise_floor_rel = 1e-3);

/// Period step of make_uniform_ensemble(reference, step, weights, t2_ps) whose
/// predicted Ramsey T2* on this grid equals target_t2star_ps. The collapse
/// window is taken from each candidate ensemble. Throws numerical_error when
/// the target is not bracketed by steps in [1e-6, 0.008] fs.
double calibrate_period_step(double reference_period_fs, std::span<const double> weights, double t2_ps,
                             double target_t2star_ps, std::span<const double> delays_fs);

struct NoiseSpec {
    double additive = 0.0;
    double multiplicative = 0.0;
};

/// signal * (1 + multiplicative * n1) + additive * n2 with standard normal n1, n2
/// drawn in sample order from a generator seeded with seed.
FringeTrace add_noise(const FringeTrace& trace, const NoiseSpec& noise, std::uint64_t seed);

}  // namespace qcr::experiments
