// bloch.hpp - single-mode optical Bloch evolution in the rotating frame of
// the reference carrier.
//
// Conventions:
//   * A pulse with phase phi rotates the Bloch vector about (cos phi, sin phi, 0)
//     by its area, right-handed. Phase 0 takes the ground state to (0, +1, 0)
//     with area pi/2.
//   * Free precession rotates (u, v) counter-clockwise by 2*pi*detuning*t, so a
//     mode faster than the carrier accumulates positive phase.
//   * Damping: (u, v) decay with T2, w relaxes towards w_eq with T1.

#pragma once

#include "qcr/core.hpp"

#include <span>

namespace qcr::bloch {

struct Relaxation {
    double t2_ps = infinity;
    double t1_ps = infinity;
    /// Equilibrium inversion; -1 is the absorber convention.
    double w_eq = -1.0;

    static Relaxation of(const ModeSpec& m, double w_eq = -1.0) { return {m.t2_ps(), m.t1_ps(), w_eq}; }
};

/// Instantaneous rotation by area_rad about the in-plane axis at phase_rad.
BlochState apply_pulse_delta(const BlochState& s, double area_rad, double phase_rad);

/// Closed-form precession plus damping over duration_fs. Throws
/// std::invalid_argument for negative durations.
BlochState evolve_free(const BlochState& s, double duration_fs, double detuning_inv_fs,
                       const Relaxation& relax = {});

/// Normalized Rabi rate of a finite pulse in rad/fs at time t_fs. The envelope
/// is truncated at +-4 FWHM around arrival and scaled so that its integral
/// over that window equals the pulse area exactly.
double rabi_rate(const PulseSpec& pulse, double t_fs);

/// Half width of the integration window of a finite pulse (4 FWHM).
double pulse_half_window_fs(const PulseSpec& pulse);

/// Integrates the damped Bloch equations across one finite pulse with fixed-step
/// RK4. The input state is taken at arrival - 4 FWHM and the result is the state
/// at arrival + 4 FWHM. Requires 0 < dt_fs <= FWHM/20 and a non-delta envelope.
BlochState evolve_finite_pulse(const BlochState& s, const PulseSpec& pulse, double detuning_inv_fs,
                               const Relaxation& relax, double dt_fs);

/// Runs a pulse sequence. All pulses must share the same envelope kind.
///
/// Delta pulses: the sequence starts at the first arrival and the result is the
/// state just after the last pulse. Finite pulses: the sequence starts at the
/// opening of the first pulse window and ends when the last window closes;
/// overlapping windows are integrated together with the summed field, gaps
/// between windows use the closed-form free evolution.
BlochState run_sequence(const BlochState& start, std::span<const PulseSpec> pulses,
                        double detuning_inv_fs, const Relaxation& relax, double dt_fs = 1.0);

}  // namespace qcr::bloch
