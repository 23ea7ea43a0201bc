// core.hpp - shared domain types and unit conventions.
//
// Canonical units across the toolkit:
//   delays, periods     femtoseconds (fs)
//   relaxation times    picoseconds (ps)
//   energies            milli-electronvolts (meV)
//   temperatures        kelvin (K)
// Detunings are ordinary frequencies in inverse femtoseconds (cycles per fs).

#pragma once

#include <cstddef>
#include <limits>
#include <map>
#include <numbers>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace qcr {

inline constexpr double infinity = std::numeric_limits<double>::infinity();
inline constexpr double two_pi = 2.0 * std::numbers::pi;

inline constexpr double fs_per_ps = 1000.0;

constexpr double ps_to_fs(double ps) { return ps * fs_per_ps; }
constexpr double fs_to_ps(double fs) { return fs / fs_per_ps; }

/// Planck constant h in meV·ps, from the exact SI values of h and e.
double planck_constant_mev_ps();

/// Numerical failure: a fit or solve that is degenerate for the given data.
class numerical_error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// ---------------------------------------------------------------------------

/// One homogeneous subgroup of emitters sharing a transition frequency.
class ModeSpec {
public:
    ModeSpec(double period_fs, double weight, double t2_ps, double t1_ps = infinity);

    double period_fs() const { return period_fs_; }
    double weight() const { return weight_; }
    double t2_ps() const { return t2_ps_; }
    double t1_ps() const { return t1_ps_; }

    ModeSpec with_t2(double t2_ps) const { return {period_fs_, weight_, t2_ps, t1_ps_}; }

private:
    double period_fs_;
    double weight_;
    double t2_ps_;
    double t1_ps_;
};

/// Discrete inhomogeneous ensemble: a list of modes plus the rotating-frame
/// reference period t0.
class EnsembleSpec {
public:
    EnsembleSpec(std::vector<ModeSpec> modes, double reference_period_fs);

    const std::vector<ModeSpec>& modes() const { return modes_; }
    std::size_t size() const { return modes_.size(); }
    const ModeSpec& operator[](std::size_t k) const { return modes_[k]; }
    double reference_period_fs() const { return reference_period_fs_; }

    /// 1/t_k - 1/t0 in fs^-1. Positive for modes faster than the carrier.
    double detuning_inv_fs(std::size_t k) const;
    double total_weight() const;

    EnsembleSpec with_t2(double t2_ps) const;

private:
    std::vector<ModeSpec> modes_;
    double reference_period_fs_;
};

/// Ensemble with periods t0 + k*step for k = -(n-1)/2 .. (n-1)/2 (n odd) or the
/// matching half-integer offsets (n even); one mode per weight.
EnsembleSpec make_uniform_ensemble(double reference_period_fs, double period_step_fs,
                                   std::span<const double> weights, double t2_ps,
                                   double t1_ps = infinity);

/// Default five-mode ensemble:
/// weights {1/3, 1/2, 1, 1/2, 1/3}, periods 5.109 + 0.004 k fs, k = -2..2.
EnsembleSpec reference_ensemble(double t2_ps = 4.64);

// ---------------------------------------------------------------------------

enum class Envelope { delta, gaussian, sech };

Envelope parse_envelope(std::string_view name);
std::string_view to_string(Envelope e);

/// One excitation pulse. fwhm_fs is the intensity FWHM; ignored for delta.
struct PulseSpec {
    PulseSpec(double area_rad, double arrival_fs, double phase_rad,
              Envelope envelope = Envelope::delta, double fwhm_fs = 90.0);

    double area_rad;
    double arrival_fs;
    double phase_rad;
    Envelope envelope;
    double fwhm_fs;
};

/// Real Bloch vector. u = 2 Re rho12, v = -2 Im rho12, w = rho22 - rho11.
struct BlochState {
    double u = 0.0;
    double v = 0.0;
    double w = -1.0;

    static constexpr BlochState ground() { return {0.0, 0.0, -1.0}; }

    double norm() const;
    /// |rho12|
    double coherence() const;
};

inline constexpr double bloch_norm_slack = 1e-9;

/// Debug-build guard: an operation applied to a state inside the Bloch ball
/// must keep it there (|B| <= 1 + slack).
void assert_physical(const BlochState& out, const BlochState& in);

// ---------------------------------------------------------------------------

/// Delay-scan readout. Delays strictly increasing.
class FringeTrace {
public:
    FringeTrace(std::vector<double> delays_fs, std::vector<double> signal, double baseline = 0.0);

    const std::vector<double>& delays_fs() const { return delays_fs_; }
    const std::vector<double>& signal() const { return signal_; }
    double baseline() const { return baseline_; }
    std::size_t size() const { return delays_fs_.size(); }

private:
    std::vector<double> delays_fs_;
    std::vector<double> signal_;
    double baseline_;
};

/// Slowly varying fringe contrast, non-negative.
class ContrastEnvelope {
public:
    ContrastEnvelope(std::vector<double> delays_fs, std::vector<double> contrast);

    const std::vector<double>& delays_fs() const { return delays_fs_; }
    const std::vector<double>& contrast() const { return contrast_; }
    std::size_t size() const { return delays_fs_.size(); }
    bool empty() const { return delays_fs_.empty(); }

    double max() const;

private:
    std::vector<double> delays_fs_;
    std::vector<double> contrast_;
};

struct FitResult {
    std::map<std::string, double> params;
    double rms_residual = 0.0;
    std::size_t n_points = 0;

    /// Throws std::out_of_range for unknown names.
    double param(const std::string& name) const;
};

}  // namespace qcr
