// config.hpp - run configuration: presets, INI parsing and the effective
// configuration dump.
//
// Files use INI syntax with one section per concern:
//
//   [run]        seed, threads
//   [ensemble]   reference_period_fs, period_step_fs, weights, t2_ps, t1_ps
//   [pulse]      area_rad, envelope, fwhm_fs, dt_fs
//   [scan]       start_fs, stop_fs, step_fs, min_delay_fs, w_eq,
//                noise_additive, noise_multiplicative
//   [analysis]   prominence, raw_prominence, noise_floor, baseline
//   [analytic]   start_fs, stop_fs, step_fs
//   [propagate]  delay_fs, z_steps, gain_per_step, channels,
//                half_span_inv_fs, lobes, lobe_sigma_rel, normalize
//   [sweep]      axis, bias_points, bias_reference, temperature_points,
//                temperature_reference, t2_ref_ps, t2star_ref_ps,
//                beta_homo, beta_inhomo, t0_homo_K, t0_inhomo_K,
//                noise_multiplicative
//
// Lists are comma separated; weights also accept fractions such as 1/3.
// Unknown sections or keys are rejected.

#pragma once

#include "qcr/core.hpp"

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace qcr::cli {

class config_error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class io_error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct RunConfig {
    std::uint64_t seed = 0;
    unsigned threads = 1;
};

struct EnsembleConfig {
    double reference_period_fs = 5.109;
    double period_step_fs = 0.004;
    std::vector<double> weights{1.0 / 3.0, 0.5, 1.0, 0.5, 1.0 / 3.0};
    double t2_ps = 4.64;
    double t1_ps = infinity;
};

struct PulseConfig {
    double area_rad = std::numbers::pi / 2.0;
    Envelope envelope = Envelope::delta;
    double fwhm_fs = 90.0;
    double dt_fs = 2.25;
};

struct ScanConfig {
    double start_fs = 600.0;
    double stop_fs = 15000.0;
    double step_fs = 0.5;
    double min_delay_fs = 600.0;
    double w_eq = -1.0;
    double noise_additive = 0.0;
    double noise_multiplicative = 0.0;
};

struct AnalysisConfig {
    double prominence = 0.05;
    double raw_prominence = 0.01;
    double noise_floor = 1e-3;
    /// Constant baseline override; per-window mean when empty.
    std::optional<double> baseline;
};

struct AnalyticConfig {
    double start_fs = 0.0;
    double stop_fs = 15000.0;
    double step_fs = 0.5;
};

struct PropagateConfig {
    double delay_fs = 1000.0;
    std::size_t z_steps = 10;
    double gain_per_step = 0.95;
    std::size_t channels = 801;
    double half_span_inv_fs = 4e-3;
    bool lobes = true;
    /// Lobe width relative to the mean mode spacing of the ensemble.
    double lobe_sigma_rel = 0.125;
    bool normalize = true;
};

enum class SweepAxis { bias, temperature };

struct SweepConfig {
    SweepAxis axis = SweepAxis::bias;
    /// Current density (arbitrary units) and temperature (K) grids.
    std::vector<double> bias_points{3.0, 4.0, 4.7, 6.0, 7.15};
    double bias_reference = 4.7;
    std::vector<double> temperature_points{260.0, 280.0, 300.0, 320.0, 340.0};
    double temperature_reference = 300.0;
    double t2_ref_ps = 5.22;
    double t2star_ref_ps = 1.27;
    double beta_homo = 0.38;
    double beta_inhomo = 0.48;
    double t0_homo_K = 284.0;
    double t0_inhomo_K = 62.0;
    double noise_multiplicative = 0.0;
};

struct Config {
    RunConfig run;
    EnsembleConfig ensemble;
    PulseConfig pulse;
    ScanConfig scan;
    AnalysisConfig analysis;
    AnalyticConfig analytic;
    PropagateConfig propagate;
    SweepConfig sweep;
};

/// Period step that gives the five-mode ensemble a Ramsey T2* of 1.27 ps with
/// T2 = 5.22 ps on the default delay grid.
inline constexpr double fig4_period_step_fs = 0.00147306;

/// Named starting points: paper-fig2 (alias paper-defaults), paper-fig4,
/// paper-fig5. Throws config_error for unknown names.
Config preset(std::string_view name);

/// Applies the keys of an INI document on top of base.
Config parse_config(std::string_view text, Config base = {});
Config load_config(const std::string& path, Config base = {});

/// Every key with its effective value, in a form parse_config reads back
/// to an identical Config.
std::string dump_config(const Config& cfg);

std::string_view to_string(SweepAxis axis);

/// Ensemble built from the [ensemble] section.
EnsembleSpec build_ensemble(const EnsembleConfig& cfg);

}  // namespace qcr::cli
