// commands.hpp - the tool's subcommands. Each one writes its artifacts into
// an output directory and returns the summary object it also stores there.

#pragma once

#include "qcr/cli/config.hpp"
#include "qcr/cli/csv.hpp"

#include <filesystem>
#include <string_view>

namespace qcr::cli {

using nlohmann::ordered_json;

/// analytic.csv (time_fs, signal, envelope) normalized by the total weight,
/// plus analytic_summary.json.
ordered_json cmd_analytic(const Config& cfg, const std::filesystem::path& out_dir);

/// ramsey.csv (delay_fs, signal, contrast), ramsey_envelope.csv and
/// ramsey_summary.json with revival peaks, T2 from revival decay and T2*.
ordered_json cmd_ramsey(const Config& cfg, const std::filesystem::path& out_dir);

/// echo.csv, echo_envelope.csv and echo_summary.json with the fitted T2.
ordered_json cmd_echo(const Config& cfg, const std::filesystem::path& out_dir);

enum class FitModel { exp1, exp2, exp4, power, exp_temperature };

/// exp1 | exp2 | exp4 | power | arrhenius (aliases arrhenius-like, exp-temperature).
FitModel parse_fit_model(std::string_view name);
std::string_view to_string(FitModel model);

/// Fits a two-column CSV and writes fit.json {params, rms_residual, n_points}.
ordered_json cmd_fit(const Config& cfg, const std::filesystem::path& input, FitModel model,
                     const std::filesystem::path& out_dir);

/// inversion_map.csv and coherence_map.csv (rows = z slices, columns =
/// detuning channels), coherence_spectrum.csv and propagate_summary.json.
ordered_json cmd_propagate(const Config& cfg, const std::filesystem::path& out_dir);

/// sweep.csv (x, T2_ps, T2star_ps) and sweep_summary.json with the fitted
/// scaling laws. Needs at least three sweep points.
ordered_json cmd_sweep(const Config& cfg, const std::filesystem::path& out_dir);

/// effective_config.ini: the configuration after presets, file and flags.
void write_effective_config(const Config& cfg, const std::filesystem::path& out_dir);

}  // namespace qcr::cli
