#include "qcr/cli/commands.hpp"

#include "qcr/analytic.hpp"
#include "qcr/experiments.hpp"
#include "qcr/fitting.hpp"
#include "qcr/propagate.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>

namespace qcr::cli {

namespace fs = std::filesystem;

namespace {

experiments::ScanOptions scan_options(const Config& cfg)
{
    experiments::ScanOptions o;
    o.pulse_area_rad = cfg.pulse.area_rad;
    o.envelope = cfg.pulse.envelope;
    o.fwhm_fs = cfg.pulse.fwhm_fs;
    o.dt_fs = cfg.pulse.dt_fs;
    o.min_delay_fs = cfg.scan.min_delay_fs;
    o.w_eq = cfg.scan.w_eq;
    o.threads = cfg.run.threads;
    return o;
}

std::vector<double> scan_delays(const Config& cfg)
{
    try {
        return experiments::delay_grid(cfg.scan.start_fs, cfg.scan.stop_fs, cfg.scan.step_fs);
    } catch (const std::invalid_argument& e) {
        throw config_error(std::string("[scan]: ") + e.what());
    }
}

ContrastEnvelope contrast_of(const FringeTrace& trace, const Config& cfg, double period_fs)
{
    if (!cfg.analysis.baseline)
        return experiments::extract_contrast(trace, period_fs);
    const FringeTrace with_baseline(trace.delays_fs(), trace.signal(), *cfg.analysis.baseline);
    return experiments::extract_contrast(with_baseline, period_fs, {.use_trace_baseline = true});
}

/// Envelope value at each delay: linear between window centres, held at the ends.
std::vector<double> contrast_at(const ContrastEnvelope& env, std::span<const double> delays)
{
    std::vector<double> out(delays.size(), 0.0);
    if (env.empty())
        return out;
    const auto& t = env.delays_fs();
    const auto& c = env.contrast();
    for (std::size_t i = 0; i < delays.size(); ++i) {
        const auto it = std::upper_bound(t.begin(), t.end(), delays[i]);
        if (it == t.begin()) {
            out[i] = c.front();
        } else if (it == t.end()) {
            out[i] = c.back();
        } else {
            const auto j = static_cast<std::size_t>(it - t.begin());
            const double f = (delays[i] - t[j - 1]) / (t[j] - t[j - 1]);
            out[i] = c[j - 1] + f * (c[j] - c[j - 1]);
        }
    }
    return out;
}

FringeTrace noisy(const FringeTrace& trace, const experiments::NoiseSpec& noise, std::uint64_t seed)
{
    if (noise.additive == 0.0 && noise.multiplicative == 0.0)
        return trace;
    try {
        return experiments::add_noise(trace, noise, seed);
    } catch (const std::invalid_argument& e) {
        throw config_error(std::string("noise: ") + e.what());
    }
}

ordered_json fit_json(const FitResult& r)
{
    ordered_json params = ordered_json::object();
    for (const auto& [k, v] : r.params)
        params[k] = v;
    return {{"params", params}, {"rms_residual", r.rms_residual}, {"n_points", r.n_points}};
}

ordered_json peaks_json(const std::vector<Peak>& peaks, double scale)
{
    ordered_json arr = ordered_json::array();
    for (const auto& p : peaks)
        arr.push_back({{"time_fs", p.position}, {"height", p.height * scale}, {"prominence", p.prominence * scale}});
    return arr;
}

const char* nearest_kind(const std::vector<analytic::RevivalTime>& expected, double t)
{
    const analytic::RevivalTime* best = nullptr;
    for (const auto& r : expected)
        if (!best || std::abs(r.time_fs - t) < std::abs(best->time_fs - t))
            best = &r;
    return best ? analytic::to_string(best->kind) : "unmatched";
}

void write_envelope(const fs::path& path, const ContrastEnvelope& env, const ContrastEnvelope& normalized)
{
    const std::string header[] = {"delay_fs", "contrast", "normalized_contrast"};
    const std::vector<double> cols[] = {env.delays_fs(), env.contrast(), normalized.contrast()};
    write_columns(path, header, cols);
}

void write_trace(const fs::path& path, const FringeTrace& trace, const ContrastEnvelope& env)
{
    const std::string header[] = {"delay_fs", "signal", "contrast"};
    const std::vector<double> cols[] = {trace.delays_fs(), trace.signal(), contrast_at(env, trace.delays_fs())};
    write_columns(path, header, cols);
}

void write_matrix(const fs::path& path, const propagate::Map2D& m, const propagate::PropagationMap& map)
{
    std::vector<std::string> header{"z_index", "area_rad"};
    for (double d : map.detunings_inv_fs)
        header.push_back(format_double(d));
    std::vector<std::vector<double>> cols(2 + m.cols, std::vector<double>(m.rows));
    for (std::size_t r = 0; r < m.rows; ++r) {
        cols[0][r] = static_cast<double>(r);
        cols[1][r] = map.areas_rad[r];
        for (std::size_t c = 0; c < m.cols; ++c)
            cols[2 + c][r] = m.at(r, c);
    }
    write_columns(path, header, cols);
}

double relative_variance(const ContrastEnvelope& env)
{
    const auto& c = env.contrast();
    if (c.empty())
        return 0.0;
    double mean = 0.0;
    for (double v : c)
        mean += v;
    mean /= static_cast<double>(c.size());
    double var = 0.0;
    for (double v : c)
        var += (v - mean) * (v - mean);
    var /= static_cast<double>(c.size());
    return mean > 0.0 ? var / (mean * mean) : 0.0;
}

}  // namespace

void write_effective_config(const Config& cfg, const fs::path& out_dir)
{
    write_text(out_dir / "effective_config.ini", dump_config(cfg));
}

// ---------------------------------------------------------------------------

ordered_json cmd_analytic(const Config& cfg, const fs::path& out_dir)
{
    const EnsembleSpec ens = build_ensemble(cfg.ensemble);
    std::vector<double> t;
    try {
        t = experiments::delay_grid(cfg.analytic.start_fs, cfg.analytic.stop_fs, cfg.analytic.step_fs);
    } catch (const std::invalid_argument& e) {
        throw config_error(std::string("[analytic]: ") + e.what());
    }
    if (t.front() < 0.0)
        throw config_error("[analytic]: start_fs must be non-negative");

    const double total = ens.total_weight();
    std::vector<double> signal(t.size()), envelope(t.size()), undamped(t.size());
    for (std::size_t i = 0; i < t.size(); ++i) {
        signal[i] = analytic::revival_signal(t[i], ens) / total;
        envelope[i] = analytic::revival_envelope(t[i], ens) / total;
        undamped[i] = analytic::revival_envelope(t[i], ens, infinity) / total;
    }
    {
        const std::string header[] = {"time_fs", "signal", "envelope"};
        const std::vector<double> cols[] = {t, signal, envelope};
        write_columns(out_dir / "analytic.csv", header, cols);
    }

    const auto expected = analytic::revival_times(ens, t.back());
    const double top = *std::max_element(envelope.begin(), envelope.end());
    const double top_undamped = *std::max_element(undamped.begin(), undamped.end());
    auto damped_peaks = find_peaks(t, envelope, cfg.analysis.prominence * top);
    auto rephasing = find_peaks(t, undamped, cfg.analysis.prominence * top_undamped);

    ordered_json revivals = ordered_json::array();
    for (const auto& r : expected)
        revivals.push_back({{"time_fs", r.time_fs}, {"kind", analytic::to_string(r.kind)}});
    ordered_json rephasing_json = ordered_json::array();
    for (const auto& p : rephasing)
        rephasing_json.push_back({{"time_fs", p.position},
                                  {"envelope", envelope[p.index]},
                                  {"kind", nearest_kind(expected, p.position)}});

    ordered_json linewidths = ordered_json::array();
    for (const auto& m : ens.modes())
        linewidths.push_back(std::isfinite(m.t2_ps()) ? ordered_json(analytic::linewidth_from_t2(m.t2_ps()))
                                                      : ordered_json(0.0));

    ordered_json t2star = nullptr, first_min = nullptr;
    if (ens.size() >= 2) {
        try {
            first_min = analytic::first_envelope_minimum(ens, t.back());
            t2star = analytic::effective_t2star(ens, t.back());
        } catch (const numerical_error&) {
        }
    }

    ordered_json summary = {
        {"rows", t.size()},
        {"total_weight", total},
        {"revival_times", revivals},
        {"rephasing_peaks", rephasing_json},
        {"envelope_peaks", peaks_json(damped_peaks, 1.0)},
        {"linewidth_meV", linewidths},
        {"first_envelope_minimum_fs", first_min},
        {"effective_t2star_ps", t2star},
    };
    write_json(out_dir / "analytic_summary.json", summary);
    return summary;
}

// ---------------------------------------------------------------------------

ordered_json cmd_ramsey(const Config& cfg, const fs::path& out_dir)
{
    const EnsembleSpec ens = build_ensemble(cfg.ensemble);
    const auto delays = scan_delays(cfg);
    const double t0 = ens.reference_period_fs();

    FringeTrace trace = noisy(experiments::ramsey_scan(ens, delays, scan_options(cfg)),
                              {cfg.scan.noise_additive, cfg.scan.noise_multiplicative}, cfg.run.seed);
    const ContrastEnvelope env = contrast_of(trace, cfg, t0);
    const ContrastEnvelope norm = experiments::normalize_to_max(env);
    write_trace(out_dir / "ramsey.csv", trace, env);
    write_envelope(out_dir / "ramsey_envelope.csv", env, norm);

    experiments::RevivalOptions ropts;
    ropts.raw_prominence = cfg.analysis.raw_prominence;
    ropts.min_prominence = cfg.analysis.prominence;
    const auto rev = experiments::analyze_revivals(env, ens, ropts);

    std::vector<analytic::RevivalTime> expected;
    if (ens.size() >= 2) {
        try {
            expected = analytic::revival_times(ens, delays.back());
        } catch (const std::invalid_argument&) {
        }
    }
    const double scale = env.max() > 0.0 ? 1.0 / env.max() : 1.0;
    ordered_json revival_peaks = ordered_json::array();
    for (const auto& p : rev.rephasing_peaks)
        revival_peaks.push_back({{"time_fs", p.position},
                                 {"contrast", norm.contrast()[p.index]},
                                 {"kind", nearest_kind(expected, p.position)}});

    ordered_json t2_rev = nullptr;
    if (rev.t2_fit)
        t2_rev = fit_json(*rev.t2_fit);

    const double window_end = experiments::collapse_window_end(ens, delays.back());
    ordered_json t2star = nullptr;
    std::string t2star_error;
    try {
        t2star = fit_json(experiments::fit_ramsey_t2star(env, window_end, cfg.analysis.noise_floor));
    } catch (const numerical_error& e) {
        t2star_error = e.what();
    }

    ordered_json summary = {
        {"n_delays", delays.size()},
        {"carrier_period_fs", t0},
        {"normalization_max", env.max()},
        {"revival_count", rev.rephasing_peaks.size()},
        {"revival_peaks", revival_peaks},
        {"raw_peaks", peaks_json(rev.raw_peaks, scale)},
        {"t2_from_revivals", t2_rev},
        {"t2star_window_end_fs", window_end},
        {"t2star", t2star},
    };
    if (!t2star_error.empty())
        summary["t2star_error"] = t2star_error;
    write_json(out_dir / "ramsey_summary.json", summary);
    return summary;
}

ordered_json cmd_echo(const Config& cfg, const fs::path& out_dir)
{
    const EnsembleSpec ens = build_ensemble(cfg.ensemble);
    const auto delays = scan_delays(cfg);
    const double t0 = ens.reference_period_fs();

    FringeTrace trace = noisy(experiments::echo_scan(ens, delays, scan_options(cfg)),
                              {cfg.scan.noise_additive, cfg.scan.noise_multiplicative}, cfg.run.seed);
    const ContrastEnvelope env = contrast_of(trace, cfg, t0);
    const ContrastEnvelope norm = experiments::normalize_to_max(env);
    write_trace(out_dir / "echo.csv", trace, env);
    write_envelope(out_dir / "echo_envelope.csv", env, norm);

    ordered_json t2 = nullptr;
    std::string t2_error;
    try {
        t2 = fit_json(experiments::fit_echo_t2(env, cfg.analysis.noise_floor));
    } catch (const numerical_error& e) {
        t2_error = e.what();
    }

    ordered_json summary = {
        {"n_delays", delays.size()},
        {"carrier_period_fs", t0},
        {"normalization_max", env.max()},
        {"contrast_relative_variance", relative_variance(env)},
        {"t2", t2},
    };
    if (!t2_error.empty())
        summary["t2_error"] = t2_error;
    write_json(out_dir / "echo_summary.json", summary);
    return summary;
}

// ---------------------------------------------------------------------------

FitModel parse_fit_model(std::string_view name)
{
    if (name == "exp1")
        return FitModel::exp1;
    if (name == "exp2")
        return FitModel::exp2;
    if (name == "exp4")
        return FitModel::exp4;
    if (name == "power")
        return FitModel::power;
    if (name == "arrhenius" || name == "arrhenius-like" || name == "exp-temperature")
        return FitModel::exp_temperature;
    throw config_error("unknown fit model '" + std::string(name) + "'");
}

std::string_view to_string(FitModel model)
{
    switch (model) {
    case FitModel::exp1: return "exp1";
    case FitModel::exp2: return "exp2";
    case FitModel::exp4: return "exp4";
    case FitModel::power: return "power";
    case FitModel::exp_temperature: return "arrhenius";
    }
    return "unknown";
}

ordered_json cmd_fit(const Config& cfg, const fs::path& input, FitModel model, const fs::path& out_dir)
{
    const TwoColumns data = read_two_columns(input);
    FitResult r;
    try {
        switch (model) {
        case FitModel::exp1:
        case FitModel::exp2:
        case FitModel::exp4: {
            const double c = model == FitModel::exp1 ? 1.0 : model == FitModel::exp2 ? 2.0 : 4.0;
            r = fitting::fit_exp_decay(ContrastEnvelope(data.x, data.y), c, cfg.analysis.noise_floor);
            break;
        }
        case FitModel::power:
            r = fitting::fit_power_law(data.x, data.y);
            break;
        case FitModel::exp_temperature:
            r = fitting::fit_exp_temperature(data.x, data.y);
            break;
        }
    } catch (const std::invalid_argument& e) {
        throw config_error(input.string() + ": " + e.what());
    }
    const ordered_json j = fit_json(r);
    write_json(out_dir / "fit.json", j);
    return j;
}

// ---------------------------------------------------------------------------

ordered_json cmd_propagate(const Config& cfg, const fs::path& out_dir)
{
    const EnsembleSpec ens = build_ensemble(cfg.ensemble);
    const auto& p = cfg.propagate;

    propagate::PropagationMap map;
    try {
        EnsembleSpec dense = propagate::make_dense_ensemble(ens.reference_period_fs(), p.half_span_inv_fs, p.channels,
                                                            cfg.ensemble.t2_ps, cfg.ensemble.t1_ps);
        if (p.lobes && ens.size() >= 2) {
            const double sigma = p.lobe_sigma_rel * analytic::mean_detuning_spacing(ens);
            dense = propagate::with_lobe_weights(dense, ens, sigma);
        }
        propagate::PropagationOptions o;
        o.area_rad = cfg.pulse.area_rad;
        o.z_steps = p.z_steps;
        o.gain_per_step = p.gain_per_step;
        o.w_eq = cfg.scan.w_eq;
        o.threads = cfg.run.threads;
        map = propagate::propagate_map(dense, p.delay_fs, o);
    } catch (const std::invalid_argument& e) {
        throw config_error(std::string("[propagate]: ") + e.what());
    }

    if (p.normalize) {
        write_matrix(out_dir / "inversion_map.csv", propagate::weighted_normalized(map.inversion, map.weights), map);
        write_matrix(out_dir / "coherence_map.csv", propagate::weighted_normalized(map.coherence, map.weights), map);
    } else {
        write_matrix(out_dir / "inversion_map.csv", map.inversion, map);
        write_matrix(out_dir / "coherence_map.csv", map.coherence, map);
    }

    const auto spectrum = propagate::weighted_coherence_spectrum(map);
    {
        const std::string header[] = {"detuning_inv_fs", "weight", "weighted_coherence"};
        const std::vector<double> cols[] = {map.detunings_inv_fs, map.weights, spectrum};
        write_columns(out_dir / "coherence_spectrum.csv", header, cols);
    }

    const auto fringes = propagate::spectral_fringes(map);
    const auto maxima = propagate::dominant_maxima(map.detunings_inv_fs, spectrum);
    ordered_json maxima_json = ordered_json::array();
    for (const auto& m : maxima)
        maxima_json.push_back({{"detuning_inv_fs", m.position}, {"height", m.height}, {"prominence", m.prominence}});

    ordered_json summary = {
        {"delay_fs", p.delay_fs},
        {"channels", map.detunings_inv_fs.size()},
        {"z_steps", map.areas_rad.size()},
        {"areas_rad", map.areas_rad},
        {"fringe_count", fringes.count},
        {"fringe_spacing_inv_fs", fringes.count >= 2 ? ordered_json(fringes.spacing_inv_fs) : ordered_json(nullptr)},
        {"expected_spacing_inv_fs", p.delay_fs > 0.0 ? ordered_json(1.0 / p.delay_fs) : ordered_json(nullptr)},
        {"dominant_maxima_count", maxima.size()},
        {"dominant_maxima", maxima_json},
    };
    write_json(out_dir / "propagate_summary.json", summary);
    return summary;
}

// ---------------------------------------------------------------------------

ordered_json cmd_sweep(const Config& cfg, const fs::path& out_dir)
{
    const auto& s = cfg.sweep;
    const bool bias = s.axis == SweepAxis::bias;
    const auto& sweep_points = bias ? s.bias_points : s.temperature_points;
    const double reference = bias ? s.bias_reference : s.temperature_reference;
    if (sweep_points.size() < 3)
        throw config_error("[sweep]: need at least three sweep points");
    for (double x : sweep_points)
        if (!(x > 0.0) || !std::isfinite(x))
            throw config_error("[sweep]: sweep points must be positive");
    if (!(reference > 0.0))
        throw config_error("[sweep]: reference must be positive");
    if (!(s.t2_ref_ps > 0.0) || !(s.t2star_ref_ps > 0.0))
        throw config_error("[sweep]: reference times must be positive");

    auto planted = [&](double x, double ref_value, double beta, double t0_K) {
        return bias ? ref_value * std::pow(x / reference, -beta)
                    : ref_value * std::exp(-(x - reference) / t0_K);
    };

    const auto delays = scan_delays(cfg);
    const auto opts = scan_options(cfg);
    const double t0 = cfg.ensemble.reference_period_fs;
    const experiments::NoiseSpec noise{cfg.scan.noise_additive, s.noise_multiplicative};

    std::vector<double> xs, t2_planted, t2star_planted, t2_fit, t2star_fit, steps;
    for (std::size_t i = 0; i < sweep_points.size(); ++i) {
        const double x = sweep_points[i];
        const double t2 = planted(x, s.t2_ref_ps, s.beta_homo, s.t0_homo_K);
        const double t2star = planted(x, s.t2star_ref_ps, s.beta_inhomo, s.t0_inhomo_K);
        if (!(t2star < t2))
            throw config_error(fmt::format("[sweep]: planted T2* {:.4g} ps is not below T2 {:.4g} ps at x = {}",
                                           t2star, t2, x));

        const double step = experiments::calibrate_period_step(t0, cfg.ensemble.weights, t2, t2star, delays);
        const EnsembleSpec ens = make_uniform_ensemble(t0, step, cfg.ensemble.weights, t2, cfg.ensemble.t1_ps);

        const auto ramsey = noisy(experiments::ramsey_scan(ens, delays, opts), noise, cfg.run.seed + 2 * i);
        const auto echo = noisy(experiments::echo_scan(ens, delays, opts), noise, cfg.run.seed + 2 * i + 1);
        const double window_end = experiments::collapse_window_end(ens, delays.back());

        xs.push_back(x);
        steps.push_back(step);
        t2_planted.push_back(t2);
        t2star_planted.push_back(t2star);
        t2star_fit.push_back(
            experiments::fit_ramsey_t2star(contrast_of(ramsey, cfg, t0), window_end, cfg.analysis.noise_floor)
                .param("tau_ps"));
        t2_fit.push_back(experiments::fit_echo_t2(contrast_of(echo, cfg, t0), cfg.analysis.noise_floor).param("tau_ps"));
    }

    {
        const std::string header[] = {"x", "T2_ps", "T2star_ps"};
        const std::vector<double> cols[] = {xs, t2_fit, t2star_fit};
        write_columns(out_dir / "sweep.csv", header, cols);
    }

    ordered_json laws;
    auto relative_error = [](double got, double want) { return std::abs(got - want) / std::abs(want); };
    if (bias) {
        const auto homo = fitting::fit_power_law(xs, t2_fit);
        const auto inhomo = fitting::fit_power_law(xs, t2star_fit);
        laws = {
            {"homogeneous", {{"planted_beta", s.beta_homo},
                             {"fit", fit_json(homo)},
                             {"relative_error", relative_error(homo.param("beta"), s.beta_homo)}}},
            {"inhomogeneous", {{"planted_beta", s.beta_inhomo},
                               {"fit", fit_json(inhomo)},
                               {"relative_error", relative_error(inhomo.param("beta"), s.beta_inhomo)}}},
        };
    } else {
        const auto homo = fitting::fit_exp_temperature(xs, t2_fit);
        const auto inhomo = fitting::fit_exp_temperature(xs, t2star_fit);
        laws = {
            {"homogeneous", {{"planted_t0_K", s.t0_homo_K},
                             {"fit", fit_json(homo)},
                             {"relative_error", relative_error(homo.param("t0_K"), s.t0_homo_K)}}},
            {"inhomogeneous", {{"planted_t0_K", s.t0_inhomo_K},
                               {"fit", fit_json(inhomo)},
                               {"relative_error", relative_error(inhomo.param("t0_K"), s.t0_inhomo_K)}}},
        };
    }

    ordered_json points = ordered_json::array();
    for (std::size_t i = 0; i < xs.size(); ++i)
        points.push_back({{"x", xs[i]},
                          {"period_step_fs", steps[i]},
                          {"planted_T2_ps", t2_planted[i]},
                          {"planted_T2star_ps", t2star_planted[i]},
                          {"T2_ps", t2_fit[i]},
                          {"T2star_ps", t2star_fit[i]}});

    ordered_json summary = {
        {"axis", to_string(s.axis)},
        {"noise_multiplicative", s.noise_multiplicative},
        {"points", points},
        {"laws", laws},
    };
    write_json(out_dir / "sweep_summary.json", summary);
    return summary;
}

}  // namespace qcr::cli
