#include "qcr/experiments.hpp"

#include "qcr/fitting.hpp"
#include "qcr/parallel.hpp"

#include <algorithm>
#include <boost/math/tools/toms748_solve.hpp>
#include <cmath>
#include <random>
#include <stdexcept>

namespace qcr::experiments {

namespace {

constexpr std::size_t min_window_samples = 4;
constexpr double min_samples_per_period = 8.0;

void check_delays(std::span<const double> delays_fs, const ScanOptions& opts)
{
    if (delays_fs.empty())
        throw std::invalid_argument("delay grid is empty");
    for (double d : delays_fs)
        if (!(d >= opts.min_delay_fs))
            throw std::invalid_argument("delay below the minimum pulse separation");
}

template <typename ModeFn>
FringeTrace scan(const EnsembleSpec& ensemble, std::span<const double> delays_fs,
                 const ScanOptions& opts, ModeFn mode_state)
{
    check_delays(delays_fs, opts);
    const double total = ensemble.total_weight();
    std::vector<double> signal(delays_fs.size());
    parallel_for(delays_fs.size(), opts.threads, [&](std::size_t i) {
        double sum = 0.0;
        for (std::size_t k = 0; k < ensemble.size(); ++k) {
            const auto relax = bloch::Relaxation::of(ensemble[k], opts.w_eq);
            const BlochState s = mode_state(ensemble.detuning_inv_fs(k), relax, delays_fs[i]);
            sum += ensemble[k].weight() * s.w;
        }
        signal[i] = sum / total;
    });
    return FringeTrace({delays_fs.begin(), delays_fs.end()}, std::move(signal));
}

struct Window {
    std::size_t begin;
    std::size_t end;
    double centre;
};

std::vector<Window> carrier_windows(std::span<const double> d, double period)
{
    std::vector<Window> out;
    if (d.size() < 2)
        return out;
    const double last_step = d[d.size() - 1] - d[d.size() - 2];
    const double limit = d.back() + last_step * (1.0 + 1e-9);
    std::size_t i = 0;
    for (std::size_t j = 0;; ++j) {
        const double lo = d.front() + static_cast<double>(j) * period;
        const double hi = lo + period;
        if (hi > limit)
            break;
        const std::size_t begin = i;
        while (i < d.size() && d[i] < hi)
            ++i;
        if (i - begin >= min_window_samples)
            out.push_back({begin, i, lo + 0.5 * period});
    }
    return out;
}

struct Extremum {
    double time;
    double value;
};

// Extremum of a sinusoid at angular frequency omega through the samples at
// i-1, i, i+1. sign = +1 for a maximum, -1 for a minimum. Returns the raw
// sample when the fit does not bracket an extremum at i.
Extremum refine_extremum(std::span<const double> d, std::span<const double> y, std::size_t i, double omega,
                         double sign)
{
    const Extremum raw{d[i], y[i]};
    if (i == 0 || i + 1 >= y.size())
        return raw;
    const double h = d[i] - d[i - 1];
    if (std::abs((d[i + 1] - d[i]) - h) > 1e-9 * h)
        return raw;
    const double wh = omega * h;
    if (wh < 1e-3 || wh > std::numbers::pi / 2.0)
        return raw;
    // y(t_i + x) = c + C cos(omega x) + S sin(omega x)
    const double cos_part = (y[i] - 0.5 * (y[i - 1] + y[i + 1])) / (1.0 - std::cos(wh));
    const double sin_part = (y[i + 1] - y[i - 1]) / (2.0 * std::sin(wh));
    if (!(sign * cos_part > 0.0))
        return raw;
    const double offset = std::atan2(sign * sin_part, sign * cos_part);
    if (std::abs(offset) > wh)
        return raw;
    const double centre = y[i] - cos_part;
    return {d[i] + offset / omega, centre + sign * std::hypot(cos_part, sin_part)};
}

// Linear interpolation of (t, v) at x, extrapolating from the end segments.
double interpolate(std::span<const double> t, std::span<const double> v, std::size_t near, double x)
{
    if (t.size() < 2)
        return v[near];
    std::size_t a = x < t[near] ? near - (near > 0 ? 1 : 0) : near;
    if (a + 1 >= t.size())
        a = t.size() - 2;
    const double span = t[a + 1] - t[a];
    if (!(span > 0.0))
        return v[near];
    return v[a] + (v[a + 1] - v[a]) * (x - t[a]) / span;
}

}  // namespace

std::vector<double> delay_grid(double start_fs, double stop_fs, double step_fs)
{
    if (!(step_fs > 0.0) || !std::isfinite(start_fs) || !std::isfinite(stop_fs) || stop_fs < start_fs)
        throw std::invalid_argument("invalid delay grid");
    const auto n = static_cast<std::size_t>(std::floor((stop_fs - start_fs) / step_fs + 1e-9)) + 1;
    std::vector<double> out(n);
    for (std::size_t i = 0; i < n; ++i)
        out[i] = start_fs + static_cast<double>(i) * step_fs;
    return out;
}

double carrier_phase_rad(double delay_fs, double reference_period_fs)
{
    // The delayed pulse carries the optical phase w0 * delay; in the rotating
    // frame with the +u handedness this enters the rotation axis with a minus
    // sign, making each mode's readout cos(2 pi delay / t_k).
    return -two_pi * delay_fs / reference_period_fs;
}

BlochState ramsey_mode_state(double detuning_inv_fs, const bloch::Relaxation& relax, double delay_fs,
                             double reference_period_fs, double area_rad, const ScanOptions& opts)
{
    const PulseSpec pulses[] = {
        {area_rad, 0.0, 0.0, opts.envelope, opts.fwhm_fs},
        {area_rad, delay_fs, carrier_phase_rad(delay_fs, reference_period_fs), opts.envelope, opts.fwhm_fs},
    };
    return bloch::run_sequence(BlochState::ground(), pulses, detuning_inv_fs, relax, opts.dt_fs);
}

BlochState echo_mode_state(double detuning_inv_fs, const bloch::Relaxation& relax, double delay_fs,
                           double reference_period_fs, const ScanOptions& opts)
{
    constexpr double half_pi = std::numbers::pi / 2.0;
    const PulseSpec pulses[] = {
        {half_pi, 0.0, 0.0, opts.envelope, opts.fwhm_fs},
        {std::numbers::pi, 0.5 * delay_fs, 0.0, opts.envelope, opts.fwhm_fs},
        {half_pi, delay_fs, carrier_phase_rad(delay_fs, reference_period_fs), opts.envelope, opts.fwhm_fs},
    };
    return bloch::run_sequence(BlochState::ground(), pulses, detuning_inv_fs, relax, opts.dt_fs);
}

FringeTrace ramsey_scan(const EnsembleSpec& ensemble, std::span<const double> delays_fs, const ScanOptions& opts)
{
    const double t0 = ensemble.reference_period_fs();
    return scan(ensemble, delays_fs, opts, [&](double df, const bloch::Relaxation& r, double tau) {
        return ramsey_mode_state(df, r, tau, t0, opts.pulse_area_rad, opts);
    });
}

FringeTrace echo_scan(const EnsembleSpec& ensemble, std::span<const double> delays_fs, const ScanOptions& opts)
{
    const double t0 = ensemble.reference_period_fs();
    return scan(ensemble, delays_fs, opts, [&](double df, const bloch::Relaxation& r, double tau) {
        return echo_mode_state(df, r, tau, t0, opts);
    });
}

std::vector<double> window_centres(std::span<const double> delays_fs, double carrier_period_fs)
{
    std::vector<double> out;
    for (const auto& w : carrier_windows(delays_fs, carrier_period_fs))
        out.push_back(w.centre);
    return out;
}

ContrastEnvelope extract_contrast(const FringeTrace& trace, double carrier_period_fs, const ContrastOptions& opts)
{
    if (!(carrier_period_fs > 0.0))
        throw std::invalid_argument("carrier period must be positive");
    const auto& d = trace.delays_fs();
    const auto& y = trace.signal();
    if (d.size() < min_window_samples)
        throw std::invalid_argument("fringe trace too short for contrast extraction");
    double max_step = 0.0;
    for (std::size_t i = 1; i < d.size(); ++i)
        max_step = std::max(max_step, d[i] - d[i - 1]);
    if (max_step > carrier_period_fs / min_samples_per_period * (1.0 + 1e-12))
        throw std::invalid_argument("fringe trace undersampled: need >= 8 samples per carrier period");

    const double omega = two_pi / carrier_period_fs;
    // (max + |min|) / 2 measures the envelope midway between the two extrema;
    // the samples are moved from there onto the window centres.
    std::vector<double> centres, midpoints, raw;
    for (const auto& w : carrier_windows(d, carrier_period_fs)) {
        double baseline = trace.baseline();
        if (!opts.use_trace_baseline) {
            double sum = 0.0;
            for (std::size_t i = w.begin; i < w.end; ++i)
                sum += y[i];
            baseline = sum / static_cast<double>(w.end - w.begin);
        }
        const auto first = y.begin() + static_cast<std::ptrdiff_t>(w.begin);
        const auto last = y.begin() + static_cast<std::ptrdiff_t>(w.end);
        const auto imax = static_cast<std::size_t>(std::max_element(first, last) - y.begin());
        const auto imin = static_cast<std::size_t>(std::min_element(first, last) - y.begin());
        const Extremum hi = refine_extremum(d, y, imax, omega, +1.0);
        const Extremum lo = refine_extremum(d, y, imin, omega, -1.0);
        centres.push_back(w.centre);
        midpoints.push_back(0.5 * (hi.time + lo.time));
        raw.push_back(0.5 * ((hi.value - baseline) + std::abs(lo.value - baseline)));
    }
    std::vector<double> contrast(centres.size());
    for (std::size_t k = 0; k < centres.size(); ++k)
        contrast[k] = std::max(0.0, interpolate(midpoints, raw, k, centres[k]));
    return ContrastEnvelope(std::move(centres), std::move(contrast));
}

std::vector<Peak> find_revival_peaks(const ContrastEnvelope& envelope, double min_prominence)
{
    if (envelope.empty())
        throw std::invalid_argument("contrast envelope is empty");
    const auto& t = envelope.delays_fs();
    const auto& c = envelope.contrast();
    auto peaks = find_peaks(t, c, min_prominence * envelope.max());
    for (auto& p : peaks)
        p.position = refine_peak_position(t, c, p.index);
    return peaks;
}

ContrastEnvelope compensate_decay(const ContrastEnvelope& envelope, double t2_ps)
{
    if (!(t2_ps > 0.0))
        throw std::invalid_argument("T2 must be positive");
    std::vector<double> out(envelope.contrast());
    for (std::size_t i = 0; i < out.size(); ++i)
        out[i] *= std::exp(envelope.delays_fs()[i] / ps_to_fs(t2_ps));
    return ContrastEnvelope(envelope.delays_fs(), std::move(out));
}

ContrastEnvelope normalize_to_max(const ContrastEnvelope& envelope)
{
    const double m = envelope.max();
    if (!(m > 0.0))
        return envelope;
    std::vector<double> out(envelope.contrast());
    for (double& c : out)
        c /= m;
    return ContrastEnvelope(envelope.delays_fs(), std::move(out));
}

RevivalAnalysis analyze_revivals(const ContrastEnvelope& envelope, const EnsembleSpec& ensemble,
                                 const RevivalOptions& opts)
{
    RevivalAnalysis out;
    out.raw_peaks = find_revival_peaks(envelope, opts.raw_prominence);
    out.raw_kinds.assign(out.raw_peaks.size(), std::nullopt);

    std::vector<analytic::RevivalTime> expected;
    double half_period = 0.0;
    if (ensemble.size() >= 2) {
        try {
            half_period = 0.5 / analytic::mean_detuning_spacing(ensemble);
            expected = analytic::revival_times(ensemble, envelope.delays_fs().back() + half_period);
        } catch (const std::invalid_argument&) {
            expected.clear();
        }
    }

    std::vector<double> times, heights;
    std::vector<int> groups;
    for (std::size_t i = 0; i < out.raw_peaks.size(); ++i) {
        const auto& p = out.raw_peaks[i];
        const analytic::RevivalTime* best = nullptr;
        for (const auto& r : expected)
            if (!best || std::abs(r.time_fs - p.position) < std::abs(best->time_fs - p.position))
                best = &r;
        if (!best || std::abs(best->time_fs - p.position) > 0.25 * half_period)
            continue;
        out.raw_kinds[i] = best->kind;
        times.push_back(p.position);
        heights.push_back(p.height);
        groups.push_back(best->kind == analytic::RevivalKind::full ? 0 : 1);
    }

    try {
        out.t2_fit = fitting::fit_grouped_exp_decay(times, heights, groups);
    } catch (const numerical_error&) {
        out.t2_fit.reset();
    }

    const ContrastEnvelope compensated =
        out.t2_fit ? compensate_decay(envelope, out.t2_fit->param("tau_ps")) : envelope;
    out.rephasing_peaks = find_revival_peaks(compensated, opts.min_prominence);
    return out;
}

double collapse_window_end(const EnsembleSpec& ensemble, double horizon_fs)
{
    try {
        return analytic::first_envelope_minimum(ensemble, horizon_fs);
    } catch (const numerical_error&) {
        return horizon_fs;
    }
}

FitResult fit_ramsey_t2star(const ContrastEnvelope& envelope, double window_end_fs, double noise_floor_rel)
{
    std::vector<double> t, intensity;
    for (std::size_t i = 0; i < envelope.size(); ++i) {
        if (envelope.delays_fs()[i] > window_end_fs)
            break;
        t.push_back(envelope.delays_fs()[i]);
        intensity.push_back(envelope.contrast()[i] * envelope.contrast()[i]);
    }
    return fitting::fit_exp_decay(ContrastEnvelope(std::move(t), std::move(intensity)), 2.0, noise_floor_rel);
}

FitResult fit_echo_t2(const ContrastEnvelope& envelope, double noise_floor_rel)
{
    std::vector<double> separation, intensity;
    for (std::size_t i = 0; i < envelope.size(); ++i) {
        separation.push_back(0.5 * envelope.delays_fs()[i]);
        intensity.push_back(envelope.contrast()[i] * envelope.contrast()[i]);
    }
    return fitting::fit_exp_decay(ContrastEnvelope(std::move(separation), std::move(intensity)), 4.0,
                                  noise_floor_rel);
}

double predicted_ramsey_t2star(const EnsembleSpec& ensemble, std::span<const double> delays_fs,
                               double window_end_fs, double noise_floor_rel)
{
    auto t = window_centres(delays_fs, ensemble.reference_period_fs());
    std::vector<double> c(t.size());
    const double total = ensemble.total_weight();
    for (std::size_t i = 0; i < t.size(); ++i)
        c[i] = analytic::revival_envelope(t[i], ensemble) / total;
    return fit_ramsey_t2star(ContrastEnvelope(std::move(t), std::move(c)), window_end_fs, noise_floor_rel)
        .param("tau_ps");
}

double calibrate_period_step(double reference_period_fs, std::span<const double> weights, double t2_ps,
                             double target_t2star_ps, std::span<const double> delays_fs)
{
    if (!(target_t2star_ps > 0.0))
        throw std::invalid_argument("target T2* must be positive");
    if (delays_fs.empty())
        throw std::invalid_argument("delay grid is empty");
    const double horizon = delays_fs.back();
    auto mismatch = [&](double step) {
        const auto ens = make_uniform_ensemble(reference_period_fs, step, weights, t2_ps);
        const double window_end = collapse_window_end(ens, horizon);
        return predicted_ramsey_t2star(ens, delays_fs, window_end) - target_t2star_ps;
    };
    double lo = 1e-6, hi = 0.008;
    const double f_lo = mismatch(lo);
    const double f_hi = mismatch(hi);
    if (!(f_lo > 0.0 && f_hi < 0.0))
        throw numerical_error("target T2* is not reachable by tuning the period step");
    std::uintmax_t iterations = 100;
    const auto [a, b] = boost::math::tools::toms748_solve(
        mismatch, lo, hi, f_lo, f_hi, boost::math::tools::eps_tolerance<double>(40), iterations);
    return 0.5 * (a + b);
}

FringeTrace add_noise(const FringeTrace& trace, const NoiseSpec& noise, std::uint64_t seed)
{
    if (!(noise.additive >= 0.0) || !(noise.multiplicative >= 0.0))
        throw std::invalid_argument("noise levels must be non-negative");
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> normal(0.0, 1.0);
    std::vector<double> out(trace.signal());
    for (double& y : out) {
        const double n1 = normal(rng);
        const double n2 = normal(rng);
        y = y * (1.0 + noise.multiplicative * n1) + noise.additive * n2;
    }
    return FringeTrace(trace.delays_fs(), std::move(out), trace.baseline());
}

}  // namespace qcr::experiments
