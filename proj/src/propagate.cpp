#include "qcr/propagate.hpp"

#include "qcr/bloch.hpp"
#include "qcr/experiments.hpp"
#include "qcr/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace qcr::propagate {

PropagationMap propagate_map(const EnsembleSpec& dense, double delay_fs, const PropagationOptions& opts)
{
    if (dense.size() < min_channels)
        throw std::invalid_argument("propagation map needs at least 64 detuning channels");
    if (opts.z_steps < 1)
        throw std::invalid_argument("propagation map needs at least one z step");
    if (!(delay_fs >= 0.0) || !std::isfinite(delay_fs))
        throw std::invalid_argument("pulse-pair delay must be finite and non-negative");
    if (!(opts.gain_per_step >= 0.0) || !std::isfinite(opts.gain_per_step))
        throw std::invalid_argument("gain per step must be finite and non-negative");
    if (!(opts.area_rad >= 0.0) || !std::isfinite(opts.area_rad))
        throw std::invalid_argument("pulse area must be finite and non-negative");

    const std::size_t n = dense.size();
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return dense.detuning_inv_fs(a) < dense.detuning_inv_fs(b);
    });

    PropagationMap map;
    for (std::size_t k : order) {
        map.detunings_inv_fs.push_back(dense.detuning_inv_fs(k));
        map.weights.push_back(dense[k].weight());
    }
    for (std::size_t j = 0; j < opts.z_steps; ++j)
        map.areas_rad.push_back(
            std::clamp(opts.area_rad * std::pow(opts.gain_per_step, static_cast<double>(j)), 0.0, std::numbers::pi));

    map.inversion = {opts.z_steps, n, std::vector<double>(opts.z_steps * n)};
    map.coherence = {opts.z_steps, n, std::vector<double>(opts.z_steps * n)};

    experiments::ScanOptions scan;
    scan.w_eq = opts.w_eq;
    const double t0 = dense.reference_period_fs();
    parallel_for(opts.z_steps * n, opts.threads, [&](std::size_t idx) {
        const std::size_t j = idx / n;
        const std::size_t c = idx % n;
        const std::size_t k = order[c];
        const auto relax = bloch::Relaxation::of(dense[k], opts.w_eq);
        const BlochState s = experiments::ramsey_mode_state(map.detunings_inv_fs[c], relax, delay_fs, t0,
                                                            map.areas_rad[j], scan);
        map.inversion.data[idx] = s.w;
        map.coherence.data[idx] = s.coherence();
    });
    return map;
}

EnsembleSpec make_dense_ensemble(double reference_period_fs, double half_span_inv_fs, std::size_t channels,
                                 double t2_ps, double t1_ps)
{
    if (channels < 2)
        throw std::invalid_argument("dense ensemble needs at least two channels");
    if (!(half_span_inv_fs > 0.0) || !(reference_period_fs > 0.0))
        throw std::invalid_argument("dense ensemble span and reference period must be positive");
    const double f0 = 1.0 / reference_period_fs;
    if (!(half_span_inv_fs < f0))
        throw std::invalid_argument("detuning span exceeds the carrier frequency");
    std::vector<ModeSpec> modes;
    modes.reserve(channels);
    const double step = 2.0 * half_span_inv_fs / static_cast<double>(channels - 1);
    for (std::size_t i = 0; i < channels; ++i) {
        const double df = -half_span_inv_fs + step * static_cast<double>(i);
        modes.emplace_back(1.0 / (f0 + df), 1.0, t2_ps, t1_ps);
    }
    return EnsembleSpec(std::move(modes), reference_period_fs);
}

EnsembleSpec with_lobe_weights(const EnsembleSpec& dense, const EnsembleSpec& lobes, double sigma_inv_fs)
{
    if (!(sigma_inv_fs > 0.0))
        throw std::invalid_argument("lobe width must be positive");
    const double f0 = 1.0 / dense.reference_period_fs();
    std::vector<ModeSpec> modes;
    modes.reserve(dense.size());
    for (std::size_t i = 0; i < dense.size(); ++i) {
        const double df = dense.detuning_inv_fs(i);
        double w = 0.0;
        for (const auto& m : lobes.modes()) {
            const double x = (df - (1.0 / m.period_fs() - f0)) / sigma_inv_fs;
            w += m.weight() * std::exp(-0.5 * x * x);
        }
        // Channels far from every lobe keep a negligible positive weight.
        w = std::max(w, 1e-300);
        modes.emplace_back(dense[i].period_fs(), w, dense[i].t2_ps(), dense[i].t1_ps());
    }
    return EnsembleSpec(std::move(modes), dense.reference_period_fs());
}

FringeStats spectral_fringes(const PropagationMap& map, std::size_t slice, double min_prominence_rel)
{
    if (slice >= map.inversion.rows)
        throw std::invalid_argument("slice index out of range");
    const auto w = map.inversion.row(slice);
    const auto [lo, hi] = std::minmax_element(w.begin(), w.end());
    FringeStats out;
    const double range = *hi - *lo;
    if (!(range > 1e-9))
        return out;
    const auto& x = map.detunings_inv_fs;
    for (const auto& p : find_peaks(x, w, min_prominence_rel * range))
        out.positions_inv_fs.push_back(refine_peak_position(x, w, p.index));
    out.count = out.positions_inv_fs.size();
    if (out.count >= 2)
        out.spacing_inv_fs =
            (out.positions_inv_fs.back() - out.positions_inv_fs.front()) / static_cast<double>(out.count - 1);
    return out;
}

std::vector<double> weighted_coherence_spectrum(const PropagationMap& map)
{
    const auto& m = map.coherence;
    std::vector<double> out(m.cols, 0.0);
    for (std::size_t r = 0; r < m.rows; ++r)
        for (std::size_t c = 0; c < m.cols; ++c)
            out[c] += m.at(r, c);
    for (std::size_t c = 0; c < m.cols; ++c)
        out[c] *= map.weights[c] / static_cast<double>(m.rows);
    return out;
}

std::vector<Peak> dominant_maxima(std::span<const double> detunings_inv_fs, std::span<const double> spectrum,
                                  double min_prominence_rel)
{
    if (spectrum.empty())
        return {};
    const double top = *std::max_element(spectrum.begin(), spectrum.end());
    if (!(top > 0.0))
        return {};
    return find_peaks(detunings_inv_fs, spectrum, min_prominence_rel * top);
}

Map2D weighted_normalized(const Map2D& m, std::span<const double> weights)
{
    if (weights.size() != m.cols)
        throw std::invalid_argument("weight count does not match channel count");
    Map2D out = m;
    double top = 0.0;
    for (std::size_t r = 0; r < m.rows; ++r)
        for (std::size_t c = 0; c < m.cols; ++c) {
            double& v = out.data[r * m.cols + c];
            v *= weights[c];
            top = std::max(top, std::abs(v));
        }
    if (top > 0.0)
        for (double& v : out.data)
            v /= top;
    return out;
}

}  // namespace qcr::propagate
