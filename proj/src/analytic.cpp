#include "qcr/analytic.hpp"

#include "qcr/fitting.hpp"

#include <algorithm>
#include <boost/math/tools/minima.hpp>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace qcr::analytic {

namespace {

double mode_decay(double t_fs, double t2_ps) { return std::exp(-t_fs / ps_to_fs(t2_ps)); }

void require_time(double t_fs)
{
    if (!(t_fs >= 0.0))
        throw std::invalid_argument("revival model time must be non-negative");
}

template <typename DecayFn>
double envelope_impl(double t_fs, const EnsembleSpec& ensemble, DecayFn decay)
{
    require_time(t_fs);
    double re = 0.0, im = 0.0;
    for (std::size_t k = 0; k < ensemble.size(); ++k) {
        const double phase = two_pi * ensemble.detuning_inv_fs(k) * t_fs;
        const double amp = ensemble[k].weight() * decay(k);
        re += amp * std::cos(phase);
        im += amp * std::sin(phase);
    }
    return std::hypot(re, im);
}

}  // namespace

double revival_signal(double t_fs, const EnsembleSpec& ensemble, double t2_ps)
{
    require_time(t_fs);
    double sum = 0.0;
    for (const auto& m : ensemble.modes())
        sum += m.weight() * std::sin(two_pi * t_fs / m.period_fs());
    return mode_decay(t_fs, t2_ps) * sum;
}

double revival_signal(double t_fs, const EnsembleSpec& ensemble)
{
    require_time(t_fs);
    double sum = 0.0;
    for (const auto& m : ensemble.modes())
        sum += m.weight() * mode_decay(t_fs, m.t2_ps()) * std::sin(two_pi * t_fs / m.period_fs());
    return sum;
}

double revival_envelope(double t_fs, const EnsembleSpec& ensemble, double t2_ps)
{
    return mode_decay(t_fs, t2_ps) * envelope_impl(t_fs, ensemble, [](std::size_t) { return 1.0; });
}

double revival_envelope(double t_fs, const EnsembleSpec& ensemble)
{
    return envelope_impl(t_fs, ensemble,
                         [&](std::size_t k) { return mode_decay(t_fs, ensemble[k].t2_ps()); });
}

const char* to_string(RevivalKind kind) { return kind == RevivalKind::full ? "full" : "fractional"; }

double mean_detuning_spacing(const EnsembleSpec& ensemble)
{
    if (ensemble.size() < 2)
        throw std::invalid_argument("detuning spacing needs at least two modes");
    std::vector<double> df(ensemble.size());
    for (std::size_t k = 0; k < df.size(); ++k)
        df[k] = ensemble.detuning_inv_fs(k);
    std::sort(df.begin(), df.end());
    const double mean = (df.back() - df.front()) / static_cast<double>(df.size() - 1);
    for (std::size_t k = 1; k < df.size(); ++k)
        if (std::abs((df[k] - df[k - 1]) - mean) >= 0.1 * mean)
            throw std::invalid_argument("mode detunings are too non-uniform for a periodic revival model");
    return mean;
}

std::vector<RevivalTime> revival_times(const EnsembleSpec& ensemble, double horizon_fs)
{
    std::vector<RevivalTime> out;
    if (ensemble.size() < 2)
        return out;
    const double period = 1.0 / mean_detuning_spacing(ensemble);
    const double full_height = ensemble.total_weight();
    const double probe = 0.01 * period;
    for (int m = 1;; ++m) {
        const double t = 0.5 * period * m;
        if (t > horizon_fs)
            break;
        if (m % 2 == 0) {
            out.push_back({t, RevivalKind::full});
            continue;
        }
        const double h = revival_envelope(t, ensemble, infinity);
        const bool local_max = h >= revival_envelope(t - probe, ensemble, infinity) &&
                               h >= revival_envelope(t + probe, ensemble, infinity);
        if (local_max && h < full_height * (1.0 - 1e-9))
            out.push_back({t, RevivalKind::fractional});
    }
    return out;
}

double linewidth_from_t2(double t2_ps)
{
    if (!(t2_ps > 0.0))
        throw std::invalid_argument("T2 must be positive");
    return 2.0 * planck_constant_mev_ps() / t2_ps;
}

double t2_from_linewidth(double linewidth_mev)
{
    if (!(linewidth_mev > 0.0))
        throw std::invalid_argument("linewidth must be positive");
    return 2.0 * planck_constant_mev_ps() / linewidth_mev;
}

double first_envelope_minimum(const EnsembleSpec& ensemble, double horizon_fs)
{
    if (!(horizon_fs > 0.0))
        throw std::invalid_argument("horizon must be positive");
    constexpr int samples = 30000;
    const double step = horizon_fs / samples;
    auto env = [&](double t) { return revival_envelope(t, ensemble); };

    double prev = env(0.0);
    double cur = env(step);
    for (int i = 2; i <= samples; ++i) {
        const double next = env(step * i);
        if (cur <= prev && cur < next) {
            const double lo = step * (i - 2);
            const double hi = step * i;
            const auto [t_min, e_min] = boost::math::tools::brent_find_minima(
                env, lo, hi, std::numeric_limits<double>::digits / 2);
            (void)e_min;
            return t_min;
        }
        prev = cur;
        cur = next;
    }
    throw numerical_error("envelope has no minimum within the horizon");
}

double effective_t2star(const EnsembleSpec& ensemble, double horizon_fs)
{
    if (ensemble.size() < 2)
        throw std::invalid_argument("effective T2* needs at least two modes");
    const double t_end = first_envelope_minimum(ensemble, horizon_fs);

    constexpr int samples = 400;
    std::vector<double> t(samples + 1), intensity(samples + 1);
    for (int i = 0; i <= samples; ++i) {
        t[i] = t_end * i / samples;
        const double e = revival_envelope(t[i], ensemble);
        intensity[i] = e * e;
    }
    return fitting::fit_exp_decay(ContrastEnvelope(std::move(t), std::move(intensity)), 2.0)
        .param("tau_ps");
}

}  // namespace qcr::analytic
