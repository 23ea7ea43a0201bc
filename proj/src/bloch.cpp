#include "qcr/bloch.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <vector>

namespace qcr::bloch {

namespace {

constexpr double window_fwhm_multiple = 4.0;
constexpr double max_dt_fraction = 1.0 / 20.0;

double decay_factor(double duration_fs, double time_ps)
{
    return std::exp(-duration_fs / ps_to_fs(time_ps));
}

using Vec3 = std::array<double, 3>;

struct Field {
    double x = 0.0;
    double y = 0.0;
};

Field total_field(std::span<const PulseSpec> pulses, std::span<const std::size_t> active, double t)
{
    Field f;
    for (std::size_t idx : active) {
        const double omega = rabi_rate(pulses[idx], t);
        f.x += omega * std::cos(pulses[idx].phase_rad);
        f.y += omega * std::sin(pulses[idx].phase_rad);
    }
    return f;
}

Vec3 derivative(const Vec3& b, const Field& f, double delta, double g2, double g1, double w_eq)
{
    const auto [u, v, w] = b;
    return {f.y * w - delta * v - g2 * u,
            delta * u - f.x * w - g2 * v,
            f.x * v - f.y * u - g1 * (w - w_eq)};
}

BlochState integrate_segment(const BlochState& s, std::span<const PulseSpec> pulses,
                             std::span<const std::size_t> active, double t_begin, double t_end,
                             double detuning_inv_fs, const Relaxation& relax, double dt_fs)
{
    const double delta = two_pi * detuning_inv_fs;
    const double g2 = 1.0 / ps_to_fs(relax.t2_ps);
    const double g1 = 1.0 / ps_to_fs(relax.t1_ps);
    const auto steps = static_cast<std::size_t>(std::ceil((t_end - t_begin) / dt_fs - 1e-9));
    const double h = (t_end - t_begin) / static_cast<double>(std::max<std::size_t>(steps, 1));

    Vec3 b{s.u, s.v, s.w};
    auto axpy = [](const Vec3& a, double k, const Vec3& d) {
        return Vec3{a[0] + k * d[0], a[1] + k * d[1], a[2] + k * d[2]};
    };
    for (std::size_t n = 0; n < steps; ++n) {
        const double t = t_begin + static_cast<double>(n) * h;
        const Field f0 = total_field(pulses, active, t);
        const Field fm = total_field(pulses, active, t + 0.5 * h);
        const Field f1 = total_field(pulses, active, t + h);
        const Vec3 k1 = derivative(b, f0, delta, g2, g1, relax.w_eq);
        const Vec3 k2 = derivative(axpy(b, 0.5 * h, k1), fm, delta, g2, g1, relax.w_eq);
        const Vec3 k3 = derivative(axpy(b, 0.5 * h, k2), fm, delta, g2, g1, relax.w_eq);
        const Vec3 k4 = derivative(axpy(b, h, k3), f1, delta, g2, g1, relax.w_eq);
        for (int i = 0; i < 3; ++i)
            b[i] += h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
    }
    BlochState out{b[0], b[1], b[2]};
    assert_physical(out, s);
    return out;
}

void check_step(std::span<const PulseSpec> pulses, double dt_fs)
{
    if (!(dt_fs > 0.0))
        throw std::invalid_argument("RK4 step must be positive");
    for (const auto& p : pulses)
        if (dt_fs > p.fwhm_fs * max_dt_fraction * (1.0 + 1e-12))
            throw std::invalid_argument("RK4 step exceeds FWHM/20");
}

}  // namespace

BlochState apply_pulse_delta(const BlochState& s, double area_rad, double phase_rad)
{
    if (!std::isfinite(area_rad))
        throw std::invalid_argument("pulse area must be finite");
    // Rodrigues rotation about k = (cos phi, sin phi, 0).
    const double kx = std::cos(phase_rad);
    const double ky = std::sin(phase_rad);
    const double c = std::cos(area_rad);
    const double sn = std::sin(area_rad);
    const double dot = kx * s.u + ky * s.v;
    const double cx = ky * s.w;
    const double cy = -kx * s.w;
    const double cz = kx * s.v - ky * s.u;
    BlochState out{s.u * c + cx * sn + kx * dot * (1.0 - c),
                   s.v * c + cy * sn + ky * dot * (1.0 - c),
                   s.w * c + cz * sn};
    assert_physical(out, s);
    return out;
}

BlochState evolve_free(const BlochState& s, double duration_fs, double detuning_inv_fs,
                       const Relaxation& relax)
{
    if (!(duration_fs >= 0.0))
        throw std::invalid_argument("free evolution duration must be non-negative");
    if (duration_fs == 0.0)
        return s;
    const double angle = two_pi * detuning_inv_fs * duration_fs;
    const double e2 = decay_factor(duration_fs, relax.t2_ps);
    const double e1 = decay_factor(duration_fs, relax.t1_ps);
    const double c = std::cos(angle);
    const double sn = std::sin(angle);
    BlochState out{(s.u * c - s.v * sn) * e2,
                   (s.u * sn + s.v * c) * e2,
                   e1 == 1.0 ? s.w : relax.w_eq + (s.w - relax.w_eq) * e1};
    assert_physical(out, s);
    return out;
}

double pulse_half_window_fs(const PulseSpec& pulse) { return window_fwhm_multiple * pulse.fwhm_fs; }

double rabi_rate(const PulseSpec& pulse, double t_fs)
{
    const double x = t_fs - pulse.arrival_fs;
    const double half = pulse_half_window_fs(pulse);
    if (pulse.envelope == Envelope::delta || std::abs(x) > half)
        return 0.0;
    const double fwhm = pulse.fwhm_fs;
    switch (pulse.envelope) {
    case Envelope::gaussian: {
        // Intensity FWHM F -> field exp(-2 ln2 x^2 / F^2).
        const double alpha = 2.0 * std::numbers::ln2 / (fwhm * fwhm);
        const double norm = std::sqrt(std::numbers::pi / alpha) * std::erf(half * std::sqrt(alpha));
        return pulse.area_rad * std::exp(-alpha * x * x) / norm;
    }
    case Envelope::sech: {
        // Intensity sech^2(x/T0) has FWHM 2 acosh(sqrt 2) T0.
        const double t0 = fwhm / (2.0 * std::acosh(std::numbers::sqrt2));
        const double norm = 2.0 * t0 * std::atan(std::sinh(half / t0));
        return pulse.area_rad / std::cosh(x / t0) / norm;
    }
    case Envelope::delta:
        break;
    }
    return 0.0;
}

BlochState evolve_finite_pulse(const BlochState& s, const PulseSpec& pulse, double detuning_inv_fs,
                               const Relaxation& relax, double dt_fs)
{
    if (pulse.envelope == Envelope::delta)
        throw std::invalid_argument("delta pulses go through apply_pulse_delta");
    return run_sequence(s, std::span(&pulse, 1), detuning_inv_fs, relax, dt_fs);
}

BlochState run_sequence(const BlochState& start, std::span<const PulseSpec> pulses,
                        double detuning_inv_fs, const Relaxation& relax, double dt_fs)
{
    if (pulses.empty())
        return start;
    const Envelope kind = pulses.front().envelope;
    for (const auto& p : pulses)
        if ((p.envelope == Envelope::delta) != (kind == Envelope::delta))
            throw std::invalid_argument("pulse sequence mixes delta and finite pulses");

    std::vector<std::size_t> order(pulses.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return pulses[a].arrival_fs < pulses[b].arrival_fs;
    });

    BlochState s = start;
    if (kind == Envelope::delta) {
        double now = pulses[order.front()].arrival_fs;
        for (std::size_t idx : order) {
            s = evolve_free(s, pulses[idx].arrival_fs - now, detuning_inv_fs, relax);
            s = apply_pulse_delta(s, pulses[idx].area_rad, pulses[idx].phase_rad);
            now = pulses[idx].arrival_fs;
        }
        return s;
    }

    check_step(pulses, dt_fs);

    // Merge overlapping windows into integration segments.
    struct Segment {
        double begin;
        double end;
        std::vector<std::size_t> members;
    };
    std::vector<Segment> segments;
    for (std::size_t idx : order) {
        const double half = pulse_half_window_fs(pulses[idx]);
        const double b = pulses[idx].arrival_fs - half;
        const double e = pulses[idx].arrival_fs + half;
        if (!segments.empty() && b <= segments.back().end) {
            segments.back().end = std::max(segments.back().end, e);
            segments.back().members.push_back(idx);
        } else {
            segments.push_back({b, e, {idx}});
        }
    }

    double now = segments.front().begin;
    for (const auto& seg : segments) {
        s = evolve_free(s, seg.begin - now, detuning_inv_fs, relax);
        s = integrate_segment(s, pulses, seg.members, seg.begin, seg.end, detuning_inv_fs, relax, dt_fs);
        now = seg.end;
    }
    return s;
}

}  // namespace qcr::bloch
