#include "qcr/fitting.hpp"

#include <cmath>
#include <map>
#include <string>
#include <vector>

namespace qcr::fitting {

namespace {

constexpr std::size_t min_points = 3;

void require_points(std::size_t n, std::size_t needed, const char* what)
{
    if (n < needed)
        throw numerical_error(std::string(what) + ": need at least " + std::to_string(needed) +
                              " usable points, got " + std::to_string(n));
}

std::vector<double> logs(std::span<const double> v, const char* what)
{
    std::vector<double> out;
    out.reserve(v.size());
    for (double y : v) {
        if (!(y > 0.0) || !std::isfinite(y))
            throw numerical_error(std::string(what) + ": values must be positive and finite");
        out.push_back(std::log(y));
    }
    return out;
}

}  // namespace

LineFit fit_line(std::span<const double> x, std::span<const double> y)
{
    if (x.size() != y.size())
        throw std::invalid_argument("fit_line: x and y differ in length");
    require_points(x.size(), 2, "fit_line");
    const double n = static_cast<double>(x.size());
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        mx += x[i];
        my += y[i];
    }
    mx /= n;
    my /= n;
    double sxx = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sxx += (x[i] - mx) * (x[i] - mx);
        sxy += (x[i] - mx) * (y[i] - my);
    }
    if (!(sxx > 0.0))
        throw numerical_error("fit_line: abscissa has no spread");
    LineFit fit;
    fit.slope = sxy / sxx;
    fit.intercept = my - fit.slope * mx;
    double ss = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double r = y[i] - (fit.slope * x[i] + fit.intercept);
        ss += r * r;
    }
    fit.rms_residual = std::sqrt(ss / n);
    return fit;
}

FitResult fit_exp_decay(const ContrastEnvelope& envelope, double exponent_factor, double noise_floor_rel)
{
    if (!(exponent_factor > 0.0) || !std::isfinite(exponent_factor))
        throw std::invalid_argument("exponent factor must be positive");
    if (!(noise_floor_rel >= 0.0))
        throw std::invalid_argument("noise floor must be non-negative");
    const double peak = envelope.max();
    if (!(peak > 0.0))
        throw numerical_error("fit_exp_decay: no positive contrast samples");

    const double floor = noise_floor_rel * peak;
    std::vector<double> t, lc;
    for (std::size_t i = 0; i < envelope.size(); ++i) {
        const double c = envelope.contrast()[i];
        if (c > 0.0 && c >= floor) {
            t.push_back(envelope.delays_fs()[i]);
            lc.push_back(std::log(c));
        }
    }
    require_points(t.size(), min_points, "fit_exp_decay");

    const LineFit line = fit_line(t, lc);
    const double span = t.back() - t.front();
    if (!(-line.slope * span > 1e-9))
        throw numerical_error("fit_exp_decay: no decay detected");

    FitResult r;
    r.params["tau_ps"] = fs_to_ps(-exponent_factor / line.slope);
    r.params["amplitude"] = std::exp(line.intercept);
    r.rms_residual = line.rms_residual;
    r.n_points = t.size();
    return r;
}

FitResult fit_power_law(std::span<const double> x, std::span<const double> y)
{
    if (x.size() != y.size())
        throw std::invalid_argument("fit_power_law: x and y differ in length");
    require_points(x.size(), min_points, "fit_power_law");
    const auto lx = logs(x, "fit_power_law");
    const auto ly = logs(y, "fit_power_law");
    const LineFit line = fit_line(lx, ly);

    FitResult r;
    r.params["beta"] = -line.slope;
    r.params["prefactor"] = std::exp(line.intercept);
    r.rms_residual = line.rms_residual;
    r.n_points = x.size();
    return r;
}

FitResult fit_exp_temperature(std::span<const double> temperature_K, std::span<const double> y)
{
    if (temperature_K.size() != y.size())
        throw std::invalid_argument("fit_exp_temperature: x and y differ in length");
    require_points(temperature_K.size(), min_points, "fit_exp_temperature");
    const auto ly = logs(y, "fit_exp_temperature");
    const LineFit line = fit_line(temperature_K, ly);
    if (std::abs(line.slope) < 1e-12)
        throw numerical_error("fit_exp_temperature: no temperature dependence");

    FitResult r;
    r.params["t0_K"] = -1.0 / line.slope;
    r.params["prefactor"] = std::exp(line.intercept);
    r.rms_residual = line.rms_residual;
    r.n_points = temperature_K.size();
    return r;
}

FitResult fit_grouped_exp_decay(std::span<const double> times_fs, std::span<const double> heights,
                                std::span<const int> groups)
{
    if (times_fs.size() != heights.size() || times_fs.size() != groups.size())
        throw std::invalid_argument("fit_grouped_exp_decay: input lengths differ");
    const auto lh = logs(heights, "fit_grouped_exp_decay");

    struct Acc {
        double st = 0.0, sy = 0.0;
        std::size_t n = 0;
    };
    std::map<int, Acc> acc;
    for (std::size_t i = 0; i < times_fs.size(); ++i) {
        auto& a = acc[groups[i]];
        a.st += times_fs[i];
        a.sy += lh[i];
        ++a.n;
    }
    require_points(times_fs.size(), acc.size() + 2, "fit_grouped_exp_decay");

    double stt = 0.0, sty = 0.0;
    for (std::size_t i = 0; i < times_fs.size(); ++i) {
        const auto& a = acc[groups[i]];
        const double dt = times_fs[i] - a.st / static_cast<double>(a.n);
        const double dy = lh[i] - a.sy / static_cast<double>(a.n);
        stt += dt * dt;
        sty += dt * dy;
    }
    if (!(stt > 0.0))
        throw numerical_error("fit_grouped_exp_decay: no within-group time spread");
    const double slope = sty / stt;
    if (!(slope < 0.0))
        throw numerical_error("fit_grouped_exp_decay: no decay detected");

    FitResult r;
    r.params["tau_ps"] = fs_to_ps(-1.0 / slope);
    std::map<int, double> intercept;
    for (const auto& [g, a] : acc) {
        const double n = static_cast<double>(a.n);
        intercept[g] = a.sy / n - slope * a.st / n;
        r.params["amplitude_" + std::to_string(g)] = std::exp(intercept[g]);
    }
    double ss = 0.0;
    for (std::size_t i = 0; i < times_fs.size(); ++i) {
        const double res = lh[i] - (intercept[groups[i]] + slope * times_fs[i]);
        ss += res * res;
    }
    r.rms_residual = std::sqrt(ss / static_cast<double>(times_fs.size()));
    r.n_points = times_fs.size();
    return r;
}

}  // namespace qcr::fitting
