#include "qcr/core.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>
#include <set>
#include <string>

namespace qcr {

double planck_constant_mev_ps()
{
    // h [J s] / e [C] = h [eV s]; 1 eV s = 1e3 meV * 1e12 ps.
    constexpr double h_si = 6.62607015e-34;
    constexpr double e_si = 1.602176634e-19;
    return h_si / e_si * 1e15;
}

ModeSpec::ModeSpec(double period_fs, double weight, double t2_ps, double t1_ps)
  : period_fs_(period_fs), weight_(weight), t2_ps_(t2_ps), t1_ps_(t1_ps)
{
    if (!(period_fs > 0.0) || !std::isfinite(period_fs))
        throw std::invalid_argument("mode period must be positive and finite");
    if (!(weight > 0.0) || !std::isfinite(weight))
        throw std::invalid_argument("mode weight must be positive and finite");
    if (!(t2_ps > 0.0))
        throw std::invalid_argument("mode T2 must be positive");
    if (std::isnan(t1_ps) || t1_ps <= 0.0)
        throw std::invalid_argument("mode T1 must be positive");
    // Bloch damping pair: 1/T2 >= 1/(2 T1).
    if (std::isfinite(t1_ps) && !(t1_ps >= t2_ps / 2.0))
        throw std::invalid_argument("unphysical relaxation pair: T1 < T2/2");
}

EnsembleSpec::EnsembleSpec(std::vector<ModeSpec> modes, double reference_period_fs)
  : modes_(std::move(modes)), reference_period_fs_(reference_period_fs)
{
    if (modes_.empty())
        throw std::invalid_argument("ensemble needs at least one mode");
    if (!(reference_period_fs > 0.0) || !std::isfinite(reference_period_fs))
        throw std::invalid_argument("reference period must be positive and finite");
    std::set<double> periods;
    for (const auto& m : modes_)
        if (!periods.insert(m.period_fs()).second)
            throw std::invalid_argument("ensemble mode periods must be distinct");
}

double EnsembleSpec::detuning_inv_fs(std::size_t k) const
{
    return 1.0 / modes_.at(k).period_fs() - 1.0 / reference_period_fs_;
}

double EnsembleSpec::total_weight() const
{
    double sum = 0.0;
    for (const auto& m : modes_)
        sum += m.weight();
    return sum;
}

EnsembleSpec EnsembleSpec::with_t2(double t2_ps) const
{
    std::vector<ModeSpec> out;
    out.reserve(modes_.size());
    for (const auto& m : modes_)
        out.push_back(m.with_t2(t2_ps));
    return {std::move(out), reference_period_fs_};
}

EnsembleSpec make_uniform_ensemble(double reference_period_fs, double period_step_fs,
                                   std::span<const double> weights, double t2_ps, double t1_ps)
{
    if (weights.empty())
        throw std::invalid_argument("uniform ensemble needs at least one weight");
    if (weights.size() > 1 && !(period_step_fs != 0.0 && std::isfinite(period_step_fs)))
        throw std::invalid_argument("period step must be non-zero for multi-mode ensembles");
    std::vector<ModeSpec> modes;
    modes.reserve(weights.size());
    const double centre = 0.5 * static_cast<double>(weights.size() - 1);
    for (std::size_t i = 0; i < weights.size(); ++i) {
        const double k = static_cast<double>(i) - centre;
        modes.emplace_back(reference_period_fs + k * period_step_fs, weights[i], t2_ps, t1_ps);
    }
    return {std::move(modes), reference_period_fs};
}

EnsembleSpec reference_ensemble(double t2_ps)
{
    const double weights[] = {1.0 / 3.0, 0.5, 1.0, 0.5, 1.0 / 3.0};
    return make_uniform_ensemble(5.109, 0.004, weights, t2_ps);
}

Envelope parse_envelope(std::string_view name)
{
    if (name == "delta")
        return Envelope::delta;
    if (name == "gaussian")
        return Envelope::gaussian;
    if (name == "sech")
        return Envelope::sech;
    throw std::invalid_argument("unknown pulse envelope '" + std::string(name) + "'");
}

std::string_view to_string(Envelope e)
{
    switch (e) {
    case Envelope::delta:
        return "delta";
    case Envelope::gaussian:
        return "gaussian";
    case Envelope::sech:
        return "sech";
    }
    return "?";
}

PulseSpec::PulseSpec(double area, double arrival, double phase, Envelope env, double fwhm)
  : area_rad(area), arrival_fs(arrival), phase_rad(phase), envelope(env), fwhm_fs(fwhm)
{
    if (!(area_rad >= 0.0) || !std::isfinite(area_rad))
        throw std::invalid_argument("pulse area must be finite and non-negative");
    if (!std::isfinite(arrival_fs) || !std::isfinite(phase_rad))
        throw std::invalid_argument("pulse arrival and phase must be finite");
    if (envelope != Envelope::delta && !(fwhm_fs > 0.0 && std::isfinite(fwhm_fs)))
        throw std::invalid_argument("finite pulses need a positive FWHM");
}

double BlochState::norm() const { return std::sqrt(u * u + v * v + w * w); }

double BlochState::coherence() const { return 0.5 * std::hypot(u, v); }

void assert_physical([[maybe_unused]] const BlochState& out, [[maybe_unused]] const BlochState& in)
{
    assert(in.norm() > 1.0 + bloch_norm_slack || out.norm() <= 1.0 + bloch_norm_slack);
}

FringeTrace::FringeTrace(std::vector<double> delays_fs, std::vector<double> signal, double baseline)
  : delays_fs_(std::move(delays_fs)), signal_(std::move(signal)), baseline_(baseline)
{
    if (delays_fs_.size() != signal_.size())
        throw std::invalid_argument("fringe trace: delays and signal differ in length");
    for (std::size_t i = 1; i < delays_fs_.size(); ++i)
        if (!(delays_fs_[i] > delays_fs_[i - 1]))
            throw std::invalid_argument("fringe trace: delays must be strictly increasing");
}

ContrastEnvelope::ContrastEnvelope(std::vector<double> delays_fs, std::vector<double> contrast)
  : delays_fs_(std::move(delays_fs)), contrast_(std::move(contrast))
{
    if (delays_fs_.size() != contrast_.size())
        throw std::invalid_argument("contrast envelope: delays and contrast differ in length");
    for (double c : contrast_)
        if (!(c >= 0.0))
            throw std::invalid_argument("contrast envelope: values must be non-negative");
    for (std::size_t i = 1; i < delays_fs_.size(); ++i)
        if (!(delays_fs_[i] > delays_fs_[i - 1]))
            throw std::invalid_argument("contrast envelope: delays must be strictly increasing");
}

double ContrastEnvelope::max() const
{
    return contrast_.empty() ? 0.0 : *std::max_element(contrast_.begin(), contrast_.end());
}

double FitResult::param(const std::string& name) const
{
    auto it = params.find(name);
    if (it == params.end())
        throw std::out_of_range("fit result has no parameter '" + name + "'");
    return it->second;
}

}  // namespace qcr
