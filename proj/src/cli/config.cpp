#include "qcr/cli/config.hpp"

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>
#include <fmt/format.h>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <sstream>

namespace qcr::cli {

namespace {

std::string trim(std::string_view s)
{
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string_view::npos)
        return {};
    const auto e = s.find_last_not_of(" \t\r\n");
    return std::string(s.substr(b, e - b + 1));
}

double parse_number(std::string_view text, const std::string& key)
{
    const std::string s = trim(text);
    double value = 0.0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
    if (s.empty() || ec != std::errc() || ptr != s.data() + s.size())
        throw config_error(fmt::format("{}: '{}' is not a number", key, s));
    return value;
}

double parse_fraction(std::string_view text, const std::string& key)
{
    const auto slash = text.find('/');
    if (slash == std::string_view::npos)
        return parse_number(text, key);
    const double den = parse_number(text.substr(slash + 1), key);
    if (den == 0.0)
        throw config_error(fmt::format("{}: zero denominator in '{}'", key, trim(text)));
    return parse_number(text.substr(0, slash), key) / den;
}

std::vector<double> parse_list(std::string_view text, const std::string& key, bool fractions)
{
    std::vector<double> out;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        const auto comma = text.find(',', pos);
        const auto item = text.substr(pos, comma == std::string_view::npos ? std::string_view::npos : comma - pos);
        out.push_back(fractions ? parse_fraction(item, key) : parse_number(item, key));
        if (comma == std::string_view::npos)
            break;
        pos = comma + 1;
    }
    return out;
}

std::uint64_t parse_unsigned(std::string_view text, const std::string& key)
{
    const std::string s = trim(text);
    std::uint64_t value = 0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
    if (s.empty() || ec != std::errc() || ptr != s.data() + s.size())
        throw config_error(fmt::format("{}: '{}' is not a non-negative integer", key, s));
    return value;
}

bool parse_bool(std::string_view text, const std::string& key)
{
    const std::string s = trim(text);
    if (s == "true" || s == "1" || s == "yes" || s == "on")
        return true;
    if (s == "false" || s == "0" || s == "no" || s == "off")
        return false;
    throw config_error(fmt::format("{}: '{}' is not a boolean", key, s));
}

std::string fmt_double(double v)
{
    if (std::isinf(v))
        return v > 0 ? "inf" : "-inf";
    return fmt::format("{:.17g}", v);
}

std::string fmt_list(const std::vector<double>& v)
{
    std::string out;
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (i)
            out += ", ";
        out += fmt_double(v[i]);
    }
    return out;
}

struct Field {
    const char* section;
    const char* key;
    std::function<void(std::string_view, const std::string&)> set;
    std::function<std::string()> get;
};

std::vector<Field> fields(Config& c)
{
    auto num = [](double& ref) {
        return std::pair{
            std::function<void(std::string_view, const std::string&)>(
                [&ref](std::string_view v, const std::string& k) { ref = parse_number(v, k); }),
            std::function<std::string()>([&ref] { return fmt_double(ref); })};
    };
    auto size = [](std::size_t& ref) {
        return std::pair{
            std::function<void(std::string_view, const std::string&)>(
                [&ref](std::string_view v, const std::string& k) { ref = parse_unsigned(v, k); }),
            std::function<std::string()>([&ref] { return std::to_string(ref); })};
    };
    auto flag = [](bool& ref) {
        return std::pair{
            std::function<void(std::string_view, const std::string&)>(
                [&ref](std::string_view v, const std::string& k) { ref = parse_bool(v, k); }),
            std::function<std::string()>([&ref] { return std::string(ref ? "true" : "false"); })};
    };
    auto list = [](std::vector<double>& ref, bool fractions) {
        return std::pair{
            std::function<void(std::string_view, const std::string&)>(
                [&ref, fractions](std::string_view v, const std::string& k) { ref = parse_list(v, k, fractions); }),
            std::function<std::string()>([&ref] { return fmt_list(ref); })};
    };
    auto field = [](const char* s, const char* k, auto accessors) {
        return Field{s, k, std::move(accessors.first), std::move(accessors.second)};
    };

    std::vector<Field> f;
    f.push_back({"run", "seed",
                 [&c](std::string_view v, const std::string& k) { c.run.seed = parse_unsigned(v, k); },
                 [&c] { return std::to_string(c.run.seed); }});
    f.push_back({"run", "threads",
                 [&c](std::string_view v, const std::string& k) {
                     const auto n = parse_unsigned(v, k);
                     if (n < 1 || n > 1024)
                         throw config_error(k + ": must be between 1 and 1024");
                     c.run.threads = static_cast<unsigned>(n);
                 },
                 [&c] { return std::to_string(c.run.threads); }});

    f.push_back(field("ensemble", "reference_period_fs", num(c.ensemble.reference_period_fs)));
    f.push_back(field("ensemble", "period_step_fs", num(c.ensemble.period_step_fs)));
    f.push_back(field("ensemble", "weights", list(c.ensemble.weights, true)));
    f.push_back(field("ensemble", "t2_ps", num(c.ensemble.t2_ps)));
    f.push_back(field("ensemble", "t1_ps", num(c.ensemble.t1_ps)));

    f.push_back(field("pulse", "area_rad", num(c.pulse.area_rad)));
    f.push_back({"pulse", "envelope",
                 [&c](std::string_view v, const std::string& k) {
                     try {
                         c.pulse.envelope = parse_envelope(trim(v));
                     } catch (const std::invalid_argument& e) {
                         throw config_error(k + ": " + e.what());
                     }
                 },
                 [&c] { return std::string(to_string(c.pulse.envelope)); }});
    f.push_back(field("pulse", "fwhm_fs", num(c.pulse.fwhm_fs)));
    f.push_back(field("pulse", "dt_fs", num(c.pulse.dt_fs)));

    f.push_back(field("scan", "start_fs", num(c.scan.start_fs)));
    f.push_back(field("scan", "stop_fs", num(c.scan.stop_fs)));
    f.push_back(field("scan", "step_fs", num(c.scan.step_fs)));
    f.push_back(field("scan", "min_delay_fs", num(c.scan.min_delay_fs)));
    f.push_back(field("scan", "w_eq", num(c.scan.w_eq)));
    f.push_back(field("scan", "noise_additive", num(c.scan.noise_additive)));
    f.push_back(field("scan", "noise_multiplicative", num(c.scan.noise_multiplicative)));

    f.push_back(field("analysis", "prominence", num(c.analysis.prominence)));
    f.push_back(field("analysis", "raw_prominence", num(c.analysis.raw_prominence)));
    f.push_back(field("analysis", "noise_floor", num(c.analysis.noise_floor)));
    f.push_back({"analysis", "baseline",
                 [&c](std::string_view v, const std::string& k) {
                     if (trim(v) == "window-mean")
                         c.analysis.baseline.reset();
                     else
                         c.analysis.baseline = parse_number(v, k);
                 },
                 [&c] { return c.analysis.baseline ? fmt_double(*c.analysis.baseline) : std::string("window-mean"); }});

    f.push_back(field("analytic", "start_fs", num(c.analytic.start_fs)));
    f.push_back(field("analytic", "stop_fs", num(c.analytic.stop_fs)));
    f.push_back(field("analytic", "step_fs", num(c.analytic.step_fs)));

    f.push_back(field("propagate", "delay_fs", num(c.propagate.delay_fs)));
    f.push_back(field("propagate", "z_steps", size(c.propagate.z_steps)));
    f.push_back(field("propagate", "gain_per_step", num(c.propagate.gain_per_step)));
    f.push_back(field("propagate", "channels", size(c.propagate.channels)));
    f.push_back(field("propagate", "half_span_inv_fs", num(c.propagate.half_span_inv_fs)));
    f.push_back(field("propagate", "lobes", flag(c.propagate.lobes)));
    f.push_back(field("propagate", "lobe_sigma_rel", num(c.propagate.lobe_sigma_rel)));
    f.push_back(field("propagate", "normalize", flag(c.propagate.normalize)));

    f.push_back({"sweep", "axis",
                 [&c](std::string_view v, const std::string& k) {
                     const std::string s = trim(v);
                     if (s == "bias")
                         c.sweep.axis = SweepAxis::bias;
                     else if (s == "temperature")
                         c.sweep.axis = SweepAxis::temperature;
                     else
                         throw config_error(k + ": expected bias or temperature, got '" + s + "'");
                 },
                 [&c] { return std::string(to_string(c.sweep.axis)); }});
    f.push_back(field("sweep", "bias_points", list(c.sweep.bias_points, false)));
    f.push_back(field("sweep", "bias_reference", num(c.sweep.bias_reference)));
    f.push_back(field("sweep", "temperature_points", list(c.sweep.temperature_points, false)));
    f.push_back(field("sweep", "temperature_reference", num(c.sweep.temperature_reference)));
    f.push_back(field("sweep", "t2_ref_ps", num(c.sweep.t2_ref_ps)));
    f.push_back(field("sweep", "t2star_ref_ps", num(c.sweep.t2star_ref_ps)));
    f.push_back(field("sweep", "beta_homo", num(c.sweep.beta_homo)));
    f.push_back(field("sweep", "beta_inhomo", num(c.sweep.beta_inhomo)));
    f.push_back(field("sweep", "t0_homo_K", num(c.sweep.t0_homo_K)));
    f.push_back(field("sweep", "t0_inhomo_K", num(c.sweep.t0_inhomo_K)));
    f.push_back(field("sweep", "noise_multiplicative", num(c.sweep.noise_multiplicative)));
    return f;
}

}  // namespace

std::string_view to_string(SweepAxis axis) { return axis == SweepAxis::bias ? "bias" : "temperature"; }

Config preset(std::string_view name)
{
    Config c;
    if (name == "paper-fig2" || name == "paper-defaults")
        return c;
    if (name == "paper-fig4") {
        c.ensemble.t2_ps = 5.22;
        c.ensemble.period_step_fs = fig4_period_step_fs;
        return c;
    }
    if (name == "paper-fig5") {
        c.ensemble.t2_ps = 5.22;
        c.ensemble.period_step_fs = fig4_period_step_fs;
        c.sweep.noise_multiplicative = 0.02;
        return c;
    }
    throw config_error("unknown preset '" + std::string(name) + "'");
}

Config parse_config(std::string_view text, Config base)
{
    namespace pt = boost::property_tree;
    pt::ptree tree;
    // ';' comments are native to the parser; '#' lines are accepted as well.
    std::string cleaned;
    std::istringstream lines{std::string(text)};
    for (std::string line; std::getline(lines, line);)
        cleaned += (trim(line).starts_with('#') ? std::string() : line) + '\n';
    std::istringstream in{cleaned};
    try {
        pt::ini_parser::read_ini(in, tree);
    } catch (const pt::ini_parser_error& e) {
        throw config_error(fmt::format("line {}: {}", e.line(), e.message()));
    }

    Config cfg = std::move(base);
    auto table = fields(cfg);
    for (const auto& [section, keys] : tree) {
        if (keys.empty() && !keys.data().empty())
            throw config_error("key '" + section + "' outside of any section");
        bool known_section = false;
        for (const auto& f : table)
            known_section = known_section || section == f.section;
        if (!known_section)
            throw config_error("unknown section [" + section + "]");
        for (const auto& [key, value] : keys) {
            const auto it = std::find_if(table.begin(), table.end(),
                                         [&](const Field& f) { return section == f.section && key == f.key; });
            if (it == table.end())
                throw config_error("unknown key '" + key + "' in [" + section + "]");
            it->set(value.data(), section + "." + key);
        }
    }
    return cfg;
}

Config load_config(const std::string& path, Config base)
{
    std::ifstream in(path);
    if (!in)
        throw io_error("cannot open config file '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str(), std::move(base));
}

std::string dump_config(const Config& cfg)
{
    Config copy = cfg;
    std::string out;
    std::string_view current;
    for (const auto& f : fields(copy)) {
        if (current != f.section) {
            if (!current.empty())
                out += '\n';
            out += fmt::format("[{}]\n", f.section);
            current = f.section;
        }
        out += fmt::format("{} = {}\n", f.key, f.get());
    }
    return out;
}

EnsembleSpec build_ensemble(const EnsembleConfig& cfg)
{
    try {
        return make_uniform_ensemble(cfg.reference_period_fs, cfg.period_step_fs, cfg.weights, cfg.t2_ps,
                                     cfg.t1_ps);
    } catch (const std::invalid_argument& e) {
        throw config_error(std::string("[ensemble]: ") + e.what());
    }
}

}  // namespace qcr::cli
