// qcr - command-line front end for the revival toolkit.
//
//   qcr [--preset NAME] [--config PATH] [--out DIR] [--seed N] [--threads N] <command>
//
// Exit codes: 0 success, 2 configuration or input error, 3 numerical failure,
// 4 I/O error.

#include "qcr/cli/commands.hpp"

#include "CLI11.hpp"

#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <optional>

namespace {

enum Exit { ok = 0, config_failure = 2, numerical_failure = 3, io_failure = 4 };

unsigned threads_from_env(const char* value)
{
    try {
        std::size_t pos = 0;
        const long n = std::stol(value, &pos);
        if (pos == std::string(value).size() && n >= 1 && n <= 1024)
            return static_cast<unsigned>(n);
    } catch (const std::exception&) {
    }
    throw qcr::cli::config_error(std::string("QCR_THREADS: '") + value + "' is not a thread count");
}

}  // namespace

int main(int argc, char** argv)
{
    namespace cli = qcr::cli;

    CLI::App app{"Collapse and revival of coherence in discrete inhomogeneous ensembles"};
    app.require_subcommand(1);

    std::string preset_name = "paper-fig2";
    std::string config_path;
    std::string out_dir = ".";
    std::optional<std::uint64_t> seed;
    std::optional<unsigned> threads;
    app.add_option("--preset", preset_name, "paper-fig2 | paper-fig4 | paper-fig5 (paper-defaults = paper-fig2)")
        ->capture_default_str();
    app.add_option("--config", config_path, "INI configuration applied on top of the preset");
    app.add_option("--out", out_dir, "Output directory")->capture_default_str();
    app.add_option("--seed", seed, "Noise seed (overrides [run] seed)");
    app.add_option("--threads", threads, "Worker threads (fallback: QCR_THREADS, then [run] threads)")
        ->check(CLI::Range(1, 1024));

    auto* analytic = app.add_subcommand("analytic", "Closed-form revival signal and envelope");
    auto* ramsey = app.add_subcommand("ramsey", "Two-pulse delay scan with revival and T2* analysis");
    auto* echo = app.add_subcommand("echo", "Three-pulse echo delay scan with T2 analysis");
    auto* propagate = app.add_subcommand("propagate", "Spectral inversion and coherence maps");
    auto* sweep = app.add_subcommand("sweep", "Bias or temperature sweep with scaling-law fits");
    auto* fit = app.add_subcommand("fit", "Fit a two-column CSV");
    auto* show = app.add_subcommand("config", "Print the effective configuration");

    std::string fit_input;
    std::string fit_model;
    fit->add_option("input", fit_input, "Two-column CSV (x, y)")->required();
    fit->add_option("--model", fit_model, "exp1 | exp2 | exp4 | power | arrhenius")->required();
    std::string sweep_axis;
    sweep->add_option("--axis", sweep_axis, "bias | temperature (overrides [sweep] axis)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? ok : config_failure;
    }

    try {
        cli::Config cfg = cli::preset(preset_name);
        if (!config_path.empty())
            cfg = cli::load_config(config_path, cfg);
        if (seed)
            cfg.run.seed = *seed;
        if (threads)
            cfg.run.threads = *threads;
        else if (const char* env = std::getenv("QCR_THREADS"); env && *env)
            cfg.run.threads = threads_from_env(env);
        if (!sweep_axis.empty())
            cfg = cli::parse_config("[sweep]\naxis = " + sweep_axis + "\n", cfg);

        if (*show) {
            std::cout << cli::dump_config(cfg);
            return ok;
        }

        const std::filesystem::path out(out_dir);
        std::error_code ec;
        std::filesystem::create_directories(out, ec);
        if (ec)
            throw cli::io_error("cannot create output directory '" + out_dir + "': " + ec.message());
        cli::write_effective_config(cfg, out);

        cli::ordered_json summary;
        if (*analytic)
            summary = cli::cmd_analytic(cfg, out);
        else if (*ramsey)
            summary = cli::cmd_ramsey(cfg, out);
        else if (*echo)
            summary = cli::cmd_echo(cfg, out);
        else if (*propagate)
            summary = cli::cmd_propagate(cfg, out);
        else if (*sweep)
            summary = cli::cmd_sweep(cfg, out);
        else if (*fit)
            summary = cli::cmd_fit(cfg, fit_input, cli::parse_fit_model(fit_model), out);
        std::cout << summary.dump(2) << '\n';
        return ok;
    } catch (const cli::config_error& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return config_failure;
    } catch (const cli::io_error& e) {
        std::cerr << "I/O error: " << e.what() << '\n';
        return io_failure;
    } catch (const qcr::numerical_error& e) {
        std::cerr << "numerical error: " << e.what() << '\n';
        return numerical_failure;
    } catch (const std::filesystem::filesystem_error& e) {
        std::cerr << "I/O error: " << e.what() << '\n';
        return io_failure;
    } catch (const std::invalid_argument& e) {
        std::cerr << "invalid input: " << e.what() << '\n';
        return config_failure;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return numerical_failure;
    }
}
