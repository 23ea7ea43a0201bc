#include "helpers.hpp"

#include "qcr/cli/commands.hpp"
#include "qcr/experiments.hpp"
#include "qcr/propagate.hpp"

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <sys/wait.h>

using namespace qcr;
using namespace qcr::cli;
namespace fs = std::filesystem;
using qcr::test::rel_err;

namespace {

class TempDir {
public:
    explicit TempDir(const std::string& tag)
    {
        static int counter = 0;
        path_ = fs::temp_directory_path() /
                ("qcr_test_" + tag + "_" + std::to_string(::getpid()) + "_" + std::to_string(counter++));
        fs::remove_all(path_);
        fs::create_directories(path_);
    }
    ~TempDir() { fs::remove_all(path_); }
    TempDir(const TempDir&) = delete;
    TempDir& operator=(const TempDir&) = delete;
    const fs::path& path() const { return path_; }
    fs::path operator/(const std::string& name) const { return path_ / name; }

private:
    fs::path path_;
};

std::string slurp(const fs::path& p)
{
    std::ifstream in(p, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::size_t line_count(const fs::path& p)
{
    std::ifstream in(p);
    std::size_t n = 0;
    for (std::string line; std::getline(in, line);)
        ++n;
    return n;
}

std::vector<std::vector<double>> read_rows(const fs::path& p)
{
    std::ifstream in(p);
    std::vector<std::vector<double>> rows;
    std::string line;
    std::getline(in, line);
    while (std::getline(in, line)) {
        std::vector<double> row;
        std::istringstream ss(line);
        for (std::string cell; std::getline(ss, cell, ',');)
            row.push_back(std::stod(cell));
        rows.push_back(std::move(row));
    }
    return rows;
}

int run_tool(const std::string& args)
{
    const std::string cmd = std::string("\"") + QCR_TOOL_PATH + "\" " + args + " >/dev/null 2>&1";
    const int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

Config short_scan(Config cfg)
{
    cfg.scan.stop_fs = 4000.0;
    return cfg;
}

}  // namespace

TEST_CASE("presets")
{
    const Config fig2 = preset("paper-fig2");
    CHECK(dump_config(preset("paper-defaults")) == dump_config(fig2));
    CHECK(fig2.ensemble.t2_ps == 4.64);
    CHECK(fig2.ensemble.reference_period_fs == 5.109);
    CHECK(fig2.scan.min_delay_fs == 600.0);
    const Config fig4 = preset("paper-fig4");
    CHECK(fig4.ensemble.t2_ps == 5.22);
    CHECK(fig4.ensemble.period_step_fs == fig4_period_step_fs);
    CHECK(preset("paper-fig5").sweep.noise_multiplicative > 0.0);
    CHECK_THROWS_AS(preset("paper-fig9"), config_error);
}

TEST_CASE("config parsing")
{
    const Config c = parse_config(R"(
# comment
[ensemble]
weights = 1/3, 1/2, 1, 1/2, 1/3
t2_ps = 3.5
; another comment
[pulse]
envelope = gaussian
[propagate]
lobes = false
z_steps = 4
[sweep]
axis = temperature
)");
    REQUIRE(c.ensemble.weights.size() == 5);
    CHECK(c.ensemble.weights[0] == doctest::Approx(1.0 / 3.0).epsilon(1e-15));
    CHECK(c.ensemble.t2_ps == 3.5);
    CHECK(c.pulse.envelope == Envelope::gaussian);
    CHECK(!c.propagate.lobes);
    CHECK(c.propagate.z_steps == 4);
    CHECK(c.sweep.axis == SweepAxis::temperature);
    CHECK(c.scan.stop_fs == 15000.0);

    CHECK_THROWS_AS(parse_config("[nonsense]\na = 1\n"), config_error);
    CHECK_THROWS_AS(parse_config("[scan]\nstart = 1\n"), config_error);
    CHECK_THROWS_AS(parse_config("[scan]\nstart_fs = abc\n"), config_error);
    CHECK_THROWS_AS(parse_config("[ensemble]\nweights = 1/0\n"), config_error);
    CHECK_THROWS_AS(parse_config("[propagate]\nz_steps = -2\n"), config_error);
    CHECK_THROWS_AS(parse_config("[run]\nthreads = 0\n"), config_error);
    CHECK_THROWS_AS(parse_config("[sweep]\naxis = pressure\n"), config_error);
    CHECK_THROWS_AS(parse_config("[scan\n"), config_error);
}

TEST_CASE("property: dumped configuration parses back to itself")
{
    for (const char* name : {"paper-fig2", "paper-fig4", "paper-fig5"}) {
        const Config c = preset(name);
        const std::string dump = dump_config(c);
        CHECK(dump_config(parse_config(dump)) == dump);
    }
    Config odd = preset("paper-fig2");
    odd.ensemble.weights = {0.1, 0.7, 1.0 / 7.0};
    odd.ensemble.t1_ps = 123.456789;
    odd.analysis.baseline = 0.125;
    odd.run.seed = 18446744073709551615ull;
    odd.scan.step_fs = 0.1 + 0.2;
    const std::string dump = dump_config(odd);
    const Config back = parse_config(dump);
    CHECK(dump_config(back) == dump);
    CHECK(back.ensemble.weights == odd.ensemble.weights);
    CHECK(back.scan.step_fs == odd.scan.step_fs);
    CHECK(back.run.seed == odd.run.seed);
    CHECK(*back.analysis.baseline == 0.125);
}

TEST_CASE("analytic command")
{
    TempDir dir("analytic");
    const auto summary = cmd_analytic(preset("paper-fig2"), dir.path());
    CHECK(line_count(dir / "analytic.csv") == 30002);
    CHECK(summary["rows"] == 30001);

    // Undamped envelope peaks sit on the revival times within one grid step.
    REQUIRE(summary["rephasing_peaks"].size() == summary["revival_times"].size());
    for (std::size_t i = 0; i < summary["revival_times"].size(); ++i)
        CHECK(std::abs(summary["rephasing_peaks"][i]["time_fs"].get<double>() -
                       summary["revival_times"][i]["time_fs"].get<double>()) <= 0.5);

    const auto rows = read_rows(dir / "analytic.csv");
    CHECK(rows[0][2] == doctest::Approx(1.0));
    const double ratio = rows[26100][2] / rows[13060][2];  // 13.05 ps over 6.53 ps
    CHECK(rel_err(ratio, std::exp(-6.52 / 4.64)) < 0.02);
}

TEST_CASE("ramsey command")
{
    TempDir dir("ramsey");
    const auto summary = cmd_ramsey(preset("paper-fig2"), dir.path());
    CHECK(summary["revival_count"] == 4);
    CHECK(summary["n_delays"] == 28801);
    CHECK(fs::exists(dir / "ramsey.csv"));
    CHECK(fs::exists(dir / "ramsey_envelope.csv"));
    CHECK(fs::exists(dir / "ramsey_summary.json"));
    CHECK(rel_err(summary["t2_from_revivals"]["params"]["tau_ps"].get<double>(), 4.64) < 0.01);
}

TEST_CASE("echo command recovers T2")
{
    TempDir dir("echo");
    const auto summary = cmd_echo(preset("paper-fig4"), dir.path());
    CHECK(rel_err(summary["t2"]["params"]["tau_ps"].get<double>(), 5.22) < 0.02);
}

TEST_CASE("noisy scans are byte-stable for a seed and independent of threads")
{
    Config cfg = short_scan(preset("paper-fig2"));
    cfg.scan.noise_additive = 0.01;
    cfg.scan.noise_multiplicative = 0.01;
    cfg.run.seed = 99;
    TempDir a("det_a"), b("det_b"), c("det_c");
    cmd_ramsey(cfg, a.path());
    cmd_echo(cfg, a.path());
    cfg.run.threads = 4;
    cmd_ramsey(cfg, b.path());
    cmd_echo(cfg, b.path());
    for (const char* f : {"ramsey.csv", "ramsey_summary.json", "echo.csv", "echo_summary.json"})
        CHECK(slurp(a / f) == slurp(b / f));
    cfg.run.seed = 100;
    cmd_ramsey(cfg, c.path());
    CHECK(slurp(a / "ramsey.csv") != slurp(c / "ramsey.csv"));
}

TEST_CASE("effective configuration reproduces the outputs")
{
    Config cfg = short_scan(preset("paper-fig4"));
    cfg.scan.noise_additive = 0.02;
    cfg.run.seed = 5;
    TempDir a("round_a"), b("round_b");
    write_effective_config(cfg, a.path());
    cmd_ramsey(cfg, a.path());
    const Config back = load_config((a / "effective_config.ini").string());
    cmd_ramsey(back, b.path());
    CHECK(slurp(a / "ramsey.csv") == slurp(b / "ramsey.csv"));
    CHECK(slurp(a / "ramsey_summary.json") == slurp(b / "ramsey_summary.json"));
}

TEST_CASE("fit command")
{
    TempDir dir("fit");
    {
        std::ofstream out(dir / "decay.csv");
        out << "t_fs,contrast\n";
        for (int i = 0; i < 50; ++i)
            out << 50.0 * i << ',' << std::exp(-2.0 * 50.0 * i / 1270.0) << '\n';
    }
    const auto r = cmd_fit(preset("paper-fig2"), dir / "decay.csv", parse_fit_model("exp2"), dir.path());
    CHECK(rel_err(r["params"]["tau_ps"].get<double>(), 1.27) < 1e-6);
    CHECK(r["n_points"] == 50);
    CHECK(fs::exists(dir / "fit.json"));

    {
        std::ofstream out(dir / "power.csv");
        for (double x : {3.0, 4.0, 4.7, 6.0, 7.15})
            out << x << ',' << 5.22 * std::pow(x, -0.38) << '\n';
    }
    const auto p = cmd_fit(preset("paper-fig2"), dir / "power.csv", parse_fit_model("power"), dir.path());
    CHECK(std::abs(p["params"]["beta"].get<double>() - 0.38) < 1e-6);

    CHECK(parse_fit_model("arrhenius-like") == FitModel::exp_temperature);
    CHECK_THROWS_AS(parse_fit_model("cubic"), config_error);

    {
        std::ofstream out(dir / "bad.csv");
        out << "x,y\n1,2\n2,oops\n";
    }
    try {
        cmd_fit(preset("paper-fig2"), dir / "bad.csv", FitModel::exp1, dir.path());
        FAIL("expected config_error");
    } catch (const config_error& e) {
        CHECK(std::string(e.what()).find(":3") != std::string::npos);
    }
    CHECK_THROWS_AS(cmd_fit(preset("paper-fig2"), dir / "missing.csv", FitModel::exp1, dir.path()), io_error);
}

TEST_CASE("propagate command")
{
    TempDir dir("propagate");
    Config cfg = preset("paper-fig2");
    const auto s = cmd_propagate(cfg, dir.path());
    CHECK(rel_err(s["fringe_spacing_inv_fs"].get<double>(), 1e-3) < 0.05);
    CHECK(s["dominant_maxima_count"] == 5);
    const auto rows = read_rows(dir / "inversion_map.csv");
    CHECK(rows.size() == cfg.propagate.z_steps);
    CHECK(rows[0].size() == cfg.propagate.channels + 2);

    cfg.propagate.delay_fs = 0.0;
    CHECK(cmd_propagate(cfg, dir.path())["fringe_count"] == 0);
}

TEST_CASE("unit-gain single-slice map matches single-delay Ramsey readouts")
{
    TempDir dir("propagate_unit");
    Config cfg = preset("paper-fig2");
    cfg.propagate.z_steps = 1;
    cfg.propagate.gain_per_step = 1.0;
    cfg.propagate.lobes = false;
    cfg.propagate.normalize = false;
    cfg.propagate.channels = 101;
    cmd_propagate(cfg, dir.path());
    const auto rows = read_rows(dir / "inversion_map.csv");
    REQUIRE(rows.size() == 1);
    const EnsembleSpec dense = propagate::make_dense_ensemble(
        cfg.ensemble.reference_period_fs, cfg.propagate.half_span_inv_fs, cfg.propagate.channels,
        cfg.ensemble.t2_ps);
    const double d[] = {cfg.propagate.delay_fs};
    for (std::size_t k = 0; k < dense.size(); ++k) {
        const EnsembleSpec one({dense[k]}, dense.reference_period_fs());
        CHECK(std::abs(rows[0][k + 2] - experiments::ramsey_scan(one, d).signal()[0]) < 1e-12);
    }
}

TEST_CASE("sweep command recovers the planted laws")
{
    TempDir dir("sweep");
    Config cfg = preset("paper-fig4");
    const auto bias = cmd_sweep(cfg, dir.path());
    CHECK(bias["laws"]["homogeneous"]["relative_error"].get<double>() < 0.05);
    CHECK(bias["laws"]["inhomogeneous"]["relative_error"].get<double>() < 0.05);
    CHECK(line_count(dir / "sweep.csv") == 6);

    cfg.sweep.axis = SweepAxis::temperature;
    const auto temp = cmd_sweep(cfg, dir.path());
    CHECK(temp["laws"]["homogeneous"]["relative_error"].get<double>() < 0.05);
    CHECK(temp["laws"]["inhomogeneous"]["relative_error"].get<double>() < 0.05);

    cfg.sweep.temperature_points = {300.0};
    CHECK_THROWS_AS(cmd_sweep(cfg, dir.path()), config_error);
}

TEST_CASE("two-column reader")
{
    TempDir dir("csv");
    {
        std::ofstream out(dir / "ok.csv");
        out << "# note\n\n1.5, 2\n3,4\n";
    }
    const TwoColumns c = read_two_columns(dir / "ok.csv");
    CHECK(c.x == std::vector<double>{1.5, 3.0});
    CHECK(c.y == std::vector<double>{2.0, 4.0});
    CHECK(format_double(0.1) == "0.10000000000000001");
}

TEST_CASE("tool exit codes")
{
    TempDir dir("tool");
    const std::string out = " --out \"" + dir.path().string() + "\" ";
    CHECK(run_tool(out + "config") == 0);
    CHECK(run_tool(out + "--preset nope analytic") == 2);
    CHECK(run_tool(out + "--threads 0 analytic") == 2);
    CHECK(run_tool(out + "--config \"" + (dir / "absent.ini").string() + "\" analytic") == 4);
    CHECK(run_tool(out + "bogus") == 2);

    {
        std::ofstream bad(dir / "bad.ini");
        bad << "[scan]\nstep_fs = fast\n";
    }
    CHECK(run_tool(out + "--config \"" + (dir / "bad.ini").string() + "\" ramsey") == 2);

    {
        std::ofstream flat(dir / "flat.csv");
        flat << "1,1\n2,1\n3,1\n";
    }
    CHECK(run_tool(out + "fit \"" + (dir / "flat.csv").string() + "\" --model exp2") == 3);
    CHECK(run_tool(out + "fit \"" + (dir / "flat.csv").string() + "\" --model cubic") == 2);

    {
        std::ofstream blocker(dir / "file");
        blocker << "x";
    }
    CHECK(run_tool("--out \"" + (dir / "file" / "sub").string() + "\" analytic") == 4);

    {
        std::ofstream one(dir / "one.ini");
        one << "[sweep]\nbias_points = 4.7\n";
    }
    CHECK(run_tool(out + "--config \"" + (dir / "one.ini").string() + "\" sweep") == 2);
}
