#include "helpers.hpp"

#include "qcr/analytic.hpp"
#include "qcr/experiments.hpp"
#include "qcr/propagate.hpp"

#include <algorithm>
#include <cmath>

using namespace qcr;
using namespace qcr::propagate;
using qcr::test::rel_err;

namespace {

constexpr double pi = std::numbers::pi;

EnsembleSpec dense(double t2 = 4.64) { return make_dense_ensemble(5.109, 4e-3, 801, t2); }

}  // namespace

TEST_CASE("dense ensemble layout")
{
    const EnsembleSpec e = dense();
    REQUIRE(e.size() == 801);
    CHECK(e.detuning_inv_fs(0) == doctest::Approx(-4e-3).epsilon(1e-9));
    CHECK(e.detuning_inv_fs(400) == doctest::Approx(0.0).scale(1.0).epsilon(1e-12));
    CHECK(e.detuning_inv_fs(800) == doctest::Approx(4e-3).epsilon(1e-9));
    CHECK_THROWS_AS(make_dense_ensemble(5.109, 4e-3, 1, 4.64), std::invalid_argument);
    CHECK_THROWS_AS(make_dense_ensemble(5.109, 0.0, 100, 4.64), std::invalid_argument);
}

TEST_CASE("spectral fringe spacing is the inverse delay")
{
    for (double tau_ps : {0.5, 1.0, 2.0}) {
        const PropagationMap map = propagate_map(dense(), ps_to_fs(tau_ps));
        const FringeStats f = spectral_fringes(map);
        REQUIRE(f.count >= 2);
        CHECK(rel_err(f.spacing_inv_fs, 1.0 / ps_to_fs(tau_ps)) < 0.05);
    }
}

TEST_CASE("zero delay shows no spectral fringes")
{
    const PropagationMap map = propagate_map(dense(), 0.0);
    CHECK(spectral_fringes(map).count == 0);
    for (double w : map.inversion.row(0))
        CHECK(w == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("unit gain single slice reproduces per-channel Ramsey scans")
{
    const EnsembleSpec e = make_dense_ensemble(5.109, 2e-3, 64, 3.0);
    const double delay = 1000.0;
    const PropagationMap map = propagate_map(e, delay);
    REQUIRE(map.inversion.rows == 1);
    REQUIRE(map.inversion.cols == 64);
    const double d[] = {delay};
    for (std::size_t k = 0; k < e.size(); ++k) {
        const EnsembleSpec one({e[k]}, e.reference_period_fs());
        const double w = experiments::ramsey_scan(one, d).signal()[0];
        CHECK(std::abs(map.inversion.at(0, k) - w) < 1e-12);
    }
}

TEST_CASE("property: coherence bounded and slices identical under unit gain")
{
    PropagationOptions opts;
    opts.z_steps = 6;
    for (double delay : {0.0, 333.0, 1000.0, 2718.0}) {
        const PropagationMap map = propagate_map(dense(), delay, opts);
        for (double c : map.coherence.data)
            CHECK(c <= 0.5 + 1e-12);
        for (std::size_t j = 1; j < opts.z_steps; ++j)
            for (std::size_t k = 0; k < map.inversion.cols; ++k) {
                CHECK(map.inversion.at(j, k) == map.inversion.at(0, k));
                CHECK(map.coherence.at(j, k) == map.coherence.at(0, k));
            }
    }
}

TEST_CASE("pulse area follows the gain and clamps at pi")
{
    PropagationOptions opts;
    opts.z_steps = 8;
    opts.gain_per_step = 1.5;
    const PropagationMap map = propagate_map(dense(), 1000.0, opts);
    REQUIRE(map.areas_rad.size() == 8);
    CHECK(map.areas_rad[0] == doctest::Approx(pi / 2));
    CHECK(map.areas_rad[1] == doctest::Approx(0.75 * pi));
    for (std::size_t j = 2; j < 8; ++j)
        CHECK(map.areas_rad[j] == pi);

    opts.gain_per_step = 0.5;
    const PropagationMap weak = propagate_map(dense(), 1000.0, opts);
    for (std::size_t j = 1; j < 8; ++j)
        CHECK(weak.areas_rad[j] < weak.areas_rad[j - 1]);
}

TEST_CASE("propagation argument checks")
{
    CHECK_THROWS_AS(propagate_map(make_dense_ensemble(5.109, 4e-3, 63, 4.64), 1000.0), std::invalid_argument);
    CHECK_THROWS_AS(propagate_map(dense(), -1.0), std::invalid_argument);
    PropagationOptions opts;
    opts.z_steps = 0;
    CHECK_THROWS_AS(propagate_map(dense(), 1000.0, opts), std::invalid_argument);
    opts.z_steps = 1;
    opts.gain_per_step = -0.1;
    CHECK_THROWS_AS(propagate_map(dense(), 1000.0, opts), std::invalid_argument);
    const PropagationMap map = propagate_map(dense(), 1000.0);
    CHECK_THROWS_AS(spectral_fringes(map, 1), std::invalid_argument);
}

TEST_CASE("five-lobe ensemble keeps five dominant spectral maxima")
{
    const EnsembleSpec lobes = reference_ensemble(4.64);
    const double sigma = 0.125 * analytic::mean_detuning_spacing(lobes);
    const EnsembleSpec e = with_lobe_weights(dense(), lobes, sigma);
    PropagationOptions opts;
    opts.z_steps = 10;
    opts.gain_per_step = 0.95;
    const PropagationMap map = propagate_map(e, 1000.0, opts);
    const auto spectrum = weighted_coherence_spectrum(map);
    const auto maxima = dominant_maxima(map.detunings_inv_fs, spectrum);
    REQUIRE(maxima.size() == 5);
    for (std::size_t i = 0; i < 5; ++i)
        CHECK(std::abs(maxima[i].position - lobes.detuning_inv_fs(4 - i)) < 2.0 * sigma);
}

TEST_CASE("weighted normalisation")
{
    Map2D m{2, 2, {1.0, -2.0, 0.5, 4.0}};
    const double w[] = {2.0, 0.5};
    const Map2D n = weighted_normalized(m, w);
    CHECK(n.at(0, 0) == 1.0);
    CHECK(n.at(0, 1) == -0.5);
    CHECK(n.at(1, 0) == 0.5);
    CHECK(n.at(1, 1) == 1.0);
}

TEST_CASE("maps are deterministic across thread counts")
{
    PropagationOptions serial, parallel;
    serial.z_steps = parallel.z_steps = 4;
    serial.gain_per_step = parallel.gain_per_step = 1.2;
    parallel.threads = 4;
    const PropagationMap a = propagate_map(dense(), 1500.0, serial);
    const PropagationMap b = propagate_map(dense(), 1500.0, parallel);
    CHECK(a.inversion.data == b.inversion.data);
    CHECK(a.coherence.data == b.coherence.data);
}
