#include "helpers.hpp"

#include "qcr/core.hpp"

using namespace qcr;

TEST_CASE("unit conversions")
{
    CHECK(ps_to_fs(4.64) == doctest::Approx(4640.0));
    CHECK(fs_to_ps(5220.0) == doctest::Approx(5.22));
    // h = 6.62607015e-34 J s / 1.602176634e-19 J/eV, in meV ps.
    CHECK(planck_constant_mev_ps() == doctest::Approx(4.1356676969238586).epsilon(1e-14));
}

TEST_CASE("ModeSpec validation")
{
    CHECK_NOTHROW(ModeSpec(5.109, 1.0, 4.64));
    CHECK_NOTHROW(ModeSpec(5.109, 1.0, infinity));
    CHECK_THROWS_AS(ModeSpec(0.0, 1.0, 4.64), std::invalid_argument);
    CHECK_THROWS_AS(ModeSpec(-5.0, 1.0, 4.64), std::invalid_argument);
    CHECK_THROWS_AS(ModeSpec(5.109, 0.0, 4.64), std::invalid_argument);
    CHECK_THROWS_AS(ModeSpec(5.109, 1.0, 0.0), std::invalid_argument);
    CHECK_THROWS_AS(ModeSpec(5.109, 1.0, 4.0, 1.0), std::invalid_argument);
    CHECK_NOTHROW(ModeSpec(5.109, 1.0, 4.0, 2.0));

    const ModeSpec m(5.1, 0.5, 3.0, 10.0);
    const ModeSpec n = m.with_t2(4.0);
    CHECK(n.period_fs() == 5.1);
    CHECK(n.weight() == 0.5);
    CHECK(n.t2_ps() == 4.0);
    CHECK(n.t1_ps() == 10.0);
}

TEST_CASE("EnsembleSpec detunings and weights")
{
    const EnsembleSpec e = reference_ensemble();
    REQUIRE(e.size() == 5);
    CHECK(e.reference_period_fs() == 5.109);
    CHECK(e[0].period_fs() == doctest::Approx(5.101));
    CHECK(e[4].period_fs() == doctest::Approx(5.117));
    CHECK(e.total_weight() == doctest::Approx(8.0 / 3.0));
    CHECK(e.detuning_inv_fs(2) == 0.0);
    // Faster modes (shorter period) carry positive detuning.
    CHECK(e.detuning_inv_fs(0) > 0.0);
    CHECK(e.detuning_inv_fs(4) < 0.0);
    CHECK(e.detuning_inv_fs(0) == doctest::Approx(1.0 / 5.101 - 1.0 / 5.109).epsilon(1e-12));
    for (const auto& m : e.modes())
        CHECK(m.t2_ps() == 4.64);

    const EnsembleSpec f = e.with_t2(5.22);
    for (const auto& m : f.modes())
        CHECK(m.t2_ps() == 5.22);

    CHECK_THROWS_AS(EnsembleSpec({}, 5.109), std::invalid_argument);
    CHECK_THROWS_AS(EnsembleSpec({ModeSpec(5.1, 1, 1), ModeSpec(5.1, 1, 1)}, 5.109), std::invalid_argument);
    CHECK_THROWS_AS(EnsembleSpec({ModeSpec(5.1, 1, 1)}, 0.0), std::invalid_argument);
}

TEST_CASE("uniform ensembles are centred on the reference")
{
    const double w4[] = {1.0, 1.0, 1.0, 1.0};
    const EnsembleSpec even = make_uniform_ensemble(5.0, 0.01, w4, 3.0);
    CHECK(even[0].period_fs() == doctest::Approx(4.985));
    CHECK(even[3].period_fs() == doctest::Approx(5.015));

    const double w1[] = {2.0};
    const EnsembleSpec single = make_uniform_ensemble(5.0, 0.0, w1, 3.0);
    CHECK(single.size() == 1);
    CHECK(single[0].period_fs() == 5.0);

    CHECK_THROWS_AS(make_uniform_ensemble(5.0, 0.0, w4, 3.0), std::invalid_argument);
    CHECK_THROWS_AS(make_uniform_ensemble(5.0, 0.01, std::span<const double>{}, 3.0), std::invalid_argument);
}

TEST_CASE("envelope names")
{
    for (auto e : {Envelope::delta, Envelope::gaussian, Envelope::sech})
        CHECK(parse_envelope(to_string(e)) == e);
    CHECK_THROWS_AS(parse_envelope("lorentzian"), std::invalid_argument);
}

TEST_CASE("PulseSpec validation")
{
    CHECK_NOTHROW(PulseSpec(std::numbers::pi, 0.0, 0.0));
    CHECK_THROWS_AS(PulseSpec(-1.0, 0.0, 0.0), std::invalid_argument);
    CHECK_THROWS_AS(PulseSpec(1.0, infinity, 0.0), std::invalid_argument);
    CHECK_THROWS_AS(PulseSpec(1.0, 0.0, 0.0, Envelope::gaussian, 0.0), std::invalid_argument);
    CHECK_NOTHROW(PulseSpec(1.0, 0.0, 0.0, Envelope::delta, 0.0));
}

TEST_CASE("BlochState helpers")
{
    const BlochState g = BlochState::ground();
    CHECK(g.norm() == 1.0);
    CHECK(g.coherence() == 0.0);
    const BlochState s{0.6, 0.8, 0.0};
    CHECK(s.norm() == doctest::Approx(1.0));
    CHECK(s.coherence() == doctest::Approx(0.5));
}

TEST_CASE("trace and envelope validation")
{
    CHECK_NOTHROW(FringeTrace({1.0, 2.0}, {0.1, -0.1}));
    CHECK_THROWS_AS(FringeTrace({1.0, 2.0}, {0.1}), std::invalid_argument);
    CHECK_THROWS_AS(FringeTrace({2.0, 1.0}, {0.1, 0.2}), std::invalid_argument);
    CHECK_THROWS_AS(FringeTrace({1.0, 1.0}, {0.1, 0.2}), std::invalid_argument);

    const ContrastEnvelope env({1.0, 2.0, 3.0}, {0.2, 0.7, 0.1});
    CHECK(env.max() == 0.7);
    CHECK(env.size() == 3);
    CHECK_THROWS_AS(ContrastEnvelope({1.0, 2.0}, {0.1, -0.1}), std::invalid_argument);
}

TEST_CASE("FitResult parameter lookup")
{
    FitResult r;
    r.params["tau_ps"] = 1.27;
    CHECK(r.param("tau_ps") == 1.27);
    CHECK_THROWS_AS(r.param("beta"), std::out_of_range);
}
