#include <doctest.h>

#include <cmath>

#include "impstab/criteria.hpp"
#include "impstab/error.hpp"
#include "impstab/models.hpp"
#include "impstab/verdict.hpp"
#include "random_systems.hpp"

using namespace impstab;
using impstab::testing::Rng;

namespace {

const RationalFunction one{Polynomial{1}, Polynomial{1}};
const RationalFunction cube{Polynomial{1, 0.3, 0.03, 0.001}, Polynomial{1}};  // (0.1s+1)^3

BodeSeries bode_of(const RationalFunction& rf, const FrequencyGrid& g) { return bode(evaluate_response(rf, g)); }

RationalFunction constant(double k) { return {Polynomial{k}, Polynomial{1}}; }

}  // namespace

TEST_CASE("margins of third-order loops") {
    const FrequencyGrid g{1e-3, 1e3, 2000, {}};
    const BodeSeries den = bode_of(one, g);

    Margins m = compute_margins(bode_of(RationalFunction{Polynomial{10}, cube.num}, g), den);
    REQUIRE(m.phase_crossover_hz.size() == 1);
    CHECK(m.phase_crossover_hz[0] == doctest::Approx(std::sqrt(300.0) / two_pi).epsilon(1e-5));
    CHECK(m.GM_db == doctest::Approx(20.0 * std::log10(0.8)).epsilon(1e-4));
    CHECK(m.gm == doctest::Approx(0.8).epsilon(1e-4));
    // |ratio| = 1 where 1 + 0.01 w^2 = 10^(2/3)
    const double wg = std::sqrt((std::pow(10.0, 2.0 / 3.0) - 1.0) / 0.01);
    REQUIRE(m.gain_crossover_hz.size() == 1);
    CHECK(m.gain_crossover_hz[0] == doctest::Approx(wg / two_pi).epsilon(1e-5));
    CHECK(m.PM_deg == doctest::Approx(std::abs(180.0 - 3.0 * std::atan(0.1 * wg) * rad2deg)).epsilon(1e-4));

    m = compute_margins(bode_of(RationalFunction{Polynomial{2}, cube.num}, g), den);
    CHECK(m.GM_db == doctest::Approx(20.0 * std::log10(4.0)).epsilon(1e-4));
    const double wg2 = std::sqrt((std::pow(2.0, 2.0 / 3.0) - 1.0) / 0.01);
    CHECK(m.PM_deg == doctest::Approx(180.0 - 3.0 * std::atan(0.1 * wg2) * rad2deg).epsilon(1e-4));

    m = compute_margins(bode_of(constant(0.5), g), den);
    CHECK(std::isinf(m.GM_db));
    CHECK(std::isinf(m.PM_deg));
    CHECK(m.gain_crossover_hz.empty());
    CHECK(m.phase_crossover_hz.empty());

    try {
        (void)compute_margins(den, den, 2);
        FAIL("expected OpenLoopRhpPoles");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::open_loop_rhp_poles);
    }
}

TEST_CASE("mpc radius") {
    CHECK(mpc_radius(2.0) == doctest::Approx(0.5));
    CHECK(mpc_radius(1e12) == doctest::Approx(1.0));
    CHECK(mpc_radius(std::pow(10.0, 6.02 / 20.0)) == doctest::Approx(0.5).epsilon(1e-3));
    CHECK_THROWS_AS((void)mpc_radius(1.0), Error);
    CHECK_THROWS_AS((void)mpc_radius(0.5), Error);
    ForbiddenRegionSpec s{CriterionKind::mpc};
    s.GM_db = 20.0 * std::log10(2.0);
    CHECK(s.sensitivity_peak() == doctest::Approx(2.0));
}

TEST_CASE("pointwise criteria") {
    const FrequencyGrid g{1, 1e4, 200, {}};
    const BodeSeries z2 = bode_of(one, g);

    CriterionReport r = check_criterion({CriterionKind::small_gain}, bode_of(constant(std::pow(10.0, -0.5)), g), z2);
    CHECK(r.pass);
    CHECK(r.violations.empty());
    CHECK_FALSE(r.margins_valid);

    // second-order peak of -3 dB at about 100 Hz
    const double w0 = two_pi * 100.0;
    const double zeta = 0.1;
    const double k = std::pow(10.0, -3.0 / 20.0) * 2.0 * zeta * std::sqrt(1.0 - zeta * zeta);
    const RationalFunction peak{Polynomial{k * w0 * w0}, Polynomial{w0 * w0, 2 * zeta * w0, 1}};
    const BodeSeries z1 = bode_of(peak, g);
    r = check_criterion({CriterionKind::middlebrook, 6.0}, z1, z2);
    CHECK_FALSE(r.pass);
    REQUIRE(r.violations.size() == 1);
    const double f_peak = 100.0 * std::sqrt(1.0 - 2.0 * zeta * zeta);
    CHECK(r.violations[0].f_lo < f_peak);
    CHECK(r.violations[0].f_hi > f_peak);
    CHECK(check_criterion({CriterionKind::small_gain}, z1, z2).pass);
    CHECK(check_criterion({CriterionKind::middlebrook, 2.0}, z1, z2).pass);

    // GMPM forbids only the sector near 180 degrees: the same peak sits near -90 there
    CHECK(check_criterion({CriterionKind::gmpm, 6.0, 30.0}, z1, z2).pass);

    // ratio -0.6: left of -1/gm = -0.501
    const BodeSeries neg = bode_of(constant(-0.6), g);
    r = check_criterion({CriterionKind::opac, 6.0}, neg, z2);
    CHECK_FALSE(r.pass);
    REQUIRE(r.violations.size() == 1);
    CHECK(r.violations[0].f_lo == g.f_min);
    CHECK(r.violations[0].f_hi == doctest::Approx(g.f_max));
    REQUIRE_FALSE(r.opac_phi_deg.empty());
    CHECK(r.opac_phi_deg[0].second ==
          doctest::Approx(std::asin(1.0 / (std::pow(10.0, 0.3) * 0.6)) * rad2deg).epsilon(1e-9));
    CHECK(check_criterion({CriterionKind::opac, 6.0}, bode_of(constant(-0.4), g), z2).pass);
    CHECK(check_criterion({CriterionKind::nssc}, neg, z2).pass);
    // disc radius 1 - 1/gm = 0.499: |1 - 0.6| is inside, |1 - 0.4| is not
    CHECK_FALSE(check_criterion({CriterionKind::mpc, 6.0}, neg, z2).pass);
    CHECK(check_criterion({CriterionKind::mpc, 6.0}, bode_of(constant(-0.4), g), z2).pass);

    // boundary equality is a violation
    CHECK_FALSE(check_criterion({CriterionKind::small_gain}, z2, z2).pass);
}

TEST_CASE("nssc catches a crossing stepped over by the grid") {
    // 10/(0.1s+1)^3 crosses the axis at 2.757 Hz with |ratio| = 1.25
    const FrequencyGrid g{1e-2, 1e2, 20, {}};
    const CriterionReport r =
        check_criterion({CriterionKind::nssc}, bode_of(RationalFunction{Polynomial{10}, cube.num}, g), bode_of(one, g));
    CHECK_FALSE(r.pass);
    REQUIRE(r.violations.size() == 1);
    CHECK(r.violations[0].f_lo <= 2.757);
    CHECK(r.violations[0].f_hi >= 2.757);
}

TEST_CASE("spec validation") {
    ForbiddenRegionSpec s{CriterionKind::middlebrook, 0.0};
    CHECK_THROWS_AS(s.validate(), Error);
    s = {CriterionKind::gmpm, 6.0, 0.0};
    CHECK_THROWS_AS(s.validate(), Error);
    s = {CriterionKind::mpc, 6.0, 30.0, 0.9};
    CHECK_THROWS_AS(s.validate(), Error);
    CHECK(parse_criterion_kind("opac") == CriterionKind::opac);
    CHECK_THROWS_AS((void)parse_criterion_kind("esac"), Error);
    const BodeSeries a = bode_of(one, FrequencyGrid{1, 10, 10, {}});
    const BodeSeries b = bode_of(one, FrequencyGrid{1, 10, 20, {}});
    try {
        (void)check_criterion({CriterionKind::small_gain}, a, b);
        FAIL("expected GridMismatch");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::grid_mismatch);
    }
}

TEST_CASE("nssc on the stable case study") {
    ScenarioSpec spec;
    spec.scenario = Scenario::II;
    const ScenarioModels s = build_scenario(spec);
    const FrequencyGrid g{1, 1e5, 400, {}};
    const CriterionReport r = check_criterion({CriterionKind::nssc}, bode_of(*s.y_to1.exact, g),
                                              bode_of(*s.y_to2.exact, g));
    CHECK_FALSE(r.pass);
    REQUIRE(r.violations.size() == 2);
    CHECK(r.violations[0].f_lo <= 1405.3 * 1.01);
    CHECK(r.violations[0].f_hi >= 1405.3 * 0.99);
    CHECK(r.violations[1].f_lo <= 5479.2 * 1.01);
    CHECK(r.violations[1].f_hi >= 5479.2 * 0.99);
    CHECK(assess_stability(s.y_to1, s.y_to2).verdict == Verdict::stable);
}

TEST_CASE("nesting and sufficiency on random pairs") {
    Rng rng(23);
    int p0 = 0;
    for (int t = 0; t < 60; ++t) {
        const testing::SubsystemPair p = testing::random_subsystem_pair(rng, 4);
        const StabilityReport rep = assess_stability(SubsystemModel::from_exact(p.a, ResponseKind::impedance, "a"),
                                                     SubsystemModel::from_exact(p.b, ResponseKind::impedance, "b"));
        if (rep.P_open_loop != 0) continue;
        ++p0;
        const RationalFunction& z1 = rep.orientation.a_is_numerator ? p.a : p.b;
        const RationalFunction& z2 = rep.orientation.a_is_numerator ? p.b : p.a;
        const FrequencyGrid g{rep.f_min, rep.f_max, 200, {}};
        const BodeSeries b1 = bode_of(z1, g);
        const BodeSeries b2 = bode_of(z2, g);
        const bool stable = characteristic_roots_oracle(z1, z2).verdict == Verdict::stable;
        INFO("trial " << t);
        const bool mb6 = check_criterion({CriterionKind::middlebrook, 6.0}, b1, b2).pass;
        const bool mb3 = check_criterion({CriterionKind::middlebrook, 3.0}, b1, b2).pass;
        const bool sg = check_criterion({CriterionKind::small_gain}, b1, b2).pass;
        if (mb6) CHECK(mb3);
        if (mb3) CHECK(sg);
        for (const ForbiddenRegionSpec& s :
             {ForbiddenRegionSpec{CriterionKind::middlebrook, 6.0}, ForbiddenRegionSpec{CriterionKind::small_gain},
              ForbiddenRegionSpec{CriterionKind::gmpm, 6.0, 30.0}, ForbiddenRegionSpec{CriterionKind::opac, 6.0},
              ForbiddenRegionSpec{CriterionKind::nssc}}) {
            if (check_criterion(s, b1, b2).pass) CHECK(stable);
        }
    }
    CHECK(p0 >= 20);
}
