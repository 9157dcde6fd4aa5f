#include <doctest.h>

#include <cmath>

#include "impstab/encircle.hpp"
#include "impstab/error.hpp"
#include "impstab/roots.hpp"
#include "random_systems.hpp"

using namespace impstab;
using impstab::testing::Rng;

namespace {

struct Run {
    std::vector<ExteriorRegion> regions;
    CrossingSearch search;
    EncirclementCount count;
};

Run run_exact(const RationalFunction& z1, const RationalFunction& z2, double f_lo, double f_hi) {
    const std::vector<double> f = adaptive_grid({&z1, &z2}, FrequencyGrid{f_lo, f_hi, 200, {}});
    const BodeSeries b1 = bode(evaluate_response(z1, f));
    const BodeSeries b2 = bode(evaluate_response(z2, f));
    const ExactPair ex{&z1, &z2};
    Run r;
    r.regions = exterior_regions(b1, b2, 1e-9, &ex);
    r.search = find_crossings(b1, b2, r.regions, 1.0, &ex);
    r.count = count_encirclements(r.search.crossings);
    return r;
}

Run run_sampled(const RationalFunction& z1, const RationalFunction& z2, double f_lo, double f_hi) {
    const FrequencyGrid g{f_lo, f_hi, 400, {}};
    const BodeSeries b1 = bode(evaluate_response(z1, g));
    const BodeSeries b2 = bode(evaluate_response(z2, g));
    Run r;
    r.regions = exterior_regions(b1, b2, 1e-9);
    r.search = find_crossings(b1, b2, r.regions, 1.0);
    r.count = count_encirclements(r.search.crossings);
    return r;
}

const RationalFunction unity{Polynomial{1}, Polynomial{1}};

}  // namespace

TEST_CASE("exterior regions") {
    // |j w + 1| >= 1 everywhere, so a unit Z1 never exceeds it
    const RationalFunction z2{Polynomial{1, 1}, Polynomial{1}};
    CHECK(run_exact(unity, z2, 1e-4, 1e2).regions.empty());
    const RationalFunction root2{Polynomial{std::sqrt(2.0)}, Polynomial{1}};
    const Run r = run_exact(root2, z2, 1e-4, 1e2);
    REQUIRE(r.regions.size() == 1);
    CHECK(r.regions[0].open_low);
    CHECK(r.regions[0].f_hi == doctest::Approx(1.0 / two_pi).epsilon(1e-9));

    const Run s = run_sampled(root2, z2, 1e-4, 1e2);
    REQUIRE(s.regions.size() == 1);
    CHECK(s.regions[0].f_hi == doctest::Approx(1.0 / two_pi).epsilon(1e-4));

    const RationalFunction small{Polynomial{0.1}, Polynomial{1}};
    CHECK(run_exact(small, unity, 1e-2, 1e2).regions.empty());

    const BodeSeries a = bode(evaluate_response(unity, FrequencyGrid{1, 10, 10, {}}));
    const BodeSeries b = bode(evaluate_response(unity, FrequencyGrid{1, 10, 20, {}}));
    CHECK_THROWS_AS((void)exterior_regions(a, b, 1e-9), Error);
}

TEST_CASE("third-order loop crosses once clockwise") {
    const RationalFunction l{Polynomial{10}, Polynomial{1, 0.3, 0.03, 0.001}};
    for (const Run& r : {run_exact(l, unity, 1e-3, 1e3), run_sampled(l, unity, 1e-3, 1e3)}) {
        REQUIRE(r.search.crossings.size() == 1);
        const Crossing& c = r.search.crossings[0];
        CHECK(c.kind == CrossingKind::cc);
        CHECK_FALSE(c.at_zero);
        CHECK(c.f == doctest::Approx(10.0 * std::tan(60.0 * 3.14159265358979 / 180.0) / two_pi).epsilon(1e-4));
        CHECK(c.phase_diff_deriv < 0);
        CHECK(r.count.N == 2);
        CHECK(r.search.marginal.empty());
    }
    CHECK(winding_number_oracle(l, FrequencyGrid{}) == 2);
}

TEST_CASE("crossings at w = 0") {
    const RationalFunction weak{Polynomial{0.5}, Polynomial{-1, 1}};
    CHECK(run_exact(weak, unity, 1e-3, 1e3).search.crossings.empty());
    CHECK(run_sampled(weak, unity, 1e-3, 1e3).search.crossings.empty());
    CHECK(winding_number_oracle(weak, FrequencyGrid{}) == 0);

    const RationalFunction strong{Polynomial{2}, Polynomial{-1, 1}};
    for (const Run& r : {run_exact(strong, unity, 1e-3, 1e3), run_sampled(strong, unity, 1e-3, 1e3)}) {
        REQUIRE(r.search.crossings.size() == 1);
        CHECK(r.search.crossings[0].at_zero);
        CHECK(r.search.crossings[0].kind == CrossingKind::acc);
        CHECK(r.count.N_ACC == 1);
        CHECK(r.count.N == -1);
    }
    CHECK(winding_number_oracle(strong, FrequencyGrid{}) == -1);
}

TEST_CASE("integrator in the ratio") {
    // L = -2/s: the indentation arc sweeps through the negative real axis
    const RationalFunction l{Polynomial{-2}, Polynomial{0, 1}};
    const Run r = run_exact(l, unity, 1e-3, 1e3);
    CHECK(r.count.n_cc0 == 1);
    CHECK(r.count.N == 1);
    CHECK(winding_number_oracle(l, FrequencyGrid{}) == 1);
    // closed loop s - 2: one RHP root, no open-loop RHP poles
    CHECK(count_rhp_roots(l.num + l.den).rhp == 1);

    const RationalFunction k{Polynomial{2}, Polynomial{0, 1, 1}};  // 2/(s(s+1)), stable loop
    CHECK(run_exact(k, unity, 1e-3, 1e3).count.N == 0);
    CHECK(winding_number_oracle(k, FrequencyGrid{}) == 0);
}

TEST_CASE("count_encirclements bookkeeping") {
    CHECK(count_encirclements({}).N == 0);
    Crossing z;
    z.at_zero = true;
    z.kind = CrossingKind::acc;
    const EncirclementCount a = count_encirclements({z});
    CHECK(a.N_ACC == 1);
    CHECK(a.N == -1);
    Crossing p;
    p.kind = CrossingKind::acc;
    const EncirclementCount b = count_encirclements({p, p});
    CHECK(b.n_acc == 2);
    CHECK(b.N_ACC == 4);
    CHECK(b.N == -4);
}

TEST_CASE("oracle errors") {
    CHECK_THROWS_AS((void)winding_number_oracle(RationalFunction{Polynomial{0, 0, 1}, Polynomial{1, 1}}, FrequencyGrid{}), Error);
    CHECK_THROWS_AS((void)winding_number_oracle(RationalFunction{Polynomial{1}, Polynomial{1, 0, 1}}, FrequencyGrid{}), Error);
    CHECK(winding_number_oracle(RationalFunction{Polynomial{0.5}, Polynomial{1, 1}}, FrequencyGrid{}) == 0);
}

TEST_CASE("argument principle on random proper ratios") {
    Rng rng(41);
    for (int t = 0; t < 60; ++t) {
        const int dd = rng.integer(1, 6);
        const int dn = rng.integer(0, dd);
        // proper orientation: a biproper ratio must stay inside the unit circle at infinity
        const double gain = (dn == dd ? rng.uniform(0.05, 0.95) : rng.log_uniform(0.1, 30.0)) * (rng.coin() ? 1 : -1);
        const RationalFunction ratio{testing::from_roots(testing::random_roots(rng, dn, 0.05), gain),
                                     testing::from_roots(testing::random_roots(rng, dd, 0.05))};
        const Polynomial chr = ratio.num + ratio.den;
        const RhpCount z = count_rhp_roots(chr);
        if (z.on_axis) continue;
        const int expected = z.rhp - count_rhp_roots(ratio.den).rhp;
        CHECK(winding_number_oracle(ratio, FrequencyGrid{}) == expected);
        // the Bode-pair tally agrees when the ratio is split as ratio / 1
        const Run r = run_exact(ratio, unity, 1e-4, 1e3);
        CHECK(r.search.marginal.empty());
        CHECK(r.count.N == expected);
    }
}
