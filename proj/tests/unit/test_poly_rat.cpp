#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "impstab/error.hpp"
#include "impstab/freq.hpp"
#include "impstab/rational.hpp"
#include "impstab/roots.hpp"
#include "random_systems.hpp"

using namespace impstab;
using impstab::testing::Rng;

namespace {

bool contains_root(const RootSet& rs, cplx r, double tol) {
    return std::any_of(rs.roots.begin(), rs.roots.end(), [&](cplx x) { return std::abs(x - r) <= tol; });
}

}  // namespace

TEST_CASE("polynomial basics") {
    const Polynomial p{1.0, 2.0, 0.0, 0.0};
    CHECK(p.degree() == 1);
    CHECK(Polynomial{}.is_zero());
    CHECK(Polynomial{0.0, 0.0}.is_zero());
    CHECK((Polynomial{1, 1} * Polynomial{-1, 1}) == Polynomial{-1, 0, 1});
    CHECK((Polynomial{1, 2, 3}.derivative()) == Polynomial{2, 6});
    CHECK(Polynomial{0, 0, 3}.origin_multiplicity() == 2);
    CHECK(Polynomial{2, 0, 1}(cplx{0, 1}) == cplx{1, 0});
    CHECK_THROWS_AS(Polynomial({1.0, NAN}), Error);
}

TEST_CASE("poly_roots on small closed forms") {
    const RootSet a = poly_roots(Polynomial{1, 0, 1});
    REQUIRE(a.roots.size() == 2);
    CHECK(contains_root(a, {0, 1}, 1e-12));
    CHECK(contains_root(a, {0, -1}, 1e-12));

    const RootSet b = poly_roots(Polynomial{-1, 1});
    REQUIRE(b.roots.size() == 1);
    CHECK(b.roots[0] == cplx{1, 0});

    CHECK_THROWS_AS((void)poly_roots(Polynomial{3.0}), Error);
    CHECK_THROWS_AS((void)poly_roots(Polynomial{}), Error);

    const RootSet c = poly_roots(Polynomial{0, 0, 1, 1});  // s^2 (s + 1)
    REQUIRE(c.roots.size() == 3);
    CHECK(std::count(c.roots.begin(), c.roots.end(), cplx{0, 0}) == 2);
}

TEST_CASE("poly_roots reproduces planted roots across wide magnitude spans") {
    Rng rng(11);
    for (int trial = 0; trial < 200; ++trial) {
        std::vector<testing::RootSpec> spec;
        const int deg = rng.integer(1, 12);
        while (static_cast<int>(testing::order(spec)) < deg) {
            const double w = std::pow(10.0, rng.uniform(0.0, 5.0));
            const bool conj = deg - static_cast<int>(testing::order(spec)) >= 2 && rng.coin();
            spec.push_back(testing::make_root(w, conj, rng.uniform(0.05, 1.0), rng.coin()));
        }
        const Polynomial p = testing::from_roots(spec, rng.uniform(0.1, 10.0));
        const RootSet rs = poly_roots(p);
        REQUIRE(rs.roots.size() == static_cast<std::size_t>(p.degree()));
        for (const cplx& r : rs.roots) CHECK(std::abs(p(r)) / p.abs_scale(r) <= 1e-8);
        for (const cplx& r : testing::expand(spec)) CHECK(contains_root(rs, r, 1e-6 * std::abs(r)));
        // conjugate closure
        for (const cplx& r : rs.roots) CHECK(contains_root(rs, std::conj(r), 1e-8 * std::max(1.0, std::abs(r))));
    }
}

TEST_CASE("count_rhp_roots") {
    const RhpCount a = count_rhp_roots(Polynomial{-1, 1} * Polynomial{2, 1}, 1e-9);
    CHECK(a.rhp == 1);
    CHECK(a.on_axis == 0);
    const RhpCount b = count_rhp_roots(Polynomial{0, 1} * Polynomial{1, 1}, 1e-9);
    CHECK(b.rhp == 0);
    CHECK(b.on_axis == 1);
    const RhpCount c = count_rhp_roots(Polynomial{11, 0.3, 0.03, 0.001});
    CHECK(c.rhp == 2);
    CHECK(c.rhp + c.on_axis + c.lhp == 3);
}

TEST_CASE("routh_rhp_count closed forms") {
    CHECK(routh_rhp_count(Polynomial{1, 2, 1}).rhp == 0);
    CHECK(routh_rhp_count(Polynomial{11, 1, 1, 1}).rhp == 2);
    CHECK(routh_rhp_count(Polynomial{11, 0.3, 0.03, 0.001}).rhp == 2);
    // s^4 + s^3 + 2 s^2 + 2 s + 3: zero in the first column, epsilon substitution gives 2
    CHECK(routh_rhp_count(Polynomial{3, 2, 2, 1, 1}).rhp == 2);
    // (s^2 + 1)(s + 1) has an all-zero row with auxiliary polynomial s^2 + 1
    const RouthResult r = routh_rhp_count(Polynomial{1, 1} * Polynomial{1, 0, 1});
    CHECK(r.indeterminate);
    CHECK(r.aux_degree == 2);
}

TEST_CASE("routh_rhp_count agrees with the root finder on 500 random polynomials") {
    Rng rng(7);
    int agree = 0;
    for (int trial = 0; trial < 500; ++trial) {
        const auto spec = testing::random_roots(rng, rng.integer(1, 8), 1e-3);
        const Polynomial p = testing::from_roots(spec, rng.uniform(0.5, 2.0));
        const int planted = static_cast<int>(std::count_if(spec.begin(), spec.end(), [](auto r) { return r.re > 0; }) +
                                             std::count_if(spec.begin(), spec.end(), [](auto r) { return r.re > 0 && r.im != 0; }));
        const RouthResult rr = routh_rhp_count(p);
        REQUIRE_FALSE(rr.indeterminate);
        if (rr.rhp == count_rhp_roots(p).rhp && rr.rhp == planted) ++agree;
    }
    CHECK(agree == 500);
}

TEST_CASE("rat_arith is uncancelled and matches pointwise arithmetic") {
    const RationalFunction h{Polynomial{1}, Polynomial{1, 1}};
    const RationalFunction sum = h + h;
    CHECK(sum.num == Polynomial{2, 2});
    CHECK(sum.den == Polynomial{1, 2, 1});

    const RationalFunction q = RationalFunction{Polynomial{1, 1}, Polynomial{1}} / RationalFunction{Polynomial{2, 1}, Polynomial{1}};
    CHECK(q.num == Polynomial{1, 1});
    CHECK(q.den == Polynomial{2, 1});

    const RationalFunction cg{Polynomial{0, 2e-6}, Polynomial{1}};
    const RationalFunction lg{Polynomial{1}, Polynomial{0, 1e-3}};
    const RationalFunction yg = cg + lg;
    CHECK(yg.num == Polynomial{1, 0, 2e-9});
    CHECK(yg.den == Polynomial{0, 1e-3});

    CHECK_THROWS_AS((void)(h / RationalFunction{Polynomial{}, Polynomial{1}}), Error);

    Rng rng(3);
    for (int trial = 0; trial < 200; ++trial) {
        const RationalFunction a = testing::random_dense_rational(rng, 6);
        const RationalFunction b = testing::random_dense_rational(rng, 6);
        for (int k = 0; k < 50; ++k) {
            const cplx s{0.0, rng.log_uniform(1e-2, 1e2)};
            const cplx va = a(s);
            const cplx vb = b(s);
            auto close = [](cplx x, cplx y) { return std::abs(x - y) <= 1e-9 * std::max(1.0, std::abs(y)); };
            CHECK(close((a + b)(s), va + vb));
            CHECK(close((a - b)(s), va - vb));
            CHECK(close((a * b)(s), va * vb));
            CHECK(close((a / b)(s), va / vb));
            CHECK(close(reciprocal(a)(s), 1.0 / va));
        }
    }
}

TEST_CASE("pade_delay coefficients and all-pass property") {
    const RationalFunction one = pade_delay(0.0);
    CHECK(one.num == Polynomial{1});
    CHECK(one.den == Polynomial{1});
    CHECK_THROWS_AS((void)pade_delay(-1.0), Error);

    const double t = 1.5e-4;
    const RationalFunction g = pade_delay(t);
    REQUIRE(g.den.degree() == 3);
    CHECK(g.den[0] == 1.0);
    CHECK(g.den[1] == doctest::Approx(7.5e-5).epsilon(1e-15));
    CHECK(g.den[2] == doctest::Approx(2.8125e-9).epsilon(1e-15));
    CHECK(g.den[3] == doctest::Approx(7.03125e-14).epsilon(1e-15));
    for (std::size_t k = 0; k < 4; ++k) CHECK(g.num[k] == (k % 2 ? -g.den[k] : g.den[k]));

    const FrequencyGrid grid{1.0, 1e6, 200, {}};
    double worst = 0.0;
    for (double f : grid.frequencies()) worst = std::max(worst, std::abs(std::abs(g(cplx{0, two_pi * f})) - 1.0));
    CHECK(worst <= 1e-12);
}
