#include <doctest.h>

#include <cmath>

#include "impstab/error.hpp"
#include "impstab/freq.hpp"
#include "random_systems.hpp"

using namespace impstab;
using impstab::testing::Rng;

TEST_CASE("grid construction") {
    const FrequencyGrid g{1.0, 1e5, 400, {2.5, 2.5, 7e5}};
    const auto f = g.frequencies();
    CHECK(f.front() == 1.0);
    CHECK(f.back() == 1e5);
    CHECK(f.size() == 2001 + 1);
    for (std::size_t i = 1; i < f.size(); ++i) CHECK(f[i] > f[i - 1]);
    CHECK_THROWS_AS((void)FrequencyGrid({10.0, 1.0, 400, {}}).frequencies(), Error);
    CHECK_THROWS_AS((void)FrequencyGrid({1.0, 10.0, 0, {}}).frequencies(), Error);
}

TEST_CASE("evaluate_response closed forms") {
    const FrequencyGrid g{1.0, 100.0, 10, {}};
    const SampledResponse one = evaluate_response(RationalFunction{}, g);
    for (const cplx& v : one.value) CHECK(v == cplx{1.0, 0.0});
    const BodeSeries bo = bode(one);
    for (std::size_t i = 0; i < bo.size(); ++i) {
        CHECK(bo.mag_db[i] == 0.0);
        CHECK(bo.phase_deg[i] == 0.0);
    }

    const double f0 = 1.0 / two_pi;
    const std::vector<double> fs{f0};
    const SampledResponse integ = evaluate_response(RationalFunction{Polynomial{1}, Polynomial{0, 1}}, fs);
    CHECK(std::abs(integ.value[0] - cplx{0, -1}) < 1e-15);
    const BodeSeries bi = bode(integ);
    CHECK(bi.mag_db[0] == doctest::Approx(0.0));
    CHECK(bi.phase_deg[0] == doctest::Approx(-90.0));

    const std::vector<double> low{1e-6};
    const SampledResponse yd = evaluate_response(RationalFunction{Polynomial{1}, Polynomial{10, 1e-3}}, low);
    CHECK(std::abs(yd.value[0] - 0.1) < 1e-9);
    CHECK(bode(yd).phase_deg[0] == doctest::Approx(0.0).epsilon(1e-6));
}

TEST_CASE("poles on the sampled axis are refused") {
    const RationalFunction lc{Polynomial{1}, Polynomial{1, 0, 1}};  // poles at +-j
    const std::vector<double> f{0.1, 1.0 / two_pi, 1.0};
    CHECK_THROWS_AS((void)evaluate_response(lc, f), Error);
    const std::vector<double> f_ok{0.1, 0.2, 1.0};
    CHECK_NOTHROW((void)evaluate_response(lc, f_ok));
}

TEST_CASE("unwrap_phase") {
    const std::vector<double> a{170, -175, -160};
    CHECK(unwrap_phase(a) == std::vector<double>{170, 185, 200});
    const std::vector<double> b{-90, -90};
    CHECK(unwrap_phase(b) == std::vector<double>{-90, -90});
    const std::vector<double> c{190, 200};
    CHECK(unwrap_phase(c)[0] == doctest::Approx(-170));

    std::vector<std::size_t> amb;
    const std::vector<double> d{0, 175};
    (void)unwrap_phase(d, &amb);
    CHECK(amb == std::vector<std::size_t>{1});

    const RationalFunction rf{Polynomial{1}, Polynomial{1, 3, 3, 1}};
    const BodeSeries bs = bode(evaluate_response(rf, FrequencyGrid{0.01 / two_pi, 100 / two_pi, 50, {}}));
    CHECK(bs.phase_deg.front() == doctest::Approx(-3.0 * std::atan(0.01) * rad2deg));
    CHECK(bs.phase_deg.back() == doctest::Approx(-3.0 * std::atan(100.0) * rad2deg));
    for (std::size_t i = 1; i < bs.size(); ++i) CHECK(bs.phase_deg[i] < bs.phase_deg[i - 1]);

    const auto once = unwrap_phase(bs.phase_deg);
    CHECK(unwrap_phase(once) == once);
}

TEST_CASE("analytic phase derivative") {
    const RationalFunction rf{Polynomial{1}, Polynomial{1, 1}};
    // -0.5 rad per rad/s at w = 1, in deg/Hz
    CHECK(phase_derivative(rf, 1.0 / two_pi) == doctest::Approx(-0.5 * two_pi * rad2deg));
    CHECK(phase_derivative(RationalFunction{Polynomial{3.0}, Polynomial{1.0}}, 12.0) == 0.0);
    CHECK_THROWS_AS((void)phase_derivative(RationalFunction{Polynomial{0, 1}, Polynomial{1}}, 0.0), Error);

    const double t = 1.5e-4;
    const RationalFunction d = pade_delay(t);
    for (double w = 1.0; w < 0.1 / t; w *= 1.5) {
        const double per_w = phase_derivative(d, w / two_pi) / (two_pi * rad2deg);
        CHECK(per_w == doctest::Approx(-t).epsilon(0.01));
    }
}

TEST_CASE("conjugate symmetry of evaluation") {
    Rng rng(17);
    for (int k = 0; k < 50; ++k) {
        const RationalFunction rf = testing::random_dense_rational(rng, 6);
        const double w = rng.log_uniform(0.01, 100.0);
        const cplx a = rf(cplx{0, w});
        const cplx b = rf(cplx{0, -w});
        CHECK(std::abs(a - std::conj(b)) <= 1e-12 * std::max(1.0, std::abs(a)));
    }
}

TEST_CASE("sampled derivative tracks the analytic one") {
    Rng rng(23);
    int checked = 0;
    int within = 0;
    for (int k = 0; k < 40; ++k) {
        const RationalFunction rf{testing::from_roots(testing::random_roots(rng, rng.integer(0, 3), 0.2)),
                                  testing::from_roots(testing::random_roots(rng, rng.integer(1, 3), 0.2))};
        const BodeSeries b = bode(evaluate_response(rf, FrequencyGrid{1e-3, 1e2, 200, {}}));
        for (std::size_t i = 5; i + 5 < b.size(); i += 37) {
            const double fm = std::sqrt(b.f[i] * b.f[i + 1]);
            const double exact = phase_derivative(rf, fm);
            if (std::abs(exact) < 1e-3) continue;
            ++checked;
            if (std::abs(phase_derivative(b, fm) - exact) <= 0.02 * std::abs(exact)) ++within;
        }
    }
    CHECK(checked > 100);
    CHECK(within == checked);
}
