#pragma once

// Seeded generators shared by the unit and acceptance suites.

#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

#include "impstab/rational.hpp"

namespace impstab::testing {

// Monic-up-to-gain polynomial from a root list (conjugates must be listed once with imag > 0).
struct RootSpec {
    double re = 0.0;
    double im = 0.0;  // 0 means real root
};

inline Polynomial from_roots(const std::vector<RootSpec>& roots, double gain = 1.0) {
    Polynomial p{gain};
    for (const RootSpec& r : roots) {
        if (r.im == 0.0) p = p * Polynomial{-r.re, 1.0};
        else p = p * Polynomial{r.re * r.re + r.im * r.im, -2.0 * r.re, 1.0};
    }
    return p;
}

inline std::vector<cplx> expand(const std::vector<RootSpec>& roots) {
    std::vector<cplx> out;
    for (const RootSpec& r : roots) {
        out.emplace_back(r.re, r.im);
        if (r.im != 0.0) out.emplace_back(r.re, -r.im);
    }
    return out;
}

inline std::size_t order(const std::vector<RootSpec>& roots) { return expand(roots).size(); }

class Rng {
  public:
    explicit Rng(unsigned long long seed) : eng_(seed) {}
    double uniform(double a, double b) { return std::uniform_real_distribution<double>(a, b)(eng_); }
    int integer(int a, int b) { return std::uniform_int_distribution<int>(a, b)(eng_); }
    bool coin(double p = 0.5) { return uniform(0.0, 1.0) < p; }
    double log_uniform(double a, double b) { return std::exp(uniform(std::log(a), std::log(b))); }
    std::mt19937_64& engine() { return eng_; }

  private:
    std::mt19937_64 eng_;
};

// A root of magnitude w (rad/s): real, or a conjugate pair with damping zeta.
inline RootSpec make_root(double w, bool conj, double zeta, bool rhp) {
    const double sgn = rhp ? 1.0 : -1.0;
    if (!conj) return {sgn * w, 0.0};
    return {sgn * zeta * w, w * std::sqrt(1.0 - zeta * zeta)};
}

// Random polynomial whose roots all keep |Re| >= min_re.
inline std::vector<RootSpec> random_roots(Rng& rng, int degree, double min_re) {
    std::vector<RootSpec> roots;
    int left = degree;
    while (left > 0) {
        const double re_mag = rng.uniform(std::max(min_re, 0.05), 5.0);
        const double re = rng.coin() ? re_mag : -re_mag;
        if (left >= 2 && rng.coin()) {
            roots.push_back({re, rng.uniform(0.1, 5.0)});
            left -= 2;
        } else {
            roots.push_back({re, 0.0});
            left -= 1;
        }
    }
    return roots;
}

// Random dense rational with coefficients in [-10, 10].
inline RationalFunction random_dense_rational(Rng& rng, int max_deg) {
    auto poly = [&](int deg) {
        std::vector<double> c(static_cast<std::size_t>(deg) + 1);
        for (double& x : c) x = rng.uniform(-10.0, 10.0);
        if (c.back() == 0.0) c.back() = 1.0;
        return Polynomial(c);
    };
    return {poly(rng.integer(0, max_deg)), poly(rng.integer(0, max_deg))};
}

}  // namespace impstab::testing

namespace impstab::testing {

// Rational built from isolated breaks: 1..n_max elements, each a real or conjugate
// pole or zero in either half plane, successive breaks sep_lo..sep_hi decades apart.
struct BreakSystem {
    RationalFunction rf;
    double f_first = 0.0;  // Hz
    double f_last = 0.0;
    int rhp_poles = 0;
    int rhp_zeros = 0;
};

inline BreakSystem random_break_system(Rng& rng, double sep_lo, double sep_hi, int n_max) {
    const int n = rng.integer(1, n_max);
    double u = rng.uniform(0.0, 1.0);
    BreakSystem sys;
    sys.f_first = std::pow(10.0, u);
    Polynomial num{1.0};
    Polynomial den{1.0};
    for (int i = 0; i < n; ++i) {
        const bool conj = rng.coin();
        const double zeta = rng.uniform(0.2, 1.0);
        const bool zero = rng.coin();
        const bool rhp = rng.coin();
        const double w = 6.283185307179586 * std::pow(10.0, u);
        const RootSpec r = make_root(w, conj, zeta, rhp);
        // normalised so each factor is 1 at s = 0
        const Polynomial factor = conj ? (1.0 / (w * w)) * from_roots({r}) : (1.0 / w) * from_roots({r});
        (zero ? num : den) = (zero ? num : den) * factor;
        if (rhp) (zero ? sys.rhp_zeros : sys.rhp_poles) += conj ? 2 : 1;
        sys.f_last = std::pow(10.0, u);
        if (i + 1 < n) u += rng.uniform(sep_lo, sep_hi);
    }
    sys.rf = RationalFunction{num, den};
    return sys;
}

}  // namespace impstab::testing

namespace impstab::testing {

// Two subsystems with strictly stable poles (zeros in either half plane), total
// degree per polynomial <= max_deg, and every break at least sep_lo decades from
// the next one across both subsystems. Each factor is 1 at s = 0.
struct SubsystemPair {
    RationalFunction a;
    RationalFunction b;
    double f_first = 0.0;  // Hz, lowest break
    double f_last = 0.0;
};

inline SubsystemPair random_subsystem_pair(Rng& rng, int max_deg = 6, double sep_lo = 0.3, double sep_hi = 0.8,
                                           double p_rhp_zero = 0.3) {
    std::vector<Polynomial> polys(4, Polynomial{1.0});  // a.num, a.den, b.num, b.den
    std::vector<int> degs(4, 0);
    std::vector<int> target(4);
    for (int& t : target) t = rng.integer(0, max_deg);
    if (target[0] + target[1] + target[2] + target[3] == 0) target[1] = 1;
    double u = rng.uniform(0.0, 1.0);
    SubsystemPair out;
    out.f_first = std::pow(10.0, u);
    for (;;) {
        std::vector<int> open;
        for (int k = 0; k < 4; ++k)
            if (degs[k] < target[k]) open.push_back(k);
        if (open.empty()) break;
        const int k = open[static_cast<std::size_t>(rng.integer(0, static_cast<int>(open.size()) - 1))];
        const bool conj = target[k] - degs[k] >= 2 && rng.coin();
        const bool is_zero = k == 0 || k == 2;
        const bool rhp = is_zero && rng.coin(p_rhp_zero);
        const double w = 6.283185307179586 * std::pow(10.0, u);
        const RootSpec r = make_root(w, conj, conj ? rng.uniform(0.15, 0.9) : 1.0, rhp);
        polys[k] = polys[k] * ((conj ? 1.0 / (w * w) : 1.0 / w) * from_roots({r}));
        degs[k] += conj ? 2 : 1;
        out.f_last = std::pow(10.0, u);
        u += rng.uniform(sep_lo, sep_hi);
    }
    const double ga = rng.log_uniform(0.1, 10.0);
    const double gb = rng.log_uniform(0.1, 10.0);
    out.a = RationalFunction{ga * polys[0], polys[1]};
    out.b = RationalFunction{gb * polys[2], polys[3]};
    return out;
}

}  // namespace impstab::testing
