#include <algorithm>
#include <cmath>
#include <vector>

#include "impstab/encircle.hpp"
#include "impstab/error.hpp"
#include "impstab/roots.hpp"

namespace impstab {
namespace {

constexpr double pi = 3.14159265358979323846;

// Sum of wrapped argument increments of F over [wa, wb], bisecting until each
// step turns by less than 0.2 rad and changes |F| by less than a factor of 2.
class ArgIntegrator {
  public:
    explicit ArgIntegrator(const RationalFunction& ratio) : ratio_(ratio) {}

    cplx f(double w) const { return 1.0 + ratio_(cplx{0.0, w}); }

    double integrate(double wa, double wb) const {
        double total = 0.0;
        step(wa, f(wa), wb, f(wb), 0, total);
        return total;
    }

  private:
    void step(double wa, cplx fa, double wb, cplx fb, int depth, double& total) const {
        const double d = std::arg(fb / fa);
        const double r = std::abs(std::log(std::abs(fb) / std::abs(fa)));
        if (depth < 60 && (std::abs(d) > 0.2 || r > std::log(2.0))) {
            const double wm = (wa > 0.0 && wb / wa > 1.5) ? std::sqrt(wa * wb) : 0.5 * (wa + wb);
            const cplx fm = f(wm);
            step(wa, fa, wm, fm, depth + 1, total);
            step(wm, fm, wb, fb, depth + 1, total);
            return;
        }
        total += d;
    }

    const RationalFunction& ratio_;
};

}  // namespace

int winding_number_oracle(const RationalFunction& ratio, const FrequencyGrid& grid) {
    if (ratio.num.degree() > ratio.den.degree()) throw Error(ErrorCode::non_proper_ratio, "ratio is not proper");

    double w_min_root = std::numeric_limits<double>::infinity();
    double w_max_root = 0.0;
    auto scan = [&](const Polynomial& p) {
        if (p.degree() < 1) return RootSet{};
        RootSet rs = poly_roots(p);
        for (const cplx& r : rs.roots) {
            const double a = std::abs(r);
            if (a == 0.0) continue;
            w_min_root = std::min(w_min_root, a);
            w_max_root = std::max(w_max_root, a);
        }
        return rs;
    };
    (void)scan(ratio.num);
    const RootSet poles = scan(ratio.den);
    for (const cplx& p : poles.roots) {
        const double tol = axis_tolerance(p);
        if (std::abs(p.real()) <= tol && std::abs(p) > tol)
            throw Error(ErrorCode::pole_on_axis, "ratio has a pole on the imaginary axis away from s = 0");
    }
    const Polynomial chr = ratio.num + ratio.den;
    if (chr.degree() >= 1) {
        const RootSet zs = poly_roots(chr);
        for (const cplx& z : zs.roots)
            if (std::abs(z.real()) <= axis_tolerance(z))
                throw Error(ErrorCode::value_near_zero, "1 + ratio vanishes on the imaginary axis");
    }

    if (!std::isfinite(w_min_root)) w_min_root = 1.0;
    if (w_max_root == 0.0) w_max_root = 1.0;
    // 100x the largest break, pushed out until |ratio| has settled near its limit.
    double w_max = std::max(100.0 * w_max_root, two_pi * grid.f_max);
    const double lim = ratio.num.degree() == ratio.den.degree() ? ratio.num.leading() / ratio.den.leading() : 0.0;
    for (int k = 0; k < 20 && std::abs(ratio(cplx{0.0, w_max}) - lim) > 1e-3 * std::max(1.0, std::abs(lim)); ++k)
        w_max *= 10.0;

    const int m = ratio.den.origin_multiplicity() - ratio.num.origin_multiplicity();
    const ArgIntegrator integ(ratio);

    double w_start = 0.0;
    double indent = 0.0;
    if (m > 0) {
        w_start = 1e-3 * w_min_root;
        for (int k = 0; k < 60 && std::abs(ratio(cplx{0.0, w_start})) < 1e6; ++k) w_start /= 10.0;
        // right indentation: from arg F(-j eps) = -a to arg F(j eps) = a, a half turn
        // clockwise per pole order
        const double a = std::arg(integ.f(w_start));
        const double target = -m * pi;
        const double k = std::round((2.0 * a - target) / (2.0 * pi));
        indent = 2.0 * a - 2.0 * pi * k;
    }

    double positive = 0.0;
    double w_lo = w_start;
    if (w_start == 0.0) {
        w_lo = 1e-3 * w_min_root;
        positive += integ.integrate(0.0, w_lo);
    }
    // log sweep at 50 points per decade, then a tail out to 1e4 * w_max
    const double w_end = 1e4 * w_max;
    const int n = static_cast<int>(std::ceil(50.0 * std::log10(w_end / w_lo)));
    double wa = w_lo;
    for (int i = 1; i <= n; ++i) {
        const double wb = w_lo * std::pow(w_end / w_lo, static_cast<double>(i) / n);
        positive += integ.integrate(wa, wb);
        wa = wb;
    }

    const double total = 2.0 * positive + indent;
    const double turns = total / (2.0 * pi);
    const double rounded = std::round(turns);
    if (std::abs(turns - rounded) > 0.1)
        throw Error(ErrorCode::value_near_zero, "winding did not close to an integer (" + std::to_string(turns) + ")");
    return -static_cast<int>(rounded);
}

}  // namespace impstab
