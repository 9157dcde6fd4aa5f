#include "impstab/freq.hpp"

#include <algorithm>
#include <cmath>

#include "impstab/error.hpp"

namespace impstab {

void FrequencyGrid::validate() const {
    if (!(f_min > 0.0) || !(f_max > f_min)) throw Error(ErrorCode::invalid_argument, "grid needs 0 < f_min < f_max");
    if (points_per_decade < 1) throw Error(ErrorCode::invalid_argument, "points_per_decade must be >= 1");
}

std::vector<double> FrequencyGrid::frequencies() const {
    validate();
    const double decades = std::log10(f_max / f_min);
    const auto n = static_cast<std::size_t>(std::ceil(decades * points_per_decade - 1e-9));
    std::vector<double> f;
    f.reserve(n + 1 + extra_points.size());
    for (std::size_t i = 0; i <= n; ++i) {
        f.push_back(i == n ? f_max : f_min * std::pow(10.0, decades * static_cast<double>(i) / static_cast<double>(n)));
    }
    for (double x : extra_points)
        if (x > f_min && x < f_max) f.push_back(x);
    std::sort(f.begin(), f.end());
    std::vector<double> out;
    out.reserve(f.size());
    for (double x : f)
        if (out.empty() || x > out.back() * (1.0 + 1e-12)) out.push_back(x);
    return out;
}

std::string_view to_string(ResponseKind k) {
    switch (k) {
        case ResponseKind::impedance: return "impedance";
        case ResponseKind::admittance: return "admittance";
        case ResponseKind::ratio: return "ratio";
        case ResponseKind::generic: return "generic";
    }
    return "generic";
}

ResponseKind parse_response_kind(std::string_view s) {
    if (s == "impedance") return ResponseKind::impedance;
    if (s == "admittance") return ResponseKind::admittance;
    if (s == "ratio") return ResponseKind::ratio;
    if (s == "generic") return ResponseKind::generic;
    throw Error(ErrorCode::invalid_argument, "unknown response kind: " + std::string(s));
}

SampledResponse::SampledResponse(std::vector<double> freqs, std::vector<cplx> values, std::string lbl, ResponseKind k)
    : f(std::move(freqs)), value(std::move(values)), label(std::move(lbl)), kind(k) {
    if (f.size() != value.size()) throw Error(ErrorCode::invalid_argument, "frequency/value length mismatch");
    for (std::size_t i = 0; i < f.size(); ++i) {
        if (!std::isfinite(f[i]) || !std::isfinite(value[i].real()) || !std::isfinite(value[i].imag()))
            throw Error(ErrorCode::non_finite, "non-finite sample at index " + std::to_string(i));
        if (i > 0 && !(f[i] > f[i - 1]))
            throw Error(ErrorCode::non_monotone_frequency, "frequencies not strictly increasing at index " + std::to_string(i));
    }
}

std::vector<double> BodeSeries::phase_wrapped_deg() const {
    std::vector<double> w(phase_deg.size());
    std::transform(phase_deg.begin(), phase_deg.end(), w.begin(), wrap_deg);
    return w;
}

double wrap_deg(double deg) {
    double w = std::fmod(deg, 360.0);
    if (w <= -180.0) w += 360.0;
    else if (w > 180.0) w -= 360.0;
    return w;
}

std::vector<double> unwrap_phase(std::span<const double> raw, std::vector<std::size_t>* ambiguous) {
    std::vector<double> out(raw.size());
    if (raw.empty()) return out;
    out[0] = wrap_deg(raw[0]);
    for (std::size_t i = 1; i < raw.size(); ++i) {
        const double step = wrap_deg(raw[i] - raw[i - 1]);
        if (ambiguous && std::abs(step) > 170.0) ambiguous->push_back(i);
        out[i] = out[i - 1] + step;
    }
    return out;
}

BodeSeries bode(const SampledResponse& r) {
    BodeSeries b;
    b.f = r.f;
    b.mag_db.resize(r.size());
    std::vector<double> raw(r.size());
    for (std::size_t i = 0; i < r.size(); ++i) {
        b.mag_db[i] = 20.0 * std::log10(std::abs(r.value[i]));
        raw[i] = std::arg(r.value[i]) * rad2deg;
    }
    b.phase_deg = unwrap_phase(raw, &b.ambiguous);
    return b;
}

SampledResponse evaluate_response(const RationalFunction& rf, std::span<const double> f_hz, ResponseKind kind,
                                  double axis_tol) {
    if (rf.den.degree() >= 1) {
        const RootSet rs = poly_roots(rf.den);
        for (const cplx& p : rs.roots) {
            const double tol = axis_tolerance(p, axis_tol);
            if (std::abs(p.real()) > tol) continue;
            const double w = std::abs(p.imag());
            const std::size_t i = bracket(f_hz, w / two_pi);
            for (std::size_t k = i; k <= std::min(i + 1, f_hz.size() - 1); ++k) {
                if (std::abs(two_pi * f_hz[k] - w) <= tol)
                    throw Error(ErrorCode::pole_on_grid, "pole on the imaginary axis at f = " + std::to_string(w / two_pi) + " Hz");
            }
        }
    }
    std::vector<cplx> v(f_hz.size());
    for (std::size_t i = 0; i < f_hz.size(); ++i) v[i] = rf(cplx{0.0, two_pi * f_hz[i]});
    return {std::vector<double>(f_hz.begin(), f_hz.end()), std::move(v), rf.label, kind};
}

SampledResponse evaluate_response(const RationalFunction& rf, const FrequencyGrid& grid, ResponseKind kind,
                                  double axis_tol) {
    const std::vector<double> f = grid.frequencies();
    return evaluate_response(rf, f, kind, axis_tol);
}

double phase_derivative(const RationalFunction& rf, double f_hz) {
    const cplx s{0.0, two_pi * f_hz};
    if (std::abs(rf(s)) < 1e-12) throw Error(ErrorCode::value_near_zero, "phase derivative undefined where |F| < 1e-12");
    // d(arg)/dw [rad per rad/s] * 2*pi [rad/s per Hz] * rad2deg
    return rf.log_derivative(s).real() * 360.0;
}

std::size_t bracket(std::span<const double> f, double x) {
    if (f.size() < 2) return 0;
    auto it = std::upper_bound(f.begin(), f.end(), x);
    std::size_t i = (it == f.begin()) ? 0 : static_cast<std::size_t>(it - f.begin()) - 1;
    return std::min(i, f.size() - 2);
}

double interp_logf(std::span<const double> f, std::span<const double> y, double x) {
    if (f.size() == 1) return y[0];
    const std::size_t i = bracket(f, x);
    const double t = std::log(x / f[i]) / std::log(f[i + 1] / f[i]);
    return y[i] + t * (y[i + 1] - y[i]);
}

double phase_derivative(const BodeSeries& b, double f_hz) {
    const std::size_t n = b.size();
    if (n < 2) throw Error(ErrorCode::invalid_argument, "need at least two samples for a derivative");
    if (f_hz < b.f.front() || f_hz > b.f.back()) throw Error(ErrorCode::invalid_argument, "frequency outside the grid span");
    auto nodal = [&](std::size_t i) {
        const std::size_t lo = (i == 0) ? 0 : i - 1;
        const std::size_t hi = (i + 1 == n) ? i : i + 1;
        return (b.phase_deg[hi] - b.phase_deg[lo]) / (b.f[hi] - b.f[lo]);
    };
    const std::size_t i = bracket(b.f, f_hz);
    const double t = (f_hz - b.f[i]) / (b.f[i + 1] - b.f[i]);
    return (1.0 - t) * nodal(i) + t * nodal(i + 1);
}

}  // namespace impstab
