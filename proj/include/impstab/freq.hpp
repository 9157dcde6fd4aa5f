#pragma once

#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "impstab/rational.hpp"
#include "impstab/roots.hpp"

namespace impstab {

inline constexpr double two_pi = 6.283185307179586476925286766559;
inline constexpr double rad2deg = 57.295779513082320876798154814105;

struct FrequencyGrid {
    double f_min = 1.0;
    double f_max = 1e5;
    int points_per_decade = 400;
    std::vector<double> extra_points;

    void validate() const;
    // Log-spaced points with both endpoints, merged with extra_points inside the span.
    [[nodiscard]] std::vector<double> frequencies() const;
};

enum class ResponseKind { impedance, admittance, ratio, generic };
[[nodiscard]] std::string_view to_string(ResponseKind k);
[[nodiscard]] ResponseKind parse_response_kind(std::string_view s);

struct SampledResponse {
    std::vector<double> f;  // Hz, strictly increasing
    std::vector<cplx> value;
    std::string label;
    ResponseKind kind = ResponseKind::generic;

    SampledResponse() = default;
    SampledResponse(std::vector<double> freqs, std::vector<cplx> values, std::string lbl, ResponseKind k);
    [[nodiscard]] std::size_t size() const { return f.size(); }
};

struct BodeSeries {
    std::vector<double> f;
    std::vector<double> mag_db;
    std::vector<double> phase_deg;  // unwrapped
    std::vector<std::size_t> ambiguous;  // i where the step from i-1 to i exceeded 170 degrees

    [[nodiscard]] std::size_t size() const { return f.size(); }
    [[nodiscard]] std::vector<double> phase_wrapped_deg() const;
};

// Wrap to (-180, 180].
[[nodiscard]] double wrap_deg(double deg);

[[nodiscard]] std::vector<double> unwrap_phase(std::span<const double> raw_deg,
                                               std::vector<std::size_t>* ambiguous = nullptr);

[[nodiscard]] BodeSeries bode(const SampledResponse& r);

// Throws PoleOnGrid when a denominator root sits within axis_tol of a sampled jw.
[[nodiscard]] SampledResponse evaluate_response(const RationalFunction& rf, std::span<const double> f_hz,
                                                ResponseKind kind = ResponseKind::generic,
                                                double axis_tol = default_axis_tol);
[[nodiscard]] SampledResponse evaluate_response(const RationalFunction& rf, const FrequencyGrid& grid,
                                                ResponseKind kind = ResponseKind::generic,
                                                double axis_tol = default_axis_tol);

// d(arg F)/df in deg/Hz.
[[nodiscard]] double phase_derivative(const RationalFunction& rf, double f_hz);
[[nodiscard]] double phase_derivative(const BodeSeries& b, double f_hz);

// Index i with f[i] <= x < f[i+1] (clamped to the last interval).
[[nodiscard]] std::size_t bracket(std::span<const double> f, double x);
// Linear interpolation in log f.
[[nodiscard]] double interp_logf(std::span<const double> f, std::span<const double> y, double x);

}  // namespace impstab
