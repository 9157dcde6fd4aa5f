#pragma once

#include <string>
#include <vector>

#include "impstab/freq.hpp"
#include "impstab/rational.hpp"

namespace impstab {

// Interval where |Z1| > |Z2|, i.e. the ratio lies outside the unit circle.
struct ExteriorRegion {
    double f_lo = 0.0;
    double f_hi = 0.0;
    bool open_low = false;   // touches the lowest sample
    bool open_high = false;  // touches the highest sample
};

enum class CrossingKind { cc, acc };
[[nodiscard]] std::string_view to_string(CrossingKind k);

struct Crossing {
    double f = 0.0;  // Hz; 0 for crossings at w = 0
    CrossingKind kind = CrossingKind::cc;
    bool at_zero = false;
    double phase_diff_deriv = 0.0;  // deg/Hz of (arg Z1 - arg Z2); -inf for the arc of a ratio pole at s = 0
    int boundary = 180;             // +180 or -180: which shifted copy of arg Z1 was met
    double f_uncertainty = 0.0;     // Hz, sampled mode only
};

struct EncirclementCount {
    int n_cc = 0;
    int n_cc0 = 0;
    int n_acc = 0;
    int n_acc0 = 0;
    int N_CC = 0;
    int N_ACC = 0;
    int N = 0;
};

// Exact models behind two Bode series; enables bisection and analytic derivatives.
struct ExactPair {
    const RationalFunction* z1 = nullptr;
    const RationalFunction* z2 = nullptr;
};

struct CrossingSearch {
    std::vector<Crossing> crossings;     // ascending f
    std::vector<std::string> marginal;  // reasons the count cannot be trusted; empty when clean
};

inline constexpr double tangency_threshold_deg_per_hz = 1e-4;

// Throws GridMismatch unless b1 and b2 share the same frequencies.
[[nodiscard]] std::vector<ExteriorRegion> exterior_regions(const BodeSeries& b1, const BodeSeries& b2, double refine_tol,
                                                           const ExactPair* exact = nullptr);

// Crossings of arg Z1 - arg Z2 through 180 + k*360 inside the regions, including the
// w = 0 analysis for regions that reach down to the lowest sample.
[[nodiscard]] CrossingSearch find_crossings(const BodeSeries& b1, const BodeSeries& b2,
                                            const std::vector<ExteriorRegion>& regions, double tol_deg,
                                            const ExactPair* exact = nullptr);

[[nodiscard]] EncirclementCount count_encirclements(const std::vector<Crossing>& crossings);

// Winding of 1 + ratio(jw) around the origin over the full Nyquist contour,
// clockwise positive. grid only seeds the frequency span; the integration adapts.
[[nodiscard]] int winding_number_oracle(const RationalFunction& ratio, const FrequencyGrid& grid);

// Log grid refined until neither function's phase moves more than max_step_deg,
// nor its log-magnitude more than max_step_db, between neighbouring points.
[[nodiscard]] std::vector<double> adaptive_grid(const std::vector<const RationalFunction*>& fns,
                                                const FrequencyGrid& base, double max_step_deg = 5.0,
                                                double max_step_db = 1.0);

}  // namespace impstab
