#pragma once

#include <optional>
#include <string>
#include <vector>

#include "impstab/freq.hpp"
#include "impstab/rational.hpp"

namespace impstab {

enum class BreakKind { real_pole, real_zero, conj_pole, conj_zero };
enum class HalfPlane { lhp, rhp, undetermined };
[[nodiscard]] std::string_view to_string(BreakKind k);
[[nodiscard]] std::string_view to_string(HalfPlane h);

struct BreakPoint {
    double f_b = 0.0;
    BreakKind kind = BreakKind::real_pole;
    HalfPlane half_plane = HalfPlane::undetermined;
    double slope_change_db_dec = 0.0;
    double phase_step_deg = 0.0;
    std::optional<double> zeta_est;
    bool resonance = false;  // peak or dip more than 3 dB away from the asymptotes
    std::string note;        // why the half plane is undetermined, if it is
};

struct BreakpointConfig {
    double window_decades = 0.5;
    double slope_tol_db_dec = 6.0;
    double phase_step_tol_deg = 30.0;
    double min_points_per_decade = 100.0;
    double edge_margin_decades = 1.0;
    double max_fit_rms = 0.05;       // joint residual of the asymptote fit, dB-equivalent
    double amplitude_purity = 0.05;  // allowed relative offset from 20k dB/dec and 90k degrees
};

// Fits first/second-order asymptote shapes to the magnitude and phase jointly and
// classifies each break by the signs of its slope change and phase step.
// Throws GridTooSparse below cfg.min_points_per_decade.
[[nodiscard]] std::vector<BreakPoint> identify_breakpoints(const BodeSeries& b, const BreakpointConfig& cfg = {});

enum class CensusSource { exact, bode_heuristic };
[[nodiscard]] std::string_view to_string(CensusSource s);

struct RhpCensus {
    int rhp_poles = 0;
    int rhp_zeros = 0;
    int on_axis_poles = 0;
    int on_axis_zeros = 0;
    bool determined = true;  // false: heuristic could not classify every break, counts are not claimed
    CensusSource source = CensusSource::exact;
    std::vector<BreakPoint> breaks;
    std::vector<cplx> rhp_pole_roots;
    std::vector<cplx> rhp_zero_roots;
};

[[nodiscard]] RhpCensus census(const RationalFunction& rf, double axis_tol = default_axis_tol);
[[nodiscard]] RhpCensus census(const BodeSeries& b, const BreakpointConfig& cfg = {});

// P[Z1/Z2] = P[Z1] + Z[Z2]. Throws invalid_argument for undetermined censuses.
[[nodiscard]] int open_loop_rhp_poles(const RhpCensus& num_census, const RhpCensus& den_census);

}  // namespace impstab
