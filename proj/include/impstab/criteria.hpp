#pragma once

#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "impstab/freq.hpp"

namespace impstab {

struct Margins {
    double GM_db = 0.0;  // +inf without a phase crossover
    double gm = 0.0;     // 10^(GM_db/20)
    double PM_deg = 0.0;  // +inf without a gain crossover
    std::vector<double> gain_crossover_hz;
    std::vector<double> phase_crossover_hz;
};

// Gain and phase margins of Z1/Z2 read from the two Bode series. Classical margins
// only mean something without open-loop RHP poles, so p_open_loop > 0 throws OpenLoopRhpPoles.
[[nodiscard]] Margins compute_margins(const BodeSeries& b1, const BodeSeries& b2, int p_open_loop = 0);

enum class CriterionKind { middlebrook, small_gain, gmpm, opac, nssc, mpc };
[[nodiscard]] std::string_view to_string(CriterionKind k);
[[nodiscard]] CriterionKind parse_criterion_kind(std::string_view s);

struct ForbiddenRegionSpec {
    CriterionKind kind = CriterionKind::middlebrook;
    double GM_db = 6.0;   // middlebrook, gmpm, opac, and mpc when Ms is 0
    double PM_deg = 30.0;  // gmpm
    double Ms = 0.0;       // mpc; 0 derives it from GM_db
    double tol_deg = 1.0;  // nssc: how close to +-180 degrees counts as on the axis

    // Throws InvalidSpec.
    void validate() const;
    // Sensitivity peak used by mpc.
    [[nodiscard]] double sensitivity_peak() const;
};

struct Violation {
    double f_lo = 0.0;
    double f_hi = 0.0;
    std::string condition;
};

struct CriterionReport {
    CriterionKind kind = CriterionKind::middlebrook;
    bool pass = true;
    std::vector<Violation> violations;  // merged, ascending
    Margins margins;
    bool margins_valid = false;  // margins are filled only when the caller supplied P = 0
    std::vector<std::pair<double, double>> opac_phi_deg;  // (f, phi) where the arcsin is defined
};

// Pointwise check on the shared grid; touching a boundary counts as a violation.
// Throws GridMismatch and InvalidSpec. p_open_loop < 0 means unknown (margins omitted).
[[nodiscard]] CriterionReport check_criterion(const ForbiddenRegionSpec& spec, const BodeSeries& b1,
                                              const BodeSeries& b2, int p_open_loop = -1);

// Radius 1/Ms = 1 - 1/gm of the disc around -1. Throws for gm <= 1.
[[nodiscard]] double mpc_radius(double gm);

}  // namespace impstab
