#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "impstab/encircle.hpp"
#include "impstab/freq.hpp"
#include "impstab/rhp_id.hpp"
#include "impstab/roots.hpp"
#include "impstab/subsystem.hpp"

namespace impstab {

enum class OrientationBasis { relative_degree, hf_slope, hf_magnitude, user_forced };
[[nodiscard]] std::string_view to_string(OrientationBasis b);

struct RatioOrientation {
    std::string numerator_id;
    std::string denominator_id;
    OrientationBasis basis = OrientationBasis::relative_degree;
    double hf_slope_num_db_dec = 0.0;
    double hf_slope_den_db_dec = 0.0;
    bool a_is_numerator = true;
};

enum class Verdict { stable, unstable, marginal, indeterminate };
[[nodiscard]] std::string_view to_string(Verdict v);  // "STABLE", ...
[[nodiscard]] Verdict parse_verdict(std::string_view s);

struct StabilityReport {
    RatioOrientation orientation;
    int P_open_loop = 0;
    EncirclementCount encirclements;
    std::vector<Crossing> crossings;
    std::vector<ExteriorRegion> regions;
    Verdict verdict = Verdict::indeterminate;
    std::map<std::string, Verdict> cross_checks;
    std::vector<std::string> evidence_notes;
    RhpCensus numerator_census;
    RhpCensus denominator_census;
    bool exact_mode = false;
    double f_min = 0.0;  // span actually analysed, Hz
    double f_max = 0.0;
};

struct AssessOptions {
    FrequencyGrid grid;
    double tol_deg = 1.0;
    double axis_tol = default_axis_tol;
    double refine_tol = 1e-9;
    BreakpointConfig breakpoint;
    // true: a is the numerator; false: b is. Bypasses the proper-ratio selection.
    std::optional<bool> force_a_numerator;
    bool cross_checks = true;
};

// Picks the orientation whose ratio is proper. grid is only used when an exact
// model has to be compared against a sampled one. Throws Ambiguous on a tie.
[[nodiscard]] RatioOrientation select_proper_ratio(const SubsystemModel& a, const SubsystemModel& b,
                                                   const FrequencyGrid& grid = {});

// The four-stage rule: orientation, open-loop RHP poles, encirclements, verdict.
// Exact mode (both exact models present) also runs the winding and root oracles.
[[nodiscard]] StabilityReport assess_stability(const SubsystemModel& a, const SubsystemModel& b,
                                               const AssessOptions& opts = {});

struct SumCriterionResult {
    Verdict verdict = Verdict::indeterminate;
    int rhp_zero_count = 0;
    int axis_zero_count = 0;
    int winding = 0;  // encirclements of the origin by Z1 + Z2, clockwise positive
};

// Z1 + Z2 has no RHP zeros. Throws PreconditionRhpPoles if a or b has RHP poles.
[[nodiscard]] SumCriterionResult impedance_sum_criterion(const RationalFunction& a, const RationalFunction& b,
                                                         double axis_tol = default_axis_tol);

struct CharacteristicRoots {
    RootSet roots;
    Verdict verdict = Verdict::indeterminate;
    bool hidden_mode_risk = false;  // the two denominators share a root that is not strictly stable
    std::vector<std::string> notes;
};

// Roots of num(a)·den(b) + num(b)·den(a): the closed-loop poles.
[[nodiscard]] CharacteristicRoots characteristic_roots_oracle(const RationalFunction& a, const RationalFunction& b,
                                                              double axis_tol = default_axis_tol);

}  // namespace impstab
