#pragma once

#include <algorithm>
#include <vector>

#include "impstab/polynomial.hpp"

namespace impstab {

struct RootSet {
    std::vector<cplx> roots;  // sorted by (real, imag)
    double cluster_tol = 0.0;
    [[nodiscard]] double max_magnitude() const;
};

// Companion-matrix eigenvalues on a rescaled variable, one Newton pass per root,
// then conjugate pairing. Throws ErrorCode::no_roots for constant polynomials.
[[nodiscard]] RootSet poly_roots(const Polynomial& p);

inline constexpr double default_axis_tol = 1e-6;

// Distance from the imaginary axis below which r counts as on it: axis_tol
// relative to |r| once |r| exceeds 1, since root accuracy is relative.
[[nodiscard]] inline double axis_tolerance(cplx r, double axis_tol = default_axis_tol) {
    return axis_tol * std::max(1.0, std::abs(r));
}

struct RhpCount {
    int rhp = 0;
    int on_axis = 0;
    int lhp = 0;
};

[[nodiscard]] RhpCount count_rhp_roots(const RootSet& rs, double axis_tol = default_axis_tol);
[[nodiscard]] RhpCount count_rhp_roots(const Polynomial& p, double axis_tol = default_axis_tol);

struct RouthResult {
    int rhp = 0;
    bool indeterminate = false;  // an all-zero row appeared
    int aux_degree = 0;          // degree of the auxiliary polynomial when indeterminate
};

// Sign changes in the first Routh column, epsilon substitution for isolated zeros.
[[nodiscard]] RouthResult routh_rhp_count(const Polynomial& p);

}  // namespace impstab
