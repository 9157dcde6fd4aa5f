#include "impstab/error.hpp"

namespace impstab {

std::string_view to_string(ErrorCode code) {
    switch (code) {
        case ErrorCode::invalid_argument: return "InvalidArgument";
        case ErrorCode::no_roots: return "NoRoots";
        case ErrorCode::divisor_zero: return "DivisorZero";
        case ErrorCode::pole_on_grid: return "PoleOnGrid";
        case ErrorCode::value_near_zero: return "ValueNearZero";
        case ErrorCode::grid_too_sparse: return "GridTooSparse";
        case ErrorCode::grid_mismatch: return "GridMismatch";
        case ErrorCode::non_proper_ratio: return "NonProperRatio";
        case ErrorCode::pole_on_axis: return "PoleOnAxis";
        case ErrorCode::ambiguous_orientation: return "Ambiguous";
        case ErrorCode::precondition_rhp_poles: return "PreconditionRhpPoles";
        case ErrorCode::open_loop_rhp_poles: return "OpenLoopRhpPoles";
        case ErrorCode::invalid_spec: return "InvalidSpec";
        case ErrorCode::parse_error: return "ParseError";
        case ErrorCode::non_monotone_frequency: return "NonMonotoneFrequency";
        case ErrorCode::non_finite: return "NonFinite";
        case ErrorCode::io_error: return "IoError";
    }
    return "Unknown";
}

}  // namespace impstab
