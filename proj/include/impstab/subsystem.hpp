#pragma once

#include <optional>
#include <string>

#include "impstab/freq.hpp"
#include "impstab/rational.hpp"

namespace impstab {

// One side of the interconnection: an exact model, a measured response, or both.
struct SubsystemModel {
    std::optional<RationalFunction> exact;
    std::optional<SampledResponse> sampled;
    ResponseKind kind = ResponseKind::impedance;
    std::string id;

    [[nodiscard]] static SubsystemModel from_exact(RationalFunction rf, ResponseKind kind, std::string id);
    [[nodiscard]] static SubsystemModel from_sampled(SampledResponse r, ResponseKind kind, std::string id);

    // Needs at least one representation; when both exist they must agree within 0.1 dB and 1 degree.
    void validate() const;
};

}  // namespace impstab
