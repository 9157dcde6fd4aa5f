#pragma once

#include <optional>
#include <string>

#include "impstab/freq.hpp"
#include "impstab/rational.hpp"
#include "impstab/subsystem.hpp"

namespace impstab {

// LCL-filtered, current-controlled inverter with PR control and a 1.5-sample delay.
struct InverterParams {
    double L1 = 1.8e-3;       // H, inverter-side inductor
    double L2 = 0.9e-3;       // H, grid-side inductor
    double Cf = 10e-6;        // F
    double Kp = 8.0;
    double Kr = 500.0;
    double omega1 = two_pi * 50.0;  // rad/s, fundamental (assumed 50 Hz)
    double omega_c = 3.14;          // rad/s, resonant bandwidth
    double fs = 10e3;               // Hz, sampling = switching
    double Vdc = 730.0;             // V, not used by the small-signal admittance

    void validate() const;
    [[nodiscard]] double delay() const { return 1.5 / fs; }
};

struct GridParams {
    double Lg = 1e-3;
    double Cg = 2e-6;
    double Vgrms_ll = 400.0;  // not used by the small-signal admittance
    void validate() const;
};

struct LoadParams {
    double Rd = 10.0;
    double Ld = 1e-3;
    void validate() const;
};

enum class Scenario { I = 1, II = 2 };

struct ScenarioSpec {
    Scenario scenario = Scenario::I;
    InverterParams inv1;
    InverterParams inv2;
    GridParams grid;
    LoadParams load;
};

// Building blocks, exposed for consistency checks.
[[nodiscard]] RationalFunction pr_controller(const InverterParams& p);
// Y_o and Y_m from the element impedances, composed without cancellation.
[[nodiscard]] RationalFunction filter_admittance_yo(const InverterParams& p);
[[nodiscard]] RationalFunction filter_admittance_ym(const InverterParams& p);

[[nodiscard]] RationalFunction build_inverter_admittance(const InverterParams& p);
[[nodiscard]] RationalFunction build_grid_admittance(const GridParams& p);
[[nodiscard]] RationalFunction build_load_admittance(const LoadParams& p);

[[nodiscard]] RationalFunction aggregate_parallel(const std::vector<RationalFunction>& admittances);

struct ScenarioModels {
    SubsystemModel y_to1;  // inverter 2 (plus the load in scenario II)
    SubsystemModel y_to2;  // inverter 1 plus the grid
};

[[nodiscard]] ScenarioModels build_scenario(const ScenarioSpec& spec);

}  // namespace impstab
