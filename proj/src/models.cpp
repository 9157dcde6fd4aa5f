#include "impstab/models.hpp"

#include <cmath>

#include "impstab/error.hpp"

namespace impstab {
namespace {

void require(bool ok, const char* what) {
    if (!ok) throw Error(ErrorCode::invalid_argument, what);
}

RationalFunction poly_rf(Polynomial p, std::string label = {}) { return {std::move(p), Polynomial{1.0}, std::move(label)}; }

}  // namespace

void InverterParams::validate() const {
    require(L1 > 0 && L2 > 0 && Cf > 0, "inverter filter elements must be positive");
    // Zero controller gains are allowed so the passive limit can be studied.
    require(Kp >= 0 && Kr >= 0, "controller gains must be non-negative");
    require(omega1 > 0 && omega_c > 0 && fs > 0, "omega1, omega_c and fs must be positive");
}

void GridParams::validate() const { require(Lg > 0 && Cg >= 0, "grid needs Lg > 0 and Cg >= 0"); }

void LoadParams::validate() const { require(Rd > 0 && Ld >= 0, "load needs Rd > 0 and Ld >= 0"); }

RationalFunction pr_controller(const InverterParams& p) {
    const RationalFunction kp = poly_rf(Polynomial{p.Kp});
    const RationalFunction res{Polynomial{0.0, 2.0 * p.Kr * p.omega_c},
                               Polynomial{p.omega1 * p.omega1, 2.0 * p.omega_c, 1.0}};
    RationalFunction gc = kp + res;
    gc.label = "Gc";
    return gc;
}

namespace {

struct Elements {
    RationalFunction zl1, zl2, zcf;
};

Elements elements(const InverterParams& p) {
    return {poly_rf(Polynomial{0.0, p.L1}), poly_rf(Polynomial{0.0, p.L2}),
            RationalFunction{Polynomial{1.0}, Polynomial{0.0, p.Cf}}};
}

RationalFunction filter_delta(const Elements& e) { return e.zcf * e.zl1 + e.zl1 * e.zl2 + e.zcf * e.zl2; }

}  // namespace

RationalFunction filter_admittance_yo(const InverterParams& p) {
    p.validate();
    const Elements e = elements(p);
    RationalFunction yo = (e.zl1 + e.zcf) / filter_delta(e);
    yo.label = "Yo";
    return yo;
}

RationalFunction filter_admittance_ym(const InverterParams& p) {
    p.validate();
    const Elements e = elements(p);
    RationalFunction ym = e.zcf / filter_delta(e);
    ym.label = "Ym";
    return ym;
}

RationalFunction build_inverter_admittance(const InverterParams& p) {
    p.validate();
    // Yo = (1 + s^2 L1 Cf) Ym and 1/Ym = s(L1 + L2) + s^3 L1 L2 Cf, so
    // Yo / (1 + Gc Gdel Ym) = (1 + s^2 L1 Cf) / (1/Ym + Gc Gdel).
    // Composing this way keeps the element-level poles at s = 0 and at the LC
    // resonance from appearing as spurious common factors on the imaginary axis.
    const RationalFunction yo_over_ym = poly_rf(Polynomial{1.0, 0.0, p.L1 * p.Cf});
    const RationalFunction zm = poly_rf(Polynomial{0.0, p.L1 + p.L2, 0.0, p.L1 * p.L2 * p.Cf});
    const RationalFunction loop = pr_controller(p) * pade_delay(p.delay());
    RationalFunction yio = yo_over_ym / (zm + loop);
    yio.label = "Yio";
    return yio;
}

RationalFunction build_grid_admittance(const GridParams& p) {
    p.validate();
    const RationalFunction cap = poly_rf(Polynomial{0.0, p.Cg});
    const RationalFunction ind{Polynomial{1.0}, Polynomial{0.0, p.Lg}};
    RationalFunction yg = cap + ind;
    yg.label = "Yg";
    return yg;
}

RationalFunction build_load_admittance(const LoadParams& p) {
    p.validate();
    return {Polynomial{1.0}, Polynomial{p.Rd, p.Ld}, "Yd"};
}

RationalFunction aggregate_parallel(const std::vector<RationalFunction>& admittances) {
    if (admittances.empty()) throw Error(ErrorCode::invalid_argument, "nothing to aggregate");
    RationalFunction acc = admittances.front();
    for (std::size_t k = 1; k < admittances.size(); ++k) acc = acc + admittances[k];
    return acc;
}

ScenarioModels build_scenario(const ScenarioSpec& spec) {
    RationalFunction y1 = build_inverter_admittance(spec.inv2);
    if (spec.scenario == Scenario::II) y1 = aggregate_parallel({y1, build_load_admittance(spec.load)});
    RationalFunction y2 = aggregate_parallel({build_inverter_admittance(spec.inv1), build_grid_admittance(spec.grid)});
    y1.label = "Y_to1";
    y2.label = "Y_to2";
    return {SubsystemModel::from_exact(std::move(y1), ResponseKind::admittance, "Y_to1"),
            SubsystemModel::from_exact(std::move(y2), ResponseKind::admittance, "Y_to2")};
}

}  // namespace impstab
