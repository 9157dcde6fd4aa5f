#include "impstab/criteria.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "impstab/encircle.hpp"
#include "impstab/error.hpp"

namespace impstab {
namespace {

constexpr double inf = std::numeric_limits<double>::infinity();

void require_same_grid(const BodeSeries& b1, const BodeSeries& b2) {
    if (b1.f != b2.f) throw Error(ErrorCode::grid_mismatch, "Bode series are sampled on different grids");
    if (b1.size() < 2) throw Error(ErrorCode::invalid_argument, "need at least two samples");
}

// Frequency where y crosses level between samples i and i+1, linear in log f.
double cross_at(const BodeSeries& b, const std::vector<double>& y, std::size_t i, double level) {
    const double t = (level - y[i]) / (y[i + 1] - y[i]);
    const double u = std::log10(b.f[i]) + t * (std::log10(b.f[i + 1]) - std::log10(b.f[i]));
    return std::pow(10.0, u);
}

// Merges flagged samples into intervals; a lone sample becomes a zero-width interval.
std::vector<Violation> merge(const std::vector<double>& f, const std::vector<bool>& bad, const std::string& why) {
    std::vector<Violation> out;
    for (std::size_t i = 0; i < f.size(); ++i) {
        if (!bad[i]) continue;
        if (!out.empty() && i > 0 && bad[i - 1]) out.back().f_hi = f[i];
        else out.push_back({f[i], f[i], why});
    }
    return out;
}

}  // namespace

Margins compute_margins(const BodeSeries& b1, const BodeSeries& b2, int p_open_loop) {
    require_same_grid(b1, b2);
    if (p_open_loop > 0)
        throw Error(ErrorCode::open_loop_rhp_poles,
                    "classical margins are undefined with open-loop RHP poles; use assess_stability");
    const std::size_t n = b1.size();
    std::vector<double> mag(n);
    std::vector<double> ph(n);
    for (std::size_t i = 0; i < n; ++i) {
        mag[i] = b1.mag_db[i] - b2.mag_db[i];
        ph[i] = b1.phase_deg[i] - b2.phase_deg[i];
    }

    Margins m;
    m.GM_db = inf;
    m.PM_deg = inf;
    auto mag_at = [&](double f) { return interp_logf(b1.f, mag, f); };
    auto ph_at = [&](double f) { return interp_logf(b1.f, ph, f); };

    for (std::size_t i = 0; i + 1 < n; ++i) {
        // phase crossovers: 180 + 360k strictly passed or landed on at the right end
        const double lo = std::min(ph[i], ph[i + 1]);
        const double hi = std::max(ph[i], ph[i + 1]);
        for (double k = std::ceil((lo - 180.0) / 360.0); 180.0 + 360.0 * k <= hi; k += 1.0) {
            const double level = 180.0 + 360.0 * k;
            if (level == ph[i] && i > 0) continue;  // counted with the previous interval
            const double f = ph[i] == ph[i + 1] ? b1.f[i] : cross_at(b1, ph, i, level);
            m.phase_crossover_hz.push_back(f);
            m.GM_db = std::min(m.GM_db, -mag_at(f));
        }
        const bool up = mag[i] < 0.0 && mag[i + 1] >= 0.0;
        const bool down = mag[i] >= 0.0 && mag[i + 1] < 0.0;
        if (up || down) {
            const double f = cross_at(b1, mag, i, 0.0);
            m.gain_crossover_hz.push_back(f);
            m.PM_deg = std::min(m.PM_deg, 180.0 - std::abs(wrap_deg(ph_at(f))));
        }
    }
    m.gm = std::pow(10.0, m.GM_db / 20.0);
    return m;
}

std::string_view to_string(CriterionKind k) {
    switch (k) {
        case CriterionKind::middlebrook: return "middlebrook";
        case CriterionKind::small_gain: return "small_gain";
        case CriterionKind::gmpm: return "gmpm";
        case CriterionKind::opac: return "opac";
        case CriterionKind::nssc: return "nssc";
        case CriterionKind::mpc: return "mpc";
    }
    return "?";
}

CriterionKind parse_criterion_kind(std::string_view s) {
    for (CriterionKind k : {CriterionKind::middlebrook, CriterionKind::small_gain, CriterionKind::gmpm,
                            CriterionKind::opac, CriterionKind::nssc, CriterionKind::mpc})
        if (to_string(k) == s) return k;
    throw Error(ErrorCode::invalid_spec, "unknown criterion '" + std::string(s) + "'");
}

double mpc_radius(double gm) {
    if (!(gm > 1.0)) throw Error(ErrorCode::invalid_spec, "gm must exceed 1 for a sensitivity peak");
    return 1.0 - 1.0 / gm;
}

void ForbiddenRegionSpec::validate() const {
    auto bad = [](const std::string& what) { throw Error(ErrorCode::invalid_spec, what); };
    switch (kind) {
        case CriterionKind::small_gain:
        case CriterionKind::nssc:
            if (!(tol_deg > 0)) bad("tol_deg must be positive");
            break;
        case CriterionKind::gmpm:
            if (!(PM_deg > 0 && PM_deg < 180)) bad("PM_deg must lie in (0, 180)");
            [[fallthrough]];
        case CriterionKind::middlebrook:
        case CriterionKind::opac:
            if (!(GM_db > 0) || !std::isfinite(GM_db)) bad("GM_db must be positive");
            break;
        case CriterionKind::mpc:
            if (Ms != 0.0) {
                if (!(Ms > 1) || !std::isfinite(Ms)) bad("Ms must exceed 1");
            } else if (!(GM_db > 0) || !std::isfinite(GM_db)) {
                bad("GM_db must be positive when Ms is derived from it");
            }
            break;
    }
}

double ForbiddenRegionSpec::sensitivity_peak() const {
    if (Ms != 0.0) return Ms;
    return 1.0 / mpc_radius(std::pow(10.0, GM_db / 20.0));
}

CriterionReport check_criterion(const ForbiddenRegionSpec& spec, const BodeSeries& b1, const BodeSeries& b2,
                                int p_open_loop) {
    require_same_grid(b1, b2);
    spec.validate();
    CriterionReport rep;
    rep.kind = spec.kind;
    if (p_open_loop == 0) {
        rep.margins = compute_margins(b1, b2, 0);
        rep.margins_valid = true;
    }

    const std::size_t n = b1.size();
    std::vector<bool> bad(n, false);
    const double gm = std::pow(10.0, spec.GM_db / 20.0);
    std::string why;
    for (std::size_t i = 0; i < n; ++i) {
        const double r_db = b1.mag_db[i] - b2.mag_db[i];
        const double dphi = b1.phase_deg[i] - b2.phase_deg[i];
        const double wrapped = wrap_deg(dphi);
        const double r = std::pow(10.0, r_db / 20.0);
        switch (spec.kind) {
            case CriterionKind::middlebrook:
                bad[i] = r_db >= -spec.GM_db;
                why = "20lg|Z1| - 20lg|Z2| >= -GM";
                break;
            case CriterionKind::small_gain:
                bad[i] = r_db >= 0.0;
                why = "|Z1/Z2| >= 1";
                break;
            case CriterionKind::gmpm:
                bad[i] = r_db >= -spec.GM_db && std::abs(wrapped) >= 180.0 - spec.PM_deg;
                why = "magnitude above -GM with phase within PM of 180";
                break;
            case CriterionKind::opac: {
                bad[i] = r * std::cos(dphi / rad2deg) <= -1.0 / gm;
                why = "Real{Z1/Z2} <= -1/gm";
                const double arg = 1.0 / (gm * r);
                if (arg <= 1.0) rep.opac_phi_deg.emplace_back(b1.f[i], std::asin(arg) * rad2deg);
                break;
            }
            case CriterionKind::nssc:
                bad[i] = r_db >= 0.0 && 180.0 - std::abs(wrapped) <= spec.tol_deg;
                why = "ratio on the real axis left of -1";
                break;
            case CriterionKind::mpc: {
                const cplx ratio = std::polar(r, dphi / rad2deg);
                bad[i] = std::abs(1.0 + ratio) <= 1.0 / spec.sensitivity_peak();
                why = "|1 + Z1/Z2| <= 1/Ms";
                break;
            }
        }
    }
    rep.violations = merge(b1.f, bad, why);

    // The axis is a line: a sampled grid can step over it, and the w = 0 end of
    // the Nyquist curve lies outside the grid. The crossing search covers both.
    if (spec.kind == CriterionKind::nssc) {
        const std::vector<ExteriorRegion> regions = exterior_regions(b1, b2, 1e-9);
        const CrossingSearch cs = find_crossings(b1, b2, regions, spec.tol_deg);
        auto covered = [&](double f) {
            return std::any_of(rep.violations.begin(), rep.violations.end(),
                               [&](const Violation& v) { return v.f_lo <= f && f <= v.f_hi; });
        };
        for (const Crossing& c : cs.crossings) {
            if (c.at_zero) {
                rep.violations.push_back({0.0, 0.0, "ratio on the real axis left of -1 at w = 0"});
                continue;
            }
            if (covered(c.f)) continue;
            const std::size_t i = bracket(b1.f, c.f);
            rep.violations.push_back({b1.f[i], b1.f[std::min(i + 1, n - 1)], why});
        }
        for (const std::string& m : cs.marginal) rep.violations.push_back({0.0, 0.0, "marginal: " + m});
        std::sort(rep.violations.begin(), rep.violations.end(),
                  [](const Violation& x, const Violation& y) { return x.f_lo < y.f_lo; });
    }
    rep.pass = rep.violations.empty();
    return rep;
}

}  // namespace impstab
