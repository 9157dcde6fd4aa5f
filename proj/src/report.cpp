#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ostream>

#include <json.hpp>

#include "impstab/error.hpp"
#include "impstab/io.hpp"

namespace impstab {
namespace {

using json = nlohmann::ordered_json;

// JSON has no infinities; null reads as "not defined" (no crossover and the like).
json num(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

json census_json(const RhpCensus& c) {
    json breaks = json::array();
    for (const BreakPoint& b : c.breaks) {
        json e;
        e["f_hz"] = num(b.f_b);
        e["kind"] = to_string(b.kind);
        e["half_plane"] = to_string(b.half_plane);
        e["slope_change_db_dec"] = num(b.slope_change_db_dec);
        e["phase_step_deg"] = num(b.phase_step_deg);
        e["zeta"] = b.zeta_est ? num(*b.zeta_est) : json(nullptr);
        e["resonance"] = b.resonance;
        if (!b.note.empty()) e["note"] = b.note;
        breaks.push_back(std::move(e));
    }
    json j;
    j["source"] = to_string(c.source);
    j["determined"] = c.determined;
    j["rhp_poles"] = c.rhp_poles;
    j["rhp_zeros"] = c.rhp_zeros;
    j["on_axis_poles"] = c.on_axis_poles;
    j["on_axis_zeros"] = c.on_axis_zeros;
    j["breaks"] = std::move(breaks);
    return j;
}

json margins_json(const Margins& m) {
    json j;
    j["GM_db"] = num(m.GM_db);
    j["gm"] = num(m.gm);
    j["PM_deg"] = num(m.PM_deg);
    j["gain_crossover_hz"] = json::array();
    for (double f : m.gain_crossover_hz) j["gain_crossover_hz"].push_back(num(f));
    j["phase_crossover_hz"] = json::array();
    for (double f : m.phase_crossover_hz) j["phase_crossover_hz"].push_back(num(f));
    return j;
}

json header() {
    json j;
    j["tool"] = tool_name;
    j["version"] = tool_version;
    return j;
}

std::string dump(const json& j) { return j.dump(2) + "\n"; }

}  // namespace

std::string report_json(const StabilityReport& r) {
    json j = header();
    j["verdict"] = to_string(r.verdict);
    j["mode"] = r.exact_mode ? "exact" : "sampled";
    j["P_open_loop"] = r.P_open_loop;
    const EncirclementCount& e = r.encirclements;
    j["N_CC"] = e.N_CC;
    j["N_ACC"] = e.N_ACC;
    j["N"] = e.N;
    j["n_cc"] = e.n_cc;
    j["n_cc0"] = e.n_cc0;
    j["n_acc"] = e.n_acc;
    j["n_acc0"] = e.n_acc0;

    json cr = json::array();
    for (const Crossing& c : r.crossings) {
        json x;
        x["f_hz"] = num(c.f);
        x["kind"] = to_string(c.kind);
        x["at_zero"] = c.at_zero;
        x["boundary_deg"] = c.boundary;
        x["phase_diff_deriv_deg_per_hz"] = num(c.phase_diff_deriv);
        x["f_uncertainty_hz"] = num(c.f_uncertainty);
        cr.push_back(std::move(x));
    }
    j["crossings"] = std::move(cr);

    json er = json::array();
    for (const ExteriorRegion& x : r.regions) {
        json o;
        o["f_lo_hz"] = num(x.f_lo);
        o["f_hi_hz"] = num(x.f_hi);
        o["open_low"] = x.open_low;
        o["open_high"] = x.open_high;
        er.push_back(std::move(o));
    }
    j["exterior_regions"] = std::move(er);

    json o;
    o["numerator"] = r.orientation.numerator_id;
    o["denominator"] = r.orientation.denominator_id;
    o["basis"] = to_string(r.orientation.basis);
    o["hf_slope_num_db_dec"] = num(r.orientation.hf_slope_num_db_dec);
    o["hf_slope_den_db_dec"] = num(r.orientation.hf_slope_den_db_dec);
    j["orientation"] = std::move(o);

    json cc = json::object();
    for (const auto& [name, v] : r.cross_checks) cc[name] = to_string(v);
    j["cross_checks"] = std::move(cc);
    j["numerator_census"] = census_json(r.numerator_census);
    j["denominator_census"] = census_json(r.denominator_census);
    j["f_min_hz"] = num(r.f_min);
    j["f_max_hz"] = num(r.f_max);
    j["evidence_notes"] = r.evidence_notes;
    return dump(j);
}

std::string report_json(const std::vector<CriterionReport>& reports) {
    json j = header();
    json arr = json::array();
    for (const CriterionReport& r : reports) {
        json c;
        c["criterion"] = to_string(r.kind);
        c["pass"] = r.pass;
        json v = json::array();
        for (const Violation& x : r.violations) {
            json o;
            o["f_lo_hz"] = num(x.f_lo);
            o["f_hi_hz"] = num(x.f_hi);
            o["condition"] = x.condition;
            v.push_back(std::move(o));
        }
        c["violations"] = std::move(v);
        c["margins"] = r.margins_valid ? margins_json(r.margins) : json(nullptr);
        if (!r.opac_phi_deg.empty()) {
            const auto lo = std::min_element(r.opac_phi_deg.begin(), r.opac_phi_deg.end(),
                                             [](const auto& a, const auto& b) { return a.second < b.second; });
            c["opac_phi_min_deg"] = num(lo->second);
            c["opac_phi_min_at_hz"] = num(lo->first);
        }
        arr.push_back(std::move(c));
    }
    j["criteria"] = std::move(arr);
    return dump(j);
}

std::string report_json(const Margins& m) {
    json j = header();
    j["margins"] = margins_json(m);
    return dump(j);
}

std::string report_json(const RhpCensus& c) {
    json j = header();
    j["census"] = census_json(c);
    return dump(j);
}

// ---- plot data ----

namespace {

std::string g17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

void same_grid(const std::vector<double>& a, const std::vector<double>& b) {
    if (a != b) throw Error(ErrorCode::grid_mismatch, "plot series must share one frequency grid");
}

}  // namespace

void write_bode_csv(std::ostream& out, const BodeSeries& b1, const BodeSeries& b2) {
    same_grid(b1.f, b2.f);
    out << "f_hz,mag1_db,phase1_deg,mag2_db,phase2_deg,mag_diff_db,phase_diff_deg,in_er,cb_upper_deg,cb_lower_deg\n";
    for (std::size_t i = 0; i < b1.size(); ++i) {
        const double dm = b1.mag_db[i] - b2.mag_db[i];
        out << g17(b1.f[i]) << ',' << g17(b1.mag_db[i]) << ',' << g17(b1.phase_deg[i]) << ',' << g17(b2.mag_db[i])
            << ',' << g17(b2.phase_deg[i]) << ',' << g17(dm) << ',' << g17(b1.phase_deg[i] - b2.phase_deg[i]) << ','
            << (dm > 0.0 ? 1 : 0) << ',' << g17(b1.phase_deg[i] + 180.0) << ',' << g17(b1.phase_deg[i] - 180.0)
            << '\n';
    }
}

void write_nyquist_csv(std::ostream& out, const SampledResponse& z1, const SampledResponse& z2) {
    same_grid(z1.f, z2.f);
    out << "f_hz,re,im\n";
    for (std::size_t i = 0; i < z1.size(); ++i) {
        const cplx r = z1.value[i] / z2.value[i];
        out << g17(z1.f[i]) << ',' << g17(r.real()) << ',' << g17(r.imag()) << '\n';
    }
}

void write_bode_svg(std::ostream& out, const BodeSeries& b1, const BodeSeries& b2,
                    const std::vector<ExteriorRegion>& regions, std::string_view title) {
    same_grid(b1.f, b2.f);
    if (b1.size() < 2) throw Error(ErrorCode::invalid_argument, "need at least two samples to plot");
    constexpr double W = 900, H = 640, left = 70, right = 20, top = 40, gap = 40;
    constexpr double panel = (H - top - gap - 40) / 2;
    const double lx0 = std::log10(b1.f.front());
    const double lx1 = std::log10(b1.f.back());
    auto x = [&](double f) { return left + (std::log10(f) - lx0) / (lx1 - lx0) * (W - left - right); };

    auto range = [](std::initializer_list<const std::vector<double>*> ys, double pad) {
        double lo = 1e300, hi = -1e300;
        for (const auto* y : ys)
            for (double v : *y) lo = std::min(lo, v), hi = std::max(hi, v);
        return std::pair{lo - pad, hi + pad};
    };
    const auto [mlo, mhi] = range({&b1.mag_db, &b2.mag_db}, 5.0);
    std::vector<double> up(b1.size()), dn(b1.size());
    for (std::size_t i = 0; i < b1.size(); ++i) up[i] = b1.phase_deg[i] + 180.0, dn[i] = b1.phase_deg[i] - 180.0;
    const auto [plo, phi] = range({&b2.phase_deg, &up, &dn}, 10.0);
    const double y_mag0 = top;
    const double y_ph0 = top + panel + gap;
    auto ym = [&](double v) { return y_mag0 + (mhi - v) / (mhi - mlo) * panel; };
    auto yp = [&](double v) { return y_ph0 + (phi - v) / (phi - plo) * panel; };

    auto path = [&](const std::vector<double>& ys, auto&& ymap, const char* colour, const char* dash) {
        out << "<polyline fill=\"none\" stroke=\"" << colour << "\" stroke-width=\"1.5\"";
        if (*dash) out << " stroke-dasharray=\"" << dash << "\"";
        out << " points=\"";
        for (std::size_t i = 0; i < ys.size(); ++i) {
            char buf[64];
            std::snprintf(buf, sizeof buf, "%.2f,%.2f ", x(b1.f[i]), ymap(ys[i]));
            out << buf;
        }
        out << "\"/>\n";
    };

    out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\"" << H << "\">\n";
    out << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    out << "<text x=\"" << left << "\" y=\"24\" font-family=\"sans-serif\" font-size=\"15\">" << title << "</text>\n";
    for (const ExteriorRegion& r : regions) {
        const double x0 = x(std::max(r.f_lo, b1.f.front()));
        const double x1 = x(std::min(r.f_hi, b1.f.back()));
        for (double y0 : {y_mag0, y_ph0})
            out << "<rect x=\"" << x0 << "\" y=\"" << y0 << "\" width=\"" << std::max(x1 - x0, 1.0)
                << "\" height=\"" << panel << "\" fill=\"#f4c7c3\" fill-opacity=\"0.6\"/>\n";
    }
    for (double y0 : {y_mag0, y_ph0})
        out << "<rect x=\"" << left << "\" y=\"" << y0 << "\" width=\"" << W - left - right << "\" height=\""
            << panel << "\" fill=\"none\" stroke=\"black\"/>\n";
    for (int d = static_cast<int>(std::ceil(lx0)); d <= static_cast<int>(std::floor(lx1)); ++d) {
        const double xd = x(std::pow(10.0, d));
        out << "<line x1=\"" << xd << "\" x2=\"" << xd << "\" y1=\"" << y_mag0 << "\" y2=\"" << y_ph0 + panel
            << "\" stroke=\"#ccc\"/>\n";
        out << "<text x=\"" << xd - 10 << "\" y=\"" << y_ph0 + panel + 16
            << "\" font-family=\"sans-serif\" font-size=\"11\">1e" << d << "</text>\n";
    }
    out << "<text x=\"8\" y=\"" << y_mag0 + panel / 2 << "\" font-family=\"sans-serif\" font-size=\"12\">dB</text>\n";
    out << "<text x=\"8\" y=\"" << y_ph0 + panel / 2 << "\" font-family=\"sans-serif\" font-size=\"12\">deg</text>\n";
    path(b1.mag_db, ym, "#1f77b4", "");
    path(b2.mag_db, ym, "#d62728", "");
    path(b2.phase_deg, yp, "#d62728", "");
    path(up, yp, "#1f77b4", "6,3");
    path(dn, yp, "#1f77b4", "2,3");
    out << "</svg>\n";
}

}  // namespace impstab
