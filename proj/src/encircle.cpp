#include "impstab/encircle.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "impstab/error.hpp"

namespace impstab {

std::string_view to_string(CrossingKind k) { return k == CrossingKind::cc ? "CC" : "ACC"; }

namespace {

void require_same_grid(const BodeSeries& b1, const BodeSeries& b2) {
    if (b1.f != b2.f) throw Error(ErrorCode::grid_mismatch, "Bode series are sampled on different grids");
    if (b1.size() < 2) throw Error(ErrorCode::invalid_argument, "need at least two samples");
}

double mag_diff_exact(const ExactPair& e, double f) {
    const cplx s{0.0, two_pi * f};
    return 20.0 * (std::log10(std::abs((*e.z1)(s))) - std::log10(std::abs((*e.z2)(s))));
}

// arg Z1 - arg Z2 at f, continued from a nearby value `ref` (degrees).
double phase_diff_exact(const ExactPair& e, double f, double ref) {
    const cplx s{0.0, two_pi * f};
    const double raw = (std::arg((*e.z1)(s)) - std::arg((*e.z2)(s))) * rad2deg;
    return ref + wrap_deg(raw - ref);
}

double phase_diff_deriv_exact(const ExactPair& e, double f) {
    const cplx s{0.0, two_pi * f};
    return 360.0 * (e.z1->log_derivative(s) - e.z2->log_derivative(s)).real();
}

// Position of x between a and b as a log-frequency interpolation weight.
double log_lerp(double fa, double fb, double t) { return fa * std::pow(fb / fa, t); }

std::string fmt_hz(double f) {
    std::ostringstream o;
    o.precision(6);
    o << f << " Hz";
    return o.str();
}

// Low-frequency behaviour of the ratio Z1/Z2 ~ c * s^(-m) as s -> 0.
struct LowFreq {
    int m = 0;
    double c = 0.0;       // sign and size of the leading coefficient
    double g0 = 0.0;      // regular part of ratio'/ratio at s = 0 (rad per rad/s)
};

struct OriginTerm {
    int k = 0;
    double a0 = 0.0;
    double a1 = 0.0;
};

OriginTerm origin_term(const Polynomial& p) {
    const int k = p.origin_multiplicity();
    return {k, p[static_cast<std::size_t>(k)], p[static_cast<std::size_t>(k) + 1]};
}

LowFreq low_freq_exact(const ExactPair& e) {
    const OriginTerm n1 = origin_term(e.z1->num);
    const OriginTerm d1 = origin_term(e.z1->den);
    const OriginTerm n2 = origin_term(e.z2->num);
    const OriginTerm d2 = origin_term(e.z2->den);
    LowFreq lf;
    lf.m = d1.k + n2.k - n1.k - d2.k;
    lf.c = (n1.a0 * d2.a0) / (d1.a0 * n2.a0);
    lf.g0 = n1.a1 / n1.a0 + d2.a1 / d2.a0 - d1.a1 / d1.a0 - n2.a1 / n2.a0;
    return lf;
}

// Levels 180 + 360k strictly inside (lo, hi).
std::vector<double> levels_between(double lo, double hi) {
    std::vector<double> out;
    const double k0 = std::ceil((lo - 180.0) / 360.0);
    for (double k = k0;; k += 1.0) {
        const double level = 180.0 + 360.0 * k;
        if (level >= hi) break;
        if (level > lo) out.push_back(level);
    }
    return out;
}

double nearest_level(double x) { return 180.0 + 360.0 * std::round((x - 180.0) / 360.0); }

void add_arc_crossings(double delta_0p, int m, CrossingSearch& out) {
    // The right indentation around the ratio pole maps to an arc at infinity swept
    // clockwise from delta_0p + 180m (w = 0-) down to delta_0p (w = 0+).
    if (m >= 3) {
        out.marginal.push_back("ratio pole of order " + std::to_string(m) + " at s = 0 is not supported");
        return;
    }
    const double lo = delta_0p;
    const double hi = delta_0p + 180.0 * m;
    for (double end : {lo, hi}) {
        if (std::abs(end - nearest_level(end)) < 1e-6) {
            out.marginal.push_back("ratio approaches the negative real axis at infinity as w -> 0");
            return;
        }
    }
    for (double level : levels_between(lo, hi)) {
        Crossing c;
        c.f = 0.0;
        c.at_zero = true;
        c.kind = CrossingKind::cc;
        c.phase_diff_deriv = -std::numeric_limits<double>::infinity();
        c.boundary = level > 0 ? 180 : -180;
        out.crossings.push_back(c);
    }
}

void at_zero_exact(const ExactPair& e, double delta_low, CrossingSearch& out) {
    const LowFreq lf = low_freq_exact(e);
    if (lf.m < 0) {
        out.marginal.push_back("exterior region reaches the lowest grid frequency although the ratio vanishes at dc");
        return;
    }
    if (lf.m >= 1) {
        const double arg_c = lf.c < 0 ? 180.0 : 0.0;
        const double raw = arg_c - 90.0 * lf.m;
        add_arc_crossings(delta_low + wrap_deg(raw - delta_low), lf.m, out);
        return;
    }
    if (lf.c >= 0.0) return;
    if (std::abs(std::abs(lf.c) - 1.0) <= 1e-12) {
        out.marginal.push_back("ratio passes through -1 at w = 0");
        return;
    }
    if (std::abs(lf.c) < 1.0) return;
    Crossing c;
    c.f = 0.0;
    c.at_zero = true;
    c.phase_diff_deriv = 360.0 * lf.g0;
    c.boundary = nearest_level(delta_low) > 0 ? 180 : -180;
    if (std::abs(c.phase_diff_deriv) < tangency_threshold_deg_per_hz) {
        out.marginal.push_back("tangent crossing at w = 0");
        return;
    }
    c.kind = c.phase_diff_deriv < 0 ? CrossingKind::cc : CrossingKind::acc;
    out.crossings.push_back(c);
}

void at_zero_sampled(const BodeSeries& b1, const BodeSeries& b2, double tol_deg, CrossingSearch& out) {
    const std::size_t n = b1.size();
    auto md = [&](std::size_t i) { return b1.mag_db[i] - b2.mag_db[i]; };
    auto pd = [&](std::size_t i) { return b1.phase_deg[i] - b2.phase_deg[i]; };
    // low-frequency slope of the magnitude ratio over up to 0.2 decades
    std::size_t j = 1;
    while (j + 1 < n && j < 10) ++j;
    while (j + 1 < n && std::log10(b1.f[j] / b1.f[0]) < 0.2) ++j;
    const double slope = (md(j) - md(0)) / std::log10(b1.f[j] / b1.f[0]);
    const double m_est = -slope / 20.0;
    const int m = static_cast<int>(std::lround(m_est));
    if (std::abs(m_est - m) > 0.15) {
        out.marginal.push_back("low-frequency slope of the ratio is not resolved on the grid");
        return;
    }
    const double dpdf = (pd(1) - pd(0)) / (b1.f[1] - b1.f[0]);
    const double delta0 = pd(0) - b1.f[0] * dpdf;  // linear in f down to f = 0
    if (m < 0) {
        out.marginal.push_back("exterior region reaches the lowest grid frequency although the ratio falls toward dc");
        return;
    }
    if (m >= 1) {
        const double snapped = 90.0 * std::round(delta0 / 90.0);
        if (std::abs(delta0 - snapped) > tol_deg) {
            out.marginal.push_back("low-frequency phase of the ratio is not a multiple of 90 degrees");
            return;
        }
        add_arc_crossings(snapped, m, out);
        return;
    }
    const double level = nearest_level(delta0);
    if (std::abs(delta0 - level) > tol_deg) return;  // ratio positive at dc
    const double mag0 = md(0);
    if (std::abs(mag0) < 0.01) {
        out.marginal.push_back("ratio passes near -1 at w = 0");
        return;
    }
    Crossing c;
    c.f = 0.0;
    c.at_zero = true;
    c.phase_diff_deriv = dpdf;
    c.boundary = level > 0 ? 180 : -180;
    c.f_uncertainty = 0.5 * b1.f[0];
    if (std::abs(dpdf) < tangency_threshold_deg_per_hz) {
        out.marginal.push_back("tangent crossing at w = 0");
        return;
    }
    c.kind = dpdf < 0 ? CrossingKind::cc : CrossingKind::acc;
    out.crossings.push_back(c);
}

}  // namespace

std::vector<ExteriorRegion> exterior_regions(const BodeSeries& b1, const BodeSeries& b2, double refine_tol,
                                             const ExactPair* exact) {
    require_same_grid(b1, b2);
    const std::size_t n = b1.size();
    auto d = [&](std::size_t i) { return b1.mag_db[i] - b2.mag_db[i]; };

    // Locate the sign change of the magnitude difference inside [f_i, f_i+1].
    auto edge = [&](std::size_t i) {
        const double fa = b1.f[i];
        const double fb = b1.f[i + 1];
        if (exact) {
            double lo = fa;
            double hi = fb;
            const bool rising = d(i + 1) > d(i);
            for (int it = 0; it < 200 && hi - lo > std::max(refine_tol, 1e-13 * hi); ++it) {
                const double mid = std::sqrt(lo * hi);
                const bool above = mag_diff_exact(*exact, mid) > 0.0;
                ((above == rising) ? hi : lo) = mid;
            }
            return std::sqrt(lo * hi);
        }
        const double t = d(i) / (d(i) - d(i + 1));
        return log_lerp(fa, fb, t);
    };

    std::vector<ExteriorRegion> out;
    bool inside = d(0) > 0.0;
    ExteriorRegion cur;
    if (inside) {
        cur.f_lo = b1.f[0];
        cur.open_low = true;
    }
    for (std::size_t i = 0; i + 1 < n; ++i) {
        const bool next = d(i + 1) > 0.0;
        if (next == inside) continue;
        const double fe = edge(i);
        if (next) {
            cur = ExteriorRegion{};
            cur.f_lo = fe;
        } else {
            cur.f_hi = fe;
            out.push_back(cur);
        }
        inside = next;
    }
    if (inside) {
        cur.f_hi = b1.f[n - 1];
        cur.open_high = true;
        out.push_back(cur);
    }
    return out;
}

CrossingSearch find_crossings(const BodeSeries& b1, const BodeSeries& b2, const std::vector<ExteriorRegion>& regions,
                              double tol_deg, const ExactPair* exact) {
    require_same_grid(b1, b2);
    const std::size_t n = b1.size();
    auto pd = [&](std::size_t i) { return b1.phase_deg[i] - b2.phase_deg[i]; };
    auto md = [&](std::size_t i) { return b1.mag_db[i] - b2.mag_db[i]; };
    CrossingSearch out;

    for (const ExteriorRegion& r : regions) {
        if (r.open_low) {
            if (exact) at_zero_exact(*exact, pd(0), out);
            else at_zero_sampled(b1, b2, tol_deg, out);
        }
        if (r.open_high) {
            // A ratio that stays outside the unit circle on the negative real axis as
            // w -> infinity crosses there; counting requires the proper orientation.
            const double top = pd(n - 1);
            if (std::abs(top - nearest_level(top)) <= tol_deg)
                out.marginal.push_back("ratio ends on the negative real axis outside the unit circle; ratio is not proper");
        }
        for (std::size_t i = 0; i + 1 < n; ++i) {
            if (b1.f[i + 1] <= r.f_lo || b1.f[i] >= r.f_hi) continue;
            const double da = pd(i);
            const double db = pd(i + 1);
            for (double level : levels_between(std::min(da, db), std::max(da, db))) {
                Crossing c;
                c.boundary = level > 0 ? 180 : -180;
                double mag_at = 0.0;
                if (exact) {
                    double lo = b1.f[i];
                    double hi = b1.f[i + 1];
                    double g_lo = da - level;
                    double f_mid = std::sqrt(lo * hi);
                    for (int it = 0; it < 200; ++it) {
                        f_mid = std::sqrt(lo * hi);
                        const double g = phase_diff_exact(*exact, f_mid, da) - level;
                        if (std::abs(g) < 1e-6 || hi - lo < 1e-14 * hi) break;
                        if ((g > 0) == (g_lo > 0)) {
                            lo = f_mid;
                            g_lo = g;
                        } else {
                            hi = f_mid;
                        }
                    }
                    c.f = f_mid;
                    c.phase_diff_deriv = phase_diff_deriv_exact(*exact, c.f);
                    mag_at = mag_diff_exact(*exact, c.f);
                } else {
                    const double t = (level - da) / (db - da);
                    c.f = log_lerp(b1.f[i], b1.f[i + 1], t);
                    c.phase_diff_deriv = (db - da) / (b1.f[i + 1] - b1.f[i]);
                    c.f_uncertainty = 0.5 * (b1.f[i + 1] - b1.f[i]);
                    mag_at = md(i) + t * (md(i + 1) - md(i));
                }
                if (c.f <= r.f_lo || c.f >= r.f_hi) {
                    // at or beyond the region edge: only a problem when |ratio| is ~1 there
                    if (std::abs(mag_at) < (exact ? 1e-6 : 0.01))
                        out.marginal.push_back("ratio passes through -1 near " + fmt_hz(c.f));
                    continue;
                }
                if (std::abs(mag_at) < (exact ? 1e-6 : 0.01)) {
                    out.marginal.push_back("ratio passes through -1 near " + fmt_hz(c.f));
                    continue;
                }
                if (std::abs(c.phase_diff_deriv) < tangency_threshold_deg_per_hz) {
                    out.marginal.push_back("tangent crossing at " + fmt_hz(c.f));
                    continue;
                }
                c.kind = c.phase_diff_deriv < 0 ? CrossingKind::cc : CrossingKind::acc;
                out.crossings.push_back(c);
            }
        }
    }
    std::stable_sort(out.crossings.begin(), out.crossings.end(),
                     [](const Crossing& a, const Crossing& b) { return a.f < b.f; });
    return out;
}

EncirclementCount count_encirclements(const std::vector<Crossing>& crossings) {
    EncirclementCount e;
    for (const Crossing& c : crossings) {
        const bool cc = c.kind == CrossingKind::cc;
        if (c.at_zero) (cc ? e.n_cc0 : e.n_acc0) += 1;
        else (cc ? e.n_cc : e.n_acc) += 1;
    }
    e.N_CC = 2 * e.n_cc + e.n_cc0;
    e.N_ACC = 2 * e.n_acc + e.n_acc0;
    e.N = e.N_CC - e.N_ACC;
    return e;
}

std::vector<double> adaptive_grid(const std::vector<const RationalFunction*>& fns, const FrequencyGrid& base,
                                  double max_step_deg, double max_step_db) {
    const std::vector<double> f0 = base.frequencies();
    auto too_coarse = [&](double fa, double fb) {
        for (const RationalFunction* fn : fns) {
            const cplx sa{0.0, two_pi * fa};
            const cplx sb{0.0, two_pi * fb};
            const cplx va = (*fn)(sa);
            const cplx vb = (*fn)(sb);
            if (std::abs(std::arg(vb / va)) * rad2deg > max_step_deg) return true;
            if (std::abs(20.0 * std::log10(std::abs(vb) / std::abs(va))) > max_step_db) return true;
            // derivative bound catches a full swing hidden between the endpoints
            const double dw = two_pi * (fb - fa);
            const double rate = std::max(std::abs(fn->log_derivative(sa).real()), std::abs(fn->log_derivative(sb).real()));
            if (rate * dw * rad2deg > 4.0 * max_step_deg) return true;
        }
        return false;
    };
    std::vector<double> out;
    out.reserve(f0.size());
    std::vector<std::pair<double, int>> stack;
    for (std::size_t i = 0; i + 1 < f0.size(); ++i) {
        out.push_back(f0[i]);
        // depth-first subdivision keeping the output ascending
        stack.clear();
        stack.emplace_back(f0[i + 1], 0);
        double left = f0[i];
        while (!stack.empty()) {
            auto [right, depth] = stack.back();
            if (depth < 24 && too_coarse(left, right)) {
                stack.back().second = depth + 1;
                stack.emplace_back(std::sqrt(left * right), depth + 1);
                continue;
            }
            stack.pop_back();
            if (right != f0[i + 1]) out.push_back(right);
            left = right;
        }
    }
    out.push_back(f0.back());
    return out;
}

}  // namespace impstab
