#include "impstab/rhp_id.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "impstab/error.hpp"
#include "impstab/roots.hpp"

namespace impstab {

std::string_view to_string(BreakKind k) {
    switch (k) {
        case BreakKind::real_pole: return "real_pole";
        case BreakKind::real_zero: return "real_zero";
        case BreakKind::conj_pole: return "conj_pole";
        case BreakKind::conj_zero: return "conj_zero";
    }
    return "real_pole";
}

std::string_view to_string(HalfPlane h) {
    switch (h) {
        case HalfPlane::lhp: return "LHP";
        case HalfPlane::rhp: return "RHP";
        case HalfPlane::undetermined: return "undetermined";
    }
    return "undetermined";
}

std::string_view to_string(CensusSource s) { return s == CensusSource::exact ? "exact" : "bode_heuristic"; }

namespace {

// Fit model, in u = log10(f):
//   mag_db(u) = m0 + s0*u + sum_k c_k * M_k(u)
//   phase(u)  = p0 + sum_k a_k * P_k(u)
// M_k, P_k are unit first- or second-order shapes: M_k has an asymptotic slope change
// of 1 dB/dec and P_k a total step of 1 degree, so c_k and a_k read directly as slope
// change and phase step. Amplitudes are linear and solved by least squares; break
// positions and damping ratios are refined by Levenberg-Marquardt.

enum class Shape { first, second };

struct Term {
    double u = 0.0;
    Shape shape = Shape::first;
    double zeta = 1.0;
};

struct Data {
    Eigen::VectorXd u, mag, ph;
};

struct Fit {
    std::vector<Term> terms;
    std::vector<double> c, a;
    double rms = std::numeric_limits<double>::infinity();
};

constexpr double phase_weight = 0.2;  // degrees to dB-equivalent in the joint residual
constexpr double zeta_lo = 0.02;
constexpr double zeta_hi = 1.5;

void unit_shape(double u, const Term& t, double& m, double& p) {
    const double x = std::pow(10.0, u - t.u);
    if (t.shape == Shape::first) {
        m = 10.0 * std::log10(1.0 + x * x) / 20.0;
        p = std::atan(x) * rad2deg / 90.0;
    } else {
        const double re = 1.0 - x * x;
        const double im = 2.0 * t.zeta * x;
        m = 10.0 * std::log10(re * re + im * im) / 40.0;
        p = std::atan2(im, re) * rad2deg / 180.0;
    }
}

Eigen::VectorXd residual(const Data& d, const std::vector<Term>& terms, std::vector<double>* c = nullptr,
                         std::vector<double>* a = nullptr) {
    const Eigen::Index n = d.u.size();
    const auto k = static_cast<Eigen::Index>(terms.size());
    Eigen::MatrixXd am(n, k + 2);
    Eigen::MatrixXd ap(n, k + 1);
    am.col(0).setOnes();
    am.col(1) = d.u;
    ap.col(0).setOnes();
    for (Eigen::Index j = 0; j < k; ++j) {
        for (Eigen::Index i = 0; i < n; ++i) {
            double m = 0.0;
            double p = 0.0;
            unit_shape(d.u[i], terms[static_cast<std::size_t>(j)], m, p);
            am(i, j + 2) = m;
            ap(i, j + 1) = p;
        }
    }
    const Eigen::VectorXd xm = am.colPivHouseholderQr().solve(d.mag);
    const Eigen::VectorXd xp = ap.colPivHouseholderQr().solve(d.ph);
    if (c) c->assign(xm.data() + 2, xm.data() + xm.size());
    if (a) a->assign(xp.data() + 1, xp.data() + xp.size());
    Eigen::VectorXd r(2 * n);
    r.head(n) = d.mag - am * xm;
    r.tail(n) = (d.ph - ap * xp) * phase_weight;
    return r;
}

Fit evaluate(const Data& d, std::vector<Term> terms) {
    Fit f;
    const Eigen::VectorXd r = residual(d, terms, &f.c, &f.a);
    f.rms = std::sqrt(r.squaredNorm() / static_cast<double>(r.size()));
    f.terms = std::move(terms);
    return f;
}

Fit refine(const Data& d, std::vector<Term> terms) {
    std::sort(terms.begin(), terms.end(), [](const Term& x, const Term& y) { return x.u < y.u; });
    const double u_lo = d.u[0] - 0.5;
    const double u_hi = d.u[d.u.size() - 1] + 0.5;

    std::vector<double> p;
    std::vector<double> lo;
    std::vector<double> hi;
    for (const Term& t : terms) {
        p.push_back(t.u);
        lo.push_back(u_lo);
        hi.push_back(u_hi);
        if (t.shape == Shape::second) {
            p.push_back(std::clamp(t.zeta, zeta_lo, zeta_hi));
            lo.push_back(zeta_lo);
            hi.push_back(zeta_hi);
        }
    }
    auto unpack = [&](const std::vector<double>& v) {
        std::vector<Term> out = terms;
        std::size_t i = 0;
        for (Term& t : out) {
            t.u = v[i++];
            if (t.shape == Shape::second) t.zeta = v[i++];
        }
        return out;
    };
    auto clamp_all = [&](std::vector<double>& v) {
        for (std::size_t i = 0; i < v.size(); ++i) v[i] = std::clamp(v[i], lo[i], hi[i]);
    };

    if (!p.empty()) {
        const auto np = static_cast<Eigen::Index>(p.size());
        Eigen::VectorXd r = residual(d, unpack(p));
        double cost = 0.5 * r.squaredNorm();
        double lambda = 1e-3;
        for (int it = 0; it < 200; ++it) {
            Eigen::MatrixXd jac(r.size(), np);
            for (Eigen::Index j = 0; j < np; ++j) {
                std::vector<double> q = p;
                double h = 1e-7;
                if (q[static_cast<std::size_t>(j)] + h > hi[static_cast<std::size_t>(j)]) h = -h;
                q[static_cast<std::size_t>(j)] += h;
                jac.col(j) = (residual(d, unpack(q)) - r) / h;
            }
            const Eigen::MatrixXd jtj = jac.transpose() * jac;
            const Eigen::VectorXd g = jac.transpose() * r;
            bool accepted = false;
            double gain = 0.0;
            double step = 0.0;
            while (lambda < 1e12) {
                Eigen::MatrixXd lhs = jtj;
                for (Eigen::Index j = 0; j < np; ++j) lhs(j, j) += lambda * std::max(jtj(j, j), 1e-12);
                const Eigen::VectorXd delta = lhs.ldlt().solve(-g);
                std::vector<double> q = p;
                for (Eigen::Index j = 0; j < np; ++j) q[static_cast<std::size_t>(j)] += delta[j];
                clamp_all(q);
                const Eigen::VectorXd rq = residual(d, unpack(q));
                const double cq = 0.5 * rq.squaredNorm();
                if (std::isfinite(cq) && cq < cost) {
                    gain = cost - cq;
                    step = delta.norm();
                    p = std::move(q);
                    r = rq;
                    cost = cq;
                    lambda = std::max(lambda / 3.0, 1e-12);
                    accepted = true;
                    break;
                }
                lambda *= 4.0;
            }
            if (!accepted || gain <= 1e-15 * (1.0 + cost) || step < 1e-12) break;
        }
        terms = unpack(p);
    }
    return evaluate(d, std::move(terms));
}

std::vector<double> gradient(const std::vector<double>& x, const std::vector<double>& y) {
    const std::size_t n = y.size();
    std::vector<double> g(n, 0.0);
    if (n < 2) return g;
    g[0] = (y[1] - y[0]) / (x[1] - x[0]);
    g[n - 1] = (y[n - 1] - y[n - 2]) / (x[n - 1] - x[n - 2]);
    for (std::size_t i = 1; i + 1 < n; ++i) {
        const double hd = x[i] - x[i - 1];
        const double hs = x[i + 1] - x[i];
        g[i] = (hd * hd * y[i + 1] - hs * hs * y[i - 1] + (hs * hs - hd * hd) * y[i]) / (hs * hd * (hd + hs));
    }
    return g;
}

std::vector<std::size_t> peaks(const std::vector<double>& y, double threshold) {
    std::vector<std::size_t> out;
    for (std::size_t i = 1; i + 1 < y.size(); ++i) {
        const double v = std::abs(y[i]);
        if (v >= std::abs(y[i - 1]) && v > std::abs(y[i + 1]) && v > threshold) out.push_back(i);
    }
    return out;
}

int nearest_int(double x) { return static_cast<int>(std::lround(x)); }

Fit switch_shapes(const Data& d, Fit fit) {
    for (int it = 0; it < 3; ++it) {
        bool changed = false;
        for (std::size_t k = 0; k < fit.terms.size(); ++k) {
            const int order = nearest_int(std::abs(fit.c[k]) / 20.0);
            if (order != 1 && order != 2) continue;
            const Shape want = order == 1 ? Shape::first : Shape::second;
            if (want == fit.terms[k].shape) continue;
            std::vector<Term> trial = fit.terms;
            trial[k].shape = want;
            trial[k].zeta = 0.7;
            Fit f2 = refine(d, trial);
            if (f2.rms < fit.rms) {
                fit = std::move(f2);
                changed = true;
            }
        }
        if (!changed) break;
    }
    return fit;
}

Fit prune(const Data& d, Fit fit) {
    for (;;) {
        std::vector<Term> keep;
        for (std::size_t k = 0; k < fit.terms.size(); ++k)
            if (std::abs(fit.c[k]) >= 3.0 || std::abs(fit.a[k]) >= 10.0) keep.push_back(fit.terms[k]);
        if (keep.size() == fit.terms.size()) return fit;
        fit = refine(d, std::move(keep));
    }
}

bool matches_pattern(double c, double a, const BreakpointConfig& cfg) {
    const int om = nearest_int(std::abs(c) / 20.0);
    const int op = nearest_int(std::abs(a) / 90.0);
    return (om == 1 || om == 2) && om == op && std::abs(std::abs(c) - 20.0 * om) <= cfg.slope_tol_db_dec &&
           std::abs(std::abs(a) - 90.0 * op) <= cfg.phase_step_tol_deg;
}

// An isolated break fitted by the exact shape family lands on 20k dB/dec and 90k degrees
// almost exactly; a visible offset means nearby structure was absorbed into it.
bool pure(double c, double a, const BreakpointConfig& cfg) {
    const int om = nearest_int(std::abs(c) / 20.0);
    return std::abs(std::abs(c) - 20.0 * om) <= cfg.amplitude_purity * 20.0 * om &&
           std::abs(std::abs(a) - 90.0 * om) <= cfg.amplitude_purity * 90.0 * om;
}

// A break whose amplitudes fit no single pattern may be two coincident breaks;
// try describing it as a pair of second-order shapes.
Fit split_unmatched(const Data& d, Fit fit, const BreakpointConfig& cfg, std::vector<bool>& split_flag) {
    split_flag.assign(fit.terms.size(), false);
    for (std::size_t k = 0; k < fit.terms.size(); ++k) {
        if (matches_pattern(fit.c[k], fit.a[k], cfg)) continue;
        std::vector<Term> trial;
        for (std::size_t j = 0; j < fit.terms.size(); ++j)
            if (j != k) trial.push_back(fit.terms[j]);
        trial.push_back({fit.terms[k].u - 0.01, Shape::second, 0.3});
        trial.push_back({fit.terms[k].u + 0.01, Shape::second, 1.0});
        Fit f2 = refine(d, trial);
        if (f2.rms < 0.5 * fit.rms) {
            const double uk = fit.terms[k].u;
            fit = std::move(f2);
            split_flag.assign(fit.terms.size(), false);
            for (std::size_t j = 0; j < fit.terms.size(); ++j)
                if (std::abs(fit.terms[j].u - uk) < 0.1) split_flag[j] = true;
            return fit;
        }
    }
    return fit;
}

}  // namespace

std::vector<BreakPoint> identify_breakpoints(const BodeSeries& b, const BreakpointConfig& cfg) {
    const std::size_t n = b.size();
    if (n < 3) throw Error(ErrorCode::grid_too_sparse, "too few samples for break-point identification");
    const double span = std::log10(b.f.back() / b.f.front());
    const double ppd = static_cast<double>(n - 1) / span;
    if (ppd < cfg.min_points_per_decade)
        throw Error(ErrorCode::grid_too_sparse, "grid has " + std::to_string(ppd) + " points/decade, need >= " +
                                                    std::to_string(cfg.min_points_per_decade));

    std::vector<double> u(n);
    for (std::size_t i = 0; i < n; ++i) u[i] = std::log10(b.f[i]);
    const std::vector<double> dph = gradient(u, b.phase_deg);
    const std::vector<double> slope = gradient(u, b.mag_db);
    const std::vector<double> curv = gradient(u, slope);

    // Candidates: phase-slope peaks and magnitude-curvature peaks, merged within 0.3 dec.
    std::vector<std::size_t> cand = peaks(dph, 15.0);
    for (std::size_t i : peaks(curv, 5.0)) cand.push_back(i);
    std::sort(cand.begin(), cand.end());
    cand.erase(std::unique(cand.begin(), cand.end()), cand.end());
    std::vector<Term> init;
    std::size_t group_best = 0;
    double group_end = -1e300;
    auto flush = [&] {
        const double ad = std::abs(dph[group_best]);
        init.push_back({u[group_best], ad < 100.0 ? Shape::first : Shape::second, std::min(1.0, 131.93 / std::max(ad, 1.0))});
    };
    bool open = false;
    for (std::size_t i : cand) {
        if (open && u[i] - group_end < 0.3) {
            if (std::abs(dph[i]) > std::abs(dph[group_best])) group_best = i;
        } else {
            if (open) flush();
            group_best = i;
            open = true;
        }
        group_end = u[i];
    }
    if (open) flush();

    // Fit on roughly 100 points per decade.
    const std::size_t stride = std::max<std::size_t>(1, static_cast<std::size_t>(ppd / 100.0));
    Data d;
    const std::size_t m = (n - 1) / stride + 1;
    d.u.resize(static_cast<Eigen::Index>(m));
    d.mag.resize(static_cast<Eigen::Index>(m));
    d.ph.resize(static_cast<Eigen::Index>(m));
    for (std::size_t i = 0, j = 0; j < m; i += stride, ++j) {
        d.u[static_cast<Eigen::Index>(j)] = u[i];
        d.mag[static_cast<Eigen::Index>(j)] = b.mag_db[i];
        d.ph[static_cast<Eigen::Index>(j)] = b.phase_deg[i];
    }

    Fit fit = refine(d, init);
    fit = switch_shapes(d, std::move(fit));
    fit = prune(d, std::move(fit));
    std::vector<bool> split;
    fit = split_unmatched(d, std::move(fit), cfg, split);

    const bool fit_ok = fit.rms <= cfg.max_fit_rms;
    const double u_min = u.front();
    const double u_max = u.back();
    std::vector<BreakPoint> out;
    for (std::size_t k = 0; k < fit.terms.size(); ++k) {
        const Term& t = fit.terms[k];
        const double c = fit.c[k];
        const double a = fit.a[k];
        BreakPoint bp;
        bp.f_b = std::pow(10.0, t.u);
        bp.slope_change_db_dec = c;
        bp.phase_step_deg = a;
        const int om = nearest_int(std::abs(c) / 20.0);
        const bool second = (om == 2) || (om != 1 && t.shape == Shape::second);
        const bool pole = c < 0.0;
        bp.kind = second ? (pole ? BreakKind::conj_pole : BreakKind::conj_zero)
                         : (pole ? BreakKind::real_pole : BreakKind::real_zero);
        if (t.shape == Shape::second) {
            bp.zeta_est = t.zeta;
            const double z = t.zeta;
            bp.resonance = z < std::sqrt(0.5) && -20.0 * std::log10(2.0 * z * std::sqrt(1.0 - z * z)) > 3.0;
        }

        std::ostringstream why;
        if (!b.ambiguous.empty()) why << "phase unwrap ambiguous (step > 170 deg between samples); ";
        if (!fit_ok) why << "fit residual " << fit.rms << " too large for isolated breaks; ";
        if (split[k]) why << "coincides with another break; ";
        for (std::size_t j = 0; j < fit.terms.size(); ++j) {
            if (j != k && std::abs(fit.terms[j].u - t.u) < cfg.window_decades) {
                why << "another break within " << cfg.window_decades << " decades; ";
                break;
            }
        }
        if (t.u - u_min < cfg.edge_margin_decades || u_max - t.u < cfg.edge_margin_decades)
            why << "closer than " << cfg.edge_margin_decades << " decade to the grid edge; ";
        if (!matches_pattern(c, a, cfg)) why << "slope change and phase step match no first/second-order pattern; ";
        else if (!pure(c, a, cfg)) why << "amplitudes off their ideal values, unresolved neighbouring structure; ";
        // zeta > 1 is two real breaks at f*(zeta -+ sqrt(zeta^2 - 1)), closer together than any window
        if (t.shape == Shape::second && t.zeta > 1.0 + 1e-4) why << "damping above 1: two close real breaks; ";
        if (t.shape == Shape::second && t.zeta < 0.05) why << "pair too close to the imaginary axis; ";

        bp.note = why.str();
        if (bp.note.empty()) bp.half_plane = ((c > 0) != (a > 0)) ? HalfPlane::rhp : HalfPlane::lhp;
        else bp.note.erase(bp.note.size() - 2);
        out.push_back(std::move(bp));
    }
    if (out.empty() && (!fit_ok || !b.ambiguous.empty())) {
        // Structure the fit cannot explain, but no break to attach it to.
        BreakPoint bp;
        bp.f_b = std::sqrt(b.f.front() * b.f.back());
        bp.note = "no isolated breaks explain the response";
        out.push_back(std::move(bp));
    }
    return out;
}

RhpCensus census(const RationalFunction& rf, double axis_tol) {
    RhpCensus c;
    c.source = CensusSource::exact;
    auto tally = [&](const Polynomial& p, int& rhp, int& axis, std::vector<cplx>& ev) {
        if (p.degree() < 1) return;
        const RootSet rs = poly_roots(p);
        const RhpCount n = count_rhp_roots(rs, axis_tol);
        rhp = n.rhp;
        axis = n.on_axis;
        for (const cplx& r : rs.roots)
            if (r.real() > axis_tolerance(r, axis_tol)) ev.push_back(r);
    };
    tally(rf.num, c.rhp_zeros, c.on_axis_zeros, c.rhp_zero_roots);
    tally(rf.den, c.rhp_poles, c.on_axis_poles, c.rhp_pole_roots);
    return c;
}

RhpCensus census(const BodeSeries& b, const BreakpointConfig& cfg) {
    RhpCensus c;
    c.source = CensusSource::bode_heuristic;
    c.breaks = identify_breakpoints(b, cfg);
    for (const BreakPoint& bp : c.breaks) {
        if (bp.half_plane == HalfPlane::undetermined) c.determined = false;
        if (bp.half_plane != HalfPlane::rhp) continue;
        const int order = (bp.kind == BreakKind::conj_pole || bp.kind == BreakKind::conj_zero) ? 2 : 1;
        if (bp.kind == BreakKind::real_pole || bp.kind == BreakKind::conj_pole) c.rhp_poles += order;
        else c.rhp_zeros += order;
    }
    if (!c.determined) {
        c.rhp_poles = 0;
        c.rhp_zeros = 0;
    }
    return c;
}

int open_loop_rhp_poles(const RhpCensus& num_census, const RhpCensus& den_census) {
    if (!num_census.determined || !den_census.determined)
        throw Error(ErrorCode::invalid_argument, "undetermined census: open-loop RHP poles cannot be counted");
    return num_census.rhp_poles + den_census.rhp_zeros;
}

}  // namespace impstab
