#include "impstab/verdict.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "impstab/error.hpp"

namespace impstab {

SubsystemModel SubsystemModel::from_exact(RationalFunction rf, ResponseKind kind, std::string id) {
    SubsystemModel m;
    m.exact = std::move(rf);
    m.kind = kind;
    m.id = std::move(id);
    return m;
}

SubsystemModel SubsystemModel::from_sampled(SampledResponse r, ResponseKind kind, std::string id) {
    SubsystemModel m;
    m.sampled = std::move(r);
    m.kind = kind;
    m.id = std::move(id);
    return m;
}

void SubsystemModel::validate() const {
    if (!exact && !sampled) throw Error(ErrorCode::invalid_argument, "subsystem " + id + " has no model");
    if (exact && sampled) {
        for (std::size_t i = 0; i < sampled->size(); ++i) {
            const cplx e = (*exact)(cplx{0.0, two_pi * sampled->f[i]});
            const cplx s = sampled->value[i];
            const double db = std::abs(20.0 * std::log10(std::abs(s) / std::abs(e)));
            const double deg = std::abs(std::arg(s / e)) * rad2deg;
            if (db > 0.1 || deg > 1.0)
                throw Error(ErrorCode::invalid_argument, "subsystem " + id + ": sampled and exact models disagree");
        }
    }
}

std::string_view to_string(OrientationBasis b) {
    switch (b) {
        case OrientationBasis::relative_degree: return "relative_degree";
        case OrientationBasis::hf_slope: return "hf_slope";
        case OrientationBasis::hf_magnitude: return "hf_magnitude";
        case OrientationBasis::user_forced: return "user_forced";
    }
    return "?";
}

std::string_view to_string(Verdict v) {
    switch (v) {
        case Verdict::stable: return "STABLE";
        case Verdict::unstable: return "UNSTABLE";
        case Verdict::marginal: return "MARGINAL";
        case Verdict::indeterminate: return "INDETERMINATE";
    }
    return "?";
}

Verdict parse_verdict(std::string_view s) {
    for (Verdict v : {Verdict::stable, Verdict::unstable, Verdict::marginal, Verdict::indeterminate})
        if (to_string(v) == s) return v;
    throw Error(ErrorCode::parse_error, "unknown verdict '" + std::string(s) + "'");
}

namespace {

std::string fmt(double x) {
    std::ostringstream os;
    os.precision(6);
    os << x;
    return os.str();
}

// The response a model presents on the frequencies f (exact models are evaluated there).
SampledResponse response_on(const SubsystemModel& m, std::span<const double> f, double axis_tol) {
    if (m.sampled && std::equal(m.sampled->f.begin(), m.sampled->f.end(), f.begin(), f.end())) return *m.sampled;
    if (m.exact) return evaluate_response(*m.exact, f, m.kind, axis_tol);
    throw Error(ErrorCode::grid_mismatch, "subsystem " + m.id + " is sampled on a different grid");
}

struct TopDecade {
    double slope = 0.0;  // dB/dec
    double mean_db = 0.0;
};

TopDecade top_decade(const SampledResponse& r, double f_top) {
    double su = 0, sy = 0, suu = 0, suy = 0;
    int n = 0;
    for (std::size_t i = 0; i < r.size(); ++i) {
        if (r.f[i] < f_top / 10.0 * (1 - 1e-12) || r.f[i] > f_top * (1 + 1e-12)) continue;
        const double u = std::log10(r.f[i]);
        const double y = 20.0 * std::log10(std::abs(r.value[i]));
        su += u;
        sy += y;
        suu += u * u;
        suy += u * y;
        ++n;
    }
    if (n < 3) throw Error(ErrorCode::grid_too_sparse, "fewer than 3 samples in the top decade");
    const double var = suu - su * su / n;
    TopDecade t;
    t.slope = var > 0 ? (suy - su * sy / n) / var : 0.0;
    t.mean_db = sy / n;
    return t;
}

}  // namespace

RatioOrientation select_proper_ratio(const SubsystemModel& a, const SubsystemModel& b, const FrequencyGrid& grid) {
    a.validate();
    b.validate();
    RatioOrientation o;
    auto finish = [&](bool a_num) {
        o.a_is_numerator = a_num;
        o.numerator_id = a_num ? a.id : b.id;
        o.denominator_id = a_num ? b.id : a.id;
        if (!a_num) std::swap(o.hf_slope_num_db_dec, o.hf_slope_den_db_dec);
        return o;
    };

    if (a.exact && b.exact) {
        o.basis = OrientationBasis::relative_degree;
        const int ra = a.exact->relative_degree();
        const int rb = b.exact->relative_degree();
        o.hf_slope_num_db_dec = -20.0 * ra;
        o.hf_slope_den_db_dec = -20.0 * rb;
        if (ra != rb) return finish(ra > rb);
        // tie: the ratio tends to a constant whose magnitude decides
        const double la = a.exact->num.leading() / a.exact->den.leading();
        const double lb = b.exact->num.leading() / b.exact->den.leading();
        const double c = std::abs(la / lb);
        if (std::abs(c - 1.0) <= 1e-9)
            throw Error(ErrorCode::ambiguous_orientation,
                        "both orientations tend to unit magnitude at high frequency; force the orientation");
        return finish(c < 1.0);
    }

    // At least one side is sampled: compare on the sampled frequencies.
    const SampledResponse* sa = a.sampled ? &*a.sampled : nullptr;
    const SampledResponse* sb = b.sampled ? &*b.sampled : nullptr;
    std::vector<double> f_common = sa ? sa->f : sb->f;
    if (!sa && !sb) f_common = grid.frequencies();
    const SampledResponse ra = sa ? *sa : evaluate_response(*a.exact, f_common, a.kind);
    const SampledResponse rb = sb ? *sb : evaluate_response(*b.exact, sb ? sb->f : f_common, b.kind);
    const double f_top = std::min(ra.f.back(), rb.f.back());
    const TopDecade ta = top_decade(ra, f_top);
    const TopDecade tb = top_decade(rb, f_top);
    o.hf_slope_num_db_dec = ta.slope;
    o.hf_slope_den_db_dec = tb.slope;
    if (std::abs(ta.slope - tb.slope) > 2.0) {
        o.basis = OrientationBasis::hf_slope;
        return finish(ta.slope < tb.slope);
    }
    o.basis = OrientationBasis::hf_magnitude;
    if (std::abs(ta.mean_db - tb.mean_db) <= 0.01)
        throw Error(ErrorCode::ambiguous_orientation,
                    "high-frequency slopes and magnitudes tie; force the orientation");
    return finish(ta.mean_db < tb.mean_db);
}

CharacteristicRoots characteristic_roots_oracle(const RationalFunction& a, const RationalFunction& b,
                                                double axis_tol) {
    CharacteristicRoots out;
    const Polynomial chr = a.num * b.den + b.num * a.den;
    if (chr.is_zero()) throw Error(ErrorCode::invalid_argument, "Z1 + Z2 vanishes identically");
    if (chr.degree() >= 1) out.roots = poly_roots(chr);
    bool any_rhp = false;
    bool any_axis = false;
    for (const cplx& r : out.roots.roots) {
        const double tol = axis_tolerance(r, axis_tol);
        if (r.real() > tol) any_rhp = true;
        else if (r.real() >= -tol) any_axis = true;
    }
    out.verdict = any_rhp ? Verdict::unstable : any_axis ? Verdict::marginal : Verdict::stable;

    // Shared denominator roots survive in the product above, but a caller who
    // cancelled them before forming the ratio would lose them.
    if (a.den.degree() >= 1 && b.den.degree() >= 1) {
        const RootSet da = poly_roots(a.den);
        const RootSet db = poly_roots(b.den);
        const double ctol = std::max(da.cluster_tol, db.cluster_tol);
        for (const cplx& r : da.roots) {
            const bool shared = std::any_of(db.roots.begin(), db.roots.end(),
                                            [&](const cplx& q) { return std::abs(q - r) <= ctol; });
            if (!shared || r.imag() < 0) continue;
            const std::string where = "(" + fmt(r.real()) + (r.imag() != 0 ? " ± j" + fmt(r.imag()) : "") + ")";
            if (r.real() >= -axis_tolerance(r, axis_tol)) {
                out.hidden_mode_risk = true;
                out.notes.push_back("HiddenModeRisk: both denominators share the non-stable root " + where);
            } else {
                out.notes.push_back("both denominators share the stable root " + where);
            }
        }
    }
    return out;
}

SumCriterionResult impedance_sum_criterion(const RationalFunction& a, const RationalFunction& b, double axis_tol) {
    for (const RationalFunction* z : {&a, &b})
        if (count_rhp_roots(z->den, axis_tol).rhp > 0)
            throw Error(ErrorCode::precondition_rhp_poles,
                        "impedance-sum criterion needs both subsystems free of RHP poles");
    const RationalFunction sum = a + b;
    if (sum.num.is_zero()) throw Error(ErrorCode::invalid_argument, "Z1 + Z2 vanishes identically");
    SumCriterionResult out;
    const RhpCount z = count_rhp_roots(sum.num, axis_tol);
    const RhpCount p = count_rhp_roots(sum.den, axis_tol);
    out.rhp_zero_count = z.rhp;
    out.axis_zero_count = z.on_axis;
    out.winding = z.rhp - p.rhp;
    out.verdict = z.rhp > 0 ? Verdict::unstable : z.on_axis > 0 ? Verdict::marginal : Verdict::stable;
    return out;
}

namespace {

// Nonzero roots of p on the imaginary axis, one message per conjugate pair.
void flag_axis_roots(const Polynomial& p, const std::string& what, double axis_tol, std::vector<std::string>& flags) {
    if (p.degree() < 1) return;
    const RootSet rs = poly_roots(p);
    for (const cplx& r : rs.roots) {
        if (r == cplx{0.0, 0.0} || std::abs(r.real()) > axis_tolerance(r, axis_tol) || r.imag() < 0) continue;
        flags.push_back(what + " has a root on the imaginary axis at " + fmt(std::abs(r.imag()) / two_pi) + " Hz");
    }
}

// Span wide enough that every break of every polynomial is at least two decades inside.
void root_span(const Polynomial& p, double& lo, double& hi) {
    if (p.degree() < 1) return;
    for (const cplx& r : poly_roots(p).roots) {
        const double f = std::abs(r) / two_pi;
        if (f == 0.0) continue;
        lo = std::min(lo, f / 100.0);
        hi = std::max(hi, f * 100.0);
    }
}

Verdict rule_verdict(int N, int P) { return N == -P ? Verdict::stable : Verdict::unstable; }

}  // namespace

StabilityReport assess_stability(const SubsystemModel& a, const SubsystemModel& b, const AssessOptions& opts) {
    opts.grid.validate();
    if (!(opts.tol_deg > 0) || !(opts.axis_tol > 0) || !(opts.refine_tol > 0))
        throw Error(ErrorCode::invalid_argument, "tolerances must be positive");

    StabilityReport rep;
    if (opts.force_a_numerator) {
        a.validate();
        b.validate();
        rep.orientation.basis = OrientationBasis::user_forced;
        rep.orientation.a_is_numerator = *opts.force_a_numerator;
        rep.orientation.numerator_id = *opts.force_a_numerator ? a.id : b.id;
        rep.orientation.denominator_id = *opts.force_a_numerator ? b.id : a.id;
    } else {
        rep.orientation = select_proper_ratio(a, b, opts.grid);
    }
    const SubsystemModel& m1 = rep.orientation.a_is_numerator ? a : b;
    const SubsystemModel& m2 = rep.orientation.a_is_numerator ? b : a;
    rep.exact_mode = m1.exact && m2.exact;

    std::vector<std::string> marginal;
    bool undetermined = false;
    BodeSeries b1;
    BodeSeries b2;

    if (rep.exact_mode) {
        const RationalFunction& z1 = *m1.exact;
        const RationalFunction& z2 = *m2.exact;
        // Ratio poles on the axis put the Nyquist path through infinity; ratio
        // zeros there only pass it through the origin, far from -1.
        flag_axis_roots(z1.den, m1.id + " denominator", opts.axis_tol, marginal);
        flag_axis_roots(z2.num, m2.id + " numerator", opts.axis_tol, marginal);
        std::vector<std::string> zeros;
        flag_axis_roots(z1.num, m1.id + " numerator", opts.axis_tol, zeros);
        flag_axis_roots(z2.den, m2.id + " denominator", opts.axis_tol, zeros);
        for (const std::string& z : zeros) rep.evidence_notes.push_back(z + " (a ratio zero; harmless)");

        FrequencyGrid g = opts.grid;
        for (const Polynomial* p : {&z1.num, &z1.den, &z2.num, &z2.den}) root_span(*p, g.f_min, g.f_max);
        // Past the last break |ratio| is monotone; when it tends below 1, keep
        // going until the exterior region has closed.
        const int rd = z1.relative_degree() - z2.relative_degree();
        const double c_inf = rd == 0 ? std::abs((z1.num.leading() / z1.den.leading()) /
                                                (z2.num.leading() / z2.den.leading()))
                                     : (rd > 0 ? 0.0 : HUGE_VAL);
        for (int k = 0; k < 40 && c_inf < 1.0 &&
                        std::abs(z1(cplx{0.0, two_pi * g.f_max}) / z2(cplx{0.0, two_pi * g.f_max})) >= 1.0;
             ++k)
            g.f_max *= 10.0;
        rep.f_min = g.f_min;
        rep.f_max = g.f_max;
        if (marginal.empty()) {
            const std::vector<double> f = adaptive_grid({&z1, &z2}, g);
            b1 = bode(evaluate_response(z1, f, m1.kind, opts.axis_tol));
            b2 = bode(evaluate_response(z2, f, m2.kind, opts.axis_tol));
        }
        rep.numerator_census = census(z1, opts.axis_tol);
        rep.denominator_census = census(z2, opts.axis_tol);
    } else {
        // Sampled mode: the ratio is never formed; both sides live on one grid.
        std::vector<double> f;
        if (m1.sampled) f = m1.sampled->f;
        else if (m2.sampled) f = m2.sampled->f;
        const SampledResponse r1 = response_on(m1, f, opts.axis_tol);
        const SampledResponse r2 = response_on(m2, f, opts.axis_tol);
        b1 = bode(r1);
        b2 = bode(r2);
        rep.f_min = f.front();
        rep.f_max = f.back();
        rep.numerator_census = m1.exact ? census(*m1.exact, opts.axis_tol) : census(b1, opts.breakpoint);
        rep.denominator_census = m2.exact ? census(*m2.exact, opts.axis_tol) : census(b2, opts.breakpoint);
        for (const BodeSeries* s : {&b1, &b2})
            if (!s->ambiguous.empty()) {
                undetermined = true;
                rep.evidence_notes.push_back((s == &b1 ? m1.id : m2.id) +
                                             ": phase unwrap is ambiguous near " + fmt(s->f[s->ambiguous.front()]) +
                                             " Hz; crossing count not trusted");
            }
    }

    for (const RhpCensus* c : {&rep.numerator_census, &rep.denominator_census}) {
        if (c->determined) continue;
        undetermined = true;
        rep.evidence_notes.push_back((c == &rep.numerator_census ? m1.id : m2.id) +
                                     ": break-point census undetermined; an exact model is required");
        for (const BreakPoint& bp : c->breaks)
            if (bp.half_plane == HalfPlane::undetermined && !bp.note.empty())
                rep.evidence_notes.push_back("  break near " + fmt(bp.f_b) + " Hz: " + bp.note);
    }
    if (!undetermined) {
        rep.P_open_loop = open_loop_rhp_poles(rep.numerator_census, rep.denominator_census);
    }
    if (rep.numerator_census.on_axis_poles > 0 || rep.denominator_census.on_axis_zeros > 0)
        rep.evidence_notes.push_back("ratio has poles on the imaginary axis (origin poles are handled by the w = 0 step)");

    if (!b1.f.empty()) {
        const ExactPair ex{rep.exact_mode ? &*m1.exact : nullptr, rep.exact_mode ? &*m2.exact : nullptr};
        rep.regions = exterior_regions(b1, b2, opts.refine_tol, rep.exact_mode ? &ex : nullptr);
        CrossingSearch cs = find_crossings(b1, b2, rep.regions, opts.tol_deg, rep.exact_mode ? &ex : nullptr);
        rep.crossings = std::move(cs.crossings);
        marginal.insert(marginal.end(), cs.marginal.begin(), cs.marginal.end());
        rep.encirclements = count_encirclements(rep.crossings);
    }

    for (const std::string& m : marginal) rep.evidence_notes.push_back("MARGINAL: " + m);
    if (!marginal.empty()) rep.verdict = Verdict::marginal;
    else if (undetermined) rep.verdict = Verdict::indeterminate;
    else rep.verdict = rule_verdict(rep.encirclements.N, rep.P_open_loop);

    if (rep.exact_mode && opts.cross_checks) {
        const RationalFunction& z1 = *m1.exact;
        const RationalFunction& z2 = *m2.exact;
        Verdict w = Verdict::indeterminate;
        try {
            const int n = winding_number_oracle(z1 / z2, FrequencyGrid{rep.f_min, rep.f_max, 50, {}});
            w = rule_verdict(n, rep.P_open_loop);
            rep.evidence_notes.push_back("winding oracle: N = " + std::to_string(n));
        } catch (const Error& e) {
            w = (e.code() == ErrorCode::pole_on_axis || e.code() == ErrorCode::value_near_zero)
                    ? Verdict::marginal
                    : Verdict::indeterminate;
            rep.evidence_notes.push_back(std::string("winding oracle: ") + e.what());
        }
        rep.cross_checks["winding_number_oracle"] = w;

        const CharacteristicRoots cr = characteristic_roots_oracle(z1, z2, opts.axis_tol);
        rep.cross_checks["characteristic_roots_oracle"] = cr.verdict;
        for (const std::string& n : cr.notes) rep.evidence_notes.push_back(n);

        const bool decisive = rep.verdict == Verdict::stable || rep.verdict == Verdict::unstable;
        for (const auto& [name, v] : rep.cross_checks) {
            if (v == rep.verdict) continue;
            rep.evidence_notes.push_back(name + " disagrees: " + std::string(to_string(v)));
            if (decisive) rep.verdict = Verdict::indeterminate;
        }
    }
    return rep;
}

}  // namespace impstab
