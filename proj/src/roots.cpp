#include "impstab/roots.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>

#include "impstab/error.hpp"

namespace impstab {
namespace {

// Parlett-Reinsch diagonal balancing; leaves eigenvalues unchanged.
void balance(Eigen::MatrixXd& a) {
    const Eigen::Index n = a.rows();
    bool done = false;
    while (!done) {
        done = true;
        for (Eigen::Index i = 0; i < n; ++i) {
            double c = 0.0;
            double r = 0.0;
            for (Eigen::Index j = 0; j < n; ++j) {
                if (j == i) continue;
                c += std::abs(a(j, i));
                r += std::abs(a(i, j));
            }
            if (c == 0.0 || r == 0.0) continue;
            const double s = c + r;
            double g = r / 2.0;
            double f = 1.0;
            while (c < g) {
                f *= 2.0;
                c *= 4.0;
            }
            g = r * 2.0;
            while (c >= g) {
                f /= 2.0;
                c /= 4.0;
            }
            if ((c + r) / f < 0.95 * s) {
                done = false;
                a.row(i) /= f;
                a.col(i) *= f;
            }
        }
    }
}

void newton_polish(const Polynomial& q, std::vector<cplx>& r) {
    const Polynomial dq = q.derivative();
    for (int pass = 0; pass < 3; ++pass) {
        for (cplx& x : r) {
            const cplx fx = q(x);
            const cplx dfx = dq(x);
            if (std::abs(dfx) == 0.0) continue;
            const cplx y = x - fx / dfx;
            if (std::isfinite(y.real()) && std::isfinite(y.imag()) && std::abs(q(y)) < std::abs(fx)) x = y;
        }
    }
}

// Average each upper-half root with its closest lower-half partner.
void enforce_conjugates(std::vector<cplx>& r) {
    std::vector<cplx> real_like;
    std::vector<cplx> upper;
    std::vector<cplx> lower;
    for (const cplx& x : r) {
        const double tol = 1e-10 * std::max(1.0, std::abs(x));
        if (std::abs(x.imag()) <= tol) real_like.emplace_back(x.real(), 0.0);
        else if (x.imag() > 0) upper.push_back(x);
        else lower.push_back(x);
    }
    if (upper.size() != lower.size()) return;
    std::vector<cplx> out = real_like;
    std::vector<bool> used(lower.size(), false);
    for (const cplx& u : upper) {
        std::size_t best = lower.size();
        double dbest = 0.0;
        for (std::size_t k = 0; k < lower.size(); ++k) {
            if (used[k]) continue;
            const double d = std::abs(std::conj(lower[k]) - u);
            if (best == lower.size() || d < dbest) {
                best = k;
                dbest = d;
            }
        }
        used[best] = true;
        const cplx m = 0.5 * (u + std::conj(lower[best]));
        out.push_back(m);
        out.push_back(std::conj(m));
    }
    r = std::move(out);
}

}  // namespace

double RootSet::max_magnitude() const {
    double m = 0.0;
    for (const cplx& x : roots) m = std::max(m, std::abs(x));
    return m;
}

RootSet poly_roots(const Polynomial& p) {
    if (p.degree() < 1) throw Error(ErrorCode::no_roots, "polynomial of degree 0 has no roots");

    const int m0 = p.origin_multiplicity();
    std::vector<cplx> roots(static_cast<std::size_t>(m0), cplx{0.0, 0.0});
    auto all = p.coeffs();
    Polynomial q(std::vector<double>(all.begin() + m0, all.end()));
    const int n = q.degree();

    if (n >= 1) {
        // s = sigma*z puts the root magnitudes around unity before the eigen-solve.
        const double lc0 = std::log(std::abs(q[0]));
        const double lcn = std::log(std::abs(q.leading()));
        const double log_sigma = (lc0 - lcn) / n;
        Eigen::MatrixXd comp = Eigen::MatrixXd::Zero(n, n);
        for (int i = 1; i < n; ++i) comp(i, i - 1) = 1.0;
        for (int k = 0; k < n; ++k) {
            const double c = q[static_cast<std::size_t>(k)];
            if (c == 0.0) continue;
            const double mag = std::exp(std::log(std::abs(c)) + (k - n) * log_sigma - lcn);
            const double sgn = (c > 0) == (q.leading() > 0) ? 1.0 : -1.0;
            comp(k, n - 1) = -sgn * mag;
        }
        balance(comp);
        Eigen::EigenSolver<Eigen::MatrixXd> es(comp, false);
        if (es.info() != Eigen::Success) throw Error(ErrorCode::no_roots, "eigenvalue iteration failed");
        const double sigma = std::exp(log_sigma);
        std::vector<cplx> found;
        for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i) found.push_back(sigma * es.eigenvalues()[i]);
        newton_polish(q, found);
        enforce_conjugates(found);
        roots.insert(roots.end(), found.begin(), found.end());
    }

    std::sort(roots.begin(), roots.end(), [](const cplx& a, const cplx& b) {
        return a.real() != b.real() ? a.real() < b.real() : a.imag() < b.imag();
    });
    RootSet rs{std::move(roots), 0.0};
    rs.cluster_tol = 1e-6 * std::max(1.0, rs.max_magnitude());
    return rs;
}

RhpCount count_rhp_roots(const RootSet& rs, double axis_tol) {
    RhpCount c;
    for (const cplx& r : rs.roots) {
        const double tol = axis_tolerance(r, axis_tol);
        if (r.real() > tol) ++c.rhp;
        else if (r.real() >= -tol) ++c.on_axis;
        else ++c.lhp;
    }
    return c;
}

RhpCount count_rhp_roots(const Polynomial& p, double axis_tol) {
    if (p.is_zero()) throw Error(ErrorCode::no_roots, "zero polynomial");
    if (p.degree() == 0) return {};
    return count_rhp_roots(poly_roots(p), axis_tol);
}

RouthResult routh_rhp_count(const Polynomial& p) {
    if (p.is_zero()) throw Error(ErrorCode::no_roots, "zero polynomial");
    const int n = p.degree();
    if (n == 0) return {};

    // Rescale s -> sigma*z (sigma > 0 keeps half-planes) to tame the coefficient spread.
    const double sigma = (p[0] != 0.0) ? std::pow(std::abs(p[0] / p.leading()), 1.0 / n) : 1.0;
    std::vector<double> a(static_cast<std::size_t>(n) + 1);
    for (int k = 0; k <= n; ++k) a[static_cast<std::size_t>(k)] = p[static_cast<std::size_t>(k)] * std::pow(sigma, k);

    const std::size_t width = static_cast<std::size_t>(n) / 2 + 1;
    std::vector<std::vector<double>> rows(2, std::vector<double>(width, 0.0));
    for (int k = n, j = 0; k >= 0; k -= 2, ++j) rows[0][static_cast<std::size_t>(j)] = a[static_cast<std::size_t>(k)];
    for (int k = n - 1, j = 0; k >= 0; k -= 2, ++j) rows[1][static_cast<std::size_t>(j)] = a[static_cast<std::size_t>(k)];

    auto normalize = [](std::vector<double>& row) {
        double m = 0.0;
        for (double v : row) m = std::max(m, std::abs(v));
        if (m > 0.0)
            for (double& v : row) v /= m;
        return m;
    };
    normalize(rows[0]);

    constexpr double zero_tol = 1e-10;
    constexpr double eps_sub = 1e-9;
    double row_scale = 1.0;  // magnitude a numerically-zero row is judged against
    for (int i = 1; i <= n; ++i) {
        std::vector<double>& row = rows[static_cast<std::size_t>(i)];
        const double m = normalize(row);
        if (m <= zero_tol * row_scale) return {0, true, n - i + 1};
        if (std::abs(row[0]) <= zero_tol) row[0] = eps_sub;
        if (i == n) break;
        const std::vector<double>& prev = rows[static_cast<std::size_t>(i) - 1];
        std::vector<double> next(width, 0.0);
        row_scale = 0.0;
        for (std::size_t j = 0; j + 1 < width; ++j) {
            next[j] = prev[j + 1] - prev[0] * row[j + 1] / row[0];
            row_scale = std::max(row_scale, std::abs(prev[j + 1]) + std::abs(prev[0] * row[j + 1] / row[0]));
        }
        if (row_scale == 0.0) row_scale = 1.0;
        rows.push_back(std::move(next));
    }

    int changes = 0;
    for (int i = 1; i <= n; ++i) {
        if ((rows[static_cast<std::size_t>(i)][0] > 0) != (rows[static_cast<std::size_t>(i) - 1][0] > 0)) ++changes;
    }
    return {changes, false, 0};
}

}  // namespace impstab
