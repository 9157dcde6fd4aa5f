#include "impstab/polynomial.hpp"

#include <algorithm>
#include <cmath>

#include "impstab/error.hpp"

namespace impstab {

Polynomial::Polynomial() : c_{0.0} {}

Polynomial::Polynomial(std::vector<double> ascending) : c_(std::move(ascending)) {
    if (c_.empty()) c_.push_back(0.0);
    for (double v : c_) {
        if (!std::isfinite(v)) throw Error(ErrorCode::non_finite, "polynomial coefficient is not finite");
    }
    trim();
}

Polynomial::Polynomial(std::initializer_list<double> ascending)
    : Polynomial(std::vector<double>(ascending)) {}

Polynomial Polynomial::monomial(double c, int power) {
    if (power < 0) throw Error(ErrorCode::invalid_argument, "negative monomial power");
    std::vector<double> v(static_cast<std::size_t>(power) + 1, 0.0);
    v.back() = c;
    return Polynomial(std::move(v));
}

void Polynomial::trim() {
    while (c_.size() > 1 && c_.back() == 0.0) c_.pop_back();
}

int Polynomial::origin_multiplicity() const {
    if (is_zero()) return 0;
    int k = 0;
    while (c_[static_cast<std::size_t>(k)] == 0.0) ++k;
    return k;
}

double Polynomial::max_abs_coeff() const {
    double m = 0.0;
    for (double v : c_) m = std::max(m, std::abs(v));
    return m;
}

cplx Polynomial::operator()(cplx s) const {
    cplx acc = 0.0;
    for (auto it = c_.rbegin(); it != c_.rend(); ++it) acc = acc * s + *it;
    return acc;
}

double Polynomial::operator()(double s) const {
    double acc = 0.0;
    for (auto it = c_.rbegin(); it != c_.rend(); ++it) acc = acc * s + *it;
    return acc;
}

double Polynomial::abs_scale(cplx s) const {
    const double r = std::abs(s);
    double acc = 0.0;
    for (auto it = c_.rbegin(); it != c_.rend(); ++it) acc = acc * r + std::abs(*it);
    return acc;
}

Polynomial Polynomial::derivative() const {
    if (c_.size() == 1) return Polynomial{};
    std::vector<double> d(c_.size() - 1);
    for (std::size_t k = 1; k < c_.size(); ++k) d[k - 1] = static_cast<double>(k) * c_[k];
    return Polynomial(std::move(d));
}

Polynomial operator+(const Polynomial& a, const Polynomial& b) {
    std::vector<double> v(std::max(a.c_.size(), b.c_.size()), 0.0);
    for (std::size_t k = 0; k < v.size(); ++k) v[k] = a[k] + b[k];
    return Polynomial(std::move(v));
}

Polynomial operator-(const Polynomial& a, const Polynomial& b) { return a + (-1.0 * b); }

Polynomial operator*(const Polynomial& a, const Polynomial& b) {
    if (a.is_zero() || b.is_zero()) return Polynomial{};
    std::vector<double> v(a.c_.size() + b.c_.size() - 1, 0.0);
    for (std::size_t i = 0; i < a.c_.size(); ++i)
        for (std::size_t j = 0; j < b.c_.size(); ++j) v[i + j] += a.c_[i] * b.c_[j];
    return Polynomial(std::move(v));
}

Polynomial operator*(double k, const Polynomial& a) {
    std::vector<double> v = a.c_;
    for (double& x : v) x *= k;
    return Polynomial(std::move(v));
}

}  // namespace impstab
