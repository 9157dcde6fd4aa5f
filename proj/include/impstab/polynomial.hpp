#pragma once

#include <complex>
#include <cstddef>
#include <initializer_list>
#include <span>
#include <vector>

namespace impstab {

using cplx = std::complex<double>;

// Real polynomial in s, coefficients stored in ascending powers.
class Polynomial {
  public:
    Polynomial();  // the zero polynomial
    explicit Polynomial(std::vector<double> ascending);
    Polynomial(std::initializer_list<double> ascending);

    [[nodiscard]] static Polynomial monomial(double c, int power);

    [[nodiscard]] int degree() const { return static_cast<int>(c_.size()) - 1; }
    [[nodiscard]] bool is_zero() const { return c_.size() == 1 && c_[0] == 0.0; }
    [[nodiscard]] std::span<const double> coeffs() const { return c_; }
    [[nodiscard]] double operator[](std::size_t k) const { return k < c_.size() ? c_[k] : 0.0; }
    [[nodiscard]] double leading() const { return c_.back(); }
    // Number of exactly-zero low-order coefficients, i.e. multiplicity of the root at s = 0.
    [[nodiscard]] int origin_multiplicity() const;
    [[nodiscard]] double max_abs_coeff() const;

    [[nodiscard]] cplx operator()(cplx s) const;
    [[nodiscard]] double operator()(double s) const;
    // Sum of |c_k|·|s|^k, the natural scale for judging a residual |p(s)|.
    [[nodiscard]] double abs_scale(cplx s) const;

    [[nodiscard]] Polynomial derivative() const;

    friend Polynomial operator+(const Polynomial& a, const Polynomial& b);
    friend Polynomial operator-(const Polynomial& a, const Polynomial& b);
    friend Polynomial operator*(const Polynomial& a, const Polynomial& b);
    friend Polynomial operator*(double k, const Polynomial& a);
    friend Polynomial operator-(const Polynomial& a) { return -1.0 * a; }
    friend bool operator==(const Polynomial& a, const Polynomial& b) { return a.c_ == b.c_; }

  private:
    void trim();
    std::vector<double> c_;
};

}  // namespace impstab
