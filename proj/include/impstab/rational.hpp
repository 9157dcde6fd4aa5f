#pragma once

#include <string>

#include "impstab/polynomial.hpp"

namespace impstab {

// num/den pair. Nothing in the library ever cancels common factors.
struct RationalFunction {
    Polynomial num{1.0};
    Polynomial den{1.0};
    std::string label;

    RationalFunction() = default;
    RationalFunction(Polynomial n, Polynomial d, std::string lbl = {});

    [[nodiscard]] cplx operator()(cplx s) const { return num(s) / den(s); }
    // F'(s)/F(s) = N'/N - D'/D. Its real part on s = jw is d(arg F)/dw, its
    // imaginary part is -d(ln|F|)/dw.
    [[nodiscard]] cplx log_derivative(cplx s) const;
    // deg(den) - deg(num); magnitude falls as 20*relative_degree dB/dec at high frequency.
    [[nodiscard]] int relative_degree() const { return den.degree() - num.degree(); }
};

enum class RatOp { add, sub, mul, div, reciprocal };

// Exact cross-multiplied arithmetic. For reciprocal, b is ignored.
[[nodiscard]] RationalFunction rat_arith(RatOp op, const RationalFunction& a, const RationalFunction& b);

[[nodiscard]] RationalFunction operator+(const RationalFunction& a, const RationalFunction& b);
[[nodiscard]] RationalFunction operator-(const RationalFunction& a, const RationalFunction& b);
[[nodiscard]] RationalFunction operator*(const RationalFunction& a, const RationalFunction& b);
[[nodiscard]] RationalFunction operator/(const RationalFunction& a, const RationalFunction& b);
[[nodiscard]] RationalFunction reciprocal(const RationalFunction& a);

// Third-order delay approximant with x = T*s:
// (1 - x/2 + x^2/8 - x^3/48) / (1 + x/2 + x^2/8 + x^3/48).
[[nodiscard]] RationalFunction pade_delay(double t_delay);

}  // namespace impstab
