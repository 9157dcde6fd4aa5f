#include "impstab/rational.hpp"

#include "impstab/error.hpp"

namespace impstab {

RationalFunction::RationalFunction(Polynomial n, Polynomial d, std::string lbl)
    : num(std::move(n)), den(std::move(d)), label(std::move(lbl)) {
    if (den.is_zero()) throw Error(ErrorCode::divisor_zero, "rational function with zero denominator");
}

cplx RationalFunction::log_derivative(cplx s) const {
    return num.derivative()(s) / num(s) - den.derivative()(s) / den(s);
}

RationalFunction rat_arith(RatOp op, const RationalFunction& a, const RationalFunction& b) {
    switch (op) {
        case RatOp::add: return {a.num * b.den + b.num * a.den, a.den * b.den};
        case RatOp::sub: return {a.num * b.den - b.num * a.den, a.den * b.den};
        case RatOp::mul: return {a.num * b.num, a.den * b.den};
        case RatOp::div:
            if (b.num.is_zero()) throw Error(ErrorCode::divisor_zero, "division by a zero rational function");
            return {a.num * b.den, a.den * b.num};
        case RatOp::reciprocal:
            if (a.num.is_zero()) throw Error(ErrorCode::divisor_zero, "reciprocal of a zero rational function");
            return {a.den, a.num};
    }
    throw Error(ErrorCode::invalid_argument, "unknown rational operation");
}

RationalFunction operator+(const RationalFunction& a, const RationalFunction& b) { return rat_arith(RatOp::add, a, b); }
RationalFunction operator-(const RationalFunction& a, const RationalFunction& b) { return rat_arith(RatOp::sub, a, b); }
RationalFunction operator*(const RationalFunction& a, const RationalFunction& b) { return rat_arith(RatOp::mul, a, b); }
RationalFunction operator/(const RationalFunction& a, const RationalFunction& b) { return rat_arith(RatOp::div, a, b); }
RationalFunction reciprocal(const RationalFunction& a) { return rat_arith(RatOp::reciprocal, a, a); }

RationalFunction pade_delay(double t_delay) {
    if (!(t_delay >= 0.0)) throw Error(ErrorCode::invalid_argument, "delay must be non-negative");
    const double t = t_delay;
    Polynomial num{1.0, -t / 2.0, t * t / 8.0, -t * t * t / 48.0};
    Polynomial den{1.0, t / 2.0, t * t / 8.0, t * t * t / 48.0};
    return {num, den, "delay"};
}

}  // namespace impstab
