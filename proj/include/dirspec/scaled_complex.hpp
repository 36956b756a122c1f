#pragma once

#include <cmath>
#include <complex>

namespace dirspec {

/// Complex value stored as mantissa * e^exponent with |mantissa| in [1,2) or 0.
///
/// The characteristic determinant behaves like e^{|b1| t} on the imaginary
/// axis, which leaves plain doubles around t ~ 700; carrying the magnitude in
/// a separate natural-log exponent keeps every scan and fit in range.
struct ScaledComplex {
    std::complex<double> mantissa{0.0, 0.0};
    double exponent{0.0};

    ScaledComplex() = default;
    ScaledComplex(std::complex<double> m, double e) : mantissa(m), exponent(e) { normalize(); }

    static ScaledComplex from(std::complex<double> value) { return ScaledComplex(value, 0.0); }

    static ScaledComplex zero() { return ScaledComplex(); }

    bool is_zero() const { return mantissa == std::complex<double>(0.0, 0.0); }

    /// Restores |mantissa| in [1,2) (we pin it to exactly 1), exponent 0 for zero.
    void normalize() {
        double a = std::abs(mantissa);
        if (a == 0.0 || !std::isfinite(a)) {
            if (!std::isfinite(a)) return; // propagate NaN/Inf untouched
            mantissa = {0.0, 0.0};
            exponent = 0.0;
            return;
        }
        mantissa /= a;
        exponent += std::log(a);
    }

    double log_abs() const { return is_zero() ? -std::numeric_limits<double>::infinity()
                                              : std::log(std::abs(mantissa)) + exponent; }

    /// May overflow/underflow to inf/0 when the exponent is out of double range.
    std::complex<double> to_complex() const { return mantissa * std::exp(exponent); }

    ScaledComplex times_exp(double delta) const { return ScaledComplex(mantissa, exponent + delta); }

    friend ScaledComplex operator*(const ScaledComplex& a, const ScaledComplex& b) {
        if (a.is_zero() || b.is_zero()) return zero();
        return ScaledComplex(a.mantissa * b.mantissa, a.exponent + b.exponent);
    }

    friend ScaledComplex operator*(const ScaledComplex& a, std::complex<double> c) {
        return a * from(c);
    }

    friend ScaledComplex operator*(std::complex<double> c, const ScaledComplex& a) {
        return a * from(c);
    }

    friend ScaledComplex operator+(const ScaledComplex& a, const ScaledComplex& b) {
        if (a.is_zero()) return b;
        if (b.is_zero()) return a;
        // align on the larger exponent; 750 decades below it the term vanishes
        const ScaledComplex& hi = (a.exponent >= b.exponent) ? a : b;
        const ScaledComplex& lo = (a.exponent >= b.exponent) ? b : a;
        double d = lo.exponent - hi.exponent;
        if (d < -745.0) return hi;
        return ScaledComplex(hi.mantissa + lo.mantissa * std::exp(d), hi.exponent);
    }

    friend ScaledComplex operator-(const ScaledComplex& a, const ScaledComplex& b) {
        return a + ScaledComplex(-b.mantissa, b.exponent);
    }

    friend ScaledComplex operator/(const ScaledComplex& a, const ScaledComplex& b) {
        return ScaledComplex(a.mantissa / b.mantissa, a.exponent - b.exponent);
    }
};

inline double abs_ratio(const ScaledComplex& a, const ScaledComplex& b) {
    if (a.is_zero()) return 0.0;
    if (b.is_zero()) return std::numeric_limits<double>::infinity();
    return std::exp(a.log_abs() - b.log_abs());
}

} // namespace dirspec
