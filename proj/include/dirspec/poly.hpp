#pragma once

#include <complex>
#include <initializer_list>
#include <vector>

namespace dirspec {

using Complex = std::complex<double>;

/// Polynomial in x with complex coefficients, ascending power order.
///
/// Potentials Q12/Q21 are restricted to polynomials so that every derivative
/// and antiderivative used by the expansion machinery is exact.
class PolyFunc {
public:
    PolyFunc() = default;
    explicit PolyFunc(std::vector<Complex> coeffs) : c_(std::move(coeffs)) { trim(); }
    PolyFunc(std::initializer_list<Complex> coeffs) : c_(coeffs) { trim(); }

    static PolyFunc zero() { return PolyFunc(); }
    static PolyFunc constant(Complex v) { return PolyFunc({v}); }

    const std::vector<Complex>& coeffs() const { return c_; }
    bool is_zero() const { return c_.empty(); }
    int degree() const { return static_cast<int>(c_.size()) - 1; } // -1 for zero poly

    Complex eval(Complex x) const;

    /// eval() plus the sum of |term| magnitudes, the natural cancellation scale.
    std::pair<Complex, double> eval_with_scale(Complex x) const;

    PolyFunc derivative() const;
    PolyFunc derivative(int k) const;

    /// Antiderivative vanishing at 0 (integration constant 0).
    PolyFunc antiderivative() const;

    /// p(1-x), expanded exactly on coefficients.
    PolyFunc compose_one_minus_x() const;

    double max_abs_coeff() const;

    PolyFunc& operator+=(const PolyFunc& o);
    friend PolyFunc operator+(PolyFunc a, const PolyFunc& b) { a += b; return a; }
    friend PolyFunc operator-(const PolyFunc& a, const PolyFunc& b);
    friend PolyFunc operator*(const PolyFunc& a, const PolyFunc& b);
    friend PolyFunc operator*(Complex s, const PolyFunc& p);

private:
    void trim();
    std::vector<Complex> c_;
};

/// First j with p^{(j)}(a) considered nonzero under the relative threshold
/// policy, or -1 when every derivative (equivalently the polynomial) vanishes.
int first_nonzero_derivative(const PolyFunc& p, Complex a, double zero_tol);

} // namespace dirspec
