#include "dirspec/poly.hpp"

#include <algorithm>
#include <cmath>

namespace dirspec {

void PolyFunc::trim() {
    while (!c_.empty() && c_.back() == Complex(0.0, 0.0)) c_.pop_back();
}

Complex PolyFunc::eval(Complex x) const {
    Complex acc(0.0, 0.0);
    for (auto it = c_.rbegin(); it != c_.rend(); ++it) acc = acc * x + *it;
    return acc;
}

std::pair<Complex, double> PolyFunc::eval_with_scale(Complex x) const {
    Complex acc(0.0, 0.0);
    double scale = 0.0;
    Complex xp(1.0, 0.0);
    for (const Complex& ck : c_) {
        Complex term = ck * xp;
        acc += term;
        scale += std::abs(term);
        xp *= x;
    }
    return {acc, scale};
}

PolyFunc PolyFunc::derivative() const {
    if (c_.size() <= 1) return PolyFunc();
    std::vector<Complex> d(c_.size() - 1);
    for (std::size_t k = 1; k < c_.size(); ++k) d[k - 1] = static_cast<double>(k) * c_[k];
    return PolyFunc(std::move(d));
}

PolyFunc PolyFunc::derivative(int k) const {
    PolyFunc p = *this;
    for (int i = 0; i < k && !p.is_zero(); ++i) p = p.derivative();
    return p;
}

PolyFunc PolyFunc::antiderivative() const {
    if (c_.empty()) return PolyFunc();
    std::vector<Complex> a(c_.size() + 1, Complex(0.0, 0.0));
    for (std::size_t k = 0; k < c_.size(); ++k) a[k + 1] = c_[k] / static_cast<double>(k + 1);
    return PolyFunc(std::move(a));
}

PolyFunc PolyFunc::compose_one_minus_x() const {
    // p(1-x) = sum_k c_k (1-x)^k via iterated binomials; degrees stay small
    std::vector<Complex> out(c_.size(), Complex(0.0, 0.0));
    std::vector<Complex> pw{Complex(1.0, 0.0)}; // (1-x)^k, ascending
    for (std::size_t k = 0; k < c_.size(); ++k) {
        for (std::size_t j = 0; j < pw.size(); ++j) out[j] += c_[k] * pw[j];
        // multiply pw by (1-x)
        std::vector<Complex> next(pw.size() + 1, Complex(0.0, 0.0));
        for (std::size_t j = 0; j < pw.size(); ++j) {
            next[j] += pw[j];
            next[j + 1] -= pw[j];
        }
        pw = std::move(next);
    }
    return PolyFunc(std::move(out));
}

double PolyFunc::max_abs_coeff() const {
    double m = 0.0;
    for (const Complex& v : c_) m = std::max(m, std::abs(v));
    return m;
}

PolyFunc& PolyFunc::operator+=(const PolyFunc& o) {
    if (o.c_.size() > c_.size()) c_.resize(o.c_.size(), Complex(0.0, 0.0));
    for (std::size_t k = 0; k < o.c_.size(); ++k) c_[k] += o.c_[k];
    trim();
    return *this;
}

PolyFunc operator-(const PolyFunc& a, const PolyFunc& b) {
    std::vector<Complex> out(std::max(a.c_.size(), b.c_.size()), Complex(0.0, 0.0));
    for (std::size_t k = 0; k < a.c_.size(); ++k) out[k] += a.c_[k];
    for (std::size_t k = 0; k < b.c_.size(); ++k) out[k] -= b.c_[k];
    return PolyFunc(std::move(out));
}

PolyFunc operator*(const PolyFunc& a, const PolyFunc& b) {
    if (a.is_zero() || b.is_zero()) return PolyFunc();
    std::vector<Complex> out(a.c_.size() + b.c_.size() - 1, Complex(0.0, 0.0));
    for (std::size_t i = 0; i < a.c_.size(); ++i)
        for (std::size_t j = 0; j < b.c_.size(); ++j) out[i + j] += a.c_[i] * b.c_[j];
    return PolyFunc(std::move(out));
}

PolyFunc operator*(Complex s, const PolyFunc& p) {
    std::vector<Complex> out(p.c_);
    for (Complex& v : out) v *= s;
    return PolyFunc(std::move(out));
}

int first_nonzero_derivative(const PolyFunc& p, Complex a, double zero_tol) {
    PolyFunc d = p;
    int deg = p.degree();
    for (int j = 0; j <= deg; ++j) {
        auto [val, scale] = d.eval_with_scale(a);
        if (std::abs(val) > zero_tol * scale) return j;
        d = d.derivative();
    }
    return -1;
}

} // namespace dirspec
