#include "dirspec/coeffs.hpp"

#include <cmath>

namespace dirspec {

namespace {

// Derivative values f^{(j)}(x0), j = 0..count-1, exact from the polynomial.
std::vector<Complex> derivative_values(const PolyFunc& f, double x0, int count) {
    std::vector<Complex> vals;
    vals.reserve(count);
    PolyFunc d = f;
    for (int j = 0; j < count; ++j) {
        vals.push_back(d.eval(x0));
        d = d.derivative();
    }
    return vals;
}

struct EndpointSigmas {
    // index k-1 holds sigma_k at the endpoint
    std::vector<Complex> minus_at0, plus_at1, minus_at1, plus_at0;
};

EndpointSigmas endpoint_sigmas(const DiracSystem& sys, int n) {
    auto [qp, qm] = q_pm(sys);
    std::vector<Complex> qp0 = derivative_values(qp, 0.0, n);
    std::vector<Complex> qp1 = derivative_values(qp, 1.0, n);
    std::vector<Complex> qm0 = derivative_values(qm, 0.0, n);
    std::vector<Complex> qm1 = derivative_values(qm, 1.0, n);
    EndpointSigmas out;
    for (int k = 1; k <= n; ++k) {
        const DerivPolynomial& s = sigma(k);
        out.minus_at0.push_back(evaluate(s, qp0, qm0)); // sigma^-: A -> q_+, B -> q_-
        out.minus_at1.push_back(evaluate(s, qp1, qm1));
        out.plus_at0.push_back(evaluate(s, qm0, qp0)); // sigma^+: A -> q_-, B -> q_+
        out.plus_at1.push_back(evaluate(s, qm1, qp1));
    }
    return out;
}

// Shared kernel for both half-planes:
//   c_k = J13 (-1)^{k-1} X_k + J42 Y_k + Jcross * sum_{j=1}^{k-1} (-1)^j X_j Y_{k-j},
// where (X, Y, Jcross) = (sigma^-(0), sigma^+(1), -J14) gives c_k^+ and
// (sigma^-(1), sigma^+(0), +J32) gives c_k^-.
std::pair<Complex, double> assemble_ck(int k, Complex J13, Complex J42, Complex Jcross,
                                       const std::vector<Complex>& X,
                                       const std::vector<Complex>& Y) {
    double sgn = (k % 2 == 1) ? 1.0 : -1.0; // (-1)^{k-1}
    Complex val = J13 * sgn * X[k - 1] + J42 * Y[k - 1];
    double scale = std::abs(J13 * X[k - 1]) + std::abs(J42 * Y[k - 1]);
    for (int j = 1; j <= k - 1; ++j) {
        double js = (j % 2 == 0) ? 1.0 : -1.0; // (-1)^j
        Complex term = Jcross * js * X[j - 1] * Y[k - j - 1];
        val += term;
        scale += std::abs(term);
    }
    return {val, scale};
}

} // namespace

Complex sigma_endpoint(const DiracSystem& sys, Sign sign, int k, int endpoint) {
    auto [qp, qm] = q_pm(sys);
    double x0 = endpoint == 0 ? 0.0 : 1.0;
    const DerivPolynomial& s = sigma(k);
    if (sign == Sign::Plus)
        return evaluate(s, derivative_values(qm, x0, k), derivative_values(qp, x0, k));
    return evaluate(s, derivative_values(qp, x0, k), derivative_values(qm, x0, k));
}

bool CoefficientTable::nonzero_plus(int k, double zero_tol) const {
    return std::abs(c_plus[k]) > zero_tol * scale_plus[k];
}

bool CoefficientTable::nonzero_minus(int k, double zero_tol) const {
    return std::abs(c_minus[k]) > zero_tol * scale_minus[k];
}

CoefficientTable coefficient_table(const DiracSystem& sys, const MinorSet& ms, int n,
                                   double zero_tol) {
    CoefficientTable tbl;
    tbl.n = n;
    tbl.c_plus.push_back(ms.J32);
    tbl.scale_plus.push_back(std::abs(ms.J32));
    tbl.c_minus.push_back(ms.J14);
    tbl.scale_minus.push_back(std::abs(ms.J14));

    EndpointSigmas es = endpoint_sigmas(sys, n);
    for (int k = 1; k <= n; ++k) {
        auto [cp, sp] = assemble_ck(k, ms.J13, ms.J42, -ms.J14, es.minus_at0, es.plus_at1);
        auto [cm, sm] = assemble_ck(k, ms.J13, ms.J42, ms.J32, es.minus_at1, es.plus_at0);
        tbl.c_plus.push_back(cp);
        tbl.scale_plus.push_back(sp);
        tbl.c_minus.push_back(cm);
        tbl.scale_minus.push_back(sm);
    }
    for (int k = 0; k <= n && !tbl.k_plus; ++k)
        if (tbl.nonzero_plus(k, zero_tol)) tbl.k_plus = k;
    for (int k = 0; k <= n && !tbl.k_minus; ++k)
        if (tbl.nonzero_minus(k, zero_tol)) tbl.k_minus = k;
    return tbl;
}

CoefficientTable coefficient_table(const DiracSystem& sys, const BoundarySpec& bc, int n,
                                   double zero_tol) {
    return coefficient_table(sys, minors(bc), n, zero_tol);
}

std::vector<Complex> c123_closed_forms(const DiracSystem& sys, const MinorSet& ms,
                                       Sign side) {
    // The cross-term signs at k = 2 are +J14 q_+(0) q_-(1) and -J32 q_+(1) q_-(0):
    // the expansion convolution gives -Jcross (-1)^1 sigma_1 sigma_1, and an
    // independent integration cross-check pins the same sign to 1e-8.
    auto [qp, qm] = q_pm(sys);
    auto qpv = [&](int j, double x) { return qp.derivative(j).eval(x); };
    auto qmv = [&](int j, double x) { return qm.derivative(j).eval(x); };
    if (side == Sign::Plus) {
        Complex c1 = ms.J13 * qpv(0, 0) + ms.J42 * qmv(0, 1);
        Complex c2 = ms.J13 * qpv(1, 0) - ms.J42 * qmv(1, 1) + ms.J14 * qpv(0, 0) * qmv(0, 1);
        Complex c3 = ms.J13 * (qpv(2, 0) - qpv(0, 0) * qpv(0, 0) * qmv(0, 0)) +
                     ms.J42 * (qmv(2, 1) - qmv(0, 1) * qmv(0, 1) * qpv(0, 1)) +
                     ms.J14 * (qpv(1, 0) * qmv(0, 1) - qpv(0, 0) * qmv(1, 1));
        return {c1, c2, c3};
    }
    Complex c1 = ms.J13 * qpv(0, 1) + ms.J42 * qmv(0, 0);
    Complex c2 = ms.J13 * qpv(1, 1) - ms.J42 * qmv(1, 0) - ms.J32 * qpv(0, 1) * qmv(0, 0);
    Complex c3 = ms.J13 * (qpv(2, 1) - qpv(0, 1) * qpv(0, 1) * qmv(0, 1)) +
                 ms.J42 * (qmv(2, 0) - qmv(0, 0) * qmv(0, 0) * qpv(0, 0)) -
                 ms.J32 * (qpv(1, 1) * qmv(0, 0) - qpv(0, 1) * qmv(1, 0));
    return {c1, c2, c3};
}

C123Report lemma_c123_check(const DiracSystem& sys, const BoundarySpec& bc,
                            double rel_tol) {
    MinorSet ms = minors(bc);
    CoefficientTable tbl = coefficient_table(sys, ms, 3);
    std::vector<Complex> plus = c123_closed_forms(sys, ms, Sign::Plus);
    std::vector<Complex> minus = c123_closed_forms(sys, ms, Sign::Minus);
    C123Report rep;
    for (int k = 1; k <= 3; ++k) {
        Complex gp = tbl.c_plus[k], ep = plus[k - 1];
        if (std::abs(gp - ep) > rel_tol * (1.0 + std::abs(ep))) {
            rep.ok = false;
            rep.mismatches.push_back({k, Sign::Plus, gp, ep});
        }
        Complex gm = tbl.c_minus[k], em = minus[k - 1];
        if (std::abs(gm - em) > rel_tol * (1.0 + std::abs(em))) {
            rep.ok = false;
            rep.mismatches.push_back({k, Sign::Minus, gm, em});
        }
    }
    return rep;
}

} // namespace dirspec
