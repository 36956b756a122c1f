#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "dirspec/model.hpp"

using namespace dirspec;

namespace {

std::mt19937_64 rng(0);

Complex rand_complex() {
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    return {u(rng), u(rng)};
}

BoundarySpec rand_bc() {
    for (;;) {
        std::array<std::array<Complex, 4>, 2> rows;
        for (auto& r : rows)
            for (auto& v : r) v = rand_complex();
        try {
            return BoundarySpec(rows);
        } catch (const std::invalid_argument&) {
        }
    }
}

bool close(Complex a, Complex b, double tol = 1e-12) { return std::abs(a - b) <= tol; }

} // namespace

TEST_CASE("DiracSystem validates the weight ordering") {
    CHECK_THROWS_AS(DiracSystem(1.0, 2.0, {}, {}), std::invalid_argument);
    CHECK_THROWS_AS(DiracSystem(-1.0, -2.0, {}, {}), std::invalid_argument);
    DiracSystem ok(-1.0, 2.0, {}, {});
    CHECK(ok.q_is_zero());
}

TEST_CASE("q_pm scaling") {
    DiracSystem s1(-1.0, 1.0, PolyFunc::constant(1.0), PolyFunc::constant(1.0));
    auto [qp, qm] = q_pm(s1);
    CHECK(close(qp.eval(0.3), Complex(0, 1)));
    CHECK(close(qm.eval(0.3), Complex(0, -1)));

    DiracSystem s0(-1.0, 1.0, {}, {});
    auto [zp, zm] = q_pm(s0);
    CHECK(zp.is_zero());
    CHECK(zm.is_zero());

    DiracSystem s2(-2.0, 1.0, PolyFunc({0.0, 1.0}), {});
    CHECK(close(q_pm(s2).first.eval(0.5), Complex(0, 1))); // 2i * 0.5
}

TEST_CASE("minors: anti-periodic-type and the degenerate pair") {
    auto ms = minors(BoundarySpec::from_rows({1, 0, 1, 0}, {0, 1, 0, 1}));
    CHECK(close(ms.J12, 1.0));
    CHECK(close(ms.J34, 1.0));
    CHECK(close(ms.J32, 1.0));
    CHECK(close(ms.J14, 1.0));
    CHECK(close(ms.J13, 0.0));
    CHECK(close(ms.J42, 0.0));

    auto ms2 = minors(BoundarySpec::from_rows({0, 1, 0, 0}, {0, 0, 0, 1}));
    CHECK(close(ms2.J42, -1.0));
    for (Complex v : {ms2.J12, ms2.J34, ms2.J32, ms2.J14, ms2.J13}) CHECK(close(v, 0.0));

    auto ms3 = minors(BoundarySpec::from_rows({1, 0, 0, 0}, {0, 0, 0, 1}));
    CHECK(close(ms3.J14, 1.0));
    for (Complex v : {ms3.J12, ms3.J34, ms3.J32, ms3.J13, ms3.J42}) CHECK(close(v, 0.0));
}

TEST_CASE("rank-1 boundary rows rejected") {
    CHECK_THROWS_AS(BoundarySpec::from_rows({1, 2, 3, 4}, {2, 4, 6, 8}),
                    std::invalid_argument);
}

TEST_CASE("minor antisymmetry under column swap") {
    for (int trial = 0; trial < 20; ++trial) {
        BoundarySpec bc = rand_bc();
        MinorSet ms = minors(bc);
        // swap columns 1 and 4: J14 -> J41 = -J14
        std::array<std::array<Complex, 4>, 2> sw = bc.a;
        std::swap(sw[0][0], sw[0][3]);
        std::swap(sw[1][0], sw[1][3]);
        MinorSet ms2 = minors(BoundarySpec(sw));
        CHECK(close(ms2.J14, -ms.J14));
        // swap columns 3 and 2 negates J32 and maps J13 -> J12
        std::array<std::array<Complex, 4>, 2> sw2 = bc.a;
        std::swap(sw2[0][1], sw2[0][2]);
        std::swap(sw2[1][1], sw2[1][2]);
        MinorSet ms3 = minors(BoundarySpec(sw2));
        CHECK(close(ms3.J32, -ms.J32));
        CHECK(close(ms3.J13, ms.J12));
    }
}

TEST_CASE("left row operations scale every minor by det M") {
    for (int trial = 0; trial < 20; ++trial) {
        BoundarySpec bc = rand_bc();
        Complex m11 = rand_complex(), m12 = rand_complex();
        Complex m21 = rand_complex(), m22 = rand_complex();
        Complex det = m11 * m22 - m12 * m21;
        if (std::abs(det) < 0.05) continue;
        std::array<std::array<Complex, 4>, 2> rows;
        for (int c = 0; c < 4; ++c) {
            rows[0][c] = m11 * bc.a[0][c] + m12 * bc.a[1][c];
            rows[1][c] = m21 * bc.a[0][c] + m22 * bc.a[1][c];
        }
        BoundarySpec bc2(rows);
        MinorSet ms = minors(bc), ms2 = minors(bc2);
        CHECK(close(ms2.J12, det * ms.J12, 1e-10));
        CHECK(close(ms2.J34, det * ms.J34, 1e-10));
        CHECK(close(ms2.J32, det * ms.J32, 1e-10));
        CHECK(close(ms2.J14, det * ms.J14, 1e-10));
        CHECK(close(ms2.J13, det * ms.J13, 1e-10));
        CHECK(close(ms2.J42, det * ms.J42, 1e-10));
        // classification is invariant under the row operation
        CHECK(classify(ms, -1.0, 1.0) == classify(ms2, -1.0, 1.0));
    }
}

TEST_CASE("classify: regular, degenerate, non-regular") {
    auto regular = minors(BoundarySpec::from_rows({1, 0, 1, 0}, {0, 1, 0, 1}));
    CHECK(classify(regular, -1.0, 1.0) == BcClass::Regular);

    // y1(0) = y2(1) = 0: Delta_0 = e^{i b2 l}, zero-free
    auto degen = minors(BoundarySpec::from_rows({1, 0, 0, 0}, {0, 0, 0, 1}));
    CHECK(classify(degen, -1.0, 1.0) == BcClass::DegenerateDeltaZeroConstant);

    // J32 = 0, J14 = J12 = J34 = 1: two exponent groups survive
    auto ms = minors(BoundarySpec::from_rows({1, 0, 0, 1}, {0, 0, -1, 1}));
    CHECK(std::abs(ms.J32) < 1e-15);
    CHECK(std::abs(ms.J14 - Complex(1, 0)) < 1e-15);
    CHECK(classify(ms, -1.0, 1.0) == BcClass::NonRegular_J32zero);

    // Dirac case merges the J12/J34 group: J12 = -J34, J32 = J14 = 0
    // leaves Delta_0 identically zero
    MinorSet zero_delta{Complex(1, 0), Complex(-1, 0), 0.0, 0.0, Complex(0.5, 0), 0.0};
    CHECK(classify(zero_delta, -1.0, 1.0) == BcClass::DegenerateDeltaZeroConstant);
    // but with b1 + b2 != 0 those two terms have distinct exponents
    CHECK(classify(zero_delta, -1.0, 2.0) == BcClass::NonRegular_bothZero);

    MinorSet j14zero{Complex(1, 0), 0.0, Complex(1, 0), 0.0, Complex(1, 0), Complex(1, 0)};
    CHECK(classify(j14zero, -1.0, 1.0) == BcClass::NonRegular_J14zero);
}

TEST_CASE("p_function examples") {
    // J13 = J42 = 0 -> P = 0
    DiracSystem sys(-1.0, 1.0, PolyFunc({0.0, 1.0}), PolyFunc({0.0, 0.0, 1.0}));
    BoundarySpec anti = BoundarySpec::from_rows({1, 0, 1, 0}, {0, 1, 0, 1});
    CHECK(p_function(sys, anti).is_zero());

    // J13 = 1, J42 = 0, b1 = -1, Q12 = x -> P = -x
    MinorSet ms{0.0, 0.0, 0.0, 0.0, Complex(1, 0), 0.0};
    PolyFunc p1 = p_function(sys, ms);
    CHECK(close(p1.eval(0.25), Complex(-0.25, 0.0)));

    // J13 = J42 = 1, b = (-1, 1), Q12 = x, Q21 = x^2 -> P = -x + (1-x)^2
    MinorSet ms2{0.0, 0.0, 0.0, 0.0, Complex(1, 0), Complex(1, 0)};
    PolyFunc p2 = p_function(sys, ms2);
    for (double x : {0.0, 0.3, 0.8, 1.0})
        CHECK(close(p2.eval(x), Complex(-x + (1 - x) * (1 - x), 0.0)));
}

TEST_CASE("P derivatives agree between direct differentiation and the chain rule") {
    std::uniform_int_distribution<int> d(0, 4);
    for (int trial = 0; trial < 10; ++trial) {
        std::vector<Complex> c12(d(rng) + 1), c21(d(rng) + 1);
        for (auto& v : c12) v = rand_complex();
        for (auto& v : c21) v = rand_complex();
        DiracSystem sys(-1.3, 0.8, PolyFunc(c12), PolyFunc(c21));
        MinorSet ms{0.0, 0.0, 0.0, 0.0, rand_complex(), rand_complex()};
        PolyFunc P = p_function(sys, ms);
        CHECK(P.degree() <= std::max(sys.Q12.degree(), sys.Q21.degree()));
        for (int k = 0; k <= 5; ++k) {
            for (double x : {0.0, 0.5, 1.0}) {
                // chain rule: P^{(k)}(x) = J13 b1 Q12^{(k)}(x) + (-1)^k J42 b2 Q21^{(k)}(1-x)
                Complex direct = P.derivative(k).eval(x);
                Complex chained = ms.J13 * sys.b1 * sys.Q12.derivative(k).eval(x) +
                                  ((k % 2 == 0) ? 1.0 : -1.0) * ms.J42 * sys.b2 *
                                      sys.Q21.derivative(k).eval(1.0 - x);
                CHECK(close(direct, chained, 1e-12 * (1.0 + std::abs(chained))));
            }
        }
    }
}

TEST_CASE("first_nonzero_derivative") {
    PolyFunc p({0.0, 0.0, Complex(3, 0)}); // 3x^2
    CHECK(first_nonzero_derivative(p, 0.0, 1e-9) == 2);
    CHECK(first_nonzero_derivative(p, 1.0, 1e-9) == 0);
    CHECK(first_nonzero_derivative(PolyFunc::zero(), 0.0, 1e-9) == -1);
    // (1-x)^2 at 1: value and slope vanish, curvature does not
    PolyFunc q({1.0, -2.0, 1.0});
    CHECK(first_nonzero_derivative(q, 1.0, 1e-9) == 2);
}
