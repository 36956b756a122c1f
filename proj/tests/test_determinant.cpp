#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "dirspec/coeffs.hpp"
#include "dirspec/determinant.hpp"
#include "dirspec/errors.hpp"
#include "matexp_oracle.hpp"

using namespace dirspec;

namespace {

std::mt19937_64 rng(0);

Complex rand_complex() {
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    return {u(rng), u(rng)};
}

const BoundarySpec kAnti = BoundarySpec::from_rows({1, 0, 1, 0}, {0, 1, 0, 1});

double rel_err(const ScaledComplex& got, const ScaledComplex& expect) {
    ScaledComplex diff = got - expect;
    if (diff.is_zero()) return 0.0;
    double denom = std::exp(std::max(expect.log_abs(), 0.0));
    return std::exp(diff.log_abs()) / denom;
}

} // namespace

TEST_CASE("ScaledComplex arithmetic and normalization") {
    ScaledComplex a = ScaledComplex::from(Complex(3.0, 4.0));
    CHECK(std::abs(std::abs(a.mantissa) - 1.0) < 1e-15);
    CHECK(std::abs(a.log_abs() - std::log(5.0)) < 1e-14);
    ScaledComplex b = a.times_exp(700.0);
    ScaledComplex c = b * b;                       // e^{1400}-sized, fine in scaled form
    CHECK(std::abs(c.log_abs() - (2 * std::log(5.0) + 1400.0)) < 1e-9);
    ScaledComplex d = c - c;
    CHECK(d.is_zero());
    ScaledComplex sum = ScaledComplex::from(Complex(1, 0)) + ScaledComplex::from(Complex(0, 1));
    CHECK(std::abs(sum.to_complex() - Complex(1, 1)) < 1e-15);
}

TEST_CASE("Q = 0: fundamental matrix is the diagonal of pure exponentials") {
    DiracSystem sys(-1.0, 1.0, {}, {});
    for (Complex lambda : {Complex(2.0, 0.5), Complex(-3.0, -4.0), Complex(0.0, 10.0)}) {
        FundamentalMatrix f = fundamental_matrix(sys, lambda);
        ScaledComplex e1(std::exp(Complex(0, sys.b1 * lambda.real())), -sys.b1 * lambda.imag());
        ScaledComplex e2(std::exp(Complex(0, sys.b2 * lambda.real())), -sys.b2 * lambda.imag());
        CHECK(rel_err(f(0, 0), e1) < 1e-10);
        CHECK(rel_err(f(1, 1), e2) < 1e-10);
        CHECK(std::exp(f(0, 1).log_abs() - e2.log_abs()) < 1e-10);
        CHECK(std::exp(f(1, 0).log_abs() - e1.log_abs()) < 1e-10);
    }
}

TEST_CASE("lambda = 0 with constant Q: matrix exponential oracle") {
    DiracSystem sys(-1.3, 0.9, PolyFunc::constant(Complex(0.4, 0.2)),
                    PolyFunc::constant(Complex(-0.3, 0.6)));
    // Phi(1, 0) = exp(-i B Q)
    oracle::Mat2 m{};
    m[0][0] = Complex(0, 0);
    m[0][1] = Complex(0, -1) * sys.b1 * sys.Q12.eval(0.0);
    m[1][0] = Complex(0, -1) * sys.b2 * sys.Q21.eval(0.0);
    m[1][1] = Complex(0, 0);
    oracle::Mat2 expect = oracle::matexp(m);

    FundamentalMatrix f = fundamental_matrix(sys, Complex(0, 0));
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j)
            CHECK(std::abs(f(i, j).to_complex() - expect[i][j]) < 1e-9);
}

TEST_CASE("constant Q at complex lambda: full matrix-exponential oracle") {
    // Phi(1, lambda) = exp(i lambda B - i B Q) for constant coefficients
    DiracSystem sys(-1.0, 1.0, PolyFunc::constant(Complex(0.4, 0.2)),
                    PolyFunc::constant(Complex(-0.3, 0.6)));
    for (Complex lambda : {Complex(3.0, 2.0), Complex(-1.5, -4.0), Complex(0.0, 25.0)}) {
        oracle::Mat2 m{};
        m[0][0] = Complex(0, 1) * sys.b1 * lambda;
        m[0][1] = Complex(0, -1) * sys.b1 * sys.Q12.eval(0.0);
        m[1][0] = Complex(0, -1) * sys.b2 * sys.Q21.eval(0.0);
        m[1][1] = Complex(0, 1) * sys.b2 * lambda;
        oracle::Mat2 expect = oracle::matexp(m);
        double scale = 0.0;
        for (int i = 0; i < 2; ++i)
            for (int j = 0; j < 2; ++j) scale = std::max(scale, std::abs(expect[i][j]));

        FundamentalMatrix f = fundamental_matrix(sys, lambda);
        for (int i = 0; i < 2; ++i)
            for (int j = 0; j < 2; ++j)
                CHECK(std::abs(f(i, j).to_complex() - expect[i][j]) < 1e-7 * scale);
    }
}

TEST_CASE("thread cap env var leaves scan results unchanged") {
    DiracSystem sys(-1.0, 1.0, PolyFunc({0.3, 0.1}), PolyFunc({0.2}));
    BoundarySpec bc = BoundarySpec::from_rows({1, 0, 1, 0}, {0, 1, 0, 1});
    std::vector<double> ts{5, 10, 15, 20, 25, 30};
    auto base = ray_scan(sys, bc, HalfPlane::Upper, ts);
    setenv("DIRAC_SPECTRA_THREADS", "1", 1);
    auto serial = ray_scan(sys, bc, HalfPlane::Upper, ts);
    unsetenv("DIRAC_SPECTRA_THREADS");
    REQUIRE(base.size() == serial.size());
    for (std::size_t i = 0; i < base.size(); ++i)
        CHECK(std::abs(base[i].second - serial[i].second) == 0.0);
}

TEST_CASE("Abel identity at moderate lambda for generic systems") {
    for (int trial = 0; trial < 6; ++trial) {
        DiracSystem sys(-1.1, 0.8, PolyFunc({rand_complex(), rand_complex()}),
                        PolyFunc({rand_complex(), rand_complex(), rand_complex()}));
        Complex lambda(4.0 * rand_complex().real(), 6.0 * rand_complex().real());
        OdeOptions opts;
        FundamentalMatrix f = fundamental_matrix(sys, lambda, opts);
        ScaledComplex det = f(0, 0) * f(1, 1) - f(0, 1) * f(1, 0);
        double expect_log = -(sys.b1 + sys.b2) * lambda.imag();
        CHECK(std::abs(det.log_abs() - expect_log) < 10 * opts.tol * 1e3);
    }
}

TEST_CASE("delta_Q closed form for Q = 0 anti-periodic-type rows") {
    DiracSystem sys(-1.0, 1.0, {}, {});
    // Delta_0(l) = (1 + e^{-il})(1 + e^{il}) = 2 + 2 cos l
    for (Complex lambda : {Complex(0.3, 0.0), Complex(2.0, 1.5), Complex(-1.0, -20.0)}) {
        ScaledComplex d = delta_Q(sys, kAnti, lambda);
        Complex expect = 2.0 + 2.0 * std::cos(lambda);
        CHECK(std::abs(d.to_complex() - expect) <= 1e-9 * (1.0 + std::abs(expect)));
    }
    // zero at pi
    CHECK(delta_Q(sys, kAnti, Complex(3.14159265358979323846, 0.0)).log_abs() < -15.0);
}

TEST_CASE("delta_Q at lambda = 0 equals det(A12 + A34 Phi(1,0)) from the oracle") {
    DiracSystem sys(-1.2, 0.7, PolyFunc::constant(Complex(0.5, -0.1)),
                    PolyFunc::constant(Complex(0.2, 0.3)));
    BoundarySpec bc = BoundarySpec::from_rows({1, Complex(0.3, 0.1), -1, 0.2},
                                              {0.5, 1, Complex(0, 0.4), 1});
    oracle::Mat2 m{};
    m[0][1] = Complex(0, -1) * sys.b1 * sys.Q12.eval(0.0);
    m[1][0] = Complex(0, -1) * sys.b2 * sys.Q21.eval(0.0);
    oracle::Mat2 phi = oracle::matexp(m);

    // det(A12 + A34 Phi) expanded by columns
    Complex u11 = bc.a[0][0] + bc.a[0][2] * phi[0][0] + bc.a[0][3] * phi[1][0];
    Complex u21 = bc.a[1][0] + bc.a[1][2] * phi[0][0] + bc.a[1][3] * phi[1][0];
    Complex u12 = bc.a[0][1] + bc.a[0][2] * phi[0][1] + bc.a[0][3] * phi[1][1];
    Complex u22 = bc.a[1][1] + bc.a[1][2] * phi[0][1] + bc.a[1][3] * phi[1][1];
    Complex expect = u11 * u22 - u12 * u21;

    ScaledComplex d = delta_Q(sys, bc, Complex(0, 0));
    CHECK(std::abs(d.to_complex() - expect) < 1e-9 * (1.0 + std::abs(expect)));
}

TEST_CASE("entirety proxy: circle mean matches the center value") {
    DiracSystem sys(-1.0, 1.0, PolyFunc({0.3, Complex(0, 0.4)}), PolyFunc({-0.2, 0.5}));
    BoundarySpec bc = BoundarySpec::from_rows({1, 0.4, 0.2, 0}, {0, 1, -0.3, 1});
    Complex center(1.3, 0.4);
    double radius = 0.3;
    Complex mean(0, 0);
    constexpr int N = 16;
    for (int i = 0; i < N; ++i) {
        double a = 2.0 * 3.14159265358979323846 * i / N;
        mean += delta_Q(sys, bc, center + radius * Complex(std::cos(a), std::sin(a)))
                    .to_complex();
    }
    mean /= static_cast<double>(N);
    Complex at_center = delta_Q(sys, bc, center).to_complex();
    OdeOptions opts;
    CHECK(std::abs(mean - at_center) < 10 * opts.tol * 1e3 * (1.0 + std::abs(at_center)));
}

TEST_CASE("conjugation: Delta_0(conj l) = conj Delta_0(l) over real minors") {
    DiracSystem sys(-1.0, 1.0, {}, {});
    for (int trial = 0; trial < 5; ++trial) {
        Complex lambda(3.0 * rand_complex().real(), 5.0 * rand_complex().real());
        Complex a = delta_Q(sys, kAnti, std::conj(lambda)).to_complex();
        Complex b = std::conj(delta_Q(sys, kAnti, lambda).to_complex());
        CHECK(std::abs(a - b) < 1e-12 * (1.0 + std::abs(b)));
    }
}

TEST_CASE("ray_scan: normalized values approach J32 above and J14 below") {
    DiracSystem sys(-1.0, 1.0, {}, {});
    std::vector<double> ts{10, 20, 40};
    auto up = ray_scan(sys, kAnti, HalfPlane::Upper, ts);
    auto lo = ray_scan(sys, kAnti, HalfPlane::Lower, ts);
    CHECK(std::abs(up.back().second - Complex(1, 0)) < 1e-8); // J32 = 1
    CHECK(std::abs(lo.back().second - Complex(1, 0)) < 1e-8); // J14 = 1
}

TEST_CASE("fit at K = 0 recovers J32 / J14 exactly for Q = 0") {
    DiracSystem sys(-1.0, 1.0, {}, {});
    auto grid = geometric_grid(20, 80, 5);
    FitResult up = fit_leading_coefficient(sys, kAnti, HalfPlane::Upper, 0, grid, {});
    FitResult lo = fit_leading_coefficient(sys, kAnti, HalfPlane::Lower, 0, grid, {});
    CHECK(std::abs(up.estimate - Complex(1, 0)) < 1e-6);
    CHECK(std::abs(lo.estimate - Complex(1, 0)) < 1e-6);
}

TEST_CASE("fit at K = 2 recovers c_2^+ for the J32 = J13 = J42 = 0 pattern") {
    // rows y1(0) = 0, y2(1) = 0: only J14 = 1 survives
    BoundarySpec bc = BoundarySpec::from_rows({1, 0, 0, 0}, {0, 0, 0, 1});
    DiracSystem sys(-1.0, 1.0, PolyFunc({0.8, 0.3}), PolyFunc({0.25, 0.5}));
    CoefficientTable tbl = coefficient_table(sys, bc, 2);
    REQUIRE(tbl.k_plus == 2);
    // c_2^+ = J14 q_+(0) q_-(1) = -J14 b1 b2 Q12(0) Q21(1), J14 = 1
    Complex expect = -sys.b1 * sys.b2 * sys.Q12.eval(0.0) * sys.Q21.eval(1.0);
    CHECK(std::abs(tbl.c_plus[2] - expect) < 1e-12);

    auto grid = geometric_grid(20, 80, 5);
    FitResult fit = fit_leading_coefficient(sys, bc, HalfPlane::Upper, 2, grid,
                                            {tbl.c_plus[0], tbl.c_plus[1]});
    CHECK(std::abs(fit.estimate - expect) < 0.02 * std::abs(expect));
}

TEST_CASE("fit at K = 1 recovers -i P(0) when J32 = 0") {
    BoundarySpec bc = BoundarySpec::from_rows({1, 0, 0, 0.5}, {0, 0, -1, 1});
    MinorSet ms = minors(bc);
    REQUIRE(std::abs(ms.J32) < 1e-15);
    DiracSystem sys(-1.0, 1.0, PolyFunc({0.6, -0.2}), PolyFunc({0.3, 0.1}));
    Complex expect = Complex(0, -1) * p_function(sys, ms).eval(0.0);
    REQUIRE(std::abs(expect) > 0.05);

    auto grid = geometric_grid(20, 80, 5);
    FitResult fit = fit_leading_coefficient(sys, bc, HalfPlane::Upper, 1, grid, {ms.J32});
    CHECK(std::abs(fit.estimate - expect) < 0.01 * std::abs(expect));
}

TEST_CASE("residual decay slope at the leading order") {
    BoundarySpec bc = BoundarySpec::from_rows({1, 0, 0, 0.5}, {0, 0, -1, 1});
    DiracSystem sys(-1.0, 1.0, PolyFunc({0.6, -0.2}), PolyFunc({0.3, 0.1}));
    MinorSet ms = minors(bc);
    CoefficientTable tbl = coefficient_table(sys, ms, 1);
    REQUIRE(tbl.k_plus == 1);
    auto slope = residual_decay_slope(sys, ms, HalfPlane::Upper, 1,
                                      {tbl.c_plus[0], tbl.c_plus[1]}, 80.0, 9);
    REQUIRE(slope.has_value());
    CHECK(*slope <= -(1 + 0.5));
}

TEST_CASE("fit past the leading coefficient diverges and says so") {
    // with J32 != 0 the unknown outer factor contaminates every later order:
    // extracting K = 2 after subtracting c_0, c_1 leaves a term growing in t
    DiracSystem sys(-1.0, 1.0, PolyFunc({0.4, 0.1}), PolyFunc({0.3}));
    MinorSet ms = minors(kAnti);
    CoefficientTable tbl = coefficient_table(sys, ms, 2);
    REQUIRE(tbl.k_plus == 0);
    auto grid = geometric_grid(20, 80, 5);
    CHECK_THROWS_AS(fit_leading_coefficient(sys, ms, HalfPlane::Upper, 2, grid,
                                            {tbl.c_plus[0], tbl.c_plus[1]}),
                    NoConvergence);
}

TEST_CASE("step failure surfaces the offending lambda") {
    DiracSystem sys(-1.0, 1.0, PolyFunc::constant(0.5), PolyFunc::constant(0.5));
    OdeOptions strict;
    strict.tol = 1e-13;
    strict.h_max = 0.05;
    strict.h_min = 0.049; // no room to adapt
    Complex bad(0.0, 300.0);
    try {
        fundamental_matrix(sys, bad, strict);
        FAIL("expected StepFailure");
    } catch (const StepFailure& e) {
        CHECK(e.lambda() == bad);
    }
}
