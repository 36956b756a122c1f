#pragma once

#include <array>
#include <complex>
#include <string>
#include <utility>

#include "dirspec/poly.hpp"

namespace dirspec {

constexpr double kDefaultZeroTol = 1e-9;

/// 2x2 Dirac-type system: weights b1 < 0 < b2 and off-diagonal polynomial
/// potential entries (the diagonal of Q is identically zero by construction).
struct DiracSystem {
    double b1;
    double b2;
    PolyFunc Q12;
    PolyFunc Q21;

    DiracSystem(double b1_, double b2_, PolyFunc q12, PolyFunc q21);

    bool q_is_zero() const { return Q12.is_zero() && Q21.is_zero(); }
};

/// (q_+, q_-) = (-i b1 Q12, -i b2 Q21).
std::pair<PolyFunc, PolyFunc> q_pm(const DiracSystem& sys);

/// 2x4 boundary matrix; row j holds the functional
/// U_j(y) = a_{j1} y1(0) + a_{j2} y2(0) + a_{j3} y1(1) + a_{j4} y2(1).
struct BoundarySpec {
    std::array<std::array<Complex, 4>, 2> a;

    explicit BoundarySpec(std::array<std::array<Complex, 4>, 2> rows);
    static BoundarySpec from_rows(std::array<Complex, 4> r1, std::array<Complex, 4> r2) {
        return BoundarySpec({r1, r2});
    }
};

/// The six 2x2 column minors J_jk = a_{1j} a_{2k} - a_{1k} a_{2j} that enter
/// the determinant and every completeness condition.
struct MinorSet {
    Complex J12, J34, J32, J14, J13, J42;

    double max_abs() const;
};

MinorSet minors(const BoundarySpec& bc);

enum class BcClass {
    Regular,
    NonRegular_J32zero,
    NonRegular_J14zero,
    NonRegular_bothZero,
    DegenerateDeltaZeroConstant,
};

std::string to_string(BcClass c);

/// Regular iff both J32 and J14 clear the relative threshold. Degenerate iff
/// the unperturbed determinant Delta_0 collapses to at most one exponential
/// group (identically zero or zero-free); grouping needs b1, b2 because the
/// J12 and J34 terms share an exponent exactly when b1 + b2 = 0.
BcClass classify(const MinorSet& ms, double b1, double b2,
                 double zero_tol = kDefaultZeroTol);

/// P(x) = J13 b1 Q12(x) + J42 b2 Q21(1-x), exact on coefficients.
PolyFunc p_function(const DiracSystem& sys, const BoundarySpec& bc);
PolyFunc p_function(const DiracSystem& sys, const MinorSet& ms);

} // namespace dirspec
