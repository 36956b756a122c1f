#include "dirspec/model.hpp"

#include <cmath>
#include <stdexcept>

namespace dirspec {

DiracSystem::DiracSystem(double b1_, double b2_, PolyFunc q12, PolyFunc q21)
    : b1(b1_), b2(b2_), Q12(std::move(q12)), Q21(std::move(q21)) {
    if (!(b1 < 0.0) || !(b2 > 0.0) || !std::isfinite(b1) || !std::isfinite(b2))
        throw std::invalid_argument("DiracSystem requires b1 < 0 < b2");
}

std::pair<PolyFunc, PolyFunc> q_pm(const DiracSystem& sys) {
    Complex mi(0.0, -1.0);
    return {mi * sys.b1 * sys.Q12, mi * sys.b2 * sys.Q21};
}

BoundarySpec::BoundarySpec(std::array<std::array<Complex, 4>, 2> rows) : a(rows) {
    double scale = 0.0;
    for (const auto& row : a)
        for (const Complex& v : row) scale = std::max(scale, std::abs(v));
    MinorSet ms = minors(*this);
    if (scale == 0.0 || ms.max_abs() <= 1e-12 * scale * scale)
        throw std::invalid_argument("boundary matrix must have rank 2");
}

double MinorSet::max_abs() const {
    double m = 0.0;
    for (Complex v : {J12, J34, J32, J14, J13, J42}) m = std::max(m, std::abs(v));
    return m;
}

MinorSet minors(const BoundarySpec& bc) {
    auto J = [&bc](int j, int k) {
        return bc.a[0][j - 1] * bc.a[1][k - 1] - bc.a[0][k - 1] * bc.a[1][j - 1];
    };
    return MinorSet{J(1, 2), J(3, 4), J(3, 2), J(1, 4), J(1, 3), J(4, 2)};
}

std::string to_string(BcClass c) {
    switch (c) {
        case BcClass::Regular: return "Regular";
        case BcClass::NonRegular_J32zero: return "NonRegular_J32zero";
        case BcClass::NonRegular_J14zero: return "NonRegular_J14zero";
        case BcClass::NonRegular_bothZero: return "NonRegular_bothZero";
        case BcClass::DegenerateDeltaZeroConstant: return "DegenerateDeltaZeroConstant";
    }
    return "?";
}

BcClass classify(const MinorSet& ms, double b1, double b2, double zero_tol) {
    double tau = zero_tol * ms.max_abs();
    bool j32 = std::abs(ms.J32) > tau;
    bool j14 = std::abs(ms.J14) > tau;
    if (j32 && j14) return BcClass::Regular;

    // Delta_0 = J12 + J34 e^{i(b1+b2)l} + J32 e^{i b1 l} + J14 e^{i b2 l};
    // it is zero-free or identically zero iff at most one exponent group
    // carries a nonzero coefficient. b1+b2 = 0 merges J34 into the J12 group.
    int groups = 0;
    if (std::abs(b1 + b2) <= 1e-14 * (std::abs(b1) + std::abs(b2))) {
        if (std::abs(ms.J12 + ms.J34) > tau) ++groups;
    } else {
        if (std::abs(ms.J12) > tau) ++groups;
        if (std::abs(ms.J34) > tau) ++groups;
    }
    if (j32) ++groups;
    if (j14) ++groups;
    if (groups <= 1) return BcClass::DegenerateDeltaZeroConstant;

    if (!j32 && j14) return BcClass::NonRegular_J32zero;
    if (j32 && !j14) return BcClass::NonRegular_J14zero;
    return BcClass::NonRegular_bothZero;
}

PolyFunc p_function(const DiracSystem& sys, const MinorSet& ms) {
    return ms.J13 * sys.b1 * sys.Q12 + ms.J42 * sys.b2 * sys.Q21.compose_one_minus_x();
}

PolyFunc p_function(const DiracSystem& sys, const BoundarySpec& bc) {
    return p_function(sys, minors(bc));
}

} // namespace dirspec
