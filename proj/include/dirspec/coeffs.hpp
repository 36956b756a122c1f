#pragma once

#include <optional>
#include <vector>

#include "dirspec/algebra.hpp"
#include "dirspec/model.hpp"

namespace dirspec {

enum class Sign { Plus, Minus };

/// sigma_k^{sign} evaluated at an endpoint, with the species binding
/// (A,B) = (q_-, q_+) for sigma^+ and (q_+, q_-) for sigma^-.
Complex sigma_endpoint(const DiracSystem& sys, Sign sign, int k, int endpoint);

/// Expansion coefficients c_0..c_n for both half-planes. c_plus[0] = J32 and
/// c_minus[0] = J14. scale_* carries the sum of |term| magnitudes per entry,
/// the cancellation scale the zero threshold is measured against.
struct CoefficientTable {
    int n = 0;
    std::vector<Complex> c_plus;
    std::vector<Complex> c_minus;
    std::vector<double> scale_plus;
    std::vector<double> scale_minus;
    std::optional<int> k_plus;  // first index with c^+ past threshold, or ABSENT
    std::optional<int> k_minus;

    bool nonzero_plus(int k, double zero_tol) const;
    bool nonzero_minus(int k, double zero_tol) const;
};

CoefficientTable coefficient_table(const DiracSystem& sys, const BoundarySpec& bc, int n,
                                   double zero_tol = kDefaultZeroTol);
CoefficientTable coefficient_table(const DiracSystem& sys, const MinorSet& ms, int n,
                                   double zero_tol = kDefaultZeroTol);

/// Comparison of table entries 1..3 against the closed forms of the first
/// three coefficients (c_1^+ = J13 q_+(0) + J42 q_-(1) and so on).
struct C123Report {
    struct Mismatch {
        int k;
        Sign side;
        Complex got;
        Complex expected;
    };
    bool ok = true;
    std::vector<Mismatch> mismatches;
};

C123Report lemma_c123_check(const DiracSystem& sys, const BoundarySpec& bc,
                            double rel_tol = 1e-12);

/// Closed forms themselves, exposed for tests and the CLI report.
std::vector<Complex> c123_closed_forms(const DiracSystem& sys, const MinorSet& ms,
                                       Sign side);

} // namespace dirspec
