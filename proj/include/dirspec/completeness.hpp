#pragma once

#include <optional>
#include <string>
#include <vector>

#include "dirspec/coeffs.hpp"
#include "dirspec/determinant.hpp"
#include "dirspec/model.hpp"

namespace dirspec {

enum class VerdictStatus { CompleteAndMinimal, Incomplete, Inconclusive };

std::string to_string(VerdictStatus s);

struct Witness {
    std::string name;
    Complex value;
};

/// Cited completeness/minimality decision. rule carries the citation tag of
/// the condition that fired; witnesses the nonzero quantities backing it.
struct Verdict {
    VerdictStatus status = VerdictStatus::Inconclusive;
    std::string rule;
    std::vector<Witness> witnesses;
    int order_used = 0;
    std::optional<int> k_plus;   // predicted growth indices, ABSENT when unknown
    std::optional<int> k_minus;
    std::string note;
};

/// Decision order: exact-structure rules (the if-and-only-if criterion for
/// the y2(1)=0 boundary form, the vanishing-P incompleteness pattern), then
/// the generic two-sum sufficient test on the coefficient table at order n,
/// then the special-case catalogue. Absence of a witness outside the two
/// proved incompleteness patterns yields Inconclusive, never Incomplete.
Verdict verdict(const DiracSystem& sys, const BoundarySpec& bc, int n,
                double zero_tol = kDefaultZeroTol);

/// The specialized sufficient conditions alone (minor-pattern rules keyed on
/// endpoint derivative-vanishing indices). Empty when none applies.
std::optional<Verdict> special_case_catalogue(const DiracSystem& sys,
                                              const BoundarySpec& bc, int n,
                                              double zero_tol = kDefaultZeroTol);

struct CorroborationReport {
    bool applicable = false; // verdict carried finite growth indices
    bool decay_mode = false; // incompleteness corroborated by power-beating decay
    bool suspect = false;
    double floor_plus = 0.0;  // min over the grid of |Delta(it)| t^{k+} e^{b1 t}
    double floor_minus = 0.0; // min over the grid of |Delta(-it)| t^{k-} e^{-b2 t}
    Complex fit_plus{0.0, 0.0};
    Complex fit_minus{0.0, 0.0};
    double decay_tail_ratio = 0.0; // last/first of |Delta(it)| t^4 e^{b1 t}
};

/// Checks the verdict's predicted growth floors along the imaginary axis and
/// flags SUSPECT when a floor undercuts 1e-3 of the fitted leading
/// coefficient. Incomplete verdicts are corroborated by the normalized
/// quantity decaying faster than the tested power instead.
CorroborationReport numeric_corroboration(const DiracSystem& sys, const BoundarySpec& bc,
                                          const Verdict& v,
                                          const std::vector<double>& t_grid,
                                          const OdeOptions& opts = {},
                                          double zero_tol = kDefaultZeroTol);

} // namespace dirspec
