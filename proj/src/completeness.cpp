#include "dirspec/completeness.hpp"

#include <algorithm>
#include <cmath>

#include "dirspec/errors.hpp"

namespace dirspec {

namespace {

constexpr int kInfPrefix = 1 << 20; // identically-zero jet

struct Ctx {
    const DiracSystem& sys;
    MinorSet ms;
    double tau; // minor zero threshold
    double zero_tol;
    PolyFunc P;

    bool nz(Complex J) const { return std::abs(J) > tau; }

    // first index j with f^{(j)}(a) past threshold; kInfPrefix when f's jet
    // at a vanishes identically (for polynomials: f == 0)
    int nu(const PolyFunc& f, double a) const {
        int j = first_nonzero_derivative(f, Complex(a, 0.0), zero_tol);
        return j < 0 ? kInfPrefix : j;
    }

    bool p_is_zero() const {
        double scale = std::abs(ms.J13 * sys.b1) * sys.Q12.max_abs_coeff() +
                       std::abs(ms.J42 * sys.b2) * sys.Q21.max_abs_coeff();
        return P.max_abs_coeff() <= zero_tol * scale;
    }

    Complex deriv_at(const PolyFunc& f, int k, double a) const {
        return f.derivative(k).eval(a);
    }

    // value and cancellation scale of a two-term combination u + v
    static bool combo_nonzero(Complex u, Complex v, double zero_tol) {
        return std::abs(u + v) > zero_tol * (std::abs(u) + std::abs(v));
    }

    // Every catalogue rule predicts which table entries its witnesses occupy;
    // the exact table is cheap for polynomial data, so a rule only fires when
    // the predicted entries really clear the threshold. This keeps the
    // catalogue sound against transcription slips in the closed forms.
    bool table_confirms(int kp, int km) const {
        if (kp > kDefaultMaxOrder || km > kDefaultMaxOrder) return false;
        CoefficientTable tbl =
            coefficient_table(sys, ms, std::max({kp, km, 1}), zero_tol);
        return tbl.nonzero_plus(kp, zero_tol) && tbl.nonzero_minus(km, zero_tol);
    }
};

Verdict make_complete(std::string rule, std::vector<Witness> ws, int n, int kp, int km) {
    Verdict v;
    v.status = VerdictStatus::CompleteAndMinimal;
    v.rule = std::move(rule);
    v.witnesses = std::move(ws);
    v.order_used = n;
    if (kp >= 0) v.k_plus = kp;
    if (km >= 0) v.k_minus = km;
    return v;
}

// The boundary form  a1 y1(0) + a2 y2(0) + a3 y1(1) = 0, y2(1) = 0, a2 != 0
// is characterized by the vanishing of every minor avoiding column 4:
// J12 = J13 = J32 = 0 with J42 != 0.
bool criterion_form(const Ctx& c) {
    return !c.nz(c.ms.J12) && !c.nz(c.ms.J13) && !c.nz(c.ms.J32) && c.nz(c.ms.J42);
}

std::optional<Verdict> rule_criterion(const Ctx& c, int n) {
    if (!criterion_form(c)) return std::nullopt;
    if (c.sys.Q21.is_zero()) {
        Verdict v;
        v.status = VerdictStatus::Incomplete;
        v.rule = "Cor-criterion";
        v.order_used = n;
        v.note = "y2(1)=0 boundary form with Q21 identically zero";
        return v;
    }
    int j1 = c.nu(c.sys.Q21, 1.0);
    int j0 = c.nu(c.sys.Q21, 0.0);
    if (j1 >= kInfPrefix || j0 >= kInfPrefix) return std::nullopt; // jets below threshold
    std::vector<Witness> ws{{"Q21^(" + std::to_string(j1) + ")(1)",
                             c.deriv_at(c.sys.Q21, j1, 1.0)}};
    int km;
    if (c.nz(c.ms.J14)) {
        ws.push_back({"J14", c.ms.J14});
        km = 0;
    } else {
        ws.push_back({"Q21^(" + std::to_string(j0) + ")(0)", c.deriv_at(c.sys.Q21, j0, 0.0)});
        km = j0 + 1;
    }
    return make_complete("Cor-criterion", std::move(ws), n, j1 + 1, km);
}

std::optional<Verdict> rule_vanishing_p_incomplete(const Ctx& c, int n) {
    if (c.nz(c.ms.J32) || c.nz(c.ms.J14)) return std::nullopt;
    if (!c.p_is_zero()) return std::nullopt;
    Verdict v;
    v.status = VerdictStatus::Incomplete;
    v.rule = "Rem-Dirac-vs-SL";
    v.order_used = n;
    v.note = "J32 = J14 = 0 with P vanishing near both endpoints";
    return v;
}

std::optional<Verdict> rule_2x2notR(const Ctx& c, int n) {
    if (c.nz(c.ms.J32) || c.nz(c.ms.J42) || c.nz(c.ms.J13) || !c.nz(c.ms.J14))
        return std::nullopt;
    if (c.nu(c.sys.Q12, 0.0) != 0 || c.nu(c.sys.Q21, 1.0) != 0) return std::nullopt;
    std::vector<Witness> ws{{"J14", c.ms.J14},
                            {"Q12(0)", c.sys.Q12.eval(0.0)},
                            {"Q21(1)", c.sys.Q21.eval(1.0)}};
    return make_complete("Prop-2x2notR", std::move(ws), n, 2, 0);
}

std::optional<Verdict> rule_thm_J32J14(const Ctx& c, int n) {
    if (c.nz(c.ms.J32) || c.nz(c.ms.J14) || !c.nz(c.ms.J13) || !c.nz(c.ms.J42))
        return std::nullopt;
    int n0 = c.nu(c.P, 0.0);
    int n1 = c.nu(c.P, 1.0);
    if (n0 >= kInfPrefix || n1 >= kInfPrefix) return std::nullopt;
    if (n0 > kDefaultMaxOrder - 1 || n1 > kDefaultMaxOrder - 1) return std::nullopt;

    Complex Pn0_0 = c.deriv_at(c.P, n0, 0.0);
    Complex Pn1_1 = c.deriv_at(c.P, n1, 1.0);
    if (std::abs(n1 - n0) <= 1) {
        std::vector<Witness> ws{{"P^(" + std::to_string(n0) + ")(0)", Pn0_0},
                                {"P^(" + std::to_string(n1) + ")(1)", Pn1_1}};
        return make_complete("Thm-J32J14-case-i", std::move(ws), n, n0 + 1, n1 + 1);
    }
    if (n0 >= n1 + 2 && n1 + 3 <= kDefaultMaxOrder) {
        Complex u = c.ms.J42 * c.deriv_at(c.P, n1 + 2, 0.0);
        Complex v = ((n1 % 2 == 0) ? 1.0 : -1.0) * c.ms.J13 * c.sys.b1 * c.sys.b1 *
                    c.sys.Q12.eval(0.0) * c.sys.Q12.eval(0.0) * Pn1_1;
        if (Ctx::combo_nonzero(u, v, c.zero_tol)) {
            std::vector<Witness> ws{
                {"P^(" + std::to_string(n1) + ")(1)", Pn1_1},
                {"J42*P^(" + std::to_string(n1 + 2) + ")(0)+(-1)^n1*J13*b1^2*Q12(0)^2*P^(n1)(1)",
                 u + v}};
            return make_complete("Thm-J32J14-case-ii", std::move(ws), n, n1 + 3, n1 + 1);
        }
    }
    if (n1 >= n0 + 2 && n0 + 3 <= kDefaultMaxOrder) {
        Complex u = c.ms.J42 * c.deriv_at(c.P, n0 + 2, 1.0);
        Complex v = ((n0 % 2 == 0) ? 1.0 : -1.0) * c.ms.J13 * c.sys.b1 * c.sys.b1 *
                    c.sys.Q12.eval(1.0) * c.sys.Q12.eval(1.0) * Pn0_0;
        if (Ctx::combo_nonzero(u, v, c.zero_tol)) {
            std::vector<Witness> ws{
                {"P^(" + std::to_string(n0) + ")(0)", Pn0_0},
                {"J42*P^(" + std::to_string(n0 + 2) + ")(1)+(-1)^n0*J13*b1^2*Q12(1)^2*P^(n0)(0)",
                 u + v}};
            return make_complete("Thm-J32J14-case-iii", std::move(ws), n, n0 + 1, n0 + 3);
        }
    }
    return std::nullopt;
}

std::optional<Verdict> rule_q12q21_zero(const Ctx& c, int n) {
    if (c.nz(c.ms.J32) || !c.nz(c.ms.J14)) return std::nullopt;
    int m = std::min(c.nu(c.sys.Q12, 0.0), c.nu(c.sys.Q21, 1.0));
    if (m >= kInfPrefix) return std::nullopt;
    int n0 = c.nu(c.P, 0.0);
    // (i): P^{(n0)}(0) != 0 for some n0 in {m, ..., min(2m, n_max-1)}
    if (n0 <= std::min(2 * m, kDefaultMaxOrder - 1)) {
        std::vector<Witness> ws{{"J14", c.ms.J14},
                                {"P^(" + std::to_string(n0) + ")(0)", c.deriv_at(c.P, n0, 0.0)}};
        return make_complete("Prop-Q12Q21zero-i", std::move(ws), n, n0 + 1, 0);
    }
    // (ii): P^{(2m+1)}(0) + J14 b1 b2 Q12^{(m)}(0) Q21^{(m)}(1) != 0
    if (2 * m + 2 <= kDefaultMaxOrder) {
        Complex u = c.deriv_at(c.P, 2 * m + 1, 0.0);
        Complex v = c.ms.J14 * c.sys.b1 * c.sys.b2 * c.deriv_at(c.sys.Q12, m, 0.0) *
                    c.deriv_at(c.sys.Q21, m, 1.0);
        if (Ctx::combo_nonzero(u, v, c.zero_tol)) {
            std::vector<Witness> ws{
                {"J14", c.ms.J14},
                {"P^(" + std::to_string(2 * m + 1) + ")(0)+J14*b1*b2*Q12^(m)(0)*Q21^(m)(1)",
                 u + v}};
            return make_complete("Prop-Q12Q21zero-ii", std::move(ws), n, 2 * m + 2, 0);
        }
    }
    return std::nullopt;
}

std::optional<Verdict> rule_q0_p0p1(const Ctx& c, int n) {
    if (c.nz(c.ms.J32) || c.nz(c.ms.J14) || !c.nz(c.ms.J13) || !c.nz(c.ms.J42))
        return std::nullopt;
    int m0 = std::min(c.nu(c.sys.Q12, 0.0), c.nu(c.sys.Q21, 1.0));
    int m1 = std::min(c.nu(c.sys.Q12, 1.0), c.nu(c.sys.Q21, 0.0));
    int n0 = c.nu(c.P, 0.0);
    int n1 = c.nu(c.P, 1.0);
    if (n0 > kDefaultMaxOrder - 1 || n1 > kDefaultMaxOrder - 1) return std::nullopt;
    if (!(-2 * m0 - 1 <= n0 - n1 && n0 - n1 <= 2 * m1 + 1)) return std::nullopt;
    std::vector<Witness> ws{
        {"P^(" + std::to_string(n0) + ")(0)", c.deriv_at(c.P, n0, 0.0)},
        {"P^(" + std::to_string(n1) + ")(1)", c.deriv_at(c.P, n1, 1.0)}};
    return make_complete("Prop-Q0-P0P1", std::move(ws), n, n0 + 1, n1 + 1);
}

std::optional<Verdict> rule_makin_gen1(const Ctx& c, int n) {
    if (c.nz(c.ms.J32) || !c.nz(c.ms.J14)) return std::nullopt;
    int prefix = std::min(c.nu(c.sys.Q12, 0.0), c.nu(c.sys.Q21, 1.0));
    int n0 = c.nu(c.P, 0.0); // choose smoothness order n' = n0 + 1
    if (n0 > kDefaultMaxOrder - 1) return std::nullopt;
    if ((n0 + 1) / 2 > prefix) return std::nullopt; // ceil(n0/2)... ceil((n'-1)/2) <= prefix
    std::vector<Witness> ws{{"J14", c.ms.J14},
                            {"P^(" + std::to_string(n0) + ")(0)", c.deriv_at(c.P, n0, 0.0)}};
    return make_complete("Cor-Makin-gen1", std::move(ws), n, n0 + 1, 0);
}

std::optional<Verdict> rule_makin_gen2(const Ctx& c, int n) {
    if (c.nz(c.ms.J32) || c.nz(c.ms.J14) || !c.nz(c.ms.J13) || !c.nz(c.ms.J42))
        return std::nullopt;
    int m_full = std::min(std::min(c.nu(c.sys.Q12, 0.0), c.nu(c.sys.Q12, 1.0)),
                          std::min(c.nu(c.sys.Q21, 0.0), c.nu(c.sys.Q21, 1.0)));
    int n0 = c.nu(c.P, 0.0);
    int n1 = c.nu(c.P, 1.0);
    if (n0 > kDefaultMaxOrder - 1 || n1 > kDefaultMaxOrder - 1) return std::nullopt;
    int np = std::max(n0, n1) + 1; // smoothness order instantiation
    int m = (np - 2 + 2) / 3;      // ceil((np-2)/3)
    if (m > std::min({m_full, n0, n1})) return std::nullopt;
    std::vector<Witness> ws{
        {"P^(" + std::to_string(n0) + ")(0)", c.deriv_at(c.P, n0, 0.0)},
        {"P^(" + std::to_string(n1) + ")(1)", c.deriv_at(c.P, n1, 1.0)}};
    return make_complete("Cor-Makin-gen2", std::move(ws), n, n0 + 1, n1 + 1);
}

std::optional<Verdict> rule_p0p1_zero(const Ctx& c, int n) {
    if (c.nz(c.ms.J32) || c.nz(c.ms.J14) || !c.nz(c.ms.J13) || !c.nz(c.ms.J42))
        return std::nullopt;
    int n0 = c.nu(c.P, 0.0);
    int n1 = c.nu(c.P, 1.0);
    if (n0 >= kInfPrefix || n0 > kDefaultMaxOrder - 3) return std::nullopt;
    if (n1 < n0 + 3) return std::nullopt; // need P^{(k)}(1) = 0 through k = n0+2
    if (c.nu(c.sys.Q12, 1.0) != 0) return std::nullopt; // Q12(1) != 0
    std::vector<Witness> ws{{"P^(" + std::to_string(n0) + ")(0)", c.deriv_at(c.P, n0, 0.0)},
                            {"Q12(1)", c.sys.Q12.eval(1.0)}};
    return make_complete("Cor-P0P1zero", std::move(ws), n, n0 + 1, n0 + 3);
}

std::optional<Verdict> rule_J32J42J13_zero(const Ctx& c, int n) {
    if (c.nz(c.ms.J32) || c.nz(c.ms.J42) || c.nz(c.ms.J13) || !c.nz(c.ms.J14))
        return std::nullopt;
    int j0 = c.nu(c.sys.Q12, 0.0);
    int j1 = c.nu(c.sys.Q21, 1.0);
    if (j0 >= kInfPrefix || j1 >= kInfPrefix || j0 + j1 > kDefaultMaxOrder - 2)
        return std::nullopt;
    std::vector<Witness> ws{
        {"J14", c.ms.J14},
        {"Q12^(" + std::to_string(j0) + ")(0)", c.deriv_at(c.sys.Q12, j0, 0.0)},
        {"Q21^(" + std::to_string(j1) + ")(1)", c.deriv_at(c.sys.Q21, j1, 1.0)}};
    return make_complete("Cor-J32J42J13zero", std::move(ws), n, j0 + j1 + 2, 0);
}

std::optional<Verdict> rule_J32J13_zero(const Ctx& c, int n) {
    if (c.nz(c.ms.J32) || c.nz(c.ms.J13) || !c.nz(c.ms.J42)) return std::nullopt;
    int j1 = c.nu(c.sys.Q21, 1.0);
    if (j1 > kDefaultMaxOrder - 1) return std::nullopt;
    std::vector<Witness> ws{{"J42", c.ms.J42},
                            {"Q21^(" + std::to_string(j1) + ")(1)", c.deriv_at(c.sys.Q21, j1, 1.0)}};
    if (c.nz(c.ms.J14)) {
        ws.push_back({"J14", c.ms.J14});
        return make_complete("Cor-J32J13zero", std::move(ws), n, j1 + 1, 0);
    }
    int j0 = c.nu(c.sys.Q21, 0.0);
    if (j0 > kDefaultMaxOrder - 1) return std::nullopt;
    ws.push_back({"Q21^(" + std::to_string(j0) + ")(0)", c.deriv_at(c.sys.Q21, j0, 0.0)});
    return make_complete("Cor-J32J13zero", std::move(ws), n, j1 + 1, j0 + 1);
}

// Mirror of the two J32 = J13 = 0 corollaries under the component swap
// y1 <-> y2, lambda -> -lambda, which exchanges the minor pattern
// {J32, J13, J42, J14} -> {-J14, -J42, -J13, -J32} and Q12 <-> Q21.
std::optional<Verdict> rule_J14J42_zero(const Ctx& c, int n) {
    if (c.nz(c.ms.J14) || c.nz(c.ms.J42)) return std::nullopt;
    if (!c.nz(c.ms.J13) && c.nz(c.ms.J32)) {
        int j0 = c.nu(c.sys.Q21, 0.0);
        int j1 = c.nu(c.sys.Q12, 1.0);
        if (j0 >= kInfPrefix || j1 >= kInfPrefix || j0 + j1 > kDefaultMaxOrder - 2)
            return std::nullopt;
        std::vector<Witness> ws{
            {"J32", c.ms.J32},
            {"Q21^(" + std::to_string(j0) + ")(0)", c.deriv_at(c.sys.Q21, j0, 0.0)},
            {"Q12^(" + std::to_string(j1) + ")(1)", c.deriv_at(c.sys.Q12, j1, 1.0)}};
        return make_complete("Cor-J14J42zero", std::move(ws), n, 0, j0 + j1 + 2);
    }
    if (c.nz(c.ms.J13)) {
        int j1 = c.nu(c.sys.Q12, 1.0);
        if (j1 > kDefaultMaxOrder - 1) return std::nullopt;
        std::vector<Witness> ws{{"J13", c.ms.J13},
                                {"Q12^(" + std::to_string(j1) + ")(1)", c.deriv_at(c.sys.Q12, j1, 1.0)}};
        if (c.nz(c.ms.J32)) {
            ws.push_back({"J32", c.ms.J32});
            return make_complete("Cor-J14J42zero", std::move(ws), n, 0, j1 + 1);
        }
        int j0 = c.nu(c.sys.Q12, 0.0);
        if (j0 > kDefaultMaxOrder - 1) return std::nullopt;
        ws.push_back({"Q12^(" + std::to_string(j0) + ")(0)", c.deriv_at(c.sys.Q12, j0, 0.0)});
        return make_complete("Cor-J14J42zero", std::move(ws), n, j0 + 1, j1 + 1);
    }
    return std::nullopt;
}

Ctx make_ctx(const DiracSystem& sys, const BoundarySpec& bc, double zero_tol) {
    MinorSet ms = minors(bc);
    return Ctx{sys, ms, zero_tol * ms.max_abs(), zero_tol, p_function(sys, ms)};
}

std::optional<Verdict> catalogue(const Ctx& c, int n) {
    for (auto* rule : {rule_2x2notR, rule_thm_J32J14, rule_q12q21_zero, rule_q0_p0p1,
                       rule_makin_gen1, rule_makin_gen2, rule_p0p1_zero,
                       rule_J32J42J13_zero, rule_J32J13_zero, rule_J14J42_zero}) {
        if (auto v = rule(c, n)) {
            if (v->k_plus && v->k_minus && c.table_confirms(*v->k_plus, *v->k_minus))
                return v;
            // predicted witness entries failed exact confirmation; next rule
        }
    }
    return std::nullopt;
}

} // namespace

std::string to_string(VerdictStatus s) {
    switch (s) {
        case VerdictStatus::CompleteAndMinimal: return "CompleteAndMinimal";
        case VerdictStatus::Incomplete: return "Incomplete";
        case VerdictStatus::Inconclusive: return "Inconclusive";
    }
    return "?";
}

std::optional<Verdict> special_case_catalogue(const DiracSystem& sys,
                                              const BoundarySpec& bc, int n,
                                              double zero_tol) {
    Ctx c = make_ctx(sys, bc, zero_tol);
    return catalogue(c, n);
}

Verdict verdict(const DiracSystem& sys, const BoundarySpec& bc, int n, double zero_tol) {
    Ctx c = make_ctx(sys, bc, zero_tol);

    if (auto v = rule_criterion(c, n)) return *v;
    if (auto v = rule_vanishing_p_incomplete(c, n)) return *v;

    CoefficientTable tbl = coefficient_table(sys, c.ms, n, zero_tol);
    if (tbl.k_plus && tbl.k_minus) {
        int kp = *tbl.k_plus, km = *tbl.k_minus;
        std::vector<Witness> ws{{"c_" + std::to_string(kp) + "^+", tbl.c_plus[kp]},
                                {"c_" + std::to_string(km) + "^-", tbl.c_minus[km]}};
        return make_complete("Thm-compl-gen-2x2", std::move(ws), n, kp, km);
    }

    if (auto v = catalogue(c, n)) return *v;

    Verdict v;
    v.status = VerdictStatus::Inconclusive;
    v.rule = "none";
    v.order_used = n;
    v.k_plus = tbl.k_plus;
    v.k_minus = tbl.k_minus;
    v.note = "no witness through order " + std::to_string(n) +
             "; raising n may decide (sufficient conditions only)";
    return v;
}

CorroborationReport numeric_corroboration(const DiracSystem& sys, const BoundarySpec& bc,
                                          const Verdict& v,
                                          const std::vector<double>& t_grid,
                                          const OdeOptions& opts, double zero_tol) {
    CorroborationReport rep;
    MinorSet ms = minors(bc);

    if (v.status == VerdictStatus::Incomplete) {
        rep.decay_mode = true;
        auto scan = ray_scan(sys, ms, HalfPlane::Upper, t_grid, opts);
        double first = std::abs(scan.front().second) * std::pow(t_grid.front(), 4);
        double last = std::abs(scan.back().second) * std::pow(t_grid.back(), 4);
        rep.decay_tail_ratio = first > 0.0 ? last / first : 0.0;
        rep.applicable = true;
        rep.suspect = !(rep.decay_tail_ratio < 1e-8);
        return rep;
    }

    if (!v.k_plus || !v.k_minus) return rep;
    rep.applicable = true;
    int kp = *v.k_plus, km = *v.k_minus;

    CoefficientTable tbl =
        coefficient_table(sys, ms, std::max({kp, km, 1}), zero_tol);
    std::vector<Complex> known_p(tbl.c_plus.begin(), tbl.c_plus.begin() + kp);
    std::vector<Complex> known_m(tbl.c_minus.begin(), tbl.c_minus.begin() + km);
    rep.fit_plus =
        fit_leading_coefficient(sys, ms, HalfPlane::Upper, kp, t_grid, known_p, opts).estimate;
    rep.fit_minus =
        fit_leading_coefficient(sys, ms, HalfPlane::Lower, km, t_grid, known_m, opts).estimate;

    auto up = ray_scan(sys, ms, HalfPlane::Upper, t_grid, opts);
    auto lo = ray_scan(sys, ms, HalfPlane::Lower, t_grid, opts);
    double fp = std::numeric_limits<double>::infinity();
    double fm = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < t_grid.size(); ++i) {
        fp = std::min(fp, std::abs(up[i].second) * std::pow(t_grid[i], kp));
        fm = std::min(fm, std::abs(lo[i].second) * std::pow(t_grid[i], km));
    }
    rep.floor_plus = fp;
    rep.floor_minus = fm;
    rep.suspect = fp < 1e-3 * std::abs(rep.fit_plus) || fm < 1e-3 * std::abs(rep.fit_minus);
    return rep;
}

} // namespace dirspec
