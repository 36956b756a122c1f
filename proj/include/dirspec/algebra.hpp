#pragma once

#include <complex>
#include <map>
#include <memory>
#include <string>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

#include "dirspec/poly.hpp"

namespace dirspec {

using BigInt = boost::multiprecision::cpp_int;

constexpr int kDefaultMaxOrder = 12;

/// Derivative symbol of one of the two generic potential species.
///
/// Species A stands in for the q-function whose pure derivative leads each
/// sigma_k; species B for its partner. The caller binds (A,B) to (q_-, q_+)
/// or (q_+, q_-): both sign variants share one coefficient table.
struct DerivSymbol {
    enum class Species : unsigned char { A, B };
    Species species;
    int order;

    friend bool operator==(const DerivSymbol&, const DerivSymbol&) = default;

    /// Canonical factor order: species A first, higher derivative order first.
    friend bool operator<(const DerivSymbol& a, const DerivSymbol& b) {
        if (a.species != b.species) return a.species < b.species;
        return a.order > b.order;
    }

    std::string str() const {
        return (species == Species::A ? "A" : "B") + std::to_string(order);
    }
};

inline DerivSymbol A(int order) { return {DerivSymbol::Species::A, order}; }
inline DerivSymbol B(int order) { return {DerivSymbol::Species::B, order}; }

/// Sorted multiset of derivative symbols; equality is structural.
class Monomial {
public:
    Monomial() = default;
    explicit Monomial(std::vector<DerivSymbol> factors);

    const std::vector<DerivSymbol>& factors() const { return f_; }
    std::size_t size() const { return f_.size(); }

    int count(DerivSymbol::Species s) const;
    int total_order() const;
    int max_order() const;

    Monomial merged_with(const Monomial& o) const;

    friend bool operator==(const Monomial&, const Monomial&) = default;

    /// Fewer factors first, then lexicographic on the canonical factor list.
    /// This is also the term order used by the debug dump and golden files.
    friend bool operator<(const Monomial& a, const Monomial& b) {
        if (a.f_.size() != b.f_.size()) return a.f_.size() < b.f_.size();
        return a.f_ < b.f_;
    }

    std::string str() const;

private:
    std::vector<DerivSymbol> f_;
};

/// Formal polynomial in derivative symbols with exact integer coefficients.
///
/// The recursion generating sigma_k is integer-closed, so coefficients are
/// kept as arbitrary-precision integers and no term ever carries rounding.
class DerivPolynomial {
public:
    using TermMap = std::map<Monomial, BigInt>;

    DerivPolynomial() = default;
    static DerivPolynomial term(Monomial m, BigInt coeff);
    static DerivPolynomial symbol(DerivSymbol s) { return term(Monomial({s}), 1); }

    const TermMap& terms() const { return t_; }
    bool is_zero() const { return t_.empty(); }
    std::size_t term_count() const { return t_.size(); }

    BigInt coefficient(const Monomial& m) const;

    void add_term(const Monomial& m, const BigInt& coeff);

    DerivPolynomial& operator+=(const DerivPolynomial& o);
    friend DerivPolynomial operator+(DerivPolynomial a, const DerivPolynomial& b) {
        a += b;
        return a;
    }
    friend DerivPolynomial operator-(const DerivPolynomial& a, const DerivPolynomial& b);
    DerivPolynomial negated() const;

    friend bool operator==(const DerivPolynomial&, const DerivPolynomial&) = default;

    /// Deterministic text form, e.g. "-1*A5 + 8*A3.A0.B0 + ...".
    std::string dump() const;

private:
    TermMap t_;
};

/// Leibniz derivative: each factor's order incremented in turn,
/// multiplicities folded into the coefficients.
DerivPolynomial differentiate(const DerivPolynomial& p, int n_max = kDefaultMaxOrder);

DerivPolynomial multiply(const DerivPolynomial& p, const DerivPolynomial& q);

/// Numeric instantiation: valsA[j] = value of A_j, valsB[j] = value of B_j.
Complex evaluate(const DerivPolynomial& p, const std::vector<Complex>& valsA,
                 const std::vector<Complex>& valsB);

/// Memoized generator of the trace-formula polynomials:
///   sigma_1 = A0,  sigma_{k+1} = -sigma_k' - B0 * sum_{j=1}^{k-1} sigma_j sigma_{k-j}.
/// Insert-once cache, safe for concurrent readers.
class SigmaTable {
public:
    explicit SigmaTable(int n_max = kDefaultMaxOrder);
    int n_max() const { return n_max_; }
    const DerivPolynomial& sigma(int k) const;

private:
    int n_max_;
    struct State;
    std::shared_ptr<State> state_;
};

/// sigma(k) from a shared default table with n_max = 12.
const DerivPolynomial& sigma(int k);

/// Quotient-expansion oracle: the same sigma_1(x)..sigma_n(x) obtained through
/// the a_k/b_k recursion (a_k = qA*b_{k-1} - a_{k-1}', b_k = int_0^x qB*a_k,
/// sigma_k = a_k - sum b_j*sigma_{k-j}) with exact polynomial integration.
/// Independent of the Riccati path; used to cross-validate it.
std::vector<PolyFunc> oracle_sigma(const PolyFunc& q_A, const PolyFunc& q_B, int n,
                                   int n_max = kDefaultMaxOrder);

} // namespace dirspec
