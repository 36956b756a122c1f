#include "dirspec/algebra.hpp"

#include <algorithm>
#include <mutex>
#include <sstream>

#include "dirspec/errors.hpp"

namespace dirspec {

Monomial::Monomial(std::vector<DerivSymbol> factors) : f_(std::move(factors)) {
    std::sort(f_.begin(), f_.end());
}

int Monomial::count(DerivSymbol::Species s) const {
    int n = 0;
    for (const auto& sym : f_)
        if (sym.species == s) ++n;
    return n;
}

int Monomial::total_order() const {
    int n = 0;
    for (const auto& sym : f_) n += sym.order;
    return n;
}

int Monomial::max_order() const {
    int n = 0;
    for (const auto& sym : f_) n = std::max(n, sym.order);
    return n;
}

Monomial Monomial::merged_with(const Monomial& o) const {
    std::vector<DerivSymbol> all = f_;
    all.insert(all.end(), o.f_.begin(), o.f_.end());
    return Monomial(std::move(all));
}

std::string Monomial::str() const {
    std::string s;
    for (std::size_t i = 0; i < f_.size(); ++i) {
        if (i) s += '.';
        s += f_[i].str();
    }
    return s;
}

DerivPolynomial DerivPolynomial::term(Monomial m, BigInt coeff) {
    DerivPolynomial p;
    p.add_term(m, coeff);
    return p;
}

BigInt DerivPolynomial::coefficient(const Monomial& m) const {
    auto it = t_.find(m);
    return it == t_.end() ? BigInt(0) : it->second;
}

void DerivPolynomial::add_term(const Monomial& m, const BigInt& coeff) {
    if (coeff == 0) return;
    auto [it, inserted] = t_.try_emplace(m, coeff);
    if (!inserted) {
        it->second += coeff;
        if (it->second == 0) t_.erase(it);
    }
}

DerivPolynomial& DerivPolynomial::operator+=(const DerivPolynomial& o) {
    for (const auto& [m, c] : o.t_) add_term(m, c);
    return *this;
}

DerivPolynomial operator-(const DerivPolynomial& a, const DerivPolynomial& b) {
    DerivPolynomial out = a;
    for (const auto& [m, c] : b.terms()) out.add_term(m, -c);
    return out;
}

DerivPolynomial DerivPolynomial::negated() const {
    DerivPolynomial out;
    for (const auto& [m, c] : t_) out.t_.emplace(m, -c);
    return out;
}

std::string DerivPolynomial::dump() const {
    if (t_.empty()) return "0";
    std::ostringstream os;
    bool first = true;
    for (const auto& [m, c] : t_) {
        BigInt a = c < 0 ? BigInt(-c) : c;
        if (first) {
            if (c < 0) os << '-';
            first = false;
        } else {
            os << (c < 0 ? " - " : " + ");
        }
        os << a.str() << '*' << m.str();
    }
    return os.str();
}

DerivPolynomial differentiate(const DerivPolynomial& p, int n_max) {
    DerivPolynomial out;
    for (const auto& [m, c] : p.terms()) {
        const auto& fs = m.factors();
        for (std::size_t i = 0; i < fs.size(); ++i) {
            std::vector<DerivSymbol> nf = fs;
            nf[i].order += 1;
            if (nf[i].order > n_max) throw MaxOrderExceeded(nf[i].order, n_max);
            out.add_term(Monomial(std::move(nf)), c);
        }
    }
    return out;
}

DerivPolynomial multiply(const DerivPolynomial& p, const DerivPolynomial& q) {
    DerivPolynomial out;
    for (const auto& [mp, cp] : p.terms())
        for (const auto& [mq, cq] : q.terms()) out.add_term(mp.merged_with(mq), cp * cq);
    return out;
}

Complex evaluate(const DerivPolynomial& p, const std::vector<Complex>& valsA,
                 const std::vector<Complex>& valsB) {
    Complex acc(0.0, 0.0);
    for (const auto& [m, c] : p.terms()) {
        Complex prod(1.0, 0.0);
        for (const auto& s : m.factors()) {
            const auto& vals = (s.species == DerivSymbol::Species::A) ? valsA : valsB;
            if (s.order < 0 || static_cast<std::size_t>(s.order) >= vals.size())
                throw MissingDerivative(s.species == DerivSymbol::Species::A ? 'A' : 'B',
                                        s.order);
            prod *= vals[s.order];
        }
        acc += static_cast<double>(c) * prod;
    }
    return acc;
}

struct SigmaTable::State {
    mutable std::mutex mu;
    mutable std::vector<DerivPolynomial> memo; // memo[k-1] holds sigma_k
};

SigmaTable::SigmaTable(int n_max) : n_max_(n_max), state_(std::make_shared<State>()) {}

const DerivPolynomial& SigmaTable::sigma(int k) const {
    if (k < 1 || k > n_max_) throw MaxOrderExceeded(k, n_max_);
    std::scoped_lock lock(state_->mu);
    auto& memo = state_->memo;
    if (memo.empty()) memo.push_back(DerivPolynomial::symbol(A(0))); // sigma_1
    while (static_cast<int>(memo.size()) < k) {
        int j = static_cast<int>(memo.size()); // building sigma_{j+1}
        DerivPolynomial next = differentiate(memo[j - 1], n_max_).negated();
        DerivPolynomial conv;
        for (int i = 1; i <= j - 1; ++i) conv += multiply(memo[i - 1], memo[j - 1 - i]);
        next += multiply(DerivPolynomial::symbol(B(0)), conv).negated();
        memo.push_back(std::move(next));
    }
    return memo[k - 1];
}

const DerivPolynomial& sigma(int k) {
    static SigmaTable table(kDefaultMaxOrder);
    return table.sigma(k);
}

std::vector<PolyFunc> oracle_sigma(const PolyFunc& q_A, const PolyFunc& q_B, int n,
                                   int n_max) {
    if (n > n_max) throw MaxOrderExceeded(n, n_max);
    std::vector<PolyFunc> a{PolyFunc::zero()};     // a_0 = 0
    std::vector<PolyFunc> b{PolyFunc::constant(1)}; // b_0 = 1
    std::vector<PolyFunc> sig; // sigma_1..sigma_n
    for (int k = 1; k <= n; ++k) {
        PolyFunc ak = q_A * b[k - 1] - a[k - 1].derivative();
        PolyFunc bk = (q_B * ak).antiderivative();
        PolyFunc sk = ak;
        for (int j = 1; j <= k - 1; ++j) sk = sk - b[j] * sig[k - j - 1];
        a.push_back(std::move(ak));
        b.push_back(std::move(bk));
        sig.push_back(std::move(sk));
    }
    return sig;
}

} // namespace dirspec
