#pragma once

#include <algorithm>
#include <bit>
#include <cctype>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <boost/container/small_vector.hpp>

#include "ambient.hpp"
#include "errors.hpp"

namespace supercluster {

/// Exponents of the even (Laurent) variables; negative entries allowed.
using ExpVec = boost::container::small_vector<std::int32_t, 8>;
/// Set of odd generators in a Grassmann monomial; bit j stands for y_j.
using OddMask = std::uint64_t;

struct Monomial {
    ExpVec exps;
    OddMask odd = 0;

    friend bool operator==(const Monomial&, const Monomial&) = default;
};

inline std::vector<std::size_t> odd_indices(OddMask mask) {
    std::vector<std::size_t> out;
    for (; mask; mask &= mask - 1)
        out.push_back(static_cast<std::size_t>(std::countr_zero(mask)));
    return out;
}

inline int grassmann_degree(OddMask mask) { return std::popcount(mask); }

/// Sign picked up when the ascending products y^a and y^b are concatenated and
/// re-sorted; 0 when they share a generator.
inline int odd_product_sign(OddMask a, OddMask b) {
    if (a & b)
        return 0;
    unsigned inversions = 0;
    for (OddMask rest = b; rest; rest &= rest - 1) {
        const int j = std::countr_zero(rest);
        const OddMask above = j >= 63 ? OddMask{0} : (a >> (j + 1));
        inversions += static_cast<unsigned>(std::popcount(above));
    }
    return (inversions & 1u) ? -1 : 1;
}

inline long total_degree(const ExpVec& e) {
    long s = 0;
    for (auto v : e)
        s += v;
    return s;
}

/// Global term order: Grassmann degree, then total x-degree, then x-exponents
/// (a larger exponent on an earlier variable sorts first), then odd indices
/// lexicographically. Restricted to one odd component it is a graded monomial
/// order, which is all single-divisor division needs.
struct TermOrder {
    bool operator()(const Monomial& a, const Monomial& b) const {
        const int da = grassmann_degree(a.odd);
        const int db = grassmann_degree(b.odd);
        if (da != db)
            return da < db;
        const long sa = total_degree(a.exps);
        const long sb = total_degree(b.exps);
        if (sa != sb)
            return sa < sb;
        for (std::size_t i = 0; i < a.exps.size(); ++i)
            if (a.exps[i] != b.exps[i])
                return a.exps[i] > b.exps[i];
        if (a.odd != b.odd) {
            const OddMask diff = a.odd ^ b.odd;
            const OddMask lowest = diff & (~diff + 1);
            return (a.odd & lowest) != 0;
        }
        return false;
    }
};

/// Product of two monomials: the sign of the odd merge (0 if it vanishes) and
/// the resulting monomial.
inline std::pair<int, Monomial> multiply_monomials(const Monomial& a, const Monomial& b) {
    const int sign = odd_product_sign(a.odd, b.odd);
    Monomial out;
    if (sign == 0)
        return {0, out};
    out.exps = a.exps;
    for (std::size_t i = 0; i < out.exps.size(); ++i)
        out.exps[i] += b.exps[i];
    out.odd = a.odd | b.odd;
    return {sign, out};
}

/// Optional cap on the number of term products in one polynomial
/// multiplication on this thread. Exceeding it throws ResourceLimit.
class ScopedProductLimit {
public:
    explicit ScopedProductLimit(std::size_t max_products) : saved_(current()) { current() = max_products; }
    ~ScopedProductLimit() { current() = saved_; }
    ScopedProductLimit(const ScopedProductLimit&) = delete;
    ScopedProductLimit& operator=(const ScopedProductLimit&) = delete;

    /// Zero means unlimited.
    static std::size_t& current() {
        thread_local std::size_t limit = 0;
        return limit;
    }

private:
    std::size_t saved_;
};

/// Canonical sparse element of Q[x_1^{+-1},...,x_m^{+-1}] (x) Lambda(y_1,...,y_n).
class SuperPoly {
public:
    using TermMap = std::map<Monomial, Rational, TermOrder>;
    using Term = TermMap::value_type;

    explicit SuperPoly(AmbientPtr ambient) : ambient_(std::move(ambient)) {
        if (!ambient_)
            throw DimensionError("SuperPoly needs an ambient symbol table");
    }

    static SuperPoly constant(AmbientPtr ambient, const Rational& c) {
        SuperPoly p(std::move(ambient));
        p.add_term(p.unit_monomial(), c);
        return p;
    }

    static SuperPoly even_variable(AmbientPtr ambient, std::size_t i, std::int32_t exponent = 1) {
        SuperPoly p(std::move(ambient));
        if (i >= p.ambient_->even_count())
            throw DimensionError("even variable index out of range");
        Monomial m = p.unit_monomial();
        m.exps[i] = exponent;
        p.add_term(m, Rational(1));
        return p;
    }

    static SuperPoly odd_variable(AmbientPtr ambient, std::size_t j) {
        SuperPoly p(std::move(ambient));
        if (j >= p.ambient_->odd_count())
            throw DimensionError("odd variable index out of range");
        Monomial m = p.unit_monomial();
        m.odd = OddMask{1} << j;
        p.add_term(m, Rational(1));
        return p;
    }

    static SuperPoly symbol(const AmbientPtr& ambient, std::string_view name) {
        auto s = ambient->find(name);
        if (!s)
            throw PreconditionError("unknown symbol '" + std::string(name) + "'");
        return s->parity == Parity::Even ? even_variable(ambient, s->index) : odd_variable(ambient, s->index);
    }

    static SuperPoly term(AmbientPtr ambient, Monomial m, const Rational& c) {
        SuperPoly p(std::move(ambient));
        if (m.exps.size() != p.ambient_->even_count())
            throw DimensionError("monomial length does not match the ambient");
        p.add_term(m, c);
        return p;
    }

    const AmbientPtr& ambient() const noexcept { return ambient_; }
    const TermMap& terms() const noexcept { return terms_; }
    std::size_t size() const noexcept { return terms_.size(); }
    bool is_zero() const noexcept { return terms_.empty(); }

    Monomial unit_monomial() const {
        Monomial m;
        m.exps.assign(ambient_->even_count(), 0);
        return m;
    }

    bool is_constant() const {
        return terms_.empty() || (terms_.size() == 1 && is_unit(terms_.begin()->first));
    }

    /// Constant coefficient (0 when absent).
    Rational constant_term() const {
        auto it = terms_.find(unit_monomial());
        return it == terms_.end() ? Rational(0) : it->second;
    }

    bool is_purely_even() const {
        return std::all_of(terms_.begin(), terms_.end(), [](const Term& t) { return t.first.odd == 0; });
    }

    /// True when every term has Grassmann degree of parity p (zero has both parities).
    bool has_parity(Parity p) const {
        const int want = p == Parity::Even ? 0 : 1;
        return std::all_of(terms_.begin(), terms_.end(),
                           [want](const Term& t) { return (grassmann_degree(t.first.odd) & 1) == want; });
    }

    /// Componentwise minimum of the x-exponents; all zeros for the zero element.
    ExpVec min_exponents() const {
        ExpVec out(ambient_->even_count(), 0);
        bool first = true;
        for (const auto& [m, c] : terms_) {
            for (std::size_t i = 0; i < out.size(); ++i)
                out[i] = first ? m.exps[i] : std::min(out[i], m.exps[i]);
            first = false;
        }
        return out;
    }

    /// Multiplication by the Laurent monomial x^by.
    SuperPoly shifted(const ExpVec& by) const {
        SuperPoly out(ambient_);
        for (const auto& [m, c] : terms_) {
            Monomial n = m;
            for (std::size_t i = 0; i < n.exps.size(); ++i)
                n.exps[i] += by[i];
            out.terms_.emplace_hint(out.terms_.end(), std::move(n), c);
        }
        return out;
    }

    /// Grassmann-degree-0 part.
    SuperPoly body() const {
        SuperPoly out(ambient_);
        for (const auto& t : terms_)
            if (t.first.odd == 0)
                out.terms_.insert(out.terms_.end(), t);
        return out;
    }

    /// Nilpotent part: everything of Grassmann degree >= 1.
    SuperPoly soul() const {
        SuperPoly out(ambient_);
        for (const auto& t : terms_)
            if (t.first.odd != 0)
                out.terms_.insert(out.terms_.end(), t);
        return out;
    }

    /// Largest term under TermOrder. Precondition: nonzero.
    const Term& leading_term() const {
        if (terms_.empty())
            throw PreconditionError("leading term of zero");
        return *terms_.rbegin();
    }

    void add_term(const Monomial& m, const Rational& c) {
        if (c == 0)
            return;
        auto [it, inserted] = terms_.try_emplace(m, c);
        if (!inserted) {
            it->second += c;
            if (it->second == 0)
                terms_.erase(it);
        }
    }

    SuperPoly operator-() const {
        SuperPoly out(*this);
        for (auto& t : out.terms_)
            t.second = -t.second;
        return out;
    }

    SuperPoly& operator+=(const SuperPoly& b) {
        require_same_ambient(ambient_, b.ambient_);
        for (const auto& [m, c] : b.terms_)
            add_term(m, c);
        return *this;
    }

    SuperPoly& operator-=(const SuperPoly& b) {
        require_same_ambient(ambient_, b.ambient_);
        for (const auto& [m, c] : b.terms_)
            add_term(m, -c);
        return *this;
    }

    SuperPoly& operator*=(const Rational& s) {
        if (s == 0) {
            terms_.clear();
            return *this;
        }
        for (auto& t : terms_)
            t.second *= s;
        return *this;
    }

    friend SuperPoly operator+(SuperPoly a, const SuperPoly& b) { return a += b; }
    friend SuperPoly operator-(SuperPoly a, const SuperPoly& b) { return a -= b; }
    friend SuperPoly operator*(SuperPoly a, const Rational& s) { return a *= s; }
    friend SuperPoly operator*(const Rational& s, SuperPoly a) { return a *= s; }

    friend SuperPoly operator*(const SuperPoly& a, const SuperPoly& b) {
        require_same_ambient(a.ambient_, b.ambient_);
        if (const std::size_t lim = ScopedProductLimit::current();
            lim != 0 && a.terms_.size() * b.terms_.size() > lim)
            throw ResourceLimit("polynomial product of " + std::to_string(a.terms_.size()) + " by " +
                                std::to_string(b.terms_.size()) + " terms exceeds the limit of " +
                                std::to_string(lim));
        // Products are accumulated over the integers after clearing
        // denominators; rational adds would reduce by a gcd on every term.
        const Integer da = a.common_denominator(), db = b.common_denominator();
        const std::vector<Integer> ia = a.scaled_numerators(da), ib = b.scaled_numerators(db);
        std::map<Monomial, Integer, TermOrder> acc;
        std::size_t i = 0;
        for (const auto& [ma, ca] : a.terms_) {
            std::size_t j = 0;
            for (const auto& [mb, cb] : b.terms_) {
                auto [sign, m] = multiply_monomials(ma, mb);
                if (sign != 0) {
                    Integer c = ia[i] * ib[j];
                    if (sign < 0)
                        c = -c;
                    auto [it, inserted] = acc.try_emplace(std::move(m), std::move(c));
                    if (!inserted)
                        it->second += c;
                }
                ++j;
            }
            ++i;
        }
        SuperPoly out(a.ambient_);
        const Integer den = da * db;
        for (auto& [m, c] : acc)
            if (c != 0)
                out.terms_.emplace_hint(out.terms_.end(), m, den == 1 ? Rational(c) : Rational(c, den));
        return out;
    }

    SuperPoly& operator*=(const SuperPoly& b) { return *this = *this * b; }

    SuperPoly pow(unsigned e) const {
        SuperPoly result = constant(ambient_, Rational(1));
        SuperPoly base = *this;
        while (e) {
            if (e & 1u)
                result = result * base;
            e >>= 1u;
            if (e)
                base = base * base;
        }
        return result;
    }

    friend bool operator==(const SuperPoly& a, const SuperPoly& b) {
        return same_ambient(a.ambient_, b.ambient_) && a.terms_ == b.terms_;
    }

private:
    static bool is_unit(const Monomial& m) {
        return m.odd == 0 && std::all_of(m.exps.begin(), m.exps.end(), [](auto e) { return e == 0; });
    }

    Integer common_denominator() const {
        Integer d = 1;
        for (const auto& t : terms_) {
            const Integer& q = denominator(t.second);
            if (q != 1)
                d = boost::multiprecision::lcm(d, q);
        }
        return d;
    }

    std::vector<Integer> scaled_numerators(const Integer& d) const {
        std::vector<Integer> out;
        out.reserve(terms_.size());
        for (const auto& t : terms_)
            out.push_back(d == 1 ? numerator(t.second) : numerator(t.second) * (d / denominator(t.second)));
        return out;
    }

    AmbientPtr ambient_;
    TermMap terms_;
};

inline SuperPoly sp_add(const SuperPoly& a, const SuperPoly& b) { return a + b; }
inline SuperPoly sp_mul(const SuperPoly& a, const SuperPoly& b) { return a * b; }

inline std::pair<SuperPoly, SuperPoly> sp_body_split(const SuperPoly& a) { return {a.body(), a.soul()}; }

/// Exact division of g by a purely even f. Returns q with g = q*f, or nullopt
/// when f does not divide g.
///
/// Both operands are first shifted into the polynomial ring (x-exponents >= 0,
/// f free of monomial content) so the division runs under a well-order. Since
/// f is even, it acts on each odd component of g independently and the first
/// leading term not divisible by LT(f) proves a nonzero remainder.
inline std::optional<SuperPoly> sp_exact_divide(const SuperPoly& g, const SuperPoly& f) {
    require_same_ambient(g.ambient(), f.ambient());
    if (f.is_zero())
        throw DivisionByZero("exact division by zero");
    if (!f.is_purely_even())
        throw PreconditionError("divisor of exact division must be purely even");
    if (g.is_zero())
        return SuperPoly(g.ambient());

    const std::size_t m = g.ambient()->even_count();
    const ExpVec f_shift = f.min_exponents();
    const ExpVec g_shift = g.min_exponents();
    ExpVec neg_f(m), neg_g(m);
    for (std::size_t i = 0; i < m; ++i) {
        neg_f[i] = -f_shift[i];
        neg_g[i] = -g_shift[i];
    }
    const SuperPoly divisor = f.shifted(neg_f);
    SuperPoly rest = g.shifted(neg_g);

    const auto& [lead_mono, lead_coeff] = divisor.leading_term();
    SuperPoly quotient(g.ambient());

    while (!rest.is_zero()) {
        const auto [mono, coeff] = rest.leading_term();
        Monomial q_mono;
        q_mono.exps.resize(m);
        for (std::size_t i = 0; i < m; ++i) {
            q_mono.exps[i] = mono.exps[i] - lead_mono.exps[i];
            if (q_mono.exps[i] < 0)
                return std::nullopt;
        }
        q_mono.odd = mono.odd;
        const Rational q_coeff = coeff / lead_coeff;
        quotient.add_term(q_mono, q_coeff);
        for (const auto& [dm, dc] : divisor.terms()) {
            Monomial prod = dm;
            for (std::size_t i = 0; i < m; ++i)
                prod.exps[i] += q_mono.exps[i];
            prod.odd = q_mono.odd;
            rest.add_term(prod, -q_coeff * dc);
        }
    }

    ExpVec back(m);
    for (std::size_t i = 0; i < m; ++i)
        back[i] = g_shift[i] - f_shift[i];
    return quotient.shifted(back);
}

// ---------------------------------------------------------------------------
// Text form

inline std::string format_rational(const Rational& r) {
    using boost::multiprecision::denominator;
    using boost::multiprecision::numerator;
    if (denominator(r) == 1)
        return numerator(r).str();
    return numerator(r).str() + "/" + denominator(r).str();
}

/// "x1^2*x3^-1*y1*y4"; empty for the unit monomial. Even symbols come first in
/// index order, then odd symbols ascending.
inline std::string format_monomial(const Ambient& amb, const Monomial& m) {
    std::string out;
    auto sep = [&out] {
        if (!out.empty())
            out += '*';
    };
    for (std::size_t i = 0; i < m.exps.size(); ++i) {
        if (m.exps[i] == 0)
            continue;
        sep();
        out += amb.even_name(i);
        if (m.exps[i] != 1)
            out += "^" + std::to_string(m.exps[i]);
    }
    for (auto j : odd_indices(m.odd)) {
        sep();
        out += amb.odd_name(j);
    }
    return out;
}

/// Deterministic rendering in ascending term order, e.g. "1 + b*c + al*be".
inline std::string sp_format(const SuperPoly& a) {
    if (a.is_zero())
        return "0";
    std::string out;
    bool first = true;
    for (const auto& [m, c] : a.terms()) {
        const bool negative = c < 0;
        const Rational mag = negative ? Rational(-c) : c;
        if (first)
            out += negative ? "- " : "";
        else
            out += negative ? " - " : " + ";
        first = false;
        const std::string mono = format_monomial(*a.ambient(), m);
        if (mono.empty())
            out += format_rational(mag);
        else if (mag == 1)
            out += mono;
        else
            out += format_rational(mag) + "*" + mono;
    }
    return out;
}

namespace detail {

class PolyParser {
public:
    PolyParser(AmbientPtr ambient, std::string_view text) : ambient_(std::move(ambient)), text_(text) {}

    SuperPoly parse() {
        SuperPoly result(ambient_);
        skip_ws();
        if (at_end())
            fail("empty polynomial");
        bool negative = false;
        if (peek() == '+' || peek() == '-') {
            negative = peek() == '-';
            ++pos_;
        }
        for (;;) {
            SuperPoly t = parse_term();
            result += negative ? -t : t;
            skip_ws();
            if (at_end())
                break;
            if (peek() != '+' && peek() != '-')
                fail("expected '+' or '-'");
            negative = peek() == '-';
            ++pos_;
        }
        return result;
    }

private:
    SuperPoly parse_term() {
        SuperPoly t = SuperPoly::constant(ambient_, Rational(1));
        for (;;) {
            skip_ws();
            if (at_end())
                fail("expected a factor");
            const char c = peek();
            if (std::isdigit(static_cast<unsigned char>(c))) {
                t *= parse_coefficient();
            } else if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
                t = t * parse_symbol_power();
            } else {
                fail(std::string("unexpected character '") + c + "'");
            }
            skip_ws();
            if (!at_end() && peek() == '*') {
                ++pos_;
                continue;
            }
            return t;
        }
    }

    Rational parse_coefficient() {
        Integer num = parse_unsigned();
        skip_ws();
        if (!at_end() && peek() == '/') {
            ++pos_;
            skip_ws();
            const std::size_t where = pos_;
            Integer den = parse_unsigned();
            if (den == 0) {
                pos_ = where;
                fail("zero denominator");
            }
            return Rational(num, den);
        }
        return Rational(num);
    }

    Integer parse_unsigned() {
        const std::size_t start = pos_;
        while (!at_end() && std::isdigit(static_cast<unsigned char>(peek())))
            ++pos_;
        if (start == pos_)
            fail("expected an integer");
        return Integer(std::string(text_.substr(start, pos_ - start)));
    }

    SuperPoly parse_symbol_power() {
        const std::size_t start = pos_;
        while (!at_end() && (std::isalnum(static_cast<unsigned char>(peek())) || peek() == '_'))
            ++pos_;
        const std::string name(text_.substr(start, pos_ - start));
        auto sym = ambient_->find(name);
        if (!sym) {
            pos_ = start;
            fail("unknown symbol '" + name + "'");
        }
        long exponent = 1;
        skip_ws();
        if (!at_end() && peek() == '^') {
            ++pos_;
            skip_ws();
            bool neg = false;
            if (!at_end() && peek() == '-') {
                neg = true;
                ++pos_;
            }
            const std::size_t where = pos_;
            Integer e = parse_unsigned();
            if (e > 1000000) {
                pos_ = where;
                fail("exponent too large");
            }
            exponent = e.convert_to<long>();
            if (neg)
                exponent = -exponent;
            if (sym->parity == Parity::Odd && exponent < 0) {
                pos_ = where;
                fail("odd symbol '" + name + "' cannot carry a negative exponent");
            }
        }
        if (sym->parity == Parity::Even)
            return SuperPoly::even_variable(ambient_, sym->index, static_cast<std::int32_t>(exponent));
        if (exponent == 0)
            return SuperPoly::constant(ambient_, Rational(1));
        if (exponent > 1)
            return SuperPoly(ambient_);
        return SuperPoly::odd_variable(ambient_, sym->index);
    }

    void skip_ws() {
        while (!at_end() && std::isspace(static_cast<unsigned char>(peek())))
            ++pos_;
    }
    bool at_end() const { return pos_ >= text_.size(); }
    char peek() const { return text_[pos_]; }
    [[noreturn]] void fail(const std::string& what) const { throw ParseError(what, 1, pos_ + 1); }

    AmbientPtr ambient_;
    std::string_view text_;
    std::size_t pos_ = 0;
};

} // namespace detail

/// Parses the polynomial grammar: signed terms of '*'-separated factors, where
/// a factor is an integer or p/q coefficient, a symbol, or symbol^int.
inline SuperPoly sp_parse(const AmbientPtr& ambient, std::string_view text) {
    return detail::PolyParser(ambient, text).parse();
}

} // namespace supercluster
