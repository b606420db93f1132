#pragma once

#include <algorithm>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "superpoly.hpp"

namespace supercluster {

namespace detail {

inline Integer gcd_int(Integer a, Integer b) {
    if (a < 0)
        a = -a;
    if (b < 0)
        b = -b;
    while (b != 0) {
        Integer r = a % b;
        a = std::move(b);
        b = std::move(r);
    }
    return a;
}

/// Scales p so its coefficients are coprime integers; returns the factor c with
/// p = c * result.
inline Rational make_primitive(SuperPoly& p) {
    using boost::multiprecision::denominator;
    using boost::multiprecision::numerator;
    if (p.is_zero())
        return Rational(1);
    Integer g = 0;
    Integer l = 1;
    for (const auto& [m, c] : p.terms()) {
        g = gcd_int(g, numerator(c));
        const Integer d = denominator(c);
        l = l / gcd_int(l, d) * d;
    }
    const Rational content(g, l);
    if (content != 1)
        p *= Rational(1) / content;
    return content;
}

/// Lexicographic comparison of two polynomials over the same ambient, used to
/// keep denominator factors in a deterministic order.
inline bool poly_less(const SuperPoly& a, const SuperPoly& b) {
    TermOrder order;
    auto ia = a.terms().rbegin();
    auto ib = b.terms().rbegin();
    for (; ia != a.terms().rend() && ib != b.terms().rend(); ++ia, ++ib) {
        if (order(ia->first, ib->first))
            return true;
        if (order(ib->first, ia->first))
            return false;
        if (ia->second != ib->second)
            return ia->second < ib->second;
    }
    return ia == a.terms().rend() && ib != b.terms().rend();
}

} // namespace detail

/// num / (x^den_mono * prod(den_factors)). Every factor is purely even, has
/// coprime integer coefficients, a positive leading coefficient and no
/// monomial content.
class SuperFraction {
public:
    explicit SuperFraction(SuperPoly num) : num_(std::move(num)), den_mono_(num_.ambient()->even_count(), 0) {
        normalize();
    }

    static SuperFraction constant(const AmbientPtr& amb, const Rational& c) {
        return SuperFraction(SuperPoly::constant(amb, c));
    }

    /// Builds the fraction without normalizing. Factors must be purely even.
    static SuperFraction raw(SuperPoly num, ExpVec den_mono, std::vector<SuperPoly> factors) {
        SuperFraction f(std::move(num), std::move(den_mono), std::move(factors), RawTag{});
        return f;
    }

    static SuperFraction make(SuperPoly num, ExpVec den_mono, std::vector<SuperPoly> factors) {
        SuperFraction f(std::move(num), std::move(den_mono), std::move(factors), RawTag{});
        f.normalize();
        return f;
    }

    const AmbientPtr& ambient() const noexcept { return num_.ambient(); }
    const SuperPoly& num() const noexcept { return num_; }
    const ExpVec& den_mono() const noexcept { return den_mono_; }
    const std::vector<SuperPoly>& den_factors() const noexcept { return factors_; }

    bool is_zero() const { return num_.is_zero(); }

    bool has_trivial_den() const {
        return factors_.empty() && std::all_of(den_mono_.begin(), den_mono_.end(), [](auto e) { return e == 0; });
    }

    bool has_parity(Parity p) const { return num_.has_parity(p); }

    /// Expanded product of the non-monomial denominator factors.
    SuperPoly factor_product() const {
        SuperPoly out = SuperPoly::constant(ambient(), Rational(1));
        for (const auto& f : factors_)
            out = out * f;
        return out;
    }

    /// Expanded denominator including the monomial part.
    SuperPoly den_poly() const { return factor_product().shifted(den_mono_); }

    /// Cancels monomial content, folds constants, sign-normalizes factors and
    /// removes every factor that divides the numerator exactly.
    void normalize() {
        const std::size_t m = ambient()->even_count();
        if (den_mono_.size() != m)
            throw DimensionError("denominator monomial length does not match the ambient");
        if (num_.is_zero()) {
            den_mono_.assign(m, 0);
            factors_.clear();
            return;
        }

        // Net exponent of the monomial part: x^shift * num / x^den_mono.
        ExpVec net(m, 0);
        std::vector<SuperPoly> kept;
        kept.reserve(factors_.size());
        Rational scale(1);
        for (auto& f : factors_) {
            if (f.is_zero())
                throw DivisionByZero("zero factor in denominator");
            if (!f.is_purely_even())
                throw PreconditionError("denominator factors must be purely even");
            const ExpVec content = f.min_exponents();
            ExpVec neg(m);
            for (std::size_t i = 0; i < m; ++i) {
                neg[i] = -content[i];
                net[i] -= content[i];
            }
            SuperPoly g = f.shifted(neg);
            Rational c = detail::make_primitive(g);
            if (g.leading_term().second < 0) {
                g = -g;
                c = -c;
            }
            scale /= c;
            if (g.is_constant())
                continue;
            kept.push_back(std::move(g));
        }
        if (scale != 1)
            num_ *= scale;

        // Cancel factors that divide the numerator.
        std::vector<SuperPoly> remaining;
        remaining.reserve(kept.size());
        for (auto& g : kept) {
            if (auto q = sp_exact_divide(num_, g)) {
                num_ = std::move(*q);
                continue;
            }
            remaining.push_back(std::move(g));
        }
        std::sort(remaining.begin(), remaining.end(), detail::poly_less);
        factors_ = std::move(remaining);

        const ExpVec nmin = num_.min_exponents();
        for (std::size_t i = 0; i < m; ++i)
            net[i] += nmin[i] - den_mono_[i];
        ExpVec num_shift(m);
        for (std::size_t i = 0; i < m; ++i) {
            num_shift[i] = std::max(net[i], 0) - nmin[i];
            den_mono_[i] = std::max(-net[i], 0);
        }
        num_ = num_.shifted(num_shift);
    }

    SuperFraction operator-() const {
        SuperFraction out(*this);
        out.num_ = -out.num_;
        return out;
    }

    friend SuperFraction operator+(const SuperFraction& a, const SuperFraction& b) {
        require_same_ambient(a.ambient(), b.ambient());
        if (a.is_zero())
            return b;
        if (b.is_zero())
            return a;
        const std::size_t m = a.ambient()->even_count();
        ExpVec mono(m), sa(m), sb(m);
        for (std::size_t i = 0; i < m; ++i) {
            mono[i] = std::max(a.den_mono_[i], b.den_mono_[i]);
            sa[i] = mono[i] - a.den_mono_[i];
            sb[i] = mono[i] - b.den_mono_[i];
        }
        // Multiset union of the factor lists; the missing part of each side
        // multiplies its numerator.
        std::vector<SuperPoly> common;
        std::vector<bool> used(b.factors_.size(), false);
        SuperPoly extra_b = SuperPoly::constant(a.ambient(), Rational(1));
        for (const auto& f : a.factors_) {
            common.push_back(f);
            bool matched = false;
            for (std::size_t j = 0; j < b.factors_.size(); ++j) {
                if (!used[j] && b.factors_[j] == f) {
                    used[j] = true;
                    matched = true;
                    break;
                }
            }
            if (!matched)
                extra_b = extra_b * f;
        }
        SuperPoly extra_a = SuperPoly::constant(a.ambient(), Rational(1));
        for (std::size_t j = 0; j < b.factors_.size(); ++j) {
            if (used[j])
                continue;
            common.push_back(b.factors_[j]);
            extra_a = extra_a * b.factors_[j];
        }
        SuperPoly num = (a.num_ * extra_a).shifted(sa) + (b.num_ * extra_b).shifted(sb);
        return make(std::move(num), std::move(mono), std::move(common));
    }

    friend SuperFraction operator-(const SuperFraction& a, const SuperFraction& b) { return a + (-b); }

    friend SuperFraction operator*(const SuperFraction& a, const SuperFraction& b) {
        require_same_ambient(a.ambient(), b.ambient());
        if (a.is_zero() || b.is_zero())
            return SuperFraction(SuperPoly(a.ambient()));
        const std::size_t m = a.ambient()->even_count();
        ExpVec mono(m);
        for (std::size_t i = 0; i < m; ++i)
            mono[i] = a.den_mono_[i] + b.den_mono_[i];
        std::vector<SuperPoly> factors = a.factors_;
        factors.insert(factors.end(), b.factors_.begin(), b.factors_.end());
        return make(a.num_ * b.num_, std::move(mono), std::move(factors));
    }

    friend SuperFraction operator*(const SuperFraction& a, const Rational& c) {
        SuperFraction out(a);
        out.num_ *= c;
        if (c == 0)
            out.normalize();
        return out;
    }

    friend SuperFraction operator/(const SuperFraction& a, const SuperFraction& b);

    SuperFraction pow(int e) const;

private:
    struct RawTag {};
    SuperFraction(SuperPoly num, ExpVec den_mono, std::vector<SuperPoly> factors, RawTag)
        : num_(std::move(num)), den_mono_(std::move(den_mono)), factors_(std::move(factors)) {
        if (den_mono_.size() != num_.ambient()->even_count())
            throw DimensionError("denominator monomial length does not match the ambient");
        for (const auto& f : factors_) {
            require_same_ambient(num_.ambient(), f.ambient());
            if (!f.is_purely_even())
                throw PreconditionError("denominator factors must be purely even");
        }
    }

    SuperPoly num_;
    ExpVec den_mono_;
    std::vector<SuperPoly> factors_;
};

/// Smallest T with soul^(T+1) = 0, together with the powers soul^0..soul^T.
inline std::vector<SuperPoly> soul_powers(const SuperPoly& soul) {
    std::vector<SuperPoly> powers{SuperPoly::constant(soul.ambient(), Rational(1))};
    SuperPoly cur = soul;
    while (!cur.is_zero()) {
        powers.push_back(cur);
        cur = cur * soul;
    }
    return powers;
}

/// 1/f for f = f0 + s with f0 != 0: sum_t (-1)^t s^t f0^(T-t) / f0^(T+1).
inline SuperFraction sp_reciprocal(const SuperPoly& f) {
    auto [body, soul] = sp_body_split(f);
    if (body.is_zero())
        throw NotInvertible(f.is_zero() ? "reciprocal of zero" : "element with zero body is not invertible");
    const std::vector<SuperPoly> powers = soul_powers(soul);
    const std::size_t T = powers.size() - 1;
    std::vector<SuperPoly> body_powers{SuperPoly::constant(f.ambient(), Rational(1))};
    for (std::size_t t = 0; t < T; ++t)
        body_powers.push_back(body_powers.back() * body);
    SuperPoly num(f.ambient());
    for (std::size_t t = 0; t <= T; ++t) {
        SuperPoly term = powers[t] * body_powers[T - t];
        if (t & 1u)
            num -= term;
        else
            num += term;
    }
    return SuperFraction::make(std::move(num), ExpVec(f.ambient()->even_count(), 0),
                               std::vector<SuperPoly>(T + 1, body));
}

inline SuperFraction sf_reciprocal(const SuperFraction& a) {
    SuperFraction inv = sp_reciprocal(a.num());
    return inv * SuperFraction::make(a.den_poly(), ExpVec(a.ambient()->even_count(), 0), {});
}

inline SuperFraction operator/(const SuperFraction& a, const SuperFraction& b) {
    require_same_ambient(a.ambient(), b.ambient());
    if (b.is_zero())
        throw DivisionByZero("division by zero");
    return a * sf_reciprocal(b);
}

inline SuperFraction SuperFraction::pow(int e) const {
    if (e < 0)
        return sf_reciprocal(*this).pow(-e);
    SuperFraction result = constant(ambient(), Rational(1));
    SuperFraction base = *this;
    unsigned u = static_cast<unsigned>(e);
    while (u) {
        if (u & 1u)
            result = result * base;
        u >>= 1u;
        if (u)
            base = base * base;
    }
    return result;
}

enum class ArithOp { Add, Mul, Div };

inline SuperFraction sf_arith(const SuperFraction& a, const SuperFraction& b, ArithOp op) {
    switch (op) {
    case ArithOp::Add:
        return a + b;
    case ArithOp::Mul:
        return a * b;
    case ArithOp::Div:
        return a / b;
    }
    throw PreconditionError("unknown arithmetic operation");
}

inline SuperFraction sf_normalize(const SuperFraction& a) {
    SuperFraction out(a);
    out.normalize();
    return out;
}

/// Equality by cross-multiplication; independent of normalization.
inline bool sf_eq(const SuperFraction& a, const SuperFraction& b) {
    if (!same_ambient(a.ambient(), b.ambient()))
        return false;
    if (a.den_factors() == b.den_factors() && a.den_mono() == b.den_mono())
        return a.num() == b.num();
    const std::size_t m = a.ambient()->even_count();
    ExpVec common(m), sa(m), sb(m);
    for (std::size_t i = 0; i < m; ++i) {
        common[i] = std::max(a.den_mono()[i], b.den_mono()[i]);
        sa[i] = common[i] - a.den_mono()[i];
        sb[i] = common[i] - b.den_mono()[i];
    }
    return (a.num() * b.factor_product()).shifted(sa) == (b.num() * a.factor_product()).shifted(sb);
}

inline bool sf_eq(const SuperFraction& a, const SuperPoly& b) { return sf_eq(a, SuperFraction(b)); }

// ---------------------------------------------------------------------------
// Substitution

/// Values assigned to the symbols of a source ambient, indexed like the
/// ambient's even and odd name lists. Unassigned entries are nullopt.
struct Assignment {
    std::vector<std::optional<SuperFraction>> even;
    std::vector<std::optional<SuperFraction>> odd;
};

inline Assignment make_assignment(const Ambient& source, const std::map<std::string, SuperFraction>& values) {
    Assignment a;
    a.even.resize(source.even_count());
    a.odd.resize(source.odd_count());
    for (const auto& [name, v] : values) {
        auto s = source.find(name);
        if (!s)
            throw PreconditionError("assignment names unknown symbol '" + name + "'");
        (s->parity == Parity::Even ? a.even : a.odd)[s->index] = v;
    }
    return a;
}

/// Homomorphic evaluation of a at the assigned values (which live over target).
inline SuperFraction sp_substitute(const SuperPoly& a, const Assignment& asg, const AmbientPtr& target) {
    const Ambient& src = *a.ambient();
    if (asg.even.size() != src.even_count() || asg.odd.size() != src.odd_count())
        throw DimensionError("assignment does not match the ambient");
    auto lookup = [&](const std::optional<SuperFraction>& v, const std::string& name, Parity p) -> const SuperFraction& {
        if (!v)
            throw PreconditionError("no value assigned to symbol '" + name + "'");
        require_same_ambient(v->ambient(), target);
        if (!v->has_parity(p))
            throw PreconditionError("value assigned to '" + name + "' has the wrong parity");
        return *v;
    };
    // Cache of integer powers of the even values.
    std::map<std::pair<std::size_t, std::int32_t>, SuperFraction> power_cache;
    auto even_power = [&](std::size_t i, std::int32_t e) -> const SuperFraction& {
        auto key = std::make_pair(i, e);
        auto it = power_cache.find(key);
        if (it == power_cache.end())
            it = power_cache.emplace(key, lookup(asg.even[i], src.even_name(i), Parity::Even).pow(e)).first;
        return it->second;
    };

    SuperFraction total = SuperFraction::constant(target, Rational(0));
    for (const auto& [m, c] : a.terms()) {
        SuperFraction term = SuperFraction::constant(target, c);
        for (std::size_t i = 0; i < m.exps.size(); ++i)
            if (m.exps[i] != 0)
                term = term * even_power(i, m.exps[i]);
        for (auto j : odd_indices(m.odd))
            term = term * lookup(asg.odd[j], src.odd_name(j), Parity::Odd);
        total = total + term;
    }
    return total;
}

inline SuperFraction sp_substitute(const SuperPoly& a, const std::map<std::string, SuperFraction>& values,
                                   const AmbientPtr& target) {
    return sp_substitute(a, make_assignment(*a.ambient(), values), target);
}

inline SuperFraction sf_substitute(const SuperFraction& a, const Assignment& asg, const AmbientPtr& target) {
    SuperFraction num = sp_substitute(a.num(), asg, target);
    SuperFraction den = sp_substitute(a.den_poly(), asg, target);
    return num / den;
}

// ---------------------------------------------------------------------------
// Fingerprint: the value at a fixed pseudo-random point modulo 2^61-1, with the
// Grassmann structure kept. Equal elements always share a fingerprint, so it
// can bucket values before the exact sf_eq comparison.

namespace detail {

inline constexpr std::uint64_t fp_prime = (std::uint64_t{1} << 61) - 1;

inline std::uint64_t fp_mul(std::uint64_t a, std::uint64_t b) {
    return static_cast<std::uint64_t>((static_cast<unsigned __int128>(a) * b) % fp_prime);
}

inline std::uint64_t fp_pow(std::uint64_t a, std::uint64_t e) {
    std::uint64_t r = 1;
    while (e) {
        if (e & 1u)
            r = fp_mul(r, a);
        a = fp_mul(a, a);
        e >>= 1u;
    }
    return r;
}

inline std::uint64_t fp_inv(std::uint64_t a) { return fp_pow(a, fp_prime - 2); }

inline std::uint64_t fp_of(const Integer& z) {
    Integer r = z % Integer(fp_prime);
    if (r < 0)
        r += fp_prime;
    return r.convert_to<std::uint64_t>();
}

inline std::uint64_t fp_point(std::size_t i) {
    std::uint64_t z = 0x9e3779b97f4a7c15ull * (i + 1);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    z ^= z >> 31;
    return z % (fp_prime - 2) + 2;
}

inline std::uint64_t fp_monomial(const ExpVec& e) {
    std::uint64_t v = 1;
    for (std::size_t i = 0; i < e.size(); ++i) {
        if (e[i] == 0)
            continue;
        const std::uint64_t base = e[i] > 0 ? fp_point(i) : fp_inv(fp_point(i));
        v = fp_mul(v, fp_pow(base, static_cast<std::uint64_t>(e[i] > 0 ? e[i] : -static_cast<std::int64_t>(e[i]))));
    }
    return v;
}

inline std::map<OddMask, std::uint64_t> fp_eval(const SuperPoly& p) {
    using boost::multiprecision::denominator;
    using boost::multiprecision::numerator;
    std::map<OddMask, std::uint64_t> out;
    for (const auto& [m, c] : p.terms()) {
        const std::uint64_t cv = fp_mul(fp_of(numerator(c)), fp_inv(fp_of(denominator(c))));
        auto& slot = out[m.odd];
        slot = (slot + fp_mul(cv, fp_monomial(m.exps))) % fp_prime;
    }
    return out;
}

} // namespace detail

inline std::string sf_fingerprint(const SuperFraction& a) {
    std::uint64_t den = detail::fp_monomial(a.den_mono());
    for (const auto& f : a.den_factors()) {
        auto v = detail::fp_eval(f);
        den = detail::fp_mul(den, v.empty() ? 0 : v.begin()->second);
    }
    std::string out;
    if (den == 0)
        return "?";
    const std::uint64_t inv = detail::fp_inv(den);
    for (const auto& [mask, v] : detail::fp_eval(a.num())) {
        const std::uint64_t w = detail::fp_mul(v, inv);
        if (w == 0)
            continue;
        out += std::to_string(mask) + ":" + std::to_string(w) + ";";
    }
    return out;
}

// ---------------------------------------------------------------------------
// Text form

inline std::string format_den_factor(const SuperPoly& f, std::size_t power) {
    std::string out = "(" + sp_format(f) + ")";
    if (power > 1)
        out += "^" + std::to_string(power);
    return out;
}

/// "(1 + b*c + al*be)/a", "y2/x1", "(...)/(x2*(1 + x2))".
inline std::string sf_format(const SuperFraction& a) {
    const std::string num = sp_format(a.num());
    if (a.has_trivial_den())
        return num;
    std::vector<std::string> items;
    const Ambient& amb = *a.ambient();
    for (std::size_t i = 0; i < a.den_mono().size(); ++i) {
        const auto e = a.den_mono()[i];
        if (e == 0)
            continue;
        items.push_back(e == 1 ? amb.even_name(i) : amb.even_name(i) + "^" + std::to_string(e));
    }
    const auto& fs = a.den_factors();
    for (std::size_t i = 0; i < fs.size();) {
        std::size_t j = i;
        while (j < fs.size() && fs[j] == fs[i])
            ++j;
        items.push_back(format_den_factor(fs[i], j - i));
        i = j;
    }
    std::string den;
    for (std::size_t i = 0; i < items.size(); ++i)
        den += (i ? "*" : "") + items[i];
    const bool single_item = items.size() == 1;
    // A lone factor item already carries its own parentheses.
    if (!single_item)
        den = "(" + den + ")";
    const std::string n = a.num().size() > 1 ? "(" + num + ")" : num;
    return n + "/" + den;
}

} // namespace supercluster
