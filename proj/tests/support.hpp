#pragma once

#include <random>
#include <string>

#include <supercluster/superfraction.hpp>

namespace sctest {

using namespace supercluster;

inline SuperPoly P(const AmbientPtr& amb, const std::string& text) { return sp_parse(amb, text); }

inline SuperFraction F(const AmbientPtr& amb, const std::string& num, const std::string& den = "1") {
    return SuperFraction(sp_parse(amb, num)) / SuperFraction(sp_parse(amb, den));
}

/// Random polynomial with small integer coefficients.
inline SuperPoly random_poly(std::mt19937& rng, const AmbientPtr& amb, int max_terms, int min_exp = 0,
                             int max_exp = 2) {
    std::uniform_int_distribution<int> nterms(0, max_terms);
    std::uniform_int_distribution<int> coeff(-3, 3);
    std::uniform_int_distribution<int> expo(min_exp, max_exp);
    std::uniform_int_distribution<std::uint64_t> odd(0, (std::uint64_t{1} << amb->odd_count()) - 1);
    SuperPoly p(amb);
    const int n = nterms(rng);
    for (int t = 0; t < n; ++t) {
        Monomial m = p.unit_monomial();
        for (auto& e : m.exps)
            e = expo(rng);
        m.odd = amb->odd_count() ? odd(rng) : 0;
        p.add_term(m, Rational(coeff(rng)));
    }
    return p;
}

} // namespace sctest
