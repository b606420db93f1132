#pragma once

#include <algorithm>
#include <charconv>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "mutation.hpp"
#include "mutation_class.hpp"
#include "superquiver.hpp"

namespace supercluster {

namespace models {

namespace detail {

inline const std::map<std::string, std::string, std::less<>>& fixture_texts() {
    static const std::map<std::string, std::string, std::less<>> texts = {
        {"spo21", R"(even a
even b frozen
even c frozen
odd al
odd be
arrow al -> a
arrow a -> be
arrow a -> b
arrow a -> c
)"},
        {"spo22", R"(even a
even b frozen
even c frozen
odd al1
odd al2
odd be1
odd be2
arrow be1 -> al1
arrow be1 -> a
arrow a -> al1
arrow be2 -> a
arrow be2 -> al2
arrow a -> al2
arrow a -> b
arrow a -> c
even e1
even e2 frozen
even e3 frozen
odd ga1
odd ga2
odd de1
odd de2
arrow e1 -> e2
arrow e1 -> e3
arrow de2 -> e2
arrow de2 -> e1
arrow de1 -> e1
arrow e1 -> ga2
arrow e1 -> ga1
arrow de2 -> ga2
arrow de1 -> ga1
loop de2
)"},
        {"grassmannian", R"(even q12 frozen
even q14 frozen
even q23 frozen
even q24
even q34 frozen
even a55 frozen
odd l1 frozen
odd l2
odd l4 frozen
arrow q23 -> q24
arrow q14 -> q24
arrow q24 -> q34
arrow q24 -> q12
arrow q34 -> a55
arrow q12 -> q14
arrow q12 -> l4
arrow q14 <-> l2
arrow q24 -> l2
arrow l2 -> l4
arrow l2 -> q12
arrow l1 -> l2
arrow l1 -> q24
)"},
        {"counterexample7", R"(even x1
even x2
odd y1
odd y2
arrow x1 -> x2
arrow y1 -> x2
arrow x2 -> y2
)"},
        {"flipQ", R"(even x1
odd y2
even x3
odd y4
even x5
arrow x1 -> y4
arrow x1 -> y2
arrow x3 -> x1
arrow x5 -> x1
arrow x3 <-> y4
arrow y2 <-> x3
arrow y4 <-> x5
arrow y2 <-> x5
)"},
        {"flipQprime", R"(even x1
odd y2
even x3
odd y4
even x5
arrow y4 -> x1
arrow y2 -> x1
arrow x1 -> x3
arrow x1 -> x5
arrow x3 <-> y4
arrow y2 <-> x3
arrow y4 <-> x5
arrow y2 <-> x5
)"},
        {"example3_6", R"(even x1
even x2
even x3
odd y1
odd y2
arrow x1 -> x2
arrow x3 -> x2
arrow y1 -> x2
arrow y2 -> x3
loop y1
loop y2
)"},
        {"example4_1", R"(even x1
odd y1
odd y2
arrow y1 <-> x1
arrow y2 <-> x1
)"},
        {"example4_2", R"(even x1 frozen
even x2
odd y1
odd y2
odd y3
arrow x1 -> x2
arrow y1 <-> x1
arrow y1 <-> x2
arrow y1 -> y2
arrow y2 -> x1
arrow x2 -> y2
arrow y3 -> x2
)"},
        {"example4_3", R"(even x1
even x2 frozen
odd y1
odd y2
arrow x1 -> x2
arrow x1 -> y1
arrow y1 -> x2
arrow y1 -> y2 * 2
arrow y2 -> x1 * 2
arrow y2 <-> x2
)"},
        {"example4_4", R"(even x1
even x2
odd y1
odd y2
arrow x1 -> x2
arrow y1 <-> x1
arrow y2 <-> x1
loop y1
)"},
    };
    return texts;
}

/// n from "frieze(n)", or 0 when name has another shape.
inline std::size_t frieze_width(std::string_view name) {
    if (name.size() < 9 || name.substr(0, 7) != "frieze(" || name.back() != ')')
        return 0;
    const std::string_view digits = name.substr(7, name.size() - 8);
    std::size_t n = 0;
    auto [ptr, ec] = std::from_chars(digits.data(), digits.data() + digits.size(), n);
    if (ec != std::errc() || ptr != digits.data() + digits.size())
        return 0;
    return n;
}

} // namespace detail

struct ModelInfo {
    std::string name;
    std::string summary;
};

inline std::vector<ModelInfo> list_models() {
    return {
        {"spo21", "SpO(2|1): mutation at a gives d with ad = 1 + bc + al*be"},
        {"spo22", "SpO(2|2): two components exchanged at a and e1"},
        {"grassmannian", "super Grassmannian G(2|0;4|1), q24 and l2 exchangeable"},
        {"counterexample7", "violates C1 and C2; mu1 mu2 mu1 is not Laurent"},
        {"flipQ", "bipartite graph quiver before the flip move"},
        {"flipQprime", "bipartite graph quiver after the flip move"},
        {"example3_6", "looped odd vertices twist the classical signs"},
        {"example4_1", "one even vertex in 2-cycles with two odd vertices"},
        {"example4_2", "x1 frozen, three odd vertices"},
        {"example4_3", "doubled odd arrows, x2 frozen"},
        {"example4_4", "a loop changes the sign of one exchange term"},
        {"frieze(n)", "A_n path with n+1 odd vertices, for superfriezes of width n"},
    };
}

/// Quiver of the A_n frieze: x_k -> x_{k+1}, x_k -> y_k, y_{k+1} -> x_k.
inline SuperQuiver frieze_quiver(std::size_t n) {
    if (n == 0)
        throw PreconditionError("frieze quiver needs width at least 1");
    SuperQuiver q;
    for (std::size_t k = 1; k <= n; ++k)
        q.add_vertex("x" + std::to_string(k), Parity::Even);
    for (std::size_t k = 1; k <= n + 1; ++k)
        q.add_vertex("y" + std::to_string(k), Parity::Odd);
    auto x = [&](std::size_t k) { return k - 1; };
    auto y = [&](std::size_t k) { return n + k - 1; };
    for (std::size_t k = 1; k <= n; ++k) {
        if (k < n)
            q.add_arrows(x(k), x(k + 1));
        q.add_arrows(x(k), y(k));
        q.add_arrows(y(k + 1), x(k));
    }
    return q;
}

inline std::string model_text(std::string_view name) {
    if (const std::size_t n = detail::frieze_width(name))
        return format_quiver(frieze_quiver(n));
    const auto& texts = detail::fixture_texts();
    auto it = texts.find(name);
    if (it == texts.end())
        throw PreconditionError("unknown model '" + std::string(name) + "'");
    return it->second;
}

inline SuperQuiver build_quiver(std::string_view name) { return parse_quiver(model_text(name)); }

inline Seed build_model(std::string_view name) { return Seed::initial(build_quiver(name)); }

// ---------------------------------------------------------------------------
// Checks

struct CheckItem {
    std::string name;
    bool ok = false;
    std::string detail;
};

struct CheckReport {
    std::vector<CheckItem> items;

    bool ok() const {
        return std::all_of(items.begin(), items.end(), [](const CheckItem& c) { return c.ok; });
    }
    void add(std::string name, bool ok, std::string detail = {}) {
        items.push_back({std::move(name), ok, std::move(detail)});
    }
};

namespace detail {

inline SuperFraction poly(const Seed& s, std::string_view text) { return SuperFraction(sp_parse(s.ambient, text)); }

inline const SuperFraction& after(const Seed& s, std::string_view label) { return s.value(label); }

inline Seed mu(const Seed& s, std::string_view label) { return even_mutate(s, s.quiver.index_of(label)); }
inline Seed eta(const Seed& s, std::string_view label) { return odd_mutate(s, s.quiver.index_of(label)); }

inline bool contains(const ValueSet& set, const SuperFraction& v) {
    return std::any_of(set.items().begin(), set.items().end(), [&](const SuperFraction& x) { return sf_eq(x, v); });
}

} // namespace detail

inline CheckReport spo21_relation_check() {
    using namespace detail;
    CheckReport rep;
    const Seed s = build_model("spo21");
    const Seed m = mu(s, "a");
    const SuperFraction a = poly(s, "a"), b = poly(s, "b"), c = poly(s, "c");
    const SuperFraction al = poly(s, "al"), be = poly(s, "be");
    const SuperFraction d = m.value("a");
    rep.add("mu_a(a) = (1 + b*c + al*be)/a", sf_eq(d, poly(s, "1 + b*c + al*be") / a), sf_format(d));
    rep.add("a*d = 1 + b*c + al*be", sf_eq(a * d, poly(s, "1 + b*c + al*be")));
    rep.add("mu_a(mu_a(a)) = a", sf_eq(mu(m, "a").value("a"), a));

    const ValueSet evens = enumerate_even_vars(s, 6);
    const bool four = evens.size() == 4 && contains(evens, a) && contains(evens, b) && contains(evens, c) &&
                      contains(evens, d);
    rep.add("even variables up to depth 6 are {a, b, c, d}", four, std::to_string(evens.size()) + " found");

    const SuperFraction e = poly(s, "1 + al*be");
    const SuperFraction ga = a * be - b * al;
    const SuperFraction de = c * be - d * al;
    rep.add("ad = 1 + bc + al*be", sf_eq(a * d, poly(s, "1") + b * c + al * be));
    rep.add("e = 1 + al*be", sf_eq(e, poly(s, "1") + al * be));
    rep.add("ga = a*be - b*al", sf_eq(ga, a * be - b * al) && ga.has_parity(Parity::Odd));
    rep.add("de = c*be - d*al", sf_eq(de, c * be - d * al) && de.has_parity(Parity::Odd));
    rep.add("e^2 = 1 + 2*al*be", sf_eq(e * e, poly(s, "1 + 2*al*be")));

    ClassOptions opt;
    opt.labeled = true;
    opt.kinds = MutationKinds::Odd;
    const auto cls = mutation_class(s.quiver, opt);
    rep.add("odd mutation class has 4 labeled members", cls.verdict == Verdict::Finite && cls.size == 4,
            std::to_string(cls.size) + " members");

    const ValueSet odds = enumerate_odd_vars(s, 6);
    rep.add("odd variables up to depth 6 are {al, be}", odds.size() == 2 && contains(odds, al) && contains(odds, be),
            std::to_string(odds.size()) + " found");
    return rep;
}

inline CheckReport spo22_relation_check() {
    using namespace detail;
    CheckReport rep;
    const Seed s = build_model("spo22");
    const SuperFraction d = mu(s, "a").value("a");
    const SuperFraction e4 = mu(s, "e1").value("e1");
    const SuperFraction a = poly(s, "a"), e1 = poly(s, "e1");
    rep.add("mu_a(a) = (b*c + 1 + be2*al1 + be1*al2)/a", sf_eq(d, poly(s, "b*c + 1 + be2*al1 + be1*al2") / a),
            sf_format(d));
    rep.add("mu_e1(e1) = (1 - e2*e3 + de2*ga1 + de1*ga2)/e1", sf_eq(e4, poly(s, "1 - e2*e3 + de2*ga1 + de1*ga2") / e1),
            sf_format(e4));
    rep.add("ad = 1 + bc - al1*be2 - al2*be1", sf_eq(a * d, poly(s, "1 + b*c - al1*be2 - al2*be1")));
    rep.add("e1*e4 + e2*e3 = 1 - ga1*de2 - ga2*de1",
            sf_eq(e1 * e4 + poly(s, "e2*e3"), poly(s, "1 - ga1*de2 - ga2*de1")));
    rep.add("be2*al1 = -al1*be2", sf_eq(poly(s, "be2*al1"), -poly(s, "al1*be2")));
    return rep;
}

inline CheckReport grassmannian_check() {
    using namespace detail;
    CheckReport rep;
    const Seed s = build_model("grassmannian");
    const SuperFraction q13 = mu(s, "q24").value("q24");
    const SuperFraction l3 = eta(s, "l2").value("l2");
    rep.add("mu_q24(q24) = (q12*q34 + q23*q14)/q24", sf_eq(q13, poly(s, "q12*q34 + q23*q14") / poly(s, "q24")),
            sf_format(q13));
    rep.add("eta_l2(l2) = (l4*q12 + l1*q24)/q14", sf_eq(l3, poly(s, "l4*q12 + l1*q24") / poly(s, "q14")),
            sf_format(l3));

    const AmbientPtr rel = make_ambient({"q12", "q13", "q14", "q23", "q24", "q34", "a55"}, {"l1", "l2", "l3", "l4"});
    std::map<std::string, SuperFraction> values;
    for (const auto& name : {"q12", "q14", "q23", "q24", "q34", "a55", "l1", "l2", "l4"})
        values.emplace(name, s.value(name));
    values.emplace("q13", q13);
    values.emplace("l3", l3);
    const SuperFraction even_rel = sp_substitute(sp_parse(rel, "q12*q34 - q13*q24 + q14*q23"), values, s.ambient);
    const SuperFraction odd_rel = sp_substitute(sp_parse(rel, "q12*l4 - q14*l3 + q24*l1"), values, s.ambient);
    rep.add("q12*q34 - q13*q24 + q14*q23 = 0", even_rel.num().is_zero(), sf_format(even_rel));
    rep.add("q12*l4 - q14*l3 + q24*l1 = 0", odd_rel.num().is_zero(), sf_format(odd_rel));
    return rep;
}

inline CheckReport flip_identity_check() {
    CheckReport rep;
    const Seed q = build_model("flipQ");
    const SuperQuiver qp = build_quiver("flipQprime");
    const auto steps = parse_steps(q.quiver, "mu:x1,eta:y2,eta:y4");
    const Seed end = apply_sequence(q, steps, SequenceMode::QuiverOnly);
    rep.add("eta_y4 eta_y2 mu_x1 (Q) = Q'", end.quiver == qp, format_quiver(end.quiver));
    const SuperQuiver first = mu_quiver(q.quiver, q.quiver.index_of("x1"));
    rep.add("mu_x1 (Q) differs from Q'", !(first == qp));
    rep.add("reversing Q' gives Q", reversed(qp) == q.quiver);
    return rep;
}

inline CheckReport counterexample7_check() {
    using namespace detail;
    CheckReport rep;
    const Seed s = build_model("counterexample7");
    const Seed s1 = mu(s, "x1");
    const Seed s2 = mu(s1, "x2");
    const Seed s3 = mu(s2, "x1");
    rep.add("x1' = (1 + x2)/x1", sf_eq(s1.value("x1"), poly(s, "1 + x2") / poly(s, "x1")), sf_format(s1.value("x1")));
    rep.add("x2' = (1 + x2 + x1*(1 + y1*y2))/(x1*x2)",
            sf_eq(s2.value("x2"), poly(s, "1 + x2 + x1 + x1*y1*y2") / poly(s, "x1*x2")), sf_format(s2.value("x2")));
    rep.add("x1'' = (1 + x2 + x1*(1 + y1*y2) + x1*x2)/(x2*(1 + x2))",
            sf_eq(s3.value("x1"), poly(s, "1 + x2 + x1 + x1*y1*y2 + x1*x2") / poly(s, "x2 + x2^2")),
            sf_format(s3.value("x1")));
    rep.add("x1'' is not Laurent", !is_laurent(s3.value("x1")).laurent);
    const std::size_t x2 = s.quiver.index_of("x2");
    rep.add("C1 and C2 both fail at x2", !c1_at(s.quiver, x2) && !c2_at(s.quiver, x2));
    return rep;
}

} // namespace models

using models::build_model;
using models::build_quiver;

} // namespace supercluster
