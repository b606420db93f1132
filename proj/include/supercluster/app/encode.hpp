#pragma once

#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "../mutation.hpp"
#include "../superfraction.hpp"
#include "../superquiver.hpp"

namespace supercluster::app {

using nlohmann::json;

/// Text shown for a value, shared by CLI and service.
inline std::string value_text(const SuperFraction& v) { return sf_format(sf_normalize(v)); }

inline json terms_json(const SuperPoly& p) {
    json out = json::array();
    for (const auto& [m, c] : p.terms()) {
        json x = json::array();
        for (auto e : m.exps)
            x.push_back(e);
        json odd = json::array();
        for (auto i : odd_indices(m.odd))
            odd.push_back(i);
        out.push_back({{"coeff", format_rational(c)}, {"x", x}, {"odd", odd}});
    }
    return out;
}

/// Formatted text plus the numerator terms and the denominator as a monomial
/// and a list of (factor, power).
inline json value_json(const SuperFraction& v) {
    const SuperFraction n = sf_normalize(v);
    json mono = json::array();
    for (auto e : n.den_mono())
        mono.push_back(e);
    json factors = json::array();
    const auto& fs = n.den_factors();
    for (std::size_t i = 0; i < fs.size();) {
        std::size_t j = i;
        while (j < fs.size() && fs[j] == fs[i])
            ++j;
        factors.push_back({{"text", sp_format(fs[i])}, {"terms", terms_json(fs[i])}, {"power", j - i}});
        i = j;
    }
    return {{"text", sf_format(n)},
            {"numerator", terms_json(n.num())},
            {"denominator", {{"monomial", mono}, {"factors", factors}}}};
}

inline std::string parity_name(Parity p) { return p == Parity::Even ? "even" : "odd"; }

/// Vertices with their outgoing arrows, plus the text form.
inline json quiver_json(const SuperQuiver& q) {
    json vs = json::array();
    for (std::size_t i = 0; i < q.size(); ++i) {
        const auto& v = q.vertex(i);
        json out = json::array();
        for (std::size_t j = 0; j < q.size(); ++j)
            if (q.arrows(i, j) > 0)
                out.push_back({{"to", q.vertex(j).label}, {"count", q.arrows(i, j)}});
        vs.push_back({{"label", v.label},
                      {"parity", parity_name(v.parity)},
                      {"frozen", v.frozen},
                      {"loops", q.loops(i)},
                      {"out", out}});
    }
    return {{"vertices", vs}, {"text", format_quiver(q)}};
}

inline json conditions_json(const SuperQuiver& q) {
    json per = json::array();
    bool c1 = true, c2 = true, either = true;
    for (const auto& c : condition_report(q)) {
        per.push_back({{"vertex", q.vertex(c.vertex).label}, {"c1", c.c1}, {"c2", c.c2}});
        c1 = c1 && c.c1;
        c2 = c2 && c.c2;
        either = either && (c.c1 || c.c2);
    }
    return {{"c1", c1}, {"c2", c2}, {"c1_or_c2", either}, {"vertices", per}};
}

inline json seed_values_json(const Seed& s) {
    json vals = json::array();
    for (std::size_t i = 0; i < s.quiver.size(); ++i) {
        json v = value_json(s.values[i]);
        v["vertex"] = s.quiver.vertex(i).label;
        vals.push_back(std::move(v));
    }
    return vals;
}

/// Exchange relation of a step taken from seed s, as text.
inline std::string relation_text(const Seed& before, const Seed& after, const MutationStep& st) {
    const std::string& label = before.quiver.vertex(st.vertex).label;
    if (st.kind == StepKind::Even) {
        const EvenExchange ex = even_exchange(before, st.vertex);
        return label + " * " + label + "' = " + value_text(ex.numerator());
    }
    return label + "' = " + value_text(after.values[st.vertex]);
}

struct Envelope {
    bool ok = true;
    json payload = json::object();
    std::vector<std::string> diagnostics;

    json to_json() const { return {{"ok", ok}, {"payload", payload}, {"diagnostics", diagnostics}}; }
};

} // namespace supercluster::app
