// Acceptance run: one PASS/FAIL line per criterion, exact arithmetic throughout.
// Exit status is the number of failed criteria.

#include <chrono>
#include <functional>
#include <iomanip>
#include <iostream>
#include <optional>
#include <random>
#include <sstream>

#include <supercluster/frieze.hpp>
#include <supercluster/models.hpp>
#include <supercluster/mutation_class.hpp>

#include "oracle.hpp"
#include "support.hpp"

using namespace supercluster;

namespace {

struct Outcome {
    bool pass = true;
    std::vector<std::string> notes;

    void expect(bool ok, const std::string& what) {
        if (!ok) {
            pass = false;
            notes.push_back("failed: " + what);
        }
    }
    void note(const std::string& s) { notes.push_back(s); }
    void report(const models::CheckReport& rep) {
        for (const auto& item : rep.items)
            expect(item.ok, item.name + (item.detail.empty() ? "" : " [" + item.detail + "]"));
    }
};

SuperFraction V(const Seed& s, const char* num, const char* den = "1") {
    return SuperFraction(sp_parse(s.ambient, num)) / SuperFraction(sp_parse(s.ambient, den));
}

Seed mu(const Seed& s, const char* v) { return even_mutate(s, s.quiver.index_of(v)); }
Seed eta(const Seed& s, const char* v) { return odd_mutate(s, s.quiver.index_of(v)); }

std::vector<std::string> fixture_names() {
    std::vector<std::string> out;
    for (const auto& m : models::list_models())
        if (m.name != "frieze(n)")
            out.push_back(m.name);
    for (const char* f : {"frieze(1)", "frieze(2)", "frieze(3)"})
        out.emplace_back(f);
    return out;
}

// ---------------------------------------------------------------------------

Outcome golden_examples() {
    Outcome o;
    int n = 0;
    auto check = [&](bool ok, const std::string& what) {
        ++n;
        o.expect(ok, what);
    };
    const Seed e1 = build_model("example4_1");
    check(sf_eq(mu(e1, "x1").value("x1"), V(e1, "2", "x1")), "mu_x1(x1) = 2/x1");
    check(sf_eq(eta(e1, "y1").value("y1"), V(e1, "y1")), "eta_y1(y1) = y1");
    check(sf_eq(eta(e1, "y2").value("y2"), V(e1, "y2")), "eta_y2(y2) = y2");

    const Seed e2 = build_model("example4_2");
    check(sf_eq(mu(e2, "x2").value("x2"), V(e2, "1 + x1 + y3*y2 + y3*y1", "x2")), "mu_x2(x2)");
    check(sf_eq(eta(e2, "y1").value("y1"), V(e2, "y2", "x1")), "eta_y1(y1) = y2/x1");
    check(sf_eq(eta(e2, "y2").value("y2"), V(e2, "y1*x2")), "eta_y2(y2) = y1*x2");
    check(sf_eq(eta(e2, "y3").value("y3"), V(e2, "y3")), "eta_y3(y3) = y3");

    const Seed e3 = build_model("example4_3");
    check(sf_eq(mu(e3, "x1").value("x1"), V(e3, "1 + x2 + 2*y2*y1", "x1")), "mu_x1(x1)");
    check(sf_eq(eta(e3, "y1").value("y1"), V(e3, "2*y2*x2")), "eta_y1(y1) = 2*y2*x2");
    check(sf_eq(eta(e3, "y2").value("y2"), V(e3, "2*y1")), "eta_y2(y2) = 2*y1");

    const Seed e4 = build_model("example4_4");
    check(sf_eq(mu(e4, "x1").value("x1"), V(e4, "1 + x2", "x1")), "mu_x1(x1) = (1 + x2)/x1");
    check(sf_eq(mu(e4, "x2").value("x2"), V(e4, "1 - x1", "x2")), "mu_x2(x2) = (1 - x1)/x2");
    check(sf_eq(eta(e4, "y1").value("y1"), V(e4, "y1")), "eta_y1 = id");
    check(sf_eq(eta(e4, "y2").value("y2"), V(e4, "y2")), "eta_y2 = id");
    o.note(std::to_string(n) + " identities checked");
    return o;
}

Outcome looped_chain() {
    Outcome o;
    const Seed s = build_model("example3_6");
    const Seed s1 = mu(s, "x1"), s2 = mu(s1, "x2"), s3 = mu(s2, "x1");
    o.expect(sf_eq(s1.value("x1"), V(s, "1 - x2", "x1")), "x1' = (1 - x2)/x1");
    o.expect(sf_eq(s2.value("x2"), V(s, "1 - x2 - x1*x3", "x1*x2")), "x2' = (1 - x2 - x1*x3)/(x1*x2)");
    o.expect(sf_eq(s3.value("x1"), V(s, "x1*x3 - 1", "x2")), "x1'' = (x1*x3 - 1)/x2");

    const AmbientPtr z = make_ambient({"z1", "z2", "z3"}, {});
    auto Z = [&](const char* num, const char* den) {
        return SuperFraction(sp_parse(z, num)) / SuperFraction(sp_parse(z, den));
    };
    ClassicalSeed c = ClassicalSeed::initial(b_matrix(restrict_even(s.quiver)), z);
    c = classical_mutate(c, 0);
    o.expect(sf_eq(c.z[0], Z("1 + z2", "z1")), "z1' = (1 + z2)/z1");
    c = classical_mutate(c, 1);
    o.expect(sf_eq(c.z[1], Z("1 + z2 + z1*z3", "z1*z2")), "z2' = (1 + z2 + z1*z3)/(z1*z2)");
    c = classical_mutate(c, 0);
    o.expect(sf_eq(c.z[0], Z("z1*z3 + 1", "z2")), "z1'' = (z1*z3 + 1)/z2");

    const auto x = [&](const char* l) { return s.quiver.index_of(l); };
    const auto rep = sign_twist_check(s, {x("x1"), x("x2"), x("x1")});
    o.expect(rep.holds() && rep.steps_checked == 3, "sign twist x_k(t) = eps_k z_k(t)|z=eps x on every prefix");
    o.note("sign twist verified on " + std::to_string(rep.steps_checked) + " prefixes");
    return o;
}

// Depth-first walk over even sequences without immediate repeats (mu_k mu_k = id).
struct Walk {
    long values = 0;
    std::optional<std::string> bad;
    bool limited = false;
    bool distinct = false;
};

void walk(const Seed& s, int depth, std::vector<std::size_t>& path, Walk& w) {
    if (depth == 0 || w.bad || w.limited)
        return;
    for (auto k : s.quiver.vertices_of(Parity::Even)) {
        if (s.quiver.vertex(k).frozen || (!path.empty() && path.back() == k))
            continue;
        if (w.distinct && std::find(path.begin(), path.end(), k) != path.end())
            continue;
        Seed m;
        try {
            m = even_mutate(s, k);
        } catch (const ResourceLimit&) {
            w.limited = true;
            return;
        }
        path.push_back(k);
        ++w.values;
        if (!is_laurent(m.values[k]).laurent) {
            std::string seq;
            for (auto v : path)
                seq += (seq.empty() ? "" : " ") + s.quiver.vertex(v).label;
            std::string value = sf_format(m.values[k]);
            if (value.size() > 160)
                value = value.substr(0, 160) + " ... (" + std::to_string(value.size()) + " chars)";
            w.bad = "mu " + seq + " -> " + value;
            path.pop_back();
            return;
        }
        walk(m, depth - 1, path, w);
        path.pop_back();
    }
}

Walk sweep(const SuperQuiver& q, int depth, bool distinct = false) {
    Walk w;
    w.distinct = distinct;
    std::vector<std::size_t> path;
    walk(Seed::initial(q), depth, path, w);
    return w;
}

Outcome laurent_sweep() {
    Outcome o;
    constexpr std::size_t limit = 2'000'000;
    ScopedProductLimit guard(limit);
    for (const char* name : {"spo21", "spo22", "grassmannian", "frieze(1)", "frieze(2)", "frieze(3)"}) {
        const Walk w = sweep(build_quiver(name), 6);
        o.expect(!w.bad && !w.limited, std::string(name) + (w.bad ? ": " + *w.bad : " undecided"));
        if (!w.bad && !w.limited)
            o.note(std::string(name) + ": " + std::to_string(w.values) +
                   " values Laurent (sequences without immediate repeats)");
    }
    for (int n = 1; n <= 3; ++n) {
        const std::string name = "frieze(" + std::to_string(n) + ")";
        const Walk w = sweep(build_quiver(name), 6, true);
        o.note("info: " + name + " with no vertex repeated: " + (w.bad ? "not Laurent, " + *w.bad : "Laurent"));
    }

    std::mt19937 rng(2024);
    oracle::RandomSpec spec;
    spec.min_even = 1;
    spec.max_even = 4;
    spec.max_odd = 3;
    spec.max_mult = 2;
    spec.loop_prob = 0.3;
    spec.frozen_prob = 0.1;
    const auto t0 = std::chrono::steady_clock::now();
    int accepted = 0, certified = 0, undecided = 0;
    std::vector<std::string> failures;
    while (accepted < 200) {
        const SuperQuiver q = oracle::random_superquiver(rng, spec);
        if (!check_c1_or_c2(q))
            continue;
        ++accepted;
        const Walk w = sweep(q, 6);
        if (w.limited)
            ++undecided;
        else if (w.bad)
            failures.push_back(*w.bad);
        else
            ++certified;
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    std::ostringstream line;
    line << "random sweep: " << certified << "/200 certified, " << failures.size() << " not Laurent, " << undecided
         << " undecided (product limit " << limit << "), " << std::fixed << std::setprecision(1) << secs << " s";
    o.note(line.str());
    for (std::size_t i = 0; i < failures.size() && i < 3; ++i)
        o.note("  e.g. " + failures[i]);
    o.expect(certified == 200, "random sweep certified " + std::to_string(certified) + " of 200");
    o.expect(secs < 300, "random sweep within 5 minutes");
    return o;
}

Outcome counterexample() {
    Outcome o;
    o.report(models::counterexample7_check());
    return o;
}

Outcome spo21() {
    Outcome o;
    o.report(models::spo21_relation_check());
    return o;
}

Outcome spo22() {
    Outcome o;
    o.report(models::spo22_relation_check());
    return o;
}

Outcome grassmannian() {
    Outcome o;
    o.report(models::grassmannian_check());
    return o;
}

Outcome flip() {
    Outcome o;
    o.report(models::flip_identity_check());
    return o;
}

Outcome class_bounds() {
    Outcome o;
    std::mt19937 rng(63);
    oracle::RandomSpec spec;
    spec.min_even = 1;
    spec.max_even = 3;
    spec.max_odd = 3;
    spec.max_mult = 2;
    spec.loop_prob = 0.2;
    spec.frozen_prob = 0.1;
    constexpr std::size_t cap = 50000;
    int kept = 0, oracle_checked = 0, skipped = 0;
    std::size_t largest = 0;
    while (kept < 50) {
        const SuperQuiver q = oracle::random_superquiver(rng, spec);
        ClassOptions part;
        part.labeled = true;
        part.cap = cap;
        part.kinds = MutationKinds::Even;
        const auto rx = mutation_class(restrict_even(q), part);
        part.kinds = MutationKinds::Odd;
        const auto ry = mutation_class(restrict_odd(q), part);
        if (rx.verdict != Verdict::Finite || ry.verdict != Verdict::Finite) {
            ++skipped;
            continue;
        }
        ++kept;
        ClassOptions opt;
        opt.labeled = true;
        opt.cap = cap;
        const auto rep = finite_type_verdict(q, opt);
        const std::string text = format_quiver(q);
        o.expect(rep.verdict == Verdict::Finite, "class closes for\n" + text);
        if (rep.bound_check) {
            const auto& b = *rep.bound_check;
            o.expect(b.holds, std::to_string(rep.size) + " <= " + std::to_string(b.bound) + " for\n" + text);
            o.expect(b.r == rx.size && b.s == ry.size, "part sizes agree");
        }
        largest = std::max(largest, rep.size);
        if (oracle_checked < 10) {
            ++oracle_checked;
            const auto full = oracle::class_size(oracle::from(q), true, oracle::Kinds::Both, cap);
            const auto ex = oracle::class_size(oracle::from(restrict_even(q)), true, oracle::Kinds::Even, cap);
            const auto oy = oracle::class_size(oracle::from(restrict_odd(q)), true, oracle::Kinds::Odd, cap);
            o.expect(full && *full == rep.size, "oracle class size for\n" + text);
            o.expect(ex && *ex == rx.size && oy && *oy == ry.size, "oracle part sizes for\n" + text);
        }
    }
    o.note(std::to_string(kept) + " quivers with finite parts (" + std::to_string(skipped) +
           " skipped), largest labeled class " + std::to_string(largest) + ", " + std::to_string(oracle_checked) +
           " cross-checked against the oracle");
    return o;
}

Outcome superfrieze() {
    Outcome o;
    for (std::size_t n = 1; n <= 3; ++n) {
        const Superfrieze f = superfrieze_generate(n, 4);
        const auto bad = frieze_rule_check(f);
        o.expect(bad.empty(), "frieze rule on every diamond, width " + std::to_string(n) +
                                  (bad.empty() ? "" : ": " + bad.front().identity));
        const auto rep = frieze_vs_mutation_check(n);
        o.expect(rep.ok, "frieze agrees with mutation, width " + std::to_string(n));
    }
    const SpOElement m = generic_spo_element();
    o.expect(spo_relation_violations(m).empty(), "generic element satisfies the SpO(2|1) relations");
    const SpOElement back = spo_from_diamond(diamond_from_spo(m));
    o.expect(sf_eq(back.a, m.a) && sf_eq(back.b, m.b) && sf_eq(back.c, m.c) && sf_eq(back.d, m.d) &&
                 sf_eq(back.alpha, m.alpha) && sf_eq(back.beta, m.beta) && sf_eq(back.gamma, m.gamma) &&
                 sf_eq(back.delta, m.delta),
             "diamond round trip");
    const auto missing = frieze_rule_violations(diamond_from_spo(m));
    for (const auto& id : missing)
        o.expect(false, "dictionary image violates " + id);
    return o;
}

Outcome properties() {
    Outcome o;
    std::mt19937 rng(11);
    const AmbientPtr a = make_ambient({"x1", "x2"}, {"y1", "y2", "y3", "y4", "y5"});
    int trials = 0;
    for (int i = 0; i < 200; ++i) {
        const SuperPoly p = sctest::random_poly(rng, a, 6, -1, 2), q = sctest::random_poly(rng, a, 6, -1, 2);
        SuperPoly po(a), qo(a), pe(a), qe(a);
        for (const auto& [m, c] : p.terms())
            (grassmann_degree(m.odd) % 2 ? po : pe).add_term(m, c);
        for (const auto& [m, c] : q.terms())
            (grassmann_degree(m.odd) % 2 ? qo : qe).add_term(m, c);
        ++trials;
        if (!(po * qo == -(qo * po)) || !(po * po).is_zero() || !(pe * qo == qo * pe) || !(pe * qe == qe * pe) ||
            !p.soul().pow(4).is_zero())
            o.expect(false, "supercommutativity or nilpotency on trial " + std::to_string(i));
    }
    o.note(std::to_string(trials) + " anticommutation/nilpotency trials");

    int involutions = 0, odd_checks = 0;
    for (const auto& name : fixture_names()) {
        const Seed s = build_model(name);
        for (std::size_t k = 0; k < s.quiver.size(); ++k) {
            if (s.quiver.vertex(k).frozen)
                continue;
            if (s.quiver.vertex(k).even()) {
                ++involutions;
                o.expect(seeds_equal(even_mutate(even_mutate(s, k), k), s), name + ": mu^2 = id at " +
                                                                                s.quiver.vertex(k).label);
            } else {
                ++odd_checks;
                const Seed once = odd_mutate(s, k);
                const Seed thrice = odd_mutate(odd_mutate(once, k), k);
                o.expect(sf_eq(thrice.values[k], once.values[k]), name + ": eta^3 = eta at " +
                                                                      s.quiver.vertex(k).label);
            }
        }
    }
    o.note(std::to_string(involutions) + " even involutions, " + std::to_string(odd_checks) + " odd eta^3 checks");

    oracle::RandomSpec spec;
    spec.min_even = 2;
    spec.max_even = 5;
    spec.max_odd = 0;
    spec.max_mult = 2;
    std::uniform_int_distribution<int> len(1, 5);
    for (int trial = 0; trial < 100; ++trial) {
        const Seed s = Seed::initial(oracle::random_superquiver(rng, spec));
        ClassicalSeed c{b_matrix(s.quiver), s.values};
        Seed cur = s;
        std::uniform_int_distribution<std::size_t> pick(0, s.quiver.size() - 1);
        const int steps = len(rng);
        bool same = true;
        for (int step = 0; step < steps; ++step) {
            const std::size_t k = pick(rng);
            cur = even_mutate(cur, k);
            c = classical_mutate(c, k);
            for (std::size_t i = 0; i < cur.values.size(); ++i)
                same = same && sf_eq(cur.values[i], c.z[i]);
        }
        o.expect(same, "classical degeneration on\n" + format_quiver(s.quiver));
    }
    o.note("100 purely even quivers agree with classical mutation");
    return o;
}

} // namespace

int main() {
    const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria = {
        {"golden examples with one to three odd vertices", golden_examples},
        {"looped chain, classical chain and sign twist", looped_chain},
        {"Laurent phenomenon on fixtures and 200 random C1/C2 quivers", laurent_sweep},
        {"non-Laurent counterexample chain", counterexample},
        {"SpO(2|1) relations, enumeration, involution, odd class", spo21},
        {"SpO(2|2) exchange relations", spo22},
        {"Grassmannian mutations and Pluecker relations", grassmannian},
        {"flip identity on the bipartite graph quiver", flip},
        {"mutation-class bound r*s*2^n on 50 random quivers", class_bounds},
        {"superfrieze rule, mutation agreement and SpO dictionary", superfrieze},
        {"property suites", properties},
    };
    int failed = 0;
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        const auto t0 = std::chrono::steady_clock::now();
        Outcome o;
        try {
            o = criteria[i].second();
        } catch (const std::exception& e) {
            o.pass = false;
            o.notes.push_back(std::string("exception: ") + e.what());
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        for (const auto& n : o.notes) {
            std::istringstream lines(n);
            for (std::string l; std::getline(lines, l);)
                std::cout << "    " << l << '\n';
        }
        std::cout << (o.pass ? "PASS" : "FAIL") << "  criterion " << std::setw(2) << i + 1 << ": "
                  << criteria[i].first << " (" << std::fixed << std::setprecision(1) << secs << " s)" << std::endl;
        failed += o.pass ? 0 : 1;
    }
    std::cout << criteria.size() - failed << " of " << criteria.size() << " criteria passed\n";
    return failed;
}
