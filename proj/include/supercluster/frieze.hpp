#pragma once

#include <string>
#include <vector>

#include "models.hpp"
#include "mutation.hpp"
#include "superfraction.hpp"

namespace supercluster {

/// Entries of a diamond: A left, B top, C bottom, D right; odd Xi (NW),
/// Psi (NE), Phi (SW), Sigma (SE).
struct ElementaryDiamond {
    SuperFraction A, B, C, D;
    SuperFraction Xi, Psi, Phi, Sigma;
};

/// Identities of the frieze rule that fail on d, by name. The first three
/// are the rule; the others follow from it.
inline std::vector<std::string> frieze_rule_violations(const ElementaryDiamond& d) {
    std::vector<std::string> out;
    const auto one = SuperFraction::constant(d.A.ambient(), Rational(1));
    auto check = [&](const char* name, const SuperFraction& lhs, const SuperFraction& rhs) {
        if (!sf_eq(lhs, rhs))
            out.emplace_back(name);
    };
    check("AD - BC = 1 + Sigma*Xi", d.A * d.D - d.B * d.C, one + d.Sigma * d.Xi);
    check("B*Phi - A*Psi = Xi", d.B * d.Phi - d.A * d.Psi, d.Xi);
    check("B*Sigma - D*Xi = Psi", d.B * d.Sigma - d.D * d.Xi, d.Psi);
    check("A*Sigma - C*Xi = Phi", d.A * d.Sigma - d.C * d.Xi, d.Phi);
    check("D*Phi - C*Psi = Sigma", d.D * d.Phi - d.C * d.Psi, d.Sigma);
    check("Xi*Sigma = Phi*Psi", d.Xi * d.Sigma, d.Phi * d.Psi);
    return out;
}

// ---------------------------------------------------------------------------
// Superfriezes

/// Width-n frieze stored by SE-diagonals. On diagonal t, even[k] is the even
/// entry of row k (k = 0..n+1, rows 0 and n+1 being the rows of 1's), ne[k]
/// and nw[k] the odd entries just NE and NW of it (k = 0..n+2, zero outside).
struct Superfrieze {
    struct Diagonal {
        std::vector<SuperFraction> even;
        std::vector<SuperFraction> ne;
        std::vector<SuperFraction> nw;
    };

    std::size_t width = 0;
    AmbientPtr ambient;
    std::vector<Diagonal> diagonals;

    /// e_k on diagonal t, with the zero rows k = -1 and k = n+2.
    SuperFraction even(long k, std::size_t t) const {
        if (k < 0 || k > static_cast<long>(width) + 1)
            return SuperFraction::constant(ambient, Rational(0));
        return diagonals.at(t).even[static_cast<std::size_t>(k)];
    }
    SuperFraction ne(long k, std::size_t t) const { return odd(diagonals.at(t).ne, k); }
    SuperFraction nw(long k, std::size_t t) const { return odd(diagonals.at(t).nw, k); }

    /// Diamond with left vertex e_k on diagonal t; needs t + 1 < window.
    ElementaryDiamond diamond(long k, std::size_t t) const {
        return {even(k, t),     even(k - 1, t + 1), even(k + 1, t), even(k, t + 1),
                ne(k, t),       nw(k, t + 1),       nw(k + 1, t),   ne(k + 1, t)};
    }

private:
    SuperFraction odd(const std::vector<SuperFraction>& row, long k) const {
        if (k < 0 || k >= static_cast<long>(row.size()))
            return SuperFraction::constant(ambient, Rational(0));
        return row[static_cast<std::size_t>(k)];
    }
};

/// Frieze of width n seeded by x_1..x_n (even) and y_1..y_{n+1} (odd) on the
/// first diagonal; each later diagonal solved from the rule, left to right.
inline Superfrieze superfrieze_generate(std::size_t n, std::size_t window) {
    if (n == 0)
        throw PreconditionError("frieze width must be at least 1");
    if (window == 0)
        throw PreconditionError("frieze window must be at least 1");
    const Seed seed = models::build_model("frieze(" + std::to_string(n) + ")");
    Superfrieze f;
    f.width = n;
    f.ambient = seed.ambient;
    const auto zero = SuperFraction::constant(f.ambient, Rational(0));
    const auto one = SuperFraction::constant(f.ambient, Rational(1));

    Superfrieze::Diagonal first;
    first.even.assign(n + 2, one);
    first.ne.assign(n + 3, zero);
    first.nw.assign(n + 3, zero);
    for (std::size_t k = 1; k <= n; ++k)
        first.even[k] = seed.values[k - 1];
    for (std::size_t k = 1; k <= n + 1; ++k)
        first.ne[k] = seed.values[n + k - 1];
    f.diagonals.push_back(first);
    // A*Sigma - C*Xi = Phi on the first diagonal.
    for (std::size_t k = 1; k <= n + 1; ++k)
        f.diagonals[0].nw[k] = f.even(static_cast<long>(k) - 1, 0) * f.ne(static_cast<long>(k), 0) -
                               f.even(static_cast<long>(k), 0) * f.ne(static_cast<long>(k) - 1, 0);

    for (std::size_t t = 0; t + 1 < window; ++t) {
        Superfrieze::Diagonal next;
        next.even.assign(n + 2, one);
        next.ne.assign(n + 3, zero);
        next.nw.assign(n + 3, zero);
        f.diagonals.push_back(next);
        auto& cur = f.diagonals.back();
        for (std::size_t k = 1; k <= n; ++k) {
            const long kk = static_cast<long>(k);
            // AD - BC = 1 + Sigma*Xi
            cur.even[k] = (one + f.even(kk - 1, t + 1) * f.even(kk + 1, t) + f.ne(kk + 1, t) * f.ne(kk, t)) /
                          f.even(kk, t);
        }
        for (std::size_t k = 1; k <= n + 1; ++k) {
            const long kk = static_cast<long>(k);
            // B*Sigma - D*Xi = Psi
            cur.nw[k] = f.even(kk - 1, t + 1) * f.ne(kk + 1, t) - f.even(kk, t + 1) * f.ne(kk, t);
        }
        for (std::size_t k = 1; k <= n + 1; ++k) {
            const long kk = static_cast<long>(k);
            // A*Sigma - C*Xi = Phi on the new diagonal
            cur.ne[k] = (cur.nw[k] + f.even(kk, t + 1) * f.ne(kk - 1, t + 1)) / f.even(kk - 1, t + 1);
        }
    }
    return f;
}

struct FriezeViolation {
    long k;
    std::size_t t;
    std::string identity;
};

/// Every diamond k = 0..n+1 between consecutive diagonals of the window.
inline std::vector<FriezeViolation> frieze_rule_check(const Superfrieze& f) {
    std::vector<FriezeViolation> out;
    for (std::size_t t = 0; t + 1 < f.diagonals.size(); ++t)
        for (long k = 0; k <= static_cast<long>(f.width) + 1; ++k)
            for (auto& id : frieze_rule_violations(f.diamond(k, t)))
                out.push_back({k, t, std::move(id)});
    return out;
}

struct FriezeMutationReport {
    bool ok = true;
    std::vector<std::string> lines;
};

/// Mutates the frieze seed at x_1, ..., x_n in turn and compares each new
/// value with the second diagonal. The odd entries of that diagonal are then
/// checked against y_k' = y_{k+1} - y_1 x_k' built from the mutated values.
inline FriezeMutationReport frieze_vs_mutation_check(std::size_t n) {
    FriezeMutationReport rep;
    const Superfrieze f = superfrieze_generate(n, 2);
    Seed s = models::build_model("frieze(" + std::to_string(n) + ")");
    const SuperFraction y1 = s.values[n];
    std::vector<SuperFraction> xs;
    for (std::size_t k = 1; k <= n; ++k) {
        s = even_mutate(s, k - 1);
        const SuperFraction& got = s.values[k - 1];
        xs.push_back(got);
        const bool same = sf_eq(got, f.even(static_cast<long>(k), 1));
        rep.ok = rep.ok && same;
        rep.lines.push_back("x" + std::to_string(k) + "' = " + sf_format(got) + (same ? "" : "  (frieze has " +
                            sf_format(f.even(static_cast<long>(k), 1)) + ")"));
    }
    for (std::size_t k = 1; k <= n + 1; ++k) {
        const SuperFraction next = k <= n ? s.values[n + k] : SuperFraction::constant(s.ambient, Rational(0));
        const SuperFraction xk = k <= n ? xs[k - 1] : SuperFraction::constant(s.ambient, Rational(1));
        const SuperFraction built = next - y1 * xk;
        const bool same = sf_eq(built, f.ne(static_cast<long>(k), 1));
        rep.ok = rep.ok && same;
        rep.lines.push_back("y" + std::to_string(k) + "' = " + sf_format(f.ne(static_cast<long>(k), 1)) +
                            (same ? "" : "  (recurrence gives " + sf_format(built) + ")"));
    }
    return rep;
}

// ---------------------------------------------------------------------------
// SpO(2|1) elements and diamonds

struct SpOElement {
    SuperFraction a, b, c, d, e;
    SuperFraction alpha, beta, gamma, delta;
};

/// Relations ad = 1 + bc + alpha*beta, e = 1 + alpha*beta,
/// gamma = a*beta - b*alpha, delta = c*beta - d*alpha that fail on m.
inline std::vector<std::string> spo_relation_violations(const SpOElement& m) {
    std::vector<std::string> out;
    const auto one = SuperFraction::constant(m.a.ambient(), Rational(1));
    if (!sf_eq(m.a * m.d, one + m.b * m.c + m.alpha * m.beta))
        out.emplace_back("ad = 1 + bc + alpha*beta");
    if (!sf_eq(m.e, one + m.alpha * m.beta))
        out.emplace_back("e = 1 + alpha*beta");
    if (!sf_eq(m.gamma, m.a * m.beta - m.b * m.alpha))
        out.emplace_back("gamma = a*beta - b*alpha");
    if (!sf_eq(m.delta, m.c * m.beta - m.d * m.alpha))
        out.emplace_back("delta = c*beta - d*alpha");
    return out;
}

/// Element over symbols a, b, c | al, be with d, e, gamma, delta solved from
/// the relations.
inline SpOElement generic_spo_element() {
    const AmbientPtr amb = make_ambient({"a", "b", "c"}, {"al", "be"});
    auto p = [&](const char* t) { return SuperFraction(sp_parse(amb, t)); };
    SpOElement m{p("a"), p("b"), p("c"), p("1 + b*c + al*be") / p("a"), p("1 + al*be"),
                 p("al"), p("be"), p("0"), p("0")};
    m.gamma = m.a * m.beta - m.b * m.alpha;
    m.delta = m.c * m.beta - m.d * m.alpha;
    return m;
}

/// Top -a, left b, right -c, bottom d; NW gamma, NE alpha, SW -beta, SE delta.
inline ElementaryDiamond diamond_from_spo(const SpOElement& m) {
    return {m.b, -m.a, m.d, -m.c, m.gamma, m.alpha, -m.beta, m.delta};
}

/// Inverse of diamond_from_spo; e is rebuilt as 1 + alpha*beta.
inline SpOElement spo_from_diamond(const ElementaryDiamond& d) {
    SpOElement m{-d.B, d.A, -d.D, d.C, d.A, d.Psi, -d.Phi, d.Xi, d.Sigma};
    m.e = SuperFraction::constant(d.A.ambient(), Rational(1)) + m.alpha * m.beta;
    return m;
}

} // namespace supercluster
