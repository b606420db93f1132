#pragma once

#include <algorithm>
#include <cctype>
#include <cstddef>
#include <deque>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <utility>
#include <vector>

#include "mutation_class.hpp"
#include "superfraction.hpp"
#include "superquiver.hpp"

namespace supercluster {

/// A superquiver with the current cluster variable at every vertex. Values
/// live over the ambient of the initial seed.
struct Seed {
    SuperQuiver quiver;
    std::vector<SuperFraction> values;
    AmbientPtr ambient;

    /// Initial seed: each vertex carries its own symbol.
    static Seed initial(SuperQuiver q) {
        require_valid(q);
        Seed s;
        s.ambient = q.ambient();
        for (std::size_t v = 0; v < q.size(); ++v) {
            const std::size_t idx = q.symbol_index(v);
            s.values.emplace_back(q.vertex(v).even() ? SuperPoly::even_variable(s.ambient, idx)
                                                     : SuperPoly::odd_variable(s.ambient, idx));
        }
        s.quiver = std::move(q);
        return s;
    }

    const SuperFraction& value(std::string_view label) const { return values.at(quiver.index_of(label)); }
};

/// Same quiver and sf_eq-equal values.
inline bool seeds_equal(const Seed& a, const Seed& b) {
    if (!(a.quiver == b.quiver) || a.values.size() != b.values.size())
        return false;
    for (std::size_t i = 0; i < a.values.size(); ++i)
        if (!sf_eq(a.values[i], b.values[i]))
            return false;
    return true;
}

enum class StepKind { Even, Odd };

struct MutationStep {
    StepKind kind;
    std::size_t vertex;

    friend bool operator==(const MutationStep&, const MutationStep&) = default;
};

inline std::string format_step(const SuperQuiver& q, const MutationStep& s) {
    return std::string(s.kind == StepKind::Even ? "mu:" : "eta:") + q.vertex(s.vertex).label;
}

/// Parses "mu:a,eta:l2" (whitespace tolerated; "mu" and "eta" name the kind).
inline std::vector<MutationStep> parse_steps(const SuperQuiver& q, std::string_view text) {
    std::vector<MutationStep> out;
    std::size_t pos = 0;
    auto trim = [](std::string_view s) {
        while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front())))
            s.remove_prefix(1);
        while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back())))
            s.remove_suffix(1);
        return s;
    };
    if (trim(text).empty())
        return out;
    while (pos <= text.size()) {
        std::size_t end = text.find(',', pos);
        if (end == std::string_view::npos)
            end = text.size();
        const std::string_view tok = trim(text.substr(pos, end - pos));
        const std::size_t colon = tok.find(':');
        if (colon == std::string_view::npos)
            throw ParseError("mutation step '" + std::string(tok) + "' must look like mu:<vertex> or eta:<vertex>", 1,
                             pos + 1);
        const std::string_view kind = trim(tok.substr(0, colon));
        const std::string_view name = trim(tok.substr(colon + 1));
        MutationStep step{};
        if (kind == "mu")
            step.kind = StepKind::Even;
        else if (kind == "eta")
            step.kind = StepKind::Odd;
        else
            throw ParseError("unknown mutation kind '" + std::string(kind) + "'", 1, pos + 1);
        auto v = q.find(name);
        if (!v)
            throw ParseError("unknown vertex '" + std::string(name) + "'", 1, pos + colon + 2);
        step.vertex = *v;
        const Parity want = step.kind == StepKind::Even ? Parity::Even : Parity::Odd;
        if (q.vertex(*v).parity != want)
            throw IllegalMutation(std::string(kind) + " needs an " + to_string(want) + " vertex, '" +
                                  std::string(name) + "' is " + to_string(q.vertex(*v).parity));
        out.push_back(step);
        if (end == text.size())
            break;
        pos = end + 1;
    }
    return out;
}

// ---------------------------------------------------------------------------
// Even mutation

/// The three summands of the even exchange numerator at x_k.
struct EvenExchange {
    SuperFraction in_product;
    SuperFraction out_product;
    SuperFraction odd_sum;
    long u = 0;
    long v = 0;

    SuperFraction numerator() const {
        return (u % 2 ? -in_product : in_product) + (v % 2 ? -out_product : out_product) + odd_sum;
    }
};

namespace detail {

/// Loops on odd vertices adjacent to at least one of the given even vertices,
/// each odd vertex counted once.
inline long loops_next_to(const SuperQuiver& q, const std::vector<std::size_t>& evens) {
    long total = 0;
    for (auto y : q.vertices_of(Parity::Odd)) {
        const bool touches =
            std::any_of(evens.begin(), evens.end(), [&](std::size_t x) { return q.adjacent(x, y); });
        if (touches)
            total += q.loops(y);
    }
    return total;
}

} // namespace detail

inline EvenExchange even_exchange(const Seed& s, std::size_t k) {
    const SuperQuiver& q = s.quiver;
    require_mutable(q, k, Parity::Even);
    const auto one = SuperFraction::constant(s.ambient, Rational(1));
    EvenExchange ex{one, one, SuperFraction::constant(s.ambient, Rational(0))};
    std::vector<std::size_t> ins, outs;
    for (auto i : q.vertices_of(Parity::Even)) {
        if (q.arrows(i, k) > 0) {
            ins.push_back(i);
            ex.in_product = ex.in_product * s.values[i].pow(q.arrows(i, k));
        }
        if (q.arrows(k, i) > 0) {
            outs.push_back(i);
            ex.out_product = ex.out_product * s.values[i].pow(q.arrows(k, i));
        }
    }
    ex.u = detail::loops_next_to(q, ins);
    ex.v = detail::loops_next_to(q, outs);
    const auto odd = q.vertices_of(Parity::Odd);
    for (auto i : odd)
        for (auto j : odd) {
            if (q.arrows(i, k) == 0 || q.arrows(k, j) == 0 || q.arrows(i, j) > 0)
                continue;
            const Rational mult(q.arrows(i, k) * q.arrows(k, j));
            ex.odd_sum = ex.odd_sum + (s.values[i] * s.values[j]) * mult;
        }
    return ex;
}

inline Seed even_mutate(const Seed& s, std::size_t k) {
    const EvenExchange ex = even_exchange(s, k);
    Seed out = s;
    out.values[k] = ex.numerator() / s.values[k];
    out.quiver = mu_quiver(s.quiver, k);
    return out;
}

// ---------------------------------------------------------------------------
// Odd mutation

inline Seed odd_mutate(const Seed& s, std::size_t i, std::vector<std::string>* warnings = nullptr) {
    const SuperQuiver& q = s.quiver;
    require_mutable(q, i, Parity::Odd);
    const auto odd = q.vertices_of(Parity::Odd);
    const auto even = q.vertices_of(Parity::Even);

    bool delta = true;
    for (auto j : odd)
        if (j != i && q.adjacent(i, j))
            delta = false;

    SuperFraction prefactor = SuperFraction::constant(s.ambient, Rational(1));
    for (auto k : even) {
        if (q.arrows(k, i) == 0 || q.arrows(i, k) == 0)
            continue;
        if (warnings && std::min(q.arrows(k, i), q.arrows(i, k)) > 1)
            warnings->push_back("2-cycle between '" + q.vertex(k).label + "' and '" + q.vertex(i).label +
                                "' has multiplicity above one; its value enters the odd mutation once");
        prefactor = prefactor / s.values[k];
    }

    // Product of the even values on 2-paths src -> x_l -> dst.
    auto path_product = [&](std::size_t src, std::size_t dst) {
        SuperFraction p = SuperFraction::constant(s.ambient, Rational(1));
        for (auto l : even)
            if (q.arrows(src, l) > 0 && q.arrows(l, dst) > 0)
                p = p * s.values[l];
        return p;
    };

    SuperFraction sum = SuperFraction::constant(s.ambient, Rational(0));
    for (auto j : odd) {
        if (j == i)
            continue;
        if (q.arrows(i, j) > 0)
            sum = sum + s.values[j] * path_product(i, j) * Rational(q.arrows(i, j));
        if (q.arrows(j, i) > 0)
            sum = sum + s.values[j] * path_product(j, i) * Rational(q.arrows(j, i));
    }

    Seed out = s;
    SuperFraction next = prefactor * sum;
    if (delta)
        next = s.values[i] + next;
    out.values[i] = next;
    out.quiver = eta_quiver(q, i);
    return out;
}

// ---------------------------------------------------------------------------
// Sequences

enum class SequenceMode { Algebra, QuiverOnly };

inline Seed apply_step(const Seed& s, const MutationStep& st, SequenceMode mode,
                       std::vector<std::string>* warnings = nullptr) {
    if (mode == SequenceMode::QuiverOnly) {
        Seed out = s;
        out.quiver = st.kind == StepKind::Even ? mu_quiver(s.quiver, st.vertex) : eta_quiver(s.quiver, st.vertex);
        return out;
    }
    return st.kind == StepKind::Even ? even_mutate(s, st.vertex) : odd_mutate(s, st.vertex, warnings);
}

inline bool is_mixed(const std::vector<MutationStep>& steps) {
    return std::any_of(steps.begin(), steps.end(), [&](const MutationStep& x) { return x.kind != steps.front().kind; });
}

/// Left-to-right composition. Algebra mode refuses sequences that mix even and
/// odd steps; quiver-only mode transforms the quiver and leaves values alone.
inline Seed apply_sequence(const Seed& s, const std::vector<MutationStep>& steps,
                           SequenceMode mode = SequenceMode::Algebra, std::vector<std::string>* warnings = nullptr) {
    if (mode == SequenceMode::Algebra && !steps.empty() && is_mixed(steps))
        throw IllegalMutation("mixed sequence not allowed in algebra mode: even and odd mutations cannot be combined "
                              "when generating cluster variables");
    Seed cur = s;
    for (const auto& st : steps)
        cur = apply_step(cur, st, mode, warnings);
    return cur;
}

// ---------------------------------------------------------------------------
// Enumeration of supercluster variables

/// Set of values deduplicated by sf_eq, bucketed by fingerprint.
class ValueSet {
public:
    /// Returns true when v was not present.
    bool insert(const SuperFraction& v) {
        auto& bucket = buckets_[sf_fingerprint(v)];
        for (auto idx : bucket)
            if (sf_eq(items_[idx], v))
                return false;
        bucket.push_back(items_.size());
        items_.push_back(v);
        return true;
    }

    const std::vector<SuperFraction>& items() const noexcept { return items_; }
    std::size_t size() const noexcept { return items_.size(); }

    /// Values ordered by formatted text.
    std::vector<SuperFraction> sorted() const {
        std::vector<std::pair<std::string, std::size_t>> keys;
        for (std::size_t i = 0; i < items_.size(); ++i)
            keys.emplace_back(sf_format(items_[i]), i);
        std::sort(keys.begin(), keys.end());
        std::vector<SuperFraction> out;
        for (const auto& [k, i] : keys)
            out.push_back(items_[i]);
        return out;
    }

private:
    std::unordered_map<std::string, std::vector<std::size_t>> buckets_;
    std::vector<SuperFraction> items_;
};

inline std::string seed_key(const Seed& s) {
    std::string key = labeled_key(s.quiver);
    for (const auto& v : s.values)
        key += "|" + sf_fingerprint(v);
    return key;
}

/// Values at vertices of the given parity over every same-parity mutation
/// sequence of length at most depth (initial variables included).
inline ValueSet enumerate_vars(const Seed& s, Parity parity, std::size_t depth) {
    ValueSet vals;
    auto collect = [&](const Seed& x) {
        for (std::size_t v = 0; v < x.quiver.size(); ++v)
            if (x.quiver.vertex(v).parity == parity)
                vals.insert(x.values[v]);
    };
    std::unordered_set<std::string> seen{seed_key(s)};
    std::vector<Seed> frontier{s};
    collect(s);
    for (std::size_t d = 0; d < depth && !frontier.empty(); ++d) {
        std::vector<Seed> next;
        for (const auto& cur : frontier)
            for (std::size_t v = 0; v < cur.quiver.size(); ++v) {
                const auto& info = cur.quiver.vertex(v);
                if (info.frozen || info.parity != parity)
                    continue;
                Seed m = parity == Parity::Even ? even_mutate(cur, v) : odd_mutate(cur, v);
                if (!seen.insert(seed_key(m)).second)
                    continue;
                collect(m);
                next.push_back(std::move(m));
            }
        frontier = std::move(next);
    }
    return vals;
}

inline ValueSet enumerate_even_vars(const Seed& s, std::size_t depth) { return enumerate_vars(s, Parity::Even, depth); }
inline ValueSet enumerate_odd_vars(const Seed& s, std::size_t depth) { return enumerate_vars(s, Parity::Odd, depth); }

// ---------------------------------------------------------------------------
// Laurent certificates

struct LaurentCertificate {
    bool laurent = false;
    /// The Laurent polynomial when laurent holds.
    std::optional<SuperPoly> polynomial;
    /// Normalized fraction whose denominator did not cancel otherwise.
    std::optional<SuperFraction> witness;
};

inline LaurentCertificate is_laurent(const SuperFraction& v) {
    LaurentCertificate cert;
    const SuperFraction n = sf_normalize(v);
    const std::size_t m = n.ambient()->even_count();
    ExpVec neg(m);
    for (std::size_t i = 0; i < m; ++i)
        neg[i] = -n.den_mono()[i];
    if (n.den_factors().empty()) {
        cert.laurent = true;
        cert.polynomial = n.num().shifted(neg);
        return cert;
    }
    if (auto q = sp_exact_divide(n.num(), n.factor_product())) {
        cert.laurent = true;
        cert.polynomial = q->shifted(neg);
        return cert;
    }
    cert.witness = n;
    return cert;
}

// ---------------------------------------------------------------------------
// Classical oracle

struct ClassicalSeed {
    IntMatrix b;
    std::vector<SuperFraction> z;

    /// b with values z_i = symbol i of an ambient of purely even symbols.
    static ClassicalSeed initial(const IntMatrix& b, const AmbientPtr& amb) {
        ClassicalSeed cs{b, {}};
        for (std::size_t i = 0; i < b.size(); ++i)
            cs.z.emplace_back(SuperPoly::even_variable(amb, i));
        return cs;
    }
};

/// Fomin-Zelevinsky exchange at k.
inline ClassicalSeed classical_mutate(const ClassicalSeed& cs, std::size_t k) {
    const std::size_t n = cs.b.size();
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j)
            if (cs.b[i][j] != -cs.b[j][i])
                throw PreconditionError("exchange matrix must be skew-symmetric");
    const AmbientPtr amb = cs.z.at(k).ambient();
    SuperFraction pos = SuperFraction::constant(amb, Rational(1));
    SuperFraction negp = SuperFraction::constant(amb, Rational(1));
    for (std::size_t i = 0; i < n; ++i) {
        if (cs.b[i][k] > 0)
            pos = pos * cs.z[i].pow(cs.b[i][k]);
        else if (cs.b[i][k] < 0)
            negp = negp * cs.z[i].pow(-cs.b[i][k]);
    }
    ClassicalSeed out = cs;
    out.z[k] = (pos + negp) / cs.z[k];
    out.b = matrix_mutate(cs.b, k);
    return out;
}

// ---------------------------------------------------------------------------
// Sign twist between a superquiver and its even part

struct SignTwistReport {
    enum class Status { Holds, Fails, PreconditionViolated };
    Status status = Status::Holds;
    std::size_t steps_checked = 0;
    std::string detail;

    bool holds() const { return status == Status::Holds; }
};

/// Compares x_k(t) with eps_k z_k(t)|_{z_i = eps_i x_i} after every prefix of an
/// even sequence, z being the classical seed of the even part.
inline SignTwistReport sign_twist_check(const Seed& s, const std::vector<std::size_t>& even_steps) {
    SignTwistReport rep;
    const SuperQuiver qx = restrict_even(s.quiver);
    const auto evens = s.quiver.vertices_of(Parity::Even);
    std::vector<std::string> znames;
    for (const auto& v : qx.vertices())
        znames.push_back("z_" + v.label);
    const AmbientPtr zamb = make_ambient(znames, {});
    ClassicalSeed cs = ClassicalSeed::initial(b_matrix(qx), zamb);
    const std::vector<int> eps = epsilon_signs(s.quiver);

    Assignment asg;
    asg.even.resize(evens.size());
    for (std::size_t a = 0; a < evens.size(); ++a)
        asg.even[a] = s.values[evens[a]] * Rational(eps[a]);

    auto compare = [&](const Seed& cur) {
        for (std::size_t a = 0; a < evens.size(); ++a) {
            const SuperFraction twisted = sf_substitute(cs.z[a], asg, s.ambient) * Rational(eps[a]);
            if (!sf_eq(cur.values[evens[a]], twisted)) {
                rep.status = SignTwistReport::Status::Fails;
                rep.detail = "vertex " + cur.quiver.vertex(evens[a]).label + ": " + sf_format(cur.values[evens[a]]) +
                             " vs " + sf_format(twisted);
                return false;
            }
        }
        return true;
    };

    Seed cur = s;
    if (!compare(cur))
        return rep;
    for (auto k : even_steps) {
        const auto pos = std::find(evens.begin(), evens.end(), k);
        if (pos == evens.end())
            throw IllegalMutation("sign twist check needs even steps");
        const EvenExchange ex = even_exchange(cur, k);
        if (!ex.odd_sum.is_zero()) {
            rep.status = SignTwistReport::Status::PreconditionViolated;
            rep.detail = "odd products contribute at " + cur.quiver.vertex(k).label + ": " + sf_format(ex.odd_sum);
            return rep;
        }
        cur = even_mutate(cur, k);
        cs = classical_mutate(cs, static_cast<std::size_t>(pos - evens.begin()));
        ++rep.steps_checked;
        if (!compare(cur))
            return rep;
    }
    return rep;
}

} // namespace supercluster
