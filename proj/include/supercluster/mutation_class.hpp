#pragma once

#include <algorithm>
#include <array>
#include <cstdint>
#include <deque>
#include <map>
#include <optional>
#include <string>
#include <unordered_set>
#include <vector>

#include "superquiver.hpp"

namespace supercluster {

/// Opaque key; equal keys mean equal (labeled) or isomorphic quivers.
using QuiverKey = std::string;

namespace detail {

inline void append_int(std::string& out, std::int64_t v) {
    out.append(reinterpret_cast<const char*>(&v), sizeof v);
}

/// Encoding of q with vertex order[p] placed at position p.
inline std::vector<std::int64_t> encode_ordered(const SuperQuiver& q, const std::vector<std::size_t>& order) {
    std::vector<std::int64_t> out;
    const std::size_t n = order.size();
    out.reserve(n * (n + 3));
    for (auto v : order) {
        out.push_back(q.vertex(v).odd() ? 1 : 0);
        out.push_back(q.vertex(v).frozen ? 1 : 0);
        out.push_back(q.loops(v));
    }
    for (auto v : order)
        for (auto u : order)
            out.push_back(q.arrows(v, u));
    return out;
}

template <class T>
std::vector<int> rank_signatures(const std::vector<T>& sig) {
    std::vector<T> distinct = sig;
    std::sort(distinct.begin(), distinct.end());
    distinct.erase(std::unique(distinct.begin(), distinct.end()), distinct.end());
    std::vector<int> out(sig.size());
    for (std::size_t i = 0; i < sig.size(); ++i)
        out[i] = static_cast<int>(std::lower_bound(distinct.begin(), distinct.end(), sig[i]) - distinct.begin());
    return out;
}

inline int count_distinct(std::vector<int> c) {
    std::sort(c.begin(), c.end());
    return static_cast<int>(std::unique(c.begin(), c.end()) - c.begin());
}

/// Colour refinement by neighbourhood signatures until the partition is stable.
inline std::vector<int> refine(const SuperQuiver& q, std::vector<int> colors) {
    const std::size_t n = q.size();
    colors = rank_signatures(colors);
    int cells = count_distinct(colors);
    for (;;) {
        using Sig = std::pair<int, std::vector<std::array<int, 3>>>;
        std::vector<Sig> sig(n);
        for (std::size_t v = 0; v < n; ++v) {
            sig[v].first = colors[v];
            for (std::size_t u = 0; u < n; ++u)
                if (u != v && q.adjacent(u, v))
                    sig[v].second.push_back({colors[u], q.arrows(v, u), q.arrows(u, v)});
            std::sort(sig[v].second.begin(), sig[v].second.end());
        }
        colors = rank_signatures(sig);
        const int next = count_distinct(colors);
        if (next == cells)
            return colors;
        cells = next;
    }
}

inline void canonical_search(const SuperQuiver& q, const std::vector<int>& colors,
                             std::optional<std::vector<std::int64_t>>& best) {
    const std::size_t n = q.size();
    // First colour class with more than one member.
    std::map<int, std::vector<std::size_t>> cells;
    for (std::size_t v = 0; v < n; ++v)
        cells[colors[v]].push_back(v);
    for (const auto& [c, members] : cells) {
        if (members.size() < 2)
            continue;
        for (auto v : members) {
            std::vector<int> next(n);
            for (std::size_t u = 0; u < n; ++u)
                next[u] = 2 * colors[u] + (u == v ? 0 : 1);
            canonical_search(q, refine(q, next), best);
        }
        return;
    }
    std::vector<std::size_t> order(n);
    for (std::size_t v = 0; v < n; ++v)
        order[static_cast<std::size_t>(colors[v])] = v;
    auto enc = encode_ordered(q, order);
    if (!best || enc < *best)
        best = std::move(enc);
}

inline QuiverKey to_key(const std::vector<std::int64_t>& enc, std::size_t n) {
    QuiverKey out;
    out.reserve((enc.size() + 1) * sizeof(std::int64_t));
    append_int(out, static_cast<std::int64_t>(n));
    for (auto x : enc)
        append_int(out, x);
    return out;
}

} // namespace detail

/// Key for labeled equality.
inline QuiverKey labeled_key(const SuperQuiver& q) {
    std::vector<std::size_t> order(q.size());
    for (std::size_t i = 0; i < order.size(); ++i)
        order[i] = i;
    return detail::to_key(detail::encode_ordered(q, order), q.size());
}

/// Isomorphism-invariant key over relabelings that keep parity and
/// mutability. Lexicographically least encoding over the leaves of an
/// individualise-and-refine search tree.
inline QuiverKey canonical_form(const SuperQuiver& q) {
    const std::size_t n = q.size();
    std::vector<std::array<int, 3>> init(n);
    for (std::size_t v = 0; v < n; ++v)
        init[v] = {q.vertex(v).odd() ? 1 : 0, q.vertex(v).frozen ? 1 : 0, q.loops(v)};
    std::optional<std::vector<std::int64_t>> best;
    detail::canonical_search(q, detail::refine(q, detail::rank_signatures(init)), best);
    return detail::to_key(best ? *best : std::vector<std::int64_t>{}, n);
}

inline bool is_isomorphic(const SuperQuiver& a, const SuperQuiver& b) {
    return a.size() == b.size() && canonical_form(a) == canonical_form(b);
}

// ---------------------------------------------------------------------------
// Mutation classes

enum class MutationKinds { Even, Odd, Both };

struct ClassOptions {
    bool labeled = false;
    MutationKinds kinds = MutationKinds::Both;
    std::size_t cap = 100000;
    bool keep_members = false;
};

enum class Verdict { Finite, InfiniteWitness, CapReached };

inline const char* to_string(Verdict v) {
    switch (v) {
    case Verdict::Finite:
        return "Finite";
    case Verdict::InfiniteWitness:
        return "InfiniteWitness";
    case Verdict::CapReached:
        return "CapReached";
    }
    return "?";
}

struct BoundCheck {
    std::size_t r = 0;
    std::size_t s = 0;
    std::size_t n = 0;
    unsigned long long bound = 0;
    bool holds = false;
};

struct MutClassReport {
    Verdict verdict = Verdict::CapReached;
    /// Class size when Finite, number of visited quivers otherwise.
    std::size_t size = 0;
    std::optional<SuperQuiver> witness;
    std::string reason;
    std::vector<SuperQuiver> members;
    std::optional<BoundCheck> bound_check;
};

inline std::vector<SuperQuiver> quiver_neighbours(const SuperQuiver& q, MutationKinds kinds) {
    std::vector<SuperQuiver> out;
    for (std::size_t v = 0; v < q.size(); ++v) {
        const auto& info = q.vertex(v);
        if (info.frozen)
            continue;
        if (info.even() && kinds != MutationKinds::Odd)
            out.push_back(mu_quiver(q, v));
        else if (info.odd() && kinds != MutationKinds::Even)
            out.push_back(eta_quiver(q, v));
    }
    return out;
}

/// Breadth-first search over quiver mutations, deduplicated by key.
inline MutClassReport mutation_class(const SuperQuiver& q, const ClassOptions& opt = {}) {
    require_valid(q);
    auto key = [&](const SuperQuiver& x) { return opt.labeled ? labeled_key(x) : canonical_form(x); };
    std::unordered_set<QuiverKey> seen{key(q)};
    std::deque<SuperQuiver> frontier{q};
    MutClassReport rep;
    if (opt.keep_members)
        rep.members.push_back(q);
    while (!frontier.empty()) {
        SuperQuiver cur = std::move(frontier.front());
        frontier.pop_front();
        std::vector<SuperQuiver> next_quivers;
        try {
            next_quivers = quiver_neighbours(cur, opt.kinds);
        } catch (const ResourceLimit& e) {
            rep.verdict = Verdict::CapReached;
            rep.size = seen.size();
            rep.reason = e.what();
            return rep;
        }
        for (auto& next : next_quivers) {
            if (!seen.insert(key(next)).second)
                continue;
            if (seen.size() > opt.cap) {
                rep.verdict = Verdict::CapReached;
                rep.size = seen.size();
                rep.reason = "visited more than " + std::to_string(opt.cap) + " quivers";
                return rep;
            }
            if (opt.keep_members)
                rep.members.push_back(next);
            frontier.push_back(std::move(next));
        }
    }
    rep.verdict = Verdict::Finite;
    rep.size = seen.size();
    return rep;
}

/// Connected component (by arrows) of the exchangeable vertices of q with at
/// least three vertices and an arrow of multiplicity above two, if any.
inline std::optional<std::string> multiplicity_witness(const SuperQuiver& q) {
    const std::size_t n = q.size();
    std::vector<int> comp(n, -1);
    int next = 0;
    for (std::size_t s = 0; s < n; ++s) {
        if (q.vertex(s).frozen || comp[s] >= 0)
            continue;
        std::vector<std::size_t> stack{s};
        comp[s] = next;
        std::vector<std::size_t> members;
        while (!stack.empty()) {
            auto v = stack.back();
            stack.pop_back();
            members.push_back(v);
            for (std::size_t u = 0; u < n; ++u)
                if (!q.vertex(u).frozen && comp[u] < 0 && q.adjacent(u, v)) {
                    comp[u] = next;
                    stack.push_back(u);
                }
        }
        ++next;
        if (members.size() < 3)
            continue;
        for (auto a : members)
            for (auto b : members)
                if (q.arrows(a, b) > 2)
                    return "arrow " + q.vertex(a).label + " -> " + q.vertex(b).label + " has multiplicity " +
                           std::to_string(q.arrows(a, b)) + " inside a connected mutable component of " +
                           std::to_string(members.size()) + " vertices";
    }
    return std::nullopt;
}

/// Decides finiteness from the classes of Q_X and Q_Y, then closes the full
/// class and records the r*s*2^n bound.
inline MutClassReport finite_type_verdict(const SuperQuiver& q, const ClassOptions& opt = {}) {
    require_valid(q);
    auto part = [&](const SuperQuiver& sub, MutationKinds kinds) -> MutClassReport {
        ClassOptions o = opt;
        o.kinds = kinds;
        o.keep_members = true;
        MutClassReport rep;
        auto key = [&](const SuperQuiver& x) { return o.labeled ? labeled_key(x) : canonical_form(x); };
        std::unordered_set<QuiverKey> seen{key(sub)};
        std::deque<SuperQuiver> frontier{sub};
        while (!frontier.empty()) {
            SuperQuiver cur = std::move(frontier.front());
            frontier.pop_front();
            if (auto why = multiplicity_witness(cur)) {
                rep.verdict = Verdict::InfiniteWitness;
                rep.witness = cur;
                rep.reason = *why;
                rep.size = seen.size();
                return rep;
            }
            std::vector<SuperQuiver> next_quivers;
            try {
                next_quivers = quiver_neighbours(cur, kinds);
            } catch (const ResourceLimit& e) {
                rep.verdict = Verdict::CapReached;
                rep.size = seen.size();
                rep.reason = e.what();
                return rep;
            }
            for (auto& next : next_quivers) {
                if (!seen.insert(key(next)).second)
                    continue;
                if (seen.size() > o.cap) {
                    rep.verdict = Verdict::CapReached;
                    rep.size = seen.size();
                    rep.reason = "visited more than " + std::to_string(o.cap) + " quivers";
                    return rep;
                }
                frontier.push_back(std::move(next));
            }
        }
        rep.verdict = Verdict::Finite;
        rep.size = seen.size();
        return rep;
    };

    const MutClassReport rx = part(restrict_even(q), MutationKinds::Even);
    if (rx.verdict != Verdict::Finite) {
        MutClassReport out = rx;
        out.reason = "even part: " + rx.reason;
        return out;
    }
    const MutClassReport ry = part(restrict_odd(q), MutationKinds::Odd);
    if (ry.verdict != Verdict::Finite) {
        MutClassReport out = ry;
        out.reason = "odd part: " + ry.reason;
        return out;
    }

    ClassOptions full = opt;
    full.kinds = MutationKinds::Both;
    MutClassReport rep = mutation_class(q, full);
    BoundCheck b;
    b.r = rx.size;
    b.s = ry.size;
    b.n = q.count(Parity::Odd);
    b.bound = static_cast<unsigned long long>(b.r) * b.s * (1ull << b.n);
    b.holds = rep.verdict == Verdict::Finite && rep.size <= b.bound;
    rep.bound_check = b;
    return rep;
}

} // namespace supercluster
