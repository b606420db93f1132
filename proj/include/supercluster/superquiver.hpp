#pragma once

#include <algorithm>
#include <cctype>
#include <cstddef>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "ambient.hpp"
#include "errors.hpp"

namespace supercluster {

struct VertexInfo {
    std::string label;
    Parity parity = Parity::Even;
    bool frozen = false;

    bool even() const { return parity == Parity::Even; }
    bool odd() const { return parity == Parity::Odd; }
    bool exchangeable() const { return !frozen; }

    friend bool operator==(const VertexInfo&, const VertexInfo&) = default;
};

enum class ViolationKind { EvenLoop, EvenEvenTwoCycle, OddOddTwoCycle, DuplicateLabel };

inline const char* to_string(ViolationKind k) {
    switch (k) {
    case ViolationKind::EvenLoop:
        return "EvenLoop";
    case ViolationKind::EvenEvenTwoCycle:
        return "EvenEvenTwoCycle";
    case ViolationKind::OddOddTwoCycle:
        return "OddOddTwoCycle";
    case ViolationKind::DuplicateLabel:
        return "DuplicateLabel";
    }
    return "?";
}

struct Violation {
    ViolationKind kind;
    std::size_t first;
    std::size_t second;
    std::string message;
};

/// Directed multigraph on even/odd vertices. Arrow multiplicities are kept in a
/// dense matrix with zero diagonal; loops live in a separate per-vertex count.
class SuperQuiver {
public:
    SuperQuiver() = default;

    std::size_t add_vertex(std::string label, Parity parity, bool frozen = false) {
        const std::size_t old = v_.size();
        const std::size_t n = old + 1;
        std::vector<int> grown(n * n, 0);
        for (std::size_t i = 0; i < old; ++i)
            for (std::size_t j = 0; j < old; ++j)
                grown[i * n + j] = a_[i * old + j];
        a_ = std::move(grown);
        v_.push_back({std::move(label), parity, frozen});
        loops_.push_back(0);
        return old;
    }

    /// Adds m arrows src -> dst; src == dst adds loops.
    void add_arrows(std::size_t src, std::size_t dst, int m = 1) {
        check_index(src);
        check_index(dst);
        if (m < 0)
            throw PreconditionError("arrow multiplicity must be nonnegative");
        int& slot = src == dst ? loops_[src] : a_[src * size() + dst];
        if (__builtin_add_overflow(slot, m, &slot))
            throw ResourceLimit("arrow multiplicity overflows int");
    }

    void set_arrows(std::size_t src, std::size_t dst, int m) {
        check_index(src);
        check_index(dst);
        if (m < 0)
            throw PreconditionError("arrow multiplicity must be nonnegative");
        if (src == dst)
            loops_[src] = m;
        else
            a_[src * size() + dst] = m;
    }

    void set_loops(std::size_t v, int count) { set_arrows(v, v, count); }

    int arrows(std::size_t src, std::size_t dst) const { return src == dst ? 0 : a_[src * size() + dst]; }
    int loops(std::size_t v) const { return loops_[v]; }
    bool adjacent(std::size_t i, std::size_t j) const { return arrows(i, j) > 0 || arrows(j, i) > 0; }

    std::size_t size() const noexcept { return v_.size(); }
    const VertexInfo& vertex(std::size_t i) const { return v_.at(i); }
    const std::vector<VertexInfo>& vertices() const noexcept { return v_; }
    void set_frozen(std::size_t i, bool frozen) { v_.at(i).frozen = frozen; }

    std::optional<std::size_t> find(std::string_view label) const {
        for (std::size_t i = 0; i < v_.size(); ++i)
            if (v_[i].label == label)
                return i;
        return std::nullopt;
    }

    std::size_t index_of(std::string_view label) const {
        auto i = find(label);
        if (!i)
            throw PreconditionError("no vertex named '" + std::string(label) + "'");
        return *i;
    }

    std::vector<std::size_t> vertices_of(Parity p) const {
        std::vector<std::size_t> out;
        for (std::size_t i = 0; i < v_.size(); ++i)
            if (v_[i].parity == p)
                out.push_back(i);
        return out;
    }

    std::size_t count(Parity p) const {
        return static_cast<std::size_t>(
            std::count_if(v_.begin(), v_.end(), [p](const VertexInfo& v) { return v.parity == p; }));
    }

    /// Position of vertex i within its parity class; this is its symbol index.
    std::size_t symbol_index(std::size_t i) const {
        std::size_t r = 0;
        for (std::size_t j = 0; j < i; ++j)
            if (v_[j].parity == v_.at(i).parity)
                ++r;
        return r;
    }

    /// Symbol table with the even labels and the odd labels in vertex order.
    AmbientPtr ambient() const {
        std::vector<std::string> even, odd;
        for (const auto& v : v_)
            (v.even() ? even : odd).push_back(v.label);
        return make_ambient(std::move(even), std::move(odd));
    }

    const std::vector<int>& matrix() const noexcept { return a_; }
    const std::vector<int>& loop_counts() const noexcept { return loops_; }

    friend bool operator==(const SuperQuiver&, const SuperQuiver&) = default;

private:
    void check_index(std::size_t i) const {
        if (i >= v_.size())
            throw PreconditionError("vertex index out of range");
    }

    std::vector<VertexInfo> v_;
    std::vector<int> a_;
    std::vector<int> loops_;
};

/// Thrown when a quiver text parses but breaks the structural rules.
class InvalidQuiver : public Error {
public:
    explicit InvalidQuiver(std::vector<Violation> v) : Error(summary(v)), violations_(std::move(v)) {}
    const std::vector<Violation>& violations() const noexcept { return violations_; }

private:
    static std::string summary(const std::vector<Violation>& v) {
        std::string s = "invalid superquiver:";
        for (const auto& x : v)
            s += " " + x.message + ";";
        return s;
    }
    std::vector<Violation> violations_;
};

inline std::vector<Violation> validate(const SuperQuiver& q) {
    std::vector<Violation> out;
    const std::size_t n = q.size();
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < i; ++j)
            if (q.vertex(i).label == q.vertex(j).label)
                out.push_back({ViolationKind::DuplicateLabel, j, i, "duplicate label '" + q.vertex(i).label + "'"});
        if (q.vertex(i).even() && q.loops(i) > 0)
            out.push_back({ViolationKind::EvenLoop, i, i, "loop on even vertex '" + q.vertex(i).label + "'"});
    }
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j) {
            if (q.vertex(i).parity != q.vertex(j).parity || q.arrows(i, j) == 0 || q.arrows(j, i) == 0)
                continue;
            const bool even = q.vertex(i).even();
            out.push_back({even ? ViolationKind::EvenEvenTwoCycle : ViolationKind::OddOddTwoCycle, i, j,
                           std::string(even ? "even" : "odd") + " 2-cycle between '" + q.vertex(i).label + "' and '" +
                               q.vertex(j).label + "'"});
        }
    return out;
}

inline void require_valid(const SuperQuiver& q) {
    auto v = validate(q);
    if (!v.empty())
        throw InvalidQuiver(std::move(v));
}

// ---------------------------------------------------------------------------
// Laurentness conditions

struct VertexConditions {
    std::size_t vertex;
    bool c1;
    bool c2;
};

/// C1 at a mutable even vertex x: if some odd pair k != l has y_k -> x -> y_l
/// with no arrow y_k -> y_l, every even neighbour of x must be frozen.
inline bool c1_at(const SuperQuiver& q, std::size_t x) {
    const auto odd = q.vertices_of(Parity::Odd);
    bool hypothesis = false;
    for (auto k : odd)
        for (auto l : odd)
            if (k != l && q.arrows(k, x) > 0 && q.arrows(x, l) > 0 && q.arrows(k, l) == 0)
                hypothesis = true;
    if (!hypothesis)
        return true;
    for (auto j : q.vertices_of(Parity::Even))
        if (j != x && q.adjacent(x, j) && !q.vertex(j).frozen)
            return false;
    return true;
}

/// C2 at a mutable even vertex x: every y_j -> x -> y_k (j != k) has
/// y_j -> y_k or y_k -> x -> y_j.
inline bool c2_at(const SuperQuiver& q, std::size_t x) {
    const auto odd = q.vertices_of(Parity::Odd);
    for (auto j : odd)
        for (auto k : odd) {
            if (j == k || q.arrows(j, x) == 0 || q.arrows(x, k) == 0)
                continue;
            if (q.arrows(j, k) > 0)
                continue;
            if (q.arrows(k, x) > 0 && q.arrows(x, j) > 0)
                continue;
            return false;
        }
    return true;
}

/// One entry per even vertex; frozen vertices satisfy both conditions vacuously.
inline std::vector<VertexConditions> condition_report(const SuperQuiver& q) {
    std::vector<VertexConditions> out;
    for (auto x : q.vertices_of(Parity::Even)) {
        if (q.vertex(x).frozen)
            out.push_back({x, true, true});
        else
            out.push_back({x, c1_at(q, x), c2_at(q, x)});
    }
    return out;
}

inline bool check_c1(const SuperQuiver& q) {
    require_valid(q);
    auto r = condition_report(q);
    return std::all_of(r.begin(), r.end(), [](const VertexConditions& c) { return c.c1; });
}

inline bool check_c2(const SuperQuiver& q) {
    require_valid(q);
    auto r = condition_report(q);
    return std::all_of(r.begin(), r.end(), [](const VertexConditions& c) { return c.c2; });
}

inline bool check_c1_or_c2(const SuperQuiver& q) {
    require_valid(q);
    auto r = condition_report(q);
    return std::all_of(r.begin(), r.end(), [](const VertexConditions& c) { return c.c1 || c.c2; });
}

// ---------------------------------------------------------------------------
// Quiver mutation

/// Arrow count of a composite path; throws ResourceLimit on overflow.
inline int path_count(int a, int b) {
    int r = 0;
    if (__builtin_mul_overflow(a, b, &r))
        throw ResourceLimit("arrow multiplicity overflows int");
    return r;
}

inline void require_mutable(const SuperQuiver& q, std::size_t k, Parity p) {
    if (k >= q.size())
        throw IllegalMutation("vertex index out of range");
    const auto& v = q.vertex(k);
    if (v.parity != p)
        throw IllegalMutation("vertex '" + v.label + "' is " + to_string(v.parity) + ", expected " + to_string(p));
    if (v.frozen)
        throw IllegalMutation("vertex '" + v.label + "' is frozen");
}

/// Even mutation of the quiver at x_k. Arrows between x_k and odd vertices stay.
inline SuperQuiver mu_quiver(const SuperQuiver& q, std::size_t k) {
    require_mutable(q, k, Parity::Even);
    SuperQuiver r = q;
    const auto even = q.vertices_of(Parity::Even);
    for (auto i : even)
        for (auto j : even)
            if (i != j && i != k && j != k)
                r.add_arrows(i, j, path_count(q.arrows(i, k), q.arrows(k, j)));
    for (auto j : even) {
        if (j == k)
            continue;
        r.set_arrows(k, j, q.arrows(j, k));
        r.set_arrows(j, k, q.arrows(k, j));
    }
    for (auto i : even)
        for (auto j : even)
            if (i < j) {
                const int m = std::min(r.arrows(i, j), r.arrows(j, i));
                r.set_arrows(i, j, r.arrows(i, j) - m);
                r.set_arrows(j, i, r.arrows(j, i) - m);
            }
    return r;
}

/// Odd mutation of the quiver at y_i: odd paths through y_i add shortcuts, then
/// every arrow at y_i is reversed.
inline SuperQuiver eta_quiver(const SuperQuiver& q, std::size_t i) {
    require_mutable(q, i, Parity::Odd);
    SuperQuiver r = q;
    const auto odd = q.vertices_of(Parity::Odd);
    for (auto k : odd)
        for (auto j : odd)
            if (k != i && j != i && k != j)
                r.add_arrows(k, j, path_count(q.arrows(k, i), q.arrows(i, j)));
    for (std::size_t j = 0; j < q.size(); ++j) {
        if (j == i)
            continue;
        r.set_arrows(i, j, q.arrows(j, i));
        r.set_arrows(j, i, q.arrows(i, j));
    }
    for (auto a : odd)
        for (auto b : odd)
            if (a < b) {
                const int m = std::min(r.arrows(a, b), r.arrows(b, a));
                r.set_arrows(a, b, r.arrows(a, b) - m);
                r.set_arrows(b, a, r.arrows(b, a) - m);
            }
    return r;
}

/// Full subquiver on the given vertices, in the given order.
inline SuperQuiver induced_subquiver(const SuperQuiver& q, const std::vector<std::size_t>& keep) {
    SuperQuiver r;
    for (auto v : keep)
        r.add_vertex(q.vertex(v).label, q.vertex(v).parity, q.vertex(v).frozen);
    for (std::size_t a = 0; a < keep.size(); ++a) {
        r.set_loops(a, q.loops(keep[a]));
        for (std::size_t b = 0; b < keep.size(); ++b)
            if (a != b)
                r.set_arrows(a, b, q.arrows(keep[a], keep[b]));
    }
    return r;
}

inline SuperQuiver restrict_even(const SuperQuiver& q) { return induced_subquiver(q, q.vertices_of(Parity::Even)); }
inline SuperQuiver restrict_odd(const SuperQuiver& q) { return induced_subquiver(q, q.vertices_of(Parity::Odd)); }

/// Relabels vertex i as perm[i].
inline SuperQuiver permute(const SuperQuiver& q, const std::vector<std::size_t>& perm) {
    std::vector<std::size_t> inv(q.size());
    for (std::size_t i = 0; i < q.size(); ++i)
        inv.at(perm.at(i)) = i;
    return induced_subquiver(q, inv);
}

/// Every arrow reversed; loops unchanged.
inline SuperQuiver reversed(const SuperQuiver& q) {
    SuperQuiver r = q;
    for (std::size_t i = 0; i < q.size(); ++i)
        for (std::size_t j = 0; j < q.size(); ++j)
            if (i != j)
                r.set_arrows(i, j, q.arrows(j, i));
    return r;
}

/// eps_i = (-1)^u_i over the even vertices (in vertex order), with u_i the
/// number of loops on odd vertices adjacent to x_i.
inline std::vector<int> epsilon_signs(const SuperQuiver& q) {
    std::vector<int> out;
    const auto odd = q.vertices_of(Parity::Odd);
    for (auto x : q.vertices_of(Parity::Even)) {
        long u = 0;
        for (auto y : odd)
            if (q.adjacent(x, y))
                u += q.loops(y);
        out.push_back(u % 2 ? -1 : 1);
    }
    return out;
}

using IntMatrix = std::vector<std::vector<int>>;

inline IntMatrix b_matrix(const SuperQuiver& q) {
    if (q.count(Parity::Odd) != 0)
        throw PreconditionError("b_matrix needs a purely even quiver");
    const std::size_t n = q.size();
    IntMatrix b(n, std::vector<int>(n, 0));
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j)
            b[i][j] = q.arrows(i, j) - q.arrows(j, i);
    return b;
}

/// Classical matrix mutation b'_ij = -b_ij at k, else b_ij + (|b_ik| b_kj + b_ik |b_kj|)/2.
inline IntMatrix matrix_mutate(const IntMatrix& b, std::size_t k) {
    IntMatrix r = b;
    const std::size_t n = b.size();
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) {
            if (i == k || j == k)
                r[i][j] = -b[i][j];
            else
                r[i][j] = b[i][j] + (std::abs(b[i][k]) * b[k][j] + b[i][k] * std::abs(b[k][j])) / 2;
        }
    return r;
}

/// Purely even quiver with the given exchange matrix (all vertices mutable).
inline SuperQuiver quiver_from_matrix(const IntMatrix& b, const std::string& prefix = "x") {
    SuperQuiver q;
    for (std::size_t i = 0; i < b.size(); ++i)
        q.add_vertex(prefix + std::to_string(i + 1), Parity::Even);
    for (std::size_t i = 0; i < b.size(); ++i)
        for (std::size_t j = 0; j < b.size(); ++j)
            if (b[i][j] > 0)
                q.set_arrows(i, j, b[i][j]);
    return q;
}

// ---------------------------------------------------------------------------
// Text form
//
//   # comment
//   even a            odd al frozen
//   arrow al -> a     arrow a -> b * 2     arrow x <-> y
//   loop al * 2

namespace detail {

struct QuiverLexer {
    std::string_view line;
    std::size_t lineno;
    std::size_t pos = 0;

    void skip_ws() {
        while (pos < line.size() && std::isspace(static_cast<unsigned char>(line[pos])))
            ++pos;
    }
    bool done() {
        skip_ws();
        return pos >= line.size();
    }
    [[noreturn]] void fail(const std::string& what) const { throw ParseError(what, lineno, pos + 1); }

    std::string word() {
        skip_ws();
        const std::size_t start = pos;
        while (pos < line.size() && (std::isalnum(static_cast<unsigned char>(line[pos])) || line[pos] == '_'))
            ++pos;
        if (start == pos)
            fail("expected a name");
        if (std::isdigit(static_cast<unsigned char>(line[start]))) {
            pos = start;
            fail("names must start with a letter or '_'");
        }
        return std::string(line.substr(start, pos - start));
    }

    bool accept(std::string_view tok) {
        skip_ws();
        if (line.substr(pos, tok.size()) == tok) {
            pos += tok.size();
            return true;
        }
        return false;
    }

    int positive_int() {
        skip_ws();
        const std::size_t start = pos;
        while (pos < line.size() && std::isdigit(static_cast<unsigned char>(line[pos])))
            ++pos;
        if (start == pos)
            fail("expected a positive integer");
        const std::string digits(line.substr(start, pos - start));
        if (digits.size() > 6) {
            pos = start;
            fail("multiplicity too large");
        }
        const int v = std::stoi(digits);
        if (v <= 0) {
            pos = start;
            fail("multiplicity must be positive");
        }
        return v;
    }

    int optional_multiplicity() {
        if (accept("*"))
            return positive_int();
        return 1;
    }
};

} // namespace detail

/// Parses the line-oriented quiver grammar without structural validation.
inline SuperQuiver parse_quiver_unchecked(std::string_view text) {
    SuperQuiver q;
    std::size_t lineno = 0;
    std::size_t start = 0;
    while (start <= text.size()) {
        std::size_t end = text.find('\n', start);
        if (end == std::string_view::npos)
            end = text.size();
        std::string_view line = text.substr(start, end - start);
        ++lineno;
        if (auto hash = line.find('#'); hash != std::string_view::npos)
            line = line.substr(0, hash);
        if (!line.empty() && line.back() == '\r')
            line.remove_suffix(1);

        detail::QuiverLexer lx{line, lineno};
        if (!lx.done()) {
            const std::size_t kw_pos = lx.pos;
            const std::string kw = lx.word();
            auto vertex = [&](const std::string& name) {
                auto v = q.find(name);
                if (!v) {
                    lx.pos -= name.size();
                    lx.fail("undeclared vertex '" + name + "'");
                }
                return *v;
            };
            if (kw == "even" || kw == "odd") {
                const std::string name = lx.word();
                bool frozen = false;
                if (!lx.done()) {
                    const std::string flag = lx.word();
                    if (flag != "frozen") {
                        lx.pos -= flag.size();
                        lx.fail("expected 'frozen'");
                    }
                    frozen = true;
                }
                q.add_vertex(name, kw == "even" ? Parity::Even : Parity::Odd, frozen);
            } else if (kw == "arrow") {
                const auto src = vertex(lx.word());
                bool both = false;
                if (lx.accept("<->"))
                    both = true;
                else if (!lx.accept("->"))
                    lx.fail("expected '->' or '<->'");
                const auto dst = vertex(lx.word());
                const int m = lx.optional_multiplicity();
                q.add_arrows(src, dst, m);
                if (both)
                    q.add_arrows(dst, src, m);
            } else if (kw == "loop") {
                const auto v = vertex(lx.word());
                q.add_arrows(v, v, lx.optional_multiplicity());
            } else {
                lx.pos = kw_pos;
                lx.fail("unknown statement '" + kw + "'");
            }
            if (!lx.done())
                lx.fail("unexpected trailing text");
        }
        if (end == text.size())
            break;
        start = end + 1;
    }
    return q;
}

/// Parses and validates; structural violations raise InvalidQuiver.
inline SuperQuiver parse_quiver(std::string_view text) {
    SuperQuiver q = parse_quiver_unchecked(text);
    require_valid(q);
    return q;
}

inline std::string format_quiver(const SuperQuiver& q) {
    std::ostringstream out;
    for (const auto& v : q.vertices())
        out << (v.even() ? "even " : "odd ") << v.label << (v.frozen ? " frozen" : "") << '\n';
    for (std::size_t i = 0; i < q.size(); ++i)
        for (std::size_t j = 0; j < q.size(); ++j) {
            const int m = q.arrows(i, j);
            if (m == 0)
                continue;
            out << "arrow " << q.vertex(i).label << " -> " << q.vertex(j).label;
            if (m != 1)
                out << " * " << m;
            out << '\n';
        }
    for (std::size_t i = 0; i < q.size(); ++i)
        if (q.loops(i) > 0) {
            out << "loop " << q.vertex(i).label;
            if (q.loops(i) != 1)
                out << " * " << q.loops(i);
            out << '\n';
        }
    return out.str();
}

} // namespace supercluster
