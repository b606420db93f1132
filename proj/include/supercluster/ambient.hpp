#pragma once

#include <cstddef>
#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

#include "errors.hpp"

namespace supercluster {

using Integer = boost::multiprecision::cpp_int;
using Rational = boost::multiprecision::cpp_rational;

enum class Parity : std::uint8_t { Even, Odd };

inline const char* to_string(Parity p) { return p == Parity::Even ? "even" : "odd"; }

/// Index of a symbol inside its parity class.
struct Symbol {
    Parity parity;
    std::size_t index;

    friend bool operator==(const Symbol&, const Symbol&) = default;
};

/// Odd monomials are packed into a 64-bit mask.
inline constexpr std::size_t max_odd_symbols = 64;

/// The symbol table of a supercommutative ring Q[x^{+-1}] (x) Lambda(y).
/// Even names index the Laurent variables, odd names the Grassmann generators.
class Ambient {
public:
    Ambient(std::vector<std::string> even, std::vector<std::string> odd)
        : even_(std::move(even)), odd_(std::move(odd)) {
        if (odd_.size() > max_odd_symbols)
            throw DimensionError("at most " + std::to_string(max_odd_symbols) + " odd symbols are supported");
        for (std::size_t i = 0; i < even_.size(); ++i)
            insert(even_[i], {Parity::Even, i});
        for (std::size_t j = 0; j < odd_.size(); ++j)
            insert(odd_[j], {Parity::Odd, j});
    }

    std::size_t even_count() const noexcept { return even_.size(); }
    std::size_t odd_count() const noexcept { return odd_.size(); }

    const std::vector<std::string>& even_names() const noexcept { return even_; }
    const std::vector<std::string>& odd_names() const noexcept { return odd_; }
    const std::string& even_name(std::size_t i) const { return even_.at(i); }
    const std::string& odd_name(std::size_t j) const { return odd_.at(j); }

    std::optional<Symbol> find(std::string_view name) const {
        auto it = lookup_.find(std::string(name));
        if (it == lookup_.end())
            return std::nullopt;
        return it->second;
    }

    friend bool operator==(const Ambient& a, const Ambient& b) {
        return a.even_ == b.even_ && a.odd_ == b.odd_;
    }

private:
    void insert(const std::string& name, Symbol s) {
        if (!lookup_.emplace(name, s).second)
            throw DimensionError("duplicate symbol name '" + name + "'");
    }

    std::vector<std::string> even_;
    std::vector<std::string> odd_;
    std::unordered_map<std::string, Symbol> lookup_;
};

using AmbientPtr = std::shared_ptr<const Ambient>;

inline AmbientPtr make_ambient(std::vector<std::string> even, std::vector<std::string> odd) {
    return std::make_shared<const Ambient>(std::move(even), std::move(odd));
}

inline bool same_ambient(const AmbientPtr& a, const AmbientPtr& b) {
    return a == b || (a && b && *a == *b);
}

inline void require_same_ambient(const AmbientPtr& a, const AmbientPtr& b) {
    if (!same_ambient(a, b))
        throw DimensionError("operands belong to different ambient rings");
}

} // namespace supercluster
