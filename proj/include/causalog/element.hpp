#pragma once

#include <compare>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

namespace causalog {

/// An element of a finite domain. Created elements carry the creation counter and the
/// occurrence-id of the New node that produced them; they render as `_p<counter>`.
struct DomainElement {
    enum class Kind : std::uint8_t { Named, Integer, Created };

    Kind kind = Kind::Named;
    std::int64_t value = 0;  // integer value, or creation counter
    std::string name;        // element name, or creating occurrence-id

    static DomainElement named(std::string n) { return {Kind::Named, 0, std::move(n)}; }
    static DomainElement integer(std::int64_t v) { return {Kind::Integer, v, {}}; }
    static DomainElement created(std::int64_t counter, std::string tag) {
        return {Kind::Created, counter, std::move(tag)};
    }

    bool is_named() const { return kind == Kind::Named; }
    bool is_integer() const { return kind == Kind::Integer; }
    bool is_created() const { return kind == Kind::Created; }

    std::string render() const;

    auto operator<=>(const DomainElement&) const = default;
    bool operator==(const DomainElement&) const = default;
};

using Tuple = std::vector<DomainElement>;

std::string render_tuple(const Tuple& t);

struct IntRange {
    std::int64_t lo = 0;
    std::int64_t hi = -1;

    bool contains(std::int64_t v) const { return lo <= v && v <= hi; }
    bool operator==(const IntRange&) const = default;
};

inline std::size_t hash_combine(std::size_t seed, std::size_t v) {
    return seed ^ (v + 0x9e3779b97f4a7c15ULL + (seed << 6) + (seed >> 2));
}

struct ElementHash {
    std::size_t operator()(const DomainElement& e) const {
        std::size_t h = std::hash<int>{}(static_cast<int>(e.kind));
        h = hash_combine(h, std::hash<std::int64_t>{}(e.value));
        return hash_combine(h, std::hash<std::string>{}(e.name));
    }
};

}  // namespace causalog
