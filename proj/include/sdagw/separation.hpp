#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "digraph.hpp"

namespace sdagw {

// Ordered bipartition (a -> b) with a ∪ b = V and no edge from bottom to top.
class Separation {
public:
    Separation() = default;

    // Unchecked construction; use make_separation for validated values.
    Separation(VertexSet a, VertexSet b) : a_(std::move(a)), b_(std::move(b)) {}

    static Separation minimum(int n) { return {VertexSet(n), VertexSet::full(n)}; }
    static Separation maximum(int n) { return {VertexSet::full(n), VertexSet(n)}; }

    const VertexSet& a() const { return a_; }
    const VertexSet& b() const { return b_; }
    VertexSet top() const { return a_ - b_; }
    VertexSet separator() const { return a_ & b_; }
    VertexSet bottom() const { return b_ - a_; }
    int order() const { return separator().size(); }
    int universe() const { return a_.capacity(); }

    friend bool operator==(const Separation& x, const Separation& y) { return x.a_ == y.a_ && x.b_ == y.b_; }
    friend bool operator<(const Separation& x, const Separation& y) {
        if (!(x.a_ == y.a_)) return x.a_ < y.a_;
        return x.b_ < y.b_;
    }

    std::string to_string() const { return "(" + a_.to_string() + "->" + b_.to_string() + ")"; }

private:
    VertexSet a_;
    VertexSet b_;
};

struct SeparationError : InputError {
    using InputError::InputError;
};

// Why (a -> b) fails to be a separation of d, if it does.
inline std::optional<std::string> separation_violation(const Digraph& d, const VertexSet& a, const VertexSet& b) {
    const int n = d.vertex_count();
    if (a.capacity() != n || b.capacity() != n) return "vertex sets do not match the graph";
    VertexSet uncovered = (a | b).complement();
    if (!uncovered.empty()) return "cover violation: vertex " + std::to_string(uncovered.first()) + " is in neither side";
    VertexSet top = a - b;
    VertexSet bottom = b - a;
    std::optional<std::string> witness;
    bottom.for_each([&](Vertex u) {
        if (witness) return;
        VertexSet hit = d.out(u) & top;
        if (!hit.empty())
            witness = "edge " + std::to_string(u) + "->" + std::to_string(hit.first()) + " runs from bottom to top";
    });
    return witness;
}

inline Separation make_separation(const Digraph& d, const VertexSet& a, const VertexSet& b) {
    if (auto why = separation_violation(d, a, b)) throw SeparationError(*why);
    return {a, b};
}

inline bool is_separation(const Digraph& d, const Separation& s) {
    return !separation_violation(d, s.a(), s.b());
}

inline bool sep_leq(const Separation& s1, const Separation& s2) {
    return s1.a().subset_of(s2.a()) && s2.b().subset_of(s1.b());
}

inline bool crosses(const Separation& s1, const Separation& s2) {
    return !sep_leq(s1, s2) && !sep_leq(s2, s1);
}

inline Separation meet(const Separation& s1, const Separation& s2) {
    return {s1.a() & s2.a(), s1.b() | s2.b()};
}

inline Separation join(const Separation& s1, const Separation& s2) {
    return {s1.a() | s2.a(), s1.b() & s2.b()};
}

// The empty meet is the maximum separation and the empty join the minimum.
inline Separation meet_all(int n, const std::vector<Separation>& seps) {
    Separation r = Separation::maximum(n);
    for (const auto& s : seps) r = meet(r, s);
    return r;
}

inline Separation join_all(int n, const std::vector<Separation>& seps) {
    Separation r = Separation::minimum(n);
    for (const auto& s : seps) r = join(r, s);
    return r;
}

// (V \ R -> s ∪ R) with R = Reach_{D \ s}(x).
inline Separation range_sep(const Digraph& d, const VertexSet& s, const VertexSet& x) {
    if (s.intersects(x)) throw SeparationError("range_sep: x intersects s");
    VertexSet r = reach(d, s, x);
    return {r.complement(), s | r};
}

// ---- JSON -------------------------------------------------------------------

inline nlohmann::json set_to_json(const VertexSet& s) { return s.to_vector(); }

inline VertexSet set_from_json(const nlohmann::json& j, int n) {
    if (!j.is_array()) throw InputError("expected an array of vertex ids");
    VertexSet s(n);
    for (const auto& x : j) {
        if (!x.is_number_integer()) throw InputError("vertex ids must be integers");
        int v = x.get<int>();
        if (v < 0 || v >= n) throw InputError("vertex id " + std::to_string(v) + " out of range");
        s.insert(v);
    }
    return s;
}

inline nlohmann::json separation_to_json(const Separation& s) {
    return {{"a", set_to_json(s.a())}, {"b", set_to_json(s.b())}};
}

inline Separation separation_from_json(const nlohmann::json& j, int n) {
    if (!j.is_object() || !j.contains("a") || !j.contains("b")) throw InputError("separation needs keys 'a' and 'b'");
    return {set_from_json(j.at("a"), n), set_from_json(j.at("b"), n)};
}

}  // namespace sdagw
