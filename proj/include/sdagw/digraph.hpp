#pragma once

#include <algorithm>
#include <cstdint>
#include <queue>
#include <random>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "vertex_set.hpp"

namespace sdagw {

struct InputError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Simple loop-free digraph over dense vertex ids [0, n).
class Digraph {
public:
    Digraph() = default;
    explicit Digraph(int n) : n_(n), out_(static_cast<std::size_t>(n)), in_(static_cast<std::size_t>(n)) {
        if (n < 0) throw InputError("negative vertex count");
        for (int v = 0; v < n; ++v) {
            out_[static_cast<std::size_t>(v)] = VertexSet(n);
            in_[static_cast<std::size_t>(v)] = VertexSet(n);
        }
    }
    Digraph(int n, const std::vector<std::pair<Vertex, Vertex>>& edges) : Digraph(n) {
        for (auto [u, v] : edges) add_edge(u, v);
    }

    int vertex_count() const { return n_; }
    int edge_count() const { return m_; }

    void add_edge(Vertex u, Vertex v) {
        if (u < 0 || u >= n_ || v < 0 || v >= n_)
            throw InputError("edge " + std::to_string(u) + "->" + std::to_string(v) + " out of range");
        if (u == v) throw InputError("self-loop at vertex " + std::to_string(u));
        if (out_[static_cast<std::size_t>(u)].contains(v))
            throw InputError("duplicate edge " + std::to_string(u) + "->" + std::to_string(v));
        out_[static_cast<std::size_t>(u)].insert(v);
        in_[static_cast<std::size_t>(v)].insert(u);
        ++m_;
    }

    bool has_edge(Vertex u, Vertex v) const { return out_[static_cast<std::size_t>(u)].contains(v); }
    const VertexSet& out(Vertex v) const { return out_[static_cast<std::size_t>(v)]; }
    const VertexSet& in(Vertex v) const { return in_[static_cast<std::size_t>(v)]; }

    VertexSet all() const { return VertexSet::full(n_); }
    VertexSet empty_set() const { return VertexSet(n_); }

    std::vector<std::pair<Vertex, Vertex>> edges() const {
        std::vector<std::pair<Vertex, Vertex>> e;
        e.reserve(static_cast<std::size_t>(m_));
        for (Vertex u = 0; u < n_; ++u) out(u).for_each([&](Vertex v) { e.emplace_back(u, v); });
        return e;
    }

    friend bool operator==(const Digraph& a, const Digraph& b) { return a.n_ == b.n_ && a.out_ == b.out_; }

private:
    int n_ = 0;
    int m_ = 0;
    std::vector<VertexSet> out_;
    std::vector<VertexSet> in_;
};

// Vertices reachable from `sources` in D minus `removed` (length-0 paths count).
inline VertexSet reach(const Digraph& d, const VertexSet& removed, const VertexSet& sources) {
    if (sources.intersects(removed)) throw InputError("reach: a source lies in the removed set");
    VertexSet seen = sources;
    VertexSet frontier = sources;
    VertexSet next(d.vertex_count());
    while (!frontier.empty()) {
        next.clear();
        frontier.for_each([&](Vertex u) { next |= d.out(u); });
        next -= removed;
        next -= seen;
        seen |= next;
        std::swap(frontier, next);
    }
    return seen;
}

inline VertexSet reach(const Digraph& d, const VertexSet& removed, Vertex source) {
    return reach(d, removed, VertexSet::single(d.vertex_count(), source));
}

// Kahn's algorithm with the smallest available id first; empty if cyclic.
inline std::vector<Vertex> kahn_order(const Digraph& d) {
    const int n = d.vertex_count();
    std::vector<int> indeg(static_cast<std::size_t>(n));
    for (Vertex v = 0; v < n; ++v) indeg[static_cast<std::size_t>(v)] = d.in(v).size();
    std::priority_queue<Vertex, std::vector<Vertex>, std::greater<>> ready;
    for (Vertex v = 0; v < n; ++v)
        if (indeg[static_cast<std::size_t>(v)] == 0) ready.push(v);
    std::vector<Vertex> order;
    order.reserve(static_cast<std::size_t>(n));
    while (!ready.empty()) {
        Vertex u = ready.top();
        ready.pop();
        order.push_back(u);
        d.out(u).for_each([&](Vertex v) {
            if (--indeg[static_cast<std::size_t>(v)] == 0) ready.push(v);
        });
    }
    if (static_cast<int>(order.size()) != n) order.clear();
    return order;
}

inline bool is_dag(const Digraph& d) {
    return d.vertex_count() == 0 || !kahn_order(d).empty();
}

inline std::vector<Vertex> topological_order(const Digraph& d) {
    auto order = kahn_order(d);
    if (static_cast<int>(order.size()) != d.vertex_count()) throw InputError("topological_order: graph has a directed cycle");
    return order;
}

// ---- generators -------------------------------------------------------

struct GenModel {
    enum class Kind { Erdos, Cycle, Path, Dag, Banded } kind = Kind::Path;
    double p = 0.5;
    int w = 1;

    static GenModel parse(const std::string& text) {
        GenModel m;
        auto open = text.find('(');
        std::string name = text.substr(0, open);
        std::string arg;
        if (open != std::string::npos) {
            auto close = text.find(')', open);
            if (close == std::string::npos) throw InputError("model '" + text + "': missing ')'");
            arg = text.substr(open + 1, close - open - 1);
        }
        auto need_arg = [&] {
            if (arg.empty()) throw InputError("model '" + name + "' needs a parameter");
        };
        if (name == "erdos") {
            need_arg();
            m.kind = Kind::Erdos;
            m.p = std::stod(arg);
        } else if (name == "dag") {
            need_arg();
            m.kind = Kind::Dag;
            m.p = std::stod(arg);
        } else if (name == "cycle") {
            m.kind = Kind::Cycle;
        } else if (name == "path") {
            m.kind = Kind::Path;
        } else if (name == "banded") {
            need_arg();
            m.kind = Kind::Banded;
            auto comma = arg.find(',');
            m.w = std::stoi(arg.substr(0, comma));
            if (comma != std::string::npos) m.p = std::stod(arg.substr(comma + 1));
        } else {
            throw InputError("unknown generator model '" + name + "'");
        }
        return m;
    }
};

// banded(w[,p]) keeps each pair u != v with |u-v| <= w independently with
// probability p (default 0.5).
inline Digraph gen_digraph(const GenModel& model, int n, std::uint64_t seed) {
    if (n < 0) throw InputError("gen_digraph: negative n");
    if (model.p < 0.0 || model.p > 1.0) throw InputError("gen_digraph: p must lie in [0,1]");
    if (model.kind == GenModel::Kind::Banded && model.w < 1) throw InputError("gen_digraph: band width must be >= 1");
    Digraph d(n);
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> coin(0.0, 1.0);
    switch (model.kind) {
        case GenModel::Kind::Cycle:
            if (n >= 2)
                for (Vertex v = 0; v < n; ++v)
                    if (n > 2 || v == 0) d.add_edge(v, (v + 1) % n);
            if (n == 2) d.add_edge(1, 0);
            break;
        case GenModel::Kind::Path:
            for (Vertex v = 0; v + 1 < n; ++v) d.add_edge(v, v + 1);
            break;
        case GenModel::Kind::Erdos:
            for (Vertex u = 0; u < n; ++u)
                for (Vertex v = 0; v < n; ++v)
                    if (u != v && coin(rng) < model.p) d.add_edge(u, v);
            break;
        case GenModel::Kind::Dag:
            for (Vertex u = 0; u < n; ++u)
                for (Vertex v = u + 1; v < n; ++v)
                    if (coin(rng) < model.p) d.add_edge(u, v);
            break;
        case GenModel::Kind::Banded:
            for (Vertex u = 0; u < n; ++u)
                for (Vertex v = std::max(0, u - model.w); v <= std::min(n - 1, u + model.w); ++v)
                    if (u != v && coin(rng) < model.p) d.add_edge(u, v);
            break;
    }
    return d;
}

inline Digraph gen_digraph(const std::string& model, int n, std::uint64_t seed) {
    return gen_digraph(GenModel::parse(model), n, seed);
}

// ---- text I/O -------------------------------------------------------------

// Edge list: "n m" followed by m lines "u v"; '#' starts a comment.
inline Digraph parse_edge_list(const std::string& text) {
    std::istringstream in(text);
    std::string line;
    int lineno = 0;
    std::vector<long long> nums;
    std::vector<int> line_of;
    while (std::getline(in, line)) {
        ++lineno;
        if (auto h = line.find('#'); h != std::string::npos) line.erase(h);
        std::istringstream ls(line);
        std::string tok;
        while (ls >> tok) {
            try {
                std::size_t used = 0;
                long long x = std::stoll(tok, &used);
                if (used != tok.size()) throw std::invalid_argument(tok);
                nums.push_back(x);
                line_of.push_back(lineno);
            } catch (const std::exception&) {
                throw InputError("line " + std::to_string(lineno) + ": expected an integer, got '" + tok + "'");
            }
        }
    }
    if (nums.size() < 2) throw InputError("edge list: missing 'n m' header");
    long long n = nums[0], m = nums[1];
    if (n < 0 || m < 0) throw InputError("line " + std::to_string(line_of[0]) + ": negative counts");
    if (static_cast<long long>(nums.size()) != 2 + 2 * m)
        throw InputError("edge list: header announces " + std::to_string(m) + " edges but " +
                         std::to_string((nums.size() - 2) / 2) + " were given");
    Digraph d(static_cast<int>(n));
    for (long long i = 0; i < m; ++i) {
        auto at = static_cast<std::size_t>(2 + 2 * i);
        try {
            d.add_edge(static_cast<Vertex>(nums[at]), static_cast<Vertex>(nums[at + 1]));
        } catch (const InputError& e) {
            throw InputError("line " + std::to_string(line_of[at]) + ": " + e.what());
        }
    }
    return d;
}

inline std::string to_edge_list(const Digraph& d) {
    std::ostringstream out;
    out << d.vertex_count() << ' ' << d.edge_count() << '\n';
    for (auto [u, v] : d.edges()) out << u << ' ' << v << '\n';
    return out.str();
}

inline std::string to_dot(const Digraph& d, const std::string& name = "D") {
    std::ostringstream out;
    out << "digraph " << name << " {\n";
    for (Vertex v = 0; v < d.vertex_count(); ++v) out << "  " << v << ";\n";
    for (auto [u, v] : d.edges()) out << "  " << u << " -> " << v << ";\n";
    out << "}\n";
    return out.str();
}

// Induced subgraph on `keep`; returns the graph and the old id of each new vertex.
inline std::pair<Digraph, std::vector<Vertex>> induced_subgraph(const Digraph& d, const VertexSet& keep) {
    std::vector<Vertex> old = keep.to_vector();
    std::vector<int> idx(static_cast<std::size_t>(d.vertex_count()), -1);
    for (std::size_t i = 0; i < old.size(); ++i) idx[static_cast<std::size_t>(old[i])] = static_cast<int>(i);
    Digraph s(static_cast<int>(old.size()));
    for (auto [u, v] : d.edges())
        if (idx[static_cast<std::size_t>(u)] >= 0 && idx[static_cast<std::size_t>(v)] >= 0)
            s.add_edge(idx[static_cast<std::size_t>(u)], idx[static_cast<std::size_t>(v)]);
    return {std::move(s), std::move(old)};
}

}  // namespace sdagw
