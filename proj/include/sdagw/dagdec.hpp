#pragma once

#include <algorithm>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "digraph.hpp"
#include "separation.hpp"

namespace sdagw {

// A DAG whose nodes carry bags of vertices of some digraph.
class DagDecomposition {
public:
    DagDecomposition() = default;
    explicit DagDecomposition(int universe) : n_(universe) {}

    int universe() const { return n_; }
    int node_count() const { return static_cast<int>(bags_.size()); }

    int add_node(VertexSet bag) {
        if (bag.capacity() != n_) throw InputError("bag capacity does not match the universe");
        bags_.push_back(std::move(bag));
        kids_.emplace_back();
        parents_.emplace_back();
        return node_count() - 1;
    }
    void add_arc(int t, int c) {
        check(t);
        check(c);
        if (t == c) throw InputError("arc from a node to itself");
        auto& k = kids_[static_cast<std::size_t>(t)];
        if (std::find(k.begin(), k.end(), c) != k.end()) throw InputError("duplicate arc");
        k.push_back(c);
        parents_[static_cast<std::size_t>(c)].push_back(t);
    }

    const VertexSet& bag(int t) const { return bags_[static_cast<std::size_t>(t)]; }
    const std::vector<int>& children(int t) const { return kids_[static_cast<std::size_t>(t)]; }
    const std::vector<int>& parents(int t) const { return parents_[static_cast<std::size_t>(t)]; }

    std::vector<int> sources() const {
        std::vector<int> s;
        for (int t = 0; t < node_count(); ++t)
            if (parents(t).empty()) s.push_back(t);
        return s;
    }

    // Children before parents; empty if the arcs contain a cycle.
    std::vector<int> bottom_up_order() const {
        std::vector<int> out_left(static_cast<std::size_t>(node_count()));
        std::vector<int> ready, order;
        for (int t = 0; t < node_count(); ++t) {
            out_left[static_cast<std::size_t>(t)] = static_cast<int>(children(t).size());
            if (children(t).empty()) ready.push_back(t);
        }
        while (!ready.empty()) {
            int t = ready.back();
            ready.pop_back();
            order.push_back(t);
            for (int p : parents(t))
                if (--out_left[static_cast<std::size_t>(p)] == 0) ready.push_back(p);
        }
        if (static_cast<int>(order.size()) != node_count()) order.clear();
        return order;
    }

    // X_{⪰t} for every node.
    std::vector<VertexSet> below() const {
        std::vector<VertexSet> b(static_cast<std::size_t>(node_count()));
        for (int t : bottom_up_order()) {
            VertexSet s = bag(t);
            for (int c : children(t)) s |= b[static_cast<std::size_t>(c)];
            b[static_cast<std::size_t>(t)] = std::move(s);
        }
        return b;
    }

    // V_t = X_{⪰t} \ X_t.
    VertexSet region(int t, const std::vector<VertexSet>& below_sets) const { return below_sets[static_cast<std::size_t>(t)] - bag(t); }

    int width() const {
        int w = 0;
        for (const auto& b : bags_) w = std::max(w, b.size());
        return w;
    }

private:
    void check(int t) const {
        if (t < 0 || t >= node_count()) throw InputError("node " + std::to_string(t) + " out of range");
    }
    int n_ = 0;
    std::vector<VertexSet> bags_;
    std::vector<std::vector<int>> kids_;
    std::vector<std::vector<int>> parents_;
};

inline nlohmann::json dagdec_to_json(const DagDecomposition& dd) {
    nlohmann::json nodes = nlohmann::json::array(), arcs = nlohmann::json::array();
    for (int t = 0; t < dd.node_count(); ++t) {
        nodes.push_back({{"id", t}, {"bag", set_to_json(dd.bag(t))}});
        for (int c : dd.children(t)) arcs.push_back({t, c});
    }
    return {{"nodes", nodes}, {"arcs", arcs}};
}

inline DagDecomposition dagdec_from_json(const nlohmann::json& j, int universe) {
    DagDecomposition dd(universe);
    const auto& nodes = j.at("nodes");
    for (std::size_t i = 0; i < nodes.size(); ++i) {
        if (nodes[i].contains("id") && nodes[i].at("id").get<int>() != static_cast<int>(i))
            throw InputError("decomposition nodes must be listed with ids 0.." + std::to_string(nodes.size() - 1));
        dd.add_node(set_from_json(nodes[i].at("bag"), universe));
    }
    for (const auto& a : j.at("arcs")) dd.add_arc(a.at(0).get<int>(), a.at(1).get<int>());
    return dd;
}

struct DagDecReport {
    bool acyclic = true;
    bool cover = true;         // D1
    bool connectivity = true;  // D2
    bool guarding = true;      // D3
    std::vector<std::string> witnesses;
    bool valid() const { return acyclic && cover && connectivity && guarding; }
};

// Vertices of w with an edge leaving w that does not end in s.
inline std::optional<std::pair<Vertex, Vertex>> unguarded_edge(const Digraph& d, const VertexSet& w, const VertexSet& s) {
    std::optional<std::pair<Vertex, Vertex>> bad;
    w.for_each([&](Vertex u) {
        if (bad) return;
        VertexSet out = d.out(u) - w - s;
        if (!out.empty()) bad = std::make_pair(u, out.first());
    });
    return bad;
}

inline DagDecReport validate_dagdec(const Digraph& d, const DagDecomposition& dd) {
    DagDecReport r;
    const int n = d.vertex_count();
    if (dd.universe() != n) {
        r.cover = false;
        r.witnesses.push_back("decomposition universe " + std::to_string(dd.universe()) + " differs from |V| = " + std::to_string(n));
        return r;
    }
    auto order = dd.bottom_up_order();
    if (order.empty() && dd.node_count() > 0) {
        r.acyclic = false;
        r.witnesses.push_back("arcs contain a cycle");
        return r;
    }
    VertexSet all(n);
    for (int t = 0; t < dd.node_count(); ++t) all |= dd.bag(t);
    if (!(all == d.all())) {
        r.cover = false;
        r.witnesses.push_back("D1: vertex " + std::to_string((d.all() - all).first()) + " is in no bag");
    }

    // desc[t]: nodes reachable from t, t included.
    const int m = dd.node_count();
    std::vector<std::vector<bool>> desc(static_cast<std::size_t>(m), std::vector<bool>(static_cast<std::size_t>(m), false));
    for (int t : order) {
        auto& row = desc[static_cast<std::size_t>(t)];
        row[static_cast<std::size_t>(t)] = true;
        for (int c : dd.children(t))
            for (int x = 0; x < m; ++x)
                if (desc[static_cast<std::size_t>(c)][static_cast<std::size_t>(x)]) row[static_cast<std::size_t>(x)] = true;
    }
    for (int t = 0; t < m && r.connectivity; ++t)
        for (int t1 = 0; t1 < m && r.connectivity; ++t1) {
            if (!desc[static_cast<std::size_t>(t)][static_cast<std::size_t>(t1)]) continue;
            for (int t2 = 0; t2 < m; ++t2) {
                if (!desc[static_cast<std::size_t>(t1)][static_cast<std::size_t>(t2)]) continue;
                VertexSet miss = (dd.bag(t) & dd.bag(t2)) - dd.bag(t1);
                if (!miss.empty()) {
                    r.connectivity = false;
                    r.witnesses.push_back("D2: vertex " + std::to_string(miss.first()) + " is in bags " + std::to_string(t) + " and " +
                                          std::to_string(t2) + " but not in " + std::to_string(t1));
                    break;
                }
            }
        }

    auto below = dd.below();
    for (int s : dd.sources())
        if (auto e = unguarded_edge(d, below[static_cast<std::size_t>(s)], VertexSet(n))) {
            r.guarding = false;
            r.witnesses.push_back("D3: edge " + std::to_string(e->first) + "->" + std::to_string(e->second) + " leaves the part below source " +
                                  std::to_string(s));
        }
    for (int t = 0; t < m; ++t)
        for (int c : dd.children(t)) {
            VertexSet w = below[static_cast<std::size_t>(c)] - dd.bag(t);
            if (auto e = unguarded_edge(d, w, dd.bag(t) & dd.bag(c))) {
                r.guarding = false;
                r.witnesses.push_back("D3: edge " + std::to_string(e->first) + "->" + std::to_string(e->second) + " escapes arc (" +
                                      std::to_string(t) + "," + std::to_string(c) + ")");
            }
        }
    return r;
}

struct NiceDagDecReport {
    bool single_source = true;  // N1
    bool binary = true;         // N2
    bool equal_split = true;    // N3
    bool unit_steps = true;     // N4
    std::vector<std::string> witnesses;
    bool nice() const { return single_source && binary && equal_split && unit_steps; }
};

inline NiceDagDecReport validate_nice_dagdec(const DagDecomposition& dd) {
    NiceDagDecReport r;
    if (dd.sources().size() != 1) {
        r.single_source = false;
        r.witnesses.push_back("N1: " + std::to_string(dd.sources().size()) + " sources");
    }
    for (int t = 0; t < dd.node_count(); ++t) {
        const auto& k = dd.children(t);
        if (k.size() > 2) {
            r.binary = false;
            r.witnesses.push_back("N2: node " + std::to_string(t) + " has " + std::to_string(k.size()) + " children");
        } else if (k.size() == 2) {
            for (int c : k)
                if (!(dd.bag(c) == dd.bag(t))) {
                    r.equal_split = false;
                    r.witnesses.push_back("N3: split node " + std::to_string(t) + " and child " + std::to_string(c) + " have different bags");
                }
        } else if (k.size() == 1 && (dd.bag(t) ^ dd.bag(k[0])).size() != 1) {
            r.unit_steps = false;
            r.witnesses.push_back("N4: arc (" + std::to_string(t) + "," + std::to_string(k[0]) + ") changes " +
                                  std::to_string((dd.bag(t) ^ dd.bag(k[0])).size()) + " vertices");
        }
    }
    return r;
}

struct NiceDagDec {
    DagDecomposition dd;
    std::vector<int> image;  // old node -> node of dd with the same bag and X_{⪰t}
};

namespace dagdec_detail {

// Hangs a chain under a parent with bag `top` that reaches `target` by
// removing, then adding, one vertex per arc. Returns the node to attach.
inline int chain_to(DagDecomposition& out, const VertexSet& top, int target) {
    const VertexSet bottom = out.bag(target);
    std::vector<VertexSet> states;
    VertexSet cur = top;
    for (Vertex v : (top - bottom).to_vector()) {
        cur.erase(v);
        states.push_back(cur);
    }
    for (Vertex v : (bottom - top).to_vector()) {
        cur.insert(v);
        states.push_back(cur);
    }
    if (!states.empty()) states.pop_back();
    int next = target;
    for (auto it = states.rbegin(); it != states.rend(); ++it) {
        int t = out.add_node(*it);
        out.add_arc(t, next);
        next = t;
    }
    return next;
}

// Hangs a binary tree of split nodes with bag `bag` under `root`, one leaf
// port per target.
inline void split_tree(DagDecomposition& out, const VertexSet& bag, const std::vector<int>& targets, int root) {
    std::vector<int> level;
    for (int c : targets) {
        if (out.bag(c) == bag) {
            level.push_back(c);
            continue;
        }
        int port = out.add_node(bag);
        out.add_arc(port, chain_to(out, bag, c));
        level.push_back(port);
    }
    while (level.size() > 2) {
        std::vector<int> next;
        for (std::size_t i = 0; i + 1 < level.size(); i += 2) {
            int p = out.add_node(bag);
            out.add_arc(p, level[i]);
            out.add_arc(p, level[i + 1]);
            next.push_back(p);
        }
        if (level.size() % 2) next.push_back(level.back());
        level = std::move(next);
    }
    for (int c : level) out.add_arc(root, c);
}

}  // namespace dagdec_detail

// Rewrites a valid DAG decomposition into a nice one over the same digraph:
// one source, at most two children, equal bags at splits and single-vertex
// bag changes along unary arcs.
inline NiceDagDec nicefy_dagdec(const Digraph& d, const DagDecomposition& in) {
    using namespace dagdec_detail;
    DagDecReport rep = validate_dagdec(d, in);
    if (!rep.valid()) throw InputError("nicefy_dagdec: invalid input: " + rep.witnesses.at(0));
    if (in.node_count() == 0) throw InputError("nicefy_dagdec: empty decomposition");

    NiceDagDec res{DagDecomposition(in.universe()), std::vector<int>(static_cast<std::size_t>(in.node_count()), -1)};
    DagDecomposition& out = res.dd;
    for (int t : in.bottom_up_order()) {
        std::vector<int> kids;
        for (int c : in.children(t)) {
            int img = res.image[static_cast<std::size_t>(c)];
            if (std::find(kids.begin(), kids.end(), img) == kids.end()) kids.push_back(img);
        }
        std::sort(kids.begin(), kids.end());
        if (kids.size() == 1 && out.bag(kids[0]) == in.bag(t)) {
            res.image[static_cast<std::size_t>(t)] = kids[0];
            continue;
        }
        int node = out.add_node(in.bag(t));
        res.image[static_cast<std::size_t>(t)] = node;
        if (kids.size() == 1) {
            out.add_arc(node, chain_to(out, in.bag(t), kids[0]));
        } else if (kids.size() >= 2) {
            split_tree(out, in.bag(t), kids, node);
        }
    }

    std::vector<int> roots = out.sources();
    if (roots.size() > 1) {
        VertexSet empty(in.universe());
        int top = out.add_node(empty);
        split_tree(out, empty, roots, top);
    }

    DagDecReport after = validate_dagdec(d, out);
    if (!after.valid()) throw std::logic_error("nicefy_dagdec produced an invalid decomposition: " + after.witnesses.at(0));
    NiceDagDecReport nice = validate_nice_dagdec(out);
    if (!nice.nice()) throw std::logic_error("nicefy_dagdec output is not nice: " + nice.witnesses.at(0));
    return res;
}

}  // namespace sdagw
