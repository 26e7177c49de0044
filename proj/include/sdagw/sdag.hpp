#pragma once

#include <algorithm>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "separation.hpp"

namespace sdagw {

// A DAG of out-degree <= 2 whose arcs carry separations of an underlying digraph.
class SDag {
public:
    struct Arc {
        int from;
        int to;
        Separation sigma;
    };

    SDag() = default;
    explicit SDag(int universe) : n_(universe) {}

    int universe() const { return n_; }
    int node_count() const { return static_cast<int>(out_.size()); }
    int arc_count() const { return static_cast<int>(arcs_.size()); }

    int add_node() {
        out_.emplace_back();
        in_.emplace_back();
        return node_count() - 1;
    }

    int add_arc(int u, int v, Separation sigma) {
        check(u);
        check(v);
        arcs_.push_back({u, v, std::move(sigma)});
        int id = arc_count() - 1;
        out_[static_cast<std::size_t>(u)].push_back(id);
        in_[static_cast<std::size_t>(v)].push_back(id);
        return id;
    }

    const Arc& arc(int id) const { return arcs_[static_cast<std::size_t>(id)]; }
    void set_sigma(int id, Separation s) { arcs_[static_cast<std::size_t>(id)].sigma = std::move(s); }
    const std::vector<Arc>& arcs() const { return arcs_; }
    const std::vector<int>& out_arcs(int t) const { return out_[static_cast<std::size_t>(t)]; }
    const std::vector<int>& in_arcs(int t) const { return in_[static_cast<std::size_t>(t)]; }

    std::vector<int> children(int t) const {
        std::vector<int> c;
        for (int a : out_arcs(t)) c.push_back(arc(a).to);
        return c;
    }
    std::vector<int> parents(int t) const {
        std::vector<int> p;
        for (int a : in_arcs(t)) p.push_back(arc(a).from);
        return p;
    }
    std::optional<int> find_arc(int u, int v) const {
        for (int a : out_arcs(u))
            if (arc(a).to == v) return a;
        return std::nullopt;
    }

    std::vector<int> sources() const {
        std::vector<int> s;
        for (int t = 0; t < node_count(); ++t)
            if (in_arcs(t).empty()) s.push_back(t);
        return s;
    }

    // Keeps the marked nodes and arcs between kept nodes, renumbering densely in
    // the original order. `old_of_new` receives the original id of each node.
    SDag compact(const std::vector<bool>& keep_node, const std::vector<bool>& keep_arc,
                 std::vector<int>* old_of_new = nullptr) const {
        SDag out(n_);
        std::vector<int> nid(static_cast<std::size_t>(node_count()), -1);
        if (old_of_new) old_of_new->clear();
        for (int t = 0; t < node_count(); ++t)
            if (keep_node[static_cast<std::size_t>(t)]) {
                nid[static_cast<std::size_t>(t)] = out.add_node();
                if (old_of_new) old_of_new->push_back(t);
            }
        for (int a = 0; a < arc_count(); ++a) {
            const Arc& e = arc(a);
            if (!keep_arc[static_cast<std::size_t>(a)]) continue;
            int u = nid[static_cast<std::size_t>(e.from)], v = nid[static_cast<std::size_t>(e.to)];
            if (u >= 0 && v >= 0) out.add_arc(u, v, e.sigma);
        }
        return out;
    }

    // Node ids in topological order (ascending id among ready nodes); empty if cyclic.
    std::vector<int> topo_order() const {
        std::vector<int> indeg(static_cast<std::size_t>(node_count()));
        for (int t = 0; t < node_count(); ++t) indeg[static_cast<std::size_t>(t)] = static_cast<int>(in_arcs(t).size());
        std::vector<int> ready, order;
        for (int t = node_count() - 1; t >= 0; --t)
            if (indeg[static_cast<std::size_t>(t)] == 0) ready.push_back(t);
        std::make_heap(ready.begin(), ready.end(), std::greater<>());
        while (!ready.empty()) {
            std::pop_heap(ready.begin(), ready.end(), std::greater<>());
            int u = ready.back();
            ready.pop_back();
            order.push_back(u);
            for (int a : out_arcs(u))
                if (--indeg[static_cast<std::size_t>(arc(a).to)] == 0) {
                    ready.push_back(arc(a).to);
                    std::push_heap(ready.begin(), ready.end(), std::greater<>());
                }
        }
        if (static_cast<int>(order.size()) != node_count()) order.clear();
        return order;
    }

private:
    void check(int t) const {
        if (t < 0 || t >= node_count()) throw InputError("S-DAG node " + std::to_string(t) + " does not exist");
    }

    int n_ = 0;
    std::vector<Arc> arcs_;
    std::vector<std::vector<int>> out_;
    std::vector<std::vector<int>> in_;
};

// Top/bottom separations and bags of every node.
struct SDagDerived {
    std::vector<Separation> top;
    std::vector<Separation> bot;
    std::vector<VertexSet> bag;
    int width = 0;

    const Separation& top_sep(int t) const { return top[static_cast<std::size_t>(t)]; }
    const Separation& bot_sep(int t) const { return bot[static_cast<std::size_t>(t)]; }
    const VertexSet& bag_of(int t) const { return bag[static_cast<std::size_t>(t)]; }
};

inline SDagDerived derive(const SDag& s) {
    const int n = s.universe();
    SDagDerived d;
    d.top.reserve(static_cast<std::size_t>(s.node_count()));
    for (int t = 0; t < s.node_count(); ++t) {
        Separation top = Separation::minimum(n);
        if (!s.in_arcs(t).empty()) {
            top = s.arc(s.in_arcs(t).front()).sigma;
            for (int a : s.in_arcs(t)) top = join(top, s.arc(a).sigma);
        }
        d.top.push_back(std::move(top));
    }
    for (int t = 0; t < s.node_count(); ++t) {
        Separation bot = Separation::maximum(n);
        for (int a : s.out_arcs(t)) bot = meet(bot, d.top[static_cast<std::size_t>(s.arc(a).to)]);
        d.bag.push_back(bot.a() & d.top[static_cast<std::size_t>(t)].b());
        d.width = std::max(d.width, d.bag.back().size());
        d.bot.push_back(std::move(bot));
    }
    return d;
}

inline int width(const SDag& s) { return derive(s).width; }

struct SDagReport {
    bool acyclic = true;
    bool out_degree_ok = true;
    bool separations_ok = true;
    bool consistent = true;
    int width = 0;
    std::vector<std::string> problems;

    bool valid() const { return acyclic && out_degree_ok && separations_ok && consistent; }
};

inline SDagReport validate_sdag(const Digraph& d, const SDag& s) {
    SDagReport r;
    if (s.universe() != d.vertex_count()) {
        r.separations_ok = false;
        r.problems.push_back("S-DAG universe " + std::to_string(s.universe()) + " differs from |V(D)| = " +
                             std::to_string(d.vertex_count()));
        return r;
    }
    if (s.node_count() > 0 && s.topo_order().empty()) {
        r.acyclic = false;
        r.problems.push_back("arcs contain a directed cycle");
    }
    for (int t = 0; t < s.node_count(); ++t)
        if (s.out_arcs(t).size() > 2) {
            r.out_degree_ok = false;
            r.problems.push_back("node " + std::to_string(t) + " has " + std::to_string(s.out_arcs(t).size()) + " children");
        }
    for (int a = 0; a < s.arc_count(); ++a) {
        const auto& e = s.arc(a);
        if (auto why = separation_violation(d, e.sigma.a(), e.sigma.b())) {
            r.separations_ok = false;
            r.problems.push_back("arc " + std::to_string(e.from) + "->" + std::to_string(e.to) + ": " + *why);
        }
    }
    for (int t = 0; t < s.node_count(); ++t)
        for (int in : s.in_arcs(t))
            for (int out : s.out_arcs(t))
                if (!sep_leq(s.arc(in).sigma, s.arc(out).sigma)) {
                    r.consistent = false;
                    r.problems.push_back("consistency fails at " + std::to_string(s.arc(in).from) + "->" + std::to_string(t) +
                                         "->" + std::to_string(s.arc(out).to));
                }
    if (r.separations_ok) r.width = derive(s).width;
    return r;
}

struct NiceReport {
    bool n1 = true, n2 = true, n3 = true, n4 = true, n5 = true;
    std::vector<std::string> witnesses;
    bool nice() const { return n1 && n2 && n3 && n4 && n5; }
};

inline NiceReport validate_nice(const Digraph& d, const SDag& s) {
    (void)d;
    NiceReport r;
    SDagDerived der = derive(s);
    auto src = s.sources();
    if (src.size() != 1) {
        r.n1 = false;
        r.witnesses.push_back("N1: " + std::to_string(src.size()) + " sources");
    } else if (!der.bag_of(src[0]).empty()) {
        r.n1 = false;
        r.witnesses.push_back("N1: source " + std::to_string(src[0]) + " has bag " + der.bag_of(src[0]).to_string());
    }
    for (const auto& e : s.arcs())
        if (!(e.sigma == der.top_sep(e.to))) {
            r.n2 = false;
            r.witnesses.push_back("N2: arc " + std::to_string(e.from) + "->" + std::to_string(e.to));
        }
    for (int t = 0; t < s.node_count(); ++t) {
        auto ch = s.children(t);
        if (ch.size() == 1) {
            int diff = (der.bag_of(t) ^ der.bag_of(ch[0])).size();
            if (diff > 1) {
                r.n3 = false;
                r.witnesses.push_back("N3: node " + std::to_string(t) + " and child " + std::to_string(ch[0]) +
                                      " differ in " + std::to_string(diff) + " vertices");
            }
        } else if (ch.size() == 2) {
            for (int c : ch)
                if (!(der.top_sep(c) == der.bot_sep(c))) {
                    r.n4 = false;
                    r.witnesses.push_back("N4: child " + std::to_string(c) + " of " + std::to_string(t));
                }
            auto a0 = s.out_arcs(t)[0], a1 = s.out_arcs(t)[1];
            if (!crosses(s.arc(a0).sigma, s.arc(a1).sigma)) {
                r.n5 = false;
                r.witnesses.push_back("N5: children of " + std::to_string(t) + " are laminar");
            }
        }
    }
    return r;
}

// ---- serialization --------------------------------------------------------------

inline nlohmann::json sdag_to_json(const SDag& s) {
    nlohmann::json nodes = nlohmann::json::array();
    for (int t = 0; t < s.node_count(); ++t) nodes.push_back(t);
    nlohmann::json arcs = nlohmann::json::array();
    nlohmann::json sigma = nlohmann::json::object();
    for (const auto& e : s.arcs()) {
        arcs.push_back({e.from, e.to});
        sigma[std::to_string(e.from) + "->" + std::to_string(e.to)] = separation_to_json(e.sigma);
    }
    return {{"universe", s.universe()}, {"nodes", nodes}, {"arcs", arcs}, {"sigma", sigma}};
}

// Node ids in the file may be arbitrary integers; they are renumbered densely in
// ascending order.
inline SDag sdag_from_json(const nlohmann::json& j, int universe) {
    if (!j.is_object() || !j.contains("nodes") || !j.contains("arcs") || !j.contains("sigma"))
        throw InputError("S-DAG JSON needs 'nodes', 'arcs' and 'sigma'");
    if (j.contains("universe") && j.at("universe").get<int>() != universe)
        throw InputError("S-DAG JSON universe does not match the graph");
    std::vector<long long> ids;
    for (const auto& x : j.at("nodes")) ids.push_back(x.get<long long>());
    std::sort(ids.begin(), ids.end());
    if (std::adjacent_find(ids.begin(), ids.end()) != ids.end()) throw InputError("duplicate node id");
    std::map<long long, int> idx;
    SDag s(universe);
    for (long long id : ids) idx[id] = s.add_node();
    for (const auto& a : j.at("arcs")) {
        if (!a.is_array() || a.size() != 2) throw InputError("arc must be a pair [u,v]");
        long long u = a[0].get<long long>(), v = a[1].get<long long>();
        if (!idx.count(u) || !idx.count(v)) throw InputError("arc references an unknown node");
        std::string key = std::to_string(u) + "->" + std::to_string(v);
        if (!j.at("sigma").contains(key)) throw InputError("missing sigma for arc " + key);
        if (s.find_arc(idx[u], idx[v])) throw InputError("duplicate arc " + key);
        s.add_arc(idx[u], idx[v], separation_from_json(j.at("sigma").at(key), universe));
    }
    return s;
}

inline std::string sdag_to_dot(const SDag& s) {
    SDagDerived der = derive(s);
    std::ostringstream out;
    out << "digraph sdag {\n  node [shape=box];\n";
    for (int t = 0; t < s.node_count(); ++t)
        out << "  n" << t << " [label=\"" << t << " " << der.bag_of(t).to_string() << "\"];\n";
    for (const auto& e : s.arcs())
        out << "  n" << e.from << " -> n" << e.to << " [label=\"sep " << e.sigma.separator().to_string() << "\"];\n";
    out << "}\n";
    return out.str();
}

}  // namespace sdagw
