#pragma once

#include <algorithm>
#include <map>
#include <optional>
#include <stdexcept>
#include <utility>
#include <vector>

#include "bridge.hpp"
#include "dagdec.hpp"
#include "frontier.hpp"
#include "parity.hpp"

namespace sdagw {

// Bags and below-sets of an S-DAG, computed once per solve.
struct SDagView {
    const SDag* s = nullptr;
    SDagDerived der;
    std::vector<VertexSet> below;  // X_⪰t

    const VertexSet& bag(int t) const { return der.bag_of(t); }
    const VertexSet& below_of(int t) const { return below[static_cast<std::size_t>(t)]; }
    VertexSet region(int t) const { return below_of(t) - bag(t); }
    std::vector<int> children(int t) const {
        auto c = s->children(t);
        std::sort(c.begin(), c.end());
        return c;
    }
};

inline SDagView view_sdag(const SDag& s) {
    SDagView v;
    v.s = &s;
    v.der = derive(s);
    auto order = s.topo_order();
    if (static_cast<int>(order.size()) != s.node_count()) throw InputError("S-DAG is not acyclic");
    v.below.assign(static_cast<std::size_t>(s.node_count()), VertexSet(s.universe()));
    for (auto it = order.rbegin(); it != order.rend(); ++it) {
        VertexSet b = v.bag(*it);
        for (int c : s.children(*it)) b |= v.below_of(c);
        v.below[static_cast<std::size_t>(*it)] = std::move(b);
    }
    return v;
}

// ---------------------------------------------------------------------------
// Out-degree one

struct DegOneGadget {
    static constexpr int top = 0, d = 1, c = 2, c_bot = 3;
    DagDecomposition td;
    NiceDagDec nice;
};

inline DegOneGadget build_deg_one_gadget(const Digraph& g, const SDagView& view, int d) {
    auto kids = view.children(d);
    if (kids.size() != 1) throw std::invalid_argument("degree-one gadget needs exactly one child");
    const int c = kids[0];
    const int n = g.vertex_count();
    DegOneGadget gd;
    gd.td = DagDecomposition(n);
    gd.td.add_node(VertexSet::full(n) - view.region(d));
    gd.td.add_node(view.bag(d));
    gd.td.add_node(view.bag(c));
    gd.td.add_node(view.below_of(c));
    gd.td.add_arc(DegOneGadget::top, DegOneGadget::d);
    gd.td.add_arc(DegOneGadget::d, DegOneGadget::c);
    gd.td.add_arc(DegOneGadget::c, DegOneGadget::c_bot);
    gd.nice = nicefy_dagdec(g, gd.td);
    return gd;
}

inline Frontier frontier_deg_one(const ParityGame& p, const SDagView& view, int d, const Frontier& child, FrontierFilter filter = FrontierFilter::Hoare,
                                 std::uint64_t budget = default_engine_budget) {
    if (view.children(d).empty()) return {};
    DegOneGadget gd = build_deg_one_gadget(p.graph, view, d);
    const auto& img = gd.nice.image;
    std::map<int, Frontier> seeds{{img[DegOneGadget::c], child}};
    return filter_frontier(propagate_frontier(p, gd.nice.dd, seeds, img[DegOneGadget::d], filter, budget), filter);
}

inline ProfileSet profiles_deg_one(const ParityGame& p, const SDagView& view, int d, const ProfileSet& child, std::uint64_t budget = default_engine_budget) {
    if (view.children(d).empty()) return ProfileSet::empty_region();
    DegOneGadget gd = build_deg_one_gadget(p.graph, view, d);
    const auto& img = gd.nice.image;
    std::map<int, ProfileSet> seeds{{img[DegOneGadget::c], child}};
    return propagate_profiles_to(p, gd.nice.dd, seeds, img[DegOneGadget::d], budget);
}

// ---------------------------------------------------------------------------
// Two children

// Copy (v,0) of every separator vertex of botS(d), and (v,i) of every vertex
// below c_i outside bag(d).
struct BranchGadget {
    static constexpr int d_node = 0, d_bot = 1;
    int c1 = -1, c2 = -1;
    std::vector<std::pair<Vertex, int>> gamma;
    std::map<std::pair<Vertex, int>, Vertex> ids;
    ParityGame pprime;
    DagDecomposition tprime;
    NiceDagDec nice;

    static int c_node(int i) { return 1 + i; }
    static int c_below(int i) { return 3 + i; }
    int child(int i) const { return i == 1 ? c1 : c2; }
    Vertex copy(Vertex v, int idx) const {
        auto it = ids.find({v, idx});
        return it == ids.end() ? -1 : it->second;
    }
    int size() const { return static_cast<int>(gamma.size()); }
    VertexSet region() const {
        VertexSet r(size());
        for (Vertex x = 0; x < size(); ++x)
            if (gamma[static_cast<std::size_t>(x)].second != 0) r.insert(x);
        return r;
    }

    // True when a play below d' can visit both copies of one vertex; only then
    // may P' results exceed the memoryless results of P.
    bool copies_interact() const {
        const VertexSet inside = region();
        const VertexSet outside = VertexSet::full(size()) - inside;
        bool hit = false;
        inside.for_each([&](Vertex x) {
            if (hit) return;
            const VertexSet seen = reach(pprime.graph, outside, x);
            seen.for_each([&](Vertex y) {
                auto [v, i] = gamma[static_cast<std::size_t>(y)];
                if (i == 1 && copy(v, 2) >= 0 && seen.contains(copy(v, 2))) hit = true;
            });
        });
        return hit;
    }
};

inline BranchGadget build_branch_gadget(const ParityGame& p, const SDagView& view, int d) {
    auto kids = view.children(d);
    if (kids.size() != 2) throw std::invalid_argument("branch gadget needs exactly two children");
    BranchGadget gd;
    gd.c1 = kids[0];
    gd.c2 = kids[1];
    const VertexSet& bag = view.bag(d);
    const VertexSet sep0 = view.der.bot_sep(d).separator();
    auto add = [&](Vertex v, int idx) {
        gd.ids[{v, idx}] = gd.size();
        gd.gamma.emplace_back(v, idx);
    };
    sep0.for_each([&](Vertex v) { add(v, 0); });
    for (int i = 1; i <= 2; ++i) (view.below_of(gd.child(i)) - bag).for_each([&](Vertex v) { add(v, i); });

    const int m = gd.size();
    const VertexSet& scope = view.below_of(d);
    Digraph g(m);
    VertexSet even(m);
    std::vector<int> prio(static_cast<std::size_t>(m));
    for (Vertex x = 0; x < m; ++x) {
        auto [u, i] = gd.gamma[static_cast<std::size_t>(x)];
        if (p.is_even(u)) even.insert(x);
        prio[static_cast<std::size_t>(x)] = p.prio(u);
        VertexSet targets(m);
        (p.graph.out(u) & scope).for_each([&](Vertex v) {
            Vertex zero = gd.copy(v, 0);
            if (zero >= 0) targets.insert(zero);
            if (i == 0) {
                if (zero < 0)
                    for (int j = 1; j <= 2; ++j)
                        if (Vertex y = gd.copy(v, j); y >= 0) targets.insert(y);
                return;
            }
            if (Vertex y = gd.copy(v, i); y >= 0) targets.insert(y);
            if (view.bag(gd.child(i)).contains(u))
                if (Vertex y = gd.copy(v, 3 - i); y >= 0) targets.insert(y);
        });
        targets.for_each([&](Vertex y) { g.add_edge(x, y); });
    }
    gd.pprime = ParityGame(std::move(g), std::move(even), std::move(prio));

    auto lift = [&](const VertexSet& s, int idx) {
        VertexSet out(m);
        s.for_each([&](Vertex v) {
            if (Vertex y = gd.copy(v, idx); y >= 0) out.insert(y);
        });
        return out;
    };
    gd.tprime = DagDecomposition(m);
    VertexSet zero_all = lift(sep0, 0);
    gd.tprime.add_node(zero_all);
    gd.tprime.add_node(zero_all | lift(view.bag(gd.c1) - bag, 1) | lift(view.bag(gd.c2) - bag, 2));
    for (int i = 1; i <= 2; ++i) gd.tprime.add_node(lift(view.bag(gd.child(i)), i) | lift(view.bag(gd.child(i)), 0));
    for (int i = 1; i <= 2; ++i) {
        const VertexSet& b = view.below_of(gd.child(i));
        gd.tprime.add_node(lift(b - bag, i) | lift(b & bag, 0));
    }
    gd.tprime.add_arc(BranchGadget::d_node, BranchGadget::d_bot);
    for (int i = 1; i <= 2; ++i) {
        gd.tprime.add_arc(BranchGadget::d_bot, BranchGadget::c_node(i));
        gd.tprime.add_arc(BranchGadget::c_node(i), BranchGadget::c_below(i));
    }
    gd.nice = nicefy_dagdec(gd.pprime.graph, gd.tprime);
    return gd;
}

namespace structured_detail {

inline Vertex lift_exit(const BranchGadget& gd, Vertex w, int i) {
    Vertex y = gd.copy(w, 0);
    if (y < 0) y = gd.copy(w, i);
    if (y < 0) throw std::logic_error("branch gadget: exit " + std::to_string(w) + " has no copy");
    return y;
}

inline ResultSet map_result(const ResultSet& r, const std::function<Vertex(Vertex)>& f) {
    ResultSet out;
    for (const Outcome& o : r) out.push_back(o.is_exit() ? Outcome::exit(f(o.v), o.p) : o);
    return make_result(std::move(out));
}

inline Vertex lift_start(const BranchGadget& gd, Vertex v, int i) {
    Vertex y = gd.copy(v, i);
    if (y < 0) throw std::logic_error("branch gadget: start " + std::to_string(v) + " has no copy");
    return y;
}

inline Frontier lift_frontier(const BranchGadget& gd, const Frontier& fr, int i) {
    Frontier out;
    for (const auto& [v, rs] : fr.at)
        for (const auto& r : rs) out.add(lift_start(gd, v, i), map_result(r, [&](Vertex w) { return lift_exit(gd, w, i); }));
    return out;
}

inline ProfileSet lift_profiles(const BranchGadget& gd, const ProfileSet& ps, int i) {
    std::vector<std::pair<Vertex, std::size_t>> order;
    for (std::size_t k = 0; k < ps.region.size(); ++k) order.emplace_back(lift_start(gd, ps.region[k], i), k);
    std::sort(order.begin(), order.end());
    ProfileSet out;
    for (auto [y, k] : order) out.region.push_back(y);
    for (const Profile& pr : ps.profiles) {
        Profile q;
        for (auto [y, k] : order) q.push_back(map_result(pr[k], [&](Vertex w) { return lift_exit(gd, w, i); }));
        out.profiles.insert(std::move(q));
    }
    return out;
}

// Strips the indices; both copies of a vertex contribute their results.
inline Frontier drop_indices(const BranchGadget& gd, const Frontier& fr) {
    Frontier out;
    auto base = [&](Vertex y) {
        auto [w, idx] = gd.gamma[static_cast<std::size_t>(y)];
        if (idx != 0) throw std::logic_error("branch gadget: exit with a nonzero index");
        return w;
    };
    for (const auto& [y, rs] : fr.at)
        for (const auto& r : rs) out.add(gd.gamma[static_cast<std::size_t>(y)].first, map_result(r, base));
    return out;
}

}  // namespace structured_detail

inline Frontier frontier_branch(const ParityGame& p, const SDagView& view, int d, const Frontier& fr1, const Frontier& fr2,
                                FrontierFilter filter = FrontierFilter::Hoare, std::uint64_t budget = default_engine_budget) {
    using namespace structured_detail;
    BranchGadget gd = build_branch_gadget(p, view, d);
    const auto& img = gd.nice.image;
    std::map<int, Frontier> seeds{{img[BranchGadget::c_node(1)], lift_frontier(gd, fr1, 1)}, {img[BranchGadget::c_node(2)], lift_frontier(gd, fr2, 2)}};
    Frontier top = propagate_frontier(gd.pprime, gd.nice.dd, seeds, img[BranchGadget::d_node], filter, budget);
    return filter_frontier(drop_indices(gd, top), filter);
}

// Exact memoryless results of P' at d', with the indices stripped.
inline Frontier profiles_branch(const ParityGame& p, const SDagView& view, int d, const ProfileSet& ps1, const ProfileSet& ps2,
                                std::uint64_t budget = default_engine_budget) {
    using namespace structured_detail;
    BranchGadget gd = build_branch_gadget(p, view, d);
    const auto& img = gd.nice.image;
    std::map<int, ProfileSet> seeds{{img[BranchGadget::c_node(1)], lift_profiles(gd, ps1, 1)}, {img[BranchGadget::c_node(2)], lift_profiles(gd, ps2, 2)}};
    return drop_indices(gd, propagate_profiles_to(gd.pprime, gd.nice.dd, seeds, img[BranchGadget::d_node], budget).project());
}

// ---------------------------------------------------------------------------
// Solver

struct StructuredOptions {
    FrontierFilter filter = FrontierFilter::Smyth;
    std::uint64_t budget = default_engine_budget;
    bool keep_frontiers = false;
};

struct StructuredResult {
    bool found = false;
    int k = -1;
    std::vector<int> winner;  // 0 Even, 1 Odd
    SDag sdag;
    std::map<int, Frontier> frontiers;
    std::size_t max_frontier = 0;
};

inline StructuredResult solve_parity_structured(const ParityGame& p, int max_k, const StructuredOptions& opt = {}) {
    require_no_dead_ends(p);
    StructuredResult res;
    const int n = p.size();
    if (n == 0) {
        res.found = true;
        res.k = 0;
        return res;
    }
    WidthResult w = compute_sdag_width(p.graph, max_k, true);
    if (!w.found) return res;
    res.found = true;
    res.k = w.k;
    res.sdag = std::move(w.sdag);
    SDagView view = view_sdag(res.sdag);
    auto order = res.sdag.topo_order();
    std::map<int, Frontier> at;
    for (auto it = order.rbegin(); it != order.rend(); ++it) {
        const int t = *it;
        auto kids = view.children(t);
        Frontier fr;
        if (kids.size() == 1)
            fr = frontier_deg_one(p, view, t, at.at(kids[0]), opt.filter, opt.budget);
        else if (kids.size() == 2)
            fr = frontier_branch(p, view, t, at.at(kids[0]), at.at(kids[1]), opt.filter, opt.budget);
        else if (kids.size() > 2)
            throw std::logic_error("S-DAG node with more than two children");
        res.max_frontier = std::max(res.max_frontier, fr.tuple_count());
        at[t] = std::move(fr);
    }
    auto src = res.sdag.sources();
    if (src.size() != 1 || !view.bag(src[0]).empty() || view.below_of(src[0]) != VertexSet::full(n))
        throw std::logic_error("S-DAG source does not cover the game");
    const Frontier& top = at.at(src[0]);
    res.winner.assign(static_cast<std::size_t>(n), -1);
    for (Vertex v = 0; v < n; ++v) {
        auto f = top.at.find(v);
        if (f == top.at.end() || f->second.empty()) throw std::logic_error("source frontier misses vertex " + std::to_string(v));
        int w = 1;
        for (const ResultSet& r : f->second) {
            if (r == ResultSet{Outcome::win_even()})
                w = 0;
            else if (r != ResultSet{Outcome::win_odd()})
                throw std::logic_error("source frontier holds a finite result at vertex " + std::to_string(v));
        }
        res.winner[static_cast<std::size_t>(v)] = w;
    }
    if (opt.keep_frontiers) res.frontiers = std::move(at);
    return res;
}

}  // namespace sdagw
