#pragma once

#include <algorithm>
#include <climits>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "dagdec.hpp"
#include "game.hpp"
#include "parity.hpp"

namespace sdagw {

// One memoryless Even strategy on a region, seen through its results: entry i
// is the result for start region[i].
using Profile = std::vector<ResultSet>;

struct ProfileSet {
    std::vector<Vertex> region;  // sorted
    std::set<Profile> profiles;

    static ProfileSet empty_region() {
        ProfileSet ps;
        ps.profiles.insert(Profile{});
        return ps;
    }
    Frontier project() const {
        Frontier fr;
        for (const Profile& pr : profiles)
            for (std::size_t i = 0; i < region.size(); ++i) fr.add(region[i], pr[i]);
        return fr;
    }
};

inline constexpr std::uint64_t default_engine_budget = 50'000'000;

// Every memoryless result vector on `region`, by brute force.
inline ProfileSet profile_oracle(const ParityGame& p, const VertexSet& region, const VertexSet& exits, std::uint64_t budget = default_oracle_budget) {
    ProfileSet ps;
    ps.region = region.to_vector();
    for_each_even_strategy(p, region, exits, budget, [&](const EvenStrategy& f) {
        Profile pr;
        for (Vertex v : ps.region) pr.push_back(restricted_result(p, region, f, v));
        ps.profiles.insert(std::move(pr));
    });
    return ps;
}

namespace frontier_detail {

inline int index_in(const std::vector<Vertex>& sorted, Vertex w) {
    auto it = std::lower_bound(sorted.begin(), sorted.end(), w);
    return it != sorted.end() && *it == w ? static_cast<int>(it - sorted.begin()) : -1;
}

// Plays of the expanded region V_t1 ∪ {v}: segments inside V_t1 resolved by
// the assigned results, joined at v.
struct Arena {
    const ParityGame* p = nullptr;
    Vertex v = -1;
    const std::vector<Vertex>* region = nullptr;
    std::vector<const ResultSet*> seg;
    std::vector<Vertex> v_moves;
};

// Result of the arena for start region[start], or for v when start < 0.
inline ResultSet evaluate(const Arena& a, int start) {
    const int r = static_cast<int>(a.region->size());
    const int top = a.p->max_priority() + 1;  // stands for "no priority yet"
    auto slot = [&](int node, int m) { return static_cast<std::size_t>(node) * static_cast<std::size_t>(top + 1) + static_cast<std::size_t>(m); };
    std::vector<bool> seen(static_cast<std::size_t>(r + 1) * static_cast<std::size_t>(top + 1), false);
    std::vector<std::pair<int, int>> work;
    auto push = [&](int node, int m) {
        if (!seen[slot(node, m)]) {
            seen[slot(node, m)] = true;
            work.emplace_back(node, m);
        }
    };
    std::map<Vertex, int> exits;
    auto exit_at = [&](Vertex w, int m) {
        auto [it, fresh] = exits.emplace(w, m);
        if (!fresh) it->second = priority_min(it->second, m);
    };
    bool odd = false, at_v = false;
    if (start < 0)
        push(r, a.p->prio(a.v));
    else
        push(start, top);
    while (!work.empty() && !odd) {
        auto [node, m] = work.back();
        work.pop_back();
        if (node == r) {
            at_v = true;
            for (Vertex y : a.v_moves) {
                int iy = index_in(*a.region, y);
                if (iy >= 0)
                    push(iy, m);
                else
                    exit_at(y, std::min(m, a.p->prio(y)));
            }
            continue;
        }
        for (const Outcome& o : *a.seg[static_cast<std::size_t>(node)]) {
            if (o.kind == Outcome::Kind::WinOdd) odd = true;
            if (!o.is_exit()) continue;
            int m2 = std::min(m, o.p);
            if (o.v == a.v)
                push(r, m2);
            else
                exit_at(o.v, m2);
        }
    }
    if (!odd && at_v)
        for (Vertex y : a.v_moves) {
            int iy = index_in(*a.region, y);
            if (iy < 0) continue;
            for (const Outcome& o : *a.seg[static_cast<std::size_t>(iy)])
                if (o.is_exit() && o.v == a.v && o.p % 2) odd = true;
        }
    if (odd) return {Outcome::win_odd()};
    if (exits.empty()) return {Outcome::win_even()};
    ResultSet res;
    for (auto [w, m] : exits) res.push_back(Outcome::exit(w, m));
    return res;
}

// Successor sets Even or Odd may use at v: one per Even choice, or all at once.
inline std::vector<std::vector<Vertex>> move_options(const ParityGame& p, Vertex v, const std::vector<Vertex>& region, const VertexSet& bag_t0) {
    std::vector<Vertex> succ = p.graph.out(v).to_vector();
    for (Vertex y : succ)
        if (index_in(region, y) < 0 && !bag_t0.contains(y))
            throw std::logic_error("expand: edge " + std::to_string(v) + "->" + std::to_string(y) + " leaves region and bag");
    if (succ.empty()) throw std::logic_error("expand: vertex " + std::to_string(v) + " has no successor");
    if (!p.is_even(v)) return {succ};
    std::vector<std::vector<Vertex>> out;
    for (Vertex y : succ) out.push_back({y});
    return out;
}

inline void check_exits(const ResultSet& r, Vertex v, const VertexSet& bag_t0) {
    for (const Outcome& o : r)
        if (o.is_exit() && o.v != v && !bag_t0.contains(o.v))
            throw std::logic_error("expand: child result exits at " + std::to_string(o.v) + " outside the bag");
}

}  // namespace frontier_detail

// ---------------------------------------------------------------------------
// Exact profile mode

inline ProfileSet profile_step_expand(const ParityGame& p, const ProfileSet& ps, Vertex v, const VertexSet& bag_t0,
                                      std::uint64_t budget = default_engine_budget) {
    using namespace frontier_detail;
    if (index_in(ps.region, v) >= 0) throw std::logic_error("expand: vertex already in the region");
    ProfileSet out;
    out.region = ps.region;
    out.region.insert(std::upper_bound(out.region.begin(), out.region.end(), v), v);
    const std::size_t pos_v = static_cast<std::size_t>(index_in(out.region, v));
    auto options = move_options(p, v, ps.region, bag_t0);
    if (ps.profiles.size() * options.size() > budget) throw ResourceError("profile expansion exceeds the engine budget");
    Arena a;
    a.p = &p;
    a.v = v;
    a.region = &ps.region;
    for (const Profile& pr : ps.profiles) {
        a.seg.clear();
        for (const ResultSet& r : pr) {
            check_exits(r, v, bag_t0);
            a.seg.push_back(&r);
        }
        for (const auto& moves : options) {
            a.v_moves = moves;
            Profile next;
            next.reserve(out.region.size());
            for (std::size_t i = 0; i < ps.region.size(); ++i) {
                if (i == pos_v) next.push_back(evaluate(a, -1));
                next.push_back(evaluate(a, static_cast<int>(i)));
            }
            if (pos_v == ps.region.size()) next.push_back(evaluate(a, -1));
            out.profiles.insert(std::move(next));
        }
    }
    return out;
}

// Child regions must be disjoint: plays from either side never enter the other.
inline ProfileSet profile_step_split(const ProfileSet& a, const ProfileSet& b, std::uint64_t budget = default_engine_budget) {
    std::vector<Vertex> both;
    std::set_intersection(a.region.begin(), a.region.end(), b.region.begin(), b.region.end(), std::back_inserter(both));
    if (!both.empty()) throw std::invalid_argument("profile split needs disjoint child regions");
    if (a.profiles.size() * b.profiles.size() > budget) throw ResourceError("profile split exceeds the engine budget");
    ProfileSet out;
    std::merge(a.region.begin(), a.region.end(), b.region.begin(), b.region.end(), std::back_inserter(out.region));
    for (const Profile& x : a.profiles)
        for (const Profile& y : b.profiles) {
            Profile z;
            z.reserve(out.region.size());
            std::size_t i = 0, j = 0;
            while (i < x.size() || j < y.size()) {
                if (j == y.size() || (i < x.size() && a.region[i] < b.region[j]))
                    z.push_back(x[i++]);
                else
                    z.push_back(y[j++]);
            }
            out.profiles.insert(std::move(z));
        }
    return out;
}

// ---------------------------------------------------------------------------
// Tuple mode

// Introduce keeps the region: X_t0 = X_t1 ∪ {v} and v is not below t1.
inline Frontier frontier_step_introduce(const Frontier& fr) { return fr; }

inline Frontier frontier_step_expand(const ParityGame& p, const Frontier& fr, Vertex v, const VertexSet& bag_t0,
                                     FrontierFilter filter = FrontierFilter::Hoare, std::uint64_t budget = default_engine_budget) {
    using namespace frontier_detail;
    if (fr.at.count(v)) throw std::logic_error("expand: vertex already in the region");
    std::vector<Vertex> region;
    std::vector<const std::vector<ResultSet>*> lists;
    for (const auto& [u, rs] : fr.at) {
        region.push_back(u);
        lists.push_back(&rs);
        for (const ResultSet& r : rs) check_exits(r, v, bag_t0);
    }
    auto options = move_options(p, v, region, bag_t0);
    std::uint64_t work = 0;
    Arena a;
    a.p = &p;
    a.v = v;
    a.region = &region;
    a.seg.assign(region.size(), nullptr);
    Frontier out;

    // Every assignment of one tuple per segment start in `starts`, with
    // `fixed` (if any) pinned to its given result.
    auto for_assignments = [&](const std::vector<int>& starts, int fixed, const ResultSet* fixed_r, auto&& fn) {
        std::vector<int> free;
        for (int s : starts)
            if (s != fixed && std::find(free.begin(), free.end(), s) == free.end()) free.push_back(s);
        if (fixed >= 0) a.seg[static_cast<std::size_t>(fixed)] = fixed_r;
        std::vector<std::size_t> pick(free.size(), 0);
        while (true) {
            for (std::size_t i = 0; i < free.size(); ++i)
                a.seg[static_cast<std::size_t>(free[i])] = &(*lists[static_cast<std::size_t>(free[i])])[pick[i]];
            if (++work > budget) throw ResourceError("frontier expansion exceeds the engine budget");
            fn();
            std::size_t i = 0;
            while (i < free.size() && ++pick[i] == lists[static_cast<std::size_t>(free[i])]->size()) pick[i++] = 0;
            if (i == free.size()) break;
        }
    };
    auto targets = [&](const std::vector<Vertex>& moves) {
        std::vector<int> t;
        for (Vertex y : moves)
            if (int iy = index_in(region, y); iy >= 0) t.push_back(iy);
        return t;
    };

    for (const auto& moves : options) {
        a.v_moves = moves;
        std::vector<int> tg = targets(moves);
        for_assignments(tg, -1, nullptr, [&] { out.add(v, evaluate(a, -1)); });
    }
    for (std::size_t x = 0; x < region.size(); ++x) {
        for (const ResultSet& rx : *lists[x]) {
            bool meets_v = std::any_of(rx.begin(), rx.end(), [&](const Outcome& o) { return o.is_exit() && o.v == v; });
            if (!meets_v) {
                out.add(region[x], rx);
                continue;
            }
            for (const auto& moves : options) {
                a.v_moves = moves;
                std::vector<int> tg = targets(moves);
                for_assignments(tg, static_cast<int>(x), &rx, [&] { out.add(region[x], evaluate(a, static_cast<int>(x))); });
            }
        }
    }
    return filter_frontier(out, filter);
}

inline Frontier frontier_step_split(const Frontier& a, const Frontier& b, FrontierFilter filter = FrontierFilter::Hoare) {
    Frontier out = a;
    for (const auto& [v, rs] : b.at)
        for (const auto& r : rs) out.add(v, r);
    return filter_frontier(out, filter);
}

// ---------------------------------------------------------------------------
// Propagation over nice decompositions

namespace frontier_detail {

// The vertex an arc (t0,t1) of a nice decomposition forgets (expand) or
// introduces, or -1 for an equal-bag split arc.
struct ArcStep {
    bool expand = false;
    Vertex v = -1;
};

inline ArcStep arc_step(const DagDecomposition& dd, int t0, int t1) {
    const VertexSet& b0 = dd.bag(t0);
    const VertexSet& b1 = dd.bag(t1);
    VertexSet diff = b0 ^ b1;
    if (diff.empty()) return {};
    if (diff.size() != 1) throw std::invalid_argument("propagation needs a nice decomposition");
    Vertex v = diff.first();
    return {b1.contains(v), v};
}

}  // namespace frontier_detail

// Exact profiles at every node reachable from `target`, computed from sinks.
inline std::map<int, ProfileSet> propagate_profiles(const ParityGame& p, const DagDecomposition& dd, std::uint64_t budget = default_engine_budget) {
    using namespace frontier_detail;
    std::map<int, ProfileSet> at;
    for (int t : dd.bottom_up_order()) {
        const auto& kids = dd.children(t);
        if (kids.empty()) {
            at[t] = ProfileSet::empty_region();
        } else if (kids.size() == 1) {
            ArcStep s = arc_step(dd, t, kids[0]);
            at[t] = s.expand ? profile_step_expand(p, at.at(kids[0]), s.v, dd.bag(t), budget) : at.at(kids[0]);
        } else if (kids.size() == 2) {
            if (!(dd.bag(kids[0]) == dd.bag(t)) || !(dd.bag(kids[1]) == dd.bag(t))) throw std::invalid_argument("propagation needs a nice decomposition");
            at[t] = profile_step_split(at.at(kids[0]), at.at(kids[1]), budget);
        } else {
            throw std::invalid_argument("propagation needs a nice decomposition");
        }
    }
    return at;
}

namespace frontier_detail {

// Bottom-up evaluation of `target`; nodes listed in `seeds` are not descended into.
template <class State, class Unary, class Binary>
State propagate_to(const DagDecomposition& dd, const std::map<int, State>& seeds, int target, const State& leaf, Unary unary, Binary binary) {
    std::map<int, State> at;
    std::vector<std::pair<int, bool>> work{{target, false}};
    while (!work.empty()) {
        auto [t, ready] = work.back();
        work.pop_back();
        if (at.count(t)) continue;
        if (auto it = seeds.find(t); it != seeds.end()) {
            at[t] = it->second;
            continue;
        }
        const auto& kids = dd.children(t);
        if (!ready) {
            work.emplace_back(t, true);
            for (int c : kids)
                if (!at.count(c)) work.emplace_back(c, false);
            continue;
        }
        if (kids.empty()) {
            at[t] = leaf;
        } else if (kids.size() == 1) {
            at[t] = unary(arc_step(dd, t, kids[0]), dd.bag(t), at.at(kids[0]));
        } else if (kids.size() == 2) {
            if (!(dd.bag(kids[0]) == dd.bag(t)) || !(dd.bag(kids[1]) == dd.bag(t))) throw std::invalid_argument("propagation needs a nice decomposition");
            at[t] = binary(at.at(kids[0]), at.at(kids[1]));
        } else {
            throw std::invalid_argument("propagation needs a nice decomposition");
        }
    }
    return at.at(target);
}

}  // namespace frontier_detail

// Exact profiles at `target`, starting from the given seeds and from empty sinks.
inline ProfileSet propagate_profiles_to(const ParityGame& p, const DagDecomposition& dd, const std::map<int, ProfileSet>& seeds, int target,
                                        std::uint64_t budget = default_engine_budget) {
    using namespace frontier_detail;
    return propagate_to<ProfileSet>(
        dd, seeds, target, ProfileSet::empty_region(),
        [&](const ArcStep& s, const VertexSet& bag, const ProfileSet& in) { return s.expand ? profile_step_expand(p, in, s.v, bag, budget) : in; },
        [&](const ProfileSet& a, const ProfileSet& b) { return profile_step_split(a, b, budget); });
}

// Tuple frontier at `target`; nodes listed in `seeds` are not descended into.
inline Frontier propagate_frontier(const ParityGame& p, const DagDecomposition& dd, const std::map<int, Frontier>& seeds, int target,
                                   FrontierFilter filter, std::uint64_t budget = default_engine_budget) {
    using namespace frontier_detail;
    return propagate_to<Frontier>(
        dd, seeds, target, Frontier{},
        [&](const ArcStep& s, const VertexSet& bag, const Frontier& in) {
            return s.expand ? frontier_step_expand(p, in, s.v, bag, filter, budget) : frontier_step_introduce(in);
        },
        [&](const Frontier& a, const Frontier& b) { return frontier_step_split(a, b, filter); });
}

}  // namespace sdagw
