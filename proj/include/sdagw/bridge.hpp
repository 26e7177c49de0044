#pragma once

#include <deque>
#include <map>
#include <memory>
#include <optional>
#include <stdexcept>
#include <tuple>
#include <unordered_map>
#include <vector>

#include "game.hpp"
#include "nicefy.hpp"
#include "sdag.hpp"

namespace sdagw {

struct ChoiceKey {
    VertexSet x;
    VertexSet s;
    Vertex r;

    friend bool operator<(const ChoiceKey& a, const ChoiceKey& b) {
        return std::tie(a.r, a.x, a.s) < std::tie(b.r, b.x, b.s);
    }
    friend bool operator==(const ChoiceKey& a, const ChoiceKey& b) { return a.r == b.r && a.x == b.x && a.s == b.s; }
};

// Every state reachable by a play consistent with the strategy.
struct ConsistentStates {
    std::vector<GameState> cigs;
    std::vector<GameState> rigs;
};

inline ConsistentStates consistent_states(const SdagGame& game, const CopStrategy& st) {
    ConsistentStates out;
    std::unordered_map<GameState, bool, GameStateHash> seen;
    std::deque<GameState> work;
    auto push = [&](const GameState& s) {
        if (seen.emplace(s, true).second) work.push_back(s);
    };
    for (const GameState& s : game.starts()) push(s);
    while (!work.empty()) {
        GameState p = work.front();
        work.pop_front();
        if (p.is_cigs()) {
            out.cigs.push_back(p);
            if (const GameState* q = st.move(p)) push(*q);
            continue;
        }
        out.rigs.push_back(p);
        for (const RobberOption& o : game.robber_moves(p)) {
            if (p.kind == StateKind::Rigs1) {
                push(*o.next[0]);
                continue;
            }
            int j = st.reply(p, o.to);
            if (j) {
                if (o.next[j - 1]) push(*o.next[j - 1]);
            } else {
                for (const auto& nx : o.next)
                    if (nx) push(*nx);
            }
        }
    }
    return out;
}

// CC(X, S, r) for every key arising from a consistent RIGS.
inline std::map<ChoiceKey, VertexSet> cop_choice_sets(const SdagGame& game, const CopStrategy& st,
                                                      const ConsistentStates& cs) {
    std::map<ChoiceKey, VertexSet> cc;
    const int n = game.n();
    auto slot = [&](const VertexSet& x, const VertexSet& s, Vertex r) -> VertexSet& {
        return cc.try_emplace(ChoiceKey{x, s, r}, VertexSet(n)).first->second;
    };
    for (const GameState& p : cs.rigs) {
        const VertexSet& R = game.range(p);
        if (p.kind == StateKind::Rigs1) {
            slot(p.x, p.s1, p.r) |= R - p.s1;
            continue;
        }
        VertexSet& w1 = slot(p.x, p.s1, p.r);
        VertexSet& w2 = slot(p.x, p.s2, p.r);
        R.for_each([&](Vertex w) {
            int j = st.reply(p, w);
            if (j == 1) w1.insert(w);
            if (j == 2) w2.insert(w);
        });
    }
    return cc;
}

inline VertexSet cop_choice_set(const SdagGame& game, const CopStrategy& st, const VertexSet& x, const VertexSet& s,
                                Vertex r) {
    auto cs = consistent_states(game, st);
    auto all = cop_choice_sets(game, st, cs);
    auto it = all.find({x, s, r});
    if (it == all.end()) throw std::invalid_argument("cop_choice_set: key is not consistent with the strategy");
    return it->second;
}

// Labels of the leaves reachable from `node`, not searching past a leaf.
inline VertexSet leaf_reach(const SDag& s, int node, const std::map<int, Vertex>& leaves) {
    VertexSet out(s.universe());
    std::vector<int> stack{node};
    std::vector<bool> seen(static_cast<std::size_t>(s.node_count()), false);
    seen[static_cast<std::size_t>(node)] = true;
    while (!stack.empty()) {
        int u = stack.back();
        stack.pop_back();
        if (auto it = leaves.find(u); it != leaves.end()) {
            out.insert(it->second);
            continue;
        }
        for (int c : s.children(u))
            if (!seen[static_cast<std::size_t>(c)]) {
                seen[static_cast<std::size_t>(c)] = true;
                stack.push_back(c);
            }
    }
    return out;
}

// Strategy -> S-DAG: nodes t_{X,r} per consistent CIGS, c-nodes and cop-choice
// trees per RIGS, and a root tree over the start states.
inline SDag strategy_to_sdag(const SdagGame& game, const CopStrategy& st) {
    const Digraph& d = game.graph();
    const int n = d.vertex_count();
    SDag s(n);
    if (n == 0) {
        s.add_node();
        return s;
    }
    auto cs = consistent_states(game, st);
    for (const GameState& p : cs.cigs)
        if (!st.move(p)) throw std::invalid_argument("strategy_to_sdag: strategy undefined at " + p.to_string());
    for (const GameState& p : cs.rigs)
        if (p.kind == StateKind::Rigs2)
            for (const RobberOption& o : game.robber_moves(p))
                if (!st.reply(p, o.to)) throw std::invalid_argument("strategy_to_sdag: strategy is not complete");
    auto cc = cop_choice_sets(game, st, cs);

    std::unordered_map<GameState, int, GameStateHash> cig_node;
    for (const GameState& p : cs.cigs) cig_node.emplace(p, s.add_node());
    auto leaf = [&](const VertexSet& sep, Vertex w) {
        auto it = cig_node.find(GameState::cigs(sep, w));
        if (it == cig_node.end())
            throw std::logic_error("strategy_to_sdag: leaf state " + GameState::cigs(sep, w).to_string() + " is not consistent");
        return it->second;
    };

    // Balanced tree of height ceil(log2 m) over the leaves t_{sep,w}; arcs carry
    // range_sep(sep, leaf_reach(target)).
    auto build_tree = [&](const VertexSet& sep, const std::vector<Vertex>& labels, int root) {
        std::map<int, Vertex> leaves;
        for (Vertex w : labels) leaves.emplace(leaf(sep, w), w);
        std::vector<std::pair<int, int>> tree_arcs;
        auto rec = [&](auto&& self, std::size_t lo, std::size_t hi, int node) -> int {
            if (hi - lo == 1) return leaf(sep, labels[lo]);
            if (node < 0) node = s.add_node();
            std::size_t mid = lo + (hi - lo + 1) / 2;
            tree_arcs.emplace_back(node, self(self, lo, mid, -1));
            tree_arcs.emplace_back(node, self(self, mid, hi, -1));
            return node;
        };
        rec(rec, 0, labels.size(), root);
        for (auto [u, v] : tree_arcs) s.add_arc(u, v, Separation::minimum(n));
        for (int a = s.arc_count() - static_cast<int>(tree_arcs.size()); a < s.arc_count(); ++a)
            s.set_sigma(a, range_sep(d, sep, leaf_reach(s, s.arc(a).to, leaves)));
    };

    std::map<ChoiceKey, int> tree_root;
    auto root_of = [&](const ChoiceKey& key) {
        auto it = tree_root.find(key);
        if (it != tree_root.end()) return it->second;
        std::vector<Vertex> labels = cc.at(key).to_vector();
        int r = labels.size() == 1 ? leaf(key.s, labels[0]) : s.add_node();
        if (labels.size() >= 2) build_tree(key.s, labels, r);
        tree_root.emplace(key, r);
        return r;
    };

    std::map<ChoiceKey, int> c_node;
    for (const GameState& p : cs.cigs) {
        const GameState& q = *st.move(p);
        int tp = cig_node.at(p);
        if (q.kind == StateKind::Rigs1) {
            ChoiceKey key{q.x, q.s1, q.r};
            auto it = c_node.find(key);
            if (it == c_node.end()) {
                int c = s.add_node();
                s.add_arc(c, root_of(key), range_sep(d, q.s1, cc.at(key)));
                it = c_node.emplace(key, c).first;
            }
            s.add_arc(tp, it->second, range_sep(d, q.x, VertexSet::single(n, q.r)));
        } else {
            for (int j = 1; j <= 2; ++j) {
                ChoiceKey key{q.x, q.sep(j), q.r};
                s.add_arc(tp, root_of(key), range_sep(d, q.sep(j), cc.at(key)));
            }
        }
    }

    std::vector<Vertex> all(static_cast<std::size_t>(n));
    for (Vertex v = 0; v < n; ++v) all[static_cast<std::size_t>(v)] = v;
    if (n >= 2) build_tree(VertexSet(n), all, s.add_node());
    return s;
}

// Forward-facing node for a CIGS below node t: the least-id sink of the
// part of T reachable from t whose bottom sides contain the robber range.
struct ForwardFacing {
    std::unordered_map<GameState, int, GameStateHash> node;
};

namespace bridge_detail {

inline int forward_facing_sink(const SDag& s, const SDagDerived& der, int t, const VertexSet& range) {
    auto inside = [&](int w) { return range.subset_of(der.bot_sep(w).bottom()); };
    if (!inside(t)) return -1;
    std::vector<bool> seen(static_cast<std::size_t>(s.node_count()), false);
    std::deque<int> work{t};
    seen[static_cast<std::size_t>(t)] = true;
    int best = -1;
    while (!work.empty()) {
        int u = work.front();
        work.pop_front();
        bool sink = true;
        for (int c : s.children(u))
            if (inside(c)) {
                sink = false;
                if (!seen[static_cast<std::size_t>(c)]) {
                    seen[static_cast<std::size_t>(c)] = true;
                    work.push_back(c);
                }
            }
        if (sink && (best < 0 || u < best)) best = u;
    }
    return best;
}

}  // namespace bridge_detail

// Nice S-DAG of width <= k -> complete cop strategy for the size-k game.
inline CopStrategy sdag_to_strategy(const SdagGame& game, const SDag& s, ForwardFacing* ff_out = nullptr) {
    const Digraph& d = game.graph();
    const int n = d.vertex_count();
    NiceReport nice = validate_nice(d, s);
    if (!nice.nice()) throw std::invalid_argument("sdag_to_strategy: S-DAG is not nice: " + nice.witnesses.at(0));
    SDagDerived der = derive(s);
    if (der.width > game.k()) throw std::invalid_argument("sdag_to_strategy: S-DAG is wider than the game size");

    CopStrategy st;
    ForwardFacing ff;
    if (n == 0) {
        st.complete = true;
        if (ff_out) *ff_out = ff;
        return st;
    }
    const int root = s.sources().at(0);
    std::deque<std::pair<GameState, int>> work;
    for (const GameState& p : game.starts()) work.emplace_back(p, root);

    while (!work.empty()) {
        auto [p, t] = work.front();
        work.pop_front();
        if (ff.node.count(p)) continue;
        const VertexSet& R = game.range(p);
        int x = bridge_detail::forward_facing_sink(s, der, t, R);
        if (x < 0) throw std::logic_error("sdag_to_strategy: no forward-facing node for " + p.to_string());
        const VertexSet& bag_x = der.bag_of(x);
        std::vector<int> kids = s.children(x);
        std::sort(kids.begin(), kids.end());
        bool ok = p.x.subset_of(der.bot_sep(x).a()) && reach(d, p.x & bag_x, p.r) == R && !kids.empty();
        // With two children only the sink property is guaranteed: a child's
        // bag may miss R when R lies below the other child.
        if (kids.size() == 1) ok = ok && R.intersects(der.bag_of(kids[0]));
        for (int c : kids) ok = ok && !R.subset_of(der.bot_sep(c).bottom());
        if (!ok) throw std::logic_error("sdag_to_strategy: node " + std::to_string(x) + " is not forward facing for " + p.to_string());
        ff.node.emplace(p, x);

        const VertexSet reachable = p.x | R;
        if (kids.size() == 1) {
            int c = kids[0];
            VertexSet xp = der.bag_of(c) & reachable;
            GameState q = GameState::rigs1(p.r, p.x & der.bag_of(c), xp);
            st.f.emplace(p, q);
            (R - xp).for_each([&](Vertex v) { work.emplace_back(GameState::cigs(xp, v), c); });
        } else {
            int c1 = kids[0], c2 = kids[1];
            VertexSet a = der.bag_of(c1) & reachable;
            VertexSet b = der.bag_of(c2) & reachable;
            if (a == b) throw std::logic_error("sdag_to_strategy: both children give the cop set " + a.to_string());
            GameState q = GameState::rigs2(p.r, p.x & (der.bag_of(c1) | der.bag_of(c2)), a, b);
            st.f.emplace(p, q);
            if (st.g.count(q)) continue;
            std::map<Vertex, int> replies;
            const VertexSet below1 = der.top_sep(c1).bottom();
            R.for_each([&](Vertex v) {
                bool first = below1.contains(v);
                const VertexSet& target = first ? a : b;
                replies[v] = target == q.s1 ? 1 : 2;
                work.emplace_back(GameState::cigs(target, v), first ? c1 : c2);
            });
            st.g.emplace(q, std::move(replies));
        }
    }
    st.complete = true;
    if (ff_out) *ff_out = std::move(ff);
    return st;
}

struct WidthResult {
    bool found = false;
    int k = -1;
    SDag sdag;
    CopStrategy strategy;
    // Per insufficient k: a start vertex from which the robber wins.
    std::vector<Vertex> robber_starts;
    std::size_t states_evaluated = 0;
};

// Least k <= max_k for which the cop wins from every start, scanning k upwards.
inline WidthResult compute_sdag_width(const Digraph& d, int max_k, bool make_nice = false) {
    const int n = d.vertex_count();
    if (max_k < 0 || max_k > n) max_k = n;
    WidthResult res;
    auto cache = std::make_shared<ReachCache>(d);
    for (int k = 0; k <= max_k; ++k) {
        SdagGame game(d, k, cache);
        GameSolver solver(game);
        auto lost = solver.losing_start();
        res.states_evaluated += solver.evaluated();
        if (lost) {
            res.robber_starts.push_back(*lost);
            continue;
        }
        res.found = true;
        res.k = k;
        res.strategy = complete_strategy(solver, solver.extract_strategy());
        res.sdag = strategy_to_sdag(game, res.strategy);
        if (make_nice) res.sdag = nicefy(d, res.sdag);
        return res;
    }
    return res;
}

}  // namespace sdagw
