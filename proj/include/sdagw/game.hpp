#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <deque>
#include <map>
#include <memory>
#include <optional>
#include <random>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <vector>

#include "digraph.hpp"

namespace sdagw {

struct ResourceError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

enum class StateKind : std::uint8_t { Cigs = 0, Rigs1 = 1, Rigs2 = 2 };

// CIGS: cops on x, robber on r.
// RIGS1: x = X_bot, s1 = X'.
// RIGS2: x = X_bot, {s1, s2} with s1 lexicographically smaller.
struct GameState {
    StateKind kind = StateKind::Cigs;
    Vertex r = 0;
    VertexSet x;
    VertexSet s1;
    VertexSet s2;

    static GameState cigs(VertexSet x, Vertex r) { return {StateKind::Cigs, r, std::move(x), {}, {}}; }
    static GameState rigs1(Vertex r, VertexSet xbot, VertexSet xprime) {
        return {StateKind::Rigs1, r, std::move(xbot), std::move(xprime), {}};
    }
    static GameState rigs2(Vertex r, VertexSet xbot, VertexSet a, VertexSet b) {
        if (lex_less(b, a)) std::swap(a, b);
        return {StateKind::Rigs2, r, std::move(xbot), std::move(a), std::move(b)};
    }

    bool is_cigs() const { return kind == StateKind::Cigs; }
    bool is_rigs() const { return kind != StateKind::Cigs; }
    const VertexSet& sep(int j) const { return j == 1 ? s1 : s2; }

    friend bool operator==(const GameState& a, const GameState& b) {
        return a.kind == b.kind && a.r == b.r && a.x == b.x && a.s1 == b.s1 && a.s2 == b.s2;
    }

    std::size_t hash() const {
        std::size_t h = static_cast<std::size_t>(kind) * 31 + static_cast<std::size_t>(r);
        for (const VertexSet* s : {&x, &s1, &s2}) h ^= s->hash() + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
        return h;
    }

    std::string to_string() const {
        switch (kind) {
            case StateKind::Cigs:
                return "C(" + x.to_string() + "," + std::to_string(r) + ")";
            case StateKind::Rigs1:
                return "R1(" + std::to_string(r) + "," + x.to_string() + "," + s1.to_string() + ")";
            case StateKind::Rigs2:
                return "R2(" + std::to_string(r) + "," + x.to_string() + "," + s1.to_string() + "," + s2.to_string() + ")";
        }
        return {};
    }
};

struct GameStateHash {
    std::size_t operator()(const GameState& s) const { return s.hash(); }
};

// Order of the canonical encodings: kind, robber, then the sets lexicographically.
inline bool encoding_less(const GameState& a, const GameState& b) {
    if (a.kind != b.kind) return a.kind < b.kind;
    if (a.r != b.r) return a.r < b.r;
    if (!(a.x == b.x)) return lex_less(a.x, b.x);
    if (!(a.s1 == b.s1)) return lex_less(a.s1, b.s1);
    if (!(a.s2 == b.s2)) return lex_less(a.s2, b.s2);
    return false;
}

// Per-vertex reach sets of D minus a removed set, memoised by that set.
class ReachCache {
public:
    explicit ReachCache(Digraph d) : d_(std::move(d)) {}

    const Digraph& graph() const { return d_; }

    const std::vector<VertexSet>& closure(const VertexSet& removed) {
        auto it = memo_.find(removed);
        if (it != memo_.end()) return it->second;
        const int n = d_.vertex_count();
        std::vector<VertexSet> all(static_cast<std::size_t>(n), VertexSet(n));
        for (Vertex v = 0; v < n; ++v)
            if (!removed.contains(v)) all[static_cast<std::size_t>(v)] = reach(d_, removed, v);
        return memo_.emplace(removed, std::move(all)).first->second;
    }

    const VertexSet& range(const VertexSet& removed, Vertex r) { return closure(removed)[static_cast<std::size_t>(r)]; }

    std::size_t size() const { return memo_.size(); }

private:
    Digraph d_;
    std::unordered_map<VertexSet, std::vector<VertexSet>, VertexSetHash> memo_;
};

// A robber option out of a RIGS: where the robber goes and, per cop reply
// j in {1,2}, the resulting CIGS (RIGS1 uses slot 0 only).
struct RobberOption {
    Vertex to = 0;
    std::optional<GameState> next[2];
    bool any() const { return next[0].has_value() || next[1].has_value(); }
};

struct LexLess {
    bool operator()(const VertexSet& a, const VertexSet& b) const { return lex_less(a, b); }
};

// Number of subsets of an m-set with at most k members (saturating).
inline std::size_t subset_count(int m, int k) {
    std::size_t total = 0, c = 1;
    for (int i = 0; i <= std::min(m, k); ++i) {
        total += c;
        if (total > (std::size_t{1} << 40)) return total;
        c = c * static_cast<std::size_t>(m - i) / static_cast<std::size_t>(i + 1);
    }
    return total;
}

class SdagGame {
public:
    SdagGame(const Digraph& d, int k, std::shared_ptr<ReachCache> cache = nullptr)
        : k_(k), cache_(cache ? std::move(cache) : std::make_shared<ReachCache>(d)) {
        if (k < 0) throw InputError("game size must be non-negative");
    }

    const Digraph& graph() const { return cache_->graph(); }
    int n() const { return graph().vertex_count(); }
    int k() const { return k_; }
    const std::shared_ptr<ReachCache>& cache() const { return cache_; }

    std::vector<GameState> starts() const {
        std::vector<GameState> s;
        for (Vertex v = 0; v < n(); ++v) s.push_back(GameState::cigs(VertexSet(n()), v));
        return s;
    }

    // Reach_{D \ X}(r) for a CIGS, Reach_{D \ X_bot}(r) for a RIGS.
    const VertexSet& range(const GameState& p) const { return cache_->range(p.x, p.r); }

    // Calls visit on the C1 moves of p in encoding order until it returns true.
    template <class F>
    bool for_each_c1_move(const GameState& p, F&& visit) const {
        const VertexSet& R = range(p);
        std::map<VertexSet, std::vector<VertexSet>, LexLess> by_bot;
        for_each_subset_upto(p.x | R, k_, [&](const VertexSet& xp) {
            if ((xp - p.x).empty()) return;
            VertexSet xb = xp & p.x;
            if (!(cache_->range(xb, p.r) == R)) return;
            by_bot[xb].push_back(xp);
        });
        for (auto& [xb, list] : by_bot) {
            std::sort(list.begin(), list.end(), LexLess{});
            for (const VertexSet& xp : list)
                if (visit(GameState::rigs1(p.r, xb, xp))) return true;
        }
        return false;
    }

    // Calls visit on the C2 moves of p in encoding order until it returns true.
    template <class F>
    bool for_each_c2_move(const GameState& p, F&& visit) const {
        const VertexSet& R = range(p);
        std::vector<VertexSet> cand;
        for_each_subset_upto(p.x | R, k_, [&](const VertexSet& s) { cand.push_back(s); });
        std::sort(cand.begin(), cand.end(), LexLess{});
        std::unordered_map<VertexSet, int, VertexSetHash> index;
        for (std::size_t i = 0; i < cand.size(); ++i) index.emplace(cand[i], static_cast<int>(i));
        std::vector<VertexSet> cut;
        cut.reserve(cand.size());
        for (const VertexSet& s : cand) cut.push_back(cut_off(s, R));

        // Pairs (i, j) with i < j are already in encoding order within a bucket.
        std::map<VertexSet, std::vector<std::pair<int, int>>, LexLess> by_bot;
        std::vector<int> partners;
        for (std::size_t i = 0; i < cand.size(); ++i) {
            const VertexSet& a = cand[i];
            const VertexSet a_out = a - p.x;
            const VertexSet need = R - a - cut[i];
            const VertexSet allowed = p.x | cut[i];
            // Partners b satisfy b \ X within cut(a) and need within cut(b).
            partners.clear();
            const int m = allowed.size();
            if (subset_count(m, k_) < cand.size() - i) {
                for_each_subset_upto(allowed, k_, [&](const VertexSet& b) {
                    int j = index.at(b);
                    if (j > static_cast<int>(i)) partners.push_back(j);
                });
                std::sort(partners.begin(), partners.end());
            } else {
                for (std::size_t j = i + 1; j < cand.size(); ++j)
                    if (cand[j].subset_of(allowed)) partners.push_back(static_cast<int>(j));
            }
            for (int j : partners) {
                const VertexSet& b = cand[static_cast<std::size_t>(j)];
                const VertexSet& cb = cut[static_cast<std::size_t>(j)];
                if (!a_out.subset_of(cb) || !need.subset_of(cb | b) || !(a & b).subset_of(p.x)) continue;
                VertexSet xb = p.x & (a | b);
                if (!(cache_->range(xb, p.r) == R)) continue;
                by_bot[xb].emplace_back(static_cast<int>(i), j);
            }
        }
        for (const auto& [xb, pairs] : by_bot)
            for (auto [i, j] : pairs)
                if (visit(GameState::rigs2(p.r, xb, cand[static_cast<std::size_t>(i)], cand[static_cast<std::size_t>(j)])))
                    return true;
        return false;
    }

    template <class F>
    bool for_each_cop_move(const GameState& p, F&& visit) const {
        return for_each_c1_move(p, visit) || for_each_c2_move(p, visit);
    }

    std::vector<GameState> c1_moves(const GameState& p) const {
        std::vector<GameState> out;
        for_each_c1_move(p, [&](GameState q) {
            out.push_back(std::move(q));
            return false;
        });
        return out;
    }

    std::vector<GameState> c2_moves(const GameState& p) const {
        std::vector<GameState> out;
        for_each_c2_move(p, [&](GameState q) {
            out.push_back(std::move(q));
            return false;
        });
        return out;
    }

    std::vector<GameState> cop_moves(const GameState& p) const {
        std::vector<GameState> m = c1_moves(p);
        std::vector<GameState> m2 = c2_moves(p);
        m.insert(m.end(), std::make_move_iterator(m2.begin()), std::make_move_iterator(m2.end()));
        return m;
    }

    bool legal_reply(const GameState& p, Vertex v, int j) const {
        const VertexSet& s = p.sep(j);
        if (s.contains(v)) return false;
        const VertexSet& R = range(p);
        const VertexSet& next = cache_->range(s, v);
        return next.subset_of(R) && !(next == R);
    }

    std::vector<RobberOption> robber_moves(const GameState& p) const {
        std::vector<RobberOption> out;
        const VertexSet& R = range(p);
        if (p.kind == StateKind::Rigs1) {
            (R - p.s1).for_each([&](Vertex v) {
                RobberOption o;
                o.to = v;
                o.next[0] = GameState::cigs(p.s1, v);
                out.push_back(std::move(o));
            });
        } else if (p.kind == StateKind::Rigs2) {
            R.for_each([&](Vertex v) {
                RobberOption o;
                o.to = v;
                for (int j = 1; j <= 2; ++j)
                    if (legal_reply(p, v, j)) o.next[j - 1] = GameState::cigs(p.sep(j), v);
                out.push_back(std::move(o));
            });
        }
        return out;
    }

    bool is_legal_cop_move(const GameState& p, const GameState& q) const {
        if (!p.is_cigs() || !q.is_rigs() || q.r != p.r) return false;
        const VertexSet& R = range(p);
        if (q.kind == StateKind::Rigs1) {
            const VertexSet& xp = q.s1;
            return xp.size() <= k_ && !(xp - p.x).empty() && (xp - p.x).subset_of(R) && q.x == (xp & p.x) &&
                   cache_->range(q.x, p.r) == R;
        }
        const VertexSet &a = q.s1, &b = q.s2;
        if (a.size() > k_ || b.size() > k_ || !lex_less(a, b) || !(q.x == (p.x & (a | b)))) return false;
        if (!(a & b).subset_of(q.x) || !(cache_->range(q.x, p.r) == R)) return false;
        const VertexSet ca = cut_off(a, R), cb = cut_off(b, R);
        return (R - a - b).subset_of(ca | cb) && (a - q.x).subset_of(cb) && (b - q.x).subset_of(ca);
    }

    // Same state with the robber moved to the least vertex of its strongly
    // connected class in D minus the cop set; such states have equal values.
    GameState canonical(const GameState& p) const {
        const auto& cl = cache_->closure(p.x);
        const VertexSet& R = cl[static_cast<std::size_t>(p.r)];
        GameState c = p;
        Vertex best = p.r;
        R.for_each([&](Vertex v) {
            if (v < best && cl[static_cast<std::size_t>(v)] == R) best = v;
        });
        c.r = best;
        return c;
    }

private:
    // {w in R \ s : Reach_{D \ s}(w) strictly inside R}.
    VertexSet cut_off(const VertexSet& s, const VertexSet& R) const {
        const auto& cl = cache_->closure(s);
        VertexSet g(n());
        (R - s).for_each([&](Vertex w) {
            const VertexSet& rw = cl[static_cast<std::size_t>(w)];
            if (rw.subset_of(R) && !(rw == R)) g.insert(w);
        });
        return g;
    }

    int k_;
    std::shared_ptr<ReachCache> cache_;
};

inline std::vector<GameState> legal_c1_moves(const SdagGame& g, const GameState& p) { return g.c1_moves(p); }
inline std::vector<GameState> legal_c2_moves(const SdagGame& g, const GameState& p) { return g.c2_moves(p); }
inline std::vector<RobberOption> robber_moves(const SdagGame& g, const GameState& p) { return g.robber_moves(p); }

inline std::uint64_t state_bound(int n, int k) {
    auto pw = [](double b, int e) { return std::pow(b, e); };
    double v = pw(n, k + 1) + pw(n, 2 * k + 1) + pw(n, 3 * k + 1);
    return v > 1.8e19 ? UINT64_MAX : static_cast<std::uint64_t>(v);
}

inline std::size_t default_state_budget() {
    if (const char* e = std::getenv("SDAG_BUDGET_STATES")) {
        try {
            return static_cast<std::size_t>(std::stoull(e));
        } catch (const std::exception&) {
            throw InputError(std::string("SDAG_BUDGET_STATES is not a number: ") + e);
        }
    }
    return 5'000'000;
}

// ---- explicit game graph ------------------------------------------------------

struct GameGraph {
    std::vector<GameState> states;
    std::unordered_map<GameState, int, GameStateHash> index;
    // CIGS: successor ids in encoding order. RIGS: per robber option the
    // successor id per reply slot (-1 if that reply is illegal).
    std::vector<std::vector<int>> cop_succ;
    struct Option {
        Vertex to;
        int next[2];
    };
    std::vector<std::vector<Option>> robber_succ;
    std::vector<int> starts;
    std::vector<std::string> violations;

    std::size_t size() const { return states.size(); }
    std::vector<int> successors(int s) const {
        std::vector<int> out = cop_succ[static_cast<std::size_t>(s)];
        for (const auto& o : robber_succ[static_cast<std::size_t>(s)])
            for (int x : o.next)
                if (x >= 0) out.push_back(x);
        return out;
    }
};

inline GameGraph build_game_graph(const SdagGame& game, std::size_t budget = default_state_budget()) {
    GameGraph g;
    std::deque<int> work;
    auto intern = [&](const GameState& s) {
        auto it = g.index.find(s);
        if (it != g.index.end()) return it->second;
        if (g.states.size() >= budget)
            throw ResourceError("game graph exceeds the state budget of " + std::to_string(budget));
        int id = static_cast<int>(g.states.size());
        g.states.push_back(s);
        g.index.emplace(s, id);
        g.cop_succ.emplace_back();
        g.robber_succ.emplace_back();
        work.push_back(id);
        return id;
    };
    for (const GameState& s : game.starts()) g.starts.push_back(intern(s));
    while (!work.empty()) {
        int id = work.front();
        work.pop_front();
        GameState s = g.states[static_cast<std::size_t>(id)];
        if (s.is_cigs()) {
            std::vector<int> succ;
            for (const GameState& q : game.cop_moves(s)) succ.push_back(intern(q));
            g.cop_succ[static_cast<std::size_t>(id)] = std::move(succ);
        } else {
            std::vector<GameGraph::Option> opts;
            for (const RobberOption& o : game.robber_moves(s)) {
                GameGraph::Option x{o.to, {-1, -1}};
                for (int j = 0; j < 2; ++j)
                    if (o.next[j]) x.next[j] = intern(*o.next[j]);
                if (s.kind == StateKind::Rigs2 && !o.any())
                    g.violations.push_back("no legal cop reply at " + s.to_string() + " for robber move to " + std::to_string(o.to));
                opts.push_back(x);
            }
            g.robber_succ[static_cast<std::size_t>(id)] = std::move(opts);
        }
    }
    return g;
}

inline std::string game_graph_to_dot(const GameGraph& g, const std::vector<bool>* cop_wins = nullptr) {
    std::string out = "digraph game {\n";
    for (std::size_t i = 0; i < g.size(); ++i) {
        out += "  " + std::to_string(i) + " [label=\"" + g.states[i].to_string() + "\"";
        if (g.states[i].is_rigs()) out += ",shape=box";
        if (cop_wins) out += std::string(",color=") + ((*cop_wins)[i] ? "blue" : "red");
        out += "];\n";
    }
    for (std::size_t i = 0; i < g.size(); ++i)
        for (int j : g.successors(static_cast<int>(i))) out += "  " + std::to_string(i) + " -> " + std::to_string(j) + ";\n";
    return out + "}\n";
}

// ---- strategies -------------------------------------------------------------

struct CopStrategy {
    std::unordered_map<GameState, GameState, GameStateHash> f;
    // RIGS2 -> robber vertex -> reply j in {1,2} (index into s1/s2).
    std::unordered_map<GameState, std::map<Vertex, int>, GameStateHash> g;
    bool complete = false;

    const GameState* move(const GameState& p) const {
        auto it = f.find(p);
        return it == f.end() ? nullptr : &it->second;
    }
    int reply(const GameState& p, Vertex v) const {
        auto it = g.find(p);
        if (it == g.end()) return 0;
        auto jt = it->second.find(v);
        return jt == it->second.end() ? 0 : jt->second;
    }
};

struct GameSolution {
    std::vector<bool> cop_wins;
    CopStrategy strategy;
    bool cop_wins_all_starts = false;
};

// Backward induction; `schedule_seed` permutes the order among ready states.
inline GameSolution solve_game(const GameGraph& g, std::optional<std::uint64_t> schedule_seed = std::nullopt) {
    const std::size_t n = g.size();
    std::vector<std::vector<int>> pred(n);
    std::vector<int> pending(n, 0);
    for (std::size_t s = 0; s < n; ++s) {
        auto succ = g.successors(static_cast<int>(s));
        std::sort(succ.begin(), succ.end());
        succ.erase(std::unique(succ.begin(), succ.end()), succ.end());
        pending[s] = static_cast<int>(succ.size());
        for (int t : succ) pred[static_cast<std::size_t>(t)].push_back(static_cast<int>(s));
    }
    std::vector<int> ready;
    for (std::size_t s = 0; s < n; ++s)
        if (pending[s] == 0) ready.push_back(static_cast<int>(s));
    std::mt19937_64 rng(schedule_seed.value_or(0));

    GameSolution sol;
    sol.cop_wins.assign(n, false);
    std::vector<bool> done(n, false);
    std::size_t finished = 0;
    while (!ready.empty()) {
        std::size_t pick = ready.size() - 1;
        if (schedule_seed) pick = std::uniform_int_distribution<std::size_t>(0, ready.size() - 1)(rng);
        int s = ready[pick];
        ready[pick] = ready.back();
        ready.pop_back();
        const GameState& st = g.states[static_cast<std::size_t>(s)];
        bool win = false;
        if (st.is_cigs()) {
            for (int q : g.cop_succ[static_cast<std::size_t>(s)])
                if (sol.cop_wins[static_cast<std::size_t>(q)]) {
                    win = true;
                    sol.strategy.f.emplace(st, g.states[static_cast<std::size_t>(q)]);
                    break;
                }
        } else {
            win = true;
            std::map<Vertex, int> replies;
            for (const auto& o : g.robber_succ[static_cast<std::size_t>(s)]) {
                int j = 0;
                for (int slot = 0; slot < 2 && !j; ++slot)
                    if (o.next[slot] >= 0 && sol.cop_wins[static_cast<std::size_t>(o.next[slot])]) j = slot + 1;
                if (!j) {
                    win = false;
                    break;
                }
                if (st.kind == StateKind::Rigs2) replies[o.to] = j;
            }
            if (win && st.kind == StateKind::Rigs2) sol.strategy.g.emplace(st, std::move(replies));
        }
        sol.cop_wins[static_cast<std::size_t>(s)] = win;
        done[static_cast<std::size_t>(s)] = true;
        ++finished;
        for (int p : pred[static_cast<std::size_t>(s)])
            if (--pending[static_cast<std::size_t>(p)] == 0) ready.push_back(p);
    }
    if (finished != n) throw std::logic_error("game graph is cyclic");
    sol.cop_wins_all_starts = std::all_of(g.starts.begin(), g.starts.end(),
                                          [&](int s) { return sol.cop_wins[static_cast<std::size_t>(s)]; });
    sol.strategy.complete = true;
    return sol;
}

// ---- on-demand solver ---------------------------------------------------------

// Evaluates states depth-first with memoisation; agrees with solve_game on
// every state it visits and picks the same moves and replies.
class GameSolver {
public:
    explicit GameSolver(const SdagGame& game) : game_(game) {}

    const SdagGame& game() const { return game_; }
    std::size_t evaluated() const { return memo_.size(); }

    bool cop_wins(const GameState& p) { return eval(game_.canonical(p)).win; }

    std::optional<GameState> winning_move(const GameState& p) {
        Entry e = eval(game_.canonical(p));
        if (!e.win) return std::nullopt;
        std::optional<GameState> found;
        int at = 0;
        game_.for_each_cop_move(p, [&](GameState q) {
            if (at++ != e.move) return false;
            found = std::move(q);
            return true;
        });
        return found;
    }

    int winning_reply(const GameState& p, Vertex v) {
        for (int j = 1; j <= 2; ++j)
            if (game_.legal_reply(p, v, j) && cop_wins(GameState::cigs(p.sep(j), v))) return j;
        return 0;
    }

    // Some start the robber wins from, if any; small ranges are tried first.
    std::optional<Vertex> losing_start() {
        std::vector<GameState> starts = game_.starts();
        std::stable_sort(starts.begin(), starts.end(),
                         [&](const GameState& a, const GameState& b) { return game_.range(a).size() < game_.range(b).size(); });
        for (const GameState& s : starts)
            if (!cop_wins(s)) return s.r;
        return std::nullopt;
    }

    // f and g over every state consistent with the lexicographically least
    // winning moves; throws if some start is lost.
    CopStrategy extract_strategy() {
        CopStrategy st;
        std::unordered_map<GameState, bool, GameStateHash> seen;
        std::deque<GameState> work;
        auto push = [&](const GameState& s) {
            if (seen.emplace(s, true).second) work.push_back(s);
        };
        for (const GameState& s : game_.starts()) push(s);
        while (!work.empty()) {
            GameState p = work.front();
            work.pop_front();
            if (p.is_cigs()) {
                auto q = winning_move(p);
                if (!q) throw std::logic_error("extract_strategy: robber wins from " + p.to_string());
                st.f.emplace(p, *q);
                push(*q);
            } else if (p.kind == StateKind::Rigs1) {
                for (const RobberOption& o : game_.robber_moves(p)) push(*o.next[0]);
            } else {
                std::map<Vertex, int> replies;
                for (const RobberOption& o : game_.robber_moves(p)) {
                    int j = winning_reply(p, o.to);
                    if (!j) throw std::logic_error("extract_strategy: no winning reply at " + p.to_string());
                    replies[o.to] = j;
                    push(*o.next[j - 1]);
                }
                st.g.emplace(p, std::move(replies));
            }
        }
        st.complete = true;
        return st;
    }

private:
    struct Entry {
        bool win = false;
        int move = -1;
    };

    Entry eval(const GameState& c) {
        auto it = memo_.find(c);
        if (it != memo_.end()) return it->second;
        Entry e;
        if (c.is_cigs()) {
            int at = 0;
            game_.for_each_cop_move(c, [&](const GameState& q) {
                if (eval(game_.canonical(q)).win) {
                    e = {true, at};
                    return true;
                }
                ++at;
                return false;
            });
        } else {
            e.win = true;
            const std::vector<RobberOption> opts = game_.robber_moves(c);
            // A refutation already in the memo settles the state without search.
            for (const RobberOption& o : opts) {
                bool known_loss = true;
                for (const auto& nx : o.next) {
                    if (!nx) continue;
                    auto f = memo_.find(game_.canonical(*nx));
                    known_loss = known_loss && f != memo_.end() && !f->second.win;
                }
                if (known_loss) {
                    e.win = false;
                    break;
                }
            }
            if (e.win)
            for (const RobberOption& o : opts) {
                bool ok = false;
                for (const auto& nx : o.next)
                    if (nx && eval(game_.canonical(*nx)).win) {
                        ok = true;
                        break;
                    }
                if (!ok) {
                    e.win = false;
                    break;
                }
            }
        }
        memo_.emplace(c, e);
        return e;
    }

    const SdagGame& game_;
    std::unordered_map<GameState, Entry, GameStateHash> memo_;
};

// Fills f gaps with a winning move and g gaps with S1 if legal, else S2.
inline CopStrategy complete_strategy(GameSolver& solver, CopStrategy s) {
    const SdagGame& game = solver.game();
    std::unordered_map<GameState, bool, GameStateHash> seen;
    std::deque<GameState> work;
    auto push = [&](const GameState& x) {
        if (seen.emplace(x, true).second) work.push_back(x);
    };
    for (const GameState& x : game.starts()) push(x);
    while (!work.empty()) {
        GameState p = work.front();
        work.pop_front();
        if (p.is_cigs()) {
            const GameState* q = s.move(p);
            if (!q) {
                auto w = solver.winning_move(p);
                if (!w) throw std::invalid_argument("complete_strategy: strategy is not winning at " + p.to_string());
                q = &s.f.emplace(p, *w).first->second;
            } else if (!game.is_legal_cop_move(p, *q)) {
                throw std::invalid_argument("complete_strategy: illegal move " + p.to_string() + " -> " + q->to_string());
            }
            push(*q);
        } else if (p.kind == StateKind::Rigs1) {
            for (const RobberOption& o : game.robber_moves(p)) push(*o.next[0]);
        } else {
            auto& replies = s.g[p];
            for (const RobberOption& o : game.robber_moves(p)) {
                int j = 0;
                if (auto it = replies.find(o.to); it != replies.end()) j = it->second;
                if (!j) j = o.next[0] ? 1 : 2;
                if (!o.next[j - 1])
                    throw std::invalid_argument("complete_strategy: no legal reply at " + p.to_string() + " for " +
                                                std::to_string(o.to));
                replies[o.to] = j;
                push(*o.next[j - 1]);
            }
        }
    }
    s.complete = true;
    return s;
}

// ---- plays ---------------------------------------------------------------------

struct RobberPolicy {
    enum class Kind { Adversarial, Random, Scripted } kind = Kind::Adversarial;
    std::uint64_t seed = 0;
    std::vector<Vertex> script;

    static RobberPolicy adversarial() { return {}; }
    static RobberPolicy random(std::uint64_t seed) { return {Kind::Random, seed, {}}; }
    static RobberPolicy scripted(std::vector<Vertex> moves) { return {Kind::Scripted, 0, std::move(moves)}; }
};

struct Play {
    std::vector<GameState> states;
    bool missing_reply = false;
    bool cop_won() const { return !states.empty() && states.back().is_rigs() && !missing_reply; }
};

// Robber choices: the start (unless given) and every move out of a RIGS.
inline Play simulate_play(const SdagGame& game, const CopStrategy& cop, const RobberPolicy& policy,
                          std::optional<Vertex> start = std::nullopt) {
    std::mt19937_64 rng(policy.seed);
    std::size_t script_at = 0;
    auto choose = [&](const std::vector<Vertex>& options, auto&& score) -> Vertex {
        switch (policy.kind) {
            case RobberPolicy::Kind::Adversarial: {
                Vertex best = options.front();
                int best_score = score(best);
                for (Vertex v : options)
                    if (int sc = score(v); sc > best_score) best = v, best_score = sc;
                return best;
            }
            case RobberPolicy::Kind::Random:
                return options[std::uniform_int_distribution<std::size_t>(0, options.size() - 1)(rng)];
            case RobberPolicy::Kind::Scripted: {
                if (script_at >= policy.script.size()) throw InputError("scripted robber ran out of moves");
                Vertex v = policy.script[script_at++];
                if (std::find(options.begin(), options.end(), v) == options.end())
                    throw InputError("scripted robber move to " + std::to_string(v) + " is illegal");
                return v;
            }
        }
        return options.front();
    };

    Play play;
    const int n = game.n();
    if (n == 0) return play;
    Vertex r0;
    if (start) {
        r0 = *start;
    } else {
        std::vector<Vertex> all;
        for (Vertex v = 0; v < n; ++v) all.push_back(v);
        r0 = choose(all, [&](Vertex v) { return game.range(GameState::cigs(VertexSet(n), v)).size(); });
    }
    GameState cur = GameState::cigs(VertexSet(n), r0);
    play.states.push_back(cur);
    while (true) {
        if (cur.is_cigs()) {
            const GameState* q = cop.move(cur);
            if (!q) break;
            cur = *q;
        } else {
            auto opts = game.robber_moves(cur);
            if (opts.empty()) break;
            std::vector<Vertex> targets;
            for (const auto& o : opts) targets.push_back(o.to);
            auto next_for = [&](const RobberOption& o) -> std::optional<GameState> {
                if (cur.kind == StateKind::Rigs1) return o.next[0];
                int j = cop.reply(cur, o.to);
                if (j && o.next[j - 1]) return o.next[j - 1];
                return o.next[0] ? o.next[0] : o.next[1];
            };
            Vertex v = choose(targets, [&](Vertex t) {
                for (const auto& o : opts)
                    if (o.to == t)
                        if (auto nx = next_for(o)) return game.range(*nx).size();
                return n + 1;
            });
            const RobberOption& o = *std::find_if(opts.begin(), opts.end(), [&](const RobberOption& x) { return x.to == v; });
            auto nx = next_for(o);
            if (!nx) {
                play.missing_reply = true;
                break;
            }
            cur = *nx;
        }
        play.states.push_back(cur);
        if (play.states.size() > static_cast<std::size_t>(4 * n + 8)) throw std::logic_error("play does not terminate");
    }
    return play;
}

}  // namespace sdagw
