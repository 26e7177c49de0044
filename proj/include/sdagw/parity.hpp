#pragma once

#include <algorithm>
#include <climits>
#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "digraph.hpp"
#include "game.hpp"

namespace sdagw {

// Text layout remembered by the parser so that emit reproduces the input.
struct PgLayout {
    enum class Kind { Header, Start, Vertex };
    struct Statement {
        Kind kind = Kind::Vertex;
        int value = 0;  // header max id, start id, or vertex id
    };
    std::vector<std::string> trivia;  // trivia[i] precedes statements[i]; one extra trails
    std::vector<Statement> statements;
};

struct ParityGame {
    Digraph graph;
    VertexSet even;
    std::vector<int> priority;
    std::vector<std::optional<std::string>> names;
    std::vector<std::vector<Vertex>> succ_order;  // successors in source order
    std::optional<PgLayout> layout;

    ParityGame() = default;
    ParityGame(Digraph g, VertexSet even_vertices, std::vector<int> prio)
        : graph(std::move(g)), even(std::move(even_vertices)), priority(std::move(prio)) {
        const int n = graph.vertex_count();
        if (static_cast<int>(priority.size()) != n) throw InputError("priority vector has wrong length");
        if (even.capacity() != n) throw InputError("even vertex set has wrong capacity");
        for (int p : priority)
            if (p < 0) throw InputError("negative priority");
        names.assign(static_cast<std::size_t>(n), std::nullopt);
        succ_order.resize(static_cast<std::size_t>(n));
        for (Vertex v = 0; v < n; ++v) succ_order[static_cast<std::size_t>(v)] = graph.out(v).to_vector();
    }

    int size() const { return graph.vertex_count(); }
    bool is_even(Vertex v) const { return even.contains(v); }
    int prio(Vertex v) const { return priority[static_cast<std::size_t>(v)]; }
    int max_priority() const { return priority.empty() ? 0 : *std::max_element(priority.begin(), priority.end()); }
};

// Throws InputError naming the first dead end.
inline void require_no_dead_ends(const ParityGame& p) {
    for (Vertex v = 0; v < p.size(); ++v)
        if (p.graph.out(v).empty()) throw InputError("vertex " + std::to_string(v) + " has no successor");
}

// ---------------------------------------------------------------------------
// PGSolver format

struct PgParseOptions {
    bool unroll_loops = false;
};

namespace pg_detail {

inline bool is_space(char c) { return c == ' ' || c == '\t' || c == '\n' || c == '\r'; }

[[noreturn]] inline void fail(int line, const std::string& msg) {
    throw InputError("line " + std::to_string(line) + ": " + msg);
}

inline int parse_int(const std::string& tok, int line, const char* what) {
    if (tok.empty() || tok.size() > 9 || !std::all_of(tok.begin(), tok.end(), [](char c) { return c >= '0' && c <= '9'; }))
        fail(line, std::string("expected ") + what + ", got '" + tok + "'");
    return std::stoi(tok);
}

struct RawVertex {
    int id, prio, owner;
    std::vector<int> succ;
    std::optional<std::string> name;
    int line;
};

}  // namespace pg_detail

// Statements end with ';'. Whitespace and '#' comments between statements
// are kept verbatim; statements themselves are re-rendered canonically.
inline ParityGame parse_pgsolver(const std::string& text, const PgParseOptions& opt = {}) {
    using namespace pg_detail;
    PgLayout layout;
    std::vector<RawVertex> raw;
    std::optional<int> header;
    int line = 1;
    std::size_t i = 0;
    const std::size_t n = text.size();

    while (true) {
        std::string trivia;
        while (i < n) {
            char c = text[i];
            if (is_space(c)) {
                if (c == '\n') ++line;
                trivia += c;
                ++i;
            } else if (c == '#') {
                while (i < n && text[i] != '\n') trivia += text[i++];
            } else {
                break;
            }
        }
        layout.trivia.push_back(std::move(trivia));
        if (i >= n) break;

        const int stmt_line = line;
        std::vector<std::string> toks;
        std::optional<std::string> name;
        std::string cur;
        bool closed = false;
        while (i < n) {
            char c = text[i];
            if (c == ';') {
                ++i;
                closed = true;
                break;
            }
            if (c == '"') {
                if (name) fail(line, "more than one name");
                std::size_t j = text.find('"', i + 1);
                if (j == std::string::npos) fail(line, "unterminated name");
                std::string s = text.substr(i + 1, j - i - 1);
                if (s.find('\n') != std::string::npos) fail(line, "name spans lines");
                if (!cur.empty()) toks.push_back(std::move(cur)), cur.clear();
                name = std::move(s);
                i = j + 1;
                continue;
            }
            if (c == '#') fail(line, "comment inside a statement");
            if (is_space(c)) {
                if (c == '\n') ++line;
                if (!cur.empty()) toks.push_back(std::move(cur)), cur.clear();
            } else {
                if (name) fail(line, "name must be the last field");
                cur += c;
            }
            ++i;
        }
        if (!closed) fail(stmt_line, "missing ';'");
        if (!cur.empty()) toks.push_back(std::move(cur));
        if (toks.empty()) fail(stmt_line, "empty statement");

        if (toks[0] == "parity" || toks[0] == "start") {
            if (toks.size() != 2 || name) fail(stmt_line, "malformed '" + toks[0] + "' directive");
            int val = parse_int(toks[1], stmt_line, "an integer");
            if (toks[0] == "parity") {
                if (header || !raw.empty()) fail(stmt_line, "header must come first and only once");
                header = val;
                layout.statements.push_back({PgLayout::Kind::Header, val});
            } else {
                layout.statements.push_back({PgLayout::Kind::Start, val});
            }
            continue;
        }
        if (toks.size() < 3) fail(stmt_line, "vertex needs id, priority, owner and successors");
        RawVertex rv;
        rv.line = stmt_line;
        rv.id = parse_int(toks[0], stmt_line, "a vertex id");
        rv.prio = parse_int(toks[1], stmt_line, "a priority");
        rv.owner = parse_int(toks[2], stmt_line, "an owner");
        if (rv.owner > 1) fail(stmt_line, "owner must be 0 or 1");
        if (toks.size() == 3) fail(stmt_line, "vertex " + std::to_string(rv.id) + " has no successor");
        std::string succ;
        for (std::size_t t = 3; t < toks.size(); ++t) succ += toks[t];
        std::size_t pos = 0;
        while (true) {
            std::size_t comma = succ.find(',', pos);
            rv.succ.push_back(parse_int(succ.substr(pos, comma == std::string::npos ? std::string::npos : comma - pos), stmt_line, "a successor"));
            if (comma == std::string::npos) break;
            pos = comma + 1;
        }
        rv.name = std::move(name);
        layout.statements.push_back({PgLayout::Kind::Vertex, rv.id});
        raw.push_back(std::move(rv));
    }

    const int count = static_cast<int>(raw.size());
    std::vector<int> line_of(static_cast<std::size_t>(count), -1);
    for (std::size_t r = 0; r < raw.size(); ++r) {
        const RawVertex& rv = raw[r];
        if (rv.id >= count) fail(rv.line, "vertex id " + std::to_string(rv.id) + " outside 0.." + std::to_string(count - 1));
        if (line_of[static_cast<std::size_t>(rv.id)] >= 0)
            fail(rv.line, "vertex " + std::to_string(rv.id) + " already defined on line " + std::to_string(line_of[static_cast<std::size_t>(rv.id)]));
        line_of[static_cast<std::size_t>(rv.id)] = rv.line;
    }
    if (header && *header != count - 1)
        fail(1, "header declares max id " + std::to_string(*header) + " but vertices are 0.." + std::to_string(count - 1));

    int loops = 0;
    for (const RawVertex& rv : raw) {
        std::set<int> seen;
        for (int s : rv.succ) {
            if (s >= count) fail(rv.line, "successor " + std::to_string(s) + " is not a vertex");
            if (!seen.insert(s).second) fail(rv.line, "duplicate successor " + std::to_string(s));
            if (s == rv.id) {
                if (!opt.unroll_loops) fail(rv.line, "self-loop at vertex " + std::to_string(s) + " (use --unroll-loops to replace it by a 2-cycle)");
                ++loops;
            }
        }
    }

    const int total = count + loops;
    Digraph g(total);
    VertexSet even(total);
    std::vector<int> prio(static_cast<std::size_t>(total));
    std::vector<std::optional<std::string>> names(static_cast<std::size_t>(total));
    std::vector<std::vector<Vertex>> order(static_cast<std::size_t>(total));
    int fresh = count;
    std::vector<const RawVertex*> by_id(static_cast<std::size_t>(count));
    for (const RawVertex& rv : raw) by_id[static_cast<std::size_t>(rv.id)] = &rv;
    for (const RawVertex* rv : by_id) {
        prio[static_cast<std::size_t>(rv->id)] = rv->prio;
        if (rv->owner == 0) even.insert(rv->id);
        names[static_cast<std::size_t>(rv->id)] = rv->name;
        for (int s : rv->succ) {
            if (s == rv->id) {
                int w = fresh++;
                prio[static_cast<std::size_t>(w)] = rv->prio;
                if (rv->owner == 0) even.insert(w);
                g.add_edge(rv->id, w);
                g.add_edge(w, rv->id);
                order[static_cast<std::size_t>(rv->id)].push_back(w);
                order[static_cast<std::size_t>(w)].push_back(rv->id);
            } else {
                g.add_edge(rv->id, s);
                order[static_cast<std::size_t>(rv->id)].push_back(s);
            }
        }
    }
    ParityGame p(std::move(g), std::move(even), std::move(prio));
    p.names = std::move(names);
    p.succ_order = std::move(order);
    if (loops == 0) p.layout = std::move(layout);
    return p;
}

inline std::string pg_vertex_statement(const ParityGame& p, Vertex v) {
    std::string s = std::to_string(v) + " " + std::to_string(p.prio(v)) + " " + (p.is_even(v) ? "0" : "1") + " ";
    const auto& succ = p.succ_order[static_cast<std::size_t>(v)];
    for (std::size_t i = 0; i < succ.size(); ++i) s += (i ? "," : "") + std::to_string(succ[i]);
    if (const auto& nm = p.names[static_cast<std::size_t>(v)]) s += " \"" + *nm + "\"";
    return s + ";";
}

// Reproduces the parsed text when a layout is present, else canonical form.
inline std::string emit_pgsolver(const ParityGame& p) {
    std::string out;
    bool use_layout = p.layout.has_value();
    if (use_layout) {
        int vertices = 0;
        for (const auto& st : p.layout->statements) vertices += st.kind == PgLayout::Kind::Vertex;
        use_layout = vertices == p.size() && p.layout->trivia.size() == p.layout->statements.size() + 1;
    }
    if (!use_layout) {
        out = "parity " + std::to_string(p.size() - 1) + ";\n";
        for (Vertex v = 0; v < p.size(); ++v) out += pg_vertex_statement(p, v) + "\n";
        return out;
    }
    const PgLayout& l = *p.layout;
    for (std::size_t i = 0; i < l.statements.size(); ++i) {
        out += l.trivia[i];
        const auto& st = l.statements[i];
        switch (st.kind) {
            case PgLayout::Kind::Header: out += "parity " + std::to_string(st.value) + ";"; break;
            case PgLayout::Kind::Start: out += "start " + std::to_string(st.value) + ";"; break;
            case PgLayout::Kind::Vertex: out += pg_vertex_statement(p, st.value); break;
        }
    }
    return out + l.trivia.back();
}

// ---------------------------------------------------------------------------
// Random games

inline ParityGame random_parity_game(const Digraph& d, int max_priority, std::mt19937_64& rng) {
    const int n = d.vertex_count();
    Digraph g(n);
    for (auto [u, v] : d.edges()) g.add_edge(u, v);
    // Dead ends get an edge to an index neighbour, so banded inputs stay banded.
    if (n >= 2)
        for (Vertex v = 0; v < n; ++v)
            if (g.out(v).empty()) g.add_edge(v, v + 1 < n ? v + 1 : v - 1);
    VertexSet even(n);
    std::vector<int> prio(static_cast<std::size_t>(n));
    for (Vertex v = 0; v < n; ++v) {
        if (rng() & 1) even.insert(v);
        prio[static_cast<std::size_t>(v)] = std::uniform_int_distribution<int>(0, max_priority)(rng);
    }
    return ParityGame(std::move(g), std::move(even), std::move(prio));
}

// ---------------------------------------------------------------------------
// Orders, outcomes and results

// i ⊑ j: i is at most as good for Even as j.
inline bool priority_leq(int i, int j) {
    const bool io = i % 2, jo = j % 2;
    if (io != jo) return io;
    return io ? i <= j : i >= j;
}

// The ⊑-least of two priorities.
inline int priority_min(int i, int j) { return priority_leq(i, j) ? i : j; }

struct Outcome {
    enum class Kind : std::uint8_t { WinOdd = 0, Exit = 1, WinEven = 2 };
    Kind kind = Kind::WinOdd;
    Vertex v = -1;
    int p = 0;

    static Outcome win_odd() { return {Kind::WinOdd, -1, 0}; }
    static Outcome win_even() { return {Kind::WinEven, -1, 0}; }
    static Outcome exit(Vertex v, int p) { return {Kind::Exit, v, p}; }
    bool is_exit() const { return kind == Kind::Exit; }

    friend auto operator<=>(const Outcome&, const Outcome&) = default;
};

inline std::string to_string(const Outcome& o) {
    switch (o.kind) {
        case Outcome::Kind::WinOdd: return "winOdd";
        case Outcome::Kind::WinEven: return "winEven";
        default: return "(" + std::to_string(o.v) + "," + std::to_string(o.p) + ")";
    }
}

inline bool outcome_leq(const Outcome& a, const Outcome& b) {
    if (a.kind == Outcome::Kind::WinOdd || b.kind == Outcome::Kind::WinEven) return true;
    if (a.kind == Outcome::Kind::WinEven || b.kind == Outcome::Kind::WinOdd) return false;
    return a.v == b.v && priority_leq(a.p, b.p);
}

// Sorted by Outcome order; always an antichain produced via make_result.
using ResultSet = std::vector<Outcome>;

inline std::string to_string(const ResultSet& r) {
    std::string s = "{";
    for (std::size_t i = 0; i < r.size(); ++i) s += (i ? "," : "") + to_string(r[i]);
    return s + "}";
}

// ⊴-minimal elements of the given outcomes.
inline ResultSet make_result(std::vector<Outcome> os) {
    std::sort(os.begin(), os.end());
    os.erase(std::unique(os.begin(), os.end()), os.end());
    ResultSet r;
    for (const Outcome& o : os) {
        bool dominated = false;
        for (const Outcome& q : os)
            if (!(q == o) && outcome_leq(q, o)) {
                dominated = true;
                break;
            }
        if (!dominated) r.push_back(o);
    }
    return r;
}

// Hoare order: every outcome of a lies below some outcome of b.
inline bool result_leq(const ResultSet& a, const ResultSet& b) {
    for (const Outcome& x : a) {
        bool found = false;
        for (const Outcome& y : b)
            if (outcome_leq(x, y)) {
                found = true;
                break;
            }
        if (!found) return false;
    }
    return true;
}

// Smyth order: every outcome of b lies above some outcome of a.
inline bool result_smyth_leq(const ResultSet& a, const ResultSet& b) {
    for (const Outcome& y : b) {
        bool found = false;
        for (const Outcome& x : a)
            if (outcome_leq(x, y)) {
                found = true;
                break;
            }
        if (!found) return false;
    }
    return true;
}

inline bool is_valid_result(const ResultSet& r) {
    if (r.empty() || !std::is_sorted(r.begin(), r.end())) return false;
    for (std::size_t i = 0; i < r.size(); ++i) {
        if (r[i].kind != Outcome::Kind::Exit && r.size() != 1) return false;
        for (std::size_t j = 0; j < r.size(); ++j)
            if (i != j && (outcome_leq(r[i], r[j]) || (r[i].is_exit() && r[j].is_exit() && r[i].v == r[j].v))) return false;
    }
    return true;
}

inline nlohmann::json result_to_json(const ResultSet& r) {
    nlohmann::json j = nlohmann::json::array();
    for (const Outcome& o : r) {
        if (o.is_exit())
            j.push_back({{"exit", o.v}, {"priority", o.p}});
        else
            j.push_back(to_string(o));
    }
    return j;
}

// Outcome of a finite play.
inline Outcome play_outcome(const ParityGame& p, const std::vector<Vertex>& play) {
    if (play.empty()) throw InputError("play_outcome: empty play");
    int m = INT_MAX;
    for (std::size_t i = 0; i < play.size(); ++i) {
        Vertex v = play[i];
        if (v < 0 || v >= p.size()) throw InputError("play_outcome: vertex out of range");
        if (i && !p.graph.has_edge(play[i - 1], v)) throw InputError("play_outcome: illegal step");
        m = std::min(m, p.prio(v));
    }
    return Outcome::exit(play.back(), m);
}

// Outcome of the infinite play prefix · cycle^ω.
inline Outcome lasso_outcome(const ParityGame& p, const std::vector<Vertex>& prefix, const std::vector<Vertex>& cycle) {
    if (cycle.empty()) throw InputError("lasso_outcome: empty cycle");
    std::vector<Vertex> all = prefix;
    all.insert(all.end(), cycle.begin(), cycle.end());
    all.push_back(cycle.front());
    play_outcome(p, all);
    int m = INT_MAX;
    for (Vertex v : cycle) m = std::min(m, p.prio(v));
    return m % 2 ? Outcome::win_odd() : Outcome::win_even();
}

// f[v] is Even's successor at v; only entries for region ∩ V0 are read.
using EvenStrategy = std::vector<Vertex>;

namespace parity_detail {

// Strongly connected components restricted to `live`, Tarjan iterative.
inline std::vector<int> scc_ids(int n, const std::vector<std::vector<Vertex>>& adj, const std::vector<bool>& live) {
    std::vector<int> idx(static_cast<std::size_t>(n), -1), low(static_cast<std::size_t>(n), 0), comp(static_cast<std::size_t>(n), -1);
    std::vector<bool> on(static_cast<std::size_t>(n), false);
    std::vector<Vertex> st;
    int counter = 0, comps = 0;
    for (Vertex s = 0; s < n; ++s) {
        if (!live[static_cast<std::size_t>(s)] || idx[static_cast<std::size_t>(s)] >= 0) continue;
        std::vector<std::pair<Vertex, std::size_t>> call{{s, 0}};
        idx[static_cast<std::size_t>(s)] = low[static_cast<std::size_t>(s)] = counter++;
        st.push_back(s);
        on[static_cast<std::size_t>(s)] = true;
        while (!call.empty()) {
            auto& [u, k] = call.back();
            const auto& out = adj[static_cast<std::size_t>(u)];
            if (k < out.size()) {
                Vertex w = out[k++];
                if (!live[static_cast<std::size_t>(w)]) continue;
                if (idx[static_cast<std::size_t>(w)] < 0) {
                    idx[static_cast<std::size_t>(w)] = low[static_cast<std::size_t>(w)] = counter++;
                    st.push_back(w);
                    on[static_cast<std::size_t>(w)] = true;
                    call.emplace_back(w, 0);
                } else if (on[static_cast<std::size_t>(w)]) {
                    low[static_cast<std::size_t>(u)] = std::min(low[static_cast<std::size_t>(u)], idx[static_cast<std::size_t>(w)]);
                }
                continue;
            }
            if (low[static_cast<std::size_t>(u)] == idx[static_cast<std::size_t>(u)]) {
                while (true) {
                    Vertex w = st.back();
                    st.pop_back();
                    on[static_cast<std::size_t>(w)] = false;
                    comp[static_cast<std::size_t>(w)] = comps;
                    if (w == u) break;
                }
                ++comps;
            }
            Vertex done = u;
            call.pop_back();
            if (!call.empty()) {
                Vertex parent = call.back().first;
                low[static_cast<std::size_t>(parent)] = std::min(low[static_cast<std::size_t>(parent)], low[static_cast<std::size_t>(done)]);
            }
        }
    }
    return comp;
}

}  // namespace parity_detail

inline ResultSet restricted_result(const ParityGame& p, const VertexSet& region, const EvenStrategy& f, Vertex v) {
    const int n = p.size();
    if (!region.contains(v)) throw std::invalid_argument("restricted_result: start vertex outside the region");
    std::vector<std::vector<Vertex>> adj(static_cast<std::size_t>(n));
    region.for_each([&](Vertex u) {
        if (p.is_even(u)) {
            Vertex w = static_cast<std::size_t>(u) < f.size() ? f[static_cast<std::size_t>(u)] : -1;
            if (w < 0 || w >= n || !p.graph.has_edge(u, w))
                throw std::invalid_argument("restricted_result: strategy undefined or illegal at vertex " + std::to_string(u));
            adj[static_cast<std::size_t>(u)] = {w};
        } else {
            adj[static_cast<std::size_t>(u)] = p.graph.out(u).to_vector();
        }
    });

    // Exits: search over (vertex, running min).
    std::set<std::pair<Vertex, int>> seen{{v, p.prio(v)}};
    std::vector<std::pair<Vertex, int>> work{{v, p.prio(v)}};
    std::map<Vertex, int> exits;
    std::vector<bool> reached(static_cast<std::size_t>(n), false);
    while (!work.empty()) {
        auto [u, m] = work.back();
        work.pop_back();
        reached[static_cast<std::size_t>(u)] = true;
        for (Vertex w : adj[static_cast<std::size_t>(u)]) {
            int m2 = std::min(m, p.prio(w));
            if (region.contains(w)) {
                if (seen.insert({w, m2}).second) work.emplace_back(w, m2);
            } else {
                auto [it, fresh] = exits.emplace(w, m2);
                if (!fresh) it->second = priority_min(it->second, m2);
            }
        }
    }

    // Odd cycles: an SCC of the reachable part restricted to priorities >= q
    // that contains a vertex of odd priority q.
    std::set<int> odd;
    for (Vertex u = 0; u < n; ++u)
        if (reached[static_cast<std::size_t>(u)] && p.prio(u) % 2) odd.insert(p.prio(u));
    for (int q : odd) {
        std::vector<bool> live(static_cast<std::size_t>(n), false);
        for (Vertex u = 0; u < n; ++u) live[static_cast<std::size_t>(u)] = reached[static_cast<std::size_t>(u)] && p.prio(u) >= q;
        auto comp = parity_detail::scc_ids(n, adj, live);
        for (Vertex u = 0; u < n; ++u) {
            if (!live[static_cast<std::size_t>(u)] || p.prio(u) != q) continue;
            for (Vertex w : adj[static_cast<std::size_t>(u)])
                if (live[static_cast<std::size_t>(w)] && comp[static_cast<std::size_t>(w)] == comp[static_cast<std::size_t>(u)]) return {Outcome::win_odd()};
        }
    }
    if (exits.empty()) return {Outcome::win_even()};
    ResultSet r;
    for (auto [w, m] : exits) r.push_back(Outcome::exit(w, m));
    return r;
}

// ---------------------------------------------------------------------------
// Frontiers

// Results per start vertex, each list sorted and duplicate free.
struct Frontier {
    std::map<Vertex, std::vector<ResultSet>> at;

    void add(Vertex v, ResultSet r) {
        auto& list = at[v];
        auto it = std::lower_bound(list.begin(), list.end(), r);
        if (it == list.end() || *it != r) list.insert(it, std::move(r));
    }
    std::size_t tuple_count() const {
        std::size_t c = 0;
        for (const auto& [v, rs] : at) c += rs.size();
        return c;
    }
    bool empty() const { return at.empty(); }
    friend bool operator==(const Frontier&, const Frontier&) = default;
};

inline std::string to_string(const Frontier& fr) {
    std::string s;
    for (const auto& [v, rs] : fr.at)
        for (const auto& r : rs) s += "(" + std::to_string(v) + "," + to_string(r) + ") ";
    return s;
}

inline nlohmann::json frontier_to_json(const Frontier& fr) {
    nlohmann::json j = nlohmann::json::array();
    for (const auto& [v, rs] : fr.at)
        for (const auto& r : rs) j.push_back({{"vertex", v}, {"result", result_to_json(r)}});
    return j;
}

enum class FrontierFilter { None, Hoare, Smyth };

// Removes (v,r) when some (v,r') lies strictly above it in the chosen order.
inline Frontier filter_frontier(const Frontier& fr, FrontierFilter how) {
    if (how == FrontierFilter::None) return fr;
    auto leq = how == FrontierFilter::Hoare ? result_leq : result_smyth_leq;
    Frontier out;
    for (const auto& [v, rs] : fr.at) {
        auto& kept = out.at[v];
        for (const auto& r : rs) {
            bool dominated = false;
            for (const auto& r2 : rs)
                if (r2 != r && leq(r, r2) && !leq(r2, r)) {
                    dominated = true;
                    break;
                }
            if (!dominated) kept.push_back(r);
        }
    }
    return out;
}

inline Frontier dominance_filter(const Frontier& fr) { return filter_frontier(fr, FrontierFilter::Hoare); }

// Calls fn(f) for every memoryless Even strategy on region ∩ V0 whose
// choices stay in region ∪ exits.
template <class F>
void for_each_even_strategy(const ParityGame& p, const VertexSet& region, const VertexSet& exits, std::uint64_t budget, F&& fn) {
    std::vector<Vertex> owners;
    std::vector<std::vector<Vertex>> choices;
    std::uint64_t total = 1;
    region.for_each([&](Vertex u) {
        std::vector<Vertex> opts;
        p.graph.out(u).for_each([&](Vertex w) {
            if (region.contains(w) || exits.contains(w)) opts.push_back(w);
            else if (!p.is_even(u)) throw std::invalid_argument("edge " + std::to_string(u) + "->" + std::to_string(w) + " leaves region and exits");
        });
        if (!p.is_even(u)) return;
        if (opts.empty()) throw std::invalid_argument("Even vertex " + std::to_string(u) + " has no move inside region and exits");
        total = std::min<std::uint64_t>(total * opts.size(), UINT64_MAX / 8);
        owners.push_back(u);
        choices.push_back(std::move(opts));
    });
    if (total > budget) throw ResourceError("strategy enumeration needs " + std::to_string(total) + " strategies, budget " + std::to_string(budget));
    EvenStrategy f(static_cast<std::size_t>(p.size()), -1);
    std::vector<std::size_t> pick(owners.size(), 0);
    while (true) {
        for (std::size_t i = 0; i < owners.size(); ++i) f[static_cast<std::size_t>(owners[i])] = choices[i][pick[i]];
        fn(static_cast<const EvenStrategy&>(f));
        std::size_t i = 0;
        while (i < owners.size() && ++pick[i] == choices[i].size()) pick[i++] = 0;
        if (i == owners.size()) break;
    }
}

inline constexpr std::uint64_t default_oracle_budget = 1u << 20;

// All (v, result) pairs over memoryless strategies, before filtering.
inline Frontier frontier_all(const ParityGame& p, const VertexSet& region, const VertexSet& exits, std::uint64_t budget = default_oracle_budget) {
    Frontier fr;
    for_each_even_strategy(p, region, exits, budget, [&](const EvenStrategy& f) {
        region.for_each([&](Vertex v) { fr.add(v, restricted_result(p, region, f, v)); });
    });
    return fr;
}

inline Frontier frontier_oracle(const ParityGame& p, const VertexSet& region, const VertexSet& exits, std::uint64_t budget = default_oracle_budget) {
    return dominance_filter(frontier_all(p, region, exits, budget));
}

// ---------------------------------------------------------------------------
// Zielonka

namespace parity_detail {

inline VertexSet attractor(const ParityGame& p, const VertexSet& arena, const VertexSet& target, bool even_player) {
    VertexSet attr = target & arena;
    std::vector<int> remaining(static_cast<std::size_t>(p.size()), 0);
    arena.for_each([&](Vertex v) { remaining[static_cast<std::size_t>(v)] = (p.graph.out(v) & arena).size(); });
    std::vector<Vertex> work = attr.to_vector();
    while (!work.empty()) {
        Vertex w = work.back();
        work.pop_back();
        (p.graph.in(w) & arena).for_each([&](Vertex u) {
            if (attr.contains(u)) return;
            bool mine = p.is_even(u) == even_player;
            if (mine || --remaining[static_cast<std::size_t>(u)] == 0) {
                attr.insert(u);
                work.push_back(u);
            }
        });
    }
    return attr;
}

// Returns the Even winning region within `arena` (a trap-closed subgame).
inline VertexSet zielonka(const ParityGame& p, const VertexSet& arena) {
    if (arena.empty()) return arena;
    int q = INT_MAX;
    arena.for_each([&](Vertex v) { q = std::min(q, p.prio(v)); });
    const bool even_player = q % 2 == 0;
    VertexSet top(p.size());
    arena.for_each([&](Vertex v) {
        if (p.prio(v) == q) top.insert(v);
    });
    VertexSet a = attractor(p, arena, top, even_player);
    VertexSet w0 = zielonka(p, arena - a);
    VertexSet opp = even_player ? (arena - a) - w0 : w0;
    if (opp.empty()) return even_player ? arena : VertexSet(p.size());
    VertexSet b = attractor(p, arena, opp, !even_player);
    VertexSet w0b = zielonka(p, arena - b);
    return even_player ? w0b : (w0b | b);
}

}  // namespace parity_detail

// winner[v] = 0 if Even wins from v, 1 otherwise.
inline std::vector<int> zielonka_solve(const ParityGame& p) {
    require_no_dead_ends(p);
    VertexSet w0 = parity_detail::zielonka(p, p.graph.all());
    std::vector<int> winner(static_cast<std::size_t>(p.size()));
    for (Vertex v = 0; v < p.size(); ++v) winner[static_cast<std::size_t>(v)] = w0.contains(v) ? 0 : 1;
    return winner;
}

}  // namespace sdagw
