#include <chrono>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <random>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include <sdagw/structured.hpp>

using namespace sdagw;
using json = nlohmann::json;

namespace {

constexpr int exit_ok = 0;
constexpr int exit_error = 1;
constexpr int exit_exceeded = 2;
constexpr int exit_mismatch = 3;

struct RunConfig {
    std::string input;
    std::string second_input;
    int k = -1;
    int max_k = -1;
    bool nice = false;
    bool pretty = false;
    bool unroll_loops = false;
    std::string engine = "sdag";
    std::string emit;
    std::string model = "erdos(0.3)";
    int n = 8;
    int max_priority = 5;
    std::uint64_t seed = 1;
    std::string scale = "n=7";
    int samples = 150;
    double time_budget = 600;
    std::string fault = "none";
};

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw InputError("cannot read " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_file(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw InputError("cannot write " + path);
    out << text;
}

void print(const json& j, bool pretty) { std::cout << (pretty ? j.dump(2) : j.dump()) << "\n"; }

Digraph read_graph(const std::string& path) { return parse_edge_list(read_file(path)); }

SDag read_sdag(const std::string& path, int n) {
    try {
        return sdag_from_json(json::parse(read_file(path)), n);
    } catch (const json::exception& e) {
        throw InputError(path + ": " + e.what());
    }
}

// ---------------------------------------------------------------------------

int cmd_width(const RunConfig& cfg) {
    Digraph d = read_graph(cfg.input);
    const int n = d.vertex_count();
    const int max_k = cfg.max_k < 0 ? n : cfg.max_k;
    WidthResult r = compute_sdag_width(d, max_k, cfg.nice);
    json j;
    j["found"] = r.found;
    j["max_k"] = max_k;
    j["k"] = r.found ? json(r.k) : json(nullptr);
    j["robber_starts"] = r.robber_starts;
    j["game_stats"] = {{"states_evaluated", r.states_evaluated}, {"state_bound", r.found ? state_bound(n, r.k) : state_bound(n, max_k)}};
    j["sdag"] = r.found ? sdag_to_json(r.sdag) : json(nullptr);
    if (r.found && !cfg.emit.empty()) write_file(cfg.emit, sdag_to_json(r.sdag).dump(2) + "\n");
    if (cfg.pretty) {
        if (r.found)
            std::cout << "width  " << r.k << "\nnodes  " << r.sdag.node_count() << "\narcs   " << r.sdag.arc_count() << "\n";
        else
            std::cout << "width exceeds " << max_k << "\n";
        std::cout << "states " << r.states_evaluated << "\n";
    } else {
        print(j, false);
    }
    return r.found ? exit_ok : exit_exceeded;
}

int cmd_validate_sdag(const RunConfig& cfg) {
    Digraph d = read_graph(cfg.input);
    SDag s = read_sdag(cfg.second_input, d.vertex_count());
    SDagReport r = validate_sdag(d, s);
    json j{{"valid", r.valid()},     {"acyclic", r.acyclic},   {"out_degree_ok", r.out_degree_ok}, {"separations_ok", r.separations_ok},
           {"consistent", r.consistent}, {"width", r.width}, {"problems", r.problems}};
    bool ok = r.valid();
    if (cfg.nice) {
        NiceReport nr = validate_nice(d, s);
        j["nice"] = {{"nice", nr.nice()}, {"n1", nr.n1}, {"n2", nr.n2}, {"n3", nr.n3}, {"n4", nr.n4}, {"n5", nr.n5}, {"witnesses", nr.witnesses}};
        ok = ok && nr.nice();
    }
    if (cfg.pretty) {
        std::cout << (r.valid() ? "valid" : "invalid") << ", width " << r.width << "\n";
        for (const auto& w : r.problems) std::cout << "  " << w << "\n";
        if (cfg.nice) {
            std::cout << (j["nice"]["nice"].get<bool>() ? "nice" : "not nice") << "\n";
            for (const auto& w : j["nice"]["witnesses"]) std::cout << "  " << w.get<std::string>() << "\n";
        }
    } else {
        print(j, false);
    }
    return ok ? exit_ok : exit_exceeded;
}

int cmd_nicefy(const RunConfig& cfg) {
    Digraph d = read_graph(cfg.input);
    SDag s = read_sdag(cfg.second_input, d.vertex_count());
    SDag out = nicefy(d, s);
    json j{{"nodes_before", s.node_count()}, {"nodes_after", out.node_count()}, {"width_before", width(s)}, {"width_after", width(out)}, {"sdag", sdag_to_json(out)}};
    if (!cfg.emit.empty()) write_file(cfg.emit, sdag_to_json(out).dump(2) + "\n");
    if (cfg.pretty)
        std::cout << "nodes " << s.node_count() << " -> " << out.node_count() << "\nwidth " << width(s) << " -> " << width(out) << "\n";
    else
        print(j, false);
    return exit_ok;
}

const char* kind_name(const GameState& s) { return s.is_cigs() ? "CIGS" : s.kind == StateKind::Rigs1 ? "RIGS1" : "RIGS2"; }

int cmd_game_graph(const RunConfig& cfg) {
    Digraph d = read_graph(cfg.input);
    if (cfg.k < 0) throw InputError("--k is required");
    SdagGame game(d, cfg.k);
    GameGraph g = build_game_graph(game);
    GameSolution sol = solve_game(g);
    json states = json::array();
    std::size_t cigs = 0;
    for (std::size_t i = 0; i < g.size(); ++i) {
        const GameState& s = g.states[i];
        cigs += s.is_cigs();
        json moves = json::array();
        if (s.is_cigs()) {
            for (int x : g.cop_succ[i]) moves.push_back(x);
        } else {
            for (const auto& o : g.robber_succ[i]) moves.push_back({{"to", o.to}, {"next", {o.next[0], o.next[1]}}});
        }
        states.push_back({{"id", i}, {"kind", kind_name(s)}, {"state", s.to_string()}, {"cop_wins", static_cast<bool>(sol.cop_wins[i])}, {"moves", moves}});
    }
    if (!cfg.emit.empty()) write_file(cfg.emit, game_graph_to_dot(g, &sol.cop_wins));
    json j{{"k", cfg.k},
           {"states", g.size()},
           {"cigs", cigs},
           {"rigs", g.size() - cigs},
           {"starts", g.starts},
           {"cop_wins_all_starts", sol.cop_wins_all_starts},
           {"violations", g.violations},
           {"graph", states}};
    if (cfg.pretty) {
        std::cout << "k " << cfg.k << ", " << g.size() << " states (" << cigs << " CIGS), cop " << (sol.cop_wins_all_starts ? "wins" : "loses") << "\n";
        for (const auto& s : states) std::cout << std::setw(6) << s["id"].get<std::size_t>() << "  " << (s["cop_wins"].get<bool>() ? "cop   " : "robber") << "  " << s["state"].get<std::string>() << "\n";
    } else {
        print(j, false);
    }
    return exit_ok;
}

json winner_json(const ParityGame& p, const std::vector<int>& w) {
    json even = json::array(), odd = json::array();
    for (Vertex v = 0; v < p.size(); ++v) (w[static_cast<std::size_t>(v)] == 0 ? even : odd).push_back(v);
    return {{"winner", w}, {"even", even}, {"odd", odd}};
}

int cmd_solve(const RunConfig& cfg) {
    if (cfg.engine != "sdag" && cfg.engine != "zielonka" && cfg.engine != "both") throw InputError("--engine must be sdag, zielonka or both");
    ParityGame p = parse_pgsolver(read_file(cfg.input), PgParseOptions{cfg.unroll_loops});
    require_no_dead_ends(p);
    json j{{"engine", cfg.engine}, {"n", p.size()}};
    std::optional<std::vector<int>> sdag_w, zl_w;
    if (cfg.engine != "zielonka") {
        StructuredOptions opt;
        opt.keep_frontiers = !cfg.emit.empty();
        StructuredResult r = solve_parity_structured(p, cfg.max_k < 0 ? p.size() : cfg.max_k, opt);
        j["found"] = r.found;
        if (!r.found) {
            j["k"] = nullptr;
            print(j, cfg.pretty);
            return exit_exceeded;
        }
        j["k"] = r.k;
        j["max_frontier"] = r.max_frontier;
        sdag_w = r.winner;
        if (!cfg.emit.empty()) {
            SDagView view = view_sdag(r.sdag);
            json nodes = json::array();
            for (const auto& [t, fr] : r.frontiers)
                nodes.push_back({{"node", t}, {"bag", set_to_json(view.bag(t))}, {"region", set_to_json(view.region(t))}, {"frontier", frontier_to_json(fr)}});
            write_file(cfg.emit, json{{"k", r.k}, {"sdag", sdag_to_json(r.sdag)}, {"nodes", nodes}}.dump(2) + "\n");
        }
    }
    if (cfg.engine != "sdag") zl_w = zielonka_solve(p);
    const std::vector<int>& w = sdag_w ? *sdag_w : *zl_w;
    j.update(winner_json(p, w));
    bool agree = true;
    if (sdag_w && zl_w) {
        json diff = json::array();
        for (Vertex v = 0; v < p.size(); ++v)
            if ((*sdag_w)[static_cast<std::size_t>(v)] != (*zl_w)[static_cast<std::size_t>(v)]) diff.push_back(v);
        agree = diff.empty();
        j["agree"] = agree;
        j["disagreements"] = diff;
    }
    if (cfg.pretty) {
        std::cout << std::left << std::setw(8) << "vertex" << std::setw(16) << "name" << "winner\n";
        for (Vertex v = 0; v < p.size(); ++v) {
            const auto& name = p.names[static_cast<std::size_t>(v)];
            std::cout << std::setw(8) << v << std::setw(16) << (name ? *name : "-") << (w[static_cast<std::size_t>(v)] == 0 ? "Even" : "Odd") << "\n";
        }
        if (j.contains("k")) std::cout << "S-DAG width " << j["k"] << "\n";
        if (!agree) std::cout << "engines disagree on " << j["disagreements"].dump() << "\n";
    } else {
        print(j, false);
    }
    return agree ? exit_ok : exit_mismatch;
}

int cmd_gen(const RunConfig& cfg, const std::string& what) {
    Digraph d = gen_digraph(cfg.model, cfg.n, cfg.seed);
    std::string text;
    if (what == "graph") {
        text = to_edge_list(d);
    } else {
        std::mt19937_64 rng(cfg.seed);
        text = emit_pgsolver(random_parity_game(d, cfg.max_priority, rng));
    }
    if (cfg.emit.empty())
        std::cout << text;
    else
        write_file(cfg.emit, text);
    return exit_ok;
}

// ---------------------------------------------------------------------------
// oracle-check

struct Suite {
    std::size_t checked = 0;
    std::size_t mismatches = 0;
    std::vector<std::string> examples;

    void fail(const std::string& what) {
        ++mismatches;
        if (examples.size() < 5) examples.push_back(what);
    }
    json to_json() const { return {{"checked", checked}, {"mismatches", mismatches}, {"examples", examples}}; }
};

// Hoare filter over a deliberately wrong outcome order: exit priorities compare reversed.
Frontier faulty_filter(const Frontier& fr) {
    auto o_leq = [](const Outcome& a, const Outcome& b) {
        if (a.is_exit() && b.is_exit()) return a.v == b.v && priority_leq(b.p, a.p);
        return outcome_leq(a, b);
    };
    auto r_leq = [&](const ResultSet& a, const ResultSet& b) {
        for (const Outcome& x : a) {
            bool up = false;
            for (const Outcome& y : b) up = up || o_leq(x, y);
            if (!up) return false;
        }
        return true;
    };
    Frontier out;
    for (const auto& [v, rs] : fr.at)
        for (const auto& r : rs) {
            bool dominated = false;
            for (const auto& r2 : rs) dominated = dominated || (r2 != r && r_leq(r, r2) && !r_leq(r2, r));
            if (!dominated) out.add(v, r);
        }
    return out;
}

int parse_scale(const std::string& s) {
    if (s.rfind("n=", 0) != 0) throw InputError("--scale expects n=<count>");
    int n = std::stoi(s.substr(2));
    if (n < 2 || n > 12) throw InputError("--scale n must lie in 2..12");
    return n;
}

int cmd_oracle_check(const RunConfig& cfg) {
    const int max_n = parse_scale(cfg.scale);
    if (cfg.fault != "none" && cfg.fault != "outcome-leq") throw InputError("--inject-fault must be none or outcome-leq");
    if (cfg.samples <= 0 || cfg.time_budget <= 0) throw InputError("budgets must be positive");
    const bool faulty = cfg.fault == "outcome-leq";
    const auto t0 = std::chrono::steady_clock::now();
    auto elapsed = [&] { return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count(); };
    bool exhausted = false;
    std::mt19937_64 rng(cfg.seed);
    Suite unc, width_s, frontier_s, solver_s;

    for (int i = 0; i < cfg.samples && !exhausted; ++i) {
        exhausted = elapsed() > cfg.time_budget;
        const int n = 2 + static_cast<int>(rng() % static_cast<std::uint64_t>(max_n - 1));
        Digraph d = gen_digraph("erdos(0.35)", n, rng());

        // Uncrossing of range separations.
        VertexSet s(n), x(n), y(n);
        for (Vertex v = 0; v < n; ++v) {
            auto r = rng() % 4;
            if (r == 0) s.insert(v);
            if (r == 1) x.insert(v);
            if (r == 2) y.insert(v);
        }
        ++unc.checked;
        if (!(meet(range_sep(d, s, x), range_sep(d, s, y)) == range_sep(d, s, x | y))) unc.fail("n=" + std::to_string(n) + " s=" + s.to_string());

        // Width certificates.
        if (n <= 6) {
            WidthResult w = compute_sdag_width(d, n, false);
            ++width_s.checked;
            SDagReport rep = validate_sdag(d, w.sdag);
            if (!w.found || !rep.valid() || rep.width > w.k || static_cast<int>(w.robber_starts.size()) != w.k)
                width_s.fail("width n=" + std::to_string(n) + " edges " + json(d.edges()).dump());
        }

        // Gadget frontiers and winners.
        ParityGame p = random_parity_game(d, 4, rng);
        WidthResult w = compute_sdag_width(p.graph, n, true);
        SDagView view = view_sdag(w.sdag);
        for (int t = 0; t < w.sdag.node_count(); ++t) {
            VertexSet region = view.region(t);
            auto kids = view.children(t);
            if (kids.empty() || region.size() > 6) continue;
            ProfileSet c1 = profile_oracle(p, view.region(kids[0]), view.bag(kids[0]));
            Frontier got;
            if (kids.size() == 1) {
                got = profiles_deg_one(p, view, t, c1).project();
            } else {
                if (build_branch_gadget(p, view, t).copies_interact()) continue;
                got = profiles_branch(p, view, t, c1, profile_oracle(p, view.region(kids[1]), view.bag(kids[1])));
            }
            ++frontier_s.checked;
            Frontier lhs = faulty ? faulty_filter(got) : dominance_filter(got);
            if (lhs != frontier_oracle(p, region, view.bag(t))) frontier_s.fail("node " + std::to_string(t) + " game " + json(p.graph.edges()).dump());
        }
        ++solver_s.checked;
        if (solve_parity_structured(p, n).winner != zielonka_solve(p)) solver_s.fail("game " + json(p.graph.edges()).dump());
    }

    const std::size_t bad = unc.mismatches + width_s.mismatches + frontier_s.mismatches + solver_s.mismatches;
    json j{{"seed", cfg.seed},
           {"scale", max_n},
           {"fault", cfg.fault},
           {"budget_exhausted", exhausted},
           {"suites", {{"uncrossing", unc.to_json()}, {"width", width_s.to_json()}, {"frontier", frontier_s.to_json()}, {"solver", solver_s.to_json()}}},
           {"ok", bad == 0}};
    if (cfg.pretty) {
        for (const auto& [name, su] : j["suites"].items())
            std::cout << std::left << std::setw(12) << name << std::setw(8) << su["checked"].get<std::size_t>() << su["mismatches"].get<std::size_t>() << " mismatches\n";
        std::cout << std::fixed << std::setprecision(1) << elapsed() << " s" << (exhausted ? ", time budget exhausted" : "") << "\n";
    } else {
        print(j, false);
    }
    return bad == 0 ? exit_ok : exit_mismatch;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"S-DAG width and structured parity game solving"};
    app.require_subcommand(1);
    RunConfig cfg;
    app.add_flag("--pretty", cfg.pretty, "Human-readable tables instead of JSON");

    auto* width = app.add_subcommand("width", "Minimum S-DAG width of a digraph (exit 2 when it exceeds --max-k)");
    width->add_option("graph", cfg.input, "Edge-list file")->required();
    width->add_option("--max-k", cfg.max_k, "Largest width to try (default n)");
    width->add_flag("--nice", cfg.nice, "Nicefy the certificate");
    width->add_option("--emit", cfg.emit, "Write the S-DAG JSON here");

    auto* validate = app.add_subcommand("validate-sdag", "Check an S-DAG JSON file (exit 2 when invalid)");
    validate->add_option("graph", cfg.input, "Edge-list file")->required();
    validate->add_option("sdag", cfg.second_input, "S-DAG JSON file")->required();
    validate->add_flag("--nice", cfg.nice, "Also check the nice conditions");

    auto* nice = app.add_subcommand("nicefy", "Rewrite an S-DAG into nice form");
    nice->add_option("graph", cfg.input, "Edge-list file")->required();
    nice->add_option("sdag", cfg.second_input, "S-DAG JSON file")->required();
    nice->add_option("--emit", cfg.emit, "Write the nice S-DAG JSON here");

    auto* gg = app.add_subcommand("game-graph", "Dump the reachable game graph with winners");
    gg->add_option("graph", cfg.input, "Edge-list file")->required();
    gg->add_option("--k", cfg.k, "Game size")->required();
    gg->add_option("--emit-dot", cfg.emit, "Write a DOT rendering here");

    auto* solve = app.add_subcommand("solve", "Solve a PGSolver parity game (exit 2 width exceeded, 3 engines disagree)");
    solve->add_option("game", cfg.input, "PGSolver file")->required();
    solve->add_option("--engine", cfg.engine, "sdag, zielonka or both")->check(CLI::IsMember({"sdag", "zielonka", "both"}));
    solve->add_option("--max-k", cfg.max_k, "Largest S-DAG width to try (default n)");
    solve->add_option("--emit-frontiers", cfg.emit, "Write per-node frontiers as JSON");
    solve->add_flag("--unroll-loops", cfg.unroll_loops, "Replace self-loops by 2-cycles through fresh vertices");

    auto* gen = app.add_subcommand("gen", "Deterministic generators");
    gen->require_subcommand(1);
    std::string gen_what;
    for (const char* what : {"graph", "game"}) {
        auto* sub = gen->add_subcommand(what, std::string("Generate a ") + (std::string(what) == "graph" ? "digraph edge list" : "PGSolver game"));
        sub->add_option("--model", cfg.model, "erdos(p), cycle, path, dag(p) or banded(w)");
        sub->add_option("--n", cfg.n, "Vertex count");
        sub->add_option("--seed", cfg.seed, "Random seed");
        sub->add_option("-o,--output", cfg.emit, "Output file (default stdout)");
        if (std::string(what) == "game") sub->add_option("--max-priority", cfg.max_priority, "Largest priority");
        sub->callback([&gen_what, what] { gen_what = what; });
    }

    auto* oc = app.add_subcommand("oracle-check", "Seeded oracle sweeps (exit 3 on any mismatch)");
    oc->add_option("--seed", cfg.seed, "Random seed");
    oc->add_option("--scale", cfg.scale, "Largest instance, as n=<count>");
    oc->add_option("--samples", cfg.samples, "Number of random instances");
    oc->add_option("--time-budget", cfg.time_budget, "Stop sampling after this many seconds");
    oc->add_option("--inject-fault", cfg.fault, "none or outcome-leq (self-test of the checker)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? exit_ok : exit_error;
    }

    try {
        if (*width) return cmd_width(cfg);
        if (*validate) return cmd_validate_sdag(cfg);
        if (*nice) return cmd_nicefy(cfg);
        if (*gg) return cmd_game_graph(cfg);
        if (*solve) return cmd_solve(cfg);
        if (*gen) return cmd_gen(cfg, gen_what);
        if (*oc) return cmd_oracle_check(cfg);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return exit_error;
    }
    return exit_error;
}
