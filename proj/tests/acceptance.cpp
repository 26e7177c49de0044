#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <iostream>
#include <set>
#include <sstream>

#include <sdagw/structured.hpp>

#include "parity_support.hpp"

using namespace sdagw;
using sdagw::testing::chain_decomposition;
using sdagw::testing::random_corpus;
using sdagw::testing::random_games;
using sdagw::testing::split_decomposition;
using sdagw::testing::split_game;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

struct Verdict {
    bool pass = true;
    std::string detail;
};

int failures = 0;

void report(int id, const char* title, double limit_s, const std::function<Verdict()>& body) {
    auto t0 = Clock::now();
    Verdict v;
    try {
        v = body();
    } catch (const std::exception& e) {
        v = {false, std::string("exception: ") + e.what()};
    }
    const double took = seconds_since(t0);
    std::ostringstream line;
    line.setf(std::ios::fixed);
    line.precision(1);
    if (limit_s > 0 && took > limit_s) v.pass = false;
    line << "criterion " << id << " " << (v.pass ? "PASS" : "FAIL") << "  " << title << "  (" << took << " s";
    if (limit_s > 0) line << ", limit " << limit_s << " s";
    line << ")  " << v.detail;
    std::cout << line.str() << std::endl;
    failures += !v.pass;
}

Digraph graph_from_mask(int n, unsigned mask) {
    Digraph d(n);
    int bit = 0;
    for (Vertex u = 0; u < n; ++u)
        for (Vertex v = 0; v < n; ++v)
            if (u != v && (mask >> bit++ & 1U)) d.add_edge(u, v);
    return d;
}

VertexSet set_from_mask(int n, unsigned mask) {
    VertexSet s(n);
    for (Vertex v = 0; v < n; ++v)
        if (mask >> v & 1U) s.insert(v);
    return s;
}

// ---------------------------------------------------------------------------

Verdict uncrossing_identity() {
    std::size_t checked = 0, bad = 0;
    for (int n = 1; n <= 4; ++n) {
        const unsigned graphs = 1U << (n * (n - 1));
        const unsigned subsets = 1U << n;
        for (unsigned gm = 0; gm < graphs; ++gm) {
            Digraph d = graph_from_mask(n, gm);
            for (unsigned sm = 0; sm < subsets; ++sm) {
                const VertexSet s = set_from_mask(n, sm);
                std::vector<std::optional<Separation>> by_x(subsets);
                for (unsigned xm = 0; xm < subsets; ++xm)
                    if (!(xm & sm)) by_x[xm] = range_sep(d, s, set_from_mask(n, xm));
                for (unsigned xm = 0; xm < subsets; ++xm)
                    for (unsigned ym = 0; ym < subsets; ++ym) {
                        if ((xm & sm) || (ym & sm)) continue;
                        ++checked;
                        if (!(meet(*by_x[xm], *by_x[ym]) == *by_x[xm | ym])) ++bad;
                    }
            }
        }
    }
    return {bad == 0, std::to_string(checked) + " triples over all digraphs with n <= 4, " + std::to_string(bad) + " violations"};
}

// Shared corpus for criteria 2 to 4 and the state-count half of 7.
struct GameInstance {
    Digraph d;
    int width = -1;
};

std::vector<GameInstance> game_corpus() {
    std::vector<GameInstance> out;
    for (const Digraph& d : random_corpus(300, 6, 2024)) out.push_back({d, compute_sdag_width(d, d.vertex_count()).k});
    return out;
}

const std::vector<GameInstance>& corpus() {
    static const std::vector<GameInstance> c = game_corpus();
    return c;
}

CopStrategy winning_strategy(const SdagGame& game) {
    GameSolver solver(game);
    return complete_strategy(solver, solver.extract_strategy());
}

// Adversarial plus ten random robbers from every start.
std::size_t play_violations(const SdagGame& game, const CopStrategy& st, std::size_t& plays) {
    const int n = game.n();
    std::size_t bad = 0;
    for (Vertex r0 = 0; r0 < n; ++r0)
        for (int pol = 0; pol <= 10; ++pol) {
            RobberPolicy policy = pol == 0 ? RobberPolicy::adversarial() : RobberPolicy::random(static_cast<std::uint64_t>(7919 * r0 + pol));
            Play play = simulate_play(game, st, policy, r0);
            ++plays;
            std::set<std::string> seen;
            bool repeats = false;
            for (const auto& s : play.states) repeats = repeats || !seen.insert(s.to_string()).second;
            if (!play.cop_won() || play.states.size() > static_cast<std::size_t>(2 * n + 2) || repeats) ++bad;
        }
    return bad;
}

Verdict game_soundness() {
    std::size_t plays = 0, bad = 0, games = 0;
    for (const GameInstance& in : corpus()) {
        for (int k = in.width; k <= in.d.vertex_count(); ++k) {
            SdagGame game(in.d, k);
            bad += play_violations(game, winning_strategy(game), plays);
            ++games;
        }
    }
    return {bad == 0 && corpus().size() >= 300, std::to_string(corpus().size()) + " digraphs, " + std::to_string(games) + " (digraph, k) games, " +
                                                   std::to_string(plays) + " plays, " + std::to_string(bad) + " violations"};
}

Verdict width_certificates() {
    std::size_t bad = 0, certs = 0;
    for (const GameInstance& in : corpus()) {
        const int n = in.d.vertex_count();
        if (in.width > 0) {
            SdagGame below(in.d, in.width - 1);
            if (!GameSolver(below).losing_start()) ++bad;
        }
        for (int k = in.width; k <= n; ++k) {
            SdagGame game(in.d, k);
            SDagReport rep = validate_sdag(in.d, strategy_to_sdag(game, winning_strategy(game)));
            ++certs;
            if (!rep.valid() || rep.width > k) ++bad;
        }
    }
    const std::pair<const char*, Digraph> pins[] = {
        {"single vertex", Digraph(1)}, {"edge", Digraph(2, {{0, 1}})}, {"path3", gen_digraph("path", 3, 0)}, {"C3", gen_digraph("cycle", 3, 0)}};
    const int expect[] = {1, 1, 1, 2};
    std::string pinned;
    for (int i = 0; i < 4; ++i) {
        int k = compute_sdag_width(pins[i].second, pins[i].second.vertex_count()).k;
        pinned += std::string(i ? ", " : "") + pins[i].first + "=" + std::to_string(k);
        if (k != expect[i]) ++bad;
    }
    return {bad == 0, std::to_string(certs) + " certificates, robber wins at k-1 checked, pins " + pinned + ", " + std::to_string(bad) + " violations"};
}

constexpr int nice_constant = 4;

Verdict round_trip() {
    std::size_t bad = 0, trips = 0, plays = 0;
    double worst_ratio = 0;
    for (const GameInstance& in : corpus()) {
        const int n = in.d.vertex_count();
        for (int k = in.width; k <= n; ++k) {
            SdagGame game(in.d, k);
            SDag s = strategy_to_sdag(game, winning_strategy(game));
            SDag nice = nicefy(in.d, s);
            ++trips;
            if (!validate_nice(in.d, nice).nice() || !validate_sdag(in.d, nice).valid()) ++bad;
            const double ratio = static_cast<double>(nice.node_count()) / (static_cast<double>(s.node_count()) * n);
            worst_ratio = std::max(worst_ratio, ratio);
            if (ratio > nice_constant) ++bad;
            CopStrategy back = sdag_to_strategy(game, nice);
            for (const auto& [p, q] : back.f) bad += !game.is_legal_cop_move(p, q);
            bad += play_violations(game, back, plays);
        }
    }
    std::ostringstream os;
    os << trips << " round trips, " << plays << " plays, max |T'|/(|T| n) = " << worst_ratio << " (C = " << nice_constant << "), " << bad << " violations";
    return {bad == 0, os.str()};
}

// Profile-mode engine on nice DAG decompositions against the brute-force oracle.
Verdict frontier_engine() {
    std::size_t samples = 0, splits = 0, bad = 0;
    std::mt19937_64 rng(505);
    auto check = [&](const ParityGame& p, const DagDecomposition& raw) {
        NiceDagDec nice = nicefy_dagdec(p.graph, raw);
        const DagDecomposition& dd = nice.dd;
        auto profiles = propagate_profiles(p, dd);
        auto below = dd.below();
        for (int t = 0; t < dd.node_count(); ++t) {
            VertexSet region = dd.region(t, below);
            if (region.size() > 7) continue;
            ++samples;
            splits += dd.children(t).size() == 2;
            if (dominance_filter(profiles.at(t).project()) != frontier_oracle(p, region, dd.bag(t))) ++bad;
        }
    };
    for (const ParityGame& p : random_games(200, 8, 4, 5050)) check(p, chain_decomposition(p.graph, rng));
    for (int i = 0; i < 200; ++i) {
        VertexSet a, b;
        ParityGame p = split_game(3 + i % 6, rng, &a, &b);
        check(p, split_decomposition(p.graph, a, b, rng));
    }
    return {bad == 0 && samples >= 500, std::to_string(samples) + " (node, region) samples, " + std::to_string(splits) + " at split nodes, " +
                                            std::to_string(bad) + " mismatches"};
}

Verdict solver_equivalence() {
    std::size_t games = 0, bad = 0;
    for (const ParityGame& p : random_games(1000, 9, 5, 6006)) {
        ++games;
        if (solve_parity_structured(p, p.size()).winner != zielonka_solve(p)) ++bad;
    }
    std::size_t banded = 0;
    int max_n = 0;
    for (int n = 10; n <= 40; n += 5)
        for (std::uint64_t seed = 1; seed <= 2; ++seed) {
            std::mt19937_64 rng(seed * 1000 + static_cast<std::uint64_t>(n));
            ParityGame p = random_parity_game(gen_digraph("banded(2)", n, seed), 5, rng);
            ++banded;
            max_n = std::max(max_n, n);
            if (solve_parity_structured(p, n).winner != zielonka_solve(p)) ++bad;
        }
    return {bad == 0, std::to_string(games) + " random games (n <= 9) and " + std::to_string(banded) + " banded(2) games up to n = " + std::to_string(max_n) +
                          ", " + std::to_string(bad) + " mismatches"};
}

// Repeats `f` until 0.2 s have passed and returns the mean time per call.
double time_call(const std::function<void()>& f) {
    auto t0 = Clock::now();
    int calls = 0;
    do {
        f();
        ++calls;
    } while (seconds_since(t0) < 0.2);
    return seconds_since(t0) / calls;
}

double slope(const std::vector<double>& x, const std::vector<double>& y, std::size_t lo, std::size_t hi) {
    double mx = 0, my = 0;
    const double m = static_cast<double>(hi - lo);
    for (std::size_t i = lo; i < hi; ++i) mx += x[i] / m, my += y[i] / m;
    double sxy = 0, sxx = 0;
    for (std::size_t i = lo; i < hi; ++i) sxy += (x[i] - mx) * (y[i] - my), sxx += (x[i] - mx) * (x[i] - mx);
    return sxy / sxx;
}

// Global log-log fit over the per-size means of log time, and the slope over
// each window of three consecutive sizes.
bool slopes_stable(const std::vector<int>& ns, const std::vector<double>& log_t, std::ostringstream& os) {
    std::vector<double> lx;
    for (int n : ns) lx.push_back(std::log(n));
    const double global = slope(lx, log_t, 0, lx.size());
    os << "slope " << global << " windows [";
    bool ok = true;
    for (std::size_t i = 0; i + 3 <= lx.size(); ++i) {
        const double s = slope(lx, log_t, i, i + 3);
        os << (i ? " " : "") << s;
        ok = ok && std::abs(s - global) <= 0.5;
    }
    os << "]";
    return ok;
}

double mean_log(const std::vector<double>& t) {
    double s = 0;
    for (double x : t) s += std::log(x);
    return s / static_cast<double>(t.size());
}

double log_median(std::vector<double> t) {
    std::nth_element(t.begin(), t.begin() + static_cast<std::ptrdiff_t>(t.size() / 2), t.end());
    return std::log(t[t.size() / 2]);
}

Verdict complexity_smoke() {
    std::size_t graphs = 0, over = 0;
    for (const GameInstance& in : corpus()) {
        const int n = in.d.vertex_count();
        for (int k = 0; k <= std::min(n, 3); ++k) {
            GameGraph g = build_game_graph(SdagGame(in.d, k));
            ++graphs;
            if (g.size() > state_bound(n, k)) ++over;
        }
    }
    const std::vector<int> ns{10, 15, 20, 25, 30, 35, 40};
    constexpr int seeds = 15;
    std::vector<double> width_mean, solve_mean, width_med, solve_med;
    for (int n : ns) {
        std::vector<double> wt, st;
        for (std::uint64_t seed = 1; seed <= seeds; ++seed) {
            std::mt19937_64 rng(seed * 1000 + static_cast<std::uint64_t>(n));
            ParityGame p = random_parity_game(gen_digraph("banded(2)", n, seed), 5, rng);
            WidthResult w = compute_sdag_width(p.graph, n, true);
            if (w.states_evaluated > state_bound(n, w.k)) ++over;
            wt.push_back(time_call([&] { compute_sdag_width(p.graph, n, true); }));
            st.push_back(time_call([&] { solve_parity_structured(p, n); }));
        }
        width_mean.push_back(mean_log(wt));
        solve_mean.push_back(mean_log(st));
        width_med.push_back(log_median(wt));
        solve_med.push_back(log_median(st));
    }
    std::ostringstream os;
    os.precision(2);
    os << graphs << " game graphs within the state bound (" << over << " over); banded(2) n = 10..40, " << seeds
       << " seeds per size, geometric means: width ";
    const bool w_ok = slopes_stable(ns, width_mean, os);
    os << ", solve ";
    const bool s_ok = slopes_stable(ns, solve_mean, os);
    os << "; times width";
    for (double t : width_mean) os << " " << std::exp(t);
    os << ", solve";
    for (double t : solve_mean) os << " " << std::exp(t);
    os << "; for reference, medians: width ";
    slopes_stable(ns, width_med, os);
    os << ", solve ";
    slopes_stable(ns, solve_med, os);
    return {over == 0 && w_ok && s_ok, os.str()};
}

Verdict format_fidelity() {
    int files = 0, stable = 0;
    for (int i = 1; i <= 20; ++i) {
        char name[256];
        std::snprintf(name, sizeof name, "%s/pgsolver/game%02d.pg", SDAGW_TEST_DATA, i);
        std::ifstream in(name, std::ios::binary);
        if (!in) continue;
        ++files;
        std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
        stable += emit_pgsolver(parse_pgsolver(text)) == text;
    }
    return {files == 20 && stable == 20, std::to_string(stable) + " of " + std::to_string(files) + " corpus files byte-stable"};
}

}  // namespace

// With arguments, runs only the listed criteria.
int main(int argc, char** argv) {
    std::set<int> only;
    for (int i = 1; i < argc; ++i) only.insert(std::atoi(argv[i]));
    auto run = [&](int id, const char* title, double limit_s, const std::function<Verdict()>& body) {
        if (only.empty() || only.count(id)) report(id, title, limit_s, body);
    };
    run(1, "range separations uncross", 60, uncrossing_identity);
    run(2, "plays under winning strategies", 300, game_soundness);
    run(3, "width certificates", 0, width_certificates);
    run(4, "strategy / S-DAG round trip", 0, round_trip);
    run(5, "frontier engine vs oracle", 900, frontier_engine);
    run(6, "structured solver vs Zielonka", 1800, solver_equivalence);
    run(7, "complexity smoke", 0, complexity_smoke);
    run(8, "PGSolver round trip", 0, format_fidelity);
    std::cout << (failures ? std::to_string(failures) + " criteria failed" : std::string("all criteria passed")) << std::endl;
    return failures ? 1 : 0;
}
