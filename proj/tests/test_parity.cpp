#include <gtest/gtest.h>

#include <fstream>
#include <set>

#include <sdagw/parity.hpp>

#include "parity_support.hpp"

using namespace sdagw;
using sdagw::testing::brute_force_winners;
using sdagw::testing::mask_set;
using sdagw::testing::random_games;

namespace {

ParityGame make_game(int n, std::vector<std::pair<Vertex, Vertex>> edges, std::vector<Vertex> evens, std::vector<int> prio) {
    return ParityGame(Digraph(n, edges), VertexSet(n, evens), std::move(prio));
}

// Outcomes reachable by walks of length <= 2n+1 in the Even-pruned region,
// closed under ⊴-minimisation. Lassos give the infinite outcomes.
ResultSet walk_result(const ParityGame& p, const VertexSet& region, const EvenStrategy& f, Vertex v) {
    const int n = p.size();
    std::vector<Outcome> found;
    std::vector<Vertex> walk{v};
    std::function<void()> dfs = [&]() {
        Vertex u = walk.back();
        if (!region.contains(u)) {
            found.push_back(play_outcome(p, walk));
            return;
        }
        for (std::size_t i = 0; i + 1 < walk.size(); ++i)
            if (walk[i] == u) {
                std::vector<Vertex> prefix(walk.begin(), walk.begin() + static_cast<long>(i));
                std::vector<Vertex> cycle(walk.begin() + static_cast<long>(i), walk.end() - 1);
                found.push_back(lasso_outcome(p, prefix, cycle));
            }
        if (static_cast<int>(walk.size()) > 2 * n + 1) return;
        std::vector<Vertex> next = p.is_even(u) ? std::vector<Vertex>{f[static_cast<std::size_t>(u)]} : p.graph.out(u).to_vector();
        for (Vertex w : next) {
            walk.push_back(w);
            dfs();
            walk.pop_back();
        }
    };
    dfs();
    return make_result(found);
}

}  // namespace

TEST(PriorityOrder, Examples) {
    EXPECT_TRUE(priority_leq(1, 2));
    EXPECT_TRUE(priority_leq(4, 2));
    EXPECT_FALSE(priority_leq(3, 1));
    EXPECT_TRUE(priority_leq(1, 3));
    EXPECT_FALSE(priority_leq(0, 5));
}

TEST(PriorityOrder, TotalOrderAndMonotoneMin) {
    for (int a = 0; a <= 12; ++a)
        for (int b = 0; b <= 12; ++b) {
            EXPECT_TRUE(priority_leq(a, b) || priority_leq(b, a));
            if (priority_leq(a, b) && priority_leq(b, a)) {
                EXPECT_EQ(a, b);
            }
            for (int c = 0; c <= 12; ++c) {
                if (priority_leq(a, b) && priority_leq(b, c)) {
                    EXPECT_TRUE(priority_leq(a, c));
                }
                if (priority_leq(b, c)) {
                    EXPECT_TRUE(priority_leq(std::min(a, b), std::min(a, c))) << a << " " << b << " " << c;
                }
            }
        }
}

TEST(OutcomeOrder, Examples) {
    EXPECT_TRUE(outcome_leq(Outcome::win_odd(), Outcome::exit(0, 3)));
    EXPECT_TRUE(outcome_leq(Outcome::exit(0, 2), Outcome::exit(0, 0)));
    EXPECT_FALSE(outcome_leq(Outcome::exit(0, 1), Outcome::exit(1, 1)));
    EXPECT_FALSE(outcome_leq(Outcome::exit(1, 1), Outcome::exit(0, 1)));
    EXPECT_TRUE(outcome_leq(Outcome::exit(4, 1), Outcome::win_even()));
    EXPECT_FALSE(outcome_leq(Outcome::win_even(), Outcome::exit(4, 0)));

    ResultSet a{Outcome::exit(0, 1)}, b{Outcome::exit(0, 2), Outcome::exit(1, 1)};
    EXPECT_TRUE(result_leq(a, b));
    EXPECT_FALSE(result_leq(b, a));
    // An extra incomparable exit does not lower a result in the literal order.
    EXPECT_TRUE(result_leq(ResultSet{Outcome::exit(0, 2)}, b));
    EXPECT_FALSE(result_smyth_leq(ResultSet{Outcome::exit(0, 2)}, b));
    EXPECT_TRUE(result_smyth_leq(b, ResultSet{Outcome::exit(0, 2)}));
}

TEST(PlayOutcome, Examples) {
    auto p = make_game(2, {{0, 1}, {1, 0}}, {0}, {0, 1});
    EXPECT_EQ(lasso_outcome(p, {}, {0, 1}), Outcome::win_even());
    auto q = make_game(2, {{0, 1}, {1, 0}}, {0}, {1, 3});
    EXPECT_EQ(lasso_outcome(q, {}, {0, 1}), Outcome::win_odd());
    auto r = make_game(2, {{0, 1}, {1, 0}}, {}, {3, 0});
    EXPECT_EQ(play_outcome(r, {0, 1}), Outcome::exit(1, 0));
    EXPECT_THROW(play_outcome(r, {0, 0}), InputError);
}

TEST(RestrictedResult, Examples) {
    // Path 0 -> 1 with exit 1.
    auto p = make_game(2, {{0, 1}, {1, 0}}, {}, {3, 0});
    EXPECT_EQ(restricted_result(p, mask_set(2, 1), {}, 0), (ResultSet{Outcome::exit(1, 0)}));
    auto q = make_game(2, {{0, 1}, {1, 0}}, {}, {1, 3});
    EXPECT_EQ(restricted_result(q, mask_set(2, 3), {}, 0), (ResultSet{Outcome::win_odd()}));
    // Odd vertex 0 may exit to 2 or enter the odd 2-cycle 0 <-> 1.
    auto r = make_game(3, {{0, 1}, {1, 0}, {0, 2}, {2, 0}}, {}, {1, 3, 2});
    EXPECT_EQ(restricted_result(r, mask_set(3, 3), {}, 0), (ResultSet{Outcome::win_odd()}));
    // Even vertex without a strategy entry.
    auto e = make_game(2, {{0, 1}, {1, 0}}, {0}, {0, 0});
    EXPECT_THROW(restricted_result(e, mask_set(2, 1), {}, 0), std::invalid_argument);
}

TEST(RestrictedResult, MatchesWalkEnumeration) {
    std::mt19937_64 rng(5);
    int checked = 0;
    for (const ParityGame& p : random_games(400, 6, 4, 21)) {
        const int n = p.size();
        VertexSet region = mask_set(n, static_cast<unsigned>(rng()) & ((1U << n) - 1));
        if (region.empty()) continue;
        VertexSet exits = p.graph.all() - region;
        for_each_even_strategy(p, region, p.graph.all(), 1 << 12, [&](const EvenStrategy& f) {
            region.for_each([&](Vertex v) {
                ResultSet r = restricted_result(p, region, f, v);
                ASSERT_TRUE(is_valid_result(r)) << to_string(r);
                ASSERT_EQ(r, walk_result(p, region, f, v)) << "start " << v;
                for (const Outcome& o : r) {
                    if (o.is_exit()) {
                        ASSERT_TRUE(exits.contains(o.v));
                    }
                }
                ++checked;
            });
        });
    }
    EXPECT_GT(checked, 500);
}

TEST(FrontierOracle, Examples) {
    auto p = make_game(2, {{0, 1}, {1, 0}}, {}, {0, 0});
    EXPECT_TRUE(frontier_oracle(p, VertexSet(2), VertexSet(2)).empty());

    // u = 0 (Odd, priority 1) with exits w1 = 1 (priority 0) and w2 = 2 (priority 2).
    auto q = make_game(3, {{0, 1}, {0, 2}, {1, 0}, {2, 0}}, {}, {1, 0, 2});
    Frontier fq = frontier_oracle(q, mask_set(3, 1), mask_set(3, 6));
    ASSERT_EQ(fq.tuple_count(), 1U);
    EXPECT_EQ(fq.at.at(0)[0], (ResultSet{Outcome::exit(1, 0), Outcome::exit(2, 1)}));

    auto e = make_game(3, {{0, 1}, {0, 2}, {1, 0}, {2, 0}}, {0}, {1, 0, 2});
    Frontier fe = frontier_oracle(e, mask_set(3, 1), mask_set(3, 6));
    ASSERT_EQ(fe.tuple_count(), 2U);
    EXPECT_EQ(fe.at.at(0)[0], (ResultSet{Outcome::exit(1, 0)}));
    EXPECT_EQ(fe.at.at(0)[1], (ResultSet{Outcome::exit(2, 1)}));

    // A strategy whose move leaves region and exits is not enumerated.
    EXPECT_THROW(frontier_oracle(q, mask_set(3, 1), mask_set(3, 2)), std::invalid_argument);
    EXPECT_THROW(frontier_all(q, mask_set(3, 7), VertexSet(3), 0), ResourceError);
}

TEST(DominanceFilter, Examples) {
    Frontier fr;
    fr.add(0, {Outcome::win_odd()});
    fr.add(0, {Outcome::win_even()});
    fr.add(1, {Outcome::exit(2, 1)});
    fr.add(1, {Outcome::exit(3, 1)});
    Frontier f = dominance_filter(fr);
    EXPECT_EQ(f.at.at(0), (std::vector<ResultSet>{{Outcome::win_even()}}));
    EXPECT_EQ(f.at.at(1).size(), 2U);
    EXPECT_EQ(dominance_filter(f), f);
}

TEST(DominanceFilter, IdempotentOnOracleFrontiers) {
    std::mt19937_64 rng(8);
    for (const ParityGame& p : random_games(60, 6, 4, 3)) {
        const int n = p.size();
        VertexSet region = mask_set(n, static_cast<unsigned>(rng()) & ((1U << n) - 1));
        Frontier all = frontier_all(p, region, p.graph.all() - region);
        Frontier h = dominance_filter(all);
        EXPECT_EQ(dominance_filter(h), h);
        Frontier s = filter_frontier(all, FrontierFilter::Smyth);
        EXPECT_EQ(filter_frontier(s, FrontierFilter::Smyth), s);
        for (const auto& [v, rs] : all.at) {
            ASSERT_FALSE(h.at.at(v).empty());
            for (const auto& r : rs) {
                ASSERT_TRUE(is_valid_result(r));
                bool covered = false;
                for (const auto& k : h.at.at(v)) covered = covered || result_leq(r, k);
                EXPECT_TRUE(covered);
            }
        }
    }
}

TEST(Zielonka, Examples) {
    auto p = make_game(2, {{0, 1}, {1, 0}}, {0}, {0, 1});
    EXPECT_EQ(zielonka_solve(p), (std::vector<int>{0, 0}));
    auto q = make_game(2, {{0, 1}, {1, 0}}, {0}, {1, 3});
    EXPECT_EQ(zielonka_solve(q), (std::vector<int>{1, 1}));
    // Even at 0 escapes the odd cycle 0 <-> 1 into the even cycle 0 <-> 2.
    auto r = make_game(3, {{0, 1}, {1, 0}, {0, 2}, {2, 0}}, {0}, {3, 1, 2});
    EXPECT_EQ(zielonka_solve(r), (std::vector<int>{0, 0, 0}));
    // Odd at 0 picks the odd cycle.
    auto o = make_game(3, {{0, 1}, {1, 0}, {0, 2}, {2, 0}}, {}, {3, 1, 2});
    EXPECT_EQ(zielonka_solve(o), (std::vector<int>{1, 1, 1}));
}

TEST(Zielonka, MatchesBruteForce) {
    int even_wins = 0, odd_wins = 0;
    for (const ParityGame& p : random_games(400, 7, 4, 77)) {
        auto w = brute_force_winners(p);
        EXPECT_EQ(zielonka_solve(p), w) << emit_pgsolver(p);
        for (int x : w) (x ? odd_wins : even_wins)++;
    }
    EXPECT_GT(even_wins, 300);
    EXPECT_GT(odd_wins, 300);
}

TEST(Pgsolver, Examples) {
    ParityGame p = parse_pgsolver("parity 1; 0 0 0 1; 1 1 1 0;");
    EXPECT_EQ(p.size(), 2);
    EXPECT_TRUE(p.graph.has_edge(0, 1));
    EXPECT_TRUE(p.graph.has_edge(1, 0));
    EXPECT_EQ(p.priority, (std::vector<int>{0, 1}));
    EXPECT_EQ(p.even, VertexSet(2, {0}));
    EXPECT_EQ(emit_pgsolver(p), "parity 1; 0 0 0 1; 1 1 1 0;");
}

TEST(Pgsolver, ErrorsCarryLineNumbers) {
    auto message = [](const std::string& text) {
        try {
            parse_pgsolver(text);
        } catch (const InputError& e) {
            return std::string(e.what());
        }
        return std::string("no error");
    };
    EXPECT_EQ(message("parity 1;\n0 0 0 1;\n1 1 1 ;\n"), "line 3: vertex 1 has no successor");
    EXPECT_EQ(message("0 0 0 1;\n1 1;\n"), "line 2: vertex needs id, priority, owner and successors");
    EXPECT_EQ(message("0 2 0 0;"), "line 1: self-loop at vertex 0 (use --unroll-loops to replace it by a 2-cycle)");
    EXPECT_EQ(message("0 1 0 1;\n\n1 1 2 0;"), "line 3: owner must be 0 or 1");
    EXPECT_EQ(message("0 1 0 1;\n1 1 1 x;"), "line 2: expected a successor, got 'x'");
    EXPECT_EQ(message("0 1 0 1;\n1 1 1 0"), "line 2: missing ';'");
    EXPECT_EQ(message("0 1 0 1;\n1 1 1 5;"), "line 2: successor 5 is not a vertex");
    EXPECT_EQ(message("0 1 0 1;\n0 1 1 0;"), "line 2: vertex 0 already defined on line 1");
    EXPECT_EQ(message("parity 3;\n0 1 0 1;\n1 1 1 0;"), "line 1: header declares max id 3 but vertices are 0..1");
    EXPECT_EQ(message("0 1 0 1,1;\n1 1 1 0;"), "line 1: duplicate successor 1");
    EXPECT_EQ(message("0 1 0 1 \"a\" 2;\n1 1 1 0;"), "line 1: name must be the last field");
    EXPECT_EQ(message("0 1 0 1;\n1 1 1 \"x\";"), "line 2: vertex 1 has no successor");
}

TEST(Pgsolver, RoundTripKeepsLayout) {
    const std::string text =
        "# two vertices\nparity 2;\n\n0 3 0 1,2 \"start\";  1 0 1 0;\n# tail\n2 2 1 0 \"x y\";\nstart 0;\n";
    ParityGame p = parse_pgsolver(text);
    EXPECT_EQ(emit_pgsolver(p), text);
    EXPECT_EQ(*p.names[0], "start");
    EXPECT_EQ(p.succ_order[0], (std::vector<Vertex>{1, 2}));
    ParityGame q = parse_pgsolver("parity 1;\n0 0 0 1;\n1 1 1 0;\n");
    q.layout.reset();
    EXPECT_EQ(emit_pgsolver(q), "parity 1;\n0 0 0 1;\n1 1 1 0;\n");
    // Successor order is kept as written.
    EXPECT_EQ(emit_pgsolver(parse_pgsolver("0 0 0 2,1; 1 0 0 0; 2 1 1 0;")), "0 0 0 2,1; 1 0 0 0; 2 1 1 0;");
}

TEST(Pgsolver, UnrollLoopsPreservesWinners) {
    ParityGame p = parse_pgsolver("0 1 1 0,1;\n1 2 0 1,0;\n", {.unroll_loops = true});
    ASSERT_EQ(p.size(), 4);
    EXPECT_EQ(p.prio(2), 1);
    EXPECT_EQ(p.prio(3), 2);
    EXPECT_TRUE(p.graph.has_edge(0, 2) && p.graph.has_edge(2, 0));
    EXPECT_FALSE(p.layout.has_value());
    // Odd loops at 0 forever; Even loops at 1 forever.
    EXPECT_EQ(zielonka_solve(p), (std::vector<int>{1, 0, 1, 0}));
    EXPECT_EQ(emit_pgsolver(p), "parity 3;\n0 1 1 2,1;\n1 2 0 3,0;\n2 1 1 0;\n3 2 0 1;\n");
}

TEST(Pgsolver, CorpusIsByteStable) {
    int files = 0;
    for (int i = 1; i <= 20; ++i) {
        char name[64];
        std::snprintf(name, sizeof name, "%s/pgsolver/game%02d.pg", SDAGW_TEST_DATA, i);
        std::ifstream in(name, std::ios::binary);
        ASSERT_TRUE(in) << name;
        std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
        ParityGame p = parse_pgsolver(text);
        EXPECT_EQ(emit_pgsolver(p), text) << name;
        EXPECT_NE(text.find('#'), std::string::npos) << name;
        ++files;
    }
    EXPECT_EQ(files, 20);
}
