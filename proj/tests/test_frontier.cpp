#include <gtest/gtest.h>

#include <sdagw/frontier.hpp>

#include "dagdec_support.hpp"
#include "parity_support.hpp"

using namespace sdagw;
using sdagw::testing::chain_decomposition;
using sdagw::testing::random_games;
using sdagw::testing::split_decomposition;
using sdagw::testing::split_game;

namespace {

ParityGame make_game(int n, std::vector<std::pair<Vertex, Vertex>> edges, std::vector<Vertex> evens, std::vector<int> prio) {
    return ParityGame(Digraph(n, edges), VertexSet(n, evens), std::move(prio));
}

struct Tally {
    int samples = 0;
    int split_samples = 0;
};

// Compares every node with a small region against the oracles.
void check_against_oracle(const ParityGame& p, const DagDecomposition& raw, Tally& tally) {
    NiceDagDec nice = nicefy_dagdec(p.graph, raw);
    const DagDecomposition& dd = nice.dd;
    auto profiles = propagate_profiles(p, dd);
    auto below = dd.below();
    for (int t = 0; t < dd.node_count(); ++t) {
        VertexSet region = dd.region(t, below);
        if (region.size() > 7) continue;
        const ProfileSet& ps = profiles.at(t);
        ASSERT_EQ(ps.region, region.to_vector());
        ASSERT_EQ(ps.profiles, profile_oracle(p, region, dd.bag(t)).profiles) << "node " << t;
        Frontier engine = ps.project();
        Frontier all = frontier_all(p, region, dd.bag(t));
        ASSERT_EQ(engine, all) << "node " << t << "\nengine " << to_string(engine) << "\noracle " << to_string(all);
        ASSERT_EQ(dominance_filter(engine), frontier_oracle(p, region, dd.bag(t)));
        for (const auto& [v, rs] : engine.at)
            for (const auto& r : rs) {
                ASSERT_TRUE(is_valid_result(r));
                for (const Outcome& o : r) {
                    if (o.is_exit()) {
                        ASSERT_TRUE(dd.bag(t).contains(o.v));
                    }
                }
            }
        ++tally.samples;
        if (dd.children(t).size() == 2) ++tally.split_samples;
    }
}

}  // namespace

TEST(FrontierSteps, ExpandWithOnlyExits) {
    // v = 0 with successors 1 and 2 outside the new region.
    auto p = make_game(3, {{0, 1}, {0, 2}, {1, 0}, {2, 0}}, {0}, {3, 0, 2});
    VertexSet bag(3, {1, 2});
    Frontier fe = frontier_step_expand(p, Frontier{}, 0, bag);
    EXPECT_EQ(fe.at.at(0), (std::vector<ResultSet>{{Outcome::exit(1, 0)}, {Outcome::exit(2, 2)}}));
    auto q = make_game(3, {{0, 1}, {0, 2}, {1, 0}, {2, 0}}, {}, {3, 0, 2});
    Frontier fo = frontier_step_expand(q, Frontier{}, 0, bag);
    EXPECT_EQ(fo.at.at(0), (std::vector<ResultSet>{{Outcome::exit(1, 0), Outcome::exit(2, 2)}}));

    ProfileSet ps = profile_step_expand(p, ProfileSet::empty_region(), 0, bag);
    EXPECT_EQ(ps.profiles.size(), 2U);
    EXPECT_EQ(dominance_filter(ps.project()), fe);
    EXPECT_THROW(frontier_step_expand(p, Frontier{}, 0, VertexSet(3, {1})), std::logic_error);
}

TEST(FrontierSteps, ExpandClosesCycles) {
    // Region {1} already holds 1 -> 0; expanding 0 closes the cycle 0 <-> 1.
    auto p = make_game(3, {{0, 1}, {1, 0}, {0, 2}, {2, 0}}, {}, {2, 1, 0});
    Frontier fr;
    fr.add(1, {Outcome::exit(0, 1)});
    Frontier out = frontier_step_expand(p, fr, 0, VertexSet(3, {2}));
    EXPECT_EQ(out.at.at(0), (std::vector<ResultSet>{{Outcome::win_odd()}}));
    EXPECT_EQ(out.at.at(1), (std::vector<ResultSet>{{Outcome::win_odd()}}));
    auto q = make_game(3, {{0, 1}, {1, 0}, {0, 2}, {2, 0}}, {0}, {2, 1, 0});
    Frontier oq = frontier_step_expand(q, fr, 0, VertexSet(3, {2}));
    // Even avoids the odd cycle by leaving to 2.
    EXPECT_EQ(oq.at.at(0), (std::vector<ResultSet>{{Outcome::exit(2, 0)}}));
    EXPECT_EQ(oq.at.at(1), (std::vector<ResultSet>{{Outcome::exit(2, 0)}}));
}

TEST(FrontierSteps, SplitAndIntroduce) {
    Frontier a;
    a.add(0, {Outcome::exit(3, 1)});
    a.add(1, {Outcome::win_even()});
    EXPECT_EQ(frontier_step_split(a, a), a);
    EXPECT_EQ(frontier_step_introduce(a), a);
    EXPECT_TRUE(frontier_step_split(Frontier{}, Frontier{}).empty());
    ProfileSet x;
    x.region = {0};
    x.profiles.insert(Profile{{Outcome::win_even()}});
    EXPECT_THROW(profile_step_split(x, x), std::invalid_argument);
}

TEST(FrontierEngine, ProfilesMatchOracleOnChains) {
    std::mt19937_64 rng(12);
    Tally tally;
    for (const ParityGame& p : random_games(150, 7, 4, 99)) check_against_oracle(p, chain_decomposition(p.graph, rng), tally);
    EXPECT_GE(tally.samples, 500);
}

TEST(FrontierEngine, ProfilesMatchOracleOnSplits) {
    std::mt19937_64 rng(13);
    Tally tally;
    for (int i = 0; i < 150; ++i) {
        VertexSet a, b;
        ParityGame p = split_game(3 + i % 6, rng, &a, &b);
        check_against_oracle(p, split_decomposition(p.graph, a, b, rng), tally);
    }
    EXPECT_GE(tally.samples, 500);
    EXPECT_GE(tally.split_samples, 50);
}

// Tuple mode may combine results of different strategies, so it is only
// required to cover every memoryless result and to decide winners exactly.
TEST(FrontierEngine, TupleModeCoversOracleAndDecidesWinners) {
    std::mt19937_64 rng(14);
    for (const ParityGame& p : random_games(120, 7, 4, 5)) {
        NiceDagDec nice = nicefy_dagdec(p.graph, chain_decomposition(p.graph, rng));
        const DagDecomposition& dd = nice.dd;
        auto below = dd.below();
        for (int t = 0; t < dd.node_count(); ++t) {
            VertexSet region = dd.region(t, below);
            Frontier tuples = propagate_frontier(p, dd, {}, t, FrontierFilter::None);
            Frontier all = frontier_all(p, region, dd.bag(t));
            for (const auto& [v, rs] : all.at)
                for (const auto& r : rs) ASSERT_TRUE(std::binary_search(tuples.at.at(v).begin(), tuples.at.at(v).end(), r));
            Frontier smyth = propagate_frontier(p, dd, {}, t, FrontierFilter::Smyth);
            for (const auto& [v, rs] : filter_frontier(all, FrontierFilter::Smyth).at)
                for (const auto& r : rs) {
                    bool covered = false;
                    for (const auto& r2 : smyth.at.at(v)) covered = covered || result_smyth_leq(r, r2);
                    ASSERT_TRUE(covered);
                }
        }
        int root = dd.sources().at(0);
        Frontier top = propagate_frontier(p, dd, {}, root, FrontierFilter::Smyth);
        auto winners = zielonka_solve(p);
        for (Vertex v = 0; v < p.size(); ++v) {
            ASSERT_EQ(top.at.at(v).size(), 1U);
            ResultSet expect{winners[static_cast<std::size_t>(v)] ? Outcome::win_odd() : Outcome::win_even()};
            ASSERT_EQ(top.at.at(v)[0], expect);
        }
    }
}
