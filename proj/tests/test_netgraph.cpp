#include "support/oracles.hpp"

#include "posctl/error.hpp"
#include "posctl/netgraph.hpp"
#include "posctl/numerics.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <random>

using namespace posctl;

namespace {

DirectedNetwork ring(int n) {
    std::vector<Edge> e;
    for (int i = 0; i < n; ++i) e.push_back({i, (i + 1) % n, 1.0});
    return DirectedNetwork(n, e);
}

}  // namespace

TEST(Laplacian, SingleEdge) {
    const DirectedNetwork net(2, {{0, 1, 1.0}});
    Matrix L(2, 2);
    L << 0, 0, -1, 1;
    EXPECT_EQ(net.laplacian(), L);
}

TEST(Laplacian, FourNodeSparsityPattern) {
    const Matrix L = oracle::four_node_network().laplacian();
    Matrix expected(4, 4);
    expected << 1, -1, 0, 0,  //
        -1, 1, 0, 0,          //
        0, -1, 1, 0,          //
        0, -1, 0, 1;
    EXPECT_EQ(L, expected);
}

TEST(Laplacian, NegatedIsMetzlerWithZeroAbscissa) {
    std::mt19937 rng(4);
    for (int trial = 0; trial < 30; ++trial) {
        const DirectedNetwork net = oracle::random_digraph(6, 0.35, rng);
        const Matrix M = -net.laplacian();
        for (int i = 0; i < 6; ++i) {
            for (int j = 0; j < 6; ++j) {
                if (i != j) EXPECT_GE(M(i, j), 0.0);
            }
        }
        EXPECT_NEAR(spectral_abscissa(M), 0.0, 1e-9);
    }
}

TEST(Laplacian, ParallelEdgesAreSummed) {
    const DirectedNetwork net(2, {{0, 1, 1.0}, {0, 1, 2.5}});
    EXPECT_EQ(net.edges().size(), 1u);
    EXPECT_DOUBLE_EQ(net.laplacian()(1, 0), -3.5);
}

TEST(Network, RejectsBadEdges) {
    EXPECT_THROW(DirectedNetwork(2, {{0, 0, 1.0}}), Error);
    EXPECT_THROW(DirectedNetwork(2, {{0, 1, 0.0}}), Error);
    EXPECT_THROW(DirectedNetwork(2, {{0, 1, -1.0}}), Error);
    EXPECT_THROW(DirectedNetwork(2, {{0, 2, 1.0}}), Error);
}

TEST(Components, Examples) {
    const DirectedNetwork tri(3, {{0, 1, 1}, {1, 0, 1}, {1, 2, 1}, {2, 1, 1}, {0, 2, 1}, {2, 0, 1}});
    EXPECT_EQ(tri.components(), (Partition{{0, 1, 2}}));
    EXPECT_EQ(oracle::four_node_network().components(), (Partition{{0, 1}, {2}, {3}}));
}

TEST(Components, MatchReachabilityOracle) {
    std::mt19937 rng(8);
    for (int trial = 0; trial < 50; ++trial) {
        const DirectedNetwork net = oracle::random_digraph(8, 0.2, rng);
        const auto R = oracle::reachability(net);
        for (int i = 0; i < 8; ++i) {
            for (int j = 0; j < 8; ++j) {
                const bool mutual = i == j || (R[i][j] && R[j][i]);
                EXPECT_EQ(net.component_of(i) == net.component_of(j), mutual) << i << "," << j;
            }
        }
    }
}

TEST(Connectivity, RingAndExamples) {
    const DirectedNetwork r = ring(5);
    EXPECT_TRUE(r.is_balanced());
    EXPECT_TRUE(r.is_weakly_connected());
    EXPECT_TRUE(r.is_strongly_connected());

    EXPECT_TRUE(oracle::eight_node_network().is_balanced());
    EXPECT_EQ(oracle::eight_node_network().edges().size(), 12u);
    EXPECT_EQ(weak_components(oracle::mutant_system().A).size(), 2u);
    EXPECT_FALSE(oracle::four_node_network().is_balanced());
}

TEST(LeaderSubsets, Examples) {
    EXPECT_EQ(ring(4).leader_subsets().subsets, (std::vector<std::vector<int>>{{0, 1, 2, 3}}));
    EXPECT_EQ(oracle::four_node_network().leader_subsets().subsets, (std::vector<std::vector<int>>{{0, 1}}));

    // Three isolated sources feeding a sink chain 4 -> 5 -> 6.
    const DirectedNetwork net(6, {{0, 3, 1}, {1, 3, 1}, {2, 4, 1}, {3, 4, 1}, {4, 5, 1}});
    EXPECT_EQ(net.leader_subsets().subsets, (std::vector<std::vector<int>>{{0}, {1}, {2}}));
}

TEST(LeaderSubsets, AreExactlyTheUnreachedComponents) {
    std::mt19937 rng(21);
    for (int trial = 0; trial < 50; ++trial) {
        const DirectedNetwork net = oracle::random_digraph(7, 0.15, rng);
        const auto R = oracle::reachability(net);
        std::vector<int> sources;
        for (int i = 0; i < 7; ++i) {
            bool reached_from_outside = false;
            for (int j = 0; j < 7; ++j) {
                if (R[j][i] && !R[i][j]) reached_from_outside = true;
            }
            if (!reached_from_outside) sources.push_back(i);
        }
        std::vector<int> flat;
        for (const auto& s : net.leader_subsets().subsets) flat.insert(flat.end(), s.begin(), s.end());
        std::sort(flat.begin(), flat.end());
        EXPECT_EQ(flat, sources);
    }
}

TEST(Reverse, RingAndBalance) {
    const DirectedNetwork r = ring(4).reverse();
    for (const auto& e : r.edges()) EXPECT_EQ((e.to + 1) % 4, e.from);
    EXPECT_TRUE(oracle::eight_node_network().reverse().is_balanced());
}

TEST(Reverse, TransposesBalancedLaplacian) {
    std::mt19937 rng(31);
    for (int trial = 0; trial < 20; ++trial) {
        const DirectedNetwork net = oracle::random_balanced(7, 4, rng);
        ASSERT_TRUE(net.is_balanced(1e-12));
        EXPECT_LE((net.reverse().laplacian() - net.laplacian().transpose()).norm(), 1e-12);
    }
}
