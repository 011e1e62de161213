#include <gtest/gtest.h>

#include <algorithm>
#include <set>
#include <utility>
#include <vector>

#include "freqcal/topology.hpp"

using namespace freqcal;

namespace {

// Edge-enumeration oracle: all horizontal and vertical neighbours, counted directly.
std::set<std::pair<QubitId, QubitId>> lattice_edges(std::size_t rows, std::size_t cols) {
    std::set<std::pair<QubitId, QubitId>> out;
    for (std::size_t r = 0; r < rows; ++r) {
        for (std::size_t c = 0; c < cols; ++c) {
            const auto q = r * cols + c;
            if (c + 1 < cols) out.insert({q, q + 1});
            if (r + 1 < rows) out.insert({q, q + cols});
        }
    }
    return out;
}

}  // namespace

TEST(Topology, SingleQubitGrid) {
    const auto t = build_grid_topology(1, 1);
    EXPECT_EQ(t.n_qubits(), 1u);
    EXPECT_EQ(t.n_couplers(), 0u);
    EXPECT_TRUE(t.neighbors(0).empty());
}

TEST(Topology, TwoByTwoCouplers) {
    const auto t = build_grid_topology(2, 2);
    ASSERT_EQ(t.n_couplers(), 4u);
    const std::vector<Coupler> expected{{0, 1}, {0, 2}, {1, 3}, {2, 3}};
    EXPECT_EQ(t.couplers(), expected);
    EXPECT_EQ(t.neighbors(0), (std::vector<QubitId>{1, 2}));
}

TEST(Topology, CouplerCountMatchesEnumeration) {
    for (std::size_t r = 1; r <= 7; ++r) {
        for (std::size_t c = 1; c <= 7; ++c) {
            const auto t = build_grid_topology(r, c);
            const auto oracle = lattice_edges(r, c);
            ASSERT_EQ(t.n_couplers(), oracle.size()) << r << "x" << c;
            EXPECT_EQ(t.n_couplers(), 2 * r * c - r - c);
            for (const auto& e : t.couplers()) EXPECT_TRUE(oracle.count({e.a, e.b}));
            EXPECT_LE(t.max_degree(), 4u);
            EXPECT_TRUE(t.is_connected());
        }
    }
    EXPECT_EQ(build_grid_topology(3, 3).n_couplers(), 12u);
}

TEST(Topology, CenterDegree) {
    EXPECT_EQ(build_grid_topology(3, 3).degree(4), 4u);
}

TEST(Topology, OutOfRangeQubit) {
    const auto t = build_grid_topology(2, 2);
    EXPECT_THROW(t.neighbors(4), std::out_of_range);
}

TEST(Topology, RejectsBadCouplers) {
    EXPECT_THROW(ChipTopology(2, {{0, 0}}), std::invalid_argument);
    EXPECT_THROW(ChipTopology(2, {{0, 2}}), std::out_of_range);
    EXPECT_THROW(ChipTopology(3, {{0, 1}, {1, 0}}), std::invalid_argument);
}

TEST(Topology, LocalPairRule) {
    // Path 0-1-2: params q0 q1 q2 c01 c12.
    const ChipTopology t(3, {{0, 1}, {1, 2}});
    std::set<std::pair<ParamId, ParamId>> pairs;
    for (const auto& p : t.crosstalk_pairs()) {
        EXPECT_EQ(p.locality, Locality::local);
        pairs.insert({p.first, p.second});
    }
    const std::set<std::pair<ParamId, ParamId>> expected{
        {0, 1}, {1, 2},          // qubits joined by a coupler
        {0, 3}, {1, 3}, {1, 4},  // qubit on a coupler
        {2, 4}, {3, 4},          // couplers sharing qubit 1
    };
    EXPECT_EQ(pairs, expected);
}

TEST(Topology, EligibleNonlocalPairs) {
    const auto t = build_grid_topology(2, 2);
    const auto e = eligible_nonlocal_pairs(t, 2);
    EXPECT_EQ(e, (std::vector<std::pair<QubitId, QubitId>>{{0, 3}, {1, 2}}));
    EXPECT_TRUE(eligible_nonlocal_pairs(build_grid_topology(1, 2), 2).empty());
}

TEST(Topology, AddNonlocalPairsOnPathIsNoop) {
    const auto t = build_grid_topology(1, 2);
    auto rng = make_rng(1);
    const auto u = add_nonlocal_pairs(t, 2, 1.0, rng);
    EXPECT_EQ(u.crosstalk_pairs().size(), t.crosstalk_pairs().size());
}

TEST(Topology, AddNonlocalPairsDeterministicAndValid) {
    const auto t = build_grid_topology(3, 3);
    auto r1 = make_rng(42);
    auto r2 = make_rng(42);
    const auto a = add_nonlocal_pairs(t, 2, 0.5, r1);
    const auto b = add_nonlocal_pairs(t, 2, 0.5, r2);
    EXPECT_EQ(a.nonlocal_qubit_pairs(), b.nonlocal_qubit_pairs());
    EXPECT_FALSE(a.nonlocal_qubit_pairs().empty());
    for (auto [x, y] : a.nonlocal_qubit_pairs()) {
        const auto d = t.distances_from(x)[y];
        EXPECT_GE(d, 2u);
        EXPECT_LE(d, 2u);
    }
}

TEST(Topology, RadiusBeyondDiameterUsesAllEligible) {
    const auto t = build_grid_topology(2, 3);
    auto rng = make_rng(3);
    const auto a = add_nonlocal_pairs(t, 100, 1.0, rng);
    std::size_t far = 0;
    for (QubitId x = 0; x < 6; ++x) {
        const auto d = t.distances_from(x);
        for (QubitId y = x + 1; y < 6; ++y) far += d[y] >= 2;
    }
    EXPECT_EQ(a.nonlocal_qubit_pairs().size(), far);
}

TEST(Topology, NonlocalRejectsShortDistanceAndDuplicates) {
    const auto t = build_grid_topology(2, 2);
    const std::vector<std::pair<QubitId, QubitId>> adjacent{{0, 1}};
    EXPECT_THROW(t.with_nonlocal_pairs(adjacent), std::invalid_argument);
    const std::vector<std::pair<QubitId, QubitId>> twice{{0, 3}, {3, 0}};
    EXPECT_EQ(t.with_nonlocal_pairs(twice).nonlocal_qubit_pairs().size(), 1u);
    auto rng = make_rng(1);
    EXPECT_THROW(add_nonlocal_pairs(t, 1, 0.5, rng), std::invalid_argument);
}

TEST(Topology, Hypotheses) {
    const auto t = build_grid_topology(3, 3).with_nonlocal_pairs(
        std::vector<std::pair<QubitId, QubitId>>{{0, 8}});
    EXPECT_TRUE(CrosstalkHypothesis::exact(t).has_nonlocal());
    EXPECT_FALSE(CrosstalkHypothesis::local(t).has_nonlocal());
    EXPECT_TRUE(CrosstalkHypothesis::none(t).pairs().empty());
    const auto exact = CrosstalkHypothesis::exact(t);
    const auto& p0 = exact.partners(0);
    EXPECT_TRUE(std::find(p0.begin(), p0.end(), 8u) != p0.end());
}
