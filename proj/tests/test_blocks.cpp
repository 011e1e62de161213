#include <gtest/gtest.h>

#include <algorithm>
#include <numeric>
#include <vector>

#include "freqcal/blocks.hpp"
#include "freqcal/rng.hpp"

using namespace freqcal;

namespace {

std::vector<std::size_t> sizes(const Partition& p) {
    std::vector<std::size_t> out;
    for (const auto& b : p) out.push_back(b.size());
    return out;
}

}  // namespace

TEST(Blocks, TwoByTwoOrderSizes) {
    const auto t = build_grid_topology(2, 2);
    const std::vector<QubitId> a{0, 1, 2, 3}, b{0, 3, 1, 2};
    EXPECT_EQ(sizes(partition_from_order(a, t)), (std::vector<std::size_t>{3, 2, 2, 1}));
    EXPECT_EQ(sizes(partition_from_order(b, t)), (std::vector<std::size_t>{3, 3, 1, 1}));
}

TEST(Blocks, IsolatedQubit) {
    const ChipTopology t(3, {{0, 1}});
    const auto b = block_for_center(2, {}, t);
    EXPECT_EQ(b.size(), 1u);
}

TEST(Blocks, BlockForCenterSkipsClaimed) {
    const auto t = build_grid_topology(2, 2);
    const std::vector<CouplerIndex> claimed{0};  // (0,1)
    const auto b = block_for_center(1, claimed, t);
    EXPECT_EQ(b.couplers, (std::vector<CouplerIndex>{2}));  // (1,3)
}

TEST(Blocks, RevisitIsContractViolation) {
    const auto t = build_grid_topology(2, 2);
    ClaimState s(t);
    s.claim(0, t);
    EXPECT_THROW(s.claim(0, t), std::logic_error);
}

TEST(Blocks, NonPermutationRejected) {
    const auto t = build_grid_topology(2, 2);
    const std::vector<QubitId> dup{0, 0, 1, 2}, short_{0, 1, 2};
    EXPECT_THROW(partition_from_order(dup, t), std::invalid_argument);
    EXPECT_THROW(partition_from_order(short_, t), std::invalid_argument);
}

TEST(Blocks, SizeSums) {
    auto rng = make_rng(5);
    for (auto [r, c, total] : {std::tuple{1, 1, 1}, {2, 2, 8}, {3, 3, 21}}) {
        const auto t = build_grid_topology(r, c);
        std::vector<QubitId> order(t.n_qubits());
        std::iota(order.begin(), order.end(), 0);
        for (int rep = 0; rep < 20; ++rep) {
            std::shuffle(order.begin(), order.end(), rng);
            const auto p = partition_from_order(order, t);
            std::size_t sum = 0;
            for (const auto& b : p) {
                sum += b.size();
                EXPECT_LE(b.size(), 5u);
                for (auto e : b.couplers) EXPECT_TRUE(t.coupler(e).touches(b.center));
            }
            EXPECT_EQ(sum, static_cast<std::size_t>(total));
        }
    }
}

TEST(Blocks, FootprintTwoByTwo) {
    const auto t = build_grid_topology(2, 2);
    const std::vector<QubitId> order{0, 1, 2, 3};
    const auto p = partition_from_order(order, t);
    const auto fp = footprint(p[0], CrosstalkHypothesis::local(t), t);
    EXPECT_EQ(fp.qubits, (std::vector<QubitId>{0, 1, 2, 3}));
    EXPECT_EQ(fp.params.size(), t.n_params());
}

TEST(Blocks, FootprintNoCrosstalk) {
    const auto t = build_grid_topology(3, 3);
    const Block b{4, {}};
    EXPECT_EQ(footprint(b, CrosstalkHypothesis::none(t), t).qubits, (std::vector<QubitId>{4}));
}

TEST(Blocks, FootprintIncludesNonlocalPartner) {
    const auto t = build_grid_topology(3, 3).with_nonlocal_pairs(
        std::vector<std::pair<QubitId, QubitId>>{{0, 8}});
    const auto b = block_for_center(0, {}, t);
    const auto fp = footprint(b, CrosstalkHypothesis::exact(t), t);
    EXPECT_TRUE(std::binary_search(fp.qubits.begin(), fp.qubits.end(), 8u));
    const auto fl = footprint(b, CrosstalkHypothesis::local(t), t);
    EXPECT_FALSE(std::binary_search(fl.qubits.begin(), fl.qubits.end(), 8u));
}

TEST(Blocks, LocalFootprintBound) {
    const auto t = build_grid_topology(4, 4);
    const auto hyp = CrosstalkHypothesis::local(t);
    auto rng = make_rng(9);
    std::vector<QubitId> order(t.n_qubits());
    std::iota(order.begin(), order.end(), 0);
    for (int rep = 0; rep < 20; ++rep) {
        std::shuffle(order.begin(), order.end(), rng);
        for (const auto& b : partition_from_order(order, t)) {
            const auto gq = b.gate_qubits(t);
            std::vector<bool> mark(t.n_qubits(), false);
            for (auto q : gq) {
                mark[q] = true;
                for (auto n : t.neighbors(q)) mark[n] = true;
            }
            const auto bound = static_cast<std::size_t>(std::count(mark.begin(), mark.end(), true));
            const auto fp = footprint(b, hyp, t);
            EXPECT_LE(fp.n_qubits(), bound);
            for (auto q : gq) EXPECT_TRUE(std::binary_search(fp.qubits.begin(), fp.qubits.end(), q));
        }
    }
}

TEST(Blocks, FootprintMonotoneInHypothesis) {
    const auto base = build_grid_topology(3, 3);
    auto rng = make_rng(2);
    const auto t = add_nonlocal_pairs(base, 3, 0.5, rng);
    const auto small = CrosstalkHypothesis::local(t);
    const auto big = CrosstalkHypothesis::exact(t);
    for (QubitId q = 0; q < t.n_qubits(); ++q) {
        const auto b = block_for_center(q, {}, t);
        const auto a = footprint(b, small, t);
        const auto c = footprint(b, big, t);
        EXPECT_TRUE(std::includes(c.qubits.begin(), c.qubits.end(), a.qubits.begin(), a.qubits.end()));
    }
}
