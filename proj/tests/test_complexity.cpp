#include <gtest/gtest.h>

#include <cmath>
#include <vector>

#include "freqcal/complexity.hpp"
#include "freqcal/ordering.hpp"

using namespace freqcal;

TEST(Complexity, BlockSearchCount) {
    EXPECT_NEAR(block_search_count(3, CostModel::empirical(10, 2.0)), std::log(270.0), 1e-12);
    EXPECT_NEAR(block_search_count(3, CostModel::search(100.0, 2.0, 1)), std::log(1e6), 1e-12);
    EXPECT_NEAR(block_search_count(1, CostModel::search(100.0, 2.0, 1)), std::log(100.0), 1e-12);
    EXPECT_THROW(block_search_count(0, CostModel::search(100.0, 2.0, 1)), std::invalid_argument);
}

TEST(Complexity, EvalCost) {
    EXPECT_NEAR(eval_cost(1, CostModel::search(100.0, 2.0, 1)), std::log(2.0), 1e-12);
    EXPECT_NEAR(eval_cost(4, CostModel::search(100.0, 2.0, 10)), std::log(160.0), 1e-12);
    const auto m = CostModel::search(100.0, 2.0, 3);
    EXPECT_NEAR(eval_cost(8, m) - eval_cost(4, m), 4 * std::log(2.0), 1e-12);
    EXPECT_THROW(eval_cost(0, m), std::invalid_argument);
}

TEST(Complexity, InvalidModel) {
    EXPECT_THROW(CostModel::search(1.0, 2.0, 1).validate(), std::invalid_argument);
    EXPECT_THROW(CostModel::search(100.0, 1.0, 1).validate(), std::invalid_argument);
}

TEST(Complexity, EpochCostTwoByTwo) {
    const auto t = build_grid_topology(2, 2);
    const auto h = CrosstalkHypothesis::local(t);
    const std::vector<QubitId> order{0, 1, 2, 3};
    const auto part = partition_from_order(order, t);
    std::vector<std::size_t> c;
    for (const auto& b : part) c.push_back(footprint_size(b, h, t));
    const double expected = std::log(std::pow(100.0, 3) * std::pow(2.0, c[0]) +
                                     std::pow(100.0, 2) * std::pow(2.0, c[1]) +
                                     std::pow(100.0, 2) * std::pow(2.0, c[2]) +
                                     100.0 * std::pow(2.0, c[3]));
    EXPECT_NEAR(epoch_cost(part, h, t, CostModel::search(100.0, 2.0, 1)), expected, 1e-12);
}

TEST(Complexity, SingleQubitEpoch) {
    const auto t = build_grid_topology(1, 1);
    const std::vector<QubitId> order{0};
    EXPECT_NEAR(epoch_cost(partition_from_order(order, t), CrosstalkHypothesis::local(t), t,
                           CostModel::search(100.0, 2.0, 5)),
                std::log(5.0 * 100.0 * 2.0), 1e-12);
}

TEST(Complexity, LedgerTotalIsLogSumExp) {
    const auto t = build_grid_topology(4, 4);
    const auto h = CrosstalkHypothesis::local(t);
    auto rng = make_rng(3);
    const auto part = partition_from_order(random_order(t.n_qubits(), rng), t);
    const auto ledger = epoch_ledger(part, h, t, CostModel::empirical(5, 2.0));
    std::vector<double> xs;
    for (const auto& e : ledger.entries()) xs.push_back(e.log_cost);
    EXPECT_NEAR(ledger.log_total(), log_sum_exp(xs), 1e-9 * std::abs(ledger.log_total()));
}

TEST(Complexity, AddingPairNeverLowersEvalCost) {
    const auto base = build_grid_topology(3, 3);
    auto rng = make_rng(4);
    const auto t = add_nonlocal_pairs(base, 4, 0.5, rng);
    const auto m = CostModel::search(100.0, 2.0, 1);
    for (QubitId q = 0; q < t.n_qubits(); ++q) {
        const auto b = block_for_center(q, {}, t);
        EXPECT_LE(eval_cost(footprint_size(b, CrosstalkHypothesis::local(t), t), m),
                  eval_cost(footprint_size(b, CrosstalkHypothesis::exact(t), t), m));
    }
}

TEST(Complexity, LogAddExp) {
    EXPECT_NEAR(log_add_exp(std::log(2.0), std::log(3.0)), std::log(5.0), 1e-15);
    EXPECT_EQ(log_add_exp(-std::numeric_limits<double>::infinity(), 1.5), 1.5);
    EXPECT_NEAR(log_add_exp(1000.0, 1000.0), 1000.0 + std::log(2.0), 1e-12);
}

TEST(Scaling, SingleQubitRow) {
    const std::vector<std::pair<std::size_t, std::size_t>> sizes{{1, 1}};
    const auto m = CostModel::search(100.0, 2.0, 1);
    const auto r = scaling_report(sizes, OrderMethod::nna, m);
    ASSERT_EQ(r.rows.size(), 1u);
    EXPECT_NEAR(r.rows[0].log_epoch_cost, std::log(200.0), 1e-12);
    EXPECT_TRUE(r.rows[0].bound_holds);
}

TEST(Scaling, BoundHoldsEverySize) {
    const std::vector<std::pair<std::size_t, std::size_t>> sizes{{2, 2}, {3, 3}, {4, 4}, {5, 5}};
    for (auto method : {OrderMethod::nna, OrderMethod::bfs, OrderMethod::dfs, OrderMethod::random}) {
        const auto r = scaling_report(sizes, method, CostModel::search(100.0, 2.0, 1), 1);
        EXPECT_TRUE(r.local_hypothesis);
        for (const auto& row : r.rows) EXPECT_TRUE(row.bound_holds);
    }
}
