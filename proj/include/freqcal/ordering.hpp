#pragma once

/**
 * @file ordering.hpp
 * @brief Block visit orders as a sequence-dependent TSP.
 *
 * Visiting qubit j after history H costs what the block j would cost given
 * the couplers H has already claimed. Two cost modes are available:
 *
 *  - complexity: log(S) + |B| log(base) + |C| log(t), the block's term in the
 *    epoch cost. Route totals are log-sum-exp, so the route cost equals the
 *    epoch cost of the induced partition.
 *  - unvisited-neighbors: the number of j's neighbors not yet visited.
 *    Route totals are plain sums.
 */

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <numeric>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "freqcal/blocks.hpp"
#include "freqcal/complexity.hpp"
#include "freqcal/rng.hpp"
#include "freqcal/topology.hpp"

namespace freqcal {

enum class SdMode { complexity, unvisited_neighbors };

inline SdMode parse_sd_mode(const std::string& s) {
    if (s == "complexity") return SdMode::complexity;
    if (s == "neighbors" || s == "unvisited_neighbors") return SdMode::unvisited_neighbors;
    throw std::invalid_argument("unknown cost mode '" + s + "'");
}

struct SdCostFunction {
    SdMode mode = SdMode::complexity;
    CostModel model{};
};

struct Route {
    std::vector<QubitId> order;
    double total_cost = 0.0;
};

enum class OrderMethod { nna, bfs, dfs, random, oracle, fixed };

inline std::string to_string(OrderMethod m) {
    switch (m) {
        case OrderMethod::nna: return "nna";
        case OrderMethod::bfs: return "bfs";
        case OrderMethod::dfs: return "dfs";
        case OrderMethod::random: return "random";
        case OrderMethod::oracle: return "oracle";
        case OrderMethod::fixed: return "fixed";
    }
    return "unknown";
}

inline OrderMethod parse_order_method(const std::string& s) {
    for (auto m : {OrderMethod::nna, OrderMethod::bfs, OrderMethod::dfs, OrderMethod::random,
                   OrderMethod::oracle, OrderMethod::fixed}) {
        if (to_string(m) == s) return m;
    }
    throw std::invalid_argument("unknown order method '" + s + "'");
}

/// Step cost of visiting `next` from the given claim state.
inline double sd_cost(QubitId next, const ClaimState& state, const SdCostFunction& cf,
                      const ChipTopology& topo, const CrosstalkHypothesis& hyp) {
    if (state.visited(next)) {
        throw std::logic_error("qubit " + std::to_string(next) + " already visited");
    }
    if (cf.mode == SdMode::unvisited_neighbors) {
        return static_cast<double>(state.unclaimed_degree(next, topo));
    }
    const auto block = state.peek(next, topo);
    return block_log_cost(block.size(), footprint_size(block, hyp, topo), cf.model);
}

inline double sd_cost(QubitId next, std::span<const QubitId> history, const SdCostFunction& cf,
                      const ChipTopology& topo, const CrosstalkHypothesis& hyp) {
    topo.check_qubit(next);
    ClaimState state(topo);
    for (auto q : history) state.claim(q, topo);
    return sd_cost(next, state, cf, topo, hyp);
}

inline double accumulate_cost(double total, double step, SdMode mode) {
    return mode == SdMode::complexity ? log_add_exp(total, step) : total + step;
}

inline double empty_cost(SdMode mode) {
    return mode == SdMode::complexity ? -std::numeric_limits<double>::infinity() : 0.0;
}

/// Total cost with each step conditioned on its exact prefix.
inline double route_cost(std::span<const QubitId> order, const SdCostFunction& cf,
                         const ChipTopology& topo, const CrosstalkHypothesis& hyp) {
    check_permutation(order, topo.n_qubits());
    ClaimState state(topo);
    double total = empty_cost(cf.mode);
    for (auto q : order) {
        total = accumulate_cost(total, sd_cost(q, state, cf, topo, hyp), cf.mode);
        state.claim(q, topo);
    }
    return total;
}

/// Greedy route from `seed`; ties go to the smallest qubit index.
inline Route nna_from_seed(QubitId seed, const SdCostFunction& cf, const ChipTopology& topo,
                           const CrosstalkHypothesis& hyp) {
    topo.check_qubit(seed);
    const auto n = topo.n_qubits();
    ClaimState state(topo);
    Route route;
    route.order.reserve(n);
    route.total_cost = empty_cost(cf.mode);
    QubitId next = seed;
    double next_cost = sd_cost(seed, state, cf, topo, hyp);
    for (std::size_t step = 0; step < n; ++step) {
        if (step > 0) {
            next_cost = std::numeric_limits<double>::infinity();
            for (QubitId q = 0; q < n; ++q) {
                if (state.visited(q)) continue;
                const double c = sd_cost(q, state, cf, topo, hyp);
                if (c < next_cost) {
                    next_cost = c;
                    next = q;
                }
            }
        }
        route.total_cost = accumulate_cost(route.total_cost, next_cost, cf.mode);
        state.claim(next, topo);
        route.order.push_back(next);
    }
    return route;
}

/// Best of the N seeded greedy routes; ties go to the lexicographically
/// smallest route.
inline Route multi_start_nna(const SdCostFunction& cf, const ChipTopology& topo,
                             const CrosstalkHypothesis& hyp) {
    if (topo.n_qubits() == 0) return {};
    Route best;
    bool have = false;
    for (QubitId seed = 0; seed < topo.n_qubits(); ++seed) {
        Route r = nna_from_seed(seed, cf, topo, hyp);
        r.total_cost = route_cost(r.order, cf, topo, hyp);
        if (!have || r.total_cost < best.total_cost ||
            (r.total_cost == best.total_cost && r.order < best.order)) {
            best = std::move(r);
            have = true;
        }
    }
    return best;
}

inline void require_connected(const ChipTopology& topo) {
    if (!topo.is_connected()) {
        throw std::invalid_argument("graph traversal order requires a connected topology");
    }
}

/// Breadth-first order, neighbors expanded in ascending index.
inline std::vector<QubitId> bfs_order(const ChipTopology& topo, QubitId start) {
    topo.check_qubit(start);
    require_connected(topo);
    std::vector<bool> seen(topo.n_qubits(), false);
    std::vector<QubitId> order{start};
    seen[start] = true;
    for (std::size_t head = 0; head < order.size(); ++head) {
        for (auto v : topo.neighbors(order[head])) {
            if (!seen[v]) {
                seen[v] = true;
                order.push_back(v);
            }
        }
    }
    return order;
}

/// Depth-first preorder, smallest unvisited neighbor first.
inline std::vector<QubitId> dfs_order(const ChipTopology& topo, QubitId start) {
    topo.check_qubit(start);
    require_connected(topo);
    std::vector<bool> seen(topo.n_qubits(), false);
    std::vector<QubitId> order;
    std::vector<std::pair<QubitId, std::size_t>> stack{{start, 0}};
    seen[start] = true;
    order.push_back(start);
    while (!stack.empty()) {
        auto& [u, idx] = stack.back();
        const auto& adj = topo.neighbors(u);
        while (idx < adj.size() && seen[adj[idx]]) ++idx;
        if (idx == adj.size()) {
            stack.pop_back();
            continue;
        }
        const auto v = adj[idx++];
        seen[v] = true;
        order.push_back(v);
        stack.emplace_back(v, 0);
    }
    return order;
}

inline std::vector<QubitId> random_order(std::size_t n, Rng& rng) {
    std::vector<QubitId> order(n);
    std::iota(order.begin(), order.end(), QubitId{0});
    std::shuffle(order.begin(), order.end(), rng);
    return order;
}

inline constexpr std::size_t kOracleMaxQubits = 9;

/// Exact minimizer of route_cost by depth-first enumeration with pruning.
/// Permutations are explored in lexicographic order, so ties resolve to the
/// lexicographically smallest route.
inline Route brute_force_sd_tsp(const SdCostFunction& cf, const ChipTopology& topo,
                                const CrosstalkHypothesis& hyp) {
    const auto n = topo.n_qubits();
    if (n > kOracleMaxQubits) {
        throw std::length_error("brute-force SD-TSP limited to N <= " +
                                std::to_string(kOracleMaxQubits));
    }
    Route best;
    best.total_cost = std::numeric_limits<double>::infinity();
    if (n == 0) return {};
    std::vector<QubitId> prefix;
    prefix.reserve(n);

    auto recurse = [&](auto&& self, const ClaimState& state, double partial) -> void {
        if (prefix.size() == n) {
            if (partial < best.total_cost) {
                best.order = prefix;
                best.total_cost = partial;
            }
            return;
        }
        for (QubitId q = 0; q < n; ++q) {
            if (state.visited(q)) continue;
            const double next = accumulate_cost(partial, sd_cost(q, state, cf, topo, hyp), cf.mode);
            // Totals never decrease as steps are appended.
            if (next >= best.total_cost) continue;
            ClaimState child = state;
            child.claim(q, topo);
            prefix.push_back(q);
            self(self, child, next);
            prefix.pop_back();
        }
    };
    recurse(recurse, ClaimState(topo), empty_cost(cf.mode));
    return best;
}

/// Builds an order with the given method. `start` seeds BFS/DFS; `fixed`
/// returns `fixed_order` after validation.
inline std::vector<QubitId> make_order(OrderMethod method, const ChipTopology& topo,
                                       const CrosstalkHypothesis& hyp, const SdCostFunction& cf,
                                       Rng& rng, QubitId start = 0,
                                       std::span<const QubitId> fixed_order = {}) {
    switch (method) {
        case OrderMethod::nna: return multi_start_nna(cf, topo, hyp).order;
        case OrderMethod::bfs: return bfs_order(topo, start);
        case OrderMethod::dfs: return dfs_order(topo, start);
        case OrderMethod::random: return random_order(topo.n_qubits(), rng);
        case OrderMethod::oracle: return brute_force_sd_tsp(cf, topo, hyp).order;
        case OrderMethod::fixed: {
            check_permutation(fixed_order, topo.n_qubits());
            return {fixed_order.begin(), fixed_order.end()};
        }
    }
    throw std::invalid_argument("unknown order method");
}

/// Epoch cost per grid size for one order method. O(N) bound assumptions
/// only hold for a local hypothesis; `local_hypothesis` is false otherwise.
inline ScalingReport scaling_report(std::span<const std::pair<std::size_t, std::size_t>> sizes,
                                    OrderMethod method, const CostModel& model,
                                    std::uint64_t seed = 0) {
    ScalingReport report;
    SdCostFunction cf{SdMode::complexity, model};
    for (auto [rows, cols] : sizes) {
        const auto topo = build_grid_topology(rows, cols);
        const auto hyp = CrosstalkHypothesis::local(topo);
        report.local_hypothesis = report.local_hypothesis && !hyp.has_nonlocal();
        auto rng = make_rng(derive_seed(seed, rows * 1000 + cols));
        const auto order = make_order(method, topo, hyp, cf, rng);
        report.rows.push_back(scaling_row(rows, cols, to_string(method),
                                          partition_from_order(order, topo), hyp, topo, model));
    }
    return report;
}

}  // namespace freqcal
