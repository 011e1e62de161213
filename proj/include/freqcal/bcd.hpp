#pragma once

/**
 * @file bcd.hpp
 * @brief Block coordinate descent over qubit-centric blocks.
 *
 * Each epoch visits the blocks in partition order. A block is solved by a
 * hypergrid local search: from the current block values B, every direction
 * d in {-1,0,1}^|B| is tried at B + d * r_n, infeasible candidates are
 * dropped, and the best measured candidate is taken. The zero direction is
 * evaluated first and only a strictly better candidate replaces it, so with
 * noiseless measurements the block objective never increases. The radius
 * shrinks as r_n = r_1 / n with the epoch number n.
 */

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <limits>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "freqcal/blocks.hpp"
#include "freqcal/complexity.hpp"
#include "freqcal/error_model.hpp"
#include "freqcal/ordering.hpp"
#include "freqcal/rng.hpp"
#include "freqcal/topology.hpp"

namespace freqcal {

struct BcdConfig {
    std::size_t max_epochs = 20;
    std::size_t inner_iterations = 5;  // sub-iterations per block (S)
    double initial_radius = 0.1;       // r_1, in frequency units
    /// Optional override for r_n; epochs are 1-based.
    std::function<double(std::size_t)> radius_schedule;
    double tol = 1e-6;
    double rsd = 0.0;
    OrderMethod order_method = OrderMethod::nna;
    std::vector<QubitId> fixed_order;  // used when order_method == fixed
    QubitId traversal_start = 0;       // BFS/DFS root
    SdCostFunction order_cost{};       // cost the nna/oracle orders minimize
    double k = 100.0;                  // search-space ledger
    double t = 2.0;

    double radius(std::size_t epoch) const {
        return radius_schedule ? radius_schedule(epoch)
                               : initial_radius / static_cast<double>(epoch);
    }

    void validate() const {
        if (max_epochs < 1) throw std::invalid_argument("max_epochs must be >= 1");
        if (inner_iterations < 1) throw std::invalid_argument("inner_iterations must be >= 1");
        if (!(initial_radius > 0.0)) throw std::invalid_argument("initial_radius must be > 0");
        if (!(tol >= 0.0)) throw std::invalid_argument("tol must be >= 0");
        if (!(rsd >= 0.0)) throw std::invalid_argument("rsd must be >= 0");
        if (!(k >= 2.0) || !(t > 1.0)) throw std::invalid_argument("invalid cost-model k or t");
        order_cost.model.validate();
    }

    CostModel empirical_model() const { return CostModel::empirical(inner_iterations, t); }
    CostModel search_model() const { return CostModel::search(k, t, inner_iterations); }
};

/// All vectors in {-1,0,1}^dim. Index 0 is the zero vector.
inline std::vector<std::vector<int>> direction_set(std::size_t dim) {
    std::size_t total = 1;
    for (std::size_t i = 0; i < dim; ++i) total *= 3;
    std::vector<std::vector<int>> out;
    out.reserve(total);
    for (std::size_t idx = 0; idx < total; ++idx) {
        std::vector<int> d(dim);
        auto rest = idx;
        for (std::size_t i = 0; i < dim; ++i) {
            static constexpr int kDigit[3] = {0, -1, 1};
            d[i] = kDigit[rest % 3];
            rest /= 3;
        }
        out.push_back(std::move(d));
    }
    return out;
}

struct LocalSearchResult {
    std::vector<double> values;   // new block values
    double measured = 0.0;        // value of the winning candidate, last sub-iteration
    std::size_t evaluations = 0;  // sum of feasible candidates over sub-iterations
};

/**
 * S sub-iterations of B <- B + d* r with d* the measured argmin over the
 * feasible part of the direction set. `objective` maps a full parameter
 * vector to a measured value; it is called exactly once per feasible
 * candidate per sub-iteration.
 */
template <class Objective>
LocalSearchResult local_search_block(std::span<const ParamId> block_params,
                                     const FrequencyAssignment& f, Objective&& objective,
                                     double radius, std::size_t S) {
    if (!(radius > 0.0)) throw std::invalid_argument("radius must be > 0");
    if (S < 1) throw std::invalid_argument("S must be >= 1");
    const auto dirs = direction_set(block_params.size());
    std::vector<double> work(f.values().begin(), f.values().end());
    const auto& intervals = f.intervals();

    LocalSearchResult result;
    std::vector<double> best(block_params.size());
    for (std::size_t it = 0; it < S; ++it) {
        std::vector<double> center(block_params.size());
        for (std::size_t i = 0; i < block_params.size(); ++i) center[i] = work[block_params[i]];
        best = center;
        double best_value = std::numeric_limits<double>::infinity();
        for (const auto& d : dirs) {
            bool feasible = true;
            for (std::size_t i = 0; i < d.size() && feasible; ++i) {
                const double x = center[i] + d[i] * radius;
                feasible = intervals[block_params[i]].contains(x);
                work[block_params[i]] = x;
            }
            if (!feasible) continue;
            const double v = objective(std::span<const double>(work));
            ++result.evaluations;
            if (v < best_value) {
                best_value = v;
                for (std::size_t i = 0; i < d.size(); ++i) best[i] = work[block_params[i]];
            }
        }
        for (std::size_t i = 0; i < block_params.size(); ++i) work[block_params[i]] = best[i];
        result.measured = best_value;
    }
    result.values = best;
    return result;
}

struct TraceRow {
    std::size_t epoch = 0;
    std::size_t step = 0;
    QubitId block_center = 0;
    double g_noiseless = 0.0;
    double g_noisy_local = 0.0;
    std::size_t evals_cum = 0;
    double logcost_empirical_cum = 0.0;
    double logcost_search_cum = 0.0;

    friend bool operator==(const TraceRow&, const TraceRow&) = default;
};

using BcdTrace = std::vector<TraceRow>;

struct BcdResult {
    BcdTrace trace;
    std::vector<QubitId> order;
    Partition partition;
    FrequencyAssignment f_final;
    double g_initial = 0.0;
    double g_final = 0.0;
    std::vector<double> epoch_g;  // noiseless G after each epoch
    std::size_t epochs_run = 0;
    bool converged = false;
    std::size_t evaluations = 0;
    double epoch_log_cost_empirical = 0.0;  // one epoch of this partition
    double epoch_log_cost_search = 0.0;
    double total_log_cost_empirical = 0.0;  // whole run
    double total_log_cost_search = 0.0;
};

/// Per-run state threaded through epochs.
struct BcdState {
    FrequencyAssignment f;
    std::size_t evaluations = 0;
    double log_empirical = -std::numeric_limits<double>::infinity();
    double log_search = -std::numeric_limits<double>::infinity();
    Rng noise_rng;
};

/// Blocks with their footprints under the optimizer's hypothesis.
struct PreparedBlock {
    Block block;
    std::vector<ParamId> params;
    Footprint footprint;
};

inline std::vector<PreparedBlock> prepare_blocks(const Partition& partition,
                                                 const CrosstalkHypothesis& hyp,
                                                 const ChipTopology& topo) {
    std::vector<PreparedBlock> out;
    out.reserve(partition.size());
    for (const auto& b : partition) out.push_back({b, b.params(topo), footprint(b, hyp, topo)});
    return out;
}

/// One pass over all blocks with radius r_epoch. Appends one trace row per block.
inline void run_epoch(std::span<const PreparedBlock> blocks, std::size_t epoch,
                      const BcdConfig& config, const ErrorModel& model, BcdState& state,
                      BcdTrace& trace) {
    const double radius = config.radius(epoch);
    const auto emp = config.empirical_model();
    const auto search = config.search_model();
    std::size_t step = 0;
    for (const auto& pb : blocks) {
        EvalLedger ledger;
        auto objective = [&](std::span<const double> values) {
            const Evaluation clean{model.reduced_value(pb.footprint.params, values), 1};
            return ledger.record(noisy_eval(clean, config.rsd, state.noise_rng));
        };
        auto res = local_search_block(pb.params, state.f, objective, radius,
                                      config.inner_iterations);
        for (std::size_t i = 0; i < pb.params.size(); ++i) state.f[pb.params[i]] = res.values[i];
        state.evaluations += ledger.count;
        const auto bsize = pb.block.size();
        const auto csize = pb.footprint.n_qubits();
        state.log_empirical = log_add_exp(state.log_empirical, block_log_cost(bsize, csize, emp));
        state.log_search = log_add_exp(state.log_search, block_log_cost(bsize, csize, search));
        trace.push_back({epoch, ++step, pb.block.center, model.global_value(state.f.values()),
                         res.measured, state.evaluations, state.log_empirical, state.log_search});
    }
}

/// Full run: order -> partition -> epochs until the noiseless epoch-over-epoch
/// change in G drops below tol or max_epochs is reached.
inline BcdResult run_bcd(const BcdConfig& config, const ChipTopology& topo, const ErrorModel& model,
                         const CrosstalkHypothesis& hyp, const FrequencyAssignment& f0,
                         std::uint64_t seed) {
    config.validate();
    check_feasible(f0, model);
    if (hyp.n_params() != topo.n_params()) {
        throw std::invalid_argument("hypothesis does not match topology");
    }

    BcdResult result;
    auto order_rng = make_rng(derive_seed(seed, stream::order));
    result.order = make_order(config.order_method, topo, hyp, config.order_cost, order_rng,
                              config.traversal_start, config.fixed_order);
    result.partition = partition_from_order(result.order, topo);
    const auto blocks = prepare_blocks(result.partition, hyp, topo);
    result.epoch_log_cost_empirical =
        epoch_cost(result.partition, hyp, topo, config.empirical_model());
    result.epoch_log_cost_search = epoch_cost(result.partition, hyp, topo, config.search_model());

    BcdState state{f0, 0, -std::numeric_limits<double>::infinity(),
                   -std::numeric_limits<double>::infinity(),
                   make_rng(derive_seed(seed, stream::noise))};
    result.g_initial = model.global_value(f0.values());
    double previous = result.g_initial;
    for (std::size_t epoch = 1; epoch <= config.max_epochs; ++epoch) {
        run_epoch(blocks, epoch, config, model, state, result.trace);
        const double g = model.global_value(state.f.values());
        result.epoch_g.push_back(g);
        result.epochs_run = epoch;
        const double change = previous - g;
        previous = g;
        if (std::abs(change) < config.tol) {
            result.converged = true;
            break;
        }
    }
    result.g_final = previous;
    result.f_final = std::move(state.f);
    result.evaluations = state.evaluations;
    result.total_log_cost_empirical = state.log_empirical;
    result.total_log_cost_search = state.log_search;
    return result;
}

/// True iff noiseless G never increases along the trace (starting from g_initial).
inline bool trace_is_monotone(const BcdResult& r) {
    double prev = r.g_initial;
    for (const auto& row : r.trace) {
        if (row.g_noiseless > prev) return false;
        prev = row.g_noiseless;
    }
    return true;
}

/**
 * Runs the diminishing-radius search (r_n = 1/n, n = 1..S, S sub-iterations
 * per radius) on a test objective with known minimizer and returns the
 * sup-norm distance of the result from it.
 */
template <class Objective>
double inexactness_check(Objective&& objective, std::span<const double> start,
                         std::span<const Interval> box, std::span<const double> minimizer,
                         std::size_t S) {
    if (start.size() != box.size() || start.size() != minimizer.size()) {
        throw std::invalid_argument("dimension mismatch");
    }
    std::vector<ParamId> params(start.size());
    for (std::size_t i = 0; i < params.size(); ++i) params[i] = i;
    FrequencyAssignment x({start.begin(), start.end()}, {box.begin(), box.end()});
    for (std::size_t n = 1; n <= S; ++n) {
        const auto res = local_search_block(params, x, objective, 1.0 / static_cast<double>(n), S);
        for (std::size_t i = 0; i < params.size(); ++i) x[i] = res.values[i];
    }
    double dist = 0.0;
    for (std::size_t i = 0; i < params.size(); ++i) {
        dist = std::max(dist, std::abs(x[i] - minimizer[i]));
    }
    return dist;
}

}  // namespace freqcal
