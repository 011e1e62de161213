#pragma once

/**
 * @file complexity.hpp
 * @brief Per-block and per-epoch cost accounting, kept in natural-log space.
 *
 * One block costs S * base^|B| * t^|C| with base = 3 for the empirical
 * model (hypergrid directions) and base = k for the search-space model.
 * An epoch costs the sum over blocks.
 */

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

#include "freqcal/blocks.hpp"
#include "freqcal/topology.hpp"

namespace freqcal {

enum class CostKind { empirical, search_space };

inline std::string to_string(CostKind k) {
    return k == CostKind::empirical ? "empirical" : "search";
}

inline CostKind parse_cost_kind(const std::string& s) {
    if (s == "empirical") return CostKind::empirical;
    if (s == "search" || s == "search_space") return CostKind::search_space;
    throw std::invalid_argument("unknown cost model '" + s + "'");
}

struct CostModel {
    CostKind kind = CostKind::search_space;
    double k = 100.0;         // discrete frequency options per gate
    double t = 2.0;           // per-qubit growth of one reduced evaluation
    std::size_t S = 1;        // inner iterations / samples

    void validate() const {
        if (kind == CostKind::search_space && !(k >= 2.0)) {
            throw std::invalid_argument("search-space model needs k >= 2");
        }
        if (!(t > 1.0)) throw std::invalid_argument("cost model needs t > 1");
        if (S < 1) throw std::invalid_argument("cost model needs S >= 1");
    }

    double log_base() const { return kind == CostKind::empirical ? std::log(3.0) : std::log(k); }

    static CostModel empirical(std::size_t S, double t = 2.0) {
        return {CostKind::empirical, 100.0, t, S};
    }
    static CostModel search(double k = 100.0, double t = 2.0, std::size_t S = 1) {
        return {CostKind::search_space, k, t, S};
    }
};

inline double log_add_exp(double a, double b) noexcept {
    if (a == -std::numeric_limits<double>::infinity()) return b;
    if (b == -std::numeric_limits<double>::infinity()) return a;
    const double m = std::max(a, b);
    return m + std::log1p(std::exp(-std::abs(a - b)));
}

inline double log_sum_exp(const std::vector<double>& xs) noexcept {
    if (xs.empty()) return -std::numeric_limits<double>::infinity();
    const double m = *std::max_element(xs.begin(), xs.end());
    if (!std::isfinite(m)) return m;
    double s = 0.0;
    for (double x : xs) s += std::exp(x - m);
    return m + std::log(s);
}

/// Number of evaluations one block needs: empirical S*3^|B|, search-space k^|B|.
inline double block_search_count(std::size_t block_size, const CostModel& model) {
    model.validate();
    if (block_size == 0) throw std::invalid_argument("empty block");
    const double b = static_cast<double>(block_size);
    if (model.kind == CostKind::empirical) {
        return std::log(static_cast<double>(model.S)) + b * std::log(3.0);
    }
    return b * std::log(model.k);
}

/// Cost of one reduced evaluation on |C| qubits: S * t^|C|.
inline double eval_cost(std::size_t footprint_qubits, const CostModel& model) {
    model.validate();
    if (footprint_qubits == 0) throw std::invalid_argument("empty footprint");
    return std::log(static_cast<double>(model.S)) +
           static_cast<double>(footprint_qubits) * std::log(model.t);
}

/// log(S * base^|B| * t^|C|); a single S factor per block.
inline double block_log_cost(std::size_t block_size, std::size_t footprint_qubits,
                             const CostModel& model) {
    if (block_size == 0) throw std::invalid_argument("empty block");
    if (footprint_qubits == 0) throw std::invalid_argument("empty footprint");
    return std::log(static_cast<double>(model.S)) +
           static_cast<double>(block_size) * model.log_base() +
           static_cast<double>(footprint_qubits) * std::log(model.t);
}

struct LedgerEntry {
    QubitId center = 0;
    std::size_t block_size = 0;
    std::size_t footprint_qubits = 0;
    double log_cost = 0.0;
};

class ComplexityLedger {
public:
    explicit ComplexityLedger(CostModel model) : model_(model) { model_.validate(); }

    void add(QubitId center, std::size_t block_size, std::size_t footprint_qubits) {
        const double c = block_log_cost(block_size, footprint_qubits, model_);
        entries_.push_back({center, block_size, footprint_qubits, c});
        total_ = log_add_exp(total_, c);
    }

    const std::vector<LedgerEntry>& entries() const noexcept { return entries_; }
    const CostModel& model() const noexcept { return model_; }

    /// log of the summed linear-domain cost.
    double log_total() const noexcept { return total_; }

    /// Largest single-block log-cost (log of S_max * T_max).
    double log_max_block() const noexcept {
        double m = -std::numeric_limits<double>::infinity();
        for (const auto& e : entries_) m = std::max(m, e.log_cost);
        return m;
    }

private:
    CostModel model_;
    std::vector<LedgerEntry> entries_;
    double total_ = -std::numeric_limits<double>::infinity();
};

inline ComplexityLedger epoch_ledger(const Partition& partition, const CrosstalkHypothesis& hyp,
                                     const ChipTopology& topo, const CostModel& model) {
    ComplexityLedger ledger(model);
    for (const auto& block : partition) {
        ledger.add(block.center, block.size(), footprint_size(block, hyp, topo));
    }
    return ledger;
}

/// log( sum_i S * base^|B_i| * t^|C_i| ).
inline double epoch_cost(const Partition& partition, const CrosstalkHypothesis& hyp,
                         const ChipTopology& topo, const CostModel& model) {
    return epoch_ledger(partition, hyp, topo, model).log_total();
}

struct ScalingRow {
    std::size_t rows = 0;
    std::size_t cols = 0;
    std::size_t n_qubits = 0;
    std::string order;
    double log_epoch_cost = 0.0;
    double log_max_block = 0.0;   // log(S_max * T_max)
    double log_cost_per_qubit = 0.0;
    bool bound_holds = false;     // epoch cost <= N * S_max * T_max
};

struct ScalingReport {
    std::vector<ScalingRow> rows;
    bool local_hypothesis = true;  // false: O(N) assumptions do not apply

    /// max over sizes of cost/N divided by min over sizes.
    double per_qubit_spread() const {
        if (rows.empty()) return 1.0;
        double lo = rows.front().log_cost_per_qubit;
        double hi = lo;
        for (const auto& r : rows) {
            lo = std::min(lo, r.log_cost_per_qubit);
            hi = std::max(hi, r.log_cost_per_qubit);
        }
        return std::exp(hi - lo);
    }
};

inline ScalingRow scaling_row(std::size_t rows, std::size_t cols, const std::string& order_name,
                              const Partition& partition, const CrosstalkHypothesis& hyp,
                              const ChipTopology& topo, const CostModel& model) {
    const auto ledger = epoch_ledger(partition, hyp, topo, model);
    ScalingRow row;
    row.rows = rows;
    row.cols = cols;
    row.n_qubits = topo.n_qubits();
    row.order = order_name;
    row.log_epoch_cost = ledger.log_total();
    row.log_max_block = ledger.log_max_block();
    const double log_n = std::log(static_cast<double>(row.n_qubits));
    row.log_cost_per_qubit = row.log_epoch_cost - log_n;
    row.bound_holds = row.log_epoch_cost <= log_n + row.log_max_block + 1e-12;
    return row;
}

}  // namespace freqcal
