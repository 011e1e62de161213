#pragma once

/**
 * @file blocks.hpp
 * @brief Qubit-centric parameter blocks and their crosstalk footprints.
 *
 * Visiting qubits in some order, each qubit's block holds its own frequency
 * parameter plus every incident coupler that no earlier block claimed. The
 * visit order alone therefore determines the partition.
 */

#include <algorithm>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "freqcal/topology.hpp"

namespace freqcal {

struct Block {
    QubitId center = 0;
    std::vector<CouplerIndex> couplers;  // ascending

    std::size_t size() const noexcept { return 1 + couplers.size(); }

    /// Parameter ids: center qubit first, then couplers ascending.
    std::vector<ParamId> params(const ChipTopology& topo) const {
        std::vector<ParamId> out{topo.qubit_param(center)};
        for (auto e : couplers) out.push_back(topo.coupler_param(e));
        return out;
    }

    /// Qubits touched by the block's own gates, ascending.
    std::vector<QubitId> gate_qubits(const ChipTopology& topo) const {
        std::vector<QubitId> out{center};
        for (auto e : couplers) out.push_back(topo.coupler(e).other(center));
        std::sort(out.begin(), out.end());
        return out;
    }

    friend bool operator==(const Block&, const Block&) = default;
};

using Partition = std::vector<Block>;

/// Visited qubits and claimed couplers while a partition is being built.
class ClaimState {
public:
    explicit ClaimState(const ChipTopology& topo)
        : visited_(topo.n_qubits(), false), claimed_(topo.n_couplers(), false) {}

    bool visited(QubitId q) const { return visited_.at(q); }
    bool claimed(CouplerIndex e) const { return claimed_.at(e); }

    /// Number of couplers the block centered at q would claim now.
    std::size_t unclaimed_degree(QubitId q, const ChipTopology& topo) const {
        std::size_t n = 0;
        for (auto e : topo.incident_couplers(q)) n += claimed_[e] ? 0 : 1;
        return n;
    }

    /// Builds the block for `center` and marks it visited and its couplers claimed.
    Block claim(QubitId center, const ChipTopology& topo) {
        topo.check_qubit(center);
        if (visited_[center]) {
            throw std::logic_error("qubit " + std::to_string(center) + " already visited");
        }
        Block block = peek(center, topo);
        visited_[center] = true;
        for (auto e : block.couplers) claimed_[e] = true;
        return block;
    }

    /// The block `center` would get, without committing it.
    Block peek(QubitId center, const ChipTopology& topo) const {
        Block block{center, {}};
        for (auto e : topo.incident_couplers(center)) {
            if (!claimed_[e]) block.couplers.push_back(e);
        }
        return block;
    }

private:
    std::vector<bool> visited_;
    std::vector<bool> claimed_;
};

/// Block for `center` given the set of couplers already claimed. The caller
/// is responsible for adding the returned couplers to `claimed`.
inline Block block_for_center(QubitId center, std::span<const CouplerIndex> claimed,
                              const ChipTopology& topo) {
    topo.check_qubit(center);
    Block block{center, {}};
    for (auto e : topo.incident_couplers(center)) {
        if (std::find(claimed.begin(), claimed.end(), e) == claimed.end()) {
            block.couplers.push_back(e);
        }
    }
    return block;
}

inline void check_permutation(std::span<const QubitId> order, std::size_t n) {
    if (order.size() != n) {
        throw std::invalid_argument("order has length " + std::to_string(order.size()) +
                                    ", expected " + std::to_string(n));
    }
    std::vector<bool> seen(n, false);
    for (auto q : order) {
        if (q >= n || seen[q]) throw std::invalid_argument("order is not a permutation");
        seen[q] = true;
    }
}

inline Partition partition_from_order(std::span<const QubitId> order, const ChipTopology& topo) {
    check_permutation(order, topo.n_qubits());
    ClaimState state(topo);
    Partition out;
    out.reserve(order.size());
    for (auto q : order) out.push_back(state.claim(q, topo));
    return out;
}

/**
 * Qubits C a reduced experiment must include to capture every error term
 * that depends (under the hypothesis) on the block's parameters, and the
 * parameters whose gates live entirely on C.
 */
struct Footprint {
    std::vector<QubitId> qubits;  // ascending
    std::vector<ParamId> params;  // ascending; all parameters with support inside `qubits`

    std::size_t n_qubits() const noexcept { return qubits.size(); }
};

/// Parameters whose gates act only on qubits in `qubits`, ascending.
inline std::vector<ParamId> params_within(const std::vector<bool>& in_set, const ChipTopology& topo) {
    std::vector<ParamId> out;
    for (QubitId q = 0; q < topo.n_qubits(); ++q) {
        if (in_set[q]) out.push_back(topo.qubit_param(q));
    }
    for (CouplerIndex e = 0; e < topo.n_couplers(); ++e) {
        const auto& c = topo.coupler(e);
        if (in_set[c.a] && in_set[c.b]) out.push_back(topo.coupler_param(e));
    }
    return out;
}

inline Footprint footprint_from_qubits(std::vector<QubitId> qubits, const ChipTopology& topo) {
    std::vector<bool> in_set(topo.n_qubits(), false);
    for (auto q : qubits) in_set.at(q) = true;
    Footprint fp;
    for (QubitId q = 0; q < topo.n_qubits(); ++q) {
        if (in_set[q]) fp.qubits.push_back(q);
    }
    fp.params = params_within(in_set, topo);
    return fp;
}

namespace detail {

// One-step dependency closure: the block's own gate qubits plus the
// supports of every hypothesis partner of a block parameter.
inline std::vector<bool> footprint_mask(const Block& block, const CrosstalkHypothesis& hyp,
                                        const ChipTopology& topo) {
    std::vector<bool> in_set(topo.n_qubits(), false);
    auto mark = [&](ParamId p) {
        const auto s = topo.support(p);
        in_set[s.first] = true;
        if (s.second != kNoQubit) in_set[s.second] = true;
    };
    for (auto p : block.params(topo)) {
        mark(p);
        for (auto partner : hyp.partners(p)) mark(partner);
    }
    return in_set;
}

}  // namespace detail

inline Footprint footprint(const Block& block, const CrosstalkHypothesis& hyp,
                           const ChipTopology& topo) {
    const auto in_set = detail::footprint_mask(block, hyp, topo);
    Footprint fp;
    for (QubitId q = 0; q < topo.n_qubits(); ++q) {
        if (in_set[q]) fp.qubits.push_back(q);
    }
    fp.params = params_within(in_set, topo);
    return fp;
}

/// |C| only; avoids building the parameter list.
inline std::size_t footprint_size(const Block& block, const CrosstalkHypothesis& hyp,
                                  const ChipTopology& topo) {
    const auto in_set = detail::footprint_mask(block, hyp, topo);
    return static_cast<std::size_t>(std::count(in_set.begin(), in_set.end(), true));
}

}  // namespace freqcal
