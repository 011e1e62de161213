#pragma once

/**
 * @file topology.hpp
 * @brief Chip connectivity graph and crosstalk hypotheses.
 *
 * A chip with N qubits and E couplers has P = N + E tunable parameters:
 * parameter q < N is the frequency of qubit q, parameter N + e is the
 * frequency of coupler e. A parameter's "support" is the set of qubits its
 * gate acts on ({q} or the coupler's two endpoints).
 *
 * Local crosstalk pairs are generated by a fixed rule: two parameters
 * interact iff their supports share a qubit, or both are qubit parameters
 * whose qubits are joined by a coupler. Non-local pairs are qubit-qubit
 * entries between qubits at graph distance >= 2 and are added explicitly.
 */

#include <algorithm>
#include <array>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <optional>
#include <queue>
#include <set>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "freqcal/rng.hpp"

namespace freqcal {

using QubitId = std::size_t;
using ParamId = std::size_t;
using CouplerIndex = std::size_t;

inline constexpr std::size_t kNoQubit = std::numeric_limits<std::size_t>::max();

/// Unordered qubit pair, stored with a < b.
struct Coupler {
    QubitId a = 0;
    QubitId b = 0;

    Coupler() = default;
    Coupler(QubitId x, QubitId y) : a(std::min(x, y)), b(std::max(x, y)) {}

    bool touches(QubitId q) const noexcept { return a == q || b == q; }
    QubitId other(QubitId q) const noexcept { return q == a ? b : a; }

    friend auto operator<=>(const Coupler&, const Coupler&) = default;
};

enum class Locality : std::uint8_t { local, nonlocal };

/// Unordered parameter pair, stored with first < second.
struct CrosstalkPair {
    ParamId first = 0;
    ParamId second = 0;
    Locality locality = Locality::local;

    CrosstalkPair() = default;
    CrosstalkPair(ParamId x, ParamId y, Locality loc)
        : first(std::min(x, y)), second(std::max(x, y)), locality(loc) {}

    bool operator==(const CrosstalkPair& o) const noexcept {
        return first == o.first && second == o.second;
    }
    bool operator<(const CrosstalkPair& o) const noexcept {
        return std::pair(first, second) < std::pair(o.first, o.second);
    }
};

/// Qubits a parameter's gate acts on. `second` is kNoQubit for qubit parameters.
struct Support {
    QubitId first = kNoQubit;
    QubitId second = kNoQubit;

    bool contains(QubitId q) const noexcept { return first == q || second == q; }
    bool shares_qubit(const Support& o) const noexcept {
        return contains(o.first) || (o.second != kNoQubit && contains(o.second));
    }
};

class ChipTopology {
public:
    ChipTopology() = default;

    /// Generic constructor: any undirected simple graph. Local crosstalk
    /// pairs are derived from the coupler set.
    ChipTopology(std::size_t n_qubits, std::vector<Coupler> couplers)
        : n_qubits_(n_qubits), couplers_(std::move(couplers)) {
        std::sort(couplers_.begin(), couplers_.end());
        for (std::size_t e = 0; e < couplers_.size(); ++e) {
            const auto& c = couplers_[e];
            if (c.a == c.b) {
                throw std::invalid_argument("coupler endpoints must be distinct");
            }
            if (c.b >= n_qubits_) {
                throw std::out_of_range("coupler endpoint " + std::to_string(c.b) +
                                        " out of range");
            }
            if (e > 0 && couplers_[e - 1] == c) {
                throw std::invalid_argument("duplicate coupler (" + std::to_string(c.a) +
                                            "," + std::to_string(c.b) + ")");
            }
        }
        adjacency_.assign(n_qubits_, {});
        incident_.assign(n_qubits_, {});
        for (std::size_t e = 0; e < couplers_.size(); ++e) {
            const auto& c = couplers_[e];
            adjacency_[c.a].push_back(c.b);
            adjacency_[c.b].push_back(c.a);
            incident_[c.a].push_back(e);
            incident_[c.b].push_back(e);
        }
        for (auto& adj : adjacency_) std::sort(adj.begin(), adj.end());
        build_local_pairs();
    }

    std::size_t n_qubits() const noexcept { return n_qubits_; }
    std::size_t n_couplers() const noexcept { return couplers_.size(); }
    std::size_t n_params() const noexcept { return n_qubits_ + couplers_.size(); }

    const std::vector<Coupler>& couplers() const noexcept { return couplers_; }
    const Coupler& coupler(CouplerIndex e) const { return couplers_.at(e); }

    std::optional<CouplerIndex> coupler_index(QubitId a, QubitId b) const {
        const Coupler key(a, b);
        auto it = std::lower_bound(couplers_.begin(), couplers_.end(), key);
        if (it == couplers_.end() || *it != key) return std::nullopt;
        return static_cast<CouplerIndex>(it - couplers_.begin());
    }

    /// Qubits sharing a coupler with q, ascending.
    const std::vector<QubitId>& neighbors(QubitId q) const {
        check_qubit(q);
        return adjacency_[q];
    }

    /// Coupler indices touching q, ascending.
    const std::vector<CouplerIndex>& incident_couplers(QubitId q) const {
        check_qubit(q);
        return incident_[q];
    }

    std::size_t degree(QubitId q) const { return neighbors(q).size(); }

    std::size_t max_degree() const noexcept {
        std::size_t d = 0;
        for (const auto& adj : adjacency_) d = std::max(d, adj.size());
        return d;
    }

    bool is_qubit_param(ParamId p) const noexcept { return p < n_qubits_; }
    ParamId qubit_param(QubitId q) const noexcept { return q; }
    ParamId coupler_param(CouplerIndex e) const noexcept { return n_qubits_ + e; }
    CouplerIndex param_coupler(ParamId p) const noexcept { return p - n_qubits_; }

    Support support(ParamId p) const {
        if (p >= n_params()) throw std::out_of_range("parameter index out of range");
        if (is_qubit_param(p)) return {p, kNoQubit};
        const auto& c = couplers_[p - n_qubits_];
        return {c.a, c.b};
    }

    std::string param_label(ParamId p) const {
        if (is_qubit_param(p)) return "q" + std::to_string(p);
        const auto& c = couplers_.at(p - n_qubits_);
        return "c" + std::to_string(c.a) + "_" + std::to_string(c.b);
    }

    /// All crosstalk pairs the physical chip carries (local then nonlocal).
    const std::vector<CrosstalkPair>& crosstalk_pairs() const noexcept { return pairs_; }

    std::vector<CrosstalkPair> local_pairs() const {
        std::vector<CrosstalkPair> out;
        for (const auto& p : pairs_) {
            if (p.locality == Locality::local) out.push_back(p);
        }
        return out;
    }

    /// Non-local pairs as qubit pairs.
    std::vector<std::pair<QubitId, QubitId>> nonlocal_qubit_pairs() const {
        std::vector<std::pair<QubitId, QubitId>> out;
        for (const auto& p : pairs_) {
            if (p.locality == Locality::nonlocal) out.emplace_back(p.first, p.second);
        }
        return out;
    }

    /// Returns a copy with additional qubit-qubit non-local pairs. Pairs at
    /// graph distance < 2 and duplicates are rejected.
    ChipTopology with_nonlocal_pairs(std::span<const std::pair<QubitId, QubitId>> qubit_pairs) const {
        ChipTopology out = *this;
        std::set<CrosstalkPair> existing(pairs_.begin(), pairs_.end());
        for (auto [a, b] : qubit_pairs) {
            check_qubit(a);
            check_qubit(b);
            const auto dist = distances_from(a)[b];
            if (dist < 2) {
                throw std::invalid_argument("non-local pair (" + std::to_string(a) + "," +
                                            std::to_string(b) + ") has graph distance < 2");
            }
            CrosstalkPair pair(a, b, Locality::nonlocal);
            if (existing.insert(pair).second) out.pairs_.push_back(pair);
        }
        return out;
    }

    /// BFS hop counts from q; unreachable qubits get SIZE_MAX.
    std::vector<std::size_t> distances_from(QubitId q) const {
        check_qubit(q);
        std::vector<std::size_t> dist(n_qubits_, std::numeric_limits<std::size_t>::max());
        std::queue<QubitId> frontier;
        dist[q] = 0;
        frontier.push(q);
        while (!frontier.empty()) {
            const auto u = frontier.front();
            frontier.pop();
            for (auto v : adjacency_[u]) {
                if (dist[v] == std::numeric_limits<std::size_t>::max()) {
                    dist[v] = dist[u] + 1;
                    frontier.push(v);
                }
            }
        }
        return dist;
    }

    bool is_connected() const {
        if (n_qubits_ == 0) return true;
        const auto dist = distances_from(0);
        return std::none_of(dist.begin(), dist.end(), [](std::size_t d) {
            return d == std::numeric_limits<std::size_t>::max();
        });
    }

    void check_qubit(QubitId q) const {
        if (q >= n_qubits_) {
            throw std::out_of_range("qubit " + std::to_string(q) + " out of range (N=" +
                                    std::to_string(n_qubits_) + ")");
        }
    }

private:
    void build_local_pairs() {
        std::set<CrosstalkPair> local;
        for (QubitId q = 0; q < n_qubits_; ++q) {
            // Every parameter whose support contains q.
            std::vector<ParamId> group{qubit_param(q)};
            for (auto e : incident_[q]) group.push_back(coupler_param(e));
            for (std::size_t i = 0; i < group.size(); ++i) {
                for (std::size_t j = i + 1; j < group.size(); ++j) {
                    local.emplace(group[i], group[j], Locality::local);
                }
            }
        }
        for (const auto& c : couplers_) local.emplace(c.a, c.b, Locality::local);
        pairs_.assign(local.begin(), local.end());
    }

    std::size_t n_qubits_ = 0;
    std::vector<Coupler> couplers_;
    std::vector<std::vector<QubitId>> adjacency_;
    std::vector<std::vector<CouplerIndex>> incident_;
    std::vector<CrosstalkPair> pairs_;
};

/// Row-major square lattice: qubit (r, c) has index r * cols + c.
inline ChipTopology build_grid_topology(std::size_t rows, std::size_t cols) {
    if (rows == 0 || cols == 0) {
        throw std::invalid_argument("grid dimensions must be >= 1");
    }
    std::vector<Coupler> couplers;
    for (std::size_t r = 0; r < rows; ++r) {
        for (std::size_t c = 0; c < cols; ++c) {
            const auto q = r * cols + c;
            if (c + 1 < cols) couplers.emplace_back(q, q + 1);
            if (r + 1 < rows) couplers.emplace_back(q, q + cols);
        }
    }
    return ChipTopology(rows * cols, std::move(couplers));
}

/// Qubit pairs at graph distance in [2, radius], ascending.
inline std::vector<std::pair<QubitId, QubitId>> eligible_nonlocal_pairs(const ChipTopology& topo,
                                                                        std::size_t radius) {
    std::vector<std::pair<QubitId, QubitId>> out;
    for (QubitId a = 0; a < topo.n_qubits(); ++a) {
        const auto dist = topo.distances_from(a);
        for (QubitId b = a + 1; b < topo.n_qubits(); ++b) {
            if (dist[b] >= 2 && dist[b] <= radius) out.emplace_back(a, b);
        }
    }
    return out;
}

/// Activates round(density * #eligible) randomly chosen eligible pairs.
/// Pairs already present on the topology are skipped.
inline ChipTopology add_nonlocal_pairs(const ChipTopology& topo, std::size_t radius, double density,
                                       Rng& rng) {
    if (radius < 2) throw std::invalid_argument("non-local radius must be >= 2");
    if (!(density >= 0.0 && density <= 1.0)) {
        throw std::invalid_argument("non-local density must lie in [0, 1]");
    }
    auto eligible = eligible_nonlocal_pairs(topo, radius);
    std::shuffle(eligible.begin(), eligible.end(), rng);
    const auto take = static_cast<std::size_t>(
        std::llround(density * static_cast<double>(eligible.size())));
    eligible.resize(take);
    std::sort(eligible.begin(), eligible.end());
    return topo.with_nonlocal_pairs(eligible);
}

/**
 * The optimizer's assumed set of interacting parameter pairs, with a
 * per-parameter partner list. Need not agree with the chip's true pairs.
 */
class CrosstalkHypothesis {
public:
    CrosstalkHypothesis() = default;

    CrosstalkHypothesis(std::size_t n_params, std::vector<CrosstalkPair> pairs)
        : pairs_(std::move(pairs)), partners_(n_params) {
        std::sort(pairs_.begin(), pairs_.end());
        pairs_.erase(std::unique(pairs_.begin(), pairs_.end()), pairs_.end());
        for (const auto& p : pairs_) {
            if (p.second >= n_params) throw std::out_of_range("hypothesis pair out of range");
            if (p.first == p.second) throw std::invalid_argument("self pair in hypothesis");
            partners_[p.first].push_back(p.second);
            partners_[p.second].push_back(p.first);
        }
        for (auto& v : partners_) std::sort(v.begin(), v.end());
    }

    /// Exactly the chip's true pairs (crosstalk-aware).
    static CrosstalkHypothesis exact(const ChipTopology& topo) {
        return {topo.n_params(), topo.crosstalk_pairs()};
    }
    /// Local pairs only (crosstalk-unaware of non-local terms).
    static CrosstalkHypothesis local(const ChipTopology& topo) {
        return {topo.n_params(), topo.local_pairs()};
    }
    static CrosstalkHypothesis none(const ChipTopology& topo) { return {topo.n_params(), {}}; }

    std::size_t n_params() const noexcept { return partners_.size(); }
    const std::vector<CrosstalkPair>& pairs() const noexcept { return pairs_; }
    const std::vector<ParamId>& partners(ParamId p) const { return partners_.at(p); }

    bool has_nonlocal() const noexcept {
        return std::any_of(pairs_.begin(), pairs_.end(),
                           [](const CrosstalkPair& p) { return p.locality == Locality::nonlocal; });
    }

private:
    std::vector<CrosstalkPair> pairs_;
    std::vector<std::vector<ParamId>> partners_;
};

}  // namespace freqcal
