#pragma once

// JSON and CSV encodings for topologies, error models, partitions and traces.

#include <algorithm>
#include <cstdio>
#include <cstdlib>
#include <ostream>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "freqcal/bcd.hpp"
#include "freqcal/blocks.hpp"
#include "freqcal/error_model.hpp"
#include "freqcal/topology.hpp"

namespace freqcal {

using json = nlohmann::json;

/// Shortest form that round-trips a double.
inline std::string format_double(double x) {
    char buf[32];
    for (int prec = 15; prec <= 17; ++prec) {
        std::snprintf(buf, sizeof buf, "%.*g", prec, x);
        if (std::strtod(buf, nullptr) == x) break;
    }
    return buf;
}

// {n_qubits, couplers: [[a,b],...], nonlocal_pairs: [[a,b],...]}
inline json topology_to_json(const ChipTopology& topo) {
    json couplers = json::array();
    for (const auto& c : topo.couplers()) couplers.push_back({c.a, c.b});
    json nonlocal = json::array();
    for (auto [a, b] : topo.nonlocal_qubit_pairs()) nonlocal.push_back({a, b});
    return {{"n_qubits", topo.n_qubits()}, {"couplers", couplers}, {"nonlocal_pairs", nonlocal}};
}

inline ChipTopology topology_from_json(const json& j) {
    std::vector<Coupler> couplers;
    for (const auto& c : j.at("couplers")) {
        couplers.emplace_back(c.at(0).get<QubitId>(), c.at(1).get<QubitId>());
    }
    ChipTopology topo(j.at("n_qubits").get<std::size_t>(), std::move(couplers));
    if (j.contains("nonlocal_pairs")) {
        std::vector<std::pair<QubitId, QubitId>> pairs;
        for (const auto& p : j.at("nonlocal_pairs")) {
            pairs.emplace_back(p.at(0).get<QubitId>(), p.at(1).get<QubitId>());
        }
        topo = topo.with_nonlocal_pairs(pairs);
    }
    return topo;
}

inline json error_model_to_json(const ErrorModelParams& p) {
    json intervals = json::array();
    for (const auto& iv : p.intervals) intervals.push_back({iv.lo, iv.hi});
    json pairs = json::array();
    for (std::size_t i = 0; i < p.pairs.size(); ++i) {
        pairs.push_back({{"a", p.pairs[i].first},
                         {"b", p.pairs[i].second},
                         {"locality", p.pairs[i].locality == Locality::local ? "local" : "nonlocal"},
                         {"strength", p.strengths[i]}});
    }
    return {{"base_error", p.base_error},   {"detune", p.detune},
            {"sweet_spots", p.sweet_spots}, {"intervals", intervals},
            {"pairs", pairs},               {"collision_width", p.collision_width}};
}

inline ErrorModelParams error_model_from_json(const json& j) {
    ErrorModelParams p;
    p.base_error = j.at("base_error").get<std::vector<double>>();
    p.detune = j.at("detune").get<std::vector<double>>();
    p.sweet_spots = j.at("sweet_spots").get<std::vector<double>>();
    for (const auto& iv : j.at("intervals")) p.intervals.push_back({iv.at(0), iv.at(1)});
    for (const auto& e : j.at("pairs")) {
        const auto loc = e.at("locality").get<std::string>() == "local" ? Locality::local
                                                                         : Locality::nonlocal;
        p.pairs.emplace_back(e.at("a").get<ParamId>(), e.at("b").get<ParamId>(), loc);
        p.strengths.push_back(e.at("strength").get<double>());
    }
    p.collision_width = j.at("collision_width").get<double>();
    p.validate();
    return p;
}

// [{center, couplers: [[a,b],...]}, ...]
inline json partition_to_json(const Partition& partition, const ChipTopology& topo) {
    json out = json::array();
    for (const auto& b : partition) {
        json couplers = json::array();
        for (auto e : b.couplers) couplers.push_back({topo.coupler(e).a, topo.coupler(e).b});
        out.push_back({{"center", b.center}, {"couplers", couplers}});
    }
    return out;
}

inline Partition partition_from_json(const json& j, const ChipTopology& topo) {
    Partition out;
    for (const auto& jb : j) {
        Block b{jb.at("center").get<QubitId>(), {}};
        for (const auto& c : jb.at("couplers")) {
            auto e = topo.coupler_index(c.at(0).get<QubitId>(), c.at(1).get<QubitId>());
            if (!e) throw std::invalid_argument("partition references unknown coupler");
            b.couplers.push_back(*e);
        }
        std::sort(b.couplers.begin(), b.couplers.end());
        out.push_back(std::move(b));
    }
    return out;
}

inline constexpr const char* kTraceCsvHeader =
    "epoch,step,block_center,g_noiseless,g_noisy_local,evals_cum,logcost_empirical_cum,"
    "logcost_search_cum";

inline void write_trace_csv(std::ostream& os, const BcdTrace& trace) {
    os << kTraceCsvHeader << '\n';
    for (const auto& r : trace) {
        os << r.epoch << ',' << r.step << ',' << r.block_center << ',' << format_double(r.g_noiseless)
           << ',' << format_double(r.g_noisy_local) << ',' << r.evals_cum << ','
           << format_double(r.logcost_empirical_cum) << ',' << format_double(r.logcost_search_cum)
           << '\n';
    }
}

inline json trace_to_json(const BcdTrace& trace) {
    json rows = json::array();
    for (const auto& r : trace) {
        rows.push_back({{"epoch", r.epoch},
                        {"step", r.step},
                        {"block_center", r.block_center},
                        {"g_noiseless", r.g_noiseless},
                        {"g_noisy_local", r.g_noisy_local},
                        {"evals_cum", r.evals_cum},
                        {"logcost_empirical_cum", r.logcost_empirical_cum},
                        {"logcost_search_cum", r.logcost_search_cum}});
    }
    return rows;
}

inline json bcd_result_to_json(const BcdResult& r, const ChipTopology& topo) {
    return {{"order", r.order},
            {"partition", partition_to_json(r.partition, topo)},
            {"g_initial", r.g_initial},
            {"g_final", r.g_final},
            {"epoch_g", r.epoch_g},
            {"epochs_run", r.epochs_run},
            {"converged", r.converged},
            {"evaluations", r.evaluations},
            {"epoch_log_cost_empirical", r.epoch_log_cost_empirical},
            {"epoch_log_cost_search", r.epoch_log_cost_search},
            {"total_log_cost_empirical", r.total_log_cost_empirical},
            {"total_log_cost_search", r.total_log_cost_search},
            {"f_final", std::vector<double>(r.f_final.values().begin(), r.f_final.values().end())},
            {"trace", trace_to_json(r.trace)}};
}

}  // namespace freqcal
