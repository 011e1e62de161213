#pragma once

/**
 * @file harness.hpp
 * @brief Seeded experiment drivers and report emission.
 *
 * Seeds split hierarchically: experiment seed -> replica seed -> {model,
 * start, noise, order, non-local topology} substreams. Methods compared
 * within one replica share the model draw and starting point.
 */

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <mutex>
#include <optional>
#include <exception>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <thread>
#include <tuple>
#include <vector>

#include "freqcal/bcd.hpp"
#include "freqcal/config.hpp"
#include "freqcal/error_model.hpp"
#include "freqcal/ordering.hpp"
#include "freqcal/serialize.hpp"
#include "freqcal/topology.hpp"

namespace freqcal {

struct ReportRow {
    std::string experiment;
    double sweep_value = 0.0;
    std::size_t replica = 0;
    std::string method;
    double rsd = 0.0;
    double g_initial = 0.0;
    double g_final = 0.0;
    double delta_g = 0.0;  // g_final minus the baseline row of the same (sweep, replica)
    double log_cost_empirical = 0.0;
    double log_cost_search = 0.0;

    friend bool operator==(const ReportRow&, const ReportRow&) = default;
};

struct SummaryRow {
    double sweep_value = 0.0;
    std::string method;
    double rsd = 0.0;
    std::size_t count = 0;
    double mean_g_initial = 0.0;
    double std_g_initial = 0.0;
    double mean_g_final = 0.0;
    double std_g_final = 0.0;
    double mean_delta_g = 0.0;
    double std_delta_g = 0.0;
    double q05_delta_g = 0.0;
    double q50_delta_g = 0.0;
    double q95_delta_g = 0.0;
    double mean_log_cost_search = 0.0;

    friend bool operator==(const SummaryRow&, const SummaryRow&) = default;
};

struct ExperimentReport {
    std::string experiment;
    std::vector<ReportRow> rows;
    std::vector<SummaryRow> summary;

    friend bool operator==(const ExperimentReport&, const ExperimentReport&) = default;
};

// --- statistics ------------------------------------------------------------

inline double mean(const std::vector<double>& xs) {
    if (xs.empty()) return 0.0;
    double s = 0.0;
    for (double x : xs) s += x;
    return s / static_cast<double>(xs.size());
}

/// Sample standard deviation (n - 1).
inline double stddev(const std::vector<double>& xs) {
    if (xs.size() < 2) return 0.0;
    const double m = mean(xs);
    double s = 0.0;
    for (double x : xs) s += (x - m) * (x - m);
    return std::sqrt(s / static_cast<double>(xs.size() - 1));
}

/// Linear-interpolated quantile, q in [0, 1].
inline double quantile(std::vector<double> xs, double q) {
    if (xs.empty()) return 0.0;
    std::sort(xs.begin(), xs.end());
    const double pos = q * static_cast<double>(xs.size() - 1);
    const auto lo = static_cast<std::size_t>(std::floor(pos));
    const auto hi = std::min(lo + 1, xs.size() - 1);
    return xs[lo] + (pos - static_cast<double>(lo)) * (xs[hi] - xs[lo]);
}

inline double median(std::vector<double> xs) { return quantile(std::move(xs), 0.5); }

/// Groups rows by (sweep_value, method, rsd) in first-appearance order.
inline std::vector<SummaryRow> summarize(const std::vector<ReportRow>& rows) {
    using Key = std::tuple<double, std::string, double>;
    std::vector<Key> keys;
    std::map<Key, std::vector<const ReportRow*>> groups;
    for (const auto& r : rows) {
        Key k{r.sweep_value, r.method, r.rsd};
        auto [it, inserted] = groups.try_emplace(k);
        if (inserted) keys.push_back(k);
        it->second.push_back(&r);
    }
    std::vector<SummaryRow> out;
    for (const auto& k : keys) {
        const auto& g = groups[k];
        std::vector<double> gi, gf, dg, lc;
        for (const auto* r : g) {
            gi.push_back(r->g_initial);
            gf.push_back(r->g_final);
            dg.push_back(r->delta_g);
            lc.push_back(r->log_cost_search);
        }
        SummaryRow s;
        std::tie(s.sweep_value, s.method, s.rsd) = k;
        s.count = g.size();
        s.mean_g_initial = mean(gi);
        s.std_g_initial = stddev(gi);
        s.mean_g_final = mean(gf);
        s.std_g_final = stddev(gf);
        s.mean_delta_g = mean(dg);
        s.std_delta_g = stddev(dg);
        s.q05_delta_g = quantile(dg, 0.05);
        s.q50_delta_g = quantile(dg, 0.5);
        s.q95_delta_g = quantile(dg, 0.95);
        s.mean_log_cost_search = mean(lc);
        out.push_back(std::move(s));
    }
    return out;
}

// --- replica execution -----------------------------------------------------

/// Worker count: FREQCAL_THREADS if set and positive, else hardware concurrency.
inline std::size_t replica_threads() {
    std::size_t n = std::max(1u, std::thread::hardware_concurrency());
    if (const char* env = std::getenv("FREQCAL_THREADS")) {
        char* end = nullptr;
        const long v = std::strtol(env, &end, 10);
        if (end != env && v > 0) n = static_cast<std::size_t>(v);
    }
    return n;
}

/// Runs fn(i) for i in [0, n) on up to `threads` workers and returns the
/// results in index order.
template <class Fn>
auto run_replicas(std::size_t n, Fn&& fn, std::size_t threads = replica_threads())
    -> std::vector<decltype(fn(std::size_t{}))> {
    std::vector<decltype(fn(std::size_t{}))> out(n);
    threads = std::min(threads, n);
    if (threads <= 1) {
        for (std::size_t i = 0; i < n; ++i) out[i] = fn(i);
        return out;
    }
    std::atomic<std::size_t> next{0};
    std::exception_ptr error;
    std::mutex error_mutex;
    std::vector<std::jthread> pool;
    for (std::size_t t = 0; t < threads; ++t) {
        pool.emplace_back([&] {
            for (std::size_t i = next++; i < n; i = next++) {
                try {
                    out[i] = fn(i);
                } catch (...) {
                    std::lock_guard lock(error_mutex);
                    if (!error) error = std::current_exception();
                }
            }
        });
    }
    pool.clear();
    if (error) std::rethrow_exception(error);
    return out;
}

// --- shared replica setup --------------------------------------------------

struct ReplicaSetup {
    ChipTopology topology;
    ErrorModel model;
    FrequencyAssignment start;
    std::uint64_t seed = 0;
};

inline std::uint64_t replica_seed(std::uint64_t experiment_seed, std::size_t replica) {
    return derive_seed(experiment_seed, 1000003ULL + replica);
}

/// Topology (with seeded non-local pairs when a radius is configured), model
/// and starting point for one replica. `nonlocal_max` overrides the upper
/// end of the non-local strength range when given.
inline ReplicaSetup make_replica(const ExperimentConfig& cfg, std::size_t rows, std::size_t cols,
                                 std::uint64_t seed, std::optional<double> nonlocal_max = {}) {
    ReplicaSetup r;
    r.seed = seed;
    r.topology = build_grid_topology(rows, cols);
    if (cfg.topology.nonlocal_radius >= 2) {
        auto rng = make_rng(derive_seed(seed, stream::nonlocal));
        r.topology = add_nonlocal_pairs(r.topology, cfg.topology.nonlocal_radius,
                                        cfg.error_model.nonlocal_density, rng);
    }
    auto ranges = cfg.error_model;
    if (nonlocal_max) {
        ranges.nonlocal_strength.max = *nonlocal_max;
        ranges.nonlocal_strength.min = std::min(ranges.nonlocal_strength.min, *nonlocal_max);
    }
    auto model_rng = make_rng(derive_seed(seed, stream::model));
    r.model = ErrorModel(sample_error_model(r.topology, ranges, model_rng));
    if (cfg.bcd.start == StartKind::sweet_spot) {
        r.start = sweet_spot_assignment(r.model.params());
    } else {
        auto start_rng = make_rng(derive_seed(seed, stream::start));
        r.start = random_assignment(r.model.params(), start_rng);
    }
    return r;
}

inline CrosstalkHypothesis make_hypothesis(HypothesisKind kind, const ChipTopology& topo) {
    return kind == HypothesisKind::exact ? CrosstalkHypothesis::exact(topo)
                                         : CrosstalkHypothesis::local(topo);
}

/// Local pairs plus the non-local pairs the model couples with non-zero strength.
inline CrosstalkHypothesis active_hypothesis(const ChipTopology& topo, const ErrorModel& model) {
    auto pairs = topo.local_pairs();
    const auto& p = model.params();
    for (std::size_t i = 0; i < p.pairs.size(); ++i) {
        if (p.pairs[i].locality == Locality::nonlocal && p.strengths[i] != 0.0) {
            pairs.push_back(p.pairs[i]);
        }
    }
    return {topo.n_params(), std::move(pairs)};
}

inline ReportRow make_row(const std::string& experiment, double sweep, std::size_t replica,
                          const std::string& method, double rsd, const BcdResult& r) {
    return {experiment, sweep, replica, method, rsd, r.g_initial, r.g_final, 0.0,
            r.epoch_log_cost_empirical, r.epoch_log_cost_search};
}

/// Fills delta_g against the first row of each (sweep, replica) group.
inline void fill_deltas(std::vector<ReportRow>& rows) {
    std::map<std::pair<double, std::size_t>, double> baseline;
    for (auto& r : rows) {
        auto [it, inserted] = baseline.try_emplace({r.sweep_value, r.replica}, r.g_final);
        r.delta_g = r.g_final - it->second;
    }
}

inline ExperimentReport finish_report(std::string name,
                                      std::vector<std::vector<ReportRow>> per_replica) {
    ExperimentReport report;
    report.experiment = std::move(name);
    for (auto& rows : per_replica) {
        for (auto& r : rows) report.rows.push_back(std::move(r));
    }
    // Ordered merge: sweep index is implicit in emission order within a
    // replica; sort by (sweep, replica) keeping method order.
    std::stable_sort(report.rows.begin(), report.rows.end(), [](const ReportRow& a, const ReportRow& b) {
        return std::tie(a.sweep_value, a.replica) < std::tie(b.sweep_value, b.replica);
    });
    fill_deltas(report.rows);
    report.summary = summarize(report.rows);
    return report;
}

// --- experiments -----------------------------------------------------------

/// Every replica: one model and start, one BCD run per rsd value.
inline ExperimentReport exp_noise_robustness(const ExperimentConfig& cfg, std::uint64_t seed) {
    cfg.validate();
    const auto& ex = cfg.experiment;
    if (std::find(ex.rsd_values.begin(), ex.rsd_values.end(), 0.0) == ex.rsd_values.end()) {
        throw ConfigError("noise experiment needs rsd = 0 among rsd_values");
    }
    auto per = run_replicas(ex.replicas, [&](std::size_t i) {
        const auto rs = replica_seed(seed, i);
        const auto rep = make_replica(cfg, cfg.topology.rows, cfg.topology.cols, rs);
        const auto hyp = make_hypothesis(cfg.bcd.hypothesis, rep.topology);
        std::vector<ReportRow> rows;
        for (double rsd : ex.rsd_values) {
            auto bcd = cfg.bcd.bcd;
            bcd.rsd = rsd;
            const auto r = run_bcd(bcd, rep.topology, rep.model, hyp, rep.start, rs);
            rows.push_back(make_row("noise", 0.0, i, to_string(bcd.order_method), rsd, r));
        }
        return rows;
    });
    return finish_report("noise", std::move(per));
}

/// Paired NNA vs random block order on the same model and start.
inline ExperimentReport exp_nna_vs_random(const ExperimentConfig& cfg, std::uint64_t seed) {
    cfg.validate();
    auto per = run_replicas(cfg.experiment.replicas, [&](std::size_t i) {
        const auto rs = replica_seed(seed, i);
        const auto rep = make_replica(cfg, cfg.topology.rows, cfg.topology.cols, rs);
        const auto hyp = make_hypothesis(cfg.bcd.hypothesis, rep.topology);
        std::vector<ReportRow> rows;
        for (auto method : {OrderMethod::nna, OrderMethod::random}) {
            auto bcd = cfg.bcd.bcd;
            bcd.order_method = method;
            const auto r = run_bcd(bcd, rep.topology, rep.model, hyp, rep.start, rs);
            rows.push_back(make_row("nna_vs_random", 0.0, i, to_string(method), bcd.rsd, r));
        }
        return rows;
    });
    return finish_report("nna_vs_random", std::move(per));
}

/// Per grid size (sweep value = N) and order method.
inline ExperimentReport exp_scaling(const ExperimentConfig& cfg, std::uint64_t seed) {
    cfg.validate();
    const auto& ex = cfg.experiment;
    for (std::size_t i = 1; i < ex.sizes.size(); ++i) {
        if (ex.sizes[i].first * ex.sizes[i].second < ex.sizes[i - 1].first * ex.sizes[i - 1].second) {
            throw ConfigError("scaling sizes must be ascending");
        }
    }
    std::vector<std::vector<ReportRow>> per;
    for (std::size_t s = 0; s < ex.sizes.size(); ++s) {
        const auto [rows_, cols_] = ex.sizes[s];
        auto sized = run_replicas(ex.replicas, [&](std::size_t i) {
            const auto rs = replica_seed(derive_seed(seed, 7000 + s), i);
            const auto rep = make_replica(cfg, rows_, cols_, rs);
            const auto hyp = make_hypothesis(cfg.bcd.hypothesis, rep.topology);
            std::vector<ReportRow> rows;
            for (auto method : ex.methods) {
                auto bcd = cfg.bcd.bcd;
                bcd.order_method = method;
                const auto r = run_bcd(bcd, rep.topology, rep.model, hyp, rep.start, rs);
                rows.push_back(make_row("scaling", static_cast<double>(rows_ * cols_), i,
                                        to_string(method), bcd.rsd, r));
            }
            return rows;
        });
        for (auto& v : sized) per.push_back(std::move(v));
    }
    return finish_report("scaling", std::move(per));
}

/// Crosstalk-aware (true coupled pair set) vs crosstalk-unaware (local-only)
/// optimization as the non-local strength ceiling grows. The non-local pair
/// set and all other draws are shared across sweep values.
inline ExperimentReport exp_mismatch(const ExperimentConfig& cfg, std::uint64_t seed) {
    cfg.validate();
    const auto& ex = cfg.experiment;
    if (ex.nonlocal_max_values.size() < 2 ||
        std::find(ex.nonlocal_max_values.begin(), ex.nonlocal_max_values.end(), 0.0) ==
            ex.nonlocal_max_values.end()) {
        throw ConfigError("mismatch sweep needs >= 2 values including 0");
    }
    if (cfg.topology.nonlocal_radius < 2) {
        throw ConfigError("mismatch experiment needs topology.nonlocal_radius >= 2");
    }
    auto per = run_replicas(ex.replicas, [&](std::size_t i) {
        const auto rs = replica_seed(seed, i);
        std::vector<ReportRow> rows;
        for (double nl : ex.nonlocal_max_values) {
            const auto rep = make_replica(cfg, cfg.topology.rows, cfg.topology.cols, rs, nl);
            for (auto kind : {HypothesisKind::exact, HypothesisKind::local}) {
                const auto hyp = kind == HypothesisKind::exact
                                     ? active_hypothesis(rep.topology, rep.model)
                                     : CrosstalkHypothesis::local(rep.topology);
                const auto r = run_bcd(cfg.bcd.bcd, rep.topology, rep.model, hyp, rep.start, rs);
                rows.push_back(make_row("mismatch", nl, i,
                                        kind == HypothesisKind::exact ? "aware" : "unaware",
                                        cfg.bcd.bcd.rsd, r));
            }
        }
        return rows;
    });
    return finish_report("mismatch", std::move(per));
}

inline ExperimentReport run_experiment(const ExperimentConfig& cfg, std::uint64_t seed) {
    switch (cfg.experiment.kind) {
        case ExperimentKind::noise: return exp_noise_robustness(cfg, seed);
        case ExperimentKind::nna_vs_random: return exp_nna_vs_random(cfg, seed);
        case ExperimentKind::scaling: return exp_scaling(cfg, seed);
        case ExperimentKind::mismatch: return exp_mismatch(cfg, seed);
    }
    throw ConfigError("unknown experiment kind");
}

// --- emission --------------------------------------------------------------

inline constexpr const char* kReportCsvHeader =
    "experiment,sweep_value,replica,method,rsd,g_initial,g_final,delta_g,log_cost_empirical,"
    "log_cost_search";

inline void write_report_csv(std::ostream& os, const ExperimentReport& report) {
    os << kReportCsvHeader << '\n';
    for (const auto& r : report.rows) {
        os << r.experiment << ',' << format_double(r.sweep_value) << ',' << r.replica << ','
           << r.method << ',' << format_double(r.rsd) << ',' << format_double(r.g_initial) << ','
           << format_double(r.g_final) << ',' << format_double(r.delta_g) << ','
           << format_double(r.log_cost_empirical) << ',' << format_double(r.log_cost_search) << '\n';
    }
}

inline json report_to_json(const ExperimentReport& report) {
    json rows = json::array();
    for (const auto& r : report.rows) {
        rows.push_back({{"experiment", r.experiment},
                        {"sweep_value", r.sweep_value},
                        {"replica", r.replica},
                        {"method", r.method},
                        {"rsd", r.rsd},
                        {"g_initial", r.g_initial},
                        {"g_final", r.g_final},
                        {"delta_g", r.delta_g},
                        {"log_cost_empirical", r.log_cost_empirical},
                        {"log_cost_search", r.log_cost_search}});
    }
    json summary = json::array();
    for (const auto& s : report.summary) {
        summary.push_back({{"sweep_value", s.sweep_value},
                           {"method", s.method},
                           {"rsd", s.rsd},
                           {"count", s.count},
                           {"mean_g_initial", s.mean_g_initial},
                           {"std_g_initial", s.std_g_initial},
                           {"mean_g_final", s.mean_g_final},
                           {"std_g_final", s.std_g_final},
                           {"mean_delta_g", s.mean_delta_g},
                           {"std_delta_g", s.std_delta_g},
                           {"q05_delta_g", s.q05_delta_g},
                           {"q50_delta_g", s.q50_delta_g},
                           {"q95_delta_g", s.q95_delta_g},
                           {"mean_log_cost_search", s.mean_log_cost_search}});
    }
    return {{"experiment", report.experiment}, {"rows", rows}, {"summary", summary}};
}

inline ExperimentReport report_from_json(const json& j) {
    ExperimentReport report;
    report.experiment = j.at("experiment").get<std::string>();
    for (const auto& r : j.at("rows")) {
        report.rows.push_back({r.at("experiment"), r.at("sweep_value"), r.at("replica"),
                               r.at("method"), r.at("rsd"), r.at("g_initial"), r.at("g_final"),
                               r.at("delta_g"), r.at("log_cost_empirical"), r.at("log_cost_search")});
    }
    for (const auto& s : j.at("summary")) {
        SummaryRow row;
        row.sweep_value = s.at("sweep_value");
        row.method = s.at("method");
        row.rsd = s.at("rsd");
        row.count = s.at("count");
        row.mean_g_initial = s.at("mean_g_initial");
        row.std_g_initial = s.at("std_g_initial");
        row.mean_g_final = s.at("mean_g_final");
        row.std_g_final = s.at("std_g_final");
        row.mean_delta_g = s.at("mean_delta_g");
        row.std_delta_g = s.at("std_delta_g");
        row.q05_delta_g = s.at("q05_delta_g");
        row.q50_delta_g = s.at("q50_delta_g");
        row.q95_delta_g = s.at("q95_delta_g");
        row.mean_log_cost_search = s.at("mean_log_cost_search");
        report.summary.push_back(std::move(row));
    }
    return report;
}

enum class ReportFormat { csv, json };

inline ReportFormat parse_format(const std::string& s) {
    if (s == "csv") return ReportFormat::csv;
    if (s == "json") return ReportFormat::json;
    throw std::invalid_argument("unknown format '" + s + "'");
}

inline std::string report_to_string(const ExperimentReport& report, ReportFormat format) {
    std::ostringstream os;
    if (format == ReportFormat::csv) {
        write_report_csv(os, report);
    } else {
        os << report_to_json(report).dump(2) << '\n';
    }
    return os.str();
}

inline void emit_report(const ExperimentReport& report, ReportFormat format,
                        const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open '" + path.string() + "' for writing");
    out << report_to_string(report, format);
    if (!out) throw std::runtime_error("write to '" + path.string() + "' failed");
}

}  // namespace freqcal
