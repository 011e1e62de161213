#pragma once

// TOML configuration: [topology], [error_model], [bcd], [experiment].

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <toml.hpp>

#include "freqcal/bcd.hpp"
#include "freqcal/error_model.hpp"
#include "freqcal/ordering.hpp"

namespace freqcal {

class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

enum class HypothesisKind { exact, local };
enum class StartKind { random, sweet_spot };

struct TopologySpec {
    std::size_t rows = 3;
    std::size_t cols = 3;
    std::size_t nonlocal_radius = 0;  // 0: no non-local pairs
};

struct BcdSettings {
    BcdConfig bcd{};
    HypothesisKind hypothesis = HypothesisKind::exact;
    StartKind start = StartKind::random;
};

enum class ExperimentKind { noise, nna_vs_random, scaling, mismatch };

inline std::string to_string(ExperimentKind k) {
    switch (k) {
        case ExperimentKind::noise: return "noise";
        case ExperimentKind::nna_vs_random: return "nna_vs_random";
        case ExperimentKind::scaling: return "scaling";
        case ExperimentKind::mismatch: return "mismatch";
    }
    return "unknown";
}

inline ExperimentKind parse_experiment_kind(const std::string& s) {
    for (auto k : {ExperimentKind::noise, ExperimentKind::nna_vs_random, ExperimentKind::scaling,
                   ExperimentKind::mismatch}) {
        if (to_string(k) == s) return k;
    }
    throw ConfigError("unknown experiment kind '" + s + "'");
}

struct ExperimentSettings {
    ExperimentKind kind = ExperimentKind::noise;
    std::size_t replicas = 100;
    std::vector<double> rsd_values{0.0, 0.2};
    std::vector<double> nonlocal_max_values{0.0, 0.05, 0.1, 0.2};
    std::vector<std::pair<std::size_t, std::size_t>> sizes{{2, 2}, {3, 3}, {4, 4}};
    std::vector<OrderMethod> methods{OrderMethod::nna, OrderMethod::bfs, OrderMethod::dfs,
                                     OrderMethod::random};
};

struct ExperimentConfig {
    TopologySpec topology{};
    ErrorModelRanges error_model{};
    BcdSettings bcd{};
    ExperimentSettings experiment{};

    void validate() const {
        if (topology.rows == 0 || topology.cols == 0) throw ConfigError("grid dimensions must be >= 1");
        if (topology.nonlocal_radius == 1) throw ConfigError("nonlocal_radius must be 0 or >= 2");
        try {
            error_model.validate();
            bcd.bcd.validate();
        } catch (const std::invalid_argument& e) {
            throw ConfigError(e.what());
        }
        if (experiment.replicas < 1) throw ConfigError("replicas must be >= 1");
        for (double v : experiment.rsd_values) {
            if (!(v >= 0.0)) throw ConfigError("rsd values must be >= 0");
        }
        for (double v : experiment.nonlocal_max_values) {
            if (!(v >= 0.0)) throw ConfigError("nonlocal_max values must be >= 0");
        }
        for (auto [r, c] : experiment.sizes) {
            if (r == 0 || c == 0) throw ConfigError("sizes must be >= 1x1");
        }
    }
};

/// "3x4" -> (3, 4).
inline std::pair<std::size_t, std::size_t> parse_size(std::string_view s) {
    const auto x = s.find('x');
    if (x == std::string_view::npos) throw ConfigError("size '" + std::string(s) + "' is not RxC");
    try {
        const auto r = std::stoul(std::string(s.substr(0, x)));
        const auto c = std::stoul(std::string(s.substr(x + 1)));
        return {r, c};
    } catch (const std::exception&) {
        throw ConfigError("size '" + std::string(s) + "' is not RxC");
    }
}

inline std::vector<std::pair<std::size_t, std::size_t>> parse_size_list(std::string_view s) {
    std::vector<std::pair<std::size_t, std::size_t>> out;
    std::size_t pos = 0;
    while (pos <= s.size()) {
        const auto comma = s.find(',', pos);
        const auto item = s.substr(pos, comma == std::string_view::npos ? s.npos : comma - pos);
        if (!item.empty()) out.push_back(parse_size(item));
        if (comma == std::string_view::npos) break;
        pos = comma + 1;
    }
    return out;
}

namespace detail {

inline Range read_range(const toml::table& t, std::string_view key, Range fallback) {
    const auto* node = t.get(key);
    if (!node) return fallback;
    const auto* arr = node->as_array();
    if (!arr || arr->size() != 2) {
        throw ConfigError("error_model." + std::string(key) + " must be a [min, max] pair");
    }
    auto num = [&](std::size_t i) {
        auto v = (*arr)[i].value<double>();
        if (!v) throw ConfigError("error_model." + std::string(key) + " entries must be numbers");
        return *v;
    };
    return {num(0), num(1)};
}

template <class T>
T read(const toml::table& t, std::string_view section, std::string_view key, T fallback) {
    const auto* node = t.get(key);
    if (!node) return fallback;
    if constexpr (std::is_same_v<T, std::size_t>) {
        auto v = node->value<std::int64_t>();
        if (!v || *v < 0) {
            throw ConfigError(std::string(section) + "." + std::string(key) +
                              " must be a non-negative integer");
        }
        return static_cast<std::size_t>(*v);
    } else {
        auto v = node->value<T>();
        if (!v) throw ConfigError(std::string(section) + "." + std::string(key) + " has wrong type");
        return *v;
    }
}

inline std::vector<double> read_doubles(const toml::table& t, std::string_view section,
                                        std::string_view key, std::vector<double> fallback) {
    const auto* node = t.get(key);
    if (!node) return fallback;
    const auto* arr = node->as_array();
    if (!arr) throw ConfigError(std::string(section) + "." + std::string(key) + " must be an array");
    std::vector<double> out;
    for (const auto& el : *arr) {
        auto v = el.value<double>();
        if (!v) throw ConfigError(std::string(section) + "." + std::string(key) + " must hold numbers");
        out.push_back(*v);
    }
    return out;
}

inline std::vector<std::string> read_strings(const toml::table& t, std::string_view section,
                                             std::string_view key) {
    std::vector<std::string> out;
    const auto* node = t.get(key);
    if (!node) return out;
    const auto* arr = node->as_array();
    if (!arr) throw ConfigError(std::string(section) + "." + std::string(key) + " must be an array");
    for (const auto& el : *arr) {
        auto v = el.value<std::string>();
        if (!v) throw ConfigError(std::string(section) + "." + std::string(key) + " must hold strings");
        out.push_back(*v);
    }
    return out;
}

inline const toml::table* section(const toml::table& root, std::string_view name) {
    const auto* node = root.get(name);
    if (!node) return nullptr;
    const auto* t = node->as_table();
    if (!t) throw ConfigError("[" + std::string(name) + "] must be a table");
    return t;
}

}  // namespace detail

inline ExperimentConfig config_from_toml(const toml::table& root) {
    using namespace detail;
    ExperimentConfig cfg;
    try {
        if (const auto* t = section(root, "topology")) {
            cfg.topology.rows = read(*t, "topology", "rows", cfg.topology.rows);
            cfg.topology.cols = read(*t, "topology", "cols", cfg.topology.cols);
            cfg.topology.nonlocal_radius =
                read(*t, "topology", "nonlocal_radius", cfg.topology.nonlocal_radius);
        }
        if (const auto* t = section(root, "error_model")) {
            auto& em = cfg.error_model;
            em.base_error = read_range(*t, "base_error", em.base_error);
            em.detune = read_range(*t, "detune", em.detune);
            em.local_strength = read_range(*t, "local_strength", em.local_strength);
            em.nonlocal_strength = read_range(*t, "nonlocal_strength", em.nonlocal_strength);
            em.collision_width = read_range(*t, "collision_width", em.collision_width);
            em.feasible_width = read_range(*t, "feasible_width", em.feasible_width);
            em.sweet_spot = read_range(*t, "sweet_spot", em.sweet_spot);
            em.nonlocal_density = read(*t, "error_model", "nonlocal_density", em.nonlocal_density);
        }
        // Default r_1 tracks the feasible width: 10% of its midpoint.
        auto& b = cfg.bcd.bcd;
        b.initial_radius =
            0.1 * 0.5 * (cfg.error_model.feasible_width.min + cfg.error_model.feasible_width.max);
        if (const auto* t = section(root, "bcd")) {
            b.max_epochs = read(*t, "bcd", "max_epochs", b.max_epochs);
            b.inner_iterations = read(*t, "bcd", "inner_iterations", b.inner_iterations);
            b.initial_radius = read(*t, "bcd", "initial_radius", b.initial_radius);
            b.tol = read(*t, "bcd", "tol", b.tol);
            b.rsd = read(*t, "bcd", "rsd", b.rsd);
            b.k = read(*t, "bcd", "k", b.k);
            b.t = read(*t, "bcd", "t", b.t);
            b.traversal_start = read(*t, "bcd", "traversal_start", b.traversal_start);
            b.order_method = parse_order_method(read<std::string>(*t, "bcd", "order", "nna"));
            b.order_cost.mode = parse_sd_mode(read<std::string>(*t, "bcd", "order_mode", "complexity"));
            b.order_cost.model = CostModel::search(b.k, b.t, 1);
            const auto hyp = read<std::string>(*t, "bcd", "hypothesis", "exact");
            if (hyp == "exact") cfg.bcd.hypothesis = HypothesisKind::exact;
            else if (hyp == "local") cfg.bcd.hypothesis = HypothesisKind::local;
            else throw ConfigError("bcd.hypothesis must be 'exact' or 'local'");
            const auto start = read<std::string>(*t, "bcd", "start", "random");
            if (start == "random") cfg.bcd.start = StartKind::random;
            else if (start == "sweet_spot") cfg.bcd.start = StartKind::sweet_spot;
            else throw ConfigError("bcd.start must be 'random' or 'sweet_spot'");
            if (const auto* node = t->get("fixed_order")) {
                const auto* arr = node->as_array();
                if (!arr) throw ConfigError("bcd.fixed_order must be an array");
                for (const auto& el : *arr) {
                    auto v = el.value<std::int64_t>();
                    if (!v || *v < 0) throw ConfigError("bcd.fixed_order must hold qubit indices");
                    b.fixed_order.push_back(static_cast<QubitId>(*v));
                }
            }
        }
        if (const auto* t = section(root, "experiment")) {
            auto& ex = cfg.experiment;
            ex.kind = parse_experiment_kind(read<std::string>(*t, "experiment", "kind", "noise"));
            ex.replicas = read(*t, "experiment", "replicas", ex.replicas);
            ex.rsd_values = read_doubles(*t, "experiment", "rsd_values", ex.rsd_values);
            ex.nonlocal_max_values =
                read_doubles(*t, "experiment", "nonlocal_max_values", ex.nonlocal_max_values);
            if (auto sizes = read_strings(*t, "experiment", "sizes"); !sizes.empty()) {
                ex.sizes.clear();
                for (const auto& s : sizes) ex.sizes.push_back(parse_size(s));
            }
            if (auto methods = read_strings(*t, "experiment", "methods"); !methods.empty()) {
                ex.methods.clear();
                for (const auto& m : methods) ex.methods.push_back(parse_order_method(m));
            }
        }
    } catch (const std::invalid_argument& e) {
        throw ConfigError(e.what());
    }
    cfg.validate();
    return cfg;
}

inline ExperimentConfig parse_config(std::string_view toml_text) {
    try {
        return config_from_toml(toml::parse(toml_text));
    } catch (const toml::parse_error& e) {
        std::ostringstream os;
        os << "TOML parse error: " << e.description() << " at " << e.source().begin;
        throw ConfigError(os.str());
    }
}

inline ExperimentConfig load_config(const std::filesystem::path& path) {
    try {
        return config_from_toml(toml::parse_file(path.string()));
    } catch (const toml::parse_error& e) {
        std::ostringstream os;
        os << path.string() << ": " << e.description() << " at " << e.source().begin;
        throw ConfigError(os.str());
    }
}

}  // namespace freqcal
