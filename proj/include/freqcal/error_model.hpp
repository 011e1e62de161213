#pragma once

/**
 * @file error_model.hpp
 * @brief Synthetic gate-error landscape used as a stand-in for calibration
 *        experiments.
 *
 * Every parameter p carries an error term
 *
 *     e_p(f) = base_p + detune_p (f_p - sweet_p)^2
 *              + sum_{(p,q) in pairs} s_pq exp(-(f_p - f_q)^2 / (2 w^2))
 *
 * and the chip-level objective is G(f) = (1/P) sum_p e_p(f). Each crosstalk
 * pair contributes to both of its endpoints' terms. The landscape is smooth,
 * bounded below by min base_p, and strictly local when all non-local
 * strengths vanish.
 */

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <random>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "freqcal/blocks.hpp"
#include "freqcal/rng.hpp"
#include "freqcal/topology.hpp"

namespace freqcal {

struct Interval {
    double lo = 0.0;
    double hi = 1.0;

    bool contains(double x) const noexcept { return x >= lo && x <= hi; }
    double width() const noexcept { return hi - lo; }
    friend bool operator==(const Interval&, const Interval&) = default;
};

struct Range {
    double min = 0.0;
    double max = 0.0;
    friend bool operator==(const Range&, const Range&) = default;
};

/// Sampling ranges for the synthetic model. `sweet_spot` is a fraction of
/// each parameter's feasible interval.
struct ErrorModelRanges {
    Range base_error{0.001, 0.01};
    Range detune{0.001, 0.005};
    Range local_strength{0.01, 0.05};
    Range nonlocal_strength{0.0, 0.05};
    Range collision_width{0.02, 0.08};
    Range feasible_width{1.0, 1.0};
    Range sweet_spot{0.25, 0.75};
    double nonlocal_density = 0.3;

    void validate() const {
        auto check = [](const Range& r, const char* name, bool strictly_positive) {
            if (!std::isfinite(r.min) || !std::isfinite(r.max) || r.min > r.max) {
                throw std::invalid_argument(std::string("invalid range for ") + name);
            }
            if (strictly_positive ? r.min <= 0.0 : r.min < 0.0) {
                throw std::invalid_argument(std::string("range for ") + name +
                                            (strictly_positive ? " must be positive"
                                                               : " must be non-negative"));
            }
        };
        check(base_error, "base_error", false);
        check(detune, "detune", false);
        check(local_strength, "local_strength", false);
        check(nonlocal_strength, "nonlocal_strength", false);
        check(collision_width, "collision_width", true);
        check(feasible_width, "feasible_width", true);
        check(sweet_spot, "sweet_spot", false);
        if (sweet_spot.max > 1.0) throw std::invalid_argument("sweet_spot must lie in [0, 1]");
        if (!(nonlocal_density >= 0.0 && nonlocal_density <= 1.0)) {
            throw std::invalid_argument("nonlocal_density must lie in [0, 1]");
        }
    }
};

/// Sampled coefficients. `pairs` and `strengths` are aligned and cover every
/// crosstalk pair the physical chip carries.
struct ErrorModelParams {
    std::vector<double> base_error;
    std::vector<double> detune;
    std::vector<double> sweet_spots;
    std::vector<Interval> intervals;
    std::vector<CrosstalkPair> pairs;
    std::vector<double> strengths;
    double collision_width = 0.05;

    std::size_t n_params() const noexcept { return base_error.size(); }

    void validate() const {
        const auto n = base_error.size();
        if (detune.size() != n || sweet_spots.size() != n || intervals.size() != n) {
            throw std::invalid_argument("error model vectors have mismatched lengths");
        }
        if (pairs.size() != strengths.size()) {
            throw std::invalid_argument("pairs and strengths have mismatched lengths");
        }
        if (!(collision_width > 0.0)) throw std::invalid_argument("collision_width must be > 0");
        for (std::size_t p = 0; p < n; ++p) {
            if (base_error[p] < 0.0 || detune[p] < 0.0) {
                throw std::invalid_argument("negative base_error or detune");
            }
            if (!(intervals[p].lo <= intervals[p].hi)) throw std::invalid_argument("empty interval");
        }
        for (std::size_t i = 0; i < pairs.size(); ++i) {
            if (pairs[i].second >= n) throw std::out_of_range("pair index out of range");
            if (strengths[i] < 0.0) throw std::invalid_argument("negative pair strength");
        }
    }
};

/// Draws every coefficient uniformly from its range. Draw order is fixed
/// and independent of the range values, so two calls with the same seed and
/// different `nonlocal_strength.max` produce proportionally scaled
/// non-local strengths and identical everything else.
inline ErrorModelParams sample_error_model(const ChipTopology& topo, const ErrorModelRanges& ranges,
                                           Rng& rng) {
    ranges.validate();
    const auto n = topo.n_params();
    ErrorModelParams params;
    params.base_error.resize(n);
    params.detune.resize(n);
    params.sweet_spots.resize(n);
    params.intervals.resize(n);
    for (std::size_t p = 0; p < n; ++p) {
        params.base_error[p] = uniform(rng, ranges.base_error.min, ranges.base_error.max);
        params.detune[p] = uniform(rng, ranges.detune.min, ranges.detune.max);
        const double width = uniform(rng, ranges.feasible_width.min, ranges.feasible_width.max);
        params.intervals[p] = {0.0, width};
        params.sweet_spots[p] = width * uniform(rng, ranges.sweet_spot.min, ranges.sweet_spot.max);
    }
    params.collision_width = uniform(rng, ranges.collision_width.min, ranges.collision_width.max);
    params.pairs = topo.crosstalk_pairs();
    params.strengths.resize(params.pairs.size());
    for (std::size_t i = 0; i < params.pairs.size(); ++i) {
        const auto& r = params.pairs[i].locality == Locality::local ? ranges.local_strength
                                                                    : ranges.nonlocal_strength;
        params.strengths[i] = uniform(rng, r.min, r.max);
    }
    return params;
}

/// One parameter vector (qubits first, then couplers) with its feasible box.
class FrequencyAssignment {
public:
    FrequencyAssignment() = default;
    FrequencyAssignment(std::vector<double> values, std::vector<Interval> intervals)
        : values_(std::move(values)), intervals_(std::move(intervals)) {
        if (values_.size() != intervals_.size()) {
            throw std::invalid_argument("values and intervals have mismatched lengths");
        }
    }

    std::size_t size() const noexcept { return values_.size(); }
    std::span<const double> values() const noexcept { return values_; }
    std::span<double> values() noexcept { return values_; }
    const std::vector<Interval>& intervals() const noexcept { return intervals_; }
    double operator[](ParamId p) const { return values_.at(p); }
    double& operator[](ParamId p) { return values_.at(p); }

    std::span<const double> qubit_freqs(const ChipTopology& topo) const {
        return std::span<const double>(values_).first(topo.n_qubits());
    }
    std::span<const double> coupler_freqs(const ChipTopology& topo) const {
        return std::span<const double>(values_).subspan(topo.n_qubits());
    }

    bool feasible() const noexcept {
        for (std::size_t p = 0; p < values_.size(); ++p) {
            if (!intervals_[p].contains(values_[p])) return false;
        }
        return true;
    }

    friend bool operator==(const FrequencyAssignment&, const FrequencyAssignment&) = default;

private:
    std::vector<double> values_;
    std::vector<Interval> intervals_;
};

inline FrequencyAssignment sweet_spot_assignment(const ErrorModelParams& params) {
    return {params.sweet_spots, params.intervals};
}

inline FrequencyAssignment random_assignment(const ErrorModelParams& params, Rng& rng) {
    std::vector<double> values(params.n_params());
    for (std::size_t p = 0; p < values.size(); ++p) {
        values[p] = uniform(rng, params.intervals[p].lo, params.intervals[p].hi);
    }
    return {std::move(values), params.intervals};
}

struct Evaluation {
    double value = 0.0;
    std::size_t eval_count_delta = 1;
};

/// Evaluation counter owned by one run.
struct EvalLedger {
    std::size_t count = 0;
    double record(const Evaluation& e) noexcept {
        count += e.eval_count_delta;
        return e.value;
    }
};

/**
 * The simulator's true landscape: parameters plus per-parameter lists of
 * (partner, strength) for every crosstalk pair with non-zero strength.
 */
class ErrorModel {
public:
    ErrorModel() = default;

    explicit ErrorModel(ErrorModelParams params) : params_(std::move(params)) {
        params_.validate();
        coupling_.assign(params_.n_params(), {});
        for (std::size_t i = 0; i < params_.pairs.size(); ++i) {
            const auto s = params_.strengths[i];
            if (s == 0.0) continue;
            const auto& pr = params_.pairs[i];
            coupling_[pr.first].push_back({pr.second, s});
            coupling_[pr.second].push_back({pr.first, s});
        }
        inv_two_w2_ = 1.0 / (2.0 * params_.collision_width * params_.collision_width);
    }

    const ErrorModelParams& params() const noexcept { return params_; }
    std::size_t n_params() const noexcept { return params_.n_params(); }

    /// e_p(f).
    double error_term(ParamId p, std::span<const double> f) const {
        const double d = f[p] - params_.sweet_spots[p];
        double e = params_.base_error[p] + params_.detune[p] * d * d;
        for (const auto& [q, s] : coupling_[p]) {
            const double delta = f[p] - f[q];
            e += s * std::exp(-delta * delta * inv_two_w2_);
        }
        return e;
    }

    /// G(f) without feasibility checks or bookkeeping.
    double global_value(std::span<const double> f) const {
        double sum = 0.0;
        for (ParamId p = 0; p < n_params(); ++p) sum += error_term(p, f);
        return sum / static_cast<double>(n_params());
    }

    /// e_p(f) counting only crosstalk with partners in `within` (ascending).
    double error_term_within(ParamId p, std::span<const ParamId> within,
                             std::span<const double> f) const {
        const double d = f[p] - params_.sweet_spots[p];
        double e = params_.base_error[p] + params_.detune[p] * d * d;
        for (const auto& [q, s] : coupling_[p]) {
            if (!std::binary_search(within.begin(), within.end(), q)) continue;
            const double delta = f[p] - f[q];
            e += s * std::exp(-delta * delta * inv_two_w2_);
        }
        return e;
    }

    /// Mean of e_p over the given parameters.
    double mean_over(std::span<const ParamId> ps, std::span<const double> f) const {
        double sum = 0.0;
        for (auto p : ps) sum += error_term(p, f);
        return sum / static_cast<double>(ps.size());
    }

    /// What a reduced experiment on `ps` (ascending) observes: mean error
    /// over `ps`, where crosstalk with parameters outside `ps` is absent
    /// because those gates are not run.
    double reduced_value(std::span<const ParamId> ps, std::span<const double> f) const {
        double sum = 0.0;
        for (auto p : ps) sum += error_term_within(p, ps, f);
        return sum / static_cast<double>(ps.size());
    }

    /// Closed-form dG/df.
    std::vector<double> gradient(std::span<const double> f) const {
        std::vector<double> g(n_params(), 0.0);
        const double inv_w2 = 2.0 * inv_two_w2_;
        for (ParamId p = 0; p < n_params(); ++p) {
            g[p] += 2.0 * params_.detune[p] * (f[p] - params_.sweet_spots[p]);
            // Pair (p,q) appears in both e_p and e_q; each copy differentiates
            // to -s * delta / w^2 * gauss with respect to f_p.
            for (const auto& [q, s] : coupling_[p]) {
                const double delta = f[p] - f[q];
                g[p] += -2.0 * s * delta * inv_w2 * std::exp(-delta * delta * inv_two_w2_);
            }
        }
        for (auto& x : g) x /= static_cast<double>(n_params());
        return g;
    }

    double lower_bound() const {
        return params_.base_error.empty()
                   ? 0.0
                   : *std::min_element(params_.base_error.begin(), params_.base_error.end());
    }

private:
    struct Coupling {
        ParamId other;
        double strength;
    };

    ErrorModelParams params_;
    std::vector<std::vector<Coupling>> coupling_;
    double inv_two_w2_ = 0.0;
};

inline void check_feasible(const FrequencyAssignment& f, const ErrorModel& model) {
    if (f.size() != model.n_params()) {
        throw std::invalid_argument("assignment has " + std::to_string(f.size()) +
                                    " entries, model expects " + std::to_string(model.n_params()));
    }
    if (!f.feasible()) throw std::domain_error("frequency assignment outside feasible box");
}

inline Evaluation global_objective(const FrequencyAssignment& f, const ErrorModel& model) {
    check_feasible(f, model);
    return {model.global_value(f.values()), 1};
}

/// Block-local objective: mean error over the footprint's parameters, with
/// only the crosstalk pairs that lie inside the footprint.
inline Evaluation reduced_objective(const Footprint& fp, const FrequencyAssignment& f,
                                    const ErrorModel& model) {
    if (fp.params.empty()) throw std::domain_error("empty footprint");
    check_feasible(f, model);
    return {model.reduced_value(fp.params, f.values()), 1};
}

/// value * (1 + rsd * xi), xi ~ N(0,1), clipped at zero.
inline Evaluation noisy_eval(const Evaluation& clean, double rsd, Rng& rng) {
    if (rsd < 0.0) throw std::invalid_argument("rsd must be >= 0");
    if (rsd == 0.0 || clean.value == 0.0) return clean;
    std::normal_distribution<double> normal(0.0, 1.0);
    const double xi = normal(rng);
    return {std::max(0.0, clean.value * (1.0 + rsd * xi)), clean.eval_count_delta};
}

/// Tensor grid of `points` evenly spaced values across each block parameter's
/// feasible interval.
inline std::vector<std::vector<double>> block_setting_grid(std::span<const ParamId> block_params,
                                                           std::span<const Interval> intervals,
                                                           std::size_t points) {
    if (points < 2) throw std::invalid_argument("grid needs at least 2 points per parameter");
    const auto dim = block_params.size();
    std::size_t total = 1;
    for (std::size_t i = 0; i < dim; ++i) total *= points;
    std::vector<std::vector<double>> out;
    out.reserve(total);
    for (std::size_t idx = 0; idx < total; ++idx) {
        std::vector<double> u(dim);
        auto rest = idx;
        for (std::size_t i = 0; i < dim; ++i) {
            const auto k = rest % points;
            rest /= points;
            const auto& iv = intervals[block_params[i]];
            u[i] = iv.lo + iv.width() * static_cast<double>(k) / static_cast<double>(points - 1);
        }
        out.push_back(std::move(u));
    }
    return out;
}

/**
 * True iff the reduced objective ranks every pair of block settings the
 * same way the global objective does (with the rest of f held fixed).
 * Differences below 1e-12 of the larger magnitude are treated as ties.
 */
inline bool check_order_preservation(const Block& block, const Footprint& fp,
                                     const FrequencyAssignment& f, const ErrorModel& model,
                                     const ChipTopology& topo,
                                     std::span<const std::vector<double>> settings) {
    const auto bparams = block.params(topo);
    FrequencyAssignment work = f;
    std::vector<double> reduced, global;
    reduced.reserve(settings.size());
    global.reserve(settings.size());
    for (const auto& u : settings) {
        if (u.size() != bparams.size()) throw std::invalid_argument("setting dimension mismatch");
        for (std::size_t i = 0; i < u.size(); ++i) work[bparams[i]] = u[i];
        reduced.push_back(reduced_objective(fp, work, model).value);
        global.push_back(global_objective(work, model).value);
    }
    auto scale = [](const std::vector<double>& v) {
        double m = 0.0;
        for (double x : v) m = std::max(m, std::abs(x));
        return m;
    };
    const double tol_r = 1e-12 * scale(reduced);
    const double tol_g = 1e-12 * scale(global);
    auto sign = [](double d, double tol) { return d > tol ? 1 : (d < -tol ? -1 : 0); };
    for (std::size_t i = 0; i < settings.size(); ++i) {
        for (std::size_t j = i + 1; j < settings.size(); ++j) {
            if (sign(reduced[i] - reduced[j], tol_r) != sign(global[i] - global[j], tol_g)) {
                return false;
            }
        }
    }
    return true;
}

}  // namespace freqcal
