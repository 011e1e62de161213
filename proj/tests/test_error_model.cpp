#include <gtest/gtest.h>

#include <cmath>
#include <numeric>
#include <vector>

#include "freqcal/blocks.hpp"
#include "freqcal/error_model.hpp"

using namespace freqcal;

namespace {

ErrorModelParams constant_params(const ChipTopology& t, double base, double detune, double sweet,
                                 double strength, double width) {
    ErrorModelParams p;
    const auto n = t.n_params();
    p.base_error.assign(n, base);
    p.detune.assign(n, detune);
    p.sweet_spots.assign(n, sweet);
    p.intervals.assign(n, {0.0, 1.0});
    p.pairs = t.crosstalk_pairs();
    p.strengths.assign(p.pairs.size(), strength);
    p.collision_width = width;
    return p;
}

// Direct transcription of the closed form, independent of ErrorModel's coupling lists.
double direct_g(const ErrorModelParams& p, std::span<const double> f) {
    std::vector<double> e(p.n_params());
    for (std::size_t i = 0; i < e.size(); ++i) {
        const double d = f[i] - p.sweet_spots[i];
        e[i] = p.base_error[i] + p.detune[i] * d * d;
    }
    for (std::size_t k = 0; k < p.pairs.size(); ++k) {
        const double d = f[p.pairs[k].first] - f[p.pairs[k].second];
        const double g =
            p.strengths[k] * std::exp(-d * d / (2.0 * p.collision_width * p.collision_width));
        e[p.pairs[k].first] += g;
        e[p.pairs[k].second] += g;
    }
    return std::accumulate(e.begin(), e.end(), 0.0) / static_cast<double>(e.size());
}

}  // namespace

TEST(ErrorModel, ZeroCouplingAtSweetSpots) {
    const auto t = build_grid_topology(2, 3);
    auto rng = make_rng(1);
    ErrorModelRanges r;
    r.local_strength = {0.0, 0.0};
    auto p = sample_error_model(t, r, rng);
    const ErrorModel m(p);
    const auto f = sweet_spot_assignment(p);
    const double mean_base =
        std::accumulate(p.base_error.begin(), p.base_error.end(), 0.0) / p.n_params();
    EXPECT_NEAR(global_objective(f, m).value, mean_base, 1e-15);
}

TEST(ErrorModel, SingleQubit) {
    const auto t = build_grid_topology(1, 1);
    const ErrorModel m(constant_params(t, 0.01, 0.1, 0.5, 0.0, 0.05));
    const FrequencyAssignment f({0.5}, {{0.0, 1.0}});
    EXPECT_DOUBLE_EQ(global_objective(f, m).value, 0.01);
}

TEST(ErrorModel, TwoQubitChainEqualFrequencies) {
    const auto t = build_grid_topology(1, 2);  // params q0 q1 c01, all pairwise local
    const auto p = constant_params(t, 0.01, 0.0, 0.5, 0.03, 0.05);
    const ErrorModel m(p);
    const FrequencyAssignment f({0.4, 0.4, 0.4}, p.intervals);
    // Three pairs, each at zero detuning, counted once in each endpoint.
    EXPECT_NEAR(global_objective(f, m).value, 0.01 + 3 * 2 * 0.03 / 3.0, 1e-15);
    EXPECT_NEAR(global_objective(f, m).value, direct_g(p, f.values()), 1e-15);
}

TEST(ErrorModel, MatchesDirectFormula) {
    const auto base = build_grid_topology(3, 3);
    auto rng = make_rng(4);
    const auto t = add_nonlocal_pairs(base, 3, 0.5, rng);
    const auto p = sample_error_model(t, {}, rng);
    const ErrorModel m(p);
    for (int i = 0; i < 20; ++i) {
        const auto f = random_assignment(p, rng);
        EXPECT_NEAR(m.global_value(f.values()), direct_g(p, f.values()), 1e-14);
        EXPECT_GE(m.global_value(f.values()), m.lower_bound());
    }
}

TEST(ErrorModel, SamplingDeterministicAndRanges) {
    const auto t = build_grid_topology(3, 3);
    auto a = make_rng(77), b = make_rng(77);
    const auto pa = sample_error_model(t, {}, a);
    const auto pb = sample_error_model(t, {}, b);
    EXPECT_EQ(pa.base_error, pb.base_error);
    EXPECT_EQ(pa.strengths, pb.strengths);

    ErrorModelRanges point;
    point.base_error = {0.004, 0.004};
    point.local_strength = {0.02, 0.02};
    auto c = make_rng(1);
    const auto pc = sample_error_model(t, point, c);
    for (double x : pc.base_error) EXPECT_EQ(x, 0.004);
    for (double x : pc.strengths) EXPECT_EQ(x, 0.02);
}

TEST(ErrorModel, NonlocalMaxZeroGivesZeroStrengths) {
    auto rng = make_rng(3);
    const auto t = add_nonlocal_pairs(build_grid_topology(3, 3), 3, 1.0, rng);
    ErrorModelRanges r;
    r.nonlocal_strength = {0.0, 0.0};
    const auto p = sample_error_model(t, r, rng);
    for (std::size_t i = 0; i < p.pairs.size(); ++i) {
        if (p.pairs[i].locality == Locality::nonlocal) {
            EXPECT_EQ(p.strengths[i], 0.0);
        }
    }
}

TEST(ErrorModel, InvalidRangesRejected) {
    const auto t = build_grid_topology(2, 2);
    auto rng = make_rng(1);
    ErrorModelRanges r;
    r.base_error = {0.01, 0.001};
    EXPECT_THROW(sample_error_model(t, r, rng), std::invalid_argument);
    r = {};
    r.collision_width = {0.0, 0.0};
    EXPECT_THROW(sample_error_model(t, r, rng), std::invalid_argument);
}

TEST(ErrorModel, InfeasibleRejected) {
    const auto t = build_grid_topology(1, 2);
    const auto p = constant_params(t, 0.01, 0.1, 0.5, 0.01, 0.05);
    const ErrorModel m(p);
    const FrequencyAssignment f({0.5, 1.5, 0.5}, p.intervals);
    EXPECT_THROW(global_objective(f, m), std::domain_error);
}

TEST(ErrorModel, GradientMatchesFiniteDifferences) {
    auto rng = make_rng(11);
    const auto t = add_nonlocal_pairs(build_grid_topology(3, 3), 3, 0.5, rng);
    const auto p = sample_error_model(t, {}, rng);
    const ErrorModel m(p);
    const double h = 1e-6;
    for (int i = 0; i < 20; ++i) {
        auto f = random_assignment(p, rng);
        const auto g = m.gradient(f.values());
        std::vector<double> x(f.values().begin(), f.values().end());
        for (std::size_t k = 0; k < x.size(); ++k) {
            const double x0 = x[k];
            x[k] = x0 + h;
            const double up = m.global_value(x);
            x[k] = x0 - h;
            const double dn = m.global_value(x);
            x[k] = x0;
            const double fd = (up - dn) / (2 * h);
            EXPECT_NEAR(g[k], fd, 1e-5 * std::max(std::abs(fd), 1e-4));
        }
    }
}

TEST(ErrorModel, ReducedOnWholeChipEqualsGlobal) {
    auto rng = make_rng(8);
    const auto t = build_grid_topology(2, 3);
    const auto p = sample_error_model(t, {}, rng);
    const ErrorModel m(p);
    std::vector<QubitId> all(t.n_qubits());
    std::iota(all.begin(), all.end(), 0);
    const auto fp = footprint_from_qubits(all, t);
    const auto f = random_assignment(p, rng);
    EXPECT_NEAR(reduced_objective(fp, f, m).value, global_objective(f, m).value, 1e-15);
}

TEST(ErrorModel, ReducedIsolatedQubit) {
    const ChipTopology t(2, {});
    const auto p = constant_params(t, 0.01, 0.2, 0.5, 0.0, 0.05);
    const ErrorModel m(p);
    const FrequencyAssignment f({0.3, 0.9}, p.intervals);
    const auto fp = footprint(Block{0, {}}, CrosstalkHypothesis::local(t), t);
    EXPECT_NEAR(reduced_objective(fp, f, m).value, m.error_term(0, f.values()), 1e-15);
    EXPECT_THROW(reduced_objective(Footprint{}, f, m), std::domain_error);
}

TEST(ErrorModel, LocalExactReducedIsAffineInGlobal) {
    auto rng = make_rng(21);
    const auto t = build_grid_topology(3, 3);
    const auto p = sample_error_model(t, {}, rng);
    const ErrorModel m(p);
    const auto hyp = CrosstalkHypothesis::exact(t);
    auto f = random_assignment(p, rng);
    const std::vector<QubitId> order{4, 0, 1, 2, 3, 5, 6, 7, 8};
    const auto part = partition_from_order(order, t);
    for (const auto& b : part) {
        const auto fp = footprint(b, hyp, t);
        const auto bp = b.params(t);
        const auto grid = block_setting_grid(bp, p.intervals, 3);
        double first = 0.0;
        for (std::size_t i = 0; i < grid.size(); ++i) {
            for (std::size_t k = 0; k < bp.size(); ++k) f[bp[k]] = grid[i][k];
            const double diff = global_objective(f, m).value * t.n_params() -
                                reduced_objective(fp, f, m).value * fp.params.size();
            if (i == 0) first = diff;
            EXPECT_NEAR(diff, first, 1e-12);
        }
    }
}

TEST(ErrorModel, EvaluationLedgerCounts) {
    EvalLedger ledger;
    ledger.record({0.5, 1});
    ledger.record({0.25, 1});
    EXPECT_EQ(ledger.count, 2u);
}

TEST(Noise, ZeroRsdIsExact) {
    auto rng = make_rng(1);
    EXPECT_EQ(noisy_eval({0.123, 1}, 0.0, rng).value, 0.123);
    EXPECT_EQ(noisy_eval({0.0, 1}, 0.5, rng).value, 0.0);
    EXPECT_THROW(noisy_eval({0.1, 1}, -0.1, rng), std::invalid_argument);
}

TEST(Noise, RelativeStdMonteCarlo) {
    auto rng = make_rng(2024);
    const int n = 100000;
    double s = 0, s2 = 0;
    for (int i = 0; i < n; ++i) {
        const double v = noisy_eval({1.0, 1}, 0.2, rng).value;
        s += v;
        s2 += v * v;
    }
    const double mean = s / n;
    const double sd = std::sqrt(s2 / n - mean * mean);
    EXPECT_GE(sd, 0.19);
    EXPECT_LE(sd, 0.21);
    EXPECT_NEAR(mean, 1.0, 1e-3 * 5);
}

TEST(Noise, Reproducible) {
    auto a = make_rng(9), b = make_rng(9);
    for (int i = 0; i < 10; ++i) {
        EXPECT_EQ(noisy_eval({0.3, 1}, 0.2, a).value, noisy_eval({0.3, 1}, 0.2, b).value);
    }
}

TEST(OrderPreservation, SingleQubitChip) {
    const auto t = build_grid_topology(1, 1);
    const auto p = constant_params(t, 0.01, 0.3, 0.4, 0.0, 0.05);
    const ErrorModel m(p);
    const FrequencyAssignment f({0.1}, p.intervals);
    const Block b{0, {}};
    const auto fp = footprint(b, CrosstalkHypothesis::exact(t), t);
    const auto grid = block_setting_grid(b.params(t), p.intervals, 5);
    EXPECT_TRUE(check_order_preservation(b, fp, f, m, t, grid));
}
