#include "logshrink/experiments.hpp"

#include <gtest/gtest.h>

#include <atomic>
#include <cmath>
#include <set>
#include <stdexcept>

using namespace logshrink;
using namespace logshrink::experiments;

namespace {

void expect_same_rows(const std::vector<MetricsRow>& a, const std::vector<MetricsRow>& b) {
    ASSERT_EQ(a.size(), b.size());
    for (std::size_t i = 0; i < a.size(); ++i) {
        EXPECT_EQ(a[i].experiment, b[i].experiment);
        EXPECT_EQ(a[i].algorithm, b[i].algorithm);
        EXPECT_EQ(a[i].sweep_coord, b[i].sweep_coord);
        EXPECT_EQ(a[i].trials, b[i].trials);
        EXPECT_EQ(a[i].value_kind, b[i].value_kind);
        // Bitwise equality, not tolerance.
        EXPECT_EQ(a[i].value, b[i].value) << i;
    }
}

EnsembleSpec small_spec() {
    EnsembleSpec s;
    s.M = 30;
    s.N = 60;
    s.K_grid = {2, 5};
    s.trials = 6;
    s.max_iters = 60;
    return s;
}

}  // namespace

TEST(Names, RoundTrip) {
    for (auto a : kAllAlgorithms) {
        EXPECT_EQ(parse_algorithm(to_string(a)), a);
    }
    EXPECT_FALSE(parse_algorithm("OMP").has_value());
    EXPECT_EQ(kind_of(Algorithm::ILT), ThresholdKind::Log);
    EXPECT_EQ(completion_label(ThresholdKind::Log), "log-SVT");
    EXPECT_EQ(to_string(ValueKind::RecoveryProb), "recovery_prob");
}

TEST(GenSparse, DeterministicAndWellFormed) {
    const auto a = gen_sparse_problem(40, 80, 6, 0.01, 123);
    const auto b = gen_sparse_problem(40, 80, 6, 0.01, 123);
    EXPECT_EQ(a.A, b.A);
    EXPECT_EQ(a.y, b.y);
    EXPECT_EQ(*a.x_true, *b.x_true);
    EXPECT_EQ((a.x_true->array() != 0.0).count(), 6);
    EXPECT_LE(*a.spectral_norm, kDefaultRho * (1.0 + 1e-8));
    const auto c = gen_sparse_problem(40, 80, 6, 0.01, 124);
    EXPECT_NE(a.A, c.A);
}

TEST(GenSparse, NoiseAddedAfterRescale) {
    const auto clean = gen_sparse_problem(40, 80, 6, 0.0, 77);
    const auto noisy = gen_sparse_problem(40, 80, 6, 0.5, 77);
    EXPECT_EQ(clean.A, noisy.A);
    EXPECT_LT((clean.y - clean.A * *clean.x_true).norm(), 1e-12);
    const double noise_rms = (noisy.y - noisy.A * *noisy.x_true).norm() / std::sqrt(40.0);
    EXPECT_GT(noise_rms, 0.3);
    EXPECT_LT(noise_rms, 0.7);
}

TEST(GenSparse, ZeroSparsityIsNoiseOnly) {
    const auto p = gen_sparse_problem(20, 30, 0, 0.1, 5);
    EXPECT_EQ(*p.x_true, Vector::Zero(30));
    EXPECT_GT(p.y.norm(), 0.0);
    EXPECT_EQ(gen_sparse_problem(20, 30, 0, 0.0, 5).y, Vector::Zero(20));
}

TEST(GenCompletion, ObservationCountAndDeterminism) {
    const auto p = gen_completion_problem(50, 2, 0.3, 9);
    EXPECT_EQ(p.observed.size(), 750u);
    std::set<std::pair<std::size_t, std::size_t>> seen;
    for (const auto& e : p.observed) {
        seen.insert({e.row, e.col});
        EXPECT_EQ(e.value, (*p.x_true)(static_cast<Eigen::Index>(e.row),
                                       static_cast<Eigen::Index>(e.col)));
    }
    EXPECT_EQ(seen.size(), p.observed.size());
    EXPECT_EQ(gen_completion_problem(50, 2, 0.3, 9).observed.size(), 750u);
    EXPECT_EQ(gen_completion_problem(10, 1, 0.33, 1).observed.size(), 33u);
    const auto q = gen_completion_problem(50, 2, 0.3, 9);
    EXPECT_EQ(*q.x_true, *p.x_true);
}

TEST(ExactRecovery, SupportAndTolerance) {
    Vector x(4);
    x << 1.0, 0.0, -2.0, 0.0;
    Vector near = x;
    near[0] += 1e-4;
    EXPECT_TRUE(exact_recovery(near, x));
    Vector extra = x;
    extra[1] = 1e-12;
    EXPECT_FALSE(exact_recovery(extra, x));
    Vector far = x;
    far[2] = -1.9;
    EXPECT_FALSE(exact_recovery(far, x));
    EXPECT_TRUE(exact_recovery(Vector::Zero(3), Vector::Zero(3)));
}

TEST(DeriveSeed, PureAndSensitive) {
    EXPECT_EQ(derive_seed(1, 2, 3), derive_seed(1, 2, 3));
    EXPECT_NE(derive_seed(1, 2, 3), derive_seed(1, 3, 2));
    EXPECT_NE(derive_seed(1, 2, 3), derive_seed(2, 2, 3));
}

TEST(ParallelFor, CoversAllIndicesAndRethrowsSmallest) {
    std::vector<std::atomic<int>> hits(100);
    parallel_for(100, 4, [&](std::size_t i) { hits[i]++; });
    for (auto& h : hits) EXPECT_EQ(h.load(), 1);
    try {
        parallel_for(50, 3, [](std::size_t i) {
            if (i == 7 || i == 31) throw std::runtime_error(std::to_string(i));
        });
        FAIL() << "expected an exception";
    } catch (const std::runtime_error& e) {
        EXPECT_STREQ(e.what(), "7");
    }
}

TEST(Specs, Validation) {
    EnsembleSpec s = small_spec();
    EXPECT_NO_THROW(s.validate());
    s.K_grid = {60};
    EXPECT_THROW(s.validate(), InvalidParameter);
    s = small_spec();
    s.trials = 0;
    EXPECT_THROW(s.validate(), InvalidParameter);
    s = small_spec();
    s.algorithms.clear();
    EXPECT_THROW(s.validate(), InvalidParameter);

    CompletionBenchSpec c;
    c.obs_frac = 1.2;
    EXPECT_THROW(c.validate(), InvalidParameter);
    c = {};
    c.rank = 0;
    EXPECT_THROW(c.validate(), InvalidParameter);
}

TEST(NoiselessSweep, SchemaAndThreadInvariance) {
    const auto spec = small_spec();
    const auto rows = run_noiseless_sweep(spec, {1});
    ASSERT_EQ(rows.size(), 2u * 3u * 2u);
    EXPECT_EQ(rows[0].experiment, "phase");
    EXPECT_EQ(rows[0].algorithm, "IST");
    EXPECT_EQ(rows[0].sweep_coord, 2.0);
    EXPECT_EQ(rows[0].value_kind, ValueKind::AvgError);
    EXPECT_EQ(rows[1].value_kind, ValueKind::RecoveryProb);
    expect_same_rows(rows, run_noiseless_sweep(spec, {3}));
    expect_same_rows(rows, run_noiseless_sweep(spec, {0}));
}

TEST(NoiselessSweep, PerfectRecoveryImpliesSmallError) {
    auto spec = small_spec();
    spec.max_iters = 250;
    const auto rows = run_noiseless_sweep(spec, {1});
    for (std::size_t i = 0; i + 1 < rows.size(); i += 2) {
        if (rows[i + 1].value == 1.0) {
            // Mean ||x*|| for K-sparse Gaussian x* is below sqrt(K) + 1.
            EXPECT_LE(rows[i].value, spec.rel_tol * (std::sqrt(rows[i].sweep_coord) + 1.0));
        }
    }
}

TEST(NoisyPath, SchemaAndErrors) {
    auto spec = small_spec();
    spec.noise_sigma = 0.01;
    const auto rows = run_noisy_path(spec, 3, {1, 2, 3, 4}, {2});
    ASSERT_EQ(rows.size(), 12u);
    EXPECT_EQ(rows[0].experiment, "path");
    for (const auto& r : rows) EXPECT_EQ(r.value_kind, ValueKind::AvgResidualSq);
    expect_same_rows(rows, run_noisy_path(spec, 3, {1, 2, 3, 4}, {1}));
    spec.noise_sigma = 0.0;
    EXPECT_THROW(run_noisy_path(spec, 3, {1, 2}), InvalidParameter);
}

TEST(CompletionBench, SchemaAndThreadInvariance) {
    CompletionBenchSpec spec;
    spec.N = 15;
    spec.trials = 3;
    spec.max_iters = 12;
    const auto rows = run_completion_bench(spec, {1});
    ASSERT_EQ(rows.size(), 36u);
    EXPECT_EQ(rows[0].algorithm, "soft-SVT");
    EXPECT_EQ(rows[0].sweep_coord, 0.0);
    EXPECT_EQ(rows[11].sweep_coord, 11.0);
    EXPECT_EQ(rows[12].algorithm, "hard-SVT");
    EXPECT_EQ(rows[24].algorithm, "log-SVT");
    // Iteration 0 is the zero-filled data, identical for every rule.
    EXPECT_EQ(rows[0].value, rows[12].value);
    EXPECT_EQ(rows[0].value, rows[24].value);
    expect_same_rows(rows, run_completion_bench(spec, {3}));
}
