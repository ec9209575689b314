#include "logshrink/experiments.hpp"
#include "logshrink/lowrank.hpp"

#include "support/generators.hpp"
#include "support/oracles.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <functional>

using namespace logshrink;

namespace {

Matrix diag(std::initializer_list<double> d) {
    Vector v(static_cast<Eigen::Index>(d.size()));
    std::copy(d.begin(), d.end(), v.data());
    return v.asDiagonal();
}

CompletionProblem full_observation(const Matrix& Y, std::size_t rank) {
    CompletionProblem p;
    p.n_rows = static_cast<std::size_t>(Y.rows());
    p.n_cols = static_cast<std::size_t>(Y.cols());
    p.rank_target = rank;
    for (Eigen::Index i = 0; i < Y.rows(); ++i) {
        for (Eigen::Index j = 0; j < Y.cols(); ++j) {
            p.observed.push_back({static_cast<std::size_t>(i), static_cast<std::size_t>(j), Y(i, j)});
        }
    }
    p.x_true = Y;
    return p;
}

Vector sorted_desc(Vector v) {
    std::sort(v.data(), v.data() + v.size(), std::greater<>());
    return v;
}

}  // namespace

TEST(NuclearNorm, Examples) {
    EXPECT_NEAR(nuclear_norm(diag({3.0, 1.0})), 4.0, 1e-12);
    EXPECT_EQ(nuclear_norm(Matrix::Zero(3, 3)), 0.0);
    gen::Source src(51);
    const Matrix X = src.gaussian(6, 4);
    const double expected = oracle::singular_values(X).sum();
    EXPECT_NEAR(nuclear_norm(X), expected, 1e-8 * expected);
}

TEST(NumericalRank, Tolerance) {
    Vector s(3);
    s << 2.0, 1e-10, 0.0;
    EXPECT_EQ(numerical_rank(s), 1u);
    s << 2.0, 1e-8, 0.0;
    EXPECT_EQ(numerical_rank(s), 2u);
    EXPECT_EQ(numerical_rank(Vector::Zero(2)), 0u);
}

TEST(SvThreshold, DiagonalExamples) {
    EXPECT_LT((sv_threshold(diag({3.0, 1.0}), ThresholdRule::soft(1.0)) - diag({2.0, 0.0})).norm(),
              1e-12);
    EXPECT_LT((sv_threshold(diag({3.0, 1.0}), ThresholdRule::hard(2.0)) - diag({3.0, 0.0})).norm(),
              1e-12);
    const Matrix L = sv_threshold(diag({3.0, 1.0}), ThresholdRule::log(0.5, 0.01));
    const double a = oracle::basin_minimizer(3.0, 0.5, 0.01);
    const double b = oracle::basin_minimizer(1.0, 0.5, 0.01);
    EXPECT_NEAR(a, 2.9145158, 1e-7);
    EXPECT_NEAR(b, 0.565887, 1e-6);
    EXPECT_LT((L - diag({a, b})).norm(), 1e-8);
}

TEST(SvThresholdTopK, Examples) {
    gen::Source src(52);
    const Matrix R = src.gaussian(8, 2) * src.gaussian(6, 2).transpose();
    EXPECT_LT((sv_threshold_topk(R, 2, ThresholdKind::Hard) - R).norm(), 1e-10);
    EXPECT_LT((sv_threshold_topk(diag({3.0, 2.0, 1.0}), 2, ThresholdKind::Soft) -
               diag({2.0, 1.0, 0.0}))
                  .norm(),
              1e-12);
    const Matrix X = src.gaussian(5, 7);
    EXPECT_LT((sv_threshold_topk(X, 5, ThresholdKind::Hard) - X).norm(), 1e-10);
    EXPECT_LT((sv_threshold_topk(X, 9, ThresholdKind::Hard) - X).norm(), 1e-10);
    EXPECT_THROW(sv_threshold_topk(X, 0, ThresholdKind::Hard), InvalidParameter);
}

TEST(CompletionStep, Examples) {
    gen::Source src(53);
    const Matrix Y = src.gaussian(3, 4);
    const auto full = full_observation(Y, 1);
    EXPECT_EQ(completion_step(src.gaussian(3, 4), full), Y);

    CompletionProblem empty;
    empty.n_rows = 3;
    empty.n_cols = 4;
    const Matrix X = src.gaussian(3, 4);
    EXPECT_EQ(completion_step(X, empty), X);

    CompletionProblem one;
    one.n_rows = one.n_cols = 2;
    one.observed = {{0, 0, 5.0}};
    Matrix expected = Matrix::Zero(2, 2);
    expected(0, 0) = 5.0;
    EXPECT_EQ(completion_step(Matrix::Zero(2, 2), one), expected);
    EXPECT_THROW(completion_step(Matrix::Zero(3, 3), one), DimensionError);
}

TEST(CompletionProblem, Validate) {
    CompletionProblem p;
    p.n_rows = p.n_cols = 2;
    p.observed = {{0, 0, 1.0}, {0, 0, 2.0}};
    EXPECT_THROW(p.validate(), InvalidParameter);
    p.observed = {{2, 0, 1.0}};
    EXPECT_THROW(p.validate(), DimensionError);
    p.observed = {{1, 0, 1.0}};
    p.rank_target = 0;
    EXPECT_THROW(p.validate(), InvalidParameter);
}

TEST(Complete, FullyObservedHardIsExactAfterOneStep) {
    gen::Source src(54);
    const Matrix Y = src.gaussian(10, 2) * src.gaussian(10, 2).transpose();
    SolverConfig cfg;
    cfg.max_iters = 5;
    const auto res = complete(full_observation(Y, 2), ThresholdKind::Hard, cfg);
    ASSERT_FALSE(res.trace.records.empty());
    EXPECT_LT(*res.trace.records.front().frob_error, 1e-10 * Y.norm());
}

TEST(Complete, SmallHardInstancesConverge) {
    int good = 0;
    const int seeds = 6;
    for (int s = 0; s < seeds; ++s) {
        const auto p = experiments::gen_completion_problem(20, 2, 0.6, 1000 + s);
        const auto res = complete(p, ThresholdKind::Hard, SolverConfig{});
        good += (*res.trace.records.back().frob_error < 1e-3) ? 1 : 0;
    }
    EXPECT_GT(good, seeds / 2);
}

// Property tests.

TEST(LowRankProperty, SpectrumCorrectness) {
    gen::Source src(55);
    for (int t = 0; t < 30; ++t) {
        const Matrix X = 2.0 * src.gaussian(7, 5);
        for (const auto& rule : {ThresholdRule::soft(0.8), ThresholdRule::hard(1.5),
                                 ThresholdRule::log(0.6, 0.02)}) {
            const Vector got = oracle::singular_values(sv_threshold(X, rule));
            Vector expected = oracle::singular_values(X);
            for (Eigen::Index i = 0; i < expected.size(); ++i) expected[i] = rule(expected[i]);
            EXPECT_LT((sorted_desc(got) - sorted_desc(expected)).cwiseAbs().maxCoeff(), 1e-8);
        }
    }
}

TEST(LowRankProperty, OrthogonalInvariance) {
    gen::Source src(56);
    for (int t = 0; t < 20; ++t) {
        const Matrix X = 2.0 * src.gaussian(6, 4);
        const Matrix P = src.orthogonal(6), Q = src.orthogonal(4);
        const auto rule = ThresholdRule::log(0.5, 0.01);
        const Vector a = oracle::singular_values(sv_threshold(X, rule));
        const Vector b = oracle::singular_values(sv_threshold(P * X * Q.transpose(), rule));
        EXPECT_LT((a - b).cwiseAbs().maxCoeff(), 1e-8);
    }
}

TEST(LowRankProperty, TopKRankBound) {
    gen::Source src(57);
    for (int t = 0; t < 30; ++t) {
        const Matrix X = src.gaussian(8, 6);
        const std::size_t K = 1 + src.index(6);
        for (auto kind : {ThresholdKind::Soft, ThresholdKind::Hard, ThresholdKind::Log}) {
            const auto out = sv_threshold_topk_with_spectrum(X, K, kind);
            EXPECT_LE(numerical_rank(oracle::singular_values(out.X)), K);
        }
    }
}

TEST(LowRankProperty, CompletionStepIdempotent) {
    const auto p = experiments::gen_completion_problem(12, 2, 0.4, 58);
    gen::Source src(58);
    const Matrix X = src.gaussian(12, 12);
    const Matrix once = completion_step(X, p);
    EXPECT_EQ(completion_step(once, p), once);
}

TEST(LowRankProperty, SoftNeverIncreasesNuclearNorm) {
    gen::Source src(59);
    for (int t = 0; t < 50; ++t) {
        const Matrix X = src.gaussian(5, 9);
        const double lambda = src.uniform(0.0, 3.0);
        EXPECT_LE(nuclear_norm(sv_threshold(X, ThresholdRule::soft(lambda))),
                  nuclear_norm(X) + 1e-10);
    }
}
