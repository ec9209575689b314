#pragma once

#include "logshrink/core.hpp"
#include "logshrink/thresholding.hpp"

#include <cstddef>
#include <cstdint>
#include <optional>
#include <vector>

namespace logshrink {

struct ObservedEntry {
    std::size_t row = 0;
    std::size_t col = 0;
    double value = 0.0;
};

/// Low-rank matrix completion instance: recover X from the entries in omega.
struct CompletionProblem {
    std::size_t n_rows = 0;
    std::size_t n_cols = 0;
    std::vector<ObservedEntry> observed;
    std::size_t rank_target = 1;
    std::optional<Matrix> x_true;
    std::uint64_t seed = 0;

    /// Bounds, duplicate entries, rank_target >= 1, finiteness.
    void validate() const;
    /// Observed values in place, zeros elsewhere.
    Matrix observed_matrix() const;
};

inline constexpr double kRankTolerance = 1e-9;

/// Number of singular values above kRankTolerance * sigma_max.
std::size_t numerical_rank(const Vector& singular_values);

double nuclear_norm(const Matrix& X);

struct SpectralThreshold {
    Matrix X;
    Vector spectrum;  // thresholded singular values, in decreasing input order
};

/// U diag(rule(sigma)) V^T for X = U diag(sigma) V^T.
Matrix sv_threshold(const Matrix& X, const ThresholdRule& rule);
SpectralThreshold sv_threshold_with_spectrum(const Matrix& X, const ThresholdRule& rule);

/// Keeps the K leading singular values, shrinking them by the chosen rule.
Matrix sv_threshold_topk(const Matrix& X, std::size_t K, ThresholdKind kind,
                         double delta = kDefaultDelta);
SpectralThreshold sv_threshold_topk_with_spectrum(const Matrix& X, std::size_t K,
                                                  ThresholdKind kind, double delta = kDefaultDelta);

/// X + P_omega(Y - X): observed entries take their data values.
Matrix completion_step(const Matrix& X, const CompletionProblem& problem);

struct CompletionRecord {
    std::optional<double> frob_error;  // ||X - X*||_F when the truth is known
    double observed_residual = 0.0;    // ||P_omega(X - Y)||_F
    std::size_t rank = 0;
};

struct CompletionTrace {
    std::optional<double> initial_frob_error;  // for X^0
    std::vector<CompletionRecord> records;     // one per iteration
};

struct CompletionResult {
    Matrix X;
    CompletionTrace trace;
    int iterations_run = 0;
    bool converged = false;
};

/// Alternates completion_step with top-K singular value thresholding,
/// starting from X^0 = P_omega(Y). Stops after config.max_iters iterations or
/// once the observed residual drops to config.step_tol.
CompletionResult complete(const CompletionProblem& problem, ThresholdKind kind,
                          const SolverConfig& config = {}, double delta = kDefaultDelta);

}  // namespace logshrink
