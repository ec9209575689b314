#pragma once

#include "logshrink/core.hpp"
#include "logshrink/lowrank.hpp"
#include "logshrink/thresholding.hpp"

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace logshrink::experiments {

enum class Algorithm { IST, IHT, ILT };

std::string_view to_string(Algorithm a);
std::optional<Algorithm> parse_algorithm(std::string_view name);
ThresholdKind kind_of(Algorithm a);
/// Label used for the spectral variant in completion output: soft-SVT etc.
std::string completion_label(ThresholdKind kind);

inline const std::vector<Algorithm> kAllAlgorithms = {Algorithm::IST, Algorithm::IHT,
                                                      Algorithm::ILT};

struct EnsembleSpec {
    std::size_t M = 100;
    std::size_t N = 200;
    std::vector<std::size_t> K_grid = {10, 20, 30, 40, 50, 60};
    std::size_t trials = 100;
    double noise_sigma = 0.0;
    int max_iters = 250;
    std::uint64_t master_seed = 12345;
    std::vector<Algorithm> algorithms = kAllAlgorithms;
    double delta = kDefaultDelta;
    double rel_tol = 1e-3;  // exact-recovery tolerance

    void validate() const;
};

struct CompletionBenchSpec {
    std::size_t N = 100;
    std::size_t rank = 2;
    double obs_frac = 0.3;
    std::size_t trials = 20;
    int max_iters = 250;
    std::uint64_t master_seed = 12345;
    double delta = kDefaultDelta;

    void validate() const;
};

enum class ValueKind { AvgError, RecoveryProb, AvgResidualSq, AvgFrobError };
std::string_view to_string(ValueKind k);

struct MetricsRow {
    std::string experiment;  // phase | path | completion
    std::string algorithm;
    double sweep_coord = 0.0;
    std::size_t trials = 0;
    ValueKind value_kind = ValueKind::AvgError;
    double value = 0.0;
};

/// Trial parallelism. threads = 0 picks the hardware concurrency. Results do
/// not depend on this setting.
struct ExecutionPolicy {
    unsigned threads = 1;
};

/// Seed of trial `trial` at sweep coordinate `coord`; a pure function of the
/// three inputs.
std::uint64_t derive_seed(std::uint64_t master, std::uint64_t coord, std::uint64_t trial);

/// Gaussian A (rescaled to spectral norm rho), K-sparse Gaussian x* on a
/// uniformly random support, y = A x* + sigma * g with the noise added after
/// rescaling.
MeasurementProblem gen_sparse_problem(std::size_t M, std::size_t N, std::size_t K,
                                      double noise_sigma, std::uint64_t seed,
                                      double rho = kDefaultRho);

/// X* = G1 G2^T with Gaussian N x rank factors; ceil(obs_frac * N^2) entries
/// observed, chosen uniformly without replacement.
CompletionProblem gen_completion_problem(std::size_t N, std::size_t rank, double obs_frac,
                                         std::uint64_t seed);

/// Same support and ||x_hat - x_star|| <= rel_tol ||x_star||.
bool exact_recovery(const Vector& x_hat, const Vector& x_star, double rel_tol = 1e-3);

std::vector<MetricsRow> run_noiseless_sweep(const EnsembleSpec& spec,
                                            const ExecutionPolicy& policy = {});

std::vector<MetricsRow> run_noisy_path(const EnsembleSpec& spec, std::size_t K_true,
                                       const std::vector<std::size_t>& k_grid,
                                       const ExecutionPolicy& policy = {});

/// Mean Frobenius error of X^0 .. X^{max_iters-1}, per spectral rule.
std::vector<MetricsRow> run_completion_bench(const CompletionBenchSpec& spec,
                                             const ExecutionPolicy& policy = {});

/// Runs body(i) for i in [0, count) on up to `threads` workers. Exceptions
/// are rethrown for the smallest failing index.
void parallel_for(std::size_t count, unsigned threads,
                  const std::function<void(std::size_t)>& body);

}  // namespace logshrink::experiments
