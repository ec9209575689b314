#include "logshrink/experiments.hpp"

#include "logshrink/sparse_solver.hpp"

#include <boost/random/normal_distribution.hpp>
#include <boost/random/uniform_int_distribution.hpp>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <numeric>
#include <random>
#include <thread>

namespace logshrink::experiments {

namespace {

// boost's distributions, unlike the std ones, produce the same stream on
// every standard library, which keeps the CSV output portable.
using Engine = std::mt19937_64;
using Normal = boost::random::normal_distribution<double>;

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

// First `count` entries of a uniformly random permutation of [0, n).
std::vector<std::size_t> sample_without_replacement(std::size_t n, std::size_t count,
                                                    Engine& engine) {
    std::vector<std::size_t> pool(n);
    std::iota(pool.begin(), pool.end(), std::size_t{0});
    for (std::size_t i = 0; i < count; ++i) {
        boost::random::uniform_int_distribution<std::size_t> pick(i, n - 1);
        std::swap(pool[i], pool[pick(engine)]);
    }
    pool.resize(count);
    return pool;
}

unsigned resolve_threads(unsigned requested) {
    if (requested == 0) {
        return std::max(1u, std::thread::hardware_concurrency());
    }
    return requested;
}

SolverConfig sweep_config(int max_iters) {
    SolverConfig config;
    config.max_iters = max_iters;
    config.record_trace = false;
    return config;
}

void check_algorithms(const std::vector<Algorithm>& algorithms) {
    if (algorithms.empty()) {
        throw InvalidParameter("at least one algorithm is required");
    }
}

}  // namespace

std::string_view to_string(Algorithm a) {
    switch (a) {
        case Algorithm::IST: return "IST";
        case Algorithm::IHT: return "IHT";
        case Algorithm::ILT: return "ILT";
    }
    return "unknown";
}

std::optional<Algorithm> parse_algorithm(std::string_view name) {
    if (name == "IST" || name == "ist") return Algorithm::IST;
    if (name == "IHT" || name == "iht") return Algorithm::IHT;
    if (name == "ILT" || name == "ilt") return Algorithm::ILT;
    return std::nullopt;
}

ThresholdKind kind_of(Algorithm a) {
    switch (a) {
        case Algorithm::IST: return ThresholdKind::Soft;
        case Algorithm::IHT: return ThresholdKind::Hard;
        case Algorithm::ILT: return ThresholdKind::Log;
    }
    return ThresholdKind::Log;
}

std::string completion_label(ThresholdKind kind) {
    return std::string(logshrink::to_string(kind)) + "-SVT";
}

std::string_view to_string(ValueKind k) {
    switch (k) {
        case ValueKind::AvgError: return "avg_error";
        case ValueKind::RecoveryProb: return "recovery_prob";
        case ValueKind::AvgResidualSq: return "avg_residual_sq";
        case ValueKind::AvgFrobError: return "avg_frob_error";
    }
    return "unknown";
}

void EnsembleSpec::validate() const {
    if (M < 1 || N < 1) {
        throw InvalidParameter("M and N must be positive");
    }
    if (trials < 1) {
        throw InvalidParameter("trials must be at least 1");
    }
    if (max_iters < 1) {
        throw InvalidParameter("max_iters must be at least 1");
    }
    if (!(noise_sigma >= 0.0)) {
        throw InvalidParameter("noise_sigma must be nonnegative");
    }
    if (!(delta > 0.0)) {
        throw InvalidParameter("delta must be positive");
    }
    if (!(rel_tol >= 0.0)) {
        throw InvalidParameter("rel_tol must be nonnegative");
    }
    for (std::size_t K : K_grid) {
        if (K >= N) {
            throw InvalidParameter("sparsity level " + std::to_string(K) + " must be below N = " +
                                   std::to_string(N));
        }
    }
    check_algorithms(algorithms);
}

void CompletionBenchSpec::validate() const {
    if (N < 1) {
        throw InvalidParameter("N must be positive");
    }
    if (rank < 1 || rank > N) {
        throw InvalidParameter("rank must lie in [1, N]");
    }
    if (!(obs_frac > 0.0 && obs_frac <= 1.0)) {
        throw InvalidParameter("obs_frac must lie in (0, 1]");
    }
    if (trials < 1) {
        throw InvalidParameter("trials must be at least 1");
    }
    if (max_iters < 1) {
        throw InvalidParameter("max_iters must be at least 1");
    }
    if (!(delta > 0.0)) {
        throw InvalidParameter("delta must be positive");
    }
}

std::uint64_t derive_seed(std::uint64_t master, std::uint64_t coord, std::uint64_t trial) {
    return splitmix64(splitmix64(splitmix64(master) ^ coord) ^ trial);
}

MeasurementProblem gen_sparse_problem(std::size_t M, std::size_t N, std::size_t K,
                                      double noise_sigma, std::uint64_t seed, double rho) {
    if (K > N) {
        throw InvalidParameter("K must not exceed N");
    }
    if (!(noise_sigma >= 0.0)) {
        throw InvalidParameter("noise_sigma must be nonnegative");
    }
    Engine engine(seed);
    Normal normal;

    Matrix A(static_cast<Eigen::Index>(M), static_cast<Eigen::Index>(N));
    for (Eigen::Index i = 0; i < A.rows(); ++i) {
        for (Eigen::Index j = 0; j < A.cols(); ++j) {
            A(i, j) = normal(engine);
        }
    }
    Vector x = Vector::Zero(static_cast<Eigen::Index>(N));
    for (std::size_t idx : sample_without_replacement(N, K, engine)) {
        x[static_cast<Eigen::Index>(idx)] = normal(engine);
    }

    Rescaled scaled = rescale_to_contraction(A, A * x, rho);
    // Noise is drawn even when sigma = 0 so the stream stays aligned.
    for (Eigen::Index i = 0; i < scaled.y.size(); ++i) {
        scaled.y[i] += noise_sigma * normal(engine);
    }

    MeasurementProblem p;
    p.A = std::move(scaled.A);
    p.y = std::move(scaled.y);
    p.x_true = std::move(x);
    p.noise_sigma = noise_sigma;
    p.seed = seed;
    p.scale_applied = scaled.scale;
    p.spectral_norm = scaled.spectral_norm;
    return p;
}

CompletionProblem gen_completion_problem(std::size_t N, std::size_t rank, double obs_frac,
                                         std::uint64_t seed) {
    if (!(obs_frac > 0.0 && obs_frac <= 1.0)) {
        throw InvalidParameter("obs_frac must lie in (0, 1]");
    }
    if (rank < 1 || rank > N) {
        throw InvalidParameter("rank must lie in [1, N]");
    }
    Engine engine(seed);
    Normal normal;
    const auto n = static_cast<Eigen::Index>(N);
    const auto r = static_cast<Eigen::Index>(rank);
    Matrix G1(n, r);
    Matrix G2(n, r);
    for (Matrix* G : {&G1, &G2}) {
        for (Eigen::Index i = 0; i < n; ++i) {
            for (Eigen::Index j = 0; j < r; ++j) {
                (*G)(i, j) = normal(engine);
            }
        }
    }

    CompletionProblem p;
    p.n_rows = N;
    p.n_cols = N;
    p.rank_target = rank;
    p.seed = seed;
    p.x_true = G1 * G2.transpose();

    const std::size_t total = N * N;
    // The relative nudge keeps e.g. 0.3 * 2500 from rounding up to 751.
    const double target = obs_frac * static_cast<double>(total);
    const auto count = std::min<std::size_t>(
        total, static_cast<std::size_t>(std::ceil(target * (1.0 - 1e-12))));
    std::vector<std::size_t> picks = sample_without_replacement(total, count, engine);
    std::sort(picks.begin(), picks.end());
    p.observed.reserve(count);
    for (std::size_t idx : picks) {
        const std::size_t row = idx / N;
        const std::size_t col = idx % N;
        p.observed.push_back(
            {row, col, (*p.x_true)(static_cast<Eigen::Index>(row), static_cast<Eigen::Index>(col))});
    }
    return p;
}

bool exact_recovery(const Vector& x_hat, const Vector& x_star, double rel_tol) {
    if (x_hat.size() != x_star.size()) {
        throw DimensionError("exact_recovery: vectors differ in length");
    }
    for (Eigen::Index i = 0; i < x_hat.size(); ++i) {
        if ((x_hat[i] != 0.0) != (x_star[i] != 0.0)) {
            return false;
        }
    }
    return (x_hat - x_star).norm() <= rel_tol * x_star.norm();
}

void parallel_for(std::size_t count, unsigned threads,
                  const std::function<void(std::size_t)>& body) {
    const unsigned workers =
        static_cast<unsigned>(std::min<std::size_t>(resolve_threads(threads), count));
    if (workers <= 1) {
        for (std::size_t i = 0; i < count; ++i) {
            body(i);
        }
        return;
    }
    std::atomic<std::size_t> next{0};
    std::vector<std::exception_ptr> errors(count);
    auto work = [&] {
        for (std::size_t i = next.fetch_add(1); i < count; i = next.fetch_add(1)) {
            try {
                body(i);
            } catch (...) {
                errors[i] = std::current_exception();
            }
        }
    };
    std::vector<std::jthread> pool;
    pool.reserve(workers);
    for (unsigned w = 0; w < workers; ++w) {
        pool.emplace_back(work);
    }
    pool.clear();  // joins
    for (const auto& e : errors) {
        if (e) {
            std::rethrow_exception(e);
        }
    }
}

std::vector<MetricsRow> run_noiseless_sweep(const EnsembleSpec& spec,
                                            const ExecutionPolicy& policy) {
    spec.validate();
    if (spec.noise_sigma != 0.0) {
        throw InvalidParameter("the noiseless sweep requires noise_sigma = 0");
    }
    const std::size_t n_k = spec.K_grid.size();
    const std::size_t n_alg = spec.algorithms.size();
    struct Outcome {
        double error = 0.0;
        bool recovered = false;
    };
    // outcomes[(k * trials + t) * n_alg + a]
    std::vector<Outcome> outcomes(n_k * spec.trials * n_alg);
    const SolverConfig config = sweep_config(spec.max_iters);

    parallel_for(n_k * spec.trials, policy.threads, [&](std::size_t task) {
        const std::size_t ki = task / spec.trials;
        const std::size_t t = task % spec.trials;
        const std::size_t K = spec.K_grid[ki];
        const MeasurementProblem problem =
            gen_sparse_problem(spec.M, spec.N, K, 0.0, derive_seed(spec.master_seed, K, t));
        for (std::size_t a = 0; a < n_alg; ++a) {
            const SolveResult r = solve(problem, kind_of(spec.algorithms[a]),
                                        LambdaSchedule::top_k(K, spec.delta), config);
            Outcome& o = outcomes[task * n_alg + a];
            o.error = (r.x_hat - *problem.x_true).norm();
            o.recovered = exact_recovery(r.x_hat, *problem.x_true, spec.rel_tol);
        }
    });

    std::vector<MetricsRow> rows;
    rows.reserve(n_k * n_alg * 2);
    const auto trials = static_cast<double>(spec.trials);
    for (std::size_t ki = 0; ki < n_k; ++ki) {
        for (std::size_t a = 0; a < n_alg; ++a) {
            double err_sum = 0.0;
            std::size_t hits = 0;
            for (std::size_t t = 0; t < spec.trials; ++t) {
                const Outcome& o = outcomes[(ki * spec.trials + t) * n_alg + a];
                err_sum += o.error;
                hits += o.recovered ? 1 : 0;
            }
            const std::string alg(to_string(spec.algorithms[a]));
            const auto K = static_cast<double>(spec.K_grid[ki]);
            rows.push_back({"phase", alg, K, spec.trials, ValueKind::AvgError, err_sum / trials});
            rows.push_back({"phase", alg, K, spec.trials, ValueKind::RecoveryProb,
                            static_cast<double>(hits) / trials});
        }
    }
    return rows;
}

std::vector<MetricsRow> run_noisy_path(const EnsembleSpec& spec, std::size_t K_true,
                                       const std::vector<std::size_t>& k_grid,
                                       const ExecutionPolicy& policy) {
    spec.validate();
    if (!(spec.noise_sigma > 0.0)) {
        throw InvalidParameter("the noisy path requires noise_sigma > 0");
    }
    if (K_true > spec.N) {
        throw InvalidParameter("K_true must not exceed N");
    }
    for (std::size_t k : k_grid) {
        if (k > spec.N) {
            throw InvalidParameter("sparsity level " + std::to_string(k) + " exceeds N");
        }
    }
    const std::size_t n_k = k_grid.size();
    const std::size_t n_alg = spec.algorithms.size();
    // residual[(t * n_k + ki) * n_alg + a]
    std::vector<double> residual(spec.trials * n_k * n_alg, 0.0);
    const SolverConfig config = sweep_config(spec.max_iters);

    parallel_for(spec.trials, policy.threads, [&](std::size_t t) {
        const MeasurementProblem problem = gen_sparse_problem(
            spec.M, spec.N, K_true, spec.noise_sigma, derive_seed(spec.master_seed, K_true, t));
        for (std::size_t ki = 0; ki < n_k; ++ki) {
            for (std::size_t a = 0; a < n_alg; ++a) {
                const SolveResult r = solve(problem, kind_of(spec.algorithms[a]),
                                            LambdaSchedule::top_k(k_grid[ki], spec.delta), config);
                residual[(t * n_k + ki) * n_alg + a] = (problem.y - problem.A * r.x_hat).squaredNorm();
            }
        }
    });

    std::vector<MetricsRow> rows;
    rows.reserve(n_k * n_alg);
    for (std::size_t ki = 0; ki < n_k; ++ki) {
        for (std::size_t a = 0; a < n_alg; ++a) {
            double sum = 0.0;
            for (std::size_t t = 0; t < spec.trials; ++t) {
                sum += residual[(t * n_k + ki) * n_alg + a];
            }
            rows.push_back({"path", std::string(to_string(spec.algorithms[a])),
                            static_cast<double>(k_grid[ki]), spec.trials, ValueKind::AvgResidualSq,
                            sum / static_cast<double>(spec.trials)});
        }
    }
    return rows;
}

std::vector<MetricsRow> run_completion_bench(const CompletionBenchSpec& spec,
                                             const ExecutionPolicy& policy) {
    spec.validate();
    const std::vector<ThresholdKind> kinds = {ThresholdKind::Soft, ThresholdKind::Hard,
                                              ThresholdKind::Log};
    const auto iters = static_cast<std::size_t>(spec.max_iters);
    // curves[(t * kinds + k) * iters + i]
    std::vector<double> curves(spec.trials * kinds.size() * iters, 0.0);

    parallel_for(spec.trials, policy.threads, [&](std::size_t t) {
        const CompletionProblem problem = gen_completion_problem(
            spec.N, spec.rank, spec.obs_frac, derive_seed(spec.master_seed, spec.N, t));
        for (std::size_t k = 0; k < kinds.size(); ++k) {
            double* curve = &curves[(t * kinds.size() + k) * iters];
            curve[0] = (problem.observed_matrix() - *problem.x_true).norm();
            std::size_t filled = 1;
            if (iters > 1) {
                SolverConfig config;
                config.max_iters = spec.max_iters - 1;
                const CompletionResult res = complete(problem, kinds[k], config, spec.delta);
                for (const auto& rec : res.trace.records) {
                    curve[filled++] = *rec.frob_error;
                }
            }
            // Runs that stop early hold their final error.
            for (; filled < iters; ++filled) {
                curve[filled] = curve[filled - 1];
            }
        }
    });

    std::vector<MetricsRow> rows;
    rows.reserve(kinds.size() * iters);
    for (std::size_t k = 0; k < kinds.size(); ++k) {
        for (std::size_t i = 0; i < iters; ++i) {
            double sum = 0.0;
            for (std::size_t t = 0; t < spec.trials; ++t) {
                sum += curves[(t * kinds.size() + k) * iters + i];
            }
            rows.push_back({"completion", completion_label(kinds[k]), static_cast<double>(i),
                            spec.trials, ValueKind::AvgFrobError,
                            sum / static_cast<double>(spec.trials)});
        }
    }
    return rows;
}

}  // namespace logshrink::experiments
