#include "logshrink/lowrank.hpp"

#include <Eigen/SVD>

#include <algorithm>
#include <cmath>
#include <string>

namespace logshrink {

namespace {

struct ThinSvd {
    Matrix U;
    Vector sigma;
    Matrix V;
};

ThinSvd thin_svd(const Matrix& X) {
    require_finite(X, "matrix");
    Eigen::BDCSVD<Matrix> svd(X, Eigen::ComputeThinU | Eigen::ComputeThinV);
    if (svd.info() != Eigen::Success) {
        throw NumericalFailure("singular value decomposition failed");
    }
    return {svd.matrixU(), svd.singularValues(), svd.matrixV()};
}

SpectralThreshold rebuild(const ThinSvd& svd, const ThresholdRule& rule) {
    SpectralThreshold out;
    out.spectrum = apply_rule(svd.sigma, rule);
    out.X = svd.U * out.spectrum.asDiagonal() * svd.V.transpose();
    return out;
}

}  // namespace

void CompletionProblem::validate() const {
    if (rank_target < 1) {
        throw InvalidParameter("rank_target must be at least 1");
    }
    std::vector<std::pair<std::size_t, std::size_t>> keys;
    keys.reserve(observed.size());
    for (const auto& e : observed) {
        if (e.row >= n_rows || e.col >= n_cols) {
            throw DimensionError("observed entry (" + std::to_string(e.row) + ", " +
                                 std::to_string(e.col) + ") is out of bounds");
        }
        if (!std::isfinite(e.value)) {
            throw NumericalInputError("observed value is not finite");
        }
        keys.emplace_back(e.row, e.col);
    }
    std::sort(keys.begin(), keys.end());
    if (std::adjacent_find(keys.begin(), keys.end()) != keys.end()) {
        throw InvalidParameter("observed entries contain duplicates");
    }
    if (x_true) {
        if (static_cast<std::size_t>(x_true->rows()) != n_rows ||
            static_cast<std::size_t>(x_true->cols()) != n_cols) {
            throw DimensionError("x_true has the wrong shape");
        }
        require_finite(*x_true, "x_true");
    }
}

Matrix CompletionProblem::observed_matrix() const {
    Matrix Y = Matrix::Zero(static_cast<Eigen::Index>(n_rows), static_cast<Eigen::Index>(n_cols));
    for (const auto& e : observed) {
        Y(static_cast<Eigen::Index>(e.row), static_cast<Eigen::Index>(e.col)) = e.value;
    }
    return Y;
}

std::size_t numerical_rank(const Vector& singular_values) {
    if (singular_values.size() == 0) {
        return 0;
    }
    const double top = singular_values.maxCoeff();
    if (!(top > 0.0)) {
        return 0;
    }
    return static_cast<std::size_t>((singular_values.array() > kRankTolerance * top).count());
}

double nuclear_norm(const Matrix& X) {
    if (X.size() == 0) {
        return 0.0;
    }
    require_finite(X, "matrix");
    Eigen::BDCSVD<Matrix> svd(X);
    return svd.singularValues().sum();
}

SpectralThreshold sv_threshold_with_spectrum(const Matrix& X, const ThresholdRule& rule) {
    return rebuild(thin_svd(X), rule);
}

Matrix sv_threshold(const Matrix& X, const ThresholdRule& rule) {
    return sv_threshold_with_spectrum(X, rule).X;
}

SpectralThreshold sv_threshold_topk_with_spectrum(const Matrix& X, std::size_t K,
                                                  ThresholdKind kind, double delta) {
    if (K < 1) {
        throw InvalidParameter("sv_threshold_topk: K must be at least 1");
    }
    const ThinSvd svd = thin_svd(X);
    return rebuild(svd, params_for_topk(svd.sigma, K, kind, delta));
}

Matrix sv_threshold_topk(const Matrix& X, std::size_t K, ThresholdKind kind, double delta) {
    return sv_threshold_topk_with_spectrum(X, K, kind, delta).X;
}

Matrix completion_step(const Matrix& X, const CompletionProblem& problem) {
    if (static_cast<std::size_t>(X.rows()) != problem.n_rows ||
        static_cast<std::size_t>(X.cols()) != problem.n_cols) {
        throw DimensionError("completion_step: matrix shape does not match the problem");
    }
    Matrix out = X;
    for (const auto& e : problem.observed) {
        out(static_cast<Eigen::Index>(e.row), static_cast<Eigen::Index>(e.col)) = e.value;
    }
    return out;
}

CompletionResult complete(const CompletionProblem& problem, ThresholdKind kind,
                          const SolverConfig& config, double delta) {
    config.validate();
    problem.validate();

    auto observed_residual = [&problem](const Matrix& X) {
        double sq = 0.0;
        for (const auto& e : problem.observed) {
            const double d =
                X(static_cast<Eigen::Index>(e.row), static_cast<Eigen::Index>(e.col)) - e.value;
            sq += d * d;
        }
        return std::sqrt(sq);
    };

    CompletionResult result;
    result.X = problem.observed_matrix();
    if (problem.x_true) {
        result.trace.initial_frob_error = (result.X - *problem.x_true).norm();
    }

    for (int n = 0; n < config.max_iters; ++n) {
        SpectralThreshold step = sv_threshold_topk_with_spectrum(
            completion_step(result.X, problem), problem.rank_target, kind, delta);
        if (!step.X.allFinite()) {
            throw NumericalFailure("completion iterate became non-finite at iteration " +
                                   std::to_string(n + 1));
        }
        result.X = std::move(step.X);
        result.iterations_run = n + 1;

        CompletionRecord rec;
        rec.observed_residual = observed_residual(result.X);
        rec.rank = numerical_rank(step.spectrum);
        if (problem.x_true) {
            rec.frob_error = (result.X - *problem.x_true).norm();
        }
        if (config.record_trace) {
            result.trace.records.push_back(rec);
        }
        if (rec.observed_residual <= config.step_tol) {
            result.converged = true;
            break;
        }
    }
    return result;
}

}  // namespace logshrink
