#include "logshrink/sparse_solver.hpp"

#include <Eigen/SVD>

#include <algorithm>
#include <cmath>
#include <string>

namespace logshrink {

namespace {

double sign_of(double v) { return static_cast<double>((v > 0.0) - (v < 0.0)); }

void check_dims(const Matrix& A, const Vector& x, const Vector& y) {
    if (x.size() != A.cols()) {
        throw DimensionError("x has length " + std::to_string(x.size()) + " but A has " +
                             std::to_string(A.cols()) + " columns");
    }
    if (y.size() != A.rows()) {
        throw DimensionError("y has length " + std::to_string(y.size()) + " but A has " +
                             std::to_string(A.rows()) + " rows");
    }
}

double log_penalty(const Vector& x, double lambda, double delta) {
    return lambda * (x.array().abs() + delta).log().sum();
}

std::size_t count_nonzeros(const Vector& x) {
    return static_cast<std::size_t>((x.array() != 0.0).count());
}

ThresholdRule fixed_rule(ThresholdKind kind, const LambdaSchedule& schedule) {
    switch (kind) {
        case ThresholdKind::Soft: return ThresholdRule::soft(schedule.lambda);
        case ThresholdKind::Hard: return ThresholdRule::hard(schedule.lambda);
        case ThresholdKind::Log: break;
    }
    return ThresholdRule::log(schedule.lambda, schedule.delta);
}

// Value of s_i the rule's optimality condition prescribes at a nonzero x_i.
double support_target(const ThresholdRule& rule, double xi) {
    switch (rule.kind()) {
        case ThresholdKind::Soft: return rule.lambda() * sign_of(xi);
        case ThresholdKind::Hard: return 0.0;
        case ThresholdKind::Log: break;
    }
    return rule.lambda() * sign_of(xi) / (2.0 * (std::abs(xi) + rule.delta()));
}

}  // namespace

LambdaSchedule LambdaSchedule::fixed(double lambda, double delta) {
    LambdaSchedule s;
    s.mode = Mode::Fixed;
    s.lambda = lambda;
    s.delta = delta;
    return s;
}

LambdaSchedule LambdaSchedule::top_k(std::size_t k, double delta) {
    LambdaSchedule s;
    s.mode = Mode::TopK;
    s.k = k;
    s.delta = delta;
    return s;
}

Vector gradient_step(const Vector& x, const Matrix& A, const Vector& y) {
    check_dims(A, x, y);
    return x + A.transpose() * (y - A * x);
}

double objective_f(const Vector& x, const Matrix& A, const Vector& y, double lambda,
                   double delta) {
    check_dims(A, x, y);
    if (!(delta > 0.0)) {
        throw InvalidParameter("objective_f: delta must be positive");
    }
    return (y - A * x).squaredNorm() + log_penalty(x, lambda, delta);
}

double surrogate_Q(const Vector& x, const Vector& z, const Matrix& A, const Vector& y,
                   double lambda, double delta) {
    check_dims(A, z, y);
    const Vector d = x - z;
    return objective_f(x, A, y, lambda, delta) + d.squaredNorm() - (A * d).squaredNorm();
}

double rule_penalty(const Vector& x, const ThresholdRule& rule) {
    switch (rule.kind()) {
        case ThresholdKind::Soft: return 2.0 * rule.lambda() * x.lpNorm<1>();
        case ThresholdKind::Hard:
            return rule.lambda() * rule.lambda() * static_cast<double>(count_nonzeros(x));
        case ThresholdKind::Log: break;
    }
    return log_penalty(x, rule.lambda(), rule.delta());
}

SolveResult solve(const MeasurementProblem& problem, ThresholdKind kind,
                  const LambdaSchedule& schedule, const SolverConfig& config) {
    config.validate();
    problem.validate();
    const Matrix& A = problem.A;
    const Vector& y = problem.y;

    const double norm = problem.spectral_norm ? *problem.spectral_norm : spectral_norm_estimate(A);
    if (!(norm < 1.0)) {
        throw ContractionError("spectral norm of A is " + std::to_string(norm) +
                               "; rescale so that it is below 1");
    }

    std::optional<ThresholdRule> rule;
    if (schedule.mode == LambdaSchedule::Mode::Fixed) {
        rule = fixed_rule(kind, schedule);
    }

    SolveResult result;
    Vector x = Vector::Zero(A.cols());
    Vector Ax = Vector::Zero(A.rows());
    if (config.record_trace) {
        result.trace.records.reserve(static_cast<std::size_t>(config.max_iters));
    }

    for (int n = 0; n < config.max_iters; ++n) {
        const Vector residual = y - Ax;
        const Vector z = x + A.transpose() * residual;
        if (schedule.mode == LambdaSchedule::Mode::TopK) {
            rule = params_for_topk(z, schedule.k, kind, schedule.delta);
        }
        Vector x_next = apply_rule(z, *rule);
        if (!x_next.allFinite()) {
            throw NumericalFailure("iterate became non-finite at iteration " + std::to_string(n + 1));
        }
        Vector Ax_next = A * x_next;
        const double step = (x_next - x).lpNorm<Eigen::Infinity>();

        if (config.record_trace) {
            IterateRecord rec;
            rec.objective_before = residual.squaredNorm() + rule_penalty(x, *rule);
            rec.residual_sq = (y - Ax_next).squaredNorm();
            rec.objective = rec.residual_sq + rule_penalty(x_next, *rule);
            rec.surrogate =
                rec.objective + (x_next - x).squaredNorm() - (Ax_next - Ax).squaredNorm();
            rec.nnz = count_nonzeros(x_next);
            rec.step_delta = step;
            rec.lambda = rule->lambda();
            result.trace.records.push_back(rec);
            if (config.record_snapshots) {
                result.trace.snapshots.push_back(x_next);
            }
        }

        x = std::move(x_next);
        Ax = std::move(Ax_next);
        result.iterations_run = n + 1;
        if (step <= config.step_tol) {
            result.converged = true;
            break;
        }
    }

    result.x_hat = std::move(x);
    result.final_rule = rule;
    const double tol = std::max(config.fixed_point_tol, 10.0 * config.step_tol);
    result.fixed_point = check_fixed_point(result.x_hat, A, y, *rule, tol);
    return result;
}

FixedPointReport check_fixed_point(const Vector& x_bar, const Matrix& A, const Vector& y,
                                   const ThresholdRule& rule, double tol) {
    check_dims(A, x_bar, y);
    FixedPointReport report;
    report.tol = tol;
    report.s = A.transpose() * (y - A * x_bar);
    const double zone = rule.dead_zone();
    for (Eigen::Index i = 0; i < x_bar.size(); ++i) {
        const double xi = x_bar[i];
        const double si = report.s[i];
        if (xi != 0.0) {
            report.support.push_back(static_cast<std::size_t>(i));
            report.max_support_violation =
                std::max(report.max_support_violation, std::abs(si - support_target(rule, xi)));
        } else {
            report.off_support.push_back(static_cast<std::size_t>(i));
            report.max_offsupport_excess =
                std::max(report.max_offsupport_excess, std::abs(si) - zone);
        }
    }
    report.passes = report.max_support_violation <= tol && report.max_offsupport_excess <= tol;
    return report;
}

FixedPointReport check_fixed_point(const Vector& x_bar, const Matrix& A, const Vector& y,
                                   double lambda, double delta, double tol) {
    return check_fixed_point(x_bar, A, y, ThresholdRule::log(lambda, delta), tol);
}

LocalMinReport check_local_min_condition(const Matrix& A,
                                         const std::vector<std::size_t>& support) {
    LocalMinReport report;
    require_finite(A, "A");
    // Exact rather than power iteration: the verdict sits on a strict
    // inequality and power iteration approaches sigma_max from below.
    report.spectral_norm = A.size() == 0 ? 0.0 : Eigen::BDCSVD<Matrix>(A).singularValues()(0);
    report.contraction = report.spectral_norm < 1.0;
    if (support.empty()) {
        report.singular_condition = true;
        report.passes = true;
        return report;
    }
    Matrix sub(A.rows(), static_cast<Eigen::Index>(support.size()));
    for (std::size_t j = 0; j < support.size(); ++j) {
        if (support[j] >= static_cast<std::size_t>(A.cols())) {
            throw DimensionError("support index " + std::to_string(support[j]) + " out of range");
        }
        sub.col(static_cast<Eigen::Index>(j)) = A.col(static_cast<Eigen::Index>(support[j]));
    }
    if (sub.cols() > sub.rows()) {
        // More columns than rows: the restriction has a nontrivial null space.
        report.min_singular = 0.0;
    } else {
        Eigen::BDCSVD<Matrix> svd(sub);
        report.min_singular = svd.singularValues().minCoeff();
    }
    report.singular_condition = *report.min_singular > 0.5;
    report.passes = report.singular_condition && report.contraction;
    return report;
}

DeltaConditionReport check_delta_condition(double lambda, double delta) {
    if (!(lambda > 0.0) || !(delta > 0.0)) {
        throw InvalidParameter("check_delta_condition: lambda and delta must be positive");
    }
    DeltaConditionReport r;
    r.lambda = lambda;
    r.delta = delta;
    r.lhs = lambda / delta + 2.0 * delta;
    r.rhs = 2.0 * std::sqrt(2.0 * lambda);
    r.satisfied = r.lhs > r.rhs;
    return r;
}

}  // namespace logshrink
