#pragma once

#include "logshrink/core.hpp"
#include "logshrink/thresholding.hpp"

#include <cstddef>
#include <optional>
#include <vector>

namespace logshrink {

/// How the threshold parameter is chosen at each iteration.
struct LambdaSchedule {
    enum class Mode { Fixed, TopK };

    Mode mode = Mode::Fixed;
    double lambda = 0.0;   // Fixed mode
    std::size_t k = 0;     // TopK mode; k = 0 zeroes everything
    double delta = kDefaultDelta;

    static LambdaSchedule fixed(double lambda, double delta = kDefaultDelta);
    static LambdaSchedule top_k(std::size_t k, double delta = kDefaultDelta);
};

struct IterateRecord {
    double objective_before = 0.0;  // f(x^n) under this iteration's rule
    double objective = 0.0;         // f(x^{n+1})
    double surrogate = 0.0;         // Q(x^{n+1}, x^n)
    double residual_sq = 0.0;       // ||y - A x^{n+1}||^2
    std::size_t nnz = 0;
    double step_delta = 0.0;        // ||x^{n+1} - x^n||_inf
    double lambda = 0.0;            // rule parameter used in this iteration
};

struct IterateTrace {
    std::vector<IterateRecord> records;
    std::vector<Vector> snapshots;  // x^{n+1}, only with record_snapshots
};

/// Stationarity diagnostics at a candidate fixed point x_bar.
///
/// s = A^T (y - A x_bar). On the support each s_i must equal the value the
/// rule's own optimality condition prescribes; off the support |s_i| must not
/// exceed the rule's dead zone.
struct FixedPointReport {
    Vector s;
    std::vector<std::size_t> support;
    std::vector<std::size_t> off_support;
    double max_support_violation = 0.0;
    double max_offsupport_excess = 0.0;
    double tol = 0.0;
    bool passes = false;
};

struct SolveResult {
    Vector x_hat;
    int iterations_run = 0;
    bool converged = false;
    IterateTrace trace;
    FixedPointReport fixed_point;
    std::optional<ThresholdRule> final_rule;
};

/// x + A^T (y - A x).
Vector gradient_step(const Vector& x, const Matrix& A, const Vector& y);

/// ||y - A x||^2 + lambda * sum_i log(delta + |x_i|).
double objective_f(const Vector& x, const Matrix& A, const Vector& y, double lambda,
                   double delta);

/// f(x) + ||x - z||^2 - ||A (x - z)||^2, the majorizer of f anchored at z.
double surrogate_Q(const Vector& x, const Vector& z, const Matrix& A, const Vector& y,
                   double lambda, double delta);

/// Penalty whose proximal-type map is the given rule: 2 lambda ||x||_1 for
/// Soft, t^2 ||x||_0 for Hard and lambda sum log(delta + |x_i|) for Log.
double rule_penalty(const Vector& x, const ThresholdRule& rule);

/// Iterative thresholding x^{n+1} = rule(x^n + A^T (y - A x^n)) from x^0 = 0.
///
/// Soft, Hard and Log give IST, IHT and ILT respectively. In TopK mode the
/// rule is rebuilt every iteration from the post-gradient vector. Throws
/// ContractionError when the spectral norm of A is not below 1 and
/// NumericalFailure when an iterate turns non-finite.
SolveResult solve(const MeasurementProblem& problem, ThresholdKind kind,
                  const LambdaSchedule& schedule, const SolverConfig& config = {});

FixedPointReport check_fixed_point(const Vector& x_bar, const Matrix& A, const Vector& y,
                                   const ThresholdRule& rule, double tol);

/// Log-rule overload with explicit lambda and delta.
FixedPointReport check_fixed_point(const Vector& x_bar, const Matrix& A, const Vector& y,
                                   double lambda, double delta, double tol);

struct LocalMinReport {
    std::optional<double> min_singular;  // empty for an empty support
    double spectral_norm = 0.0;
    bool singular_condition = false;     // min_singular > 1/2
    bool contraction = false;            // spectral_norm < 1
    bool passes = false;
};

/// Sufficient condition for a fixed point to be a local minimum: the columns
/// of A on the support have smallest singular value above 1/2 and A itself
/// is a strict contraction. An empty support passes trivially.
LocalMinReport check_local_min_condition(const Matrix& A, const std::vector<std::size_t>& support);

struct DeltaConditionReport {
    double lambda = 0.0;
    double delta = 0.0;
    double lhs = 0.0;  // lambda / delta + 2 delta
    double rhs = 0.0;  // 2 sqrt(2 lambda)
    bool satisfied = false;
};

DeltaConditionReport check_delta_condition(double lambda, double delta);

}  // namespace logshrink
