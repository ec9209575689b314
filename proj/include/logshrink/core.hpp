#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>

namespace logshrink {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

// Error hierarchy. Everything derives from std::exception so callers that do
// not care about the category can catch one type.

/// A non-finite value (NaN/Inf) was supplied as input.
class NumericalInputError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Operand shapes do not agree.
class DimensionError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// A scalar parameter is outside its admissible range.
class InvalidParameter : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// The sensing operator is not a strict contraction, so the unit-step
/// thresholding iterations are not guaranteed to converge.
class ContractionError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// An iteration produced NaN/Inf, or a decomposition failed.
class NumericalFailure : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

inline constexpr double kDefaultRho = 0.99;
inline constexpr int kPowerIterations = 1000;
inline constexpr double kPowerTolerance = 1e-9;

/// Sparse recovery instance y = A x + n.
///
/// Built through make_measurement_problem(), which rescales A and y by the
/// same factor so that the spectral norm of A is at most rho < 1. The ground
/// truth x_true is unaffected by the rescaling.
struct MeasurementProblem {
    Matrix A;
    Vector y;
    std::optional<Vector> x_true;
    double noise_sigma = 0.0;
    std::uint64_t seed = 0;
    double scale_applied = 1.0;
    // Estimated spectral norm of A after rescaling; filled in by the factory.
    std::optional<double> spectral_norm;

    void validate() const;
};

struct SolverConfig {
    int max_iters = 250;
    double step_tol = 1e-8;  // sup-norm change between iterates
    double rho = kDefaultRho;
    bool record_trace = true;
    bool record_snapshots = false;
    double fixed_point_tol = 1e-6;

    void validate() const;
};

void require_finite(const Matrix& m, const std::string& what);
void require_finite(const Vector& v, const std::string& what);

/// Largest singular value of A by power iteration on A^T A.
///
/// The start vector is the normalized all-ones vector, so the result is a
/// deterministic function of A. Iteration stops when the relative change of
/// the estimate drops to tol or after iters rounds.
double spectral_norm_estimate(const Matrix& A, int iters = kPowerIterations,
                              double tol = kPowerTolerance);

struct Rescaled {
    Matrix A;
    Vector y;
    double scale = 1.0;          // A and y were divided by this
    double spectral_norm = 0.0;  // estimate for the returned A
};

/// Divides A and y by c = sigma_max(A) / rho when sigma_max(A) exceeds rho;
/// returns the inputs unchanged with c = 1 otherwise.
Rescaled rescale_to_contraction(const Matrix& A, const Vector& y, double rho);

MeasurementProblem make_measurement_problem(const Matrix& A, const Vector& y,
                                            std::optional<Vector> x_true = std::nullopt,
                                            double noise_sigma = 0.0,
                                            std::uint64_t seed = 0,
                                            double rho = kDefaultRho);

}  // namespace logshrink
