#include "logshrink/core.hpp"

#include <cmath>

namespace logshrink {

namespace {

// Relative slack when deciding whether a matrix already satisfies the target
// norm. Power iteration on A/c retraces the iteration on A scaled by 1/c^2,
// so a second rescale sees rho up to a few ulps; this keeps it a no-op.
constexpr double kRescaleSlack = 1e-10;

}  // namespace

void require_finite(const Matrix& m, const std::string& what) {
    if (!m.allFinite()) {
        throw NumericalInputError(what + " contains non-finite entries");
    }
}

void require_finite(const Vector& v, const std::string& what) {
    if (!v.allFinite()) {
        throw NumericalInputError(what + " contains non-finite entries");
    }
}

void MeasurementProblem::validate() const {
    require_finite(A, "A");
    require_finite(y, "y");
    if (y.size() != A.rows()) {
        throw DimensionError("y has length " + std::to_string(y.size()) + " but A has " +
                             std::to_string(A.rows()) + " rows");
    }
    if (x_true) {
        require_finite(*x_true, "x_true");
        if (x_true->size() != A.cols()) {
            throw DimensionError("x_true has length " + std::to_string(x_true->size()) +
                                 " but A has " + std::to_string(A.cols()) + " columns");
        }
    }
    if (!(noise_sigma >= 0.0)) {
        throw InvalidParameter("noise_sigma must be nonnegative");
    }
    if (!(scale_applied > 0.0)) {
        throw InvalidParameter("scale_applied must be positive");
    }
}

void SolverConfig::validate() const {
    if (max_iters < 1) {
        throw InvalidParameter("max_iters must be at least 1");
    }
    if (!(step_tol >= 0.0)) {
        throw InvalidParameter("step_tol must be nonnegative");
    }
    if (!(rho > 0.0 && rho < 1.0)) {
        throw InvalidParameter("rho must lie in (0, 1)");
    }
    if (!(fixed_point_tol >= 0.0)) {
        throw InvalidParameter("fixed_point_tol must be nonnegative");
    }
}

double spectral_norm_estimate(const Matrix& A, int iters, double tol) {
    if (A.size() == 0) {
        throw InvalidParameter("spectral_norm_estimate: matrix is empty");
    }
    if (iters < 1) {
        throw InvalidParameter("spectral_norm_estimate: iters must be at least 1");
    }
    require_finite(A, "A");

    const Eigen::Index n = A.cols();
    Vector v = Vector::Ones(n) / std::sqrt(static_cast<double>(n));
    Vector Av = A * v;
    if (Av.squaredNorm() == 0.0) {
        if (A.squaredNorm() == 0.0) {
            return 0.0;
        }
        // All-ones lies in the null space; restart from the heaviest column.
        Eigen::Index j = 0;
        A.colwise().squaredNorm().maxCoeff(&j);
        v.setZero();
        v(j) = 1.0;
        Av = A * v;
    }

    double sigma = Av.norm();
    for (int k = 0; k < iters; ++k) {
        Vector w = A.transpose() * Av;
        const double wn = w.norm();
        if (wn == 0.0) {
            break;
        }
        v = w / wn;
        Av.noalias() = A * v;
        const double next = Av.norm();
        const double change = std::abs(next - sigma);
        sigma = next;
        if (change <= tol * sigma) {
            break;
        }
    }
    return sigma;
}

Rescaled rescale_to_contraction(const Matrix& A, const Vector& y, double rho) {
    if (!(rho > 0.0 && rho < 1.0)) {
        throw InvalidParameter("rho must lie in (0, 1)");
    }
    require_finite(A, "A");
    require_finite(y, "y");
    if (y.size() != A.rows()) {
        throw DimensionError("y length does not match the rows of A");
    }
    const double sigma = spectral_norm_estimate(A);
    if (sigma <= rho * (1.0 + kRescaleSlack)) {
        return {A, y, 1.0, sigma};
    }
    const double c = sigma / rho;
    return {A / c, y / c, c, sigma / c};
}

MeasurementProblem make_measurement_problem(const Matrix& A, const Vector& y,
                                            std::optional<Vector> x_true, double noise_sigma,
                                            std::uint64_t seed, double rho) {
    Rescaled r = rescale_to_contraction(A, y, rho);
    MeasurementProblem p;
    p.A = std::move(r.A);
    p.y = std::move(r.y);
    p.x_true = std::move(x_true);
    p.noise_sigma = noise_sigma;
    p.seed = seed;
    p.scale_applied = r.scale;
    p.spectral_norm = r.spectral_norm;
    p.validate();
    return p;
}

}  // namespace logshrink
