#include "logshrink/thresholding.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <string>
#include <vector>

namespace logshrink {

namespace {

double soft_kernel(double z, double lambda) {
    const double a = std::abs(z) - lambda;
    return a > 0.0 ? std::copysign(a, z) : 0.0;
}

double hard_kernel(double z, double t) { return std::abs(z) > t ? z : 0.0; }

// Works on |z| and restores the sign, so odd symmetry is exact.
double log_kernel(double z, double lambda, double delta, double dead_zone) {
    const double a = std::abs(z);
    if (a <= dead_zone) {
        return 0.0;
    }
    const double shifted = a + delta;
    const double disc = std::max(shifted * shifted - 2.0 * lambda, 0.0);
    const double root = 0.5 * ((a - delta) + std::sqrt(disc));
    if (root <= 0.0) {
        return 0.0;
    }
    return std::copysign(root, z);
}

void check_log_params(double lambda, double delta) {
    if (!(lambda > 0.0)) {
        throw InvalidParameter("log threshold: lambda must be positive");
    }
    if (!(delta > 0.0)) {
        throw InvalidParameter("log threshold: delta must be positive");
    }
    if (!std::isfinite(lambda) || !std::isfinite(delta)) {
        throw InvalidParameter("log threshold: parameters must be finite");
    }
    if (!(2.0 * lambda > delta * delta)) {
        throw InvalidParameter("log threshold: requires 2*lambda > delta^2 (positive dead zone)");
    }
}

void check_input(double z) {
    if (!std::isfinite(z)) {
        throw NumericalInputError("threshold input is not finite");
    }
}

}  // namespace

std::string_view to_string(ThresholdKind kind) {
    switch (kind) {
        case ThresholdKind::Soft: return "soft";
        case ThresholdKind::Hard: return "hard";
        case ThresholdKind::Log: return "log";
    }
    return "unknown";
}

std::optional<ThresholdKind> parse_threshold_kind(std::string_view name) {
    if (name == "soft") return ThresholdKind::Soft;
    if (name == "hard") return ThresholdKind::Hard;
    if (name == "log") return ThresholdKind::Log;
    return std::nullopt;
}

ThresholdRule ThresholdRule::soft(double lambda) {
    if (!(lambda >= 0.0) || !std::isfinite(lambda)) {
        throw InvalidParameter("soft threshold: lambda must be finite and nonnegative");
    }
    return ThresholdRule(ThresholdKind::Soft, lambda, 0.0, lambda);
}

ThresholdRule ThresholdRule::hard(double t) {
    if (!(t >= 0.0) || !std::isfinite(t)) {
        throw InvalidParameter("hard threshold: t must be finite and nonnegative");
    }
    return ThresholdRule(ThresholdKind::Hard, t, 0.0, t);
}

ThresholdRule ThresholdRule::log(double lambda, double delta) {
    check_log_params(lambda, delta);
    const double x0 = log_dead_zone(lambda, delta);
    if (!(x0 > 0.0)) {
        throw InvalidParameter("log threshold: dead zone sqrt(2*lambda) - delta must be positive");
    }
    return ThresholdRule(ThresholdKind::Log, lambda, delta, x0);
}

double ThresholdRule::operator()(double z) const {
    switch (kind_) {
        case ThresholdKind::Soft: return soft_kernel(z, lambda_);
        case ThresholdKind::Hard: return hard_kernel(z, lambda_);
        case ThresholdKind::Log: return log_kernel(z, lambda_, delta_, dead_zone_);
    }
    return 0.0;
}

double soft_threshold(double z, double lambda) {
    if (!(lambda >= 0.0)) {
        throw InvalidParameter("soft threshold: lambda must be nonnegative");
    }
    check_input(z);
    return soft_kernel(z, lambda);
}

double hard_threshold(double z, double t) {
    if (!(t >= 0.0)) {
        throw InvalidParameter("hard threshold: t must be nonnegative");
    }
    check_input(z);
    return hard_kernel(z, t);
}

double log_dead_zone(double lambda, double delta) { return std::sqrt(2.0 * lambda) - delta; }

double log_threshold(double z, double lambda, double delta) {
    check_log_params(lambda, delta);
    check_input(z);
    return log_kernel(z, lambda, delta, log_dead_zone(lambda, delta));
}

double scalar_prox_objective(double candidate, double z, double lambda, double delta) {
    if (!(delta > 0.0)) {
        throw InvalidParameter("scalar_prox_objective: delta must be positive");
    }
    const double d = candidate - z;
    return d * d + lambda * std::log(delta + std::abs(candidate));
}

Vector apply_rule(const Vector& v, const ThresholdRule& rule) {
    return v.unaryExpr([&rule](double z) { return rule(z); });
}

double kth_magnitude_after(const Vector& v, std::size_t K) {
    const auto n = static_cast<std::size_t>(v.size());
    if (K >= n) {
        return 0.0;
    }
    std::vector<double> mags(n);
    for (std::size_t i = 0; i < n; ++i) {
        mags[i] = std::abs(v[static_cast<Eigen::Index>(i)]);
    }
    std::nth_element(mags.begin(), mags.begin() + static_cast<std::ptrdiff_t>(K), mags.end(),
                     std::greater<>());
    return mags[K];
}

ThresholdRule params_for_topk_impl(double s, ThresholdKind kind, double delta, bool quarter) {
    switch (kind) {
        case ThresholdKind::Soft: return ThresholdRule::soft(s);
        case ThresholdKind::Hard: return ThresholdRule::hard(s);
        case ThresholdKind::Log: break;
    }
    if (!(delta > 0.0)) {
        throw InvalidParameter("params_for_topk: delta must be positive for the log rule");
    }
    const double shifted = s + delta;
    if (!quarter) {
        // Dead zone pinned to s itself rather than sqrt(2 lambda) - delta, so
        // the comparison against s is exact and ties are always zeroed.
        return ThresholdRule(ThresholdKind::Log, 0.5 * shifted * shifted, delta, s);
    }
    // Quarter variant, floored at the smallest lambda with a nonnegative dead zone.
    const double lambda = std::max(0.25 * shifted * shifted, 0.5 * delta * delta);
    return ThresholdRule(ThresholdKind::Log, lambda, delta,
                         std::max(log_dead_zone(lambda, delta), 0.0));
}

ThresholdRule params_for_topk(const Vector& v, std::size_t K, ThresholdKind kind, double delta,
                              TopKLogVariant variant) {
    require_finite(v, "params_for_topk input");
    return params_for_topk_impl(kth_magnitude_after(v, K), kind, delta,
                                variant == TopKLogVariant::Quarter);
}

}  // namespace logshrink
