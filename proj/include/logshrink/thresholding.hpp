#pragma once

#include "logshrink/core.hpp"

#include <cstddef>
#include <optional>
#include <string_view>

namespace logshrink {

inline constexpr double kDefaultDelta = 1e-3;

enum class ThresholdKind { Soft, Hard, Log };

std::string_view to_string(ThresholdKind kind);
std::optional<ThresholdKind> parse_threshold_kind(std::string_view name);

/// Selects one of the three scalar operators together with its parameters.
///
/// For Soft, lambda is the shrinkage amount; for Hard it is the keep
/// threshold t; for Log it is the penalty weight and delta the smoothing
/// offset. dead_zone() is the half-width of the interval mapped to zero.
class ThresholdRule {
public:
    static ThresholdRule soft(double lambda);
    static ThresholdRule hard(double t);
    /// Requires lambda > 0, delta > 0 and a strictly positive dead zone
    /// sqrt(2 lambda) - delta.
    static ThresholdRule log(double lambda, double delta);

    ThresholdKind kind() const { return kind_; }
    double lambda() const { return lambda_; }
    double delta() const { return delta_; }
    double dead_zone() const { return dead_zone_; }

    /// Scalar operator selected by this rule.
    double operator()(double z) const;

private:
    friend ThresholdRule params_for_topk_impl(double, ThresholdKind, double, bool);

    ThresholdRule(ThresholdKind kind, double lambda, double delta, double dead_zone)
        : kind_(kind), lambda_(lambda), delta_(delta), dead_zone_(dead_zone) {}

    ThresholdKind kind_;
    double lambda_;
    double delta_;
    double dead_zone_;
};

// Scalar operators.

double soft_threshold(double z, double lambda);
double hard_threshold(double z, double t);

/// Closed-form local minimizer of (c - z)^2 + lambda * log(delta + |c|).
///
/// Zero on the dead zone |z| <= x0 = sqrt(2 lambda) - delta (boundary
/// included). Outside it returns 0.5 * ((|z| - delta) + sqrt((|z| + delta)^2
/// - 2 lambda)) with the sign of z. When lambda < 2 delta^2 that root can be
/// nonpositive for |z| slightly above x0; no local minimizer exists away from
/// zero there and the result is 0.
///
/// Throws InvalidParameter unless lambda > 0, delta > 0 and 2 lambda > delta^2,
/// and NumericalInputError for a non-finite z.
double log_threshold(double z, double lambda, double delta);

/// x0 = sqrt(2 lambda) - delta.
double log_dead_zone(double lambda, double delta);

/// (candidate - z)^2 + lambda * log(delta + |candidate|).
double scalar_prox_objective(double candidate, double z, double lambda, double delta);

/// Element-wise application of the rule.
Vector apply_rule(const Vector& v, const ThresholdRule& rule);

/// How the Log parameter is derived from the (K+1)-th magnitude s.
enum class TopKLogVariant {
    // lambda = (s + delta)^2 / 2, which puts the dead zone exactly at s.
    DeadZoneMatched,
    // lambda = (s + delta)^2 / 4. Leaves the dead zone below s, so more than
    // K entries can survive. Kept for comparison only.
    Quarter,
};

/// Rule that keeps only the K largest-magnitude entries of v.
///
/// With s the (K+1)-th largest |v_i| (0 when K >= size), Soft and Hard use
/// threshold s and Log gets a dead zone of exactly s. Entries tied with s are
/// zeroed, so at most K entries survive.
ThresholdRule params_for_topk(const Vector& v, std::size_t K, ThresholdKind kind,
                              double delta = kDefaultDelta,
                              TopKLogVariant variant = TopKLogVariant::DeadZoneMatched);

/// (K+1)-th largest magnitude of v, or 0 when K >= v.size().
double kth_magnitude_after(const Vector& v, std::size_t K);

}  // namespace logshrink
