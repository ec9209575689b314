#include "selfcheck.hpp"

#include "logshrink/experiments.hpp"
#include "logshrink/sparse_solver.hpp"
#include "logshrink/thresholding.hpp"

#include <boost/random/bernoulli_distribution.hpp>
#include <boost/random/normal_distribution.hpp>
#include <boost/random/uniform_real_distribution.hpp>
#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <functional>
#include <random>
#include <stdexcept>

namespace logshrink::cli {

namespace {

// Fixed-lambda ILT setting used by the descent suites. u = sqrt(2 lambda) / delta
// is kept just above 2 so that activations from zero stay inside the region
// where the majorizer bound holds.
constexpr double kDescentDelta = 0.05;
constexpr double kDescentLambda = (2.1 * kDescentDelta) * (2.1 * kDescentDelta) / 2.0;
constexpr double kDescentSlack = 1e-10;
constexpr double kStationarityTol = 1e-9;
constexpr double kFixedPointTol = 1e-6;
constexpr double kDiagonalRelTol = 1e-12;

// Operator under test. The fault build perturbs it so the negative control
// has something to catch.
double operator_under_test(double z, double lambda, double delta) {
#ifdef LOGSHRINK_SELFCHECK_FAULT
    return log_threshold(z, lambda, delta) * (1.0 + 1e-6);
#else
    return log_threshold(z, lambda, delta);
#endif
}

struct ScalarCase {
    double z, lambda, delta, x0;
};

// lambda in [0.01, 2], delta in [1e-4, 0.1], rejecting lambda < 2 delta^2 so
// that the dead zone is at least delta.
ScalarCase draw_parameters(std::mt19937_64& rng) {
    boost::random::uniform_real_distribution<double> lam(0.01, 2.0);
    boost::random::uniform_real_distribution<double> del(1e-4, 0.1);
    ScalarCase c{};
    do {
        c.lambda = lam(rng);
        c.delta = del(rng);
    } while (c.lambda < 2.0 * c.delta * c.delta);
    c.x0 = log_dead_zone(c.lambda, c.delta);
    return c;
}

void record(SuiteResult& r, bool ok, const std::function<std::string()>& describe) {
    ++r.checks;
    if (!ok) {
        if (r.failures == 0) {
            r.detail = describe();
        }
        ++r.failures;
    }
}

SuiteResult stationarity(std::size_t trials, std::uint64_t seed) {
    SuiteResult r;
    r.name = "stationarity";
    std::mt19937_64 rng(seed);
    boost::random::uniform_real_distribution<double> over(1e-6, 5.0);
    boost::random::bernoulli_distribution<> flip(0.5);
    for (std::size_t t = 0; t < trials; ++t) {
        ScalarCase c = draw_parameters(rng);
        c.z = (c.x0 + over(rng)) * (flip(rng) ? -1.0 : 1.0);
        const double L = operator_under_test(c.z, c.lambda, c.delta);
        const double sgn = L > 0 ? 1.0 : (L < 0 ? -1.0 : 0.0);
        const double residual = 2.0 * (L - c.z) + c.lambda * sgn / (c.delta + std::abs(L));
        record(r, L != 0.0 && std::abs(residual) < kStationarityTol, [&] {
            return fmt::format("z={} lambda={} delta={}: L={} residual={}", c.z, c.lambda, c.delta,
                               L, residual);
        });
    }
    return r;
}

SuiteResult sandwich(std::size_t trials, std::uint64_t seed) {
    SuiteResult r;
    r.name = "sandwich";
    std::mt19937_64 rng(seed);
    boost::random::uniform_real_distribution<double> spread(-4.0, 4.0);
    for (std::size_t t = 0; t < trials; ++t) {
        ScalarCase c = draw_parameters(rng);
        c.z = spread(rng);
        const double L = operator_under_test(c.z, c.lambda, c.delta);
        const double a = std::abs(c.z);
        const double m = std::abs(L);
        bool ok = (L == 0.0) == (a <= c.x0);
        if (a > c.x0) {
            ok = ok && std::max(a - c.x0, 0.0) <= m && m <= a && std::signbit(L) == std::signbit(c.z);
        }
        record(r, ok, [&] {
            return fmt::format("z={} lambda={} delta={} x0={}: L={}", c.z, c.lambda, c.delta, c.x0,
                               L);
        });
    }
    return r;
}

MeasurementProblem descent_instance(std::uint64_t seed, std::size_t t) {
    const double sigma = (t % 2 == 0) ? 0.0 : 0.01;
    return experiments::gen_sparse_problem(100, 200, 10, sigma,
                                           experiments::derive_seed(seed, 0xDE5C, t));
}

SuiteResult monotonicity(std::size_t trials, std::uint64_t seed) {
    SuiteResult r;
    r.name = "monotonicity";
    SolverConfig config;
    config.max_iters = 250;
    config.step_tol = 0.0;
    const auto schedule = LambdaSchedule::fixed(kDescentLambda, kDescentDelta);
    for (std::size_t t = 0; t < trials; ++t) {
        const SolveResult res = solve(descent_instance(seed, t), ThresholdKind::Log, schedule, config);
        for (std::size_t n = 0; n < res.trace.records.size(); ++n) {
            const auto& rec = res.trace.records[n];
            record(r, rec.objective <= rec.objective_before + kDescentSlack, [&] {
                return fmt::format("instance {} iteration {}: f rose from {} to {}", t, n,
                                   rec.objective_before, rec.objective);
            });
            record(r, rec.surrogate <= rec.objective_before + kDescentSlack, [&] {
                return fmt::format("instance {} iteration {}: Q={} above f={}", t, n, rec.surrogate,
                                   rec.objective_before);
            });
        }
    }
    return r;
}

SuiteResult fixed_point(std::size_t trials, std::uint64_t seed) {
    SuiteResult r;
    r.name = "fixed-point";
    SolverConfig config;
    config.record_trace = false;
    const auto schedule = LambdaSchedule::fixed(kDescentLambda, kDescentDelta);
    for (std::size_t t = 0; t < trials; ++t) {
        const MeasurementProblem p = descent_instance(seed, t);
        const SolveResult res = solve(p, ThresholdKind::Log, schedule, config);
        if (!res.converged) {
            continue;
        }
        const FixedPointReport rep =
            check_fixed_point(res.x_hat, p.A, p.y, kDescentLambda, kDescentDelta, kFixedPointTol);
        record(r, rep.passes, [&] {
            return fmt::format("instance {}: support violation {}, off-support excess {}", t,
                               rep.max_support_violation, rep.max_offsupport_excess);
        });

        // Q(x, x) = f(x) at a random point.
        std::mt19937_64 rng(experiments::derive_seed(seed, 0xF1ED, t));
        boost::random::normal_distribution<double> g;
        Vector x(p.A.cols());
        for (Eigen::Index i = 0; i < x.size(); ++i) {
            x[i] = g(rng);
        }
        const double f = objective_f(x, p.A, p.y, kDescentLambda, kDescentDelta);
        const double q = surrogate_Q(x, x, p.A, p.y, kDescentLambda, kDescentDelta);
        record(r, std::abs(q - f) <= kDiagonalRelTol * std::max(1.0, std::abs(f)),
               [&] { return fmt::format("instance {}: Q(x,x)={} f(x)={}", t, q, f); });
    }
    return r;
}

struct SuiteEntry {
    std::string name;
    std::size_t default_trials;
    SuiteResult (*run)(std::size_t, std::uint64_t);
};

const std::vector<SuiteEntry>& registry() {
    static const std::vector<SuiteEntry> entries = {
        {"stationarity", 1000, &stationarity},
        {"sandwich", 10000, &sandwich},
        {"monotonicity", 20, &monotonicity},
        {"fixed-point", 20, &fixed_point},
    };
    return entries;
}

}  // namespace

const std::vector<std::string>& selfcheck_suites() {
    static const std::vector<std::string> names = [] {
        std::vector<std::string> out;
        for (const auto& e : registry()) {
            out.push_back(e.name);
        }
        return out;
    }();
    return names;
}

std::vector<SuiteResult> run_selfcheck(const SelfCheckOptions& options) {
    const auto& suites = selfcheck_suites();
    if (options.suite != "all" &&
        std::find(suites.begin(), suites.end(), options.suite) == suites.end()) {
        throw std::invalid_argument("unknown suite '" + options.suite + "'");
    }
    std::vector<SuiteResult> results;
    for (std::size_t i = 0; i < registry().size(); ++i) {
        const auto& e = registry()[i];
        if (options.suite != "all" && options.suite != e.name) {
            continue;
        }
        const std::size_t trials = options.trials > 0 ? options.trials : e.default_trials;
        results.push_back(e.run(trials, experiments::derive_seed(options.seed, 0x5E1F, i)));
    }
    return results;
}

}  // namespace logshrink::cli
