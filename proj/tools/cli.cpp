#include "cli.hpp"

#include "csv_output.hpp"
#include "ranges.hpp"
#include "selfcheck.hpp"

#include "logshrink/experiments.hpp"
#include "logshrink/sparse_solver.hpp"
#include "logshrink/thresholding.hpp"

#include <CLI11.hpp>
#include <fmt/format.h>

#include <algorithm>
#include <charconv>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace logshrink::cli {

namespace fs = std::filesystem;
namespace ex = experiments;

namespace {

// Validation failure attributed to a specific flag.
class FlagError : public std::invalid_argument {
public:
    FlagError(const std::string& flag, const std::string& what)
        : std::invalid_argument(flag + ": " + what) {}
};

struct CommonFlags {
    std::string out_dir = ".";
    std::uint64_t seed = 12345;
    double delta = kDefaultDelta;
};

struct EnsembleFlags {
    std::size_t M = 100;
    std::size_t N = 200;
    std::size_t trials = 100;
    int iters = 250;
    double rel_tol = 1e-3;
    std::string algorithms = "IST,IHT,ILT";
};

struct PhaseFlags {
    EnsembleFlags e;
    std::string K = "10:60:10";
};

struct PathFlags {
    EnsembleFlags e;
    std::size_t K_true = 10;
    std::string k = "1:30:1";
    double noise = 0.01;
};

struct CompleteFlags {
    std::size_t N = 100;
    std::size_t rank = 2;
    double obs = 0.3;
    std::size_t trials = 20;
    int iters = 250;
};

struct ThresholdFlags {
    std::string kind;
    double x = 0.0;
    double lambda = 0.0;
    double delta = kDefaultDelta;
};

unsigned threads_from_env() {
    const char* raw = std::getenv("LOGSHRINK_THREADS");
    if (raw == nullptr || *raw == '\0') {
        return 0;
    }
    const std::string_view s(raw);
    unsigned value = 0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
    if (ec != std::errc{} || ptr != s.data() + s.size()) {
        throw FlagError("LOGSHRINK_THREADS", fmt::format("expected a thread count, got '{}'", s));
    }
    return value;
}

std::vector<std::size_t> range_flag(const std::string& flag, const std::string& text) {
    try {
        auto values = parse_size_range(text);
        if (values.empty()) {
            throw FlagError(flag, "range is empty");
        }
        return values;
    } catch (const FlagError&) {
        throw;
    } catch (const std::invalid_argument& e) {
        throw FlagError(flag, e.what());
    }
}

std::vector<ex::Algorithm> algorithms_flag(const std::string& text) {
    std::vector<ex::Algorithm> out;
    std::size_t pos = 0;
    while (true) {
        const std::size_t comma = text.find(',', pos);
        const std::string name = text.substr(pos, comma - pos);
        const auto a = ex::parse_algorithm(name);
        if (!a) {
            throw FlagError("--algorithms", fmt::format("unknown algorithm '{}'", name));
        }
        out.push_back(*a);
        if (comma == std::string::npos) {
            break;
        }
        pos = comma + 1;
    }
    return out;
}

// Creates the directory if needed and confirms a file can be placed in it.
fs::path prepare_output_dir(const std::string& dir) {
    const fs::path p(dir);
    std::error_code ec;
    fs::create_directories(p, ec);
    if (!fs::is_directory(p)) {
        throw FlagError("--out", fmt::format("'{}' is not a usable directory", dir));
    }
    const fs::path probe = p / ".logshrink-write-probe";
    {
        std::ofstream os(probe);
        if (!os) {
            throw FlagError("--out", fmt::format("'{}' is not writable", dir));
        }
    }
    fs::remove(probe, ec);
    return p;
}

void check_delta(double delta) {
    if (!(delta > 0.0)) {
        throw FlagError("--delta", "must be positive");
    }
}

ex::EnsembleSpec ensemble_from(const EnsembleFlags& f, const CommonFlags& c) {
    if (f.M < 1) throw FlagError("--M", "must be positive");
    if (f.N < 1) throw FlagError("--N", "must be positive");
    if (f.trials < 1) throw FlagError("--trials", "must be at least 1");
    if (f.iters < 1) throw FlagError("--iters", "must be at least 1");
    if (!(f.rel_tol >= 0.0)) throw FlagError("--rel-tol", "must be nonnegative");
    check_delta(c.delta);
    ex::EnsembleSpec spec;
    spec.M = f.M;
    spec.N = f.N;
    spec.trials = f.trials;
    spec.max_iters = f.iters;
    spec.rel_tol = f.rel_tol;
    spec.master_seed = c.seed;
    spec.delta = c.delta;
    spec.algorithms = algorithms_flag(f.algorithms);
    return spec;
}

void emit(const fs::path& dir, const std::string& name, const std::vector<ex::MetricsRow>& rows,
          std::string_view coord, std::ostream& out) {
    write_file_atomically(dir / name, format_metrics_csv(rows, coord));
    out << fmt::format("wrote {} ({} rows)\n", (dir / name).string(), rows.size());
}

int cmd_phase(const PhaseFlags& f, const CommonFlags& c, std::ostream& out) {
    ex::EnsembleSpec spec = ensemble_from(f.e, c);
    spec.K_grid = range_flag("--K", f.K);
    for (std::size_t K : spec.K_grid) {
        if (K >= spec.N) {
            throw FlagError("--K", fmt::format("sparsity {} must be below --N = {}", K, spec.N));
        }
    }
    spec.validate();
    const unsigned threads = threads_from_env();
    const fs::path dir = prepare_output_dir(c.out_dir);
    emit(dir, "phase.csv", ex::run_noiseless_sweep(spec, {threads}), "K", out);
    return kExitOk;
}

int cmd_noisy_path(const PathFlags& f, const CommonFlags& c, std::ostream& out) {
    ex::EnsembleSpec spec = ensemble_from(f.e, c);
    if (!(f.noise > 0.0)) {
        throw FlagError("--noise", "the noisy path needs a positive noise level; use phase for "
                                   "noiseless sweeps");
    }
    if (f.K_true >= spec.N) {
        throw FlagError("--K", fmt::format("true sparsity {} must be below --N = {}", f.K_true,
                                           spec.N));
    }
    const auto k_grid = range_flag("--k", f.k);
    for (std::size_t k : k_grid) {
        if (k > spec.N) {
            throw FlagError("--k", fmt::format("sparsity {} exceeds --N = {}", k, spec.N));
        }
    }
    spec.noise_sigma = f.noise;
    spec.K_grid = {f.K_true};
    spec.validate();
    const unsigned threads = threads_from_env();
    const fs::path dir = prepare_output_dir(c.out_dir);
    emit(dir, "path.csv", ex::run_noisy_path(spec, f.K_true, k_grid, {threads}), "sparsity_k", out);
    return kExitOk;
}

int cmd_complete(const CompleteFlags& f, const CommonFlags& c, std::ostream& out) {
    if (f.N < 1) throw FlagError("--N", "must be positive");
    if (f.rank < 1 || f.rank > f.N) throw FlagError("--rank", "must lie in [1, N]");
    if (!(f.obs > 0.0 && f.obs <= 1.0)) throw FlagError("--obs", "must lie in (0, 1]");
    if (f.trials < 1) throw FlagError("--trials", "must be at least 1");
    if (f.iters < 1) throw FlagError("--iters", "must be at least 1");
    check_delta(c.delta);
    ex::CompletionBenchSpec spec;
    spec.N = f.N;
    spec.rank = f.rank;
    spec.obs_frac = f.obs;
    spec.trials = f.trials;
    spec.max_iters = f.iters;
    spec.master_seed = c.seed;
    spec.delta = c.delta;
    spec.validate();
    const unsigned threads = threads_from_env();
    const fs::path dir = prepare_output_dir(c.out_dir);
    emit(dir, "completion.csv", ex::run_completion_bench(spec, {threads}), "iteration", out);
    return kExitOk;
}

int cmd_threshold(const ThresholdFlags& f, std::ostream& out) {
    const auto kind = parse_threshold_kind(f.kind);
    if (!kind) {
        throw FlagError("--kind", fmt::format("expected soft, hard or log, got '{}'", f.kind));
    }
    auto rule = [&]() -> ThresholdRule {
        try {
            switch (*kind) {
                case ThresholdKind::Soft: return ThresholdRule::soft(f.lambda);
                case ThresholdKind::Hard: return ThresholdRule::hard(f.lambda);
                case ThresholdKind::Log: return ThresholdRule::log(f.lambda, f.delta);
            }
        } catch (const std::invalid_argument& e) {
            throw FlagError("--lambda/--delta", e.what());
        }
        throw FlagError("--kind", "unsupported");
    }();
    out << fmt::format("kind={}\n", to_string(*kind));
    out << fmt::format("x={}\n", f.x);
    out << fmt::format("value={}\n", rule(f.x));
    if (*kind == ThresholdKind::Log) {
        const DeltaConditionReport d = check_delta_condition(f.lambda, f.delta);
        out << fmt::format("x0={}\n", rule.dead_zone());
        out << fmt::format("delta_condition_lhs={}\n", d.lhs);
        out << fmt::format("delta_condition_rhs={}\n", d.rhs);
        out << fmt::format("delta_condition_satisfied={}\n", d.satisfied);
    }
    return kExitOk;
}

int cmd_selfcheck(const SelfCheckOptions& opts, std::ostream& out) {
    const auto& names = selfcheck_suites();
    if (opts.suite != "all" && std::find(names.begin(), names.end(), opts.suite) == names.end()) {
        throw FlagError("--suite", fmt::format("unknown suite '{}'", opts.suite));
    }
    bool all_passed = true;
    for (const SuiteResult& r : run_selfcheck(opts)) {
        all_passed = all_passed && r.passed();
        out << fmt::format("{} {}: {} checks, {} failures", r.passed() ? "PASS" : "FAIL", r.name,
                           r.checks, r.failures);
        if (!r.passed()) {
            out << fmt::format(" (first: {})", r.detail);
        }
        out << '\n';
    }
    return all_passed ? kExitOk : kExitFailure;
}

void add_common(CLI::App* sub, CommonFlags& c, bool with_out) {
    if (with_out) {
        sub->add_option("--out", c.out_dir, "Output directory")->capture_default_str();
    }
    sub->add_option("--seed", c.seed, "Master seed")->capture_default_str();
    sub->add_option("--delta", c.delta, "Log offset delta")->capture_default_str();
}

void add_ensemble(CLI::App* sub, EnsembleFlags& e, std::size_t default_trials) {
    e.trials = default_trials;
    sub->add_option("--M", e.M, "Measurements")->capture_default_str();
    sub->add_option("--N", e.N, "Signal length")->capture_default_str();
    sub->add_option("--trials", e.trials, "Trials per grid point")->capture_default_str();
    sub->add_option("--iters", e.iters, "Iterations per solve")->capture_default_str();
    sub->add_option("--rel-tol", e.rel_tol, "Exact-recovery tolerance")->capture_default_str();
    sub->add_option("--algorithms", e.algorithms, "Comma-separated subset of IST,IHT,ILT")
        ->capture_default_str();
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Iterative soft, hard and log thresholding experiments"};
    app.require_subcommand(1);

    CommonFlags common;
    PhaseFlags phase;
    PathFlags path;
    CompleteFlags complete;
    ThresholdFlags threshold;
    SelfCheckOptions selfcheck;

    auto* s_phase = app.add_subcommand("phase", "Noiseless exact-recovery sweep over K");
    add_common(s_phase, common, true);
    add_ensemble(s_phase, phase.e, 100);
    s_phase->add_option("--K", phase.K, "Sparsity range start:stop:step")->capture_default_str();

    auto* s_path = app.add_subcommand("noisy-path", "Noisy residual versus assumed sparsity");
    add_common(s_path, common, true);
    add_ensemble(s_path, path.e, 50);
    s_path->add_option("--K", path.K_true, "True sparsity")->capture_default_str();
    s_path->add_option("--k", path.k, "Assumed sparsity range start:stop:step")
        ->capture_default_str();
    s_path->add_option("--noise", path.noise, "Noise standard deviation")->capture_default_str();

    auto* s_complete = app.add_subcommand("complete", "Low-rank completion benchmark");
    add_common(s_complete, common, true);
    s_complete->add_option("--N", complete.N, "Matrix size")->capture_default_str();
    s_complete->add_option("--rank", complete.rank, "True rank")->capture_default_str();
    s_complete->add_option("--obs", complete.obs, "Observed fraction")->capture_default_str();
    s_complete->add_option("--trials", complete.trials, "Trials")->capture_default_str();
    s_complete->add_option("--iters", complete.iters, "Iterations")->capture_default_str();

    auto* s_threshold = app.add_subcommand("threshold", "Apply one scalar thresholding operator");
    s_threshold->add_option("--kind", threshold.kind, "soft, hard or log")->required();
    s_threshold->add_option("--x", threshold.x, "Input value")->required();
    s_threshold->add_option("--lambda", threshold.lambda, "Threshold parameter")->required();
    s_threshold->add_option("--delta", threshold.delta, "Log offset delta")->capture_default_str();

    auto* s_selfcheck = app.add_subcommand("selfcheck", "Run the built-in invariant suites");
    s_selfcheck->add_option("--suite", selfcheck.suite, "Suite name or 'all'")->capture_default_str();
    s_selfcheck->add_option("--trials", selfcheck.trials, "Trials per suite (0 = suite default)")
        ->capture_default_str();
    s_selfcheck->add_option("--seed", selfcheck.seed, "Seed")->capture_default_str();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kExitOk : kExitUsage;
    }

    try {
        if (*s_phase) return cmd_phase(phase, common, out);
        if (*s_path) return cmd_noisy_path(path, common, out);
        if (*s_complete) return cmd_complete(complete, common, out);
        if (*s_threshold) return cmd_threshold(threshold, out);
        if (*s_selfcheck) return cmd_selfcheck(selfcheck, out);
    } catch (const std::invalid_argument& e) {
        err << "error: " << e.what() << '\n';
        return kExitUsage;
    } catch (const std::exception& e) {
        err << "failure: " << e.what() << '\n';
        return kExitFailure;
    }
    return kExitUsage;
}

}  // namespace logshrink::cli
