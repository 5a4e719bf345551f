// Command-line front end: generate sampled instances, estimate parameters
// from weight or count matrices, run recovery experiments, and validate
// the convergence diagnostics on a given input.
//
// Exit codes: 0 success, 2 usage, 3 invalid input or failed validation,
// 4 non-convergence, 5 I/O failure.

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <iostream>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "betagraph/errors.hpp"
#include "betagraph/estimator.hpp"
#include "betagraph/generator.hpp"
#include "betagraph/ingest.hpp"
#include "betagraph/model.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 2;
constexpr int kExitInvalid = 3;
constexpr int kExitNoConvergence = 4;
constexpr int kExitIo = 5;

std::string fmt(double v) { return betagraph::detail::format_double(v); }

struct GenerateOptions {
    std::size_t n = 0;
    double param_low = 1.0;
    double param_high = 5.0;
    std::uint64_t seed = 0;
    std::string out_matrix;
    std::string out_params;
};

struct EstimateOptions {
    std::string input;
    betagraph::MatrixFormat format = betagraph::MatrixFormat::weights;
    double tol = 1e-10;
    std::size_t max_iters = 100000;
    std::string out;
};

struct ExperimentOptions {
    std::size_t n = 0;
    double param_low = 1.0;
    double param_high = 5.0;
    std::size_t seeds = 10;
    std::string out;
};

struct ValidateOptions {
    std::string input;
    betagraph::MatrixFormat format = betagraph::MatrixFormat::weights;
};

// Loads the input and, for counts, normalizes into edge weights. Returns
// the weight matrix plus any labels; warnings go to stderr.
std::pair<betagraph::EdgeWeightMatrix, std::vector<std::string>> load_weights(
    const std::string& path, betagraph::MatrixFormat format) {
    betagraph::LoadedMatrix loaded = betagraph::load_matrix(path, format);
    for (const std::string& w : loaded.warnings) std::cerr << "warning: " << w << "\n";
    if (format == betagraph::MatrixFormat::counts)
        return {betagraph::normalize_counts(*loaded.counts), loaded.labels};
    return {std::move(*loaded.weights), loaded.labels};
}

int cmd_generate(const GenerateOptions& opt) {
    betagraph::GeneratorConfig cfg{opt.n, opt.param_low, opt.param_high, opt.seed};
    betagraph::detail::require_generator_config(cfg);
    betagraph::Rng rng(cfg.seed);
    const betagraph::ParamVector truth = betagraph::sample_true_params(cfg, rng);
    const betagraph::EdgeWeightMatrix w = betagraph::generate_graph(truth.a, truth.b, rng);
    betagraph::save_weight_matrix(opt.out_matrix, w);
    betagraph::write_params_document(opt.out_params, truth);
    std::cout << "generated " << opt.n << "x" << opt.n << " weight matrix (seed " << opt.seed
              << ") -> " << opt.out_matrix << ", true parameters -> " << opt.out_params << "\n";
    return kExitOk;
}

int cmd_estimate(const EstimateOptions& opt) {
    const auto [w, labels] = load_weights(opt.input, opt.format);
    betagraph::EstimatorConfig cfg;
    cfg.tol = opt.tol;
    cfg.max_iters = opt.max_iters;
    const betagraph::EstimationReport report =
        betagraph::estimate(betagraph::sufficient_stats(w), cfg);
    betagraph::write_params_document(opt.out, report.theta_hat, labels, &report);
    std::cout << "converged in " << report.iterations << " iterations, final residual "
              << fmt(report.final_residual) << ", contraction norm " << fmt(report.jacobian_l1)
              << " -> " << opt.out << "\n";
    return kExitOk;
}

int cmd_experiment(const ExperimentOptions& opt) {
    betagraph::detail::require_generator_config(
        {opt.n, opt.param_low, opt.param_high, 0});
    if (opt.seeds < 1) throw betagraph::DomainError("experiment: need at least one seed");

    std::ostringstream out;
    std::vector<double> ok_mse_a, ok_mse_b;
    std::size_t failed = 0;
    for (std::uint64_t seed = 1; seed <= opt.seeds; ++seed) {
        betagraph::GeneratorConfig cfg{opt.n, opt.param_low, opt.param_high, seed};
        try {
            const betagraph::RecoveryResult r = betagraph::recovery_experiment(cfg);
            out << "# seed " << seed << ": mse_a " << fmt(r.mse_a) << " mse_b " << fmt(r.mse_b)
                << " iterations " << r.report.iterations << "\n";
            out << "# a_true a_hat\n";
            for (std::size_t i = 0; i < opt.n; ++i)
                out << fmt(r.truth.a[i]) << " " << fmt(r.report.theta_hat.a[i]) << "\n";
            out << "# b_true b_hat\n";
            for (std::size_t i = 0; i < opt.n; ++i)
                out << fmt(r.truth.b[i]) << " " << fmt(r.report.theta_hat.b[i]) << "\n";
            ok_mse_a.push_back(r.mse_a);
            ok_mse_b.push_back(r.mse_b);
            std::cout << "seed " << seed << ": mse_a " << fmt(r.mse_a) << ", mse_b "
                      << fmt(r.mse_b) << " (" << r.report.iterations << " iterations)\n";
        } catch (const betagraph::EstimationError& err) {
            ++failed;
            out << "# seed " << seed << ": failed: " << err.what() << "\n";
            std::cerr << "seed " << seed << " failed: " << err.what() << "\n";
        }
    }

    auto median = [](std::vector<double> v) {
        std::sort(v.begin(), v.end());
        const std::size_t m = v.size() / 2;
        return v.size() % 2 ? v[m] : 0.5 * (v[m - 1] + v[m]);
    };
    if (!ok_mse_a.empty()) {
        out << "# summary: median_mse_a " << fmt(median(ok_mse_a)) << " median_mse_b "
            << fmt(median(ok_mse_b)) << " succeeded " << ok_mse_a.size() << " failed " << failed
            << "\n";
        std::cout << "median mse_a " << fmt(median(ok_mse_a)) << ", median mse_b "
                  << fmt(median(ok_mse_b)) << " over " << ok_mse_a.size() << " of " << opt.seeds
                  << " seeds\n";
    } else {
        out << "# summary: succeeded 0 failed " << failed << "\n";
        std::cerr << "all " << opt.seeds << " seeds failed to converge\n";
    }
    betagraph::detail::write_file_atomically(opt.out, out.str());
    return ok_mse_a.empty() ? kExitNoConvergence : kExitOk;
}

int cmd_validate(const ValidateOptions& opt) {
    const auto [w, labels] = load_weights(opt.input, opt.format);
    const betagraph::SufficientStats stats = betagraph::sufficient_stats(w);

    std::size_t failures = 0;
    const auto check = [&](const char* name, const std::string& value, bool pass) {
        std::cout << name << " " << value << (pass ? " pass" : " FAIL") << "\n";
        if (!pass) {
            ++failures;
            std::cerr << "check failed: " << name << " = " << value << "\n";
        }
    };

    const double margin = betagraph::stats_bound_margin(stats);
    check("statistic_bound_margin", fmt(margin), betagraph::check_stats_bound(stats));
    const double m = betagraph::compute_M(stats);
    check("M", fmt(m), m > std::numbers::ln2);

    const betagraph::EstimationReport report = betagraph::estimate(stats);
    std::cout << "epsilon " << fmt(report.epsilon) << "\n";
    std::cout << "iterations " << report.iterations << "\n";
    check("converged", report.converged ? "true" : "false", report.converged);
    check("monotone", report.monotone ? "true" : "false", report.monotone);
    check("final_residual", fmt(report.final_residual), report.final_residual <= 1e-8);
    check("jacobian_l1", fmt(report.jacobian_l1), report.jacobian_l1 < 1.0);

    if (failures > 0) {
        std::cerr << failures << " check(s) failed\n";
        return kExitInvalid;
    }
    std::cout << "all checks passed\n";
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Maximum-likelihood estimation for directed graphs with beta-distributed "
                 "edge weights"};
    app.require_subcommand(1);

    const std::map<std::string, betagraph::MatrixFormat> format_names{
        {"weights", betagraph::MatrixFormat::weights},
        {"counts", betagraph::MatrixFormat::counts}};

    GenerateOptions gen;
    auto* cmd_gen = app.add_subcommand("generate", "Sample a weight matrix from random true "
                                                   "parameters and write both to files");
    cmd_gen->add_option("--n", gen.n, "vertex count (>= 2)")
        ->required()
        ->check(CLI::Range(std::size_t{2}, std::size_t{100000}));
    cmd_gen->add_option("--param-low", gen.param_low, "lower end of the true-parameter range")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    cmd_gen->add_option("--param-high", gen.param_high, "upper end of the true-parameter range")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    cmd_gen->add_option("--seed", gen.seed, "rng seed")->capture_default_str();
    cmd_gen->add_option("--out-matrix", gen.out_matrix, "weights CSV destination")->required();
    cmd_gen->add_option("--out-params", gen.out_params, "true-parameter document destination")
        ->required();

    EstimateOptions est;
    auto* cmd_est = app.add_subcommand("estimate", "Estimate parameters from a matrix file");
    cmd_est->add_option("--input", est.input, "matrix CSV to read")->required();
    cmd_est
        ->add_option("--format", est.format,
                     "input interpretation: weights in (0,1) or raw nonnegative counts")
        ->transform(CLI::CheckedTransformer(format_names, CLI::ignore_case))
        ->capture_default_str();
    cmd_est->add_option("--tol", est.tol, "stopping threshold on the parameter change")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    cmd_est->add_option("--max-iters", est.max_iters, "iteration budget")
        ->check(CLI::Range(std::size_t{1}, std::size_t{1000000000}))
        ->capture_default_str();
    cmd_est->add_option("--out", est.out, "parameter document destination")->required();

    ExperimentOptions exp;
    auto* cmd_exp = app.add_subcommand("experiment", "Recovery experiment over consecutive "
                                                     "seeds; writes plot-ready scatter data");
    cmd_exp->add_option("--n", exp.n, "vertex count (>= 2)")
        ->required()
        ->check(CLI::Range(std::size_t{2}, std::size_t{100000}));
    cmd_exp->add_option("--param-low", exp.param_low, "lower end of the true-parameter range")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    cmd_exp->add_option("--param-high", exp.param_high, "upper end of the true-parameter range")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    cmd_exp->add_option("--seeds", exp.seeds, "number of seeds (runs seeds 1..N)")
        ->check(CLI::Range(std::size_t{1}, std::size_t{100000}))
        ->capture_default_str();
    cmd_exp->add_option("--out", exp.out, "experiment data destination")->required();

    ValidateOptions val;
    auto* cmd_val = app.add_subcommand("validate", "Estimate and check every convergence "
                                                   "diagnostic on a matrix file");
    cmd_val->add_option("--input", val.input, "matrix CSV to read")->required();
    cmd_val
        ->add_option("--format", val.format,
                     "input interpretation: weights in (0,1) or raw nonnegative counts")
        ->transform(CLI::CheckedTransformer(format_names, CLI::ignore_case))
        ->capture_default_str();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kExitOk : kExitUsage;
    }

    try {
        if (*cmd_gen) return cmd_generate(gen);
        if (*cmd_est) return cmd_estimate(est);
        if (*cmd_exp) return cmd_experiment(exp);
        return cmd_validate(val);
    } catch (const betagraph::EstimationError& err) {
        std::cerr << "error: " << err.what() << "\n";
        return kExitNoConvergence;
    } catch (const betagraph::NumericError& err) {
        std::cerr << "error: " << err.what() << "\n";
        return kExitNoConvergence;
    } catch (const betagraph::IoError& err) {
        std::cerr << "error: " << err.what() << "\n";
        return kExitIo;
    } catch (const betagraph::ParseError& err) {
        std::cerr << "error: " << err.what() << "\n";
        return kExitInvalid;
    } catch (const std::invalid_argument& err) {  // ValidationError
        std::cerr << "error: " << err.what() << "\n";
        return kExitInvalid;
    } catch (const std::domain_error& err) {  // DomainError, degenerate input
        std::cerr << "error: " << err.what() << "\n";
        return kExitInvalid;
    }
}
