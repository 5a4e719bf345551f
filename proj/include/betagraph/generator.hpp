#pragma once

// Seeded sampling of model instances. The rng is fixed as std::mt19937_64
// so that a stream is reproducible bit-for-bit from its seed; a
// reimplementation in another language reproduces the same matrices only
// if it adopts the same generator and the same draw order (row-major over
// i != j, a-gamma before b-gamma per edge).

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <numbers>
#include <random>
#include <utility>
#include <vector>

#include "betagraph/errors.hpp"
#include "betagraph/estimator.hpp"
#include "betagraph/model.hpp"
#include "betagraph/special_functions.hpp"

namespace betagraph {

using Rng = std::mt19937_64;

struct GeneratorConfig {
    std::size_t n = 2;
    double param_low = 1.0;   // true parameters drawn uniformly from [param_low, param_high]
    double param_high = 5.0;
    std::uint64_t seed = 0;
};

namespace detail {

inline void require_generator_config(const GeneratorConfig& cfg) {
    if (cfg.n < 2)
        throw DomainError("generator: vertex count must be at least 2");
    if (!std::isfinite(cfg.param_low) || !std::isfinite(cfg.param_high) ||
        !(cfg.param_low > 0.0) || !(cfg.param_low <= cfg.param_high))
        throw DomainError("generator: parameter range requires 0 < low <= high");
}

}  // namespace detail

// Uniform draw in (0,1): top 53 bits of the 64-bit word, zeros redrawn.
inline double uniform_unit(Rng& rng) {
    for (;;) {
        const double u = static_cast<double>(rng() >> 11) * 0x1.0p-53;
        if (u > 0.0) return u;
    }
}

// Standard normal via Box-Muller (cosine half only, kept for portability
// of the draw sequence).
inline double normal_unit(Rng& rng) {
    const double u1 = uniform_unit(rng);
    const double u2 = uniform_unit(rng);
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

// Gamma(shape, 1) via the Marsaglia-Tsang squeeze; shape < 1 is boosted
// through Gamma(shape+1) and a power of a uniform.
inline double sample_gamma(double shape, Rng& rng) {
    detail::require_positive(shape, "sample_gamma: shape");
    if (shape < 1.0)
        return sample_gamma(shape + 1.0, rng) * std::pow(uniform_unit(rng), 1.0 / shape);
    const double d = shape - 1.0 / 3.0;
    const double c = 1.0 / std::sqrt(9.0 * d);
    for (;;) {
        double x, v;
        do {
            x = normal_unit(rng);
            v = 1.0 + c * x;
        } while (v <= 0.0);
        v = v * v * v;
        const double u = uniform_unit(rng);
        if (u < 1.0 - 0.0331 * x * x * x * x) return d * v;
        if (std::log(u) < 0.5 * x * x + d * (1.0 - v + std::log(v))) return d * v;
    }
}

// One beta(a,b) draw as x/(x+y) from two gammas; draws landing on either
// boundary in floating point are rejected and redrawn.
inline double sample_beta(double a, double b, Rng& rng) {
    detail::require_positive(a, "sample_beta: a");
    detail::require_positive(b, "sample_beta: b");
    for (;;) {
        const double x = sample_gamma(a, rng);
        const double y = sample_gamma(b, rng);
        if (x + y > 0.0) {
            const double w = x / (x + y);
            if (w > 0.0 && w < 1.0) return w;
        }
    }
}

inline EdgeWeightMatrix generate_graph(const std::vector<double>& a, const std::vector<double>& b,
                                       Rng& rng) {
    detail::require_params(ParamVector{a, b}, "generate_graph");
    const std::size_t n = a.size();
    std::vector<double> w(n * n, 0.0);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j)
            if (i != j) w[i * n + j] = sample_beta(a[i], b[j], rng);
    return EdgeWeightMatrix::from_entries(n, std::move(w));
}

inline EdgeWeightMatrix generate_graph(const std::vector<double>& a, const std::vector<double>& b,
                                       std::uint64_t seed) {
    Rng rng(seed);
    return generate_graph(a, b, rng);
}

// True parameters for a recovery run: all a_i first, then all b_i.
inline ParamVector sample_true_params(const GeneratorConfig& cfg, Rng& rng) {
    detail::require_generator_config(cfg);
    const double span = cfg.param_high - cfg.param_low;
    ParamVector theta{std::vector<double>(cfg.n), std::vector<double>(cfg.n)};
    for (std::size_t i = 0; i < cfg.n; ++i) theta.a[i] = cfg.param_low + span * uniform_unit(rng);
    for (std::size_t i = 0; i < cfg.n; ++i) theta.b[i] = cfg.param_low + span * uniform_unit(rng);
    return theta;
}

struct RecoveryResult {
    ParamVector truth;
    EstimationReport report;
    double mse_a = 0.0;  // (1/n) sum (a_hat_i - a_i)^2
    double mse_b = 0.0;
};

// Draw a truth, generate one graph from it, re-estimate, and score. One
// rng stream drives the whole run, so the result is a pure function of
// (config, est_config). Estimation failures propagate with their partial
// report attached.
inline RecoveryResult recovery_experiment(const GeneratorConfig& cfg,
                                          const EstimatorConfig& est_cfg = {}) {
    detail::require_generator_config(cfg);
    Rng rng(cfg.seed);
    RecoveryResult result;
    result.truth = sample_true_params(cfg, rng);
    const EdgeWeightMatrix w = generate_graph(result.truth.a, result.truth.b, rng);
    result.report = estimate(sufficient_stats(w), est_cfg);
    const std::size_t n = cfg.n;
    for (std::size_t i = 0; i < n; ++i) {
        const double da = result.report.theta_hat.a[i] - result.truth.a[i];
        const double db = result.report.theta_hat.b[i] - result.truth.b[i];
        result.mse_a += da * da / static_cast<double>(n);
        result.mse_b += db * db / static_cast<double>(n);
    }
    return result;
}

}  // namespace betagraph
