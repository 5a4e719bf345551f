#pragma once

// Fixed-point ML estimator. The likelihood equations are rewritten as
// theta = f(theta) with coordinates
//   g_i(a,b) = psi^{-1}[ (R_i + sum_{j != i} psi(a_i + b_j)) / (n-1) ]
//   h_j(a,b) = psi^{-1}[ (C_j + sum_{i != j} psi(a_i + b_j)) / (n-1) ]
// and iterated synchronously from theta0 = epsilon * 1, where epsilon
// solves psi(2x) - psi(x) = M and M is the largest scaled negated
// statistic. Started there, the trajectory is componentwise nondecreasing,
// bounded above by the solution, and converges geometrically.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "betagraph/errors.hpp"
#include "betagraph/model.hpp"
#include "betagraph/special_functions.hpp"

namespace betagraph {

struct EstimatorConfig {
    double tol = 1e-10;           // sup-norm threshold on the parameter change
    double residual_tol = 1e-8;   // sup-norm threshold on the ML-equation residual
    std::size_t max_iters = 100000;
    bool record_trace = false;
};

struct EstimationReport {
    ParamVector theta_hat;
    std::size_t iterations = 0;
    double final_step = std::numeric_limits<double>::infinity();
    double final_residual = std::numeric_limits<double>::infinity();
    double jacobian_l1 = std::numeric_limits<double>::quiet_NaN();
    bool converged = false;
    bool monotone = true;     // no iterate ever dipped below its predecessor
    double epsilon = 0.0;     // starting value, solution of psi(2x)-psi(x) = M
    double M = 0.0;
    std::vector<double> trace;  // per-iteration sup-norm changes, if recorded
};

// Iteration left the trusted region: either max_iters ran out or a
// parameter blew past the overflow cap. Carries whatever was computed.
class EstimationError : public std::runtime_error {
public:
    EstimationError(const std::string& what_arg, EstimationReport partial)
        : std::runtime_error(what_arg), report_(std::move(partial)) {}

    const EstimationReport& partial_report() const noexcept { return report_; }

private:
    EstimationReport report_;
};

class ConvergenceError : public EstimationError {
public:
    using EstimationError::EstimationError;
};

class DivergenceError : public EstimationError {
public:
    using EstimationError::EstimationError;
};

// M = max_i { -R_i/(n-1), -C_i/(n-1) }. Always >= ln 2; equality only for
// degenerate data (every weight exactly 1/2).
inline double compute_M(const SufficientStats& stats) {
    const std::size_t n = stats.size();
    if (n < 2 || stats.C.size() != n)
        throw DomainError("compute_M: malformed statistics");
    const double nm1 = static_cast<double>(n - 1);
    double m = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < n; ++i)
        m = std::max({m, -stats.R[i] / nm1, -stats.C[i] / nm1});
    return m;
}

// theta0 = epsilon * 1. A componentwise lower bound on the solution.
inline ParamVector init_params(const SufficientStats& stats) {
    const double eps = solve_epsilon(compute_M(stats));
    const std::size_t n = stats.size();
    return ParamVector{std::vector<double>(n, eps), std::vector<double>(n, eps)};
}

// One synchronous application of f: every psi(a_i + b_j) on the right side
// is evaluated at the incoming theta, never at partially updated values.
inline ParamVector iterate_step(const ParamVector& theta, const SufficientStats& stats) {
    detail::require_params(theta, "iterate_step");
    detail::require_same_size(stats, theta, "iterate_step");
    const std::size_t n = theta.size();
    const double nm1 = static_cast<double>(n - 1);
    auto [row, col] = detail::cross_digamma_sums(theta.a, theta.b);
    ParamVector next{std::vector<double>(n), std::vector<double>(n)};
    for (std::size_t i = 0; i < n; ++i) {
        next.a[i] = inverse_digamma((stats.R[i] + row[i]) / nm1);
        next.b[i] = inverse_digamma((stats.C[i] + col[i]) / nm1);
    }
    return next;
}

// Column sums of the iteration Jacobian at a solution, in closed form:
//   col_j     = (1/(n-1)) sum_{s != j} psi'(a_j + b_s) [1/psi'(a_j) + 1/psi'(b_s)]
//   col_{n+j} = (1/(n-1)) sum_{s != j} psi'(a_s + b_j) [1/psi'(a_s) + 1/psi'(b_j)]
// returned as 2n values, a-columns first. Every Jacobian entry is
// nonnegative, so these are also the columns' L1 masses. The closed form
// substitutes the ML equation, so the values are meaningful only when
// theta_hat actually solves it.
inline std::vector<double> jacobian_column_sums(const ParamVector& theta_hat) {
    detail::require_params(theta_hat, "jacobian_column_sums");
    const std::size_t n = theta_hat.size();
    const double nm1 = static_cast<double>(n - 1);
    std::vector<double> inv_tri_a(n), inv_tri_b(n);
    for (std::size_t i = 0; i < n; ++i) {
        inv_tri_a[i] = 1.0 / trigamma(theta_hat.a[i]);
        inv_tri_b[i] = 1.0 / trigamma(theta_hat.b[i]);
    }
    std::vector<double> cols(2 * n, 0.0);
    for (std::size_t j = 0; j < n; ++j) {
        for (std::size_t s = 0; s < n; ++s) {
            if (s == j) continue;
            cols[j] += trigamma(theta_hat.a[j] + theta_hat.b[s]) * (inv_tri_a[j] + inv_tri_b[s]);
            cols[n + j] += trigamma(theta_hat.a[s] + theta_hat.b[j]) * (inv_tri_a[s] + inv_tri_b[j]);
        }
    }
    for (double& c : cols) c /= nm1;
    return cols;
}

// Superadditivity of 1/psi' makes every summand above < 1, so each column
// sums below 1: the iteration contracts at the solution.
inline double jacobian_l1_norm(const ParamVector& theta_hat) {
    double norm = 0.0;
    for (double c : jacobian_column_sums(theta_hat)) norm = std::max(norm, c);
    return norm;
}

namespace detail {

inline double sup_norm_change(const ParamVector& x, const ParamVector& y) {
    double d = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        d = std::max(d, std::abs(x.a[i] - y.a[i]));
        d = std::max(d, std::abs(x.b[i] - y.b[i]));
    }
    return d;
}

inline double sup_norm_residual(const SufficientStats& stats, const ParamVector& theta) {
    auto [ra, rb] = ml_residuals(stats, theta);
    double r = 0.0;
    for (double v : ra) r = std::max(r, std::abs(v));
    for (double v : rb) r = std::max(r, std::abs(v));
    return r;
}

// Coordinate dips below roughly solver precision do not count as
// monotonicity violations.
inline bool step_is_nondecreasing(const ParamVector& prev, const ParamVector& next) {
    for (std::size_t i = 0; i < prev.size(); ++i) {
        if (next.a[i] < prev.a[i] - 1e-12 * (1.0 + prev.a[i])) return false;
        if (next.b[i] < prev.b[i] - 1e-12 * (1.0 + prev.b[i])) return false;
    }
    return true;
}

}  // namespace detail

// Runs theta <- f(theta) from epsilon * 1 until the sup-norm change drops
// to cfg.tol and the ML residual to cfg.residual_tol. Deterministic: the
// same statistics and configuration produce an identical report.
//
// Throws DegenerateStatisticError when M <= ln 2 (no starting point),
// ConvergenceError when max_iters runs out, and DivergenceError when a
// parameter exceeds 1e8 (unreachable for statistics that came from a real
// matrix; signals corrupted input).
inline EstimationReport estimate(const SufficientStats& stats, const EstimatorConfig& cfg = {}) {
    if (!(cfg.tol > 0.0) || !(cfg.residual_tol > 0.0) || cfg.max_iters < 1)
        throw DomainError("estimate: config requires tol > 0, residual_tol > 0, max_iters >= 1");
    constexpr double param_cap = 1e8;

    EstimationReport report;
    report.M = compute_M(stats);
    report.epsilon = solve_epsilon(report.M);
    const std::size_t n = stats.size();
    ParamVector theta{std::vector<double>(n, report.epsilon),
                      std::vector<double>(n, report.epsilon)};

    for (std::size_t it = 1; it <= cfg.max_iters; ++it) {
        ParamVector next = iterate_step(theta, stats);

        for (std::size_t i = 0; i < n; ++i) {
            if (next.a[i] > param_cap || next.b[i] > param_cap) {
                report.theta_hat = std::move(next);
                report.iterations = it;
                throw DivergenceError(
                    "estimate: parameter exceeded " + std::to_string(param_cap) +
                        " at iteration " + std::to_string(it) +
                        "; the statistics do not admit a finite estimate",
                    std::move(report));
            }
        }
        if (!detail::step_is_nondecreasing(theta, next)) report.monotone = false;

        const double step = detail::sup_norm_change(next, theta);
        if (cfg.record_trace) report.trace.push_back(step);
        theta = std::move(next);
        report.iterations = it;
        report.final_step = step;

        if (step <= cfg.tol) {
            const double residual = detail::sup_norm_residual(stats, theta);
            report.final_residual = residual;
            if (residual <= cfg.residual_tol) {
                report.theta_hat = std::move(theta);
                report.converged = true;
                report.jacobian_l1 = jacobian_l1_norm(report.theta_hat);
                return report;
            }
        }
    }

    report.final_residual = detail::sup_norm_residual(stats, theta);
    report.jacobian_l1 = jacobian_l1_norm(theta);
    report.theta_hat = std::move(theta);
    throw ConvergenceError("estimate: no convergence within " + std::to_string(cfg.max_iters) +
                               " iterations (last step " + std::to_string(report.final_step) +
                               ", residual " + std::to_string(report.final_residual) + ")",
                           std::move(report));
}

}  // namespace betagraph
