#pragma once

// The probabilistic model: a directed graph on n >= 2 vertices whose i->j
// edge weight is beta(a_i, b_j)-distributed. The likelihood depends on the
// observed matrix W only through the row sums R of ln w_ij and the column
// sums C of ln(1 - w_ij), so everything downstream of sufficient_stats()
// takes (R, C) and never sees W again.

#include <cmath>
#include <cstddef>
#include <numbers>
#include <string>
#include <utility>
#include <vector>

#include "betagraph/errors.hpp"
#include "betagraph/special_functions.hpp"

namespace betagraph {

// Dense n x n edge-weight matrix with zero diagonal and every off-diagonal
// entry strictly inside (0,1). Construction validates; instances are
// immutable afterwards.
class EdgeWeightMatrix {
public:
    static EdgeWeightMatrix from_entries(std::size_t n, std::vector<double> row_major) {
        if (n < 2)
            throw ValidationError("edge-weight matrix needs n >= 2 vertices, got n = " +
                                  std::to_string(n));
        if (row_major.size() != n * n)
            throw ValidationError("edge-weight matrix storage has " +
                                  std::to_string(row_major.size()) + " entries, expected " +
                                  std::to_string(n * n));
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t j = 0; j < n; ++j) {
                const double w = row_major[i * n + j];
                if (i == j) {
                    if (w != 0.0)
                        throw ValidationError("diagonal entry (" + std::to_string(i) + "," +
                                                  std::to_string(j) + ") = " + std::to_string(w) +
                                                  " must be 0",
                                              static_cast<std::ptrdiff_t>(i),
                                              static_cast<std::ptrdiff_t>(j));
                } else if (!(w > 0.0 && w < 1.0)) {
                    throw ValidationError("off-diagonal entry (" + std::to_string(i) + "," +
                                              std::to_string(j) + ") = " + std::to_string(w) +
                                              " must lie strictly inside (0,1)",
                                          static_cast<std::ptrdiff_t>(i),
                                          static_cast<std::ptrdiff_t>(j));
                }
            }
        }
        return EdgeWeightMatrix(n, std::move(row_major));
    }

    std::size_t size() const noexcept { return n_; }

    double operator()(std::size_t i, std::size_t j) const { return w_[i * n_ + j]; }

    const std::vector<double>& entries() const noexcept { return w_; }

private:
    EdgeWeightMatrix(std::size_t n, std::vector<double> w) : n_(n), w_(std::move(w)) {}

    std::size_t n_;
    std::vector<double> w_;
};

// Canonical sufficient statistic t = (R, C):
//   R_i = sum_{j != i} ln w_ij      (row sums of the log-weight matrix)
//   C_j = sum_{i != j} ln(1 - w_ij) (column sums of the log-complement matrix)
// Every component is negative.
struct SufficientStats {
    std::vector<double> R;
    std::vector<double> C;

    std::size_t size() const noexcept { return R.size(); }
};

// theta = (a, b): per-vertex out-parameters a_i and in-parameters b_j, all > 0.
// a_i shapes the weights of edges leaving i, b_j the weights entering j.
struct ParamVector {
    std::vector<double> a;
    std::vector<double> b;

    std::size_t size() const noexcept { return a.size(); }
};

// Image of theta under the gradient map; components are negative.
struct MeanParams {
    std::vector<double> A;
    std::vector<double> B;
};

namespace detail {

inline void require_params(const ParamVector& theta, const char* fn) {
    if (theta.a.size() != theta.b.size() || theta.a.size() < 2)
        throw DomainError(std::string(fn) + ": parameter vectors must have equal length >= 2");
    for (double v : theta.a)
        if (!std::isfinite(v) || v <= 0.0)
            throw DomainError(std::string(fn) + ": all parameters must be finite and > 0");
    for (double v : theta.b)
        if (!std::isfinite(v) || v <= 0.0)
            throw DomainError(std::string(fn) + ": all parameters must be finite and > 0");
}

inline void require_same_size(const SufficientStats& stats, const ParamVector& theta,
                              const char* fn) {
    if (stats.R.size() != stats.C.size())
        throw DomainError(std::string(fn) + ": statistic vectors must have equal length");
    if (stats.size() != theta.size())
        throw DomainError(std::string(fn) + ": statistic and parameter sizes differ");
}

// row_i = sum_{j != i} psi(a_i + b_j), col_j = sum_{i != j} psi(a_i + b_j).
// Shared by the gradient, the mean map, and the fixed-point step.
inline std::pair<std::vector<double>, std::vector<double>>
cross_digamma_sums(const std::vector<double>& a, const std::vector<double>& b) {
    const std::size_t n = a.size();
    std::vector<double> row(n, 0.0), col(n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            if (i == j) continue;
            const double v = digamma(a[i] + b[j]);
            row[i] += v;
            col[j] += v;
        }
    }
    return {std::move(row), std::move(col)};
}

}  // namespace detail

inline SufficientStats sufficient_stats(const EdgeWeightMatrix& w) {
    const std::size_t n = w.size();
    SufficientStats stats{std::vector<double>(n, 0.0), std::vector<double>(n, 0.0)};
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            if (i == j) continue;
            stats.R[i] += std::log(w(i, j));
            stats.C[j] += std::log1p(-w(i, j));
        }
    }
    return stats;
}

// ln L(theta) = sum_{i != j} [ln G(a_i + b_j) - ln G(a_i) - ln G(b_j)]
//             + sum_i (a_i - 1) R_i + sum_j (b_j - 1) C_j
inline double log_likelihood(const SufficientStats& stats, const ParamVector& theta) {
    detail::require_params(theta, "log_likelihood");
    detail::require_same_size(stats, theta, "log_likelihood");
    const std::size_t n = theta.size();
    double ll = 0.0;
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j)
            if (i != j) ll += log_gamma(theta.a[i] + theta.b[j]);
    const double nm1 = static_cast<double>(n - 1);
    for (std::size_t i = 0; i < n; ++i) {
        ll -= nm1 * log_gamma(theta.a[i]);
        ll -= nm1 * log_gamma(theta.b[i]);
        ll += (theta.a[i] - 1.0) * stats.R[i];
        ll += (theta.b[i] - 1.0) * stats.C[i];
    }
    return ll;
}

// Gradient of ln L, written so that theta solves the ML equation iff both
// vectors vanish:
//   rho_a[i] = sum_{j != i} psi(a_i + b_j) - (n-1) psi(a_i) + R_i
//   rho_b[j] = sum_{i != j} psi(a_i + b_j) - (n-1) psi(b_j) + C_j
inline std::pair<std::vector<double>, std::vector<double>>
ml_residuals(const SufficientStats& stats, const ParamVector& theta) {
    detail::require_params(theta, "ml_residuals");
    detail::require_same_size(stats, theta, "ml_residuals");
    const std::size_t n = theta.size();
    auto [row, col] = detail::cross_digamma_sums(theta.a, theta.b);
    const double nm1 = static_cast<double>(n - 1);
    for (std::size_t i = 0; i < n; ++i) {
        row[i] += stats.R[i] - nm1 * digamma(theta.a[i]);
        col[i] += stats.C[i] - nm1 * digamma(theta.b[i]);
    }
    return {std::move(row), std::move(col)};
}

// A_i = -sum_{j != i} [psi(a_i + b_j) - psi(a_i)], B_j likewise with psi(b_j).
// Equals the expected sufficient statistic under theta, so
// ml_residuals({A, B}, theta) vanishes identically.
inline MeanParams mean_map(const ParamVector& theta) {
    detail::require_params(theta, "mean_map");
    const std::size_t n = theta.size();
    auto [row, col] = detail::cross_digamma_sums(theta.a, theta.b);
    MeanParams mean{std::vector<double>(n), std::vector<double>(n)};
    const double nm1 = static_cast<double>(n - 1);
    for (std::size_t i = 0; i < n; ++i) {
        mean.A[i] = nm1 * digamma(theta.a[i]) - row[i];
        mean.B[i] = nm1 * digamma(theta.b[i]) - col[i];
    }
    return mean;
}

// Margin of the bound
//   sum_i R_i + sum_j C_j <= -2 ln 2 * n(n-1),
// with equality exactly for the all-1/2 matrix. Returns bound minus sum,
// so valid statistics give a nonnegative value up to accumulated rounding.
inline double stats_bound_margin(const SufficientStats& stats) {
    const std::size_t n = stats.size();
    if (n < 2 || stats.C.size() != n)
        throw DomainError("stats_bound_margin: malformed statistics");
    double total = 0.0;
    for (std::size_t i = 0; i < n; ++i) total += stats.R[i] + stats.C[i];
    const double bound =
        -2.0 * std::numbers::ln2 * static_cast<double>(n) * static_cast<double>(n - 1);
    return bound - total;
}

inline bool check_stats_bound(const SufficientStats& stats) {
    const double margin = stats_bound_margin(stats);
    const std::size_t n = stats.size();
    const double slack =
        1e-9 * std::max(1.0, 2.0 * std::numbers::ln2 * static_cast<double>(n * (n - 1)));
    return margin >= -slack;
}

}  // namespace betagraph
