#pragma once

// Real-valued special functions on (0, inf): digamma, trigamma, log-gamma,
// the inverse of digamma, and the solver for psi(2x) - psi(x) = M.
//
// All of digamma/trigamma/log_gamma use the same construction: upward
// recurrence to shift the argument above a fixed threshold, then an
// asymptotic series in 1/x^2 with enough Bernoulli terms that the
// truncation error stays below 1e-13 at the threshold.

#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "betagraph/errors.hpp"

namespace betagraph {

namespace detail {

inline void require_positive(double x, const char* fn) {
    if (!std::isfinite(x) || x <= 0.0)
        throw DomainError(std::string(fn) + ": argument must be finite and > 0, got " +
                          std::to_string(x));
}

}  // namespace detail

// psi(x) = d/dx ln Gamma(x), x > 0. Absolute error below 1e-12 over
// [1e-6, 1e6] away from the huge-|psi| ends, where the error is a few ulp
// of the result instead.
inline double digamma(double x) {
    detail::require_positive(x, "digamma");
    double acc = 0.0;
    while (x < 8.0) {
        acc -= 1.0 / x;
        x += 1.0;
    }
    // psi(x) ~ ln x - 1/(2x) - sum_k B_{2k} / (2k x^{2k}), terms through B16;
    // first omitted term at x = 8 is below 1e-16.
    const double z = 1.0 / (x * x);
    const double series =
        z * (1.0 / 12.0 -
             z * (1.0 / 120.0 -
                  z * (1.0 / 252.0 -
                       z * (1.0 / 240.0 -
                            z * (1.0 / 132.0 -
                                 z * (691.0 / 32760.0 -
                                      z * (1.0 / 12.0 - z * (3617.0 / 8160.0))))))));
    return acc + std::log(x) - 0.5 / x - series;
}

// psi'(x), x > 0. Strictly positive and decreasing.
inline double trigamma(double x) {
    detail::require_positive(x, "trigamma");
    double acc = 0.0;
    while (x < 8.0) {
        acc += 1.0 / (x * x);
        x += 1.0;
    }
    // psi'(x) ~ 1/x + 1/(2x^2) + (1/x^3) * sum_k B_{2k} x^{-(2k-2)}
    const double z = 1.0 / (x * x);
    const double series =
        1.0 / 6.0 -
        z * (1.0 / 30.0 -
             z * (1.0 / 42.0 -
                  z * (1.0 / 30.0 -
                       z * (5.0 / 66.0 -
                            z * (691.0 / 2730.0 - z * (7.0 / 6.0 - z * (3617.0 / 510.0)))))));
    return acc + 1.0 / x + z * (0.5 + series / x);
}

// ln Gamma(x), x > 0. Same shift-then-Stirling construction.
inline double log_gamma(double x) {
    detail::require_positive(x, "log_gamma");
    double shift = 0.0;
    while (x < 10.0) {
        shift -= std::log(x);
        x += 1.0;
    }
    // ln Gamma(x) ~ (x - 1/2) ln x - x + ln(2 pi)/2
    //               + sum_k B_{2k} / (2k (2k-1) x^{2k-1})
    const double z = 1.0 / (x * x);
    const double series =
        (1.0 / 12.0 -
         z * (1.0 / 360.0 -
              z * (1.0 / 1260.0 -
                   z * (1.0 / 1680.0 -
                        z * (1.0 / 1188.0 -
                             z * (691.0 / 360360.0 -
                                  z * (1.0 / 156.0 - z * (3617.0 / 122400.0)))))))) /
        x;
    constexpr double half_ln_two_pi = 0.91893853320467274178032973640562;
    return shift + (x - 0.5) * std::log(x) - x + half_ln_two_pi + series;
}

// Inverse of psi on (0, inf). psi is a strictly increasing bijection onto
// the reals, so every finite y has a unique preimage. Seeded with the
// standard piecewise start (exp(y) + 1/2 above y ~ -2.22, -1/(y + gamma)
// below), then Newton-polished to machine precision; psi concave makes the
// iteration monotone once it lands left of the root.
inline double inverse_digamma(double y) {
    if (!std::isfinite(y))
        throw DomainError("inverse_digamma: argument must be finite");
    double x = (y >= -2.22) ? std::exp(y) + 0.5 : -1.0 / (y + std::numbers::egamma);
    for (int it = 0; it < 50; ++it) {
        const double f = digamma(x) - y;
        double next = x - f / trigamma(x);
        if (next <= 0.0)
            next = 0.5 * x;
        if (std::abs(next - x) <= 1e-15 * x) {
            x = next;
            break;
        }
        x = next;
    }
    if (std::abs(digamma(x) - y) > 1e-12 * std::max(1.0, std::abs(y)))
        throw NumericError("inverse_digamma: Newton iteration failed for y = " +
                           std::to_string(y));
    return x;
}

// Unique solution of psi(2x) - psi(x) = M. The left side decreases from
// +inf to ln 2, so a solution exists iff M > ln 2; M <= ln 2 means the
// observed statistic is degenerate (all edge weights exactly 1/2 in the
// equality case). Bracket by doubling/halving from 1/2, bisect, then
// polish with Newton.
inline double solve_epsilon(double M) {
    if (!std::isfinite(M))
        throw DomainError("solve_epsilon: argument must be finite");
    if (M <= std::numbers::ln2)
        throw DegenerateStatisticError(
            "solve_epsilon: M = " + std::to_string(M) +
            " is not above ln 2; the statistic sits on the degenerate boundary "
            "where no estimate exists");

    const auto gap = [](double x) { return digamma(2.0 * x) - digamma(x); };

    double lo = 0.5, hi = 0.5;
    if (gap(0.5) > M) {
        hi = 1.0;
        while (gap(hi) > M) {
            lo = hi;
            hi *= 2.0;
            if (hi > 1e300)
                throw NumericError("solve_epsilon: bracketing overflow, M barely above ln 2");
        }
    } else {
        lo = 0.25;
        while (gap(lo) < M) {
            hi = lo;
            lo *= 0.5;
            if (lo < 1e-300)
                throw NumericError("solve_epsilon: bracketing underflow, M out of range");
        }
    }
    for (int it = 0; it < 200 && hi - lo > 1e-13 * lo; ++it) {
        const double mid = 0.5 * (lo + hi);
        (gap(mid) > M ? lo : hi) = mid;
    }
    double x = 0.5 * (lo + hi);
    for (int it = 0; it < 3; ++it) {
        const double deriv = 2.0 * trigamma(2.0 * x) - trigamma(x);  // < 0
        const double next = x - (gap(x) - M) / deriv;
        if (next > 0.0 && std::isfinite(next))
            x = next;
    }
    if (std::abs(gap(x) - M) > 1e-12 * std::max(1.0, M))
        throw NumericError("solve_epsilon: root refinement failed for M = " +
                           std::to_string(M));
    return x;
}

}  // namespace betagraph
