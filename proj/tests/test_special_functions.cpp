#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <cstddef>
#include <numbers>
#include <random>

#include "betagraph/errors.hpp"
#include "betagraph/special_functions.hpp"

namespace {

using betagraph::digamma;
using betagraph::inverse_digamma;
using betagraph::log_gamma;
using betagraph::solve_epsilon;
using betagraph::trigamma;

double uniform(std::mt19937_64& rng, double lo, double hi) {
    const double u = static_cast<double>(rng() >> 11) * 0x1.0p-53;
    return lo + (hi - lo) * u;
}

double log_uniform(std::mt19937_64& rng, double lo, double hi) {
    return std::exp(uniform(rng, std::log(lo), std::log(hi)));
}

// |got - want| scaled against max(1, |want|), so tiny and huge references
// are judged alike.
double scaled_error(double got, double want) {
    return std::abs(got - want) / std::max(1.0, std::abs(want));
}

struct Probe {
    double x;
    double want;
};

}  // namespace

TEST_CASE("digamma matches high-precision reference values", "[special]") {
    // Reference values computed with 40-digit arithmetic and rounded to
    // the nearest double.
    const Probe probes[] = {
        {9.9999999999999995e-07, -1000000.5772140201},
        {0.001, -1000.5755719318103},
        {0.10000000000000001, -10.423754940411076},
        {0.5, -1.9635100260214235},
        {1, -0.57721566490153287},
        {1.5, 0.03648997397857652},
        {2.5, 0.70315664064524319},
        {5.9999000000000002, 1.7060995359722761},
        {6, 1.7061176684318005},
        {25.5, 3.2189424728839198},
        {1000, 6.907255195648812},
        {1000000, 13.815510057964191},
    };
    for (const Probe& p : probes) {
        INFO("x = " << p.x);
        CHECK(scaled_error(digamma(p.x), p.want) < 5e-13);
    }
}

TEST_CASE("trigamma matches high-precision reference values", "[special]") {
    const Probe probes[] = {
        {9.9999999999999995e-07, 1000000000001.645},
        {0.001, 1000001.6425331958},
        {0.10000000000000001, 101.43329915079275},
        {0.5, 4.934802200544679},
        {1, 1.6449340668482264},
        {1.5, 0.93480220054467933},
        {2.5, 0.49035775610023485},
        {5.9999000000000002, 0.18132623476948004},
        {6, 0.18132295573711532},
        {25.5, 0.039994669649562921},
        {1000, 0.0010005001666666333},
        {1000000, 1.0000005000001667e-06},
    };
    for (const Probe& p : probes) {
        INFO("x = " << p.x);
        CHECK(scaled_error(trigamma(p.x), p.want) < 5e-13);
    }
}

TEST_CASE("log_gamma matches high-precision reference values", "[special]") {
    const Probe probes[] = {
        {9.9999999999999995e-07, 13.815509980749432},
        {0.10000000000000001, 2.252712651734206},
        {0.5, 0.57236494292470008},
        {1, 0},
        {1.5, -0.12078223763524522},
        {2, 0},
        {2.5, 0.28468287047291918},
        {9.9999000000000002, 12.801602305348396},
        {10, 12.801827480081469},
        {25.5, 56.389167643719944},
        {1000, 5905.2204232091808},
        {1000000, 12815504.569147611},
    };
    for (const Probe& p : probes) {
        INFO("x = " << p.x);
        CHECK(scaled_error(log_gamma(p.x), p.want) < 5e-13);
    }
}

TEST_CASE("digamma and trigamma closed forms at 1/2, 1, and 10", "[special]") {
    const double gamma = std::numbers::egamma;
    const double pi2 = std::numbers::pi * std::numbers::pi;
    CHECK(scaled_error(digamma(1.0), -gamma) < 1e-14);
    CHECK(scaled_error(digamma(0.5), -gamma - 2.0 * std::numbers::ln2) < 1e-14);
    CHECK(scaled_error(trigamma(1.0), pi2 / 6.0) < 1e-13);
    CHECK(scaled_error(trigamma(0.5), pi2 / 2.0) < 1e-13);
    // psi(10) = H_9 - gamma
    double h9 = 0.0;
    for (int k = 9; k >= 1; --k) h9 += 1.0 / k;
    CHECK(scaled_error(digamma(10.0), h9 - gamma) < 1e-14);
}

TEST_CASE("digamma recurrence psi(x+1) = psi(x) + 1/x", "[special]") {
    std::mt19937_64 rng(101);
    for (int k = 0; k < 10000; ++k) {
        const double x = log_uniform(rng, 1e-3, 1e3);
        const double lhs = digamma(x + 1.0);
        const double rhs = digamma(x) + 1.0 / x;
        INFO("x = " << x);
        REQUIRE(std::abs(lhs - rhs) <= 1e-11 * std::max(1.0, std::abs(rhs)));
    }
}

TEST_CASE("trigamma recurrence psi'(x+1) = psi'(x) - 1/x^2", "[special]") {
    std::mt19937_64 rng(102);
    for (int k = 0; k < 10000; ++k) {
        const double x = log_uniform(rng, 1e-3, 1e3);
        const double lhs = trigamma(x + 1.0);
        const double rhs = trigamma(x) - 1.0 / (x * x);
        INFO("x = " << x);
        REQUIRE(std::abs(lhs - rhs) <= 1e-11 * std::max(1.0, std::abs(trigamma(x))));
    }
}

TEST_CASE("log_gamma recurrence lnG(x+1) = lnG(x) + ln x", "[special]") {
    std::mt19937_64 rng(103);
    for (int k = 0; k < 10000; ++k) {
        const double x = log_uniform(rng, 1e-3, 1e3);
        const double lhs = log_gamma(x + 1.0);
        const double rhs = log_gamma(x) + std::log(x);
        INFO("x = " << x);
        REQUIRE(std::abs(lhs - rhs) <= 1e-11 * std::max(1.0, std::abs(rhs)));
    }
}

TEST_CASE("digamma duplication psi(2x) = psi(x)/2 + psi(x+1/2)/2 + ln 2", "[special]") {
    std::mt19937_64 rng(104);
    for (int k = 0; k < 10000; ++k) {
        const double x = log_uniform(rng, 1e-3, 1e3);
        const double lhs = digamma(2.0 * x);
        const double rhs = 0.5 * digamma(x) + 0.5 * digamma(x + 0.5) + std::numbers::ln2;
        INFO("x = " << x);
        REQUIRE(std::abs(lhs - rhs) <= 1e-11 * std::max(1.0, std::abs(lhs)));
    }
}

TEST_CASE("reciprocal trigamma is strictly superadditive", "[special]") {
    // 1/psi'(x+y) > 1/psi'(x) + 1/psi'(y); this is what makes the
    // iteration Jacobian's column sums come out below 1.
    std::mt19937_64 rng(105);
    for (int k = 0; k < 10000; ++k) {
        const double x = log_uniform(rng, 1e-3, 1e3);
        const double y = log_uniform(rng, 1e-3, 1e3);
        INFO("x = " << x << ", y = " << y);
        REQUIRE(1.0 / trigamma(x + y) > 1.0 / trigamma(x) + 1.0 / trigamma(y));
    }
}

TEST_CASE("psi(2x) - psi(x) decreases strictly from +inf to ln 2", "[special]") {
    const auto gap = [](double x) { return digamma(2.0 * x) - digamma(x); };
    std::mt19937_64 rng(106);
    for (int k = 0; k < 10000; ++k) {
        const double x = log_uniform(rng, 1e-4, 1e4);
        const double y = x * uniform(rng, 1.0001, 3.0);
        INFO("x = " << x << ", y = " << y);
        REQUIRE(gap(x) > gap(y));
        REQUIRE(gap(y) > std::numbers::ln2);
    }
    CHECK(gap(1e-6) > 1e5);                            // blows up like 1/x
    CHECK(gap(1e6) - std::numbers::ln2 < 3e-7);        // approaches ln 2 like 1/(4x)
    CHECK(gap(1e6) > std::numbers::ln2);
}

TEST_CASE("trigamma is the derivative of digamma (finite differences)", "[special]") {
    std::mt19937_64 rng(107);
    for (int k = 0; k < 100; ++k) {
        const double x = uniform(rng, 0.1, 50.0);
        const double h = 1e-5 * std::max(1.0, x);
        const double fd = (digamma(x + h) - digamma(x - h)) / (2.0 * h);
        INFO("x = " << x);
        REQUIRE(scaled_error(fd, trigamma(x)) < 1e-6);
    }
}

TEST_CASE("digamma is the derivative of log_gamma (finite differences)", "[special]") {
    std::mt19937_64 rng(108);
    for (int k = 0; k < 100; ++k) {
        const double x = uniform(rng, 0.1, 50.0);
        const double h = 1e-5 * std::max(1.0, x);
        const double fd = (log_gamma(x + h) - log_gamma(x - h)) / (2.0 * h);
        INFO("x = " << x);
        REQUIRE(scaled_error(fd, digamma(x)) < 1e-6);
    }
}

TEST_CASE("inverse_digamma inverts digamma across twelve decades", "[special]") {
    std::mt19937_64 rng(109);
    for (int k = 0; k < 10000; ++k) {
        const double x = log_uniform(rng, 1e-4, 1e4);
        const double back = inverse_digamma(digamma(x));
        INFO("x = " << x);
        REQUIRE(std::abs(back - x) <= 1e-10 * x);
    }
    CHECK(std::abs(inverse_digamma(digamma(1e-6)) - 1e-6) <= 1e-10 * 1e-6);
    CHECK(std::abs(inverse_digamma(digamma(1e6)) - 1e6) <= 1e-10 * 1e6);
    // psi has its positive root just below 1.462
    CHECK(std::abs(inverse_digamma(0.0) - 1.4616321449683622) < 1e-12);
    CHECK(std::abs(inverse_digamma(-std::numbers::egamma) - 1.0) < 1e-12);
}

TEST_CASE("solve_epsilon matches reference roots of psi(2x)-psi(x) = M", "[special]") {
    // M = 1 has root 1 and M = 2 ln 2 has root 1/2 exactly; the other two
    // roots come from 40-digit arithmetic.
    CHECK(scaled_error(solve_epsilon(1.0), 1.0) < 1e-11);
    CHECK(scaled_error(solve_epsilon(2.0 * std::numbers::ln2), 0.5) < 1e-11);
    CHECK(scaled_error(solve_epsilon(3.0), 0.17926701124992989) < 1e-11);
    // Near ln 2 the defining equation flattens out (slope ~ -1/(4x^2)), so
    // the root itself is only conditioned to ~1e-9 here.
    CHECK(scaled_error(solve_epsilon(std::numbers::ln2 + 1e-6), 250000.24999975) < 1e-9);
}

TEST_CASE("solve_epsilon satisfies its defining equation", "[special]") {
    std::mt19937_64 rng(110);
    for (int k = 0; k < 2000; ++k) {
        const double m = std::numbers::ln2 + log_uniform(rng, 1e-3, 30.0);
        const double e = solve_epsilon(m);
        INFO("M = " << m);
        REQUIRE(e > 0.0);
        REQUIRE(std::abs(digamma(2.0 * e) - digamma(e) - m) <= 1e-11 * std::max(1.0, m));
    }
}

TEST_CASE("special functions reject arguments outside their domain", "[special]") {
    using betagraph::DegenerateStatisticError;
    using betagraph::DomainError;
    const double nan = std::numeric_limits<double>::quiet_NaN();
    const double inf = std::numeric_limits<double>::infinity();

    CHECK_THROWS_AS(digamma(0.0), DomainError);
    CHECK_THROWS_AS(digamma(-1.0), DomainError);
    CHECK_THROWS_AS(digamma(nan), DomainError);
    CHECK_THROWS_AS(trigamma(0.0), DomainError);
    CHECK_THROWS_AS(trigamma(-0.5), DomainError);
    CHECK_THROWS_AS(log_gamma(0.0), DomainError);
    CHECK_THROWS_AS(log_gamma(-2.5), DomainError);
    CHECK_THROWS_AS(inverse_digamma(nan), DomainError);
    CHECK_THROWS_AS(inverse_digamma(inf), DomainError);

    // psi(2x)-psi(x) = M has no root at or below ln 2
    CHECK_THROWS_AS(solve_epsilon(std::numbers::ln2), DegenerateStatisticError);
    CHECK_THROWS_AS(solve_epsilon(0.5), DegenerateStatisticError);
    CHECK_THROWS_AS(solve_epsilon(0.0), DegenerateStatisticError);
    CHECK_THROWS_AS(solve_epsilon(-1.0), DegenerateStatisticError);
}
