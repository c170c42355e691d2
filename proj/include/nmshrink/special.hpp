#pragma once

// Log-space special functions used by the kernel quadrature and the pmf.

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <span>

namespace nmshrink::special {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

/// log Gamma(x) for x > 0. Uses the reentrant glibc variant so that
/// concurrent replications never race on `signgam`.
inline double log_gamma(double x) {
    int sign = 0;
    return ::lgamma_r(x, &sign);
}

inline double log_factorial(long long n) { return log_gamma(static_cast<double>(n) + 1.0); }

namespace detail {

// Stirling remainder of log Gamma(y): 1/(12y) - 1/(360y^3) + 1/(1260y^5) - 1/(1680y^7).
inline double stirling_tail(double y) {
    const double iy = 1.0 / y;
    const double iy2 = iy * iy;
    return iy * (1.0 / 12.0 - iy2 * (1.0 / 360.0 - iy2 * (1.0 / 1260.0 - iy2 / 1680.0)));
}

}  // namespace detail

/// log{Gamma(x + s) / Gamma(x)} for x > 0, s >= 0 by log-gamma differences.
/// For large x the difference is formed from the Stirling series directly so
/// that the two O(x log x) terms never cancel in floating point.
inline double log_rising_lgamma(double x, double s) {
    if (s == 0.0) return 0.0;
    if (x >= 15.0) {
        const double y = x + s;
        return (x - 0.5) * std::log1p(s / x) + s * std::log(y) - s + detail::stirling_tail(y) -
               detail::stirling_tail(x);
    }
    return log_gamma(x + s) - log_gamma(x);
}

/// log{x (x+1) ... (x+n-1)} as an explicit product, for integer n >= 0.
inline double log_rising_product(double x, long long n) {
    double acc = 0.0;
    // Multiply in blocks to cut the number of log calls, guarding the range.
    double block = 1.0;
    for (long long j = 0; j < n; ++j) {
        block *= x + static_cast<double>(j);
        if (block > 1e280 || block < 1e-280) {
            acc += std::log(block);
            block = 1.0;
        }
    }
    return acc + std::log(block);
}

/// Numerically stable log(sum(exp(v))).
inline double log_sum_exp(std::span<const double> v) {
    if (v.empty()) return -kInf;
    const double mx = *std::max_element(v.begin(), v.end());
    if (!std::isfinite(mx)) return mx;
    double s = 0.0;
    for (double x : v) s += std::exp(x - mx);
    return mx + std::log(s);
}

inline double log_add_exp(double a, double b) {
    if (a == -kInf) return b;
    if (b == -kInf) return a;
    const double mx = std::max(a, b);
    return mx + std::log1p(std::exp(-std::abs(a - b)));
}

}  // namespace nmshrink::special
