#pragma once

// Point estimators of the m x N probability matrix.

#include <cmath>
#include <functional>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "nmshrink/error.hpp"
#include "nmshrink/kernel.hpp"
#include "nmshrink/model.hpp"

namespace nmshrink {

/// A shrinkage term delta(z) depending on the grand total z = X...
struct DeltaRule {
    std::string name;
    std::function<double(Count)> fn;
    /// lim_{z -> inf} delta(z) when known in closed form.
    std::optional<double> limit;

    double operator()(Count z) const { return fn(z); }
};

/// delta(z) = c for every z.
inline DeltaRule constant_delta(double c) {
    require_input(std::isfinite(c) && c > 0.0, "constant_delta: c must be positive");
    return {"constant(" + std::to_string(c) + ")", [c](Count) { return c; }, c};
}

/// delta(z) = c1 + c2 / z for z >= 1, +inf at z = 0.
inline DeltaRule hyperbolic_delta(double c1, double c2) {
    require_input(c1 > 0.0 && c2 > 0.0, "hyperbolic_delta: c1, c2 must be positive");
    return {"hyperbolic", [c1, c2](Count z) { return z == 0 ? special::kInf : c1 + c2 / static_cast<double>(z); },
            c1};
}

/// The empirical Bayes term 1 + m + N m r / z; the value at z = 0 is the +inf
/// sentinel (only the all-zero matrix reaches it, whose estimate is zero).
inline DeltaRule eb_delta(std::size_t m, std::size_t n_cols, double r) {
    const double md = static_cast<double>(m);
    const double c = static_cast<double>(n_cols) * md * r;
    return {"EB", [md, c](Count z) { return z == 0 ? special::kInf : 1.0 + md + c / static_cast<double>(z); },
            1.0 + md};
}

/// The Dirichlet Bayes term a0 + m of the a = 1 prior.
inline DeltaRule dirichlet_delta(double a0, std::size_t m) { return constant_delta(a0 + static_cast<double>(m)); }

inline void require_r(double r) { require_input(std::isfinite(r) && r > 0.0, "estimator: r must be positive"); }

/// UMVU estimator X / (r + X.nu - 1), zero where X = 0. Any r > 0 is accepted:
/// a nonzero count forces X.nu >= 1 and hence a positive denominator.
inline EstimateMatrix umvu(const CountMatrix& X, double r) {
    require_r(r);
    EstimateMatrix d(X.m(), X.n_cols());
    for (std::size_t nu = 0; nu < X.n_cols(); ++nu) {
        const double den = r + static_cast<double>(X.col_sum(nu)) - 1.0;
        for (std::size_t i = 0; i < X.m(); ++i)
            if (X(i, nu) > 0) d(i, nu) = static_cast<double>(X(i, nu)) / den;
    }
    return d;
}

/// X / (r + X.nu - 1 + delta), zero where X = 0, where delta may be +inf.
inline EstimateMatrix shrink_with_delta(const CountMatrix& X, double r, double delta) {
    require_r(r);
    EstimateMatrix d(X.m(), X.n_cols());
    if (delta == special::kInf) return d;
    for (std::size_t nu = 0; nu < X.n_cols(); ++nu) {
        const double den = r + static_cast<double>(X.col_sum(nu)) - 1.0 + delta;
        for (std::size_t i = 0; i < X.m(); ++i)
            if (X(i, nu) > 0) d(i, nu) = static_cast<double>(X(i, nu)) / den;
    }
    return d;
}

/// Shrinkage estimator with a term depending on X.. only.
inline EstimateMatrix shrink_general(const CountMatrix& X, double r, const DeltaRule& delta) {
    const double v = delta(X.grand_sum());
    if (!(v > 0.0)) throw InputError("shrink_general: delta(" + std::to_string(X.grand_sum()) + ") must be positive");
    return shrink_with_delta(X, r, v);
}

/// Empirical Bayes estimator pooling all N columns.
inline EstimateMatrix eb(const CountMatrix& X, double r) {
    return shrink_general(X, r, eb_delta(X.m(), X.n_cols(), r));
}

/// Columnwise empirical Bayes: X / (r + X.nu + m + m r / X.nu).
inline EstimateMatrix eb0(const CountMatrix& X, double r) {
    require_r(r);
    const double md = static_cast<double>(X.m());
    EstimateMatrix d(X.m(), X.n_cols());
    for (std::size_t nu = 0; nu < X.n_cols(); ++nu) {
        const double s = static_cast<double>(X.col_sum(nu));
        if (s == 0.0) continue;
        const double den = r + s + md + md * r / s;
        for (std::size_t i = 0; i < X.m(); ++i) d(i, nu) = static_cast<double>(X(i, nu)) / den;
    }
    return d;
}

/// Hierarchical Bayes estimator under the SS loss, with delta evaluated by
/// kernel quadrature on the column sums.
inline EstimateMatrix hb(const CountMatrix& X, double r, double alpha, double beta, const GChoice& g,
                         const KernelSettings& settings = {}) {
    require_r(r);
    if (X.grand_sum() == 0) {
        require_condition(hb_assumption_holds(alpha, beta, g, r, X.m(), X.n_cols()),
                          "hb: need r > m with a finite tail, or r = m with alpha > N");
        return EstimateMatrix(X.m(), X.n_cols());
    }
    const double delta = delta_hb(alpha, beta, g, r, X.m(), X.col_sums(), settings);
    return shrink_with_delta(X, r, delta);
}

/// Posterior mean (X + a) / (r + a0 + X.nu + a.) under the Dirichlet prior.
inline EstimateMatrix dirichlet_posterior_mean(const CountMatrix& X, double r, double a0, std::span<const double> a) {
    require_r(r);
    require_input(a.size() == X.m(), "dirichlet_posterior_mean: a has the wrong length");
    for (double v : a) require_input(v > 0.0, "dirichlet_posterior_mean: a_i must be positive");
    require_condition(r + a0 > 0.0, "dirichlet_posterior_mean: posterior is improper unless r + a0 > 0");
    double a_dot = 0.0;
    for (double v : a) a_dot += v;
    EstimateMatrix d(X.m(), X.n_cols());
    for (std::size_t nu = 0; nu < X.n_cols(); ++nu) {
        const double den = r + a0 + static_cast<double>(X.col_sum(nu)) + a_dot;
        for (std::size_t i = 0; i < X.m(); ++i) d(i, nu) = (static_cast<double>(X(i, nu)) + a[i]) / den;
    }
    return d;
}

/// Posterior mean under the hierarchical prior:
/// (X + a) / (r + a0 + X.nu + a. + delta_nu(X.)).
inline EstimateMatrix hb_posterior_mean(const CountMatrix& X, double r, const PriorSpec& prior,
                                        const KernelSettings& settings = {}) {
    require_r(r);
    prior.validate();
    require_input(prior.a.size() == X.m(), "hb_posterior_mean: a has the wrong length");
    const double a_dot = prior.a_dot();
    EstimateMatrix d(X.m(), X.n_cols());
    for (std::size_t nu = 0; nu < X.n_cols(); ++nu) {
        const double dn =
            delta_nu(prior.alpha, prior.beta, prior.g, r, prior.a0, a_dot, X.col_sums(), nu, settings);
        const double den = r + prior.a0 + static_cast<double>(X.col_sum(nu)) + a_dot + dn;
        for (std::size_t i = 0; i < X.m(); ++i) d(i, nu) = (static_cast<double>(X(i, nu)) + prior.a[i]) / den;
    }
    return d;
}

/// Checks the EstimateMatrix invariants. With `zero_pattern` the entries must
/// vanish exactly where the counts do (SS-loss family); otherwise all entries
/// must be strictly positive (posterior means).
inline bool estimate_is_valid(const EstimateMatrix& d, const CountMatrix& X, bool zero_pattern) {
    if (d.rows() != X.m() || d.cols() != X.n_cols()) return false;
    for (std::size_t nu = 0; nu < d.cols(); ++nu)
        for (std::size_t i = 0; i < d.rows(); ++i) {
            const double v = d(i, nu);
            if (!std::isfinite(v) || v < 0.0) return false;
            if (zero_pattern && ((v == 0.0) != (X(i, nu) == 0))) return false;
            if (!zero_pattern && !(v > 0.0)) return false;
        }
    return true;
}

}  // namespace nmshrink
