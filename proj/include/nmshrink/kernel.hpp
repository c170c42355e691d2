#pragma once

// The mixing-kernel integral
//
//   K(alpha, beta, g, xi0, xi) = int_0^inf t^(alpha-1) e^(-beta t) g(t)
//                                 prod_nu Gamma(t + xi0) / Gamma(t + xi0 + xi_nu) dt
//
// and the shrinkage terms built from ratios K(alpha + 1, ...) / K(alpha, ...).
//
// Evaluation maps t to omega = t / (1 + t) and integrates in the logit of omega
// (u = log t), where both endpoint behaviours become exponential decays.
// Finiteness is decided analytically from the endpoint exponents before any
// quadrature takes place.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numeric>
#include <span>
#include <string>
#include <vector>

#include "nmshrink/error.hpp"
#include "nmshrink/model.hpp"
#include "nmshrink/quadrature.hpp"
#include "nmshrink/special.hpp"

namespace nmshrink {

/// The weight g(t) of the hierarchical prior.
class GChoice {
public:
    enum class Kind { constant_one, komaki };

    /// g(t) = 1.
    static GChoice constant_one() { return GChoice(Kind::constant_one, 0.0, 1.0); }

    /// g(t) = {t / (1 + kappa t)}^(c + 1); requires c + 1 >= 0 so that g is bounded.
    static GChoice komaki(double c, double kappa) {
        require_input(std::isfinite(c) && c + 1.0 >= 0.0, "GChoice::komaki: need c + 1 >= 0 for a bounded g");
        require_input(std::isfinite(kappa) && kappa > 0.0, "GChoice::komaki: kappa must be positive");
        return GChoice(Kind::komaki, c, kappa);
    }

    [[nodiscard]] Kind kind() const { return kind_; }
    [[nodiscard]] double c() const { return c_; }
    [[nodiscard]] double kappa() const { return kappa_; }

    [[nodiscard]] double log_value(double t) const {
        if (kind_ == Kind::constant_one || c_ + 1.0 == 0.0) return 0.0;
        return (c_ + 1.0) * (std::log(t) - std::log1p(kappa_ * t));
    }
    [[nodiscard]] double value(double t) const { return std::exp(log_value(t)); }

    /// Declared, not inferred: g1 is constant, the Komaki weight increases for c + 1 > 0.
    [[nodiscard]] bool nonincreasing() const { return kind_ == Kind::constant_one || c_ + 1.0 == 0.0; }

    /// Exponent e with g(t) ~ const * t^e as t -> 0.
    [[nodiscard]] double small_t_exponent() const { return kind_ == Kind::komaki ? c_ + 1.0 : 0.0; }
    /// g(t) tends to a positive constant as t -> infinity for both variants.
    [[nodiscard]] double large_t_exponent() const { return 0.0; }

    [[nodiscard]] bool is_constant_one() const { return kind_ == Kind::constant_one; }

    [[nodiscard]] std::string describe() const {
        if (kind_ == Kind::constant_one) return "g1";
        return "komaki(c=" + std::to_string(c_) + ", kappa=" + std::to_string(kappa_) + ")";
    }

private:
    GChoice(Kind k, double c, double kappa) : kind_(k), c_(c), kappa_(kappa) {}

    Kind kind_;
    double c_;
    double kappa_;
};

/// Parameters (alpha, beta, g, a0, a) of the hierarchical shrinkage prior.
struct PriorSpec {
    double alpha = 1.0;
    double beta = 0.0;
    GChoice g = GChoice::constant_one();
    double a0 = 0.0;
    std::vector<double> a;

    [[nodiscard]] double a_dot() const { return std::accumulate(a.begin(), a.end(), 0.0); }

    void validate() const {
        require_input(std::isfinite(alpha) && alpha > 0.0, "PriorSpec: alpha must be positive");
        require_input(std::isfinite(beta) && beta >= 0.0, "PriorSpec: beta must be nonnegative");
        require_input(std::isfinite(a0), "PriorSpec: a0 must be finite");
        require_input(!a.empty(), "PriorSpec: a must be nonempty");
        for (double v : a) require_input(std::isfinite(v) && v > 0.0, "PriorSpec: a_i must be positive");
    }
};

/// Integrability of int_1^inf t^(s-1) e^(-beta t) g(t) dt.
inline bool tail_integral_finite(double s, double beta, const GChoice& g) {
    return beta > 0.0 || s + g.large_t_exponent() < 0.0;
}

/// Integrability of int_0^1 t^(s-1) e^(-beta t) g(t) dt.
inline bool small_t_integral_finite(double s, const GChoice& g) { return s + g.small_t_exponent() > 0.0; }

enum class GammaRatioPath {
    automatic,         // rising factorial for small integer xi, log-gamma otherwise
    rising_factorial,  // requires every xi_nu to be a nonnegative integer
    log_gamma,
};

struct KernelSettings {
    quadrature::Settings quad{};
    GammaRatioPath path = GammaRatioPath::automatic;
    /// Largest integer xi that the automatic path expands as an explicit product.
    double max_product_terms = 256.0;
};

struct KernelResult {
    double log_value = special::kInf;
    bool divergent = true;
    double rel_error = 0.0;
    std::size_t nodes = 0;
    /// Panels in u = log t, kept for refinement checks.
    std::vector<quadrature::Panel> panels;
    /// Analytic contributions of the two truncated tails (log scale).
    double log_left_tail = -special::kInf;
    double log_right_tail = -special::kInf;
};

namespace detail {

inline bool is_nonneg_integer(double v) { return v >= 0.0 && std::floor(v) == v; }

/// The log-integrand of K in the variable u = log t, including the Jacobian t.
class KernelIntegrand {
public:
    KernelIntegrand(double alpha, double beta, const GChoice& g, double xi0, std::span<const double> xi,
                    const KernelSettings& settings)
        : alpha_(alpha), beta_(beta), g_(g), xi0_(xi0), xi_(xi.begin(), xi.end()) {
        use_product_.resize(xi_.size());
        for (std::size_t k = 0; k < xi_.size(); ++k) {
            const bool integral = is_nonneg_integer(xi_[k]);
            switch (settings.path) {
                case GammaRatioPath::rising_factorial:
                    if (!integral) throw InputError("log_K: rising-factorial path needs integer xi");
                    use_product_[k] = true;
                    break;
                case GammaRatioPath::log_gamma:
                    use_product_[k] = false;
                    break;
                case GammaRatioPath::automatic:
                    use_product_[k] = integral && xi_[k] <= settings.max_product_terms;
                    break;
            }
        }
    }

    double operator()(double u) const {
        const double t = std::exp(u);
        if (t == 0.0 || !std::isfinite(t)) return -special::kInf;
        double v = alpha_ * u - beta_ * t + g_.log_value(t);
        const double x = t + xi0_;
        for (std::size_t k = 0; k < xi_.size(); ++k) {
            if (xi_[k] == 0.0) continue;
            v -= use_product_[k] ? special::log_rising_product(x, static_cast<long long>(xi_[k]))
                                 : special::log_rising_lgamma(x, xi_[k]);
        }
        return v;
    }

private:
    double alpha_;
    double beta_;
    GChoice g_;
    double xi0_;
    std::vector<double> xi_;
    std::vector<char> use_product_;
};

}  // namespace detail

/// Exponent s0 with integrand ~ t^(s0 - 1) as t -> 0.
inline double kernel_small_t_exponent(double alpha, const GChoice& g, double xi0, std::span<const double> xi) {
    double s = alpha + g.small_t_exponent();
    if (xi0 == 0.0)
        for (double v : xi)
            if (v > 0.0) s -= 1.0;
    return s;
}

/// Exponent s1 with integrand ~ t^(s1 - 1) e^(-beta t) as t -> infinity.
inline double kernel_large_t_exponent(double alpha, const GChoice& g, std::span<const double> xi) {
    return alpha + g.large_t_exponent() - std::accumulate(xi.begin(), xi.end(), 0.0);
}

/// True when K(alpha, beta, g, xi0, xi) < infinity.
inline bool kernel_finite(double alpha, double beta, const GChoice& g, double xi0, std::span<const double> xi) {
    return kernel_small_t_exponent(alpha, g, xi0, xi) > 0.0 &&
           (beta > 0.0 || kernel_large_t_exponent(alpha, g, xi) < 0.0);
}

/// log K with diagnostics. Divergent integrals return log_value = +inf and
/// divergent = true without integrating.
inline KernelResult log_K_detailed(double alpha, double beta, const GChoice& g, double xi0,
                                   std::span<const double> xi, const KernelSettings& settings = {}) {
    require_input(std::isfinite(alpha) && alpha > 0.0, "log_K: alpha must be positive");
    require_input(std::isfinite(beta) && beta >= 0.0, "log_K: beta must be nonnegative");
    require_input(std::isfinite(xi0) && xi0 >= 0.0, "log_K: xi0 must be nonnegative");
    require_input(!xi.empty(), "log_K: xi must be nonempty");
    for (double v : xi) require_input(std::isfinite(v) && v >= 0.0, "log_K: xi must be nonnegative");

    KernelResult out;
    if (!kernel_finite(alpha, beta, g, xi0, xi)) return out;
    out.divergent = false;

    const detail::KernelIntegrand logf(alpha, beta, g, xi0, xi, settings);
    const double s_left = kernel_small_t_exponent(alpha, g, xi0, xi);
    const double s_right = kernel_large_t_exponent(alpha, g, xi);

    // Below t_small the integrand is a pure power of t to double precision;
    // above t_large (only needed when beta = 0) likewise.
    double scale = 1.0;
    if (xi0 > 0.0) scale = std::min(scale, xi0);
    if (g.kind() == GChoice::Kind::komaki) scale = std::min(scale, 1.0 / g.kappa());
    const double u_small = std::log(1e-13 * scale);
    const double xi_max = *std::max_element(xi.begin(), xi.end());
    const double big = 1.0 + xi0 + xi_max + (g.kind() == GChoice::Kind::komaki ? 1.0 / g.kappa() : 0.0);
    const double u_large = std::log(1e13 * big * big);
    constexpr double kDrop = 60.0;
    constexpr double kUMax = 700.0;

    // Coarse scan for the mode, then golden-section refinement.
    double u_best = 0.0;
    double f_best = -special::kInf;
    const double scan_lo = std::max(u_small, -60.0);
    double scan_hi = 60.0;
    for (;;) {
        for (double u = scan_lo; u <= scan_hi; u += 0.5) {
            const double f = logf(u);
            if (f > f_best) {
                f_best = f;
                u_best = u;
            }
        }
        if (u_best < scan_hi - 1.0 || scan_hi >= kUMax) break;
        scan_hi = std::min(kUMax, scan_hi * 2.0);
    }
    if (f_best == -special::kInf) throw NumericalError("log_K: integrand vanishes on the scan grid");
    {
        double lo = u_best - 0.5;
        double hi = u_best + 0.5;
        const double gr = 0.5 * (std::sqrt(5.0) - 1.0);
        for (int it = 0; it < 60; ++it) {
            const double c = hi - gr * (hi - lo);
            const double d = lo + gr * (hi - lo);
            if (logf(c) > logf(d)) hi = d;
            else lo = c;
        }
        const double u = 0.5 * (lo + hi);
        const double f = logf(u);
        if (f > f_best) {
            f_best = f;
            u_best = u;
        }
    }

    // Walk outwards until the integrand has dropped kDrop nats or the
    // power-law regime is reached; the remainder is added analytically.
    double u_left = u_best;
    for (double step = 0.25;; step *= 2.0) {
        u_left -= step;
        if (u_left <= u_small) {
            u_left = std::min(u_best - 1e-3, u_small);
            break;
        }
        if (logf(u_left) < f_best - kDrop) break;
    }
    double u_right = u_best;
    bool right_cut_by_power = false;
    for (double step = 0.25;; step *= 2.0) {
        u_right += step;
        if (beta == 0.0 && u_right >= u_large) {
            u_right = std::max(u_best + 1e-3, u_large);
            right_cut_by_power = true;
            break;
        }
        if (u_right >= kUMax) throw NumericalError("log_K: integrand does not decay within the representable range");
        if (logf(u_right) < f_best - kDrop) break;
    }

    const std::vector<double> breaks{u_left, u_best, u_right};
    auto res = quadrature::integrate_log(logf, breaks, settings.quad);

    // Tail beyond a cut point: int exp(f(c) + s (u - c)) du = exp(f(c)) / |s|. Past a
    // drop point the integrand is already kDrop nats down and decays at least
    // that fast, so the same expression is a negligible overestimate.
    out.log_left_tail = logf(u_left) - std::log(s_left);
    out.log_right_tail = logf(u_right) - (right_cut_by_power ? std::log(-s_right) : 0.0);
    std::vector<double> parts{res.log_value, out.log_left_tail, out.log_right_tail};
    out.log_value = special::log_sum_exp(parts);
    out.rel_error = res.rel_error;
    out.nodes = res.nodes;
    out.panels = std::move(res.panels);
    return out;
}

/// log K(alpha, beta, g, xi0, xi); +inf when the integral diverges.
inline double log_K(double alpha, double beta, const GChoice& g, double xi0, std::span<const double> xi,
                    const KernelSettings& settings = {}) {
    return log_K_detailed(alpha, beta, g, xi0, xi, settings).log_value;
}

/// Condition under which the SS-loss hierarchical Bayes rule is defined
/// (a0 = -m, a = 1): r > m with a finite tail, or r = m with both ends finite.
inline bool hb_assumption_holds(double alpha, double beta, const GChoice& g, double r, std::size_t m,
                                std::size_t n_cols) {
    const double md = static_cast<double>(m);
    const double nd = static_cast<double>(n_cols);
    const bool tail = tail_integral_finite(alpha - nd * md, beta, g);
    if (r > md) return tail;
    if (r == md) return tail && small_t_integral_finite(alpha - nd, g);
    return false;
}

/// Posterior propriety for every data set under the hierarchical prior.
inline bool posterior_proper(const PriorSpec& prior, double r, std::size_t n_cols) {
    const double nd = static_cast<double>(n_cols);
    const bool tail = tail_integral_finite(prior.alpha - nd * prior.a_dot(), prior.beta, prior.g);
    const double shifted = r + prior.a0;
    if (shifted > 0.0) return tail;
    if (shifted == 0.0) return tail && small_t_integral_finite(prior.alpha - nd, prior.g);
    return false;
}

/// The SS-loss shrinkage term K(alpha+1, beta, g, r-m, z+m) / K(alpha, beta, g, r-m, z+m).
/// Returns +inf when the numerator diverges (possible only at z = 0).
inline double delta_hb(double alpha, double beta, const GChoice& g, double r, std::size_t m,
                       std::span<const Count> z, const KernelSettings& settings = {}) {
    require_input(!z.empty(), "delta_hb: empty z");
    require_input(m >= 1, "delta_hb: m must be positive");
    require_condition(hb_assumption_holds(alpha, beta, g, r, m, z.size()),
                      "delta_hb: need r > m with a finite tail, or r = m with alpha > N (assumption on the prior)");
    std::vector<double> xi(z.size());
    for (std::size_t k = 0; k < z.size(); ++k) {
        require_input(z[k] >= 0, "delta_hb: z must be nonnegative");
        xi[k] = static_cast<double>(z[k]) + static_cast<double>(m);
    }
    const double xi0 = r - static_cast<double>(m);
    const double den = log_K(alpha, beta, g, xi0, xi, settings);
    if (den == special::kInf) throw NumericalError("delta_hb: denominator integral diverges");
    const double num = log_K(alpha + 1.0, beta, g, xi0, xi, settings);
    if (num == special::kInf) return special::kInf;
    return std::exp(num - den);
}

/// The KL-loss shrinkage term for column nu:
/// K(alpha+1, beta, g, r+a0, z+a.+e_nu) / K(alpha, beta, g, r+a0, z+a.+e_nu).
inline double delta_nu(double alpha, double beta, const GChoice& g, double r, double a0, double a_dot,
                       std::span<const Count> z, std::size_t nu, const KernelSettings& settings = {}) {
    require_input(!z.empty(), "delta_nu: empty z");
    require_input(nu < z.size(), "delta_nu: column index out of range");
    require_input(std::isfinite(a_dot) && a_dot > 0.0, "delta_nu: a. must be positive");
    PriorSpec prior{alpha, beta, g, a0, {a_dot}};
    require_condition(posterior_proper(prior, r, z.size()),
                      "delta_nu: posterior is improper for these (alpha, beta, g, a0, a, r)");
    std::vector<double> xi(z.size());
    for (std::size_t k = 0; k < z.size(); ++k) {
        require_input(z[k] >= 0, "delta_nu: z must be nonnegative");
        xi[k] = static_cast<double>(z[k]) + a_dot + (k == nu ? 1.0 : 0.0);
    }
    const double xi0 = r + a0;
    const double den = log_K(alpha, beta, g, xi0, xi, settings);
    const double num = log_K(alpha + 1.0, beta, g, xi0, xi, settings);
    if (den == special::kInf || num == special::kInf)
        throw NumericalError("delta_nu: kernel integral diverges under a proper posterior");
    return std::exp(num - den);
}

}  // namespace nmshrink
