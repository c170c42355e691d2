#pragma once

// Conjugate Gibbs sampler for the gamma-mixed Dirichlet prior with g = 1:
//
//   t | p ~ Ga(alpha, beta + sum_nu log(1 / p0_nu))      (shape, rate)
//   p_nu | t ~ Dir(t + a0_eff, a_nu)
//
// For the posterior a0_eff = r + a0 and a_nu = x_nu + a.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <numeric>
#include <span>
#include <string>
#include <vector>

#include "nmshrink/error.hpp"
#include "nmshrink/kernel.hpp"
#include "nmshrink/model.hpp"
#include "nmshrink/random.hpp"
#include "nmshrink/special.hpp"

namespace nmshrink::gibbs {

/// One state (p, t). p0 is kept on the log scale: with t + a0_eff small the
/// draws of p0 can fall below the smallest double.
struct GibbsState {
    Matrix p;                    // m x N
    std::vector<double> log_p0;  // N
    double t = 1.0;

    [[nodiscard]] std::size_t m() const { return p.rows(); }
    [[nodiscard]] std::size_t n_cols() const { return p.cols(); }
    /// Column nu as a validated ProbColumn; throws if it is not representable.
    [[nodiscard]] ProbColumn column(std::size_t nu) const {
        const auto c = p.col(nu);
        return ProbColumn(std::vector<double>(c.begin(), c.end()), std::exp(log_p0[nu]));
    }
};

struct ChainConfig {
    /// Total iterations including burn-in.
    std::size_t n_iter = 100000;
    std::size_t burn_in = 50000;
    std::uint64_t seed = 42;
    std::size_t thin = 1;

    void validate() const {
        require_input(n_iter > burn_in, "ChainConfig: n_iter must exceed burn_in");
        require_input(thin >= 1, "ChainConfig: thin must be at least 1");
    }
    [[nodiscard]] std::size_t kept() const { return (n_iter - burn_in + thin - 1) / thin; }
};

/// Dirichlet parameters of the sampler: a0_eff and the N column vectors a_nu.
struct Conditionals {
    double alpha = 1.0;
    double beta = 0.0;
    double a0_eff = 0.0;
    Matrix a_cols;  // m x N, strictly positive

    void validate() const {
        require_input(std::isfinite(alpha) && alpha > 0.0, "gibbs: alpha must be positive");
        require_input(std::isfinite(beta) && beta >= 0.0, "gibbs: beta must be nonnegative");
        require_condition(std::isfinite(a0_eff) && a0_eff >= 0.0, "gibbs: a0_eff must be nonnegative");
        require_input(a_cols.rows() >= 1 && a_cols.cols() >= 1, "gibbs: empty a_cols");
        for (double v : a_cols.data()) require_input(std::isfinite(v) && v > 0.0, "gibbs: a_cols must be positive");
    }
};

/// Draws p_nu ~ Dir(t + a0_eff, a_nu) for every column into `state`.
inline void sample_p_given_t(GibbsState& state, const Conditionals& c, RandomStream& rng) {
    const std::size_t m = c.a_cols.rows();
    std::vector<double> logs(m + 1);
    for (std::size_t nu = 0; nu < c.a_cols.cols(); ++nu) {
        logs[0] = rng.log_gamma_variate(state.t + c.a0_eff);
        for (std::size_t i = 0; i < m; ++i) logs[i + 1] = rng.log_gamma_variate(c.a_cols(i, nu));
        const double lse = special::log_sum_exp(logs);
        state.log_p0[nu] = logs[0] - lse;
        for (std::size_t i = 0; i < m; ++i) state.p(i, nu) = std::exp(logs[i + 1] - lse);
    }
}

/// Rate of the gamma conditional of t.
inline double t_rate(const GibbsState& state, double beta) {
    double rate = beta;
    for (double lp0 : state.log_p0) rate -= lp0;
    return rate;
}

/// One sweep: t first, then all columns of p.
inline GibbsState gibbs_step(GibbsState state, const Conditionals& c, RandomStream& rng) {
    const double rate = t_rate(state, c.beta);
    if (!(rate > 0.0)) throw NumericalError("gibbs_step: gamma rate for t is not positive");
    state.t = std::exp(rng.log_gamma_variate(c.alpha) - std::log(rate));
    if (!(state.t > 0.0)) throw NumericalError("gibbs_step: t underflowed to zero");
    sample_p_given_t(state, c, rng);
    return state;
}

/// Initial state: t0 = alpha / (beta + 1), columns Dir(1, ..., 1).
inline GibbsState initial_state(const Conditionals& c, RandomStream& rng) {
    GibbsState s{Matrix(c.a_cols.rows(), c.a_cols.cols()), std::vector<double>(c.a_cols.cols()),
                 c.alpha / (c.beta + 1.0)};
    Conditionals flat = c;
    flat.a0_eff = 1.0 - s.t;  // t + a0_eff = 1
    for (std::size_t nu = 0; nu < c.a_cols.cols(); ++nu) {
        auto col = flat.a_cols.col(nu);
        std::fill(col.begin(), col.end(), 1.0);
    }
    sample_p_given_t(s, flat, rng);
    return s;
}

inline std::vector<GibbsState> run_chain(const Conditionals& c, const ChainConfig& cfg) {
    c.validate();
    cfg.validate();
    RandomStream rng(cfg.seed);
    GibbsState s = initial_state(c, rng);
    std::vector<GibbsState> out;
    out.reserve(cfg.kept());
    for (std::size_t it = 0; it < cfg.n_iter; ++it) {
        s = gibbs_step(std::move(s), c, rng);
        if (it >= cfg.burn_in && (it - cfg.burn_in) % cfg.thin == 0) out.push_back(s);
    }
    return out;
}

/// Propriety of the joint prior: min{max{a0, alpha - N}, max{N a. - alpha, beta}} > 0.
inline bool joint_prior_proper(double alpha, double beta, double a0, double a_dot, std::size_t n_cols) {
    const double nd = static_cast<double>(n_cols);
    return std::min(std::max(a0, alpha - nd), std::max(nd * a_dot - alpha, beta)) > 0.0;
}

/// Chain targeting the joint prior of (p, t). The sampler also needs a0 >= 0
/// so that every Dirichlet parameter t + a0 is positive.
inline std::vector<GibbsState> prior_chain(const PriorSpec& prior, std::size_t n_cols, const ChainConfig& cfg) {
    prior.validate();
    require_input(prior.g.is_constant_one(), "prior_chain: the sampler supports g = 1 only");
    require_condition(joint_prior_proper(prior.alpha, prior.beta, prior.a0, prior.a_dot(), n_cols),
                      "prior_chain: need min{max{a0, alpha - N}, max{N a. - alpha, beta}} > 0");
    require_condition(prior.a0 >= 0.0, "prior_chain: the sampler needs a0 >= 0");
    Conditionals c{prior.alpha, prior.beta, prior.a0, Matrix(prior.a.size(), n_cols)};
    for (std::size_t nu = 0; nu < n_cols; ++nu)
        for (std::size_t i = 0; i < prior.a.size(); ++i) c.a_cols(i, nu) = prior.a[i];
    return run_chain(c, cfg);
}

inline Conditionals posterior_conditionals(const CountMatrix& X, double r, const PriorSpec& prior) {
    prior.validate();
    require_input(std::isfinite(r) && r > 0.0, "posterior_chain: r must be positive");
    require_input(prior.a.size() == X.m(), "posterior_chain: a has the wrong length");
    require_input(prior.g.is_constant_one(), "posterior_chain: the sampler supports g = 1 only");
    require_condition(posterior_proper(prior, r, X.n_cols()), "posterior_chain: posterior is improper");
    Conditionals c{prior.alpha, prior.beta, r + prior.a0, Matrix(X.m(), X.n_cols())};
    for (std::size_t nu = 0; nu < X.n_cols(); ++nu)
        for (std::size_t i = 0; i < X.m(); ++i) c.a_cols(i, nu) = static_cast<double>(X(i, nu)) + prior.a[i];
    return c;
}

/// Chain targeting the posterior of (p, t) given X.
inline std::vector<GibbsState> posterior_chain(const CountMatrix& X, double r, const PriorSpec& prior,
                                               const ChainConfig& cfg) {
    return run_chain(posterior_conditionals(X, r, prior), cfg);
}

/// The posterior of the SS-loss geometry: a0 = -m, a = 1.
inline PriorSpec ss_geometry(double alpha, double beta, std::size_t m) {
    return {alpha, beta, GChoice::constant_one(), -static_cast<double>(m), std::vector<double>(m, 1.0)};
}

/// log of the unnormalized joint density of (p, t) with g = 1.
inline double log_joint_density(const GibbsState& s, const Conditionals& c) {
    double v = (c.alpha - 1.0) * std::log(s.t) - c.beta * s.t;
    for (std::size_t nu = 0; nu < s.n_cols(); ++nu) {
        v += (s.t + c.a0_eff - 1.0) * s.log_p0[nu];
        for (std::size_t i = 0; i < s.m(); ++i) v += (c.a_cols(i, nu) - 1.0) * std::log(s.p(i, nu));
    }
    return v;
}

/// Normalized log density of the gamma conditional of t at s.t.
inline double log_t_conditional(const GibbsState& s, const Conditionals& c) {
    const double rate = t_rate(s, c.beta);
    return c.alpha * std::log(rate) - special::log_gamma(c.alpha) + (c.alpha - 1.0) * std::log(s.t) - rate * s.t;
}

/// Normalized log density of the Dirichlet conditionals of p at s.p given s.t.
inline double log_p_conditional(const GibbsState& s, const Conditionals& c) {
    double v = 0.0;
    for (std::size_t nu = 0; nu < s.n_cols(); ++nu) {
        const double b0 = s.t + c.a0_eff;
        double total = b0;
        v += (b0 - 1.0) * s.log_p0[nu] - special::log_gamma(b0);
        for (std::size_t i = 0; i < s.m(); ++i) {
            total += c.a_cols(i, nu);
            v += (c.a_cols(i, nu) - 1.0) * std::log(s.p(i, nu)) - special::log_gamma(c.a_cols(i, nu));
        }
        v += special::log_gamma(total);
    }
    return v;
}

/// Effective sample size by Geyer's initial positive sequence estimator.
inline double effective_sample_size(std::span<const double> x) {
    const std::size_t n = x.size();
    if (n < 4) return static_cast<double>(n);
    const double mean = std::accumulate(x.begin(), x.end(), 0.0) / static_cast<double>(n);
    auto autocov = [&](std::size_t lag) {
        double s = 0.0;
        for (std::size_t k = 0; k + lag < n; ++k) s += (x[k] - mean) * (x[k + lag] - mean);
        return s / static_cast<double>(n);
    };
    const double c0 = autocov(0);
    if (!(c0 > 0.0)) return static_cast<double>(n);
    double sum = 0.0;  // sum of Gamma_k = rho_{2k} + rho_{2k+1}, k >= 0
    for (std::size_t lag = 0; lag + 1 < n; lag += 2) {
        const double pair = (autocov(lag) + autocov(lag + 1)) / c0;
        if (pair <= 0.0) break;
        sum += pair;
    }
    const double tau = std::max(2.0 * sum - 1.0, 1.0 / static_cast<double>(n));
    return std::min(static_cast<double>(n), static_cast<double>(n) / tau);
}

inline std::vector<double> t_trace(std::span<const GibbsState> chain) {
    std::vector<double> t(chain.size());
    std::transform(chain.begin(), chain.end(), t.begin(), [](const GibbsState& s) { return s.t; });
    return t;
}

/// What the chain estimates: the SS-loss term E[t | X], or the KL-loss term
/// E[t w] / E[w] with w = 1 / (t + offset), offset = r + a0 + z_nu + a.
struct DeltaMode {
    enum class Kind { ss_loss, kl_loss } kind = Kind::ss_loss;
    double offset = 0.0;

    static DeltaMode ss() { return {}; }
    static DeltaMode kl(double offset) { return {Kind::kl_loss, offset}; }
};

inline double mcmc_delta_estimate(std::span<const GibbsState> chain, const DeltaMode& mode) {
    if (chain.empty()) throw InputError("mcmc_delta_estimate: empty chain");
    long double num = 0.0L;
    long double den = 0.0L;
    for (const auto& s : chain) {
        const double w = mode.kind == DeltaMode::Kind::ss_loss ? 1.0 : 1.0 / (s.t + mode.offset);
        num += s.t * w;
        den += w;
    }
    return static_cast<double>(num / den);
}

/// KL-loss offset r + a0 + z_nu + a. for column nu.
inline double kl_offset(const CountMatrix& X, double r, const PriorSpec& prior, std::size_t nu) {
    return r + prior.a0 + static_cast<double>(X.col_sum(nu)) + prior.a_dot();
}

/// Sample average of p over the chain.
inline Matrix posterior_mean_p(std::span<const GibbsState> chain) {
    if (chain.empty()) throw InputError("posterior_mean_p: empty chain");
    Matrix out(chain.front().m(), chain.front().n_cols());
    std::vector<long double> acc(out.data().size(), 0.0L);
    for (const auto& s : chain)
        for (std::size_t k = 0; k < acc.size(); ++k) acc[k] += s.p.data()[k];
    for (std::size_t nu = 0; nu < out.cols(); ++nu)
        for (std::size_t i = 0; i < out.rows(); ++i)
            out(i, nu) = static_cast<double>(acc[nu * out.rows() + i] / static_cast<long double>(chain.size()));
    return out;
}

/// 1 / E[1 / p_{i,nu} | X] averaged through the conditional given t:
/// under Dir(t + a0_eff, a_nu), E[1 / p_i | t] = (t + a0_eff + a_nu. - 1) / (a_i - 1).
/// Counts of zero give 0 (the expectation is infinite there).
inline Matrix rao_blackwell_inverse_mean(std::span<const GibbsState> chain, const Conditionals& c) {
    if (chain.empty()) throw InputError("rao_blackwell_inverse_mean: empty chain");
    const double mean_t = mcmc_delta_estimate(chain, DeltaMode::ss());
    Matrix out(c.a_cols.rows(), c.a_cols.cols());
    for (std::size_t nu = 0; nu < out.cols(); ++nu) {
        double a_dot = 0.0;
        for (std::size_t i = 0; i < out.rows(); ++i) a_dot += c.a_cols(i, nu);
        for (std::size_t i = 0; i < out.rows(); ++i) {
            if (c.a_cols(i, nu) <= 1.0) continue;
            out(i, nu) = (c.a_cols(i, nu) - 1.0) / (mean_t + c.a0_eff + a_dot - 1.0);
        }
    }
    return out;
}

/// Direct Monte Carlo estimate 1 / mean(1 / p_{i,nu}) over the chain draws.
/// For a zero count the mean of 1/p is finite for every finite chain though
/// its expectation is not, so this never returns 0.
inline Matrix raw_inverse_mean(std::span<const GibbsState> chain) {
    if (chain.empty()) throw InputError("raw_inverse_mean: empty chain");
    const std::size_t m = chain.front().m();
    const std::size_t n = chain.front().n_cols();
    Matrix out(m, n);
    std::vector<double> terms(chain.size());
    for (std::size_t nu = 0; nu < n; ++nu)
        for (std::size_t i = 0; i < m; ++i) {
            for (std::size_t k = 0; k < chain.size(); ++k) terms[k] = -std::log(chain[k].p(i, nu));
            const double log_mean = special::log_sum_exp(terms) - std::log(static_cast<double>(chain.size()));
            out(i, nu) = std::exp(-log_mean);
        }
    return out;
}

struct DiagReport {
    Matrix posterior_mean_p;
    double posterior_mean_t = 0.0;
    double ess_t = 0.0;
    double delta_ss = 0.0;
    std::vector<double> delta_kl;
    std::size_t draws = 0;
};

/// Posterior diagnostics for X under `prior`. delta_ss is E[t | X] under the
/// SS-loss geometry (a0 = -m, a = 1, same alpha and beta).
inline DiagReport diagnose(const CountMatrix& X, double r, const PriorSpec& prior, const ChainConfig& cfg) {
    DiagReport rep;
    const auto chain = posterior_chain(X, r, prior, cfg);
    rep.draws = chain.size();
    rep.posterior_mean_p = posterior_mean_p(chain);
    const auto t = t_trace(chain);
    rep.posterior_mean_t = std::accumulate(t.begin(), t.end(), 0.0) / static_cast<double>(t.size());
    rep.ess_t = effective_sample_size(t);
    for (std::size_t nu = 0; nu < X.n_cols(); ++nu)
        rep.delta_kl.push_back(mcmc_delta_estimate(chain, DeltaMode::kl(kl_offset(X, r, prior, nu))));
    const PriorSpec ss = ss_geometry(prior.alpha, prior.beta, X.m());
    if (posterior_proper(ss, r, X.n_cols()) && r + ss.a0 >= 0.0) {
        ChainConfig c2 = cfg;
        c2.seed = cfg.seed + 1;
        const auto ss_chain = posterior_chain(X, r, ss, c2);
        rep.delta_ss = mcmc_delta_estimate(ss_chain, DeltaMode::ss());
    } else {
        rep.delta_ss = std::nan("");
    }
    return rep;
}

}  // namespace nmshrink::gibbs
