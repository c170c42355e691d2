#pragma once

// Losses, Monte Carlo risk with common random numbers, PRIAL, the simulation
// scenarios, and an enumeration check of Hudson's identity.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <exception>
#include <functional>
#include <numeric>
#include <optional>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include "nmshrink/error.hpp"
#include "nmshrink/estimators.hpp"
#include "nmshrink/gibbs.hpp"
#include "nmshrink/kernel.hpp"
#include "nmshrink/model.hpp"
#include "nmshrink/random.hpp"
#include "nmshrink/special.hpp"

namespace nmshrink {

enum class LossKind { ss, kl };

inline void check_loss_shape(const EstimateMatrix& d, const ModelParams& p, std::size_t n) {
    require_input(d.rows() == p.m() && d.cols() == p.n_cols(), "loss: estimate and truth differ in shape");
    require_input(n >= 1 && n <= p.n_cols(), "loss: n must lie in 1..N");
}

/// Standardized squared error over the first n columns.
inline double loss_ss(const EstimateMatrix& d, const ModelParams& p, std::size_t n) {
    check_loss_shape(d, p, n);
    double s = 0.0;
    for (std::size_t nu = 0; nu < n; ++nu)
        for (std::size_t i = 0; i < p.m(); ++i) {
            const double e = d(i, nu) - p.p(i, nu);
            s += e * e / p.p(i, nu);
        }
    return s;
}

/// Kullback-Leibler type loss sum (d - p - p log(d / p)) over the first n columns.
inline double loss_kl(const EstimateMatrix& d, const ModelParams& p, std::size_t n) {
    check_loss_shape(d, p, n);
    double s = 0.0;
    for (std::size_t nu = 0; nu < n; ++nu)
        for (std::size_t i = 0; i < p.m(); ++i) {
            const double di = d(i, nu);
            if (!(di > 0.0)) throw InputError("loss_kl: estimates must be strictly positive");
            const double pi = p.p(i, nu);
            s += di - pi - pi * std::log(di / pi);
        }
    return s;
}

inline double loss(LossKind kind, const EstimateMatrix& d, const ModelParams& p, std::size_t n) {
    return kind == LossKind::ss ? loss_ss(d, p, n) : loss_kl(d, p, n);
}

/// 100 (risk_ref - risk) / risk_ref.
inline double prial(double risk_ref, double risk) {
    require_input(risk_ref > 0.0, "prial: reference risk must be positive");
    return 100.0 * (risk_ref - risk) / risk_ref;
}

/// A named estimator. The stream is private to the (replication, estimator)
/// pair; deterministic estimators ignore it.
struct Estimator {
    std::string name;
    std::function<EstimateMatrix(const CountMatrix&, RandomStream&)> fn;
};

struct EstimatorOptions {
    double r = 1.0;
    /// alpha, beta, g for hb and hb-pm; a0, a for dir-pm and hb-pm.
    PriorSpec prior;
    KernelSettings kernel;
    /// Chain used by hb-gibbs.
    gibbs::ChainConfig chain{6000, 1000, 0, 1};
};

inline const std::vector<std::string>& estimator_names() {
    static const std::vector<std::string> names{"umvu", "eb0", "eb", "hb", "dir-pm", "hb-pm", "hb-gibbs"};
    return names;
}

/// Builds one of umvu, eb0, eb, hb, dir-pm, hb-pm, hb-gibbs.
///
/// hb-gibbs plugs the direct chain average 1 / mean(1 / p) in place of the
/// quadrature rule. It is stochastic, and nonzero where the counts are zero.
inline Estimator make_estimator(const std::string& name, const EstimatorOptions& o) {
    const double r = o.r;
    if (name == "umvu") return {name, [r](const CountMatrix& X, RandomStream&) { return umvu(X, r); }};
    if (name == "eb0") return {name, [r](const CountMatrix& X, RandomStream&) { return eb0(X, r); }};
    if (name == "eb") return {name, [r](const CountMatrix& X, RandomStream&) { return eb(X, r); }};
    const PriorSpec prior = o.prior;
    const KernelSettings ks = o.kernel;
    if (name == "hb") {
        return {name, [r, prior, ks](const CountMatrix& X, RandomStream&) {
                    return hb(X, r, prior.alpha, prior.beta, prior.g, ks);
                }};
    }
    if (name == "dir-pm") {
        return {name, [r, prior](const CountMatrix& X, RandomStream&) {
                    return dirichlet_posterior_mean(X, r, prior.a0, prior.a);
                }};
    }
    if (name == "hb-pm") {
        return {name,
                [r, prior, ks](const CountMatrix& X, RandomStream&) { return hb_posterior_mean(X, r, prior, ks); }};
    }
    if (name == "hb-gibbs") {
        const gibbs::ChainConfig chain = o.chain;
        return {name, [r, prior, chain](const CountMatrix& X, RandomStream& rng) {
                    gibbs::ChainConfig c = chain;
                    c.seed = rng.key();
                    const auto draws =
                        gibbs::posterior_chain(X, r, gibbs::ss_geometry(prior.alpha, prior.beta, X.m()), c);
                    return gibbs::raw_inverse_mean(draws);
                }};
    }
    throw InputError("unknown estimator '" + name + "'");
}

struct RiskReport {
    std::string estimator_name;
    double risk = 0.0;
    double mc_stderr = 0.0;
    double prial_vs_reference = 0.0;
    /// sqrt(se^2 + se_ref^2).
    double pooled_stderr = 0.0;
    /// s.e. of the paired loss difference against the reference.
    double paired_stderr = 0.0;
};

struct RiskConfig {
    LossKind loss = LossKind::ss;
    /// Number of leading columns in the loss; 0 means all N.
    std::size_t n = 0;
    std::size_t reps = 1000;
    std::uint64_t seed = 42;
    std::size_t jobs = 1;
    /// Index into the estimator list of the PRIAL reference.
    std::size_t reference = 0;
};

/// Per-replication losses, reps x estimators.
struct LossTable {
    std::size_t reps = 0;
    std::size_t n_est = 0;
    std::vector<double> values;  // row-major by replication

    [[nodiscard]] double at(std::size_t rep, std::size_t e) const { return values[rep * n_est + e]; }
};

namespace detail {

[[noreturn]] inline void rethrow_with_replication(std::exception_ptr ep, std::size_t rep) {
    const std::string where = "replication " + std::to_string(rep) + ": ";
    try {
        std::rethrow_exception(ep);
    } catch (const ConditionViolation& e) {
        throw ConditionViolation(where + e.what());
    } catch (const NumericalError& e) {
        throw NumericalError(where + e.what());
    } catch (const InputError& e) {
        throw InputError(where + e.what());
    } catch (const std::exception& e) {
        throw NumericalError(where + e.what());
    }
}

}  // namespace detail

/// Loss of every estimator on every replication. Replication k draws X from
/// RandomStream(seed).split(k).split(0) and hands estimator e the stream
/// split(k).split(1 + e), so the table does not depend on `jobs`.
inline LossTable simulate_losses(const std::vector<Estimator>& estimators, const ModelParams& truth,
                                 const RiskConfig& cfg) {
    require_input(!estimators.empty(), "risk_mc: no estimators");
    require_input(cfg.reps >= 2, "risk_mc: reps must be at least 2");
    const std::size_t n = cfg.n == 0 ? truth.n_cols() : cfg.n;
    require_input(n >= 1 && n <= truth.n_cols(), "risk_mc: n must lie in 1..N");

    LossTable table{cfg.reps, estimators.size(), std::vector<double>(cfg.reps * estimators.size())};
    const RandomStream root(cfg.seed);
    const std::size_t jobs = std::max<std::size_t>(1, std::min(cfg.jobs, cfg.reps));
    std::vector<std::exception_ptr> errors(jobs);
    std::vector<std::size_t> error_rep(jobs, cfg.reps);

    auto work = [&](std::size_t worker) {
        for (std::size_t k = worker; k < cfg.reps; k += jobs) {
            try {
                const RandomStream rep = root.split(k);
                RandomStream data = rep.split(0);
                const CountMatrix X = nm_sample_matrix(truth, data);
                for (std::size_t e = 0; e < estimators.size(); ++e) {
                    RandomStream own = rep.split(1 + e);
                    const EstimateMatrix d = estimators[e].fn(X, own);
                    table.values[k * estimators.size() + e] = loss(cfg.loss, d, truth, n);
                }
            } catch (...) {
                errors[worker] = std::current_exception();
                error_rep[worker] = k;
                return;
            }
        }
    };
    if (jobs == 1) {
        work(0);
    } else {
        std::vector<std::thread> pool;
        for (std::size_t w = 0; w < jobs; ++w) pool.emplace_back(work, w);
        for (auto& th : pool) th.join();
    }
    std::size_t first = jobs;
    for (std::size_t w = 0; w < jobs; ++w)
        if (errors[w] && (first == jobs || error_rep[w] < error_rep[first])) first = w;
    if (first != jobs) detail::rethrow_with_replication(errors[first], error_rep[first]);
    return table;
}

/// Summarizes a loss table. Sums run in replication order.
inline std::vector<RiskReport> summarize(const LossTable& t, const std::vector<Estimator>& estimators,
                                         std::size_t reference) {
    require_input(reference < t.n_est, "risk_mc: reference index out of range");
    const double reps = static_cast<double>(t.reps);
    auto mean_sd = [&](auto&& f) {
        long double s = 0.0L;
        for (std::size_t k = 0; k < t.reps; ++k) s += f(k);
        const double mean = static_cast<double>(s / t.reps);
        long double ss = 0.0L;
        for (std::size_t k = 0; k < t.reps; ++k) {
            const double dv = f(k) - mean;
            ss += dv * dv;
        }
        return std::pair<double, double>{mean, std::sqrt(static_cast<double>(ss / (t.reps - 1)))};
    };
    const auto [ref_mean, ref_sd] = mean_sd([&](std::size_t k) { return t.at(k, reference); });
    const double ref_se = ref_sd / std::sqrt(reps);
    std::vector<RiskReport> out;
    for (std::size_t e = 0; e < t.n_est; ++e) {
        const auto [mean, sd] = mean_sd([&](std::size_t k) { return t.at(k, e); });
        const auto diff = mean_sd([&](std::size_t k) { return t.at(k, reference) - t.at(k, e); });
        RiskReport r;
        r.estimator_name = estimators[e].name;
        r.risk = mean;
        r.mc_stderr = sd / std::sqrt(reps);
        r.prial_vs_reference = ref_mean > 0.0 ? prial(ref_mean, mean) : 0.0;
        r.pooled_stderr = std::sqrt(r.mc_stderr * r.mc_stderr + ref_se * ref_se);
        r.paired_stderr = diff.second / std::sqrt(reps);
        out.push_back(std::move(r));
    }
    return out;
}

/// Monte Carlo risk of several estimators on one truth with common random numbers.
inline std::vector<RiskReport> risk_mc(const std::vector<Estimator>& estimators, const ModelParams& truth,
                                       const RiskConfig& cfg) {
    return summarize(simulate_losses(estimators, truth, cfg), estimators, cfg.reference);
}

/// One truth of the simulation study.
struct Scenario {
    std::string name;       // e.g. "p1(2)"
    std::string case_name;  // "i", "ii" or "iii"
    ModelParams params;
    double alpha_hb;
};

namespace detail {

inline ModelParams preset(double r, const std::vector<std::vector<double>>& cols) {
    std::vector<ProbColumn> pc;
    for (const auto& c : cols) pc.emplace_back(c);
    return ModelParams(r, std::move(pc));
}

}  // namespace detail

/// The nine truths p1(1..3), p2(1..3), p3(1..3).
inline std::vector<Scenario> scenario_presets() {
    using V = std::vector<double>;
    auto fill = [](std::size_t m, double v) { return V(m, v); };
    auto scale = [](V v, double d) {
        for (auto& x : v) x /= d;
        return v;
    };
    const V up7 = scale({1, 1, 1, 1, 2, 2, 2}, 12.0);
    const V down7 = scale({2, 2, 2, 2, 1, 1, 1}, 12.0);
    const V up3 = scale({1, 1, 2}, 6.0);
    const V down3 = scale({2, 2, 1}, 6.0);
    const V q7 = fill(7, 0.125);
    const V q3 = fill(3, 0.25);
    const V h = {0.5};
    const V third = {1.0 / 3.0};
    const V two_thirds = {2.0 / 3.0};

    std::vector<Scenario> out;
    out.push_back({"p1(1)", "i", detail::preset(8, {q7, q7, q7}), 14});
    out.push_back({"p1(2)", "i", detail::preset(8, {up7, q7, up7}), 14});
    out.push_back({"p1(3)", "i", detail::preset(8, {up7, q7, down7}), 14});
    out.push_back({"p2(1)", "ii", detail::preset(4, std::vector<V>(7, q3)), 6});
    out.push_back({"p2(2)", "ii", detail::preset(4, {up3, up3, q3, q3, q3, up3, up3}), 6});
    out.push_back({"p2(3)", "ii", detail::preset(4, {up3, up3, q3, q3, q3, down3, down3}), 6});
    out.push_back({"p3(1)", "iii", detail::preset(2, std::vector<V>(7, h)), 6});
    out.push_back({"p3(2)", "iii", detail::preset(2, {third, third, h, h, h, third, third}), 6});
    out.push_back({"p3(3)", "iii", detail::preset(2, {third, third, h, h, h, two_thirds, two_thirds}), 6});
    return out;
}

inline std::vector<Scenario> scenarios_of_case(const std::string& case_name) {
    std::vector<Scenario> out;
    for (auto& s : scenario_presets())
        if (s.case_name == case_name) out.push_back(std::move(s));
    require_input(!out.empty(), "unknown scenario case '" + case_name + "'");
    return out;
}

/// Risk of the named estimators on each truth of one case, with the HB
/// prior set as in the simulation study (alpha of the case, beta = 1, g = 1).
struct CaseTableRow {
    Scenario scenario;
    std::vector<RiskReport> reports;
};

inline std::vector<CaseTableRow> case_table(const std::string& case_name, const std::vector<std::string>& names,
                                            const RiskConfig& cfg, const EstimatorOptions& base = {}) {
    std::vector<CaseTableRow> out;
    for (auto& sc : scenarios_of_case(case_name)) {
        EstimatorOptions o = base;
        o.r = sc.params.r();
        o.prior.alpha = sc.alpha_hb;
        o.prior.beta = 1.0;
        o.prior.g = GChoice::constant_one();
        if (o.prior.a.empty()) {
            o.prior.a0 = -static_cast<double>(sc.params.m());
            o.prior.a.assign(sc.params.m(), 1.0);
        }
        std::vector<Estimator> est;
        for (const auto& n : names) est.push_back(make_estimator(n, o));
        auto reports = risk_mc(est, sc.params, cfg);
        out.push_back({std::move(sc), std::move(reports)});
    }
    return out;
}

enum class HudsonKind { zero, indicator, linear, umvu_ratio };

struct HudsonResult {
    double lhs = 0.0;
    double rhs = 0.0;
    bool pass = false;
    /// Largest column total enumerated.
    Count support = 0;
};

namespace detail {

// Smallest S such that sum_{s > S} (r + s + 1)(s + 2) P(X.nu = s) / p_min is
// below `bound`, using the eventual geometric decay of the terms.
inline Count hudson_truncation(double r, double p0, double p_min, double bound, Count cap) {
    const double q = 1.0 - p0;
    double log_p = r * std::log(p0);  // log P(X.nu = 0)
    for (Count s = 0; s < cap; ++s) {
        const double sd = static_cast<double>(s);
        const double ratio_p = (r + sd) / (sd + 1.0) * q;
        const double w = (r + sd + 2.0) * (sd + 3.0) / p_min;
        const double w_next = (r + sd + 3.0) * (sd + 4.0) / p_min;
        const double ratio = ratio_p * w_next / w;
        log_p += std::log(ratio_p);  // now log P(X.nu = s + 1)
        if (ratio < 1.0) {
            // terms beyond s + 1 decay at least geometrically with this ratio
            const double tail = std::exp(log_p) * w / (1.0 - ratio);
            if (tail < bound) return s + 1;
        }
    }
    throw NumericalError("hudson_check: truncation bound unattainable within the support cap");
}

inline double hudson_h(HudsonKind kind, const CountMatrix& X, double r, std::size_t i, std::size_t nu) {
    const Count x = X(i, nu);
    switch (kind) {
        case HudsonKind::zero:
            return 0.0;
        case HudsonKind::indicator:
            return x >= 1 ? 1.0 : 0.0;
        case HudsonKind::linear:
            return static_cast<double>(x);
        case HudsonKind::umvu_ratio:
            return x == 0 ? 0.0 : static_cast<double>(x) / (r + static_cast<double>(X.col_sum(nu)) - 1.0);
    }
    return 0.0;
}

// Calls f(x_col) for every count vector of length m with total <= S.
template <class F>
void for_each_column(std::size_t m, Count S, std::vector<Count>& x, std::size_t pos, Count left, const F& f) {
    if (pos == m) {
        f(x);
        return;
    }
    for (Count v = 0; v <= left; ++v) {
        x[pos] = v;
        for_each_column(m, S, x, pos + 1, left - v, f);
    }
    x[pos] = 0;
}

}  // namespace detail

/// Checks E[h(X) / p_{i,nu}] = E[(r + X.nu) / (X_{i,nu} + 1) h(X + e_{i,nu})]
/// by exact enumeration over a truncated support (m <= 2, N <= 2).
inline HudsonResult hudson_check(HudsonKind kind, const ModelParams& params, std::size_t i, std::size_t nu,
                                 double tol) {
    const std::size_t m = params.m();
    const std::size_t N = params.n_cols();
    require_input(m <= 2 && N <= 2, "hudson_check: enumeration supports m <= 2 and N <= 2");
    require_input(i < m && nu < N, "hudson_check: index out of range");
    require_input(tol > 0.0, "hudson_check: tol must be positive");
    const double r = params.r();

    std::vector<Count> S(N);
    std::vector<std::vector<std::pair<std::vector<Count>, double>>> support(N);
    HudsonResult out;
    for (std::size_t k = 0; k < N; ++k) {
        const ProbColumn& pc = params.column(k);
        const double p_min = *std::min_element(pc.p().begin(), pc.p().end());
        S[k] = detail::hudson_truncation(r, pc.p0(), p_min, tol / (10.0 * static_cast<double>(N)), 1 << 20);
        out.support = std::max(out.support, S[k]);
        std::vector<Count> x(m, 0);
        detail::for_each_column(m, S[k], x, 0, S[k], [&](const std::vector<Count>& v) {
            support[k].emplace_back(v, std::exp(nm_log_pmf(v, r, pc)));
        });
    }

    long double lhs = 0.0L;
    long double rhs = 0.0L;
    const double p_inu = params.p(i, nu);
    CountMatrix X(m, N);
    auto visit = [&](double prob) {
        const double h = detail::hudson_h(kind, X, r, i, nu);
        lhs += prob * h / p_inu;
        const Count x = X(i, nu);
        CountMatrix Y = X;
        Y.set(i, nu, x + 1);
        rhs += prob * (r + static_cast<double>(X.col_sum(nu))) / static_cast<double>(x + 1) *
               detail::hudson_h(kind, Y, r, i, nu);
    };
    std::function<void(std::size_t, double)> rec = [&](std::size_t k, double prob) {
        if (k == N) {
            visit(prob);
            return;
        }
        for (const auto& [v, pr] : support[k]) {
            for (std::size_t j = 0; j < m; ++j) X.set(j, k, v[j]);
            rec(k + 1, prob * pr);
        }
    };
    rec(0, 1.0);
    out.lhs = static_cast<double>(lhs);
    out.rhs = static_cast<double>(rhs);
    out.pass = std::abs(out.lhs - out.rhs) <= tol;
    return out;
}

}  // namespace nmshrink
