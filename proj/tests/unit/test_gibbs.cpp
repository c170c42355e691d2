#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include "nmshrink/gibbs.hpp"
#include "nmshrink/kernel.hpp"

using namespace nmshrink;
using namespace nmshrink::gibbs;

namespace {

const GChoice g1 = GChoice::constant_one();

double mean_of(const std::vector<double>& v) { return std::accumulate(v.begin(), v.end(), 0.0) / v.size(); }

double sd_of(const std::vector<double>& v) {
    const double mu = mean_of(v);
    double s = 0.0;
    for (double x : v) s += (x - mu) * (x - mu);
    return std::sqrt(s / (v.size() - 1.0));
}

// Draws t from its marginal prior density by inversion of a fine grid CDF
// in u = log t; the density is the kernel integrand with xi0 = a0, xi = a. 1.
class MarginalTSampler {
public:
    MarginalTSampler(double alpha, double beta, double a0, double a_dot, std::size_t n_cols) {
        const std::vector<double> xi(n_cols, a_dot);
        const detail::KernelIntegrand f(alpha, beta, g1, a0, xi, {});
        const int n = 200000;
        const double lo = -40.0, hi = 8.0;
        u_.resize(n);
        cdf_.resize(n);
        std::vector<double> lf(n);
        for (int k = 0; k < n; ++k) {
            u_[k] = lo + (hi - lo) * k / (n - 1.0);
            lf[k] = f(u_[k]);
        }
        const double mx = *std::max_element(lf.begin(), lf.end());
        double acc = 0.0;
        cdf_[0] = 0.0;
        for (int k = 1; k < n; ++k) {
            acc += 0.5 * (std::exp(lf[k] - mx) + std::exp(lf[k - 1] - mx)) * (u_[k] - u_[k - 1]);
            cdf_[k] = acc;
        }
        for (double& c : cdf_) c /= acc;
    }
    double operator()(RandomStream& rng) const {
        const double v = rng.uniform();
        const auto it = std::lower_bound(cdf_.begin(), cdf_.end(), v);
        const std::size_t k = std::max<std::size_t>(1, it - cdf_.begin());
        const double w = (v - cdf_[k - 1]) / (cdf_[k] - cdf_[k - 1]);
        return std::exp(u_[k - 1] + w * (u_[k] - u_[k - 1]));
    }

private:
    std::vector<double> u_;
    std::vector<double> cdf_;
};

CountMatrix case1_counts() {
    auto X = CountMatrix(7, 3);
    const Count vals[7][3] = {{2, 1, 0}, {1, 3, 2}, {0, 1, 1}, {3, 0, 2}, {1, 2, 1}, {2, 1, 3}, {1, 2, 1}};
    for (int i = 0; i < 7; ++i)
        for (int nu = 0; nu < 3; ++nu) X.set(i, nu, vals[i][nu]);
    return X;
}

}  // namespace

TEST(GibbsConditionals, MatchJointUpToConstants) {
    Conditionals c{3.5, 0.7, 1.3, Matrix(3, 2)};
    const double a[6] = {0.5, 2.0, 1.5, 3.0, 0.8, 1.1};
    for (int k = 0; k < 6; ++k) c.a_cols.col(k / 3)[k % 3] = a[k];
    RandomStream rng(1);
    auto s = initial_state(c, rng);
    // t-conditional: differences in t of the joint equal those of the gamma density.
    for (int rep = 0; rep < 20; ++rep) {
        s = gibbs_step(s, c, rng);
        GibbsState u = s;
        u.t = s.t * (0.5 + rng.uniform());
        EXPECT_NEAR(log_joint_density(u, c) - log_joint_density(s, c),
                    log_t_conditional(u, c) - log_t_conditional(s, c), 1e-9);
        // p-conditional: move p, keep t.
        GibbsState v = s;
        const auto other = gibbs_step(s, c, rng);
        v.p = other.p;
        v.log_p0 = other.log_p0;
        EXPECT_NEAR(log_joint_density(v, c) - log_joint_density(s, c),
                    log_p_conditional(v, c) - log_p_conditional(s, c), 1e-9);
    }
}

TEST(GibbsChain, SeededDeterminismAndShape) {
    const auto X = case1_counts();
    const auto prior = ss_geometry(14, 1, 7);
    ChainConfig cfg{1000, 200, 9, 3};
    const auto a = posterior_chain(X, 8.0, prior, cfg);
    const auto b = posterior_chain(X, 8.0, prior, cfg);
    ASSERT_EQ(a.size(), (1000u - 200u + 2u) / 3u);
    EXPECT_EQ(a.size(), cfg.kept());
    for (std::size_t k = 0; k < a.size(); ++k) {
        EXPECT_EQ(a[k].t, b[k].t);
        EXPECT_EQ(a[k].p, b[k].p);
    }
    EXPECT_THROW(posterior_chain(X, 8.0, prior, ChainConfig{10, 10, 1, 1}), InputError);
    EXPECT_THROW(posterior_chain(X, 8.0, prior, ChainConfig{10, 1, 1, 0}), InputError);
}

TEST(GibbsChain, PosteriorMeanOfTIsDeltaHb) {
    const auto X = case1_counts();
    const double r = 8.0;
    const auto chain = posterior_chain(X, r, ss_geometry(14, 1, 7), ChainConfig{100000, 50000, 21, 1});
    const auto t = t_trace(chain);
    const double ess = effective_sample_size(t);
    const double est = mcmc_delta_estimate(chain, DeltaMode::ss());
    const double exact = delta_hb(14, 1, g1, r, 7, X.col_sums());
    EXPECT_NEAR(est / exact, 1.0, 0.02);
    // Stationarity: within 3 Monte Carlo standard errors.
    EXPECT_NEAR(est, exact, 3.0 * sd_of(t) / std::sqrt(ess));
    EXPECT_GT(ess, 1000.0);
}

TEST(GibbsChain, KlRatioIsDeltaNu) {
    const auto X = case1_counts();
    const double r = 8.0;
    PriorSpec prior{5, 1, g1, -3.0, std::vector<double>(7, 0.5)};
    const auto chain = posterior_chain(X, r, prior, ChainConfig{100000, 50000, 5, 1});
    for (std::size_t nu = 0; nu < 3; ++nu) {
        const double est = mcmc_delta_estimate(chain, DeltaMode::kl(kl_offset(X, r, prior, nu)));
        const double exact = delta_nu(5, 1, g1, r, -3.0, 3.5, X.col_sums(), nu);
        EXPECT_NEAR(est / exact, 1.0, 0.02) << nu;
    }
}

TEST(GibbsChain, HugeBetaRecoversDirichletMean) {
    const auto X = CountMatrix::from_rows({{3, 0}, {1, 2}});
    PriorSpec prior{1, 1e8, g1, 0.5, {1.0, 1.0}};
    const auto chain = posterior_chain(X, 3.0, prior, ChainConfig{60000, 1000, 4, 1});
    const auto pm = posterior_mean_p(chain);
    for (std::size_t nu = 0; nu < 2; ++nu)
        for (std::size_t i = 0; i < 2; ++i) {
            const double exact = (X(i, nu) + 1.0) / (3.0 + 0.5 + X.col_sum(nu) + 2.0);
            EXPECT_NEAR(pm(i, nu), exact, 0.01);
        }
}

TEST(GibbsChain, PriorMarginalMatchesDirectMixture) {
    const double alpha = 2.0, beta = 1.0, a0 = 1.0;
    const std::vector<double> a{1.0, 2.0};
    const std::size_t N = 2;
    PriorSpec prior{alpha, beta, g1, a0, a};
    const auto chain = prior_chain(prior, N, ChainConfig{220000, 20000, 8, 1});
    const MarginalTSampler draw_t(alpha, beta, a0, 3.0, N);
    RandomStream rng(77);
    const int n_direct = 200000;
    for (std::size_t i = 0; i < 2; ++i) {
        std::vector<double> g(chain.size()), d(n_direct);
        for (std::size_t k = 0; k < chain.size(); ++k) g[k] = chain[k].p(i, 0);
        for (int k = 0; k < n_direct; ++k) {
            const double t = draw_t(rng);
            d[k] = gen_dirichlet_sample(t + a0, a, rng)[i];
        }
        const double se =
            std::sqrt(std::pow(sd_of(g), 2) / effective_sample_size(g) + std::pow(sd_of(d), 2) / n_direct);
        EXPECT_NEAR(mean_of(g), mean_of(d), 4.0 * se) << i;
        std::vector<double> g2(g.size()), d2(d.size());
        std::transform(g.begin(), g.end(), g2.begin(), [](double x) { return x * x; });
        std::transform(d.begin(), d.end(), d2.begin(), [](double x) { return x * x; });
        const double se2 =
            std::sqrt(std::pow(sd_of(g2), 2) / effective_sample_size(g2) + std::pow(sd_of(d2), 2) / n_direct);
        EXPECT_NEAR(mean_of(g2), mean_of(d2), 4.0 * se2) << i;
    }
}

TEST(GibbsChain, RefusesImproperPrior) {
    // min{max{a0, alpha - N}, max{N a. - alpha, beta}}: beta = 0 and alpha >= N a. fails.
    PriorSpec p{6.0, 0.0, g1, 1.0, {1.0, 1.0}};
    EXPECT_FALSE(joint_prior_proper(6.0, 0.0, 1.0, 2.0, 3));
    EXPECT_THROW(prior_chain(p, 3, ChainConfig{10, 1, 1, 1}), ConditionViolation);
    EXPECT_TRUE(joint_prior_proper(5.9, 0.0, 1.0, 2.0, 3));
    // a0 = 0 with alpha <= N fails the first branch.
    EXPECT_FALSE(joint_prior_proper(2.0, 1.0, 0.0, 2.0, 3));
    EXPECT_TRUE(joint_prior_proper(3.5, 1.0, 0.0, 2.0, 3));
    PriorSpec k{2.0, 1.0, GChoice::komaki(0.5, 1.0), 1.0, {1.0}};
    EXPECT_THROW(prior_chain(k, 1, ChainConfig{10, 1, 1, 1}), InputError);
    const auto X = CountMatrix::from_rows({{1}});
    PriorSpec bad{2.0, 1.0, g1, -3.0, {1.0}};
    EXPECT_THROW(posterior_chain(X, 2.0, bad, ChainConfig{10, 1, 1, 1}), ConditionViolation);
}

TEST(GibbsEstimates, ConstantChainAndEss) {
    std::vector<GibbsState> chain(10, GibbsState{Matrix(1, 1, 0.5), {std::log(0.5)}, 2.5});
    EXPECT_DOUBLE_EQ(mcmc_delta_estimate(chain, DeltaMode::ss()), 2.5);
    EXPECT_DOUBLE_EQ(mcmc_delta_estimate(chain, DeltaMode::kl(3.0)), 2.5);
    EXPECT_THROW(mcmc_delta_estimate(std::vector<GibbsState>{}, DeltaMode::ss()), InputError);
    // An AR(1) chain with coefficient phi has ESS close to n (1 - phi) / (1 + phi).
    RandomStream rng(4);
    std::vector<double> x(200000);
    double v = 0.0;
    for (auto& e : x) e = v = 0.8 * v + rng.normal();
    EXPECT_NEAR(effective_sample_size(x) / (x.size() / 9.0), 1.0, 0.1);
}

TEST(GibbsEstimates, ZeroCountInverseMean) {
    const auto X = CountMatrix::from_rows({{0, 2}, {3, 1}});
    const auto cond = posterior_conditionals(X, 3.0, ss_geometry(2.0, 1.0, 2));
    const auto chain = run_chain(cond, ChainConfig{3000, 500, 2, 1});
    const auto rb = rao_blackwell_inverse_mean(chain, cond);
    const auto raw = raw_inverse_mean(chain);
    EXPECT_EQ(rb(0, 0), 0.0);
    EXPECT_GT(raw(0, 0), 0.0);
    EXPECT_GT(rb(1, 0), 0.0);
}
