#include <gtest/gtest.h>

#include <cmath>
#include <vector>

#include "nmshrink/risk.hpp"

using namespace nmshrink;

namespace {

ModelParams two_by_two() { return ModelParams(3.0, {ProbColumn({0.2, 0.1}), ProbColumn({0.3, 0.25})}); }

}  // namespace

TEST(LossSs, Examples) {
    const ModelParams p = two_by_two();
    EXPECT_EQ(loss_ss(p.as_matrix(), p, 2), 0.0);
    const ModelParams one(2.0, {ProbColumn({0.5})});
    EXPECT_DOUBLE_EQ(loss_ss(Matrix(1, 1), one, 1), 0.5);
    Matrix d(2, 2);
    d(0, 0) = 0.1;
    d(1, 0) = 0.3;
    d(0, 1) = 0.5;
    d(1, 1) = 0.05;
    const double first = 0.01 / 0.2 + 0.04 / 0.1;
    const double second = 0.04 / 0.3 + 0.04 / 0.25;
    EXPECT_NEAR(loss_ss(d, p, 1), first, 1e-15);
    EXPECT_NEAR(loss_ss(d, p, 2), first + second, 1e-15);
    EXPECT_THROW(loss_ss(d, p, 0), InputError);
    EXPECT_THROW(loss_ss(d, p, 3), InputError);
}

TEST(LossKl, Examples) {
    const ModelParams p = two_by_two();
    EXPECT_NEAR(loss_kl(p.as_matrix(), p, 2), 0.0, 1e-16);
    const ModelParams one(2.0, {ProbColumn({0.3})});
    Matrix d(1, 1, 0.6);
    EXPECT_NEAR(loss_kl(d, one, 1), 0.3 * (1.0 - std::log(2.0)), 1e-15);
    EXPECT_THROW(loss_kl(Matrix(1, 1), one, 1), InputError);
}

TEST(LossKl, PosteriorMeanMinimizesExpectedLoss) {
    // For p ~ Beta-like draws, the minimizer of E[d - p - p log(d / p)] over d is E[p].
    RandomStream rng(8);
    std::vector<double> draws(20000);
    double mean = 0.0;
    for (auto& v : draws) {
        v = gen_dirichlet_sample(2.0, std::vector<double>{1.5}, rng)[0];
        mean += v / draws.size();
    }
    auto risk = [&](double d) {
        double s = 0.0;
        for (double p : draws) s += d - p - p * std::log(d / p);
        return s / draws.size();
    };
    double best = 0.0, best_r = 1e300;
    for (int k = 1; k < 2000; ++k) {
        const double d = k / 2000.0;
        if (risk(d) < best_r) {
            best_r = risk(d);
            best = d;
        }
    }
    EXPECT_NEAR(best, mean, 1e-3);
}

TEST(Prial, Arithmetic) {
    EXPECT_EQ(prial(1.3, 1.3), 0.0);
    EXPECT_DOUBLE_EQ(prial(2.0, 1.5), 25.0);
    EXPECT_NEAR(prial(1.34, 1.00), 25.373, 1e-3);
    EXPECT_THROW(prial(0.0, 1.0), InputError);
}

TEST(Scenarios, Presets) {
    const auto all = scenario_presets();
    ASSERT_EQ(all.size(), 9u);
    EXPECT_EQ(all[0].name, "p1(1)");
    EXPECT_EQ(all[0].params.m(), 7u);
    EXPECT_EQ(all[0].params.n_cols(), 3u);
    EXPECT_EQ(all[0].params.r(), 8.0);
    EXPECT_EQ(all[0].alpha_hb, 14.0);
    for (std::size_t nu = 0; nu < 3; ++nu)
        for (std::size_t i = 0; i < 7; ++i) EXPECT_EQ(all[0].params.p(i, nu), 0.125);
    const auto& p32 = all[7].params;
    EXPECT_EQ(all[7].name, "p3(2)");
    const double expected[7] = {1.0 / 3, 1.0 / 3, 0.5, 0.5, 0.5, 1.0 / 3, 1.0 / 3};
    for (std::size_t nu = 0; nu < 7; ++nu) EXPECT_DOUBLE_EQ(p32.p(0, nu), expected[nu]);
    EXPECT_NEAR(all[1].params.column(0).p0(), 1.0 - 10.0 / 12.0, 1e-15);
    EXPECT_EQ(scenarios_of_case("ii").size(), 3u);
    EXPECT_THROW(scenarios_of_case("iv"), InputError);
}

TEST(RiskMc, CommonRandomNumbersAndDeterminism) {
    const auto sc = scenarios_of_case("i")[0];
    EstimatorOptions o;
    o.r = sc.params.r();
    o.prior.alpha = sc.alpha_hb;
    o.prior.beta = 1.0;
    std::vector<Estimator> est{make_estimator("umvu", o), make_estimator("eb", o), make_estimator("umvu", o)};
    RiskConfig cfg;
    cfg.reps = 200;
    cfg.seed = 5;
    const auto a = risk_mc(est, sc.params, cfg);
    cfg.jobs = 3;
    const auto b = risk_mc(est, sc.params, cfg);
    ASSERT_EQ(a.size(), 3u);
    for (std::size_t k = 0; k < 3; ++k) {
        EXPECT_EQ(a[k].risk, b[k].risk);
        EXPECT_EQ(a[k].mc_stderr, b[k].mc_stderr);
    }
    // The same estimator twice sees identical data.
    EXPECT_EQ(a[0].risk, a[2].risk);
    EXPECT_EQ(a[2].prial_vs_reference, 0.0);
    EXPECT_EQ(a[2].paired_stderr, 0.0);
    EXPECT_GT(a[1].prial_vs_reference, 0.0);
}

TEST(RiskMc, TwoReplicationsAndErrors) {
    const ModelParams p(2.0, {ProbColumn({0.5})});
    EstimatorOptions o;
    o.r = 2.0;
    RiskConfig cfg;
    cfg.reps = 2;
    const auto rep = risk_mc({make_estimator("umvu", o)}, p, cfg);
    EXPECT_TRUE(std::isfinite(rep[0].mc_stderr));
    cfg.reps = 1;
    EXPECT_THROW(risk_mc({make_estimator("umvu", o)}, p, cfg), InputError);
    EXPECT_THROW(make_estimator("nope", o), InputError);
    // UMVU has zero entries, so the KL loss fails on the first replication.
    cfg.reps = 10;
    cfg.loss = LossKind::kl;
    try {
        risk_mc({make_estimator("umvu", o)}, p, cfg);
        FAIL();
    } catch (const InputError& e) {
        EXPECT_NE(std::string(e.what()).find("replication"), std::string::npos);
    }
}

TEST(RiskMc, PartialLossUsesLeadingColumns) {
    const auto sc = scenarios_of_case("ii")[1];
    EstimatorOptions o;
    o.r = sc.params.r();
    RiskConfig full;
    full.reps = 100;
    RiskConfig part = full;
    part.n = 2;
    const auto f = risk_mc({make_estimator("umvu", o)}, sc.params, full);
    const auto q = risk_mc({make_estimator("umvu", o)}, sc.params, part);
    EXPECT_LT(q[0].risk, f[0].risk);
}

TEST(Hudson, IndicatorAndZero) {
    const ModelParams p(2.0, {ProbColumn({0.4})});
    const auto ind = hudson_check(HudsonKind::indicator, p, 0, 0, 1e-8);
    EXPECT_TRUE(ind.pass) << ind.lhs << " " << ind.rhs;
    EXPECT_NEAR(ind.lhs, ind.rhs, 1e-8);
    const auto z = hudson_check(HudsonKind::zero, p, 0, 0, 1e-8);
    EXPECT_EQ(z.lhs, 0.0);
    EXPECT_EQ(z.rhs, 0.0);
}

TEST(Hudson, UmvuRatioGivesUnbiasedness) {
    // h = X / (r + X. - 1): lhs = E[h] / p, rhs = E[(r + X.)/(X + 1) h(X + e)] = 1.
    const ModelParams p(2.5, {ProbColumn({0.3, 0.2})});
    const auto res = hudson_check(HudsonKind::umvu_ratio, p, 1, 0, 1e-8);
    EXPECT_TRUE(res.pass);
    EXPECT_NEAR(res.rhs, 1.0, 1e-8);
    EXPECT_NEAR(res.lhs, 1.0, 1e-8);
}

TEST(Hudson, TwoColumnsAndLimits) {
    const ModelParams p(2.0, {ProbColumn({0.3}), ProbColumn({0.6})});
    EXPECT_TRUE(hudson_check(HudsonKind::linear, p, 0, 1, 1e-8).pass);
    const ModelParams big(2.0, {ProbColumn({0.1, 0.1, 0.1})});
    EXPECT_THROW(hudson_check(HudsonKind::linear, big, 0, 0, 1e-8), InputError);
}
