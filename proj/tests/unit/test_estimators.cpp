#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <vector>

#include "nmshrink/estimators.hpp"
#include "nmshrink/gibbs.hpp"

using namespace nmshrink;

namespace {

const GChoice g1 = GChoice::constant_one();

CountMatrix column(std::vector<Count> x) {
    std::vector<std::vector<Count>> rows;
    for (Count v : x) rows.push_back({v});
    return CountMatrix::from_rows(rows);
}

CountMatrix seeded_case1_counts() {
    std::vector<ProbColumn> cols(3, ProbColumn(std::vector<double>(7, 0.125)));
    RandomStream rng(17);
    return nm_sample_matrix(ModelParams(8.0, cols), rng);
}

}  // namespace

TEST(Umvu, HandArithmetic) {
    const auto d = umvu(column({3, 2, 0}), 8.0);
    EXPECT_DOUBLE_EQ(d(0, 0), 3.0 / 12.0);
    EXPECT_DOUBLE_EQ(d(1, 0), 2.0 / 12.0);
    EXPECT_EQ(d(2, 0), 0.0);
    const auto z = umvu(CountMatrix(3, 2), 0.5);
    for (double v : z.data()) EXPECT_EQ(v, 0.0);
    EXPECT_THROW(umvu(column({1}), 0.0), InputError);
}

TEST(Umvu, UnbiasedByEnumeration) {
    // m = 1, r = 2, p = 0.5: sum over x <= 400 of P(x) x / (r + x - 1).
    const ProbColumn p({0.5});
    long double s = 0.0L;
    for (Count x = 1; x <= 400; ++x)
        s += std::exp(nm_log_pmf(std::vector<Count>{x}, 2.0, p)) * static_cast<double>(x) / (2.0 + x - 1.0);
    EXPECT_NEAR(static_cast<double>(s), 0.5, 1e-8);
}

TEST(ShrinkGeneral, BayesRuleAndLimits) {
    const auto X = CountMatrix::from_rows({{3, 1}, {2, 0}, {0, 4}});
    const double r = 5.0;
    const double a0 = 1.5;
    const auto bayes = shrink_general(X, r, dirichlet_delta(a0, 3));
    for (std::size_t nu = 0; nu < 2; ++nu)
        for (std::size_t i = 0; i < 3; ++i)
            EXPECT_DOUBLE_EQ(bayes(i, nu), X(i, nu) / (r + X.col_sum(nu) - 1.0 + a0 + 3.0));
    const auto u = umvu(X, r);
    const auto tiny = shrink_general(X, r, constant_delta(1e-12));
    for (std::size_t k = 0; k < u.data().size(); ++k) {
        EXPECT_NEAR(tiny.data()[k], u.data()[k], 1e-12);
        if (u.data()[k] > 0) {
            EXPECT_LT(bayes.data()[k], u.data()[k]);
        }
    }
    const DeltaRule bad{"bad", [](Count) { return 0.0; }, std::nullopt};
    EXPECT_THROW(shrink_general(X, r, bad), InputError);
}

TEST(ShrinkGeneral, LargerDeltaShrinksMore) {
    const auto X = CountMatrix::from_rows({{3, 1}, {2, 6}});
    const auto a = shrink_general(X, 4.0, constant_delta(1.0));
    const auto b = shrink_general(X, 4.0, constant_delta(2.0));
    for (std::size_t k = 0; k < a.data().size(); ++k) EXPECT_LT(b.data()[k], a.data()[k]);
}

TEST(Eb, DeltaAndZeroMatrix) {
    const auto rule = eb_delta(7, 3, 8.0);
    EXPECT_DOUBLE_EQ(rule(10), 24.8);
    EXPECT_EQ(rule(0), special::kInf);
    EXPECT_NEAR(rule(100000000), 8.0, 1e-5);
    ASSERT_TRUE(rule.limit.has_value());
    EXPECT_EQ(*rule.limit, 8.0);
    const auto z = eb(CountMatrix(7, 3), 8.0);
    for (double v : z.data()) EXPECT_EQ(v, 0.0);
}

TEST(Eb0, ColumnwiseRule) {
    const auto d = eb0(column({3, 2, 0}), 8.0);
    const double den = 8.0 + 5.0 + 3.0 + 24.0 / 5.0;
    EXPECT_DOUBLE_EQ(d(0, 0), 3.0 / den);
    EXPECT_DOUBLE_EQ(d(1, 0), 2.0 / den);
    EXPECT_EQ(d(2, 0), 0.0);
    // One column: equals eb with N = 1.
    const auto e = eb(column({3, 2, 0}), 8.0);
    for (int i = 0; i < 3; ++i) EXPECT_NEAR(d(i, 0), e(i, 0), 1e-15);
}

TEST(Eb0, PermutingColumnsPermutesOutput) {
    const auto X = CountMatrix::from_rows({{3, 0, 1}, {2, 0, 5}});
    const auto Y = CountMatrix::from_rows({{1, 3, 0}, {5, 2, 0}});
    const auto dx = eb0(X, 3.0);
    const auto dy = eb0(Y, 3.0);
    const int perm[3] = {1, 2, 0};  // column nu of X is column perm[nu] of Y
    for (int nu = 0; nu < 3; ++nu)
        for (int i = 0; i < 2; ++i) EXPECT_EQ(dx(i, nu), dy(i, perm[nu]));
    for (int i = 0; i < 2; ++i) EXPECT_EQ(dx(i, 1), 0.0);
}

TEST(Hb, ZeroMatrixAndSymmetry) {
    const auto z = hb(CountMatrix(7, 3), 8.0, 14, 1, g1);
    for (double v : z.data()) EXPECT_EQ(v, 0.0);
    EXPECT_THROW(hb(CountMatrix(7, 3), 6.0, 14, 1, g1), ConditionViolation);

    const auto X = CountMatrix::from_rows({{3, 1, 2}, {1, 3, 2}});
    const auto d = hb(X, 4.0, 2.5, 1, g1);
    const double den = 4.0 + 4.0 - 1.0 + delta_hb(2.5, 1, g1, 4.0, 2, X.col_sums());
    for (std::size_t nu = 0; nu < 3; ++nu)
        for (std::size_t i = 0; i < 2; ++i) EXPECT_NEAR(d(i, nu), X(i, nu) / den, 1e-15);
    EXPECT_TRUE(estimate_is_valid(d, X, true));
}

TEST(Hb, ColumnPermutationInvariance) {
    const auto X = CountMatrix::from_rows({{3, 0, 6}, {1, 2, 0}, {0, 0, 1}});
    const auto Y = CountMatrix::from_rows({{6, 3, 0}, {0, 1, 2}, {1, 0, 0}});
    const auto dx = hb(X, 5.0, 4, 1, g1);
    const auto dy = hb(Y, 5.0, 4, 1, g1);
    const int perm[3] = {1, 2, 0};
    for (int nu = 0; nu < 3; ++nu)
        for (int i = 0; i < 3; ++i) EXPECT_NEAR(dx(i, nu), dy(i, perm[nu]), 1e-14);
}

TEST(Hb, AgreesWithGibbsInverseMean) {
    // Entries 1 / E[1 / p | X] estimated from a chain of the SS-loss posterior.
    const CountMatrix X = seeded_case1_counts();
    ASSERT_GT(X.grand_sum(), 0);
    const double r = 8.0;
    const auto d = hb(X, r, 14, 1, g1);
    const auto prior = gibbs::ss_geometry(14, 1, 7);
    const auto cond = gibbs::posterior_conditionals(X, r, prior);
    gibbs::ChainConfig cfg{60000, 10000, 3, 1};
    const auto chain = gibbs::run_chain(cond, cfg);
    const auto mc = gibbs::rao_blackwell_inverse_mean(chain, cond);
    for (std::size_t k = 0; k < d.data().size(); ++k) {
        if (d.data()[k] == 0.0) {
            EXPECT_EQ(mc.data()[k], 0.0);
            continue;
        }
        EXPECT_NEAR(mc.data()[k] / d.data()[k], 1.0, 0.02) << k;
    }
}

TEST(DirichletPosteriorMean, HandArithmeticAndPropriety) {
    const std::vector<double> a{1.0};
    EXPECT_DOUBLE_EQ(dirichlet_posterior_mean(CountMatrix(1, 1), 2.0, 0.0, a)(0, 0), 1.0 / 3.0);
    EXPECT_THROW(dirichlet_posterior_mean(CountMatrix(1, 1), 2.0, -2.0, a), ConditionViolation);
    const auto X = CountMatrix::from_rows({{3, 0}, {1, 2}, {0, 0}});
    const std::vector<double> jeff(3, 0.5);
    const auto d = dirichlet_posterior_mean(X, 4.0, -1.0, jeff);
    EXPECT_TRUE(estimate_is_valid(d, X, false));
    for (std::size_t nu = 0; nu < 2; ++nu) {
        double s = 0.0;
        for (int i = 0; i < 3; ++i) s += d(i, nu);
        const double z = static_cast<double>(X.col_sum(nu));
        EXPECT_NEAR(s, (z + 1.5) / (4.0 - 1.0 + z + 1.5), 1e-15);
        EXPECT_LT(s, 1.0);
    }
}

TEST(HbPosteriorMean, DominatedEntrywiseByDirichletMean) {
    const auto X = CountMatrix::from_rows({{3, 1, 2}, {1, 3, 2}, {0, 0, 1}});
    PriorSpec prior{5, 1, g1, -1.0, {0.5, 0.5, 0.5}};
    const auto h = hb_posterior_mean(X, 5.0, prior);
    const auto d = dirichlet_posterior_mean(X, 5.0, prior.a0, prior.a);
    EXPECT_TRUE(estimate_is_valid(h, X, false));
    for (std::size_t k = 0; k < h.data().size(); ++k) {
        EXPECT_GT(h.data()[k], 0.0);
        EXPECT_LT(h.data()[k], d.data()[k]);
    }
}

TEST(HbPosteriorMean, SmallDeltaLimitAndSymmetry) {
    // beta huge pushes t, and with it delta_nu, to zero.
    const auto X = CountMatrix::from_rows({{2, 2}, {1, 1}});
    PriorSpec prior{1, 1e9, g1, 0.5, {1.0, 1.0}};
    const auto h = hb_posterior_mean(X, 3.0, prior);
    const auto d = dirichlet_posterior_mean(X, 3.0, prior.a0, prior.a);
    for (std::size_t k = 0; k < h.data().size(); ++k) EXPECT_NEAR(h.data()[k], d.data()[k], 1e-8);
    for (int i = 0; i < 2; ++i) EXPECT_DOUBLE_EQ(h(i, 0), h(i, 1));
    PriorSpec improper{3, 1, g1, -5.0, {1.0, 1.0}};
    EXPECT_THROW(hb_posterior_mean(X, 3.0, improper), ConditionViolation);
}
