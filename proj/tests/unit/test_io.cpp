#include <gtest/gtest.h>

#include <sstream>

#include "nmshrink/io.hpp"

using namespace nmshrink;
using namespace nmshrink::io;

TEST(CountsCsv, RoundTrip) {
    std::istringstream in("3,0,1\n2, 5 ,0\n\n0,0,7\n");
    const auto X = read_counts_csv(in);
    EXPECT_EQ(X.m(), 3u);
    EXPECT_EQ(X.n_cols(), 3u);
    EXPECT_EQ(X(1, 1), 5);
    std::ostringstream out;
    write_counts_csv(out, X);
    std::istringstream back(out.str());
    EXPECT_EQ(read_counts_csv(back), X);
}

TEST(CountsCsv, HeaderAndErrors) {
    std::istringstream h("a,b\n1,2\n");
    EXPECT_EQ(read_counts_csv(h, true).m(), 1u);
    std::istringstream ragged("1,2\n3\n");
    try {
        read_counts_csv(ragged);
        FAIL();
    } catch (const InputError& e) {
        EXPECT_NE(std::string(e.what()).find("line 2"), std::string::npos);
    }
    std::istringstream junk("1,x\n");
    EXPECT_THROW(read_counts_csv(junk), InputError);
    std::istringstream neg("1,-2\n");
    EXPECT_THROW(read_counts_csv(neg), InputError);
    std::istringstream empty("");
    EXPECT_THROW(read_counts_csv(empty), InputError);
}

TEST(MatrixCsv, SeventeenDigitsRoundTrip) {
    Matrix d(2, 2);
    d(0, 0) = 1.0 / 3.0;
    d(1, 0) = 0.1;
    d(0, 1) = 2.0 / 7.0;
    d(1, 1) = 1e-17;
    std::ostringstream out;
    write_matrix_csv(out, d);
    std::istringstream in(out.str());
    EXPECT_EQ(read_matrix_csv(in), d);
}

TEST(Json, ModelParamsRoundTrip) {
    const ModelParams p(2.5, {ProbColumn({0.2, 0.3}), ProbColumn({0.1, 0.1})});
    const auto back = model_params_from_json(to_json(p));
    EXPECT_EQ(back.r(), 2.5);
    EXPECT_EQ(back.as_matrix(), p.as_matrix());
    EXPECT_THROW(model_params_from_json(json{{"r", 1.0}}), InputError);
    EXPECT_THROW(model_params_from_json(json{{"r", 1.0}, {"columns", {{0.7, 0.7}}}}), InputError);
}

TEST(Json, PriorRoundTrip) {
    PriorSpec p{3.0, 1.0, GChoice::komaki(0.5, 2.0), -1.0, {0.5, 0.5}};
    const auto back = prior_from_json(to_json(p));
    EXPECT_EQ(back.alpha, 3.0);
    EXPECT_EQ(back.g.kind(), GChoice::Kind::komaki);
    EXPECT_EQ(back.g.kappa(), 2.0);
    EXPECT_EQ(back.a, p.a);
    const auto d = prior_from_json(json::parse(R"({"alpha": 2, "a": [1]})"));
    EXPECT_TRUE(d.g.is_constant_one());
    EXPECT_EQ(d.beta, 0.0);
    EXPECT_THROW(prior_from_json(json::parse(R"({"alpha": 2, "a": [1], "g": "g9"})")), InputError);
    EXPECT_THROW(prior_from_json(json::parse(R"({"alpha": -2, "a": [1]})")), InputError);
}
