#include "test_util.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <random>

using namespace prefsearch;

namespace {

Product with_meals(std::set<std::string> meals) {
    Product p;
    p.product_id = "p";
    if (!meals.empty()) p.nominal_features["meal"] = std::move(meals);
    return p;
}

const TriLinearConfig kTri{};
const LinearConfig kStars{1.0, 5.0, Direction::HigherBetter};

} // namespace

TEST(ScoreNominal, MatchedValueScoresOne) {
    EXPECT_EQ(score_nominal(with_meals({"breakfast"}), "meal", "breakfast"), 1.0);
}

TEST(ScoreNominal, AbsentValueScoresZero) {
    EXPECT_EQ(score_nominal(with_meals({"breakfast"}), "meal", "bar"), 0.0);
}

TEST(ScoreNominal, EmptyFeatureSetScoresZero) {
    EXPECT_EQ(score_nominal(with_meals({}), "meal", "breakfast"), 0.0);
}

TEST(ScoreNominal, CheckedVariantRejectsUnknownFacet) {
    const auto& c = testutil::mini();
    EXPECT_THROW(score_nominal(c.products[0], c, "pool2", "yes"), QueryError);
    EXPECT_THROW(score_nominal(c.products[0], c, "price", "60"), QueryError);
    EXPECT_EQ(score_nominal(c.products[0], c, "meal", "breakfast"), 1.0);
}

TEST(ScoreGaussian, PlateauScoresOne) {
    const GaussianConfig cfg{2.0, 0.5, 3.0};
    EXPECT_EQ(score_gaussian(0.0, cfg), 1.0);
    EXPECT_EQ(score_gaussian(0.5, cfg), 1.0);
}

TEST(ScoreGaussian, HalfWidthScoresOneHalf) {
    for (double sigma : {0.3, 1.0, 15.0}) {
        for (double offset : {0.0, 0.5, 5.0}) {
            const GaussianConfig cfg{sigma, offset, 3.0};
            EXPECT_NEAR(score_gaussian(offset + sigma * std::sqrt(2.0 * std::log(2.0)), cfg), 0.5, 1e-9);
        }
    }
}

TEST(ScoreGaussian, BeyondCutoffScoresZero) {
    const GaussianConfig cfg{1.0, 0.5, 3.0};
    EXPECT_EQ(score_gaussian(0.5 + 4.0, cfg), 0.0);
    EXPECT_GT(score_gaussian(0.5 + 2.99, cfg), 0.0);
}

TEST(ScoreGaussian, MonotoneNonIncreasing) {
    const GaussianConfig cfg{1.5, 0.7, 3.0};
    double prev = 1.0;
    for (int i = 0; i <= 1000; ++i) {
        const double s = score_gaussian(i * 0.01, cfg);
        EXPECT_LE(s, prev);
        EXPECT_GE(s, 0.0);
        prev = s;
    }
}

TEST(ScoreLinear, StarEndpointsAndMidpoint) {
    EXPECT_EQ(score_linear_directed(5, kStars), 1.0);
    EXPECT_EQ(score_linear_directed(1, kStars), 0.0);
    EXPECT_NEAR(score_linear_directed(3, kStars), 0.5, 1e-12);
}

TEST(ScoreLinear, LowerBetterMirrors) {
    const LinearConfig cfg{1.0, 5.0, Direction::LowerBetter};
    EXPECT_EQ(score_linear_directed(1, cfg), 1.0);
    EXPECT_EQ(score_linear_directed(5, cfg), 0.0);
    EXPECT_NEAR(score_linear_directed(2, cfg), 0.75, 1e-12);
}

TEST(ScoreLinear, OutOfScaleValuesClamp) {
    EXPECT_EQ(score_linear_directed(7, kStars), 1.0);
    EXPECT_EQ(score_linear_directed(-2, kStars), 0.0);
}

TEST(ScoreTriLinear, PaperRangeExamples) {
    EXPECT_NEAR(score_trilinear(60, 60, 120, kTri), 1.0, 1e-12);
    EXPECT_NEAR(score_trilinear(120, 60, 120, kTri), 0.75, 1e-12);
    EXPECT_NEAR(score_trilinear(132, 60, 120, kTri), 0.35, 1e-12);
    EXPECT_NEAR(score_trilinear(54, 60, 120, kTri), 0.6, 1e-12);
    EXPECT_EQ(score_trilinear(150, 60, 120, kTri), 0.0);
}

TEST(ScoreTriLinear, BordersExtendTwentyPercent) {
    const auto seg = trilinear_segments(60, 120, kTri);
    EXPECT_NEAR(seg.left_start, 48.0, 1e-12);
    EXPECT_NEAR(seg.right_end, 144.0, 1e-12);
    EXPECT_NEAR(score_trilinear(48, 60, 120, kTri), 0.7, 1e-12);
    EXPECT_NEAR(score_trilinear(144, 60, 120, kTri), 0.25, 1e-12);
    EXPECT_EQ(score_trilinear(47.9, 60, 120, kTri), 0.0);
    EXPECT_EQ(score_trilinear(144.1, 60, 120, kTri), 0.0);
}

TEST(ScoreTriLinear, InvalidRangeThrows) {
    EXPECT_THROW(score_trilinear(10, 120, 60, kTri), QueryError);
    EXPECT_THROW(score_trilinear(10, 60, 60, kTri), QueryError);
    EXPECT_THROW(score_trilinear(10, 0, 60, kTri), QueryError);
}

TEST(ScoreTriLinear, SegmentOrderingOnRandomRanges) {
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> lo_dist(1.0, 500.0);
    std::uniform_real_distribution<double> width(0.5, 400.0);
    for (int r = 0; r < 100; ++r) {
        const double lo = lo_dist(rng);
        const double hi = lo + width(rng);
        const auto seg = trilinear_segments(lo, hi, kTri);
        double min_inner = 2;
        double max_left = -1;
        double min_left = 2;
        double max_right = -1;
        double min_right = 2;
        for (int i = 0; i < 1000; ++i) {
            const double v = seg.left_start * 0.9 + (seg.right_end * 1.1 - seg.left_start * 0.9) * i / 999.0;
            const double s = score_trilinear(v, lo, hi, kTri);
            if (v >= lo && v <= hi) {
                min_inner = std::min(min_inner, s);
            } else if (v >= seg.left_start && v < lo) {
                max_left = std::max(max_left, s);
                min_left = std::min(min_left, s);
            } else if (v > hi && v <= seg.right_end) {
                max_right = std::max(max_right, s);
                min_right = std::min(min_right, s);
            } else {
                EXPECT_EQ(s, 0.0);
            }
        }
        EXPECT_GT(min_inner, max_left);
        EXPECT_GT(min_left, max_right);
        EXPECT_GT(min_right, 0.0);
    }
}

TEST(Tokenize, LowercasesAndSplits) {
    EXPECT_EQ(tokenize("Rooftop-Pool, with VIEWS!"), (std::vector<std::string>{"rooftop", "pool", "with", "views"}));
    EXPECT_TRUE(tokenize("  ,;  ").empty());
    EXPECT_EQ(tokenize("Caf\xc3\xa9 42"), (std::vector<std::string>{"caf\xc3\xa9", "42"}));
}

TEST(ScoreText, UniqueTermScoresOneElsewhereZero) {
    const auto& c = testutil::mini();
    const TextIndex index(c);
    EXPECT_EQ(score_text(*c.find_product("b2"), "rooftop", index), 1.0);
    EXPECT_EQ(score_text(*c.find_product("a1"), "rooftop", index), 0.0);
    EXPECT_EQ(score_text(*c.find_product("c3"), "rooftop", index), 0.0);
}

TEST(ScoreText, AbsentTermScoresZeroEverywhere) {
    const auto& c = testutil::mini();
    const TextIndex index(c);
    for (const auto& p : c.products) EXPECT_EQ(score_text(p, "sauna", index), 0.0);
}

TEST(ScoreText, HandComputedTfIdf) {
    // "garden" occurs twice in a1 only; "rooms" once in a1 and once in c3.
    const auto& c = testutil::mini();
    const TextIndex index(c);
    const double a1 = 2 * std::log(1.0 + 3.0 / 1.0) + 1 * std::log(1.0 + 3.0 / 2.0);
    const double c3 = 1 * std::log(1.0 + 3.0 / 2.0);
    EXPECT_NEAR(score_text(*c.find_product("a1"), "Garden rooms", index), 1.0, 1e-12);
    EXPECT_NEAR(score_text(*c.find_product("c3"), "Garden rooms", index), c3 / a1, 1e-12);
    EXPECT_EQ(score_text(*c.find_product("b2"), "Garden rooms", index), 0.0);
    EXPECT_EQ(index.df("rooms"), 2u);
    EXPECT_EQ(index.tf(index.index_of("a1"), "garden"), 2u);
}

TEST(ScoreText, RepeatedQueryTokensCountOnce) {
    const auto& c = testutil::mini();
    const TextIndex index(c);
    EXPECT_NEAR(score_text(*c.find_product("c3"), "rooms rooms garden", index),
                score_text(*c.find_product("c3"), "rooms garden", index), 1e-15);
}

TEST(ScoreText, ScoresStayInUnitInterval) {
    const auto& c = testutil::bundled();
    const TextIndex index(c);
    for (const char* term : {"breakfast", "quiet rooms", "spa", "station"}) {
        for (double s : index.scores(term)) {
            EXPECT_GE(s, 0.0);
            EXPECT_LE(s, 1.0);
        }
    }
}
