#include <gtest/gtest.h>

#include <cmath>
#include <set>

#include "hag/rng.hpp"

using namespace hag;

namespace {

template <class Draw>
std::pair<double, double> mean_var(int n, Draw draw) {
    double s = 0, ss = 0;
    for (int i = 0; i < n; ++i) {
        const double x = draw();
        s += x;
        ss += x * x;
    }
    const double m = s / n;
    return {m, ss / n - m * m};
}

}  // namespace

// Known-answer vectors distributed with the Random123 library.
TEST(Philox, KnownAnswerZero) {
    const auto out = philox4x32_10({0, 0, 0, 0}, {0, 0});
    EXPECT_EQ(out[0], 0x6627e8d5u);
    EXPECT_EQ(out[1], 0xe169c58du);
    EXPECT_EQ(out[2], 0xbc57ac4cu);
    EXPECT_EQ(out[3], 0x9b00dbd8u);
}

TEST(Philox, KnownAnswerOnes) {
    const auto out = philox4x32_10({0xffffffffu, 0xffffffffu, 0xffffffffu, 0xffffffffu}, {0xffffffffu, 0xffffffffu});
    EXPECT_EQ(out[0], 0x408f276du);
    EXPECT_EQ(out[1], 0x41c83b0eu);
    EXPECT_EQ(out[2], 0xa20bc7c6u);
    EXPECT_EQ(out[3], 0x6d5451fdu);
}

TEST(Philox, KnownAnswerPi) {
    const auto out = philox4x32_10({0x243f6a88u, 0x85a308d3u, 0x13198a2eu, 0x03707344u}, {0xa4093822u, 0x299f31d0u});
    EXPECT_EQ(out[0], 0xd16cfe09u);
    EXPECT_EQ(out[1], 0x94fdccebu);
    EXPECT_EQ(out[2], 0x5001e420u);
    EXPECT_EQ(out[3], 0x24126ea1u);
}

TEST(RngFactory, StreamsAreReproducibleAndDistinct) {
    const RngFactory a(42), b(42), c(43);
    auto x = a.stream(Stage::marks, 7);
    auto y = b.stream(Stage::marks, 7);
    for (int i = 0; i < 10; ++i) EXPECT_EQ(x(), y());

    std::set<std::uint64_t> firsts;
    for (auto st : {Stage::tree, Stage::colors, Stage::marks, Stage::wildness, Stage::heights, Stage::matching}) {
        for (std::uint64_t e = 0; e < 4; ++e) firsts.insert(a.stream(st, e)());
    }
    firsts.insert(c.stream(Stage::tree, 0)());
    EXPECT_EQ(firsts.size(), 25u);
}

TEST(Distributions, Uniform01OpenInterval) {
    auto eng = RngFactory(1).stream(Stage::test);
    const auto [m, v] = mean_var(200000, [&] {
        const double u = uniform01(eng);
        EXPECT_GT(u, 0.0);
        EXPECT_LT(u, 1.0);
        return u;
    });
    EXPECT_NEAR(m, 0.5, 0.003);
    EXPECT_NEAR(v, 1.0 / 12.0, 0.002);
}

TEST(Distributions, UniformIndexCoversRange) {
    auto eng = RngFactory(2).stream(Stage::test);
    std::vector<int> counts(7, 0);
    for (int i = 0; i < 70000; ++i) {
        const auto k = uniform_index(eng, 7);
        ASSERT_LT(k, 7u);
        ++counts[k];
    }
    for (int c : counts) EXPECT_NEAR(c, 10000, 400);
}

TEST(Distributions, NormalMoments) {
    auto eng = RngFactory(3).stream(Stage::test);
    const auto [m, v] = mean_var(200000, [&] { return standard_normal(eng); });
    EXPECT_NEAR(m, 0.0, 0.01);
    EXPECT_NEAR(v, 1.0, 0.01);
}

class PoissonMoments : public ::testing::TestWithParam<double> {};

TEST_P(PoissonMoments, MeanAndVarianceMatch) {
    const double lambda = GetParam();
    auto eng = RngFactory(4).stream(Stage::test, static_cast<std::uint64_t>(lambda * 100));
    const int n = 100000;
    const auto [m, v] = mean_var(n, [&] { return static_cast<double>(poisson(eng, lambda)); });
    EXPECT_NEAR(m, lambda, 4.0 * std::sqrt(lambda / n));
    EXPECT_NEAR(v / lambda, 1.0, 0.03);
}

INSTANTIATE_TEST_SUITE_P(Means, PoissonMoments, ::testing::Values(0.3, 2.5, 9.99, 10.0, 25.0, 41.2, 1000.0));

TEST(Distributions, PoissonZeroMean) {
    auto eng = RngFactory(5).stream(Stage::test);
    EXPECT_EQ(poisson(eng, 0.0), 0u);
}

TEST(Distributions, BinomialMean) {
    auto eng = RngFactory(6).stream(Stage::test);
    const auto [m, v] = mean_var(20000, [&] { return static_cast<double>(binomial_small(eng, 140, 0.4)); });
    EXPECT_NEAR(m, 56.0, 0.15);
    EXPECT_NEAR(v, 33.6, 1.5);
}
