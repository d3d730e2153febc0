#include <gtest/gtest.h>

#include <cmath>
#include <map>
#include <numeric>
#include <set>
#include <sstream>

#include "hag/latent_tree.hpp"
#include "hag/params.hpp"

using namespace hag;

TEST(ColorSwitchRates, BoundaryValues) {
    const auto r = color_switch_rates(26.0, 4, 3.62);
    ASSERT_EQ(r.size(), 5u);
    EXPECT_DOUBLE_EQ(r[0], 0.0);
    EXPECT_NEAR(r[1], 1.0, 1e-15);
    EXPECT_NEAR(r[2], 0.122215, 1e-6);
    EXPECT_DOUBLE_EQ(r[4], 0.0);
    for (double x : r) {
        EXPECT_GE(x, 0.0);
        EXPECT_LE(x, 1.0 + 1e-15);
    }
}

TEST(ColorSwitchRates, RejectsBadInput) {
    EXPECT_THROW(color_switch_rates(1.0, 4, 1.0), std::invalid_argument);
    EXPECT_THROW(color_switch_rates(26.0, 4, 0.0), std::invalid_argument);
    EXPECT_THROW(color_switch_rates(26.0, 0, 1.0), std::invalid_argument);
}

TEST(ExpectedLabelCount, HandValues) {
    EXPECT_NEAR(expected_label_count(26.0, 4, 3.62), 199.786, 1e-3);
    EXPECT_NEAR(expected_label_count(26.0, 5, 2.34), 199.704, 1e-3);
}

TEST(ExpectedLabelCount, EqualsSumOfBirthRates) {
    for (double mu : {2.5, 7.0, 26.0}) {
        for (int D : {2, 3, 5}) {
            for (double theta : {0.3, 1.0, 4.0}) {
                const auto r = color_switch_rates(mu, D, theta);
                double k = 1.0;
                for (int d = 1; d <= D; ++d) k += std::pow(mu, d) * r[static_cast<std::size_t>(d)];
                EXPECT_NEAR(expected_label_count(mu, D, theta), k, 1e-9 * k);
            }
        }
    }
}

TEST(ExpectedLabelCount, IncreasingInTheta) {
    double prev = 0.0;
    for (double th = 0.1; th < 50.0; th *= 1.5) {
        const double k = expected_label_count(26.0, 4, th);
        EXPECT_GT(k, prev);
        prev = k;
    }
}

TEST(ExpectedColorLeafCount, Product) {
    const auto r = color_switch_rates(26.0, 4, 3.62);
    EXPECT_DOUBLE_EQ(expected_color_leaf_count(4, r, 26.0, 4), 1.0);
    EXPECT_NEAR(expected_color_leaf_count(3, r, 26.0, 4), 26.0, 1e-12);
    EXPECT_NEAR(expected_color_leaf_count(2, r, 26.0, 4), 676.0 * (1 - r[3]), 1e-9);
    EXPECT_THROW(expected_color_leaf_count(0, r, 26.0, 4), std::invalid_argument);
}

TEST(LatentTree, FromOffspringLayout) {
    // root -> 2 children; they have 3 and 1 children.
    const auto t = LatentTree::from_offspring({{2}, {3, 1}});
    EXPECT_EQ(t.depth(), 2);
    EXPECT_EQ(t.level_size(1), 2u);
    EXPECT_EQ(t.leaf_count(), 4u);
    EXPECT_EQ(t.node_count(), 7u);
    EXPECT_EQ(t.first_child(1, 1), 3u);
    EXPECT_EQ(t.parent(2, 2), 0u);
    EXPECT_EQ(t.parent(2, 3), 1u);
    EXPECT_EQ(t.first_leaf(1, 0), 0u);
    EXPECT_EQ(t.first_leaf(1, 1), 3u);
    EXPECT_EQ(t.first_leaf(0, 1), 4u);
    EXPECT_EQ(t.ancestor_of_leaf(3, 1), 1u);
    EXPECT_EQ(t.ancestor_of_leaf(3, 2), 0u);
    EXPECT_EQ(t.global_id(2, 0), 3u);
    EXPECT_THROW(LatentTree::from_offspring({{2}, {3, 0}}), std::invalid_argument);
    EXPECT_THROW(LatentTree::from_offspring({{2}, {3}}), std::invalid_argument);
}

TEST(SampleTree, StructureAndOffspringMoments) {
    const double mu = 5.0;
    const auto t = sample_tree(mu, 6, RngFactory(11));
    double s = 0, ss = 0;
    std::uint64_t n = 0;
    for (int d = 0; d < t.depth(); ++d) {
        std::uint64_t children = 0;
        for (std::uint64_t i = 0; i < t.level_size(d); ++i) {
            const double k = t.offspring(d, i);
            ASSERT_GE(k, 1.0);
            s += k;
            ss += k * k;
            ++n;
            children += t.offspring(d, i);
        }
        EXPECT_EQ(children, t.level_size(d + 1));
    }
    const double m = s / n;
    const double v = ss / n - m * m;
    EXPECT_NEAR(m, mu, 4.0 * std::sqrt((mu - 1) / n));
    EXPECT_NEAR(v, mu - 1.0, 0.05 * (mu - 1.0));
    for (std::uint64_t x = 0; x < t.leaf_count(); ++x) ASSERT_LT(t.ancestor_of_leaf(x, t.depth()), 1u);
}

TEST(SampleTree, DeterministicPerSeed) {
    const auto a = sample_tree(4.0, 5, RngFactory(3));
    const auto b = sample_tree(4.0, 5, RngFactory(3));
    const auto c = sample_tree(4.0, 5, RngFactory(4));
    ASSERT_EQ(a.node_count(), b.node_count());
    for (int d = 0; d < 5; ++d) {
        for (std::uint64_t i = 0; i < a.level_size(d); ++i) ASSERT_EQ(a.offspring(d, i), b.offspring(d, i));
    }
    EXPECT_NE(a.node_count(), c.node_count());
}

TEST(SampleTree, NodeBudgetRefusal) {
    EXPECT_THROW(sample_tree(26.0, 6, RngFactory(1), TreeOptions{1e6}), InfeasibleError);
    EXPECT_NEAR(expected_node_count(26.0, 4), (std::pow(26.0, 5) - 1) / 25.0, 1e-6);
}

TEST(AssignColors, SiblingsOfLeavesShareColorAndClassesAreSubtrees) {
    const auto t = sample_tree(6.0, 4, RngFactory(9));
    const auto rates = color_switch_rates(6.0, 4, 2.0);
    const auto c = assign_colors(t, rates, RngFactory(9));
    // rho_D = 0: a leaf always inherits its parent's color.
    for (std::uint64_t x = 0; x < t.leaf_count(); ++x) EXPECT_EQ(c.color[4][x], c.color[3][t.parent(4, x)]);
    // Each color has a single topmost node: its parent carries a different color.
    std::map<std::uint32_t, int> tops;
    tops[c.color[0][0]]++;
    for (int d = 1; d <= 4; ++d) {
        for (std::uint64_t i = 0; i < t.level_size(d); ++i) {
            if (c.color[static_cast<std::size_t>(d)][i] != c.color[static_cast<std::size_t>(d) - 1][t.parent(d, i)]) {
                tops[c.color[static_cast<std::size_t>(d)][i]]++;
            }
        }
    }
    EXPECT_EQ(tops.size(), c.count);
    for (const auto& [color, n] : tops) EXPECT_EQ(n, 1) << "color " << color;
    // rho_1 = 1: every depth-1 node starts a new color.
    std::set<std::uint32_t> depth1(c.color[1].begin(), c.color[1].end());
    EXPECT_EQ(depth1.size(), t.level_size(1));
}

TEST(AssignColors, MonteCarloLabelCountMatchesExpectation) {
    const double mu = 4.0, theta = 2.0;
    const int D = 4, reps = 300;
    const auto rates = color_switch_rates(mu, D, theta);
    double s = 0, ss = 0;
    for (int r = 0; r < reps; ++r) {
        const RngFactory rngs(1000 + r);
        const auto t = sample_tree(mu, D, rngs);
        const double k = assign_colors(t, rates, rngs).count;
        s += k;
        ss += k * k;
    }
    const double m = s / reps;
    const double se = std::sqrt((ss / reps - m * m) / reps);
    EXPECT_NEAR(m, expected_label_count(mu, D, theta), 3.0 * se);
}

TEST(WriteTreeTsv, Format) {
    const auto t = LatentTree::from_offspring({{2}});
    ColorAssignment c;
    c.color = {{0}, {1, 2}};
    c.count = 3;
    std::ostringstream os;
    write_tree_tsv(os, t, c);
    EXPECT_EQ(os.str(), "0\t0\t-1\t0\n1\t1\t0\t1\n2\t1\t0\t2\n");
}
