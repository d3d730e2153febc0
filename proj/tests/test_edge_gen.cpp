#include <gtest/gtest.h>

#include <cmath>
#include <numeric>

#include "hag/edge_gen.hpp"

using namespace hag;

namespace {

struct Instance {
    LatentTree tree;
    ColorAssignment colors;
    LeafAttributes attrs;
    NodeMarks marks;
};

Instance make_instance(double mu, int D, double theta, LogNormalParams law, double omega, std::uint64_t seed) {
    const RngFactory rngs(seed);
    auto tree = sample_tree(mu, D, rngs);
    const auto rates = color_switch_rates(mu, D, theta);
    auto colors = assign_colors(tree, rates, rngs);
    auto attrs = sample_leaf_attributes(tree.leaf_count(), law, {omega, 0.0, false}, rngs);
    auto marks = aggregate_marks(tree, attrs.mark);
    return {std::move(tree), std::move(colors), std::move(attrs), std::move(marks)};
}

std::uint64_t weight_sum(const LabelledMultigraph& g, EdgeKind kind) {
    std::uint64_t w = 0;
    for (const auto& e : g.edges) {
        if (e.kind == kind) w += e.weight;
    }
    return w;
}

void expect_consistent(const LabelledMultigraph& g) {
    const auto& t = g.tally;
    EXPECT_EQ(t.agreement + t.conflict + t.loops + t.inadmissible, t.attempts);
    EXPECT_EQ(weight_sum(g, EdgeKind::agreement), t.agreement);
    EXPECT_EQ(weight_sum(g, EdgeKind::conflict), t.conflict);
    for (std::size_t i = 0; i < g.edges.size(); ++i) {
        const auto& e = g.edges[i];
        ASSERT_LT(e.u, e.v);
        ASSERT_GE(e.weight, 1u);
        ASSERT_EQ(e.kind == EdgeKind::agreement, g.color[e.u] == g.color[e.v]);
        if (e.kind == EdgeKind::conflict) ASSERT_TRUE(g.wild[e.u] || g.wild[e.v]);
        if (i > 0) {
            const auto& p = g.edges[i - 1];
            ASSERT_TRUE(p.u < e.u || (p.u == e.u && p.v < e.v));
        }
    }
}

}  // namespace

TEST(HeightDistribution, Validation) {
    EXPECT_THROW(HeightDistribution({}), std::invalid_argument);
    EXPECT_THROW(HeightDistribution({0.5, 0.6}), std::invalid_argument);
    EXPECT_THROW(HeightDistribution({1.2, -0.2}), std::invalid_argument);
    EXPECT_THROW(HeightDistribution::canonical(0.5, 1), std::invalid_argument);
    EXPECT_THROW(HeightDistribution::canonical(1.5, 3), std::invalid_argument);
    const auto q = HeightDistribution::canonical(0.82, 4);
    EXPECT_EQ(q.depth(), 4);
    EXPECT_DOUBLE_EQ(q(1), 0.82);
    EXPECT_NEAR(q(2), 0.06, 1e-15);
    EXPECT_NEAR(q(4), 0.06, 1e-15);
    EXPECT_EQ(q(0), 0.0);
    EXPECT_EQ(q(5), 0.0);
}

TEST(HeightDistribution, SamplingFrequencies) {
    const HeightDistribution q({0.5, 0.2, 0.3});
    auto eng = RngFactory(1).stream(Stage::test);
    std::vector<int> counts(4, 0);
    const int n = 100000;
    for (int i = 0; i < n; ++i) ++counts[static_cast<std::size_t>(q.sample(eng))];
    EXPECT_EQ(counts[0], 0);
    for (int s = 1; s <= 3; ++s) EXPECT_NEAR(counts[static_cast<std::size_t>(s)] / double(n), q(s), 0.006);
}

TEST(ClassifyPair, AllOutcomes) {
    const std::vector<std::uint32_t> colors{0, 0, 1, 2};
    const std::vector<std::uint8_t> wild{0, 0, 1, 0};
    EXPECT_EQ(classify_pair(1, 1, colors, wild), PairOutcome::loop);
    EXPECT_EQ(classify_pair(0, 1, colors, wild), PairOutcome::agreement);
    EXPECT_EQ(classify_pair(1, 2, colors, wild), PairOutcome::conflict);
    EXPECT_EQ(classify_pair(3, 2, colors, wild), PairOutcome::conflict);
    EXPECT_EQ(classify_pair(0, 3, colors, wild), PairOutcome::inadmissible);
}

TEST(CollapseEdgeKeys, MergesAndClassifies) {
    const std::vector<std::uint32_t> colors{0, 0, 1};
    std::vector<std::uint64_t> keys{edge_key(1, 0), edge_key(0, 1), edge_key(2, 1), edge_key(0, 1)};
    const auto e = collapse_edge_keys(keys, colors);
    ASSERT_EQ(e.size(), 2u);
    EXPECT_EQ(e[0], (WeightedEdge{0, 1, 3, EdgeKind::agreement}));
    EXPECT_EQ(e[1], (WeightedEdge{1, 2, 1, EdgeKind::conflict}));
}

TEST(SplitGraphs, PartitionsEdges) {
    LabelledMultigraph g;
    g.color = {0, 0, 1};
    g.wild = {0, 1, 0};
    g.edges = {{0, 1, 2, EdgeKind::agreement}, {1, 2, 1, EdgeKind::conflict}};
    const auto [a, c] = split_graphs(g);
    ASSERT_EQ(a.edges.size(), 1u);
    ASSERT_EQ(c.edges.size(), 1u);
    EXPECT_EQ(a.edges[0].weight, 2u);
    EXPECT_EQ(c.edges[0].kind, EdgeKind::conflict);
    EXPECT_EQ(a.vertex_count(), 3u);
}

TEST(RandomWalk, StaysInsideSubtreeAndFollowsMarks) {
    // Root with two leaves carrying marks 1 and 3.
    const auto t = LatentTree::from_offspring({{2}});
    const std::vector<double> marks{1.0, 3.0};
    const auto m = aggregate_marks(t, marks);
    auto eng = RngFactory(4).stream(Stage::test);
    int ones = 0;
    const int n = 40000;
    for (int i = 0; i < n; ++i) ones += random_walk(t, m, 0, 0, eng) == 1;
    EXPECT_NEAR(ones / double(n), 0.75, 0.01);
    EXPECT_EQ(random_walk(t, m, 1, 0, eng), 0u);
}

TEST(MatchMode, TallyIdentities) {
    const auto in = make_instance(6.0, 4, 2.0, {1.0, 0.6}, 0.1, 31);
    const auto q = HeightDistribution::canonical(0.7, 4);
    const auto g = generate_match_mode(in.tree, in.colors, in.attrs, q, RngFactory(31), 2);
    const auto& t = g.tally;
    EXPECT_EQ(2 * t.attempts + t.unmatched, t.half_edges);
    EXPECT_GT(t.conflict, 0u);
    EXPECT_GT(t.agreement, 0u);
    expect_consistent(g);
    EXPECT_EQ(g.vertex_count(), in.tree.leaf_count());
}

TEST(MatchMode, StreamingEqualsTwoStepPath) {
    const auto in = make_instance(5.0, 4, 1.5, {0.5, 0.8}, 0.2, 12);
    const auto q = HeightDistribution::canonical(0.6, 4);
    const RngFactory rngs(12);
    const auto direct = generate_match_mode(in.tree, in.colors, in.attrs, q, rngs, 1);
    const auto lists = generate_half_edges(in.tree, in.attrs.mark, q, rngs);
    EXPECT_EQ(lists.total(), direct.tally.half_edges);
    const auto two_step = match_half_edges(lists, in.colors.leaf_colors(), in.attrs.wild, rngs, 1);
    EXPECT_EQ(direct.edges, two_step.edges);
    EXPECT_EQ(direct.tally.unmatched, two_step.tally.unmatched);
    EXPECT_EQ(direct.tally.loops, two_step.tally.loops);
}

TEST(MatchMode, ThreadCountDoesNotChangeOutput) {
    const auto in = make_instance(7.0, 4, 2.0, {1.0, 0.5}, 0.05, 3);
    const auto q = HeightDistribution::canonical(0.8, 4);
    const auto a = generate_match_mode(in.tree, in.colors, in.attrs, q, RngFactory(3), 1);
    const auto b = generate_match_mode(in.tree, in.colors, in.attrs, q, RngFactory(3), 3);
    EXPECT_EQ(a.edges, b.edges);
    EXPECT_EQ(a.tally.attempts, b.tally.attempts);
}

TEST(MatchMode, HeightOneEdgesAreAgreement) {
    // All mass at height 1: every pair shares a parent, and rho_D = 0.
    const auto in = make_instance(6.0, 3, 2.0, {1.0, 0.4}, 0.3, 8);
    const HeightDistribution q({1.0, 0.0, 0.0});
    const auto g = generate_match_mode(in.tree, in.colors, in.attrs, q, RngFactory(8), 1);
    EXPECT_GT(g.tally.agreement, 0u);
    EXPECT_EQ(g.tally.conflict, 0u);
    EXPECT_EQ(g.tally.inadmissible, 0u);
    for (const auto& e : g.edges) EXPECT_EQ(in.tree.parent(3, e.u), in.tree.parent(3, e.v));
}

TEST(WalkMode, TallyIdentitiesAndThreads) {
    const auto in = make_instance(5.0, 4, 1.5, {1.0, 0.5}, 0.1, 17);
    const auto q = HeightDistribution::canonical(0.5, 4);
    const auto a = generate_walk_mode(in.tree, in.colors, in.marks, in.attrs, q, RngFactory(17), 1);
    const auto b = generate_walk_mode(in.tree, in.colors, in.marks, in.attrs, q, RngFactory(17), 4);
    expect_consistent(a);
    EXPECT_EQ(a.edges, b.edges);
    EXPECT_EQ(a.tally.first_decoupling, b.tally.first_decoupling);
    ASSERT_EQ(a.tally.first_decoupling.size(), 4u);
    const auto fd = std::accumulate(a.tally.first_decoupling.begin(), a.tally.first_decoupling.end(), std::uint64_t{0});
    EXPECT_EQ(fd + a.tally.loops, a.tally.attempts);
    EXPECT_EQ(a.tally.unmatched, 0u);
}

TEST(WalkMode, AgreesWithMatchModeInMean) {
    const auto in = make_instance(3.0, 3, 1.0, {std::log(5.0), 0.0}, 0.2, 99);
    const auto q = HeightDistribution::canonical(0.5, 3);
    const int reps = 400;
    double sw = 0, sw2 = 0, sm = 0, sm2 = 0, unmatched = 0;
    for (int r = 0; r < reps; ++r) {
        const RngFactory rngs(5000 + r);
        const double w = static_cast<double>(
            generate_walk_mode(in.tree, in.colors, in.marks, in.attrs, q, rngs).tally.agreement);
        const auto gm = generate_match_mode(in.tree, in.colors, in.attrs, q, rngs);
        const double m = static_cast<double>(gm.tally.agreement);
        sw += w;
        sw2 += w * w;
        sm += m;
        sm2 += m * m;
        unmatched += static_cast<double>(gm.tally.unmatched);
    }
    const double mw = sw / reps, mm = sm / reps;
    const double se = std::sqrt((sw2 / reps - mw * mw + sm2 / reps - mm * mm) / reps);
    // Matching loses about half an attempt per leftover half-edge.
    EXPECT_NEAR(mw, mm, unmatched / reps / 2 + 4 * se);
}

TEST(DepthOne, NoColorSwitchMeansNoConflict) {
    const DepthOneParams p{20, 0.8, 5.0, 10.0, 0.0, 0.0};
    auto eng = RngFactory(2).stream(Stage::depth_one);
    for (int r = 0; r < 50; ++r) {
        const auto t = depth_one_generate(p, eng);
        EXPECT_EQ(t.conflict, 0u);
        EXPECT_EQ(t.inadmissible, 0u);
        EXPECT_EQ(t.agreement, t.distinct);
        EXPECT_EQ(t.distinct + t.loops, t.attempts);
    }
}

TEST(DepthOne, FormulaValues) {
    const DepthOneParams p{25, 0.8, 14.0, 3.6 * 196.0, 0.1, 0.08};
    const auto f = depth_one_formulas(p);
    EXPECT_NEAR(f.attempts, 140.0, 1e-12);
    // alpha nu (n - 1) / 2 * (1 - eta^2 / (n nu^2))
    EXPECT_NEAR(f.distinct, 0.8 * 14.0 * 24.0 / 2.0 * (1.0 - 3.6 / 25.0), 1e-9);
    EXPECT_NEAR(f.agreement, 0.81 * f.distinct, 1e-9);
    EXPECT_NEAR(f.conflict, 0.1 * 1.9 * 0.08 * 1.92 * f.distinct, 1e-9);
    EXPECT_NEAR(f.attempts, f.distinct + f.loops, 1e-9);
    EXPECT_NEAR(f.distinct, f.agreement + f.conflict + f.inadmissible, 1e-9);
}
