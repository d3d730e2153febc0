#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <iterator>
#include <sstream>

#include "hag/commands.hpp"
#include "hag/io.hpp"

using namespace hag;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
    const auto d = fs::temp_directory_path() / ("hag_test_" + name);
    fs::remove_all(d);
    fs::create_directories(d);
    return d;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

void put(const fs::path& p, const std::string& s) { std::ofstream(p) << s; }

const char* kSmallParams = R"({"mu": 4.0, "depth": 3, "theta": 1.5, "q1": 0.7, "mu_o": 1.0, "sigma_o": 0.5, "omega": 0.1})";

}  // namespace

TEST(EdgesTsv, RoundTrip) {
    const std::vector<WeightedEdge> e{{0, 3, 2, EdgeKind::agreement}, {1, 2, 1, EdgeKind::conflict}};
    std::stringstream ss;
    write_edges_tsv(ss, e);
    EXPECT_EQ(ss.str(), "0\t3\t2\tA\n1\t2\t1\tC\n");
    EXPECT_EQ(read_edges_tsv(ss), e);
}

TEST(EdgesTsv, NormalisesOrientationAndRejectsGarbage) {
    std::istringstream swapped("5\t2\t1\tA\n");
    const auto e = read_edges_tsv(swapped);
    ASSERT_EQ(e.size(), 1u);
    EXPECT_EQ(e[0].u, 2u);
    EXPECT_EQ(e[0].v, 5u);
    std::istringstream bad_kind("0\t1\t1\tX\n"), short_row("0\t1\n"), bad_num("0\tz\t1\tA\n");
    EXPECT_THROW(read_edges_tsv(bad_kind), ParseError);
    EXPECT_THROW(read_edges_tsv(short_row), ParseError);
    EXPECT_THROW(read_edges_tsv(bad_num), ParseError);
}

TEST(VertexTsv, ThreeAndFourColumns) {
    std::istringstream three("1\t2.5\t1\n0\t1.5\t0\n");
    const auto t = read_vertex_tsv(three);
    EXPECT_EQ(t.mark, (std::vector<double>{1.5, 2.5}));
    EXPECT_EQ(t.wild, (std::vector<std::uint8_t>{0, 1}));
    EXPECT_TRUE(t.color.empty());
    std::istringstream four("0\t1.5\t0\t7\n1\t2\t1\t3\n");
    EXPECT_EQ(read_vertex_tsv(four).color, (std::vector<std::uint32_t>{7, 3}));
    std::istringstream gap("0\t1\t0\n2\t1\t0\n"), mixed("0\t1\t0\t1\n1\t1\t0\n"), wild("0\t1\t2\n");
    EXPECT_THROW(read_vertex_tsv(gap), ParseError);
    EXPECT_THROW(read_vertex_tsv(mixed), ParseError);
    EXPECT_THROW(read_vertex_tsv(wild), ParseError);
}

TEST(Degrees, CommentsAndLastColumn) {
    std::istringstream in("# id degree\n0 4\n1\t9\n\n2 1\n");
    EXPECT_EQ(read_degrees(in), (std::vector<double>{4, 9, 1}));
    std::istringstream zero("0\n");
    EXPECT_THROW(read_degrees(zero), ParseError);
}

TEST(LoadGraph, ValidatesFiles) {
    const auto d = scratch("load");
    put(d / "v.tsv", "0\t1\t0\t0\n1\t1\t1\t1\n");
    put(d / "e.tsv", "");
    EXPECT_THROW(load_graph(d / "e.tsv", d / "v.tsv"), ParseError);
    put(d / "e.tsv", "0\t5\t1\tA\n");
    EXPECT_THROW(load_graph(d / "e.tsv", d / "v.tsv"), ParseError);
    put(d / "e.tsv", "0\t1\t1\tC\n");
    const auto g = load_graph(d / "e.tsv", d / "v.tsv");
    EXPECT_EQ(g.vertex_count(), 2u);
    EXPECT_EQ(g.edges[0].kind, EdgeKind::conflict);
    EXPECT_THROW(load_graph(d / "missing.tsv", d / "v.tsv"), IoError);
}

TEST(Commands, MalformedParamsExitTwo) {
    const auto d = scratch("badjson");
    put(d / "p.json", "{ mu: ");
    RunConfig cfg;
    cfg.params = d / "p.json";
    cfg.out_dir = d;
    std::ostringstream out, err;
    EXPECT_EQ(guarded(err, [&] { return cmd_generate(cfg, out); }), 2);
    EXPECT_NE(err.str().find("error"), std::string::npos);
}

TEST(Commands, InfeasibleFitExitsOne) {
    const auto d = scratch("infeasible");
    put(d / "t.json", R"({"vertices": 1000, "labels": 50, "mean_agreement_degree": 25,
                          "mean_conflict_degree": 0.3, "alcc": 0.5, "degree_variance": 700})");
    RunConfig cfg;
    cfg.input = d / "t.json";
    cfg.out_dir = d;
    std::ostringstream out, err;
    EXPECT_EQ(guarded(err, [&] { return cmd_fit(cfg, out); }), 1);
}

TEST(Commands, FitWritesParamsAndCurve) {
    const auto d = scratch("fit");
    put(d / "t.json", R"({"vertices": 3e7, "labels": 200, "mean_agreement_degree": 25,
                          "mean_conflict_degree": 0.37, "alcc": 0.5, "degree_variance": 700,
                          "scale": 0.0152325333})");
    RunConfig cfg;
    cfg.input = d / "t.json";
    cfg.out_dir = d / "out";
    std::ostringstream out, err;
    ASSERT_EQ(guarded(err, [&] { return cmd_fit(cfg, out); }), 0) << err.str();
    const auto p = read_params(d / "out" / "params.json");
    EXPECT_EQ(p.depth, 4);
    EXPECT_NEAR(p.q1, 0.82, 0.05);
    EXPECT_EQ(slurp(d / "out" / "fitcurve.csv").rfind("q1,nu,pi1_prime\n", 0), 0u);
}

TEST(Commands, DegreeFileTargets) {
    const auto d = scratch("degfile");
    put(d / "deg.txt", "1\n2\n");
    put(d / "t.json", R"({"vertices": 3e7, "labels": 200, "mean_agreement_degree": 25,
                          "mean_conflict_degree": 0.37, "alcc": 0.5, "degree_file": "deg.txt"})");
    const auto t = read_targets(d / "t.json");
    // e^{2 phi} (e^tau - 1) with phi = log 1.5, tau from the two-point sample
    EXPECT_NEAR(t.stats.eta2, 2.25 * std::expm1(0.1199825134671828), 1e-9);
}

TEST(Commands, GenerateIsReproducibleAndDiagnosable) {
    const auto d = scratch("gen");
    put(d / "p.json", kSmallParams);
    RunConfig cfg;
    cfg.params = d / "p.json";
    cfg.seed = 42;
    cfg.threads = 2;
    cfg.dump_tree = true;
    std::ostringstream out, err;
    cfg.out_dir = d / "a";
    ASSERT_EQ(guarded(err, [&] { return cmd_generate(cfg, out); }), 0) << err.str();
    cfg.out_dir = d / "b";
    cfg.threads = 1;
    ASSERT_EQ(guarded(err, [&] { return cmd_generate(cfg, out); }), 0) << err.str();
    EXPECT_EQ(slurp(d / "a" / "edges.tsv"), slurp(d / "b" / "edges.tsv"));
    EXPECT_EQ(slurp(d / "a" / "vertices.tsv"), slurp(d / "b" / "vertices.tsv"));
    EXPECT_TRUE(fs::exists(d / "a" / "tree.tsv"));
    EXPECT_TRUE(fs::exists(d / "a" / "report.json"));

    RunConfig dc;
    dc.edges = d / "a" / "edges.tsv";
    dc.vertices = d / "a" / "vertices.tsv";
    dc.out_dir = d / "diag";
    dc.components = 2;
    ASSERT_EQ(guarded(err, [&] { return cmd_diagnose(dc, out); }), 0) << err.str();
    for (const char* f : {"stats.json", "label_freq.csv", "component_sizes.csv"}) {
        EXPECT_TRUE(fs::exists(d / "diag" / f)) << f;
    }
}

TEST(Commands, OverridesApplyWithoutParamsFile) {
    const auto d = scratch("analytics");
    RunConfig cfg;
    cfg.overrides.mu = 26.0;
    cfg.overrides.depth = 4;
    cfg.overrides.theta = 3.62;
    cfg.overrides.q1 = 0.82;
    cfg.overrides.mu_o = 3.79;
    cfg.overrides.sigma_o = 0.495;
    cfg.overrides.omega = 0.043;
    cfg.out_dir = d;
    std::ostringstream out, err;
    ASSERT_EQ(guarded(err, [&] { return cmd_analytics(cfg, out); }), 0) << err.str();
    EXPECT_TRUE(fs::exists(d / "analytics.json"));
    EXPECT_FALSE(out.str().empty());
}
