#pragma once

#include <algorithm>
#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include "hag/heights.hpp"
#include "hag/latent_tree.hpp"
#include "hag/marks.hpp"
#include "hag/rng.hpp"

namespace hag {

enum class EdgeKind : std::uint8_t { agreement, conflict };
enum class PairOutcome : std::uint8_t { agreement, conflict, loop, inadmissible };

/// Outcome of proposing an edge between leaves x and y.
PairOutcome classify_pair(std::uint32_t x, std::uint32_t y, std::span<const std::uint32_t> colors,
                          std::span<const std::uint8_t> wild);

struct WeightedEdge {
    std::uint32_t u = 0;  // u < v
    std::uint32_t v = 0;
    std::uint32_t weight = 0;
    EdgeKind kind = EdgeKind::agreement;

    friend bool operator==(const WeightedEdge&, const WeightedEdge&) = default;
};

struct GenerationTally {
    std::uint64_t attempts = 0;  // walk pairs, or half-edge pairs formed
    std::uint64_t half_edges = 0;
    std::uint64_t agreement = 0;
    std::uint64_t conflict = 0;
    std::uint64_t loops = 0;
    std::uint64_t inadmissible = 0;
    std::uint64_t unmatched = 0;
    /// Walk mode only: pairs whose first decoupling is at height t, t = 0..D-1.
    std::vector<std::uint64_t> first_decoupling;

    GenerationTally& operator+=(const GenerationTally& other);
};

/// Weighted simple graph on leaf vertices with per-vertex color and wildness.
struct LabelledMultigraph {
    std::vector<std::uint32_t> color;
    std::vector<std::uint8_t> wild;
    std::vector<WeightedEdge> edges;  // sorted by (u, v)
    GenerationTally tally;

    std::size_t vertex_count() const noexcept { return std::max(color.size(), wild.size()); }
};

/// Edge-induced agreement and conflict subgraphs (vertex attributes are
/// carried over unchanged; weights preserved).
std::pair<LabelledMultigraph, LabelledMultigraph> split_graphs(const LabelledMultigraph& g);

/// Sorts and merges (u, v) keys into weighted edges, classified by color.
std::vector<WeightedEdge> collapse_edge_keys(std::vector<std::uint64_t>& keys, std::span<const std::uint32_t> colors);

constexpr std::uint64_t edge_key(std::uint32_t x, std::uint32_t y) noexcept {
    return x < y ? (static_cast<std::uint64_t>(x) << 32) | y : (static_cast<std::uint64_t>(y) << 32) | x;
}

/// Directed walk from node v at depth d to a leaf, stepping to child c with
/// probability F_c / F_v. Returns the leaf index.
std::uint32_t random_walk(const LatentTree& tree, const NodeMarks& marks, int d, std::uint64_t v, Philox& eng);

/// Paired random-walk construction: Poisson(F_root / 2) attempts, each with a
/// height s ~ q, a start node at depth D - s drawn proportional to F_v, and
/// two independent walks.
LabelledMultigraph generate_walk_mode(const LatentTree& tree, const ColorAssignment& colors, const NodeMarks& marks,
                                      const LeafAttributes& attrs, const HeightDistribution& q,
                                      const RngFactory& rngs, int threads = 1);

/// Half-edges grouped by link-node depth j = 0..D-1. Within a depth the
/// entries of link node r are leaves[offsets[r] .. offsets[r + 1]).
struct HalfEdgeLists {
    struct Level {
        std::vector<std::uint32_t> leaves;
        std::vector<std::uint64_t> offsets;
    };
    std::vector<Level> by_depth;

    std::uint64_t total() const;
};

/// For every leaf x and height s, Poisson(q_s F_x) copies of x filed under
/// its ancestor at depth D - s.
HalfEdgeLists generate_half_edges(const LatentTree& tree, std::span<const double> leaf_marks,
                                  const HeightDistribution& q, const RngFactory& rngs);

/// Single-round randomized matching at every link node.
LabelledMultigraph match_half_edges(const HalfEdgeLists& lists, std::span<const std::uint32_t> colors,
                                    std::span<const std::uint8_t> wild, const RngFactory& rngs, int threads = 1);

/// generate_half_edges followed by match_half_edges, streamed one link node
/// at a time. Produces exactly the same graph as the two-step path.
LabelledMultigraph generate_match_mode(const LatentTree& tree, const ColorAssignment& colors,
                                       const LeafAttributes& attrs, const HeightDistribution& q,
                                       const RngFactory& rngs, int threads = 1);

// Depth-one model: root with n leaf children.

struct DepthOneParams {
    int n = 0;
    double alpha = 1.0;
    double nu = 1.0;
    double eta2 = 0.0;
    double rho = 0.0;
    double omega = 0.0;
};

struct DepthOneTally {
    std::uint64_t attempts = 0;
    std::uint64_t distinct = 0;  // attempts whose two leaves differ
    std::uint64_t agreement = 0;
    std::uint64_t conflict = 0;
    std::uint64_t loops = 0;
    std::uint64_t inadmissible = 0;
};

struct DepthOneFormulas {
    double attempts = 0.0;
    double distinct = 0.0;  // M_E
    double agreement = 0.0;
    double conflict = 0.0;
    double loops = 0.0;
    double inadmissible = 0.0;
};

/// One replication: log-normal marks with mean nu and variance eta2,
/// Bernoulli(1 - rho) inheritance of the root color (otherwise a unique
/// color), Bernoulli(omega) wildness, Binomial(round(sum F), alpha / 2)
/// attempts of two leaves drawn with replacement proportional to F.
DepthOneTally depth_one_generate(const DepthOneParams& p, Philox& eng);

DepthOneFormulas depth_one_formulas(const DepthOneParams& p);

}  // namespace hag
