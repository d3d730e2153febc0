#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <vector>

#include "hag/rng.hpp"

namespace hag {

/// Depth-stratified rooted tree with every leaf at depth D.
///
/// Nodes are numbered per level in breadth-first order, so the children of
/// node i at depth d occupy the contiguous index range
/// [first_child(d, i), first_child(d, i + 1)) of level d + 1, and the leaves
/// below any node form a contiguous range of leaf indices.
class LatentTree {
  public:
    /// Build from per-level offspring counts: offspring[d][i] is the number
    /// of children of node i at depth d, for d = 0..D-1. Every count must be
    /// at least 1 and level d + 1 has sum(offspring[d]) nodes.
    static LatentTree from_offspring(std::vector<std::vector<std::uint32_t>> offspring);

    int depth() const noexcept { return depth_; }
    std::uint64_t level_size(int d) const { return sizes_[static_cast<std::size_t>(d)]; }
    std::uint64_t leaf_count() const { return sizes_.back(); }
    std::uint64_t node_count() const noexcept { return node_count_; }

    std::uint32_t offspring(int d, std::uint64_t i) const;
    std::uint64_t first_child(int d, std::uint64_t i) const { return child_offsets_[static_cast<std::size_t>(d)][i]; }
    std::uint32_t parent(int d, std::uint64_t i) const { return parents_[static_cast<std::size_t>(d)][i]; }

    /// Leaves below node i at depth d are [first_leaf(d, i), first_leaf(d, i + 1)).
    std::uint64_t first_leaf(int d, std::uint64_t i) const { return leaf_offsets_[static_cast<std::size_t>(d)][i]; }
    std::span<const std::uint64_t> leaf_offsets(int d) const { return leaf_offsets_[static_cast<std::size_t>(d)]; }

    /// Index at depth D - s of the s-th ancestor of leaf x.
    std::uint64_t ancestor_of_leaf(std::uint64_t leaf, int s) const;

    /// Global breadth-first id of node i at depth d (root is 0).
    std::uint64_t global_id(int d, std::uint64_t i) const { return level_start_[static_cast<std::size_t>(d)] + i; }

  private:
    int depth_ = 0;
    std::uint64_t node_count_ = 0;
    std::vector<std::uint64_t> sizes_;                       // |V_d|, d = 0..D
    std::vector<std::uint64_t> level_start_;                 // global id of first node per level
    std::vector<std::vector<std::uint64_t>> child_offsets_;  // d = 0..D-1, size |V_d| + 1
    std::vector<std::vector<std::uint32_t>> parents_;        // d = 1..D (entry 0 empty)
    std::vector<std::vector<std::uint64_t>> leaf_offsets_;   // d = 0..D, size |V_d| + 1
};

/// Per-node color labels, dense ids 0..K-1 in breadth-first creation order.
struct ColorAssignment {
    std::vector<std::vector<std::uint32_t>> color;  // color[d][i]
    std::uint32_t count = 0;                        // K
    std::span<const std::uint32_t> leaf_colors() const { return color.back(); }
};

/// Expected node count (mu^{D+1} - 1) / (mu - 1).
double expected_node_count(double mu, int depth);

/// Color-switch probabilities indexed by depth: rates[d] = rho_d for
/// d = 1..D, rates[0] = 0 (the root has no trial). rho_D = 0.
std::vector<double> color_switch_rates(double mu, int depth, double theta);

struct TreeOptions {
    /// Refuse to sample when the expected node count exceeds this.
    double node_budget = 1.0e9;
};

/// Galton-Watson tree of the given depth with 1 + Poisson(mu - 1) offspring.
/// The offspring count of node (d, i) is drawn from its own tree-stage
/// stream, so the result depends only on the seed.
LatentTree sample_tree(double mu, int depth, const RngFactory& rngs, const TreeOptions& opts = {});

/// Bernoulli(rho_d) fresh-color trial per node (own colors-stage stream),
/// then ids handed out in breadth-first order.
ColorAssignment assign_colors(const LatentTree& tree, std::span<const double> rates, const RngFactory& rngs);

/// 1 + theta (mu - 1) sum_{d=1}^{D-1} 1 / (1 + (theta mu - theta - mu) mu^{-d}).
double expected_label_count(double mu, int depth, double theta);

/// nu_d = mu^{D-d} prod_{t=d+1}^{D} (1 - rho_t): mean leaves of a color born at depth d.
double expected_color_leaf_count(int d, std::span<const double> rates, double mu, int depth);

/// TSV: node_id, depth, parent_id (-1 for the root), color.
void write_tree_tsv(std::ostream& os, const LatentTree& tree, const ColorAssignment& colors);

}  // namespace hag
