#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "hag/edge_gen.hpp"
#include "hag/rng.hpp"

namespace hag {

/// Simple undirected graph in compressed adjacency form; neighbor lists sorted.
class SimpleGraph {
  public:
    SimpleGraph() = default;
    /// Builds from (u, v) pairs on vertices 0..n-1; weights and duplicates dropped.
    SimpleGraph(std::size_t n, std::span<const WeightedEdge> edges);

    std::size_t vertex_count() const noexcept { return offsets_.empty() ? 0 : offsets_.size() - 1; }
    std::size_t edge_count() const noexcept { return adj_.size() / 2; }
    std::size_t degree(std::size_t v) const { return offsets_[v + 1] - offsets_[v]; }
    std::span<const std::uint32_t> neighbors(std::size_t v) const {
        return {adj_.data() + offsets_[v], offsets_[v + 1] - offsets_[v]};
    }
    bool adjacent(std::uint32_t u, std::uint32_t v) const;

  private:
    std::vector<std::uint64_t> offsets_;
    std::vector<std::uint32_t> adj_;
};

struct GraphStatsOptions {
    /// Estimate ALCC from this many sampled vertices instead of exactly.
    std::optional<std::uint64_t> alcc_samples;
    std::uint64_t seed = 0;
    int threads = 1;
};

struct GraphStats {
    std::uint64_t vertices = 0;  // vertices with at least one edge
    std::uint64_t agreement_edges = 0;
    std::uint64_t conflict_edges = 0;
    std::uint64_t agreement_vertices = 0;
    double d_A = 0.0;
    double d_C = 0.0;
    double alcc = 0.0;  // over vertices of the agreement graph
    bool alcc_sampled = false;
    std::optional<std::uint64_t> labels;  // distinct colors among vertices, when colors are known
    double degree_mean = 0.0;
    double degree_variance = 0.0;  // plain sample variance of total degree
    double eta2_simplistic = 0.0;
    double eta2_low_bias = 0.0;
    std::optional<GenerationTally> tally;
};

/// Degrees count distinct neighbors; multi-edge weights are ignored throughout.
/// Edge kinds are taken from the edges; g.color may be empty.
GraphStats measure_graph_stats(const LabelledMultigraph& g, const GraphStatsOptions& opts = {});

/// Local clustering coefficients of every vertex (0 when degree < 2).
std::vector<double> local_clustering(const SimpleGraph& g, int threads = 1);

/// Vertex count per color among non-isolated vertices, sorted descending.
std::vector<std::uint64_t> label_frequencies(const LabelledMultigraph& g);

/// Splits sorted log frequencies into `bands` groups at the largest gaps and
/// reports whether each gap between neighbouring band medians exceeds the
/// spread inside both bands. Diagnostic only.
struct BandReport {
    std::vector<double> medians;
    std::vector<double> spreads;  // max - min of log count within the band
    bool separated = false;
};
BandReport label_bands(std::span<const std::uint64_t> frequencies, int bands);

/// Component sizes of the graph restricted to non-isolated vertices, descending.
std::vector<std::uint64_t> component_sizes(const SimpleGraph& g);

struct ComponentFit {
    std::vector<std::uint64_t> sizes;
    double p = 0.0;      // fraction of vertices in the m largest components
    double delta = 0.0;  // Dirichlet parameter matching p
};

ComponentFit component_size_fit(const LabelledMultigraph& agreement_graph, int m);

/// delta = 1 / ((1 - p)^(-1/m) - 1).
double dirichlet_delta(double p, int m);

/// X_k = Y_k prod_{i<k} (1 - Y_i), Y ~ Beta(1, delta), sorted descending.
std::vector<double> stick_breaking_sample(double delta, int m, Philox& eng);

}  // namespace hag
