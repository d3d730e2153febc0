#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <vector>

#include "hag/latent_tree.hpp"
#include "hag/rng.hpp"

namespace hag {

struct LogNormalParams {
    double mu_o = 0.0;
    double sigma_o = 0.0;
};

struct Moments {
    double mean = 0.0;
    double variance = 0.0;
};

/// Log-normal (mu_o, sigma_o) with the given mean and variance:
/// sigma_o^2 = log(1 + var / mean^2), mu_o = log(mean) - sigma_o^2 / 2.
LogNormalParams lognormal_from_moments(double mean, double variance);

/// Inverse of lognormal_from_moments.
Moments lognormal_moments(const LogNormalParams& p);

/// Per-leaf mark and wild flag.
struct LeafAttributes {
    std::vector<double> mark;
    std::vector<std::uint8_t> wild;

    std::size_t size() const noexcept { return mark.size(); }
};

struct LeafSamplingOptions {
    double omega = 0.0;
    double beta = 0.0;
    /// Round marks up to integers (the figure style); off by default.
    bool ceil_marks = false;
};

/// F_x = exp(mu_o + sigma_o Y_x); wild iff U_x < omega exp(beta Y_x - beta^2/2),
/// with the tilted probability clamped to 1. Y_x comes from the marks stream
/// and U_x from the wildness stream, both keyed by leaf index.
LeafAttributes sample_leaf_attributes(std::size_t count, const LogNormalParams& law,
                                      const LeafSamplingOptions& opts, const RngFactory& rngs);

/// Aggregated marks F_v for every node, plus per-level exclusive prefix sums
/// used for proportional sampling within a level.
class NodeMarks {
  public:
    int depth() const noexcept { return static_cast<int>(values_.size()) - 1; }
    double at(int d, std::uint64_t i) const { return values_[static_cast<std::size_t>(d)][i]; }
    double total() const { return values_[0][0]; }
    std::span<const double> level(int d) const { return values_[static_cast<std::size_t>(d)]; }
    /// prefix(d)[i] = sum of F over nodes 0..i-1 at depth d; size |V_d| + 1.
    std::span<const double> prefix(int d) const { return prefix_[static_cast<std::size_t>(d)]; }

  private:
    friend NodeMarks aggregate_marks(const LatentTree&, std::span<const double>);
    std::vector<std::vector<double>> values_;
    std::vector<std::vector<double>> prefix_;
};

/// Bottom-up sums F_v = sum of the marks of the leaves below v.
NodeMarks aggregate_marks(const LatentTree& tree, std::span<const double> leaf_marks);

/// TSV: leaf_id, mark, wild (0/1), and the leaf color when colors are given.
void write_leaf_tsv(std::ostream& os, const LeafAttributes& attrs, std::span<const std::uint32_t> colors = {});

}  // namespace hag
