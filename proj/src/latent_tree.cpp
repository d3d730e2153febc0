#include "hag/latent_tree.hpp"

#include <cmath>
#include <limits>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include "hag/params.hpp"

namespace hag {

LatentTree LatentTree::from_offspring(std::vector<std::vector<std::uint32_t>> offspring) {
    if (offspring.empty()) throw std::invalid_argument("latent tree: depth must be at least 1");
    LatentTree t;
    t.depth_ = static_cast<int>(offspring.size());
    const auto D = static_cast<std::size_t>(t.depth_);
    t.sizes_.assign(D + 1, 0);
    t.sizes_[0] = 1;
    t.child_offsets_.resize(D);
    t.parents_.resize(D + 1);
    for (std::size_t d = 0; d < D; ++d) {
        const auto& counts = offspring[d];
        if (counts.size() != t.sizes_[d]) {
            throw std::invalid_argument("latent tree: offspring vector size does not match level size");
        }
        auto& offsets = t.child_offsets_[d];
        offsets.resize(counts.size() + 1);
        offsets[0] = 0;
        for (std::size_t i = 0; i < counts.size(); ++i) {
            if (counts[i] == 0) throw std::invalid_argument("latent tree: every non-leaf node needs a child");
            offsets[i + 1] = offsets[i] + counts[i];
        }
        t.sizes_[d + 1] = offsets.back();
        if (t.sizes_[d + 1] > std::numeric_limits<std::uint32_t>::max()) {
            throw std::length_error("latent tree: level exceeds 2^32 nodes");
        }
        auto& par = t.parents_[d + 1];
        par.resize(t.sizes_[d + 1]);
        for (std::size_t i = 0; i < counts.size(); ++i) {
            for (auto c = offsets[i]; c < offsets[i + 1]; ++c) par[c] = static_cast<std::uint32_t>(i);
        }
    }
    t.level_start_.assign(D + 1, 0);
    for (std::size_t d = 1; d <= D; ++d) t.level_start_[d] = t.level_start_[d - 1] + t.sizes_[d - 1];
    t.node_count_ = t.level_start_[D] + t.sizes_[D];

    t.leaf_offsets_.resize(D + 1);
    auto& leaf = t.leaf_offsets_[D];
    leaf.resize(t.sizes_[D] + 1);
    for (std::uint64_t i = 0; i <= t.sizes_[D]; ++i) leaf[i] = i;
    for (std::size_t d = D; d-- > 0;) {
        const auto& below = t.leaf_offsets_[d + 1];
        auto& here = t.leaf_offsets_[d];
        here.resize(t.sizes_[d] + 1);
        for (std::uint64_t i = 0; i <= t.sizes_[d]; ++i) here[i] = below[t.child_offsets_[d][i]];
    }
    return t;
}

std::uint32_t LatentTree::offspring(int d, std::uint64_t i) const {
    const auto& off = child_offsets_[static_cast<std::size_t>(d)];
    return static_cast<std::uint32_t>(off[i + 1] - off[i]);
}

std::uint64_t LatentTree::ancestor_of_leaf(std::uint64_t leaf, int s) const {
    std::uint64_t node = leaf;
    for (int d = depth_; d > depth_ - s; --d) node = parents_[static_cast<std::size_t>(d)][node];
    return node;
}

double expected_node_count(double mu, int depth) {
    if (mu == 1.0) return depth + 1.0;
    return (std::pow(mu, depth + 1) - 1.0) / (mu - 1.0);
}

std::vector<double> color_switch_rates(double mu, int depth, double theta) {
    if (!(mu > 1.0)) throw std::invalid_argument("color_switch_rates: mu must exceed 1");
    if (!(theta > 0.0)) throw std::invalid_argument("color_switch_rates: theta must be positive");
    if (depth < 1) throw std::invalid_argument("color_switch_rates: depth must be at least 1");
    std::vector<double> rates(static_cast<std::size_t>(depth) + 1, 0.0);
    for (int d = 1; d < depth; ++d) {
        const double r = theta * (mu - 1.0) / ((theta - 1.0) * (mu - 1.0) + std::pow(mu, d) - 1.0);
        rates[static_cast<std::size_t>(d)] = r;
    }
    return rates;
}

LatentTree sample_tree(double mu, int depth, const RngFactory& rngs, const TreeOptions& opts) {
    if (!(mu > 1.0)) throw std::invalid_argument("sample_tree: mu must exceed 1");
    if (depth < 1) throw std::invalid_argument("sample_tree: depth must be at least 1");
    const double expected = expected_node_count(mu, depth);
    if (expected > opts.node_budget) {
        std::ostringstream msg;
        msg << "sample_tree: expected node count " << expected << " exceeds the node budget " << opts.node_budget;
        throw InfeasibleError(msg.str());
    }
    std::vector<std::vector<std::uint32_t>> offspring(static_cast<std::size_t>(depth));
    std::uint64_t level = 1;
    for (int d = 0; d < depth; ++d) {
        auto& counts = offspring[static_cast<std::size_t>(d)];
        counts.resize(level);
        std::uint64_t next = 0;
        for (std::uint64_t i = 0; i < level; ++i) {
            auto eng = rngs.stream(Stage::tree, node_entity(d, i));
            counts[i] = static_cast<std::uint32_t>(1 + poisson(eng, mu - 1.0));
            next += counts[i];
        }
        level = next;
    }
    return LatentTree::from_offspring(std::move(offspring));
}

ColorAssignment assign_colors(const LatentTree& tree, std::span<const double> rates, const RngFactory& rngs) {
    const int D = tree.depth();
    if (rates.size() != static_cast<std::size_t>(D) + 1) {
        throw std::invalid_argument("assign_colors: need one rate per depth 1..D (index 0 unused)");
    }
    ColorAssignment out;
    out.color.resize(static_cast<std::size_t>(D) + 1);
    out.color[0] = {0};
    std::uint32_t next = 1;
    for (int d = 1; d <= D; ++d) {
        const double rho = rates[static_cast<std::size_t>(d)];
        auto& here = out.color[static_cast<std::size_t>(d)];
        const auto& above = out.color[static_cast<std::size_t>(d) - 1];
        here.resize(tree.level_size(d));
        for (std::uint64_t i = 0; i < here.size(); ++i) {
            bool fresh = rho >= 1.0;
            if (rho > 0.0 && rho < 1.0) {
                auto eng = rngs.stream(Stage::colors, node_entity(d, i));
                fresh = bernoulli(eng, rho);
            }
            here[i] = fresh ? next++ : above[tree.parent(d, i)];
        }
    }
    out.count = next;
    return out;
}

double expected_label_count(double mu, int depth, double theta) {
    if (depth < 1) throw std::invalid_argument("expected_label_count: depth must be at least 1");
    if (!(mu > 1.0) || !(theta > 0.0)) throw std::invalid_argument("expected_label_count: need mu > 1, theta > 0");
    long double sum = 0.0L;
    const long double c = theta * mu - theta - mu;
    for (int d = 1; d < depth; ++d) sum += 1.0L / (1.0L + c * std::pow(static_cast<long double>(mu), -d));
    return static_cast<double>(1.0L + theta * (mu - 1.0) * sum);
}

double expected_color_leaf_count(int d, std::span<const double> rates, double mu, int depth) {
    if (d < 1 || d > depth) throw std::invalid_argument("expected_color_leaf_count: need 1 <= d <= D");
    if (rates.size() != static_cast<std::size_t>(depth) + 1) {
        throw std::invalid_argument("expected_color_leaf_count: rates must be indexed 0..D");
    }
    double v = std::pow(mu, depth - d);
    for (int t = d + 1; t <= depth; ++t) v *= 1.0 - rates[static_cast<std::size_t>(t)];
    return v;
}

void write_tree_tsv(std::ostream& os, const LatentTree& tree, const ColorAssignment& colors) {
    for (int d = 0; d <= tree.depth(); ++d) {
        for (std::uint64_t i = 0; i < tree.level_size(d); ++i) {
            os << tree.global_id(d, i) << '\t' << d << '\t';
            if (d == 0) {
                os << -1;
            } else {
                os << tree.global_id(d - 1, tree.parent(d, i));
            }
            os << '\t' << colors.color[static_cast<std::size_t>(d)][i] << '\n';
        }
    }
}

}  // namespace hag
