#include "hag/marks.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ostream>
#include <stdexcept>

namespace hag {

LogNormalParams lognormal_from_moments(double mean, double variance) {
    if (!(mean > 0.0)) throw std::invalid_argument("lognormal_from_moments: mean must be positive");
    if (!(variance >= 0.0)) throw std::invalid_argument("lognormal_from_moments: variance must be non-negative");
    const double s2 = std::log1p(variance / (mean * mean));
    return {std::log(mean) - 0.5 * s2, std::sqrt(s2)};
}

Moments lognormal_moments(const LogNormalParams& p) {
    const double s2 = p.sigma_o * p.sigma_o;
    const double mean = std::exp(p.mu_o + 0.5 * s2);
    return {mean, mean * mean * std::expm1(s2)};
}

LeafAttributes sample_leaf_attributes(std::size_t count, const LogNormalParams& law,
                                      const LeafSamplingOptions& opts, const RngFactory& rngs) {
    if (!(opts.omega >= 0.0 && opts.omega < 1.0)) {
        throw std::invalid_argument("sample_leaf_attributes: omega must lie in [0, 1)");
    }
    LeafAttributes out;
    out.mark.resize(count);
    out.wild.resize(count);
    const double tilt_shift = 0.5 * opts.beta * opts.beta;
    for (std::size_t x = 0; x < count; ++x) {
        auto mark_eng = rngs.stream(Stage::marks, x);
        const double y = standard_normal(mark_eng);
        double f = std::exp(law.mu_o + law.sigma_o * y);
        if (opts.ceil_marks) f = std::ceil(f);
        out.mark[x] = f;

        if (opts.omega > 0.0) {
            auto wild_eng = rngs.stream(Stage::wildness, x);
            const double u = uniform01(wild_eng);
            const double p = std::min(1.0, opts.omega * std::exp(opts.beta * y - tilt_shift));
            out.wild[x] = u < p ? 1 : 0;
        }
    }
    return out;
}

NodeMarks aggregate_marks(const LatentTree& tree, std::span<const double> leaf_marks) {
    if (leaf_marks.size() != tree.leaf_count()) {
        throw std::invalid_argument("aggregate_marks: one mark per leaf required");
    }
    const int D = tree.depth();
    NodeMarks nm;
    nm.values_.resize(static_cast<std::size_t>(D) + 1);
    nm.prefix_.resize(static_cast<std::size_t>(D) + 1);
    nm.values_[static_cast<std::size_t>(D)].assign(leaf_marks.begin(), leaf_marks.end());
    for (int d = D - 1; d >= 0; --d) {
        const auto& below = nm.values_[static_cast<std::size_t>(d) + 1];
        auto& here = nm.values_[static_cast<std::size_t>(d)];
        here.assign(tree.level_size(d), 0.0);
        for (std::uint64_t i = 0; i < here.size(); ++i) {
            double s = 0.0;
            for (auto c = tree.first_child(d, i); c < tree.first_child(d, i + 1); ++c) s += below[c];
            here[i] = s;
        }
    }
    for (int d = 0; d <= D; ++d) {
        const auto& vals = nm.values_[static_cast<std::size_t>(d)];
        auto& pre = nm.prefix_[static_cast<std::size_t>(d)];
        pre.resize(vals.size() + 1);
        pre[0] = 0.0;
        for (std::size_t i = 0; i < vals.size(); ++i) pre[i + 1] = pre[i] + vals[i];
    }
    return nm;
}

void write_leaf_tsv(std::ostream& os, const LeafAttributes& attrs, std::span<const std::uint32_t> colors) {
    const bool with_color = !colors.empty();
    if (with_color && colors.size() != attrs.size()) {
        throw std::invalid_argument("write_leaf_tsv: color vector size mismatch");
    }
    char buf[64];
    for (std::size_t x = 0; x < attrs.size(); ++x) {
        std::snprintf(buf, sizeof buf, "%.17g", attrs.mark[x]);
        os << x << '\t' << buf << '\t' << static_cast<int>(attrs.wild[x]);
        if (with_color) os << '\t' << colors[x];
        os << '\n';
    }
}

}  // namespace hag
