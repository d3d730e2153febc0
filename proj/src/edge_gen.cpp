#include "hag/edge_gen.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "hag/alias_table.hpp"
#include "parallel.hpp"

namespace hag {

namespace {

constexpr std::uint64_t kWalkBatch = 1u << 16;
constexpr std::uint64_t kAttemptCountEntity = ~std::uint64_t{0};

constexpr std::uint64_t half_edge_entity(std::uint64_t leaf, int height) noexcept {
    return (leaf << 8) | static_cast<std::uint64_t>(height);
}

struct KeyWeight {
    std::uint64_t key;
    std::uint32_t weight;
};

struct Sink {
    std::vector<KeyWeight> edges;
    std::vector<std::uint64_t> scratch;
    GenerationTally tally;
};

void count_outcome(PairOutcome o, GenerationTally& t) {
    switch (o) {
        case PairOutcome::agreement: ++t.agreement; break;
        case PairOutcome::conflict: ++t.conflict; break;
        case PairOutcome::loop: ++t.loops; break;
        case PairOutcome::inadmissible: ++t.inadmissible; break;
    }
}

/// Sort keys and append run-length (key, count) records to out.
void flush_keys(std::vector<std::uint64_t>& keys, std::vector<KeyWeight>& out) {
    std::sort(keys.begin(), keys.end());
    for (std::size_t i = 0; i < keys.size();) {
        std::size_t j = i + 1;
        while (j < keys.size() && keys[j] == keys[i]) ++j;
        out.push_back({keys[i], static_cast<std::uint32_t>(j - i)});
        i = j;
    }
    keys.clear();
}

std::vector<WeightedEdge> merge_sinks(std::vector<Sink>& sinks, std::span<const std::uint32_t> colors,
                                      GenerationTally& tally) {
    std::vector<KeyWeight> all;
    std::size_t n = 0;
    for (auto& s : sinks) n += s.edges.size();
    all.reserve(n);
    for (auto& s : sinks) {
        flush_keys(s.scratch, s.edges);
        all.insert(all.end(), s.edges.begin(), s.edges.end());
        std::vector<KeyWeight>().swap(s.edges);
        tally += s.tally;
    }
    std::sort(all.begin(), all.end(), [](const KeyWeight& a, const KeyWeight& b) { return a.key < b.key; });
    std::vector<WeightedEdge> edges;
    for (std::size_t i = 0; i < all.size();) {
        std::uint64_t w = 0;
        std::size_t j = i;
        for (; j < all.size() && all[j].key == all[i].key; ++j) w += all[j].weight;
        const auto u = static_cast<std::uint32_t>(all[i].key >> 32);
        const auto v = static_cast<std::uint32_t>(all[i].key);
        edges.push_back({u, v, static_cast<std::uint32_t>(w),
                         colors[u] == colors[v] ? EdgeKind::agreement : EdgeKind::conflict});
        i = j;
    }
    return edges;
}

/// One round of Algorithm-1 style matching on the half-edges of a link node:
/// shuffle, then pair consecutive entries.
void match_link_node(std::span<std::uint32_t> items, Philox& eng, std::span<const std::uint32_t> colors,
                     std::span<const std::uint8_t> wild, Sink& sink) {
    const std::size_t n = items.size();
    sink.tally.half_edges += n;
    sink.tally.unmatched += n % 2;
    if (n < 2) return;
    const std::size_t pairs = n / 2;
    sink.tally.attempts += pairs;
    if (std::all_of(items.begin() + 1, items.end(), [&](std::uint32_t x) { return x == items[0]; })) {
        sink.tally.loops += pairs;
        return;
    }
    for (std::size_t i = n - 1; i > 0; --i) {
        const auto j = static_cast<std::size_t>(uniform_index(eng, i + 1));
        std::swap(items[i], items[j]);
    }
    for (std::size_t p = 0; p < pairs; ++p) {
        const auto x = items[2 * p];
        const auto y = items[2 * p + 1];
        const auto outcome = classify_pair(x, y, colors, wild);
        count_outcome(outcome, sink.tally);
        if (outcome == PairOutcome::agreement || outcome == PairOutcome::conflict) {
            sink.scratch.push_back(edge_key(x, y));
        }
    }
    flush_keys(sink.scratch, sink.edges);
}

/// Child of node v at depth d chosen with probability F_c / F_v.
std::uint64_t step_child(const LatentTree& tree, std::span<const double> pre, int d, std::uint64_t v, Philox& eng) {
    const auto c0 = tree.first_child(d, v);
    const auto c1 = tree.first_child(d, v + 1);
    if (c1 - c0 == 1) return c0;
    const double target = pre[c0] + uniform01(eng) * (pre[c1] - pre[c0]);
    const auto it = std::upper_bound(pre.begin() + static_cast<std::ptrdiff_t>(c0) + 1,
                                     pre.begin() + static_cast<std::ptrdiff_t>(c1), target);
    return static_cast<std::uint64_t>(it - pre.begin()) - 1;
}

void check_leaf_vectors(std::size_t leaves, std::size_t colors, std::size_t wild) {
    if (colors != leaves || wild != leaves) {
        throw std::invalid_argument("edge generation: color and wild vectors must have one entry per leaf");
    }
}

}  // namespace

GenerationTally& GenerationTally::operator+=(const GenerationTally& o) {
    attempts += o.attempts;
    half_edges += o.half_edges;
    agreement += o.agreement;
    conflict += o.conflict;
    loops += o.loops;
    inadmissible += o.inadmissible;
    unmatched += o.unmatched;
    if (first_decoupling.size() < o.first_decoupling.size()) first_decoupling.resize(o.first_decoupling.size(), 0);
    for (std::size_t t = 0; t < o.first_decoupling.size(); ++t) first_decoupling[t] += o.first_decoupling[t];
    return *this;
}

PairOutcome classify_pair(std::uint32_t x, std::uint32_t y, std::span<const std::uint32_t> colors,
                          std::span<const std::uint8_t> wild) {
    if (x == y) return PairOutcome::loop;
    if (colors[x] == colors[y]) return PairOutcome::agreement;
    if (wild[x] + wild[y] > 0) return PairOutcome::conflict;
    return PairOutcome::inadmissible;
}

std::pair<LabelledMultigraph, LabelledMultigraph> split_graphs(const LabelledMultigraph& g) {
    LabelledMultigraph a, c;
    a.color = c.color = g.color;
    a.wild = c.wild = g.wild;
    for (const auto& e : g.edges) (e.kind == EdgeKind::agreement ? a : c).edges.push_back(e);
    return {std::move(a), std::move(c)};
}

std::vector<WeightedEdge> collapse_edge_keys(std::vector<std::uint64_t>& keys, std::span<const std::uint32_t> colors) {
    std::vector<Sink> sinks(1);
    sinks[0].scratch.swap(keys);
    GenerationTally unused;
    return merge_sinks(sinks, colors, unused);
}

std::uint32_t random_walk(const LatentTree& tree, const NodeMarks& marks, int d, std::uint64_t v, Philox& eng) {
    const int D = tree.depth();
    for (; d < D; ++d) v = step_child(tree, marks.prefix(d + 1), d, v, eng);
    return static_cast<std::uint32_t>(v);
}

LabelledMultigraph generate_walk_mode(const LatentTree& tree, const ColorAssignment& colors, const NodeMarks& marks,
                                      const LeafAttributes& attrs, const HeightDistribution& q,
                                      const RngFactory& rngs, int threads) {
    const int D = tree.depth();
    if (q.depth() != D) throw std::invalid_argument("generate_walk_mode: height law depth differs from tree depth");
    const auto leaf_colors = colors.leaf_colors();
    check_leaf_vectors(tree.leaf_count(), leaf_colors.size(), attrs.wild.size());

    std::vector<AliasTable> start_tables;
    for (int d = 0; d < D; ++d) start_tables.emplace_back(marks.level(d));

    auto count_eng = rngs.stream(Stage::heights, kAttemptCountEntity);
    const std::uint64_t attempts = poisson(count_eng, 0.5 * marks.total());
    const std::uint64_t batches = (attempts + kWalkBatch - 1) / kWalkBatch;

    std::vector<Sink> sinks(static_cast<std::size_t>(std::max(1, threads)));
    for (auto& s : sinks) s.tally.first_decoupling.assign(static_cast<std::size_t>(D), 0);

    detail::parallel_for(batches, threads, [&](std::size_t b, std::size_t worker) {
        Sink& sink = sinks[worker];
        auto eng = rngs.stream(Stage::walks, b);
        const std::uint64_t lo = b * kWalkBatch;
        const std::uint64_t hi = std::min(attempts, lo + kWalkBatch);
        for (std::uint64_t a = lo; a < hi; ++a) {
            const int s = q.sample(eng);
            const int start_depth = D - s;
            const std::uint64_t start = start_tables[static_cast<std::size_t>(start_depth)].sample(eng);
            // Two walks in lockstep so the first decoupling height is observed.
            std::uint64_t x = start, y = start;
            int decoupled = -1;
            for (int d = start_depth; d < D; ++d) {
                const auto pre = marks.prefix(d + 1);
                const auto nx = step_child(tree, pre, d, x, eng);
                const auto ny = step_child(tree, pre, d, y, eng);
                if (decoupled < 0 && x == y && nx != ny) decoupled = D - d - 1;
                x = nx;
                y = ny;
            }
            ++sink.tally.attempts;
            if (decoupled >= 0) ++sink.tally.first_decoupling[static_cast<std::size_t>(decoupled)];
            const auto xi = static_cast<std::uint32_t>(x);
            const auto yi = static_cast<std::uint32_t>(y);
            const auto outcome = classify_pair(xi, yi, leaf_colors, attrs.wild);
            count_outcome(outcome, sink.tally);
            if (outcome == PairOutcome::agreement || outcome == PairOutcome::conflict) {
                sink.scratch.push_back(edge_key(xi, yi));
            }
        }
        flush_keys(sink.scratch, sink.edges);
    });

    LabelledMultigraph g;
    g.color.assign(leaf_colors.begin(), leaf_colors.end());
    g.wild = attrs.wild;
    g.tally.first_decoupling.assign(static_cast<std::size_t>(D), 0);
    g.edges = merge_sinks(sinks, leaf_colors, g.tally);
    return g;
}

std::uint64_t HalfEdgeLists::total() const {
    std::uint64_t n = 0;
    for (const auto& level : by_depth) n += level.leaves.size();
    return n;
}

HalfEdgeLists generate_half_edges(const LatentTree& tree, std::span<const double> leaf_marks,
                                  const HeightDistribution& q, const RngFactory& rngs) {
    const int D = tree.depth();
    if (q.depth() != D) throw std::invalid_argument("generate_half_edges: height law depth differs from tree depth");
    if (leaf_marks.size() != tree.leaf_count()) throw std::invalid_argument("generate_half_edges: one mark per leaf");
    HalfEdgeLists lists;
    lists.by_depth.resize(static_cast<std::size_t>(D));
    for (int j = 0; j < D; ++j) {
        const int s = D - j;
        auto& level = lists.by_depth[static_cast<std::size_t>(j)];
        const auto leaf_off = tree.leaf_offsets(j);
        level.offsets.assign(tree.level_size(j) + 1, 0);
        for (std::uint64_t r = 0; r < tree.level_size(j); ++r) {
            for (auto x = leaf_off[r]; x < leaf_off[r + 1]; ++x) {
                auto eng = rngs.stream(Stage::heights, half_edge_entity(x, s));
                const auto copies = poisson(eng, q(s) * leaf_marks[x]);
                level.leaves.insert(level.leaves.end(), copies, static_cast<std::uint32_t>(x));
            }
            level.offsets[r + 1] = level.leaves.size();
        }
    }
    return lists;
}

LabelledMultigraph match_half_edges(const HalfEdgeLists& lists, std::span<const std::uint32_t> colors,
                                    std::span<const std::uint8_t> wild, const RngFactory& rngs, int threads) {
    if (colors.size() != wild.size()) throw std::invalid_argument("match_half_edges: color/wild size mismatch");
    struct Task {
        int depth;
        std::uint64_t node;
    };
    std::vector<Task> tasks;
    for (std::size_t j = 0; j < lists.by_depth.size(); ++j) {
        const auto& off = lists.by_depth[j].offsets;
        for (std::uint64_t r = 0; r + 1 < off.size(); ++r) {
            if (off[r + 1] > off[r]) tasks.push_back({static_cast<int>(j), r});
        }
    }
    std::vector<Sink> sinks(static_cast<std::size_t>(std::max(1, threads)));
    detail::parallel_for(tasks.size(), threads, [&](std::size_t t, std::size_t worker) {
        const auto [j, r] = tasks[t];
        const auto& level = lists.by_depth[static_cast<std::size_t>(j)];
        std::vector<std::uint32_t> items(level.leaves.begin() + static_cast<std::ptrdiff_t>(level.offsets[r]),
                                         level.leaves.begin() + static_cast<std::ptrdiff_t>(level.offsets[r + 1]));
        auto eng = rngs.stream(Stage::matching, node_entity(j, r));
        match_link_node(items, eng, colors, wild, sinks[worker]);
    });
    LabelledMultigraph g;
    g.color.assign(colors.begin(), colors.end());
    g.wild.assign(wild.begin(), wild.end());
    g.edges = merge_sinks(sinks, colors, g.tally);
    return g;
}

LabelledMultigraph generate_match_mode(const LatentTree& tree, const ColorAssignment& colors,
                                       const LeafAttributes& attrs, const HeightDistribution& q,
                                       const RngFactory& rngs, int threads) {
    const int D = tree.depth();
    if (q.depth() != D) throw std::invalid_argument("generate_match_mode: height law depth differs from tree depth");
    const auto leaf_colors = colors.leaf_colors();
    check_leaf_vectors(tree.leaf_count(), leaf_colors.size(), attrs.wild.size());

    struct Task {
        int depth;
        std::uint64_t node;
    };
    std::vector<Task> tasks;
    for (int j = 0; j < D; ++j) {
        for (std::uint64_t r = 0; r < tree.level_size(j); ++r) tasks.push_back({j, r});
    }
    const auto workers = static_cast<std::size_t>(std::max(1, threads));
    std::vector<Sink> sinks(workers);
    std::vector<std::vector<std::uint32_t>> buffers(workers);

    detail::parallel_for(tasks.size(), threads, [&](std::size_t t, std::size_t worker) {
        const auto [j, r] = tasks[t];
        const int s = D - j;
        const double qs = q(s);
        auto& items = buffers[worker];
        items.clear();
        for (auto x = tree.first_leaf(j, r); x < tree.first_leaf(j, r + 1); ++x) {
            auto eng = rngs.stream(Stage::heights, half_edge_entity(x, s));
            const auto copies = poisson(eng, qs * attrs.mark[x]);
            items.insert(items.end(), copies, static_cast<std::uint32_t>(x));
        }
        if (items.empty()) return;
        auto eng = rngs.stream(Stage::matching, node_entity(j, r));
        match_link_node(items, eng, leaf_colors, attrs.wild, sinks[worker]);
    });

    LabelledMultigraph g;
    g.color.assign(leaf_colors.begin(), leaf_colors.end());
    g.wild = attrs.wild;
    g.edges = merge_sinks(sinks, leaf_colors, g.tally);
    return g;
}

DepthOneFormulas depth_one_formulas(const DepthOneParams& p) {
    if (p.n < 2) throw std::invalid_argument("depth-one model: n must be at least 2");
    DepthOneFormulas f;
    const double n = p.n;
    f.attempts = p.alpha * n * p.nu / 2.0;
    f.distinct = p.alpha * p.nu * (n - 1.0) / 2.0 * (1.0 - p.eta2 / (n * p.nu * p.nu));
    f.agreement = (1.0 - p.rho) * (1.0 - p.rho) * f.distinct;
    f.conflict = p.rho * (2.0 - p.rho) * p.omega * (2.0 - p.omega) * f.distinct;
    f.loops = f.attempts - f.distinct;
    f.inadmissible = f.distinct - f.agreement - f.conflict;
    return f;
}

DepthOneTally depth_one_generate(const DepthOneParams& p, Philox& eng) {
    if (p.n < 2) throw std::invalid_argument("depth-one model: n must be at least 2");
    if (!(p.alpha > 0.0 && p.alpha <= 1.0)) throw std::invalid_argument("depth-one model: alpha must lie in (0, 1]");
    const auto n = static_cast<std::size_t>(p.n);
    const auto law = lognormal_from_moments(p.nu, p.eta2);
    std::vector<double> mark(n), cdf(n);
    std::vector<std::uint32_t> color(n);
    std::vector<std::uint8_t> wild(n);
    double total = 0.0;
    for (std::size_t x = 0; x < n; ++x) {
        mark[x] = std::exp(law.mu_o + law.sigma_o * standard_normal(eng));
        total += mark[x];
        cdf[x] = total;
        color[x] = bernoulli(eng, p.rho) ? static_cast<std::uint32_t>(x + 1) : 0u;
        wild[x] = bernoulli(eng, p.omega) ? 1 : 0;
    }
    auto draw = [&]() -> std::uint32_t {
        const double u = uniform01(eng) * total;
        const auto it = std::upper_bound(cdf.begin(), cdf.end() - 1, u);
        return static_cast<std::uint32_t>(it - cdf.begin());
    };
    DepthOneTally t;
    t.attempts = binomial_small(eng, static_cast<std::uint64_t>(std::llround(total)), p.alpha / 2.0);
    for (std::uint64_t a = 0; a < t.attempts; ++a) {
        const auto x = draw();
        const auto y = draw();
        const auto outcome = classify_pair(x, y, color, wild);
        if (outcome != PairOutcome::loop) ++t.distinct;
        switch (outcome) {
            case PairOutcome::agreement: ++t.agreement; break;
            case PairOutcome::conflict: ++t.conflict; break;
            case PairOutcome::loop: ++t.loops; break;
            case PairOutcome::inadmissible: ++t.inadmissible; break;
        }
    }
    return t;
}

}  // namespace hag
