#include "hag/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <unordered_map>

#include "hag/fitting.hpp"
#include "parallel.hpp"

namespace hag {

namespace {

class UnionFind {
  public:
    explicit UnionFind(std::size_t n) : parent_(n), size_(n, 1) { std::iota(parent_.begin(), parent_.end(), 0u); }

    std::uint32_t find(std::uint32_t x) {
        while (parent_[x] != x) {
            parent_[x] = parent_[parent_[x]];
            x = parent_[x];
        }
        return x;
    }
    void unite(std::uint32_t a, std::uint32_t b) {
        a = find(a);
        b = find(b);
        if (a == b) return;
        if (size_[a] < size_[b]) std::swap(a, b);
        parent_[b] = a;
        size_[a] += size_[b];
    }
    std::uint64_t size(std::uint32_t root) const { return size_[root]; }

  private:
    std::vector<std::uint32_t> parent_;
    std::vector<std::uint64_t> size_;
};

std::size_t intersection_size(std::span<const std::uint32_t> a, std::span<const std::uint32_t> b) {
    std::size_t n = 0;
    auto i = a.begin();
    auto j = b.begin();
    while (i != a.end() && j != b.end()) {
        if (*i < *j) ++i;
        else if (*j < *i) ++j;
        else {
            ++n;
            ++i;
            ++j;
        }
    }
    return n;
}

}  // namespace

SimpleGraph::SimpleGraph(std::size_t n, std::span<const WeightedEdge> edges) {
    offsets_.assign(n + 1, 0);
    for (const auto& e : edges) {
        if (e.u >= n || e.v >= n) throw std::out_of_range("SimpleGraph: edge endpoint out of range");
        if (e.u == e.v) continue;
        ++offsets_[e.u + 1];
        ++offsets_[e.v + 1];
    }
    std::partial_sum(offsets_.begin(), offsets_.end(), offsets_.begin());
    adj_.resize(offsets_[n]);
    std::vector<std::uint64_t> fill(offsets_.begin(), offsets_.end() - 1);
    for (const auto& e : edges) {
        if (e.u == e.v) continue;
        adj_[fill[e.u]++] = e.v;
        adj_[fill[e.v]++] = e.u;
    }
    // Sort and drop duplicate neighbors, compacting in place.
    std::uint64_t out = 0;
    std::uint64_t begin = 0;
    for (std::size_t v = 0; v < n; ++v) {
        const std::uint64_t end = offsets_[v + 1];
        std::sort(adj_.begin() + static_cast<std::ptrdiff_t>(begin), adj_.begin() + static_cast<std::ptrdiff_t>(end));
        const std::uint64_t start = out;
        for (std::uint64_t i = begin; i < end; ++i) {
            if (i == begin || adj_[i] != adj_[i - 1]) adj_[out++] = adj_[i];
        }
        begin = end;
        offsets_[v] = start;
    }
    offsets_[n] = out;
    adj_.resize(out);
    adj_.shrink_to_fit();
}

bool SimpleGraph::adjacent(std::uint32_t u, std::uint32_t v) const {
    const auto nu = neighbors(u);
    return std::binary_search(nu.begin(), nu.end(), v);
}

std::vector<double> local_clustering(const SimpleGraph& g, int threads) {
    const std::size_t n = g.vertex_count();
    std::vector<double> cc(n, 0.0);
    constexpr std::size_t kChunk = 4096;
    detail::parallel_for((n + kChunk - 1) / kChunk, threads, [&](std::size_t c, std::size_t) {
        const std::size_t hi = std::min(n, (c + 1) * kChunk);
        for (std::size_t v = c * kChunk; v < hi; ++v) {
            const auto nv = g.neighbors(v);
            const std::size_t k = nv.size();
            if (k < 2) continue;
            std::size_t twice_links = 0;
            for (auto u : nv) twice_links += intersection_size(nv, g.neighbors(u));
            cc[v] = static_cast<double>(twice_links) / (static_cast<double>(k) * static_cast<double>(k - 1));
        }
    });
    return cc;
}

GraphStats measure_graph_stats(const LabelledMultigraph& g, const GraphStatsOptions& opts) {
    const std::size_t n = g.vertex_count();
    const bool has_color = !g.color.empty();
    if (has_color && g.color.size() != n) throw std::invalid_argument("measure_graph_stats: color vector size mismatch");
    std::vector<WeightedEdge> agree_edges;
    for (const auto& e : g.edges) {
        if (e.kind == EdgeKind::agreement) agree_edges.push_back(e);
    }
    const SimpleGraph all(n, g.edges);
    const SimpleGraph agree(n, agree_edges);
    std::vector<WeightedEdge>().swap(agree_edges);

    GraphStats s;
    s.agreement_edges = agree.edge_count();
    s.conflict_edges = all.edge_count() - agree.edge_count();
    std::vector<double> log_degrees;
    std::vector<std::uint32_t> colors;
    long double deg_sum = 0.0L;
    for (std::size_t v = 0; v < n; ++v) {
        const auto d = all.degree(v);
        if (d == 0) continue;
        ++s.vertices;
        deg_sum += d;
        log_degrees.push_back(std::log(static_cast<double>(d)));
        if (has_color) colors.push_back(g.color[v]);
    }
    if (s.vertices == 0) throw std::invalid_argument("measure_graph_stats: graph has no edges");
    const double nv = static_cast<double>(s.vertices);
    s.d_A = 2.0 * static_cast<double>(s.agreement_edges) / nv;
    s.d_C = 2.0 * static_cast<double>(s.conflict_edges) / nv;
    s.degree_mean = static_cast<double>(deg_sum / nv);
    long double ss = 0.0L;
    for (std::size_t v = 0; v < n; ++v) {
        const auto d = all.degree(v);
        if (d > 0) ss += (d - s.degree_mean) * (d - s.degree_mean);
    }
    s.degree_variance = s.vertices > 1 ? static_cast<double>(ss / (nv - 1.0)) : 0.0;
    const auto mle = constrained_mle(log_degrees);
    s.eta2_low_bias = mle.eta2;
    s.eta2_simplistic = mle.eta2_simplistic;
    std::sort(colors.begin(), colors.end());
    if (has_color) s.labels = static_cast<std::uint64_t>(std::unique(colors.begin(), colors.end()) - colors.begin());

    std::vector<std::uint32_t> agree_vertices;
    for (std::size_t v = 0; v < n; ++v) {
        if (agree.degree(v) > 0) agree_vertices.push_back(static_cast<std::uint32_t>(v));
    }
    s.agreement_vertices = agree_vertices.size();
    if (agree_vertices.empty()) return s;

    if (opts.alcc_samples) {
        s.alcc_sampled = true;
        auto eng = RngFactory(opts.seed).stream(Stage::diagnostics, 0);
        std::uint64_t hits = 0;
        for (std::uint64_t i = 0; i < *opts.alcc_samples; ++i) {
            const auto v = agree_vertices[uniform_index(eng, agree_vertices.size())];
            const auto nb = agree.neighbors(v);
            if (nb.size() < 2) continue;
            const auto a = uniform_index(eng, nb.size());
            auto b = uniform_index(eng, nb.size() - 1);
            if (b >= a) ++b;
            hits += agree.adjacent(nb[a], nb[b]) ? 1 : 0;
        }
        s.alcc = *opts.alcc_samples ? static_cast<double>(hits) / static_cast<double>(*opts.alcc_samples) : 0.0;
    } else {
        const auto cc = local_clustering(agree, opts.threads);
        long double total = 0.0L;
        for (auto v : agree_vertices) total += cc[v];
        s.alcc = static_cast<double>(total / static_cast<long double>(agree_vertices.size()));
    }
    return s;
}

std::vector<std::uint64_t> label_frequencies(const LabelledMultigraph& g) {
    if (g.color.size() != g.vertex_count() || g.color.empty()) {
        throw std::invalid_argument("label_frequencies: graph has no vertex colors");
    }
    const SimpleGraph all(g.vertex_count(), g.edges);
    std::unordered_map<std::uint32_t, std::uint64_t> counts;
    for (std::size_t v = 0; v < g.vertex_count(); ++v) {
        if (all.degree(v) > 0) ++counts[g.color[v]];
    }
    std::vector<std::uint64_t> out;
    out.reserve(counts.size());
    for (const auto& [color, c] : counts) out.push_back(c);
    std::sort(out.begin(), out.end(), std::greater<>());
    return out;
}

BandReport label_bands(std::span<const std::uint64_t> frequencies, int bands) {
    BandReport r;
    if (bands < 1 || frequencies.size() < static_cast<std::size_t>(bands)) return r;
    std::vector<double> x;
    for (auto f : frequencies) x.push_back(std::log(static_cast<double>(f)));
    std::sort(x.begin(), x.end());
    std::vector<std::size_t> order(x.size() - 1);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return x[a + 1] - x[a] > x[b + 1] - x[b];
    });
    std::vector<std::size_t> cuts(order.begin(), order.begin() + (bands - 1));
    std::sort(cuts.begin(), cuts.end());
    std::size_t lo = 0;
    for (std::size_t k = 0; k <= cuts.size(); ++k) {
        const std::size_t hi = k < cuts.size() ? cuts[k] + 1 : x.size();
        const std::size_t len = hi - lo;
        const double med = len % 2 ? x[lo + len / 2] : 0.5 * (x[lo + len / 2 - 1] + x[lo + len / 2]);
        r.medians.push_back(med);
        r.spreads.push_back(x[hi - 1] - x[lo]);
        lo = hi;
    }
    r.separated = true;
    for (std::size_t k = 0; k + 1 < r.medians.size(); ++k) {
        const double gap = r.medians[k + 1] - r.medians[k];
        if (!(gap > r.spreads[k] && gap > r.spreads[k + 1])) r.separated = false;
    }
    return r;
}

std::vector<std::uint64_t> component_sizes(const SimpleGraph& g) {
    const std::size_t n = g.vertex_count();
    UnionFind uf(n);
    for (std::size_t v = 0; v < n; ++v) {
        for (auto u : g.neighbors(v)) {
            if (u > v) uf.unite(static_cast<std::uint32_t>(v), u);
        }
    }
    std::vector<std::uint64_t> sizes;
    for (std::size_t v = 0; v < n; ++v) {
        const auto x = static_cast<std::uint32_t>(v);
        if (g.degree(v) > 0 && uf.find(x) == x) sizes.push_back(uf.size(x));
    }
    std::sort(sizes.begin(), sizes.end(), std::greater<>());
    return sizes;
}

double dirichlet_delta(double p, int m) {
    if (m < 1) throw std::invalid_argument("dirichlet_delta: m must be at least 1");
    if (!(p > 0.0 && p < 1.0)) throw std::invalid_argument("dirichlet_delta: p must lie in (0, 1)");
    return 1.0 / std::expm1(-std::log1p(-p) / m);
}

ComponentFit component_size_fit(const LabelledMultigraph& agreement_graph, int m) {
    if (m < 1) throw std::invalid_argument("component_size_fit: m must be at least 1");
    ComponentFit fit;
    fit.sizes = component_sizes(SimpleGraph(agreement_graph.vertex_count(), agreement_graph.edges));
    if (static_cast<std::size_t>(m) >= fit.sizes.size()) {
        throw std::invalid_argument("component_size_fit: m must be smaller than the component count");
    }
    const auto total = std::accumulate(fit.sizes.begin(), fit.sizes.end(), std::uint64_t{0});
    const auto top = std::accumulate(fit.sizes.begin(), fit.sizes.begin() + m, std::uint64_t{0});
    fit.p = static_cast<double>(top) / static_cast<double>(total);
    fit.delta = dirichlet_delta(fit.p, m);
    return fit;
}

std::vector<double> stick_breaking_sample(double delta, int m, Philox& eng) {
    if (!(delta > 0.0)) throw std::invalid_argument("stick_breaking_sample: delta must be positive");
    if (m < 1) throw std::invalid_argument("stick_breaking_sample: m must be at least 1");
    std::vector<double> x(static_cast<std::size_t>(m));
    double remaining = 1.0;
    for (auto& xi : x) {
        const double y = -std::expm1(std::log(uniform01(eng)) / delta);
        xi = y * remaining;
        remaining *= 1.0 - y;
    }
    std::sort(x.begin(), x.end(), std::greater<>());
    return x;
}

}  // namespace hag
