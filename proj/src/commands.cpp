#include "hag/commands.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <ostream>

#include "hag/analytics.hpp"
#include "hag/diagnostics.hpp"
#include "hag/io.hpp"
#include "hag/marks.hpp"
#include "json.hpp"

namespace hag {

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

class Stopwatch {
  public:
    double lap_ms() {
        const auto now = std::chrono::steady_clock::now();
        const double ms = std::chrono::duration<double, std::milli>(now - last_).count();
        last_ = now;
        return ms;
    }

  private:
    std::chrono::steady_clock::time_point last_ = std::chrono::steady_clock::now();
};

json read_json(const fs::path& p) {
    auto in = open_input(p);
    try {
        return json::parse(in);
    } catch (const json::parse_error& e) {
        throw ParseError(p.string() + ": " + e.what());
    }
}

void write_json(const fs::path& p, const json& j) {
    auto out = open_output(p);
    out << j.dump(2) << '\n';
    if (!out) throw IoError("write failed for '" + p.string() + "'");
}

double number_field(const json& j, const char* key, const fs::path& source) {
    if (!j.contains(key)) throw ParseError(source.string() + ": missing key '" + key + "'");
    if (!j[key].is_number()) throw ParseError(source.string() + ": key '" + key + "' must be a number");
    return j[key].get<double>();
}

json params_json(const HagParams& p) {
    return {{"mu", p.mu},       {"depth", p.depth},     {"theta", p.theta}, {"q1", p.q1},
            {"mu_o", p.mu_o},   {"sigma_o", p.sigma_o}, {"omega", p.omega}, {"beta", p.beta}};
}

json tally_json(const GenerationTally& t) {
    json j = {{"attempts", t.attempts},         {"half_edges", t.half_edges}, {"agreement", t.agreement},
              {"conflict", t.conflict},         {"loops", t.loops},           {"inadmissible", t.inadmissible},
              {"unmatched", t.unmatched}};
    if (!t.first_decoupling.empty()) j["first_decoupling"] = t.first_decoupling;
    return j;
}

HagParams apply_overrides(HagParams p, const ParamOverrides& o) {
    if (o.mu) p.mu = *o.mu;
    if (o.depth) p.depth = *o.depth;
    if (o.theta) p.theta = *o.theta;
    if (o.q1) p.q1 = *o.q1;
    if (o.mu_o) p.mu_o = *o.mu_o;
    if (o.sigma_o) p.sigma_o = *o.sigma_o;
    if (o.omega) p.omega = *o.omega;
    if (o.beta) p.beta = *o.beta;
    return p;
}

HagParams resolve_params(const RunConfig& cfg) {
    HagParams p;
    if (!cfg.params.empty()) p = read_params(cfg.params);
    p = apply_overrides(p, cfg.overrides);
    if (!(p.mu > 1.0)) throw std::invalid_argument("params: mu must exceed 1");
    if (p.depth < 1) throw std::invalid_argument("params: depth must be at least 1");
    if (!(p.sigma_o >= 0.0)) throw std::invalid_argument("params: sigma_o must be non-negative");
    return p;
}

std::string fixed(double x, int prec) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*f", prec, x);
    return buf;
}

std::string pad(const std::string& s, std::size_t w) { return s.size() >= w ? s : std::string(w - s.size(), ' ') + s; }

}  // namespace

HagParams read_params(const fs::path& path) {
    const json j = read_json(path);
    if (!j.is_object()) throw ParseError(path.string() + ": expected a JSON object");
    HagParams p;
    p.mu = number_field(j, "mu", path);
    const double depth = number_field(j, "depth", path);
    if (depth != std::floor(depth)) throw ParseError(path.string() + ": depth must be an integer");
    p.depth = static_cast<int>(depth);
    p.theta = number_field(j, "theta", path);
    p.q1 = number_field(j, "q1", path);
    p.mu_o = number_field(j, "mu_o", path);
    p.sigma_o = number_field(j, "sigma_o", path);
    p.omega = number_field(j, "omega", path);
    p.beta = j.contains("beta") ? number_field(j, "beta", path) : 0.0;
    return p;
}

TargetsFile read_targets(const fs::path& path) {
    const json j = read_json(path);
    if (!j.is_object()) throw ParseError(path.string() + ": expected a JSON object");
    TargetsFile t;
    t.stats.vertices = number_field(j, "vertices", path);
    t.stats.labels = number_field(j, "labels", path);
    t.stats.d_A = number_field(j, "mean_agreement_degree", path);
    t.stats.d_C = number_field(j, "mean_conflict_degree", path);
    t.stats.kappa = number_field(j, "alcc", path);
    if (j.contains("degree_variance")) {
        t.stats.eta2 = number_field(j, "degree_variance", path);
    } else if (j.contains("degree_file") && j["degree_file"].is_string()) {
        fs::path deg = j["degree_file"].get<std::string>();
        if (deg.is_relative()) deg = path.parent_path() / deg;
        auto in = open_input(deg);
        auto degrees = read_degrees(in, deg.string());
        for (auto& d : degrees) d = std::log(d);
        t.stats.eta2 = constrained_mle(degrees).eta2;
    } else {
        throw ParseError(path.string() + ": need 'degree_variance' or 'degree_file'");
    }
    if (j.contains("scale")) t.options.scale = number_field(j, "scale", path);
    if (j.contains("beta")) t.options.beta = number_field(j, "beta", path);
    if (j.contains("rescale_labels")) {
        if (!j["rescale_labels"].is_boolean()) throw ParseError(path.string() + ": 'rescale_labels' must be boolean");
        t.options.rescale_labels = j["rescale_labels"].get<bool>();
    }
    return t;
}

GenerationResult generate_graph(const HagParams& p, const GenerateOptions& opts, LatentTree* tree_out,
                                ColorAssignment* colors_out) {
    const RngFactory rngs(opts.seed);
    GenerationResult r;
    Stopwatch sw;
    LatentTree tree = sample_tree(p.mu, p.depth, rngs, TreeOptions{opts.node_budget});
    r.timings.tree_ms = sw.lap_ms();
    const auto rates = color_switch_rates(p.mu, p.depth, p.theta);
    ColorAssignment colors = assign_colors(tree, rates, rngs);
    r.timings.colors_ms = sw.lap_ms();
    r.attrs = sample_leaf_attributes(tree.leaf_count(), {p.mu_o, p.sigma_o}, {p.omega, p.beta, opts.ceil_marks}, rngs);
    r.timings.marks_ms = sw.lap_ms();
    const auto q = HeightDistribution::canonical(p.depth == 1 ? 1.0 : p.q1, p.depth);
    if (opts.mode == GenerationMode::match) {
        r.graph = generate_match_mode(tree, colors, r.attrs, q, rngs, opts.threads);
    } else {
        const auto marks = aggregate_marks(tree, r.attrs.mark);
        r.graph = generate_walk_mode(tree, colors, marks, r.attrs, q, rngs, opts.threads);
    }
    r.timings.edges_ms = sw.lap_ms();
    r.tree_nodes = tree.node_count();
    r.tree_labels = colors.count;
    if (tree_out) *tree_out = std::move(tree);
    if (colors_out) *colors_out = std::move(colors);
    return r;
}

int cmd_fit(const RunConfig& cfg, std::ostream& out) {
    if (cfg.input.empty()) throw std::invalid_argument("fit: a targets file is required");
    auto t = read_targets(cfg.input);
    if (cfg.scale) t.options.scale = *cfg.scale;
    if (cfg.overrides.beta) t.options.beta = *cfg.overrides.beta;
    t.options.rescale_labels = t.options.rescale_labels || cfg.rescale_labels;
    const auto fit = fit_pipeline(t.stats, t.options);

    json j = params_json(fit.params);
    j["derived"] = {{"nu", fit.nu},
                    {"eta2", fit.eta2},
                    {"d_A_prime", fit.d_A_prime},
                    {"pi1_prime", fit.pi1_prime},
                    {"pi1_prime_target", fit.pi1_prime_target},
                    {"labels_used", fit.labels_used},
                    {"depth_increments", fit.depth_increments},
                    {"scale", t.options.scale}};
    write_json(cfg.out_dir / "params.json", j);
    auto csv = open_output(cfg.out_dir / "fitcurve.csv");
    csv << "q1,nu,pi1_prime\n";
    char buf[128];
    for (const auto& pt : fit.curve) {
        std::snprintf(buf, sizeof buf, "%.6f,%.10g,%.10g\n", pt.q1, pt.nu, pt.pi1_prime);
        csv << buf;
    }
    const auto& p = fit.params;
    out << "mu " << fixed(p.mu, 4) << "  D " << p.depth << "  theta " << fixed(p.theta, 4) << "  q1 "
        << fixed(p.q1, 4) << "  mu_o " << fixed(p.mu_o, 4) << "  sigma_o " << fixed(p.sigma_o, 4) << "  omega "
        << fixed(p.omega, 5) << '\n'
        << "nu " << fixed(fit.nu, 4) << "  d_A' " << fixed(fit.d_A_prime, 4) << "  pi1' " << fixed(fit.pi1_prime, 4)
        << " (target " << fixed(fit.pi1_prime_target, 4) << ")\n";
    return 0;
}

int cmd_generate(const RunConfig& cfg, std::ostream& out) {
    const HagParams p = resolve_params(cfg);
    GenerateOptions go{cfg.seed, cfg.threads, cfg.mode, cfg.ceil_marks, cfg.node_budget};
    LatentTree tree;
    ColorAssignment colors;
    auto r = generate_graph(p, go, cfg.dump_tree ? &tree : nullptr, cfg.dump_tree ? &colors : nullptr);

    Stopwatch sw;
    {
        auto edges = open_output(cfg.out_dir / "edges.tsv");
        write_edges_tsv(edges, r.graph.edges);
        auto vertices = open_output(cfg.out_dir / "vertices.tsv");
        write_leaf_tsv(vertices, r.attrs, r.graph.color);
        if (!vertices) throw IoError("write failed for vertices.tsv");
        if (cfg.dump_tree) {
            auto t = open_output(cfg.out_dir / "tree.tsv");
            write_tree_tsv(t, tree, colors);
        }
    }
    const double write_ms = sw.lap_ms();

    std::uint64_t agree = 0, conflict = 0;
    for (const auto& e : r.graph.edges) (e.kind == EdgeKind::agreement ? agree : conflict) += 1;
    const json report = {
        {"rng", {{"name", std::string(kRngName)}, {"version", kRngVersion}}},
        {"seed", cfg.seed},
        {"threads", cfg.threads},
        {"mode", cfg.mode == GenerationMode::match ? "match" : "walk"},
        {"params", params_json(p)},
        {"tree", {{"nodes", r.tree_nodes}, {"leaves", r.graph.vertex_count()}, {"labels", r.tree_labels}}},
        {"edges", {{"agreement", agree}, {"conflict", conflict}}},
        {"tally", tally_json(r.graph.tally)},
        {"timings_ms",
         {{"tree", r.timings.tree_ms},
          {"colors", r.timings.colors_ms},
          {"marks", r.timings.marks_ms},
          {"edges", r.timings.edges_ms},
          {"write", write_ms}}}};
    write_json(cfg.out_dir / "report.json", report);
    out << "leaves " << r.graph.vertex_count() << "  distinct edges " << r.graph.edges.size() << " (A " << agree
        << ", C " << conflict << ")  loops " << r.graph.tally.loops << "  inadmissible "
        << r.graph.tally.inadmissible << "  unmatched " << r.graph.tally.unmatched << '\n';
    return 0;
}

int cmd_diagnose(const RunConfig& cfg, std::ostream& out) {
    if (cfg.edges.empty() || cfg.vertices.empty()) {
        throw std::invalid_argument("diagnose: both an edge file and a vertex file are required");
    }
    const auto g = load_graph(cfg.edges, cfg.vertices);
    const auto s = measure_graph_stats(g, {cfg.sample_alcc, cfg.seed, cfg.threads});

    json j = {{"vertices", s.vertices},
              {"agreement_edges", s.agreement_edges},
              {"conflict_edges", s.conflict_edges},
              {"agreement_vertices", s.agreement_vertices},
              {"mean_agreement_degree", s.d_A},
              {"mean_conflict_degree", s.d_C},
              {"alcc", s.alcc},
              {"alcc_mode", s.alcc_sampled ? "sampled" : "exact"},
              {"labels", s.labels ? json(*s.labels) : json(nullptr)},
              {"degree_mean", s.degree_mean},
              {"degree_variance_sample", s.degree_variance},
              {"degree_variance_simplistic", s.eta2_simplistic},
              {"degree_variance_low_bias", s.eta2_low_bias}};

    if (!g.color.empty()) {
        const auto freq = label_frequencies(g);
        auto csv = open_output(cfg.out_dir / "label_freq.csv");
        csv << "rank,count,log_count\n";
        for (std::size_t i = 0; i < freq.size(); ++i) {
            csv << i + 1 << ',' << freq[i] << ',' << fixed(std::log(static_cast<double>(freq[i])), 6) << '\n';
        }
        const auto bands = label_bands(freq, cfg.bands);
        j["label_bands"] = {{"bands", cfg.bands},
                            {"medians", bands.medians},
                            {"spreads", bands.spreads},
                            {"separated", bands.separated}};
    }

    const auto [agreement, conflict] = split_graphs(g);
    const auto sizes = component_sizes(SimpleGraph(agreement.vertex_count(), agreement.edges));
    {
        auto csv = open_output(cfg.out_dir / "component_sizes.csv");
        csv << "rank,size\n";
        for (std::size_t i = 0; i < sizes.size(); ++i) csv << i + 1 << ',' << sizes[i] << '\n';
    }
    j["components"] = {{"count", sizes.size()}, {"m", cfg.components}};
    if (cfg.components >= 1 && static_cast<std::size_t>(cfg.components) < sizes.size()) {
        const auto fit = component_size_fit(agreement, cfg.components);
        j["components"]["top_m_fraction"] = fit.p;
        j["components"]["dirichlet_delta"] = fit.delta;
    }

    out << "vertices " << s.vertices << "  d_A " << fixed(s.d_A, 3) << "  d_C " << fixed(s.d_C, 3) << "  ALCC "
        << fixed(s.alcc, 4) << "  K " << (s.labels ? std::to_string(*s.labels) : std::string("n/a"))
        << "  eta2 " << fixed(s.eta2_low_bias, 1) << '\n';

    if (!cfg.targets.empty()) {
        const auto t = read_targets(cfg.targets).stats;
        json cmp = json::array();
        bool all_pass = true;
        auto add = [&](const char* name, double target, double measured, bool pass) {
            const double dev = target != 0.0 ? (measured - target) / target : measured - target;
            cmp.push_back({{"statistic", name}, {"target", target}, {"measured", measured}, {"deviation", dev},
                           {"pass", pass}});
            all_pass = all_pass && pass;
            out << pad(name, 8) << "  target " << pad(fixed(target, 4), 12) << "  measured "
                << pad(fixed(measured, 4), 12) << "  deviation " << pad(fixed(100.0 * dev, 1), 6) << "%  "
                << (pass ? "PASS" : "FAIL") << '\n';
        };
        add("d_A", t.d_A, s.d_A, std::fabs(s.d_A - t.d_A) <= 0.15 * t.d_A);
        add("d_C", t.d_C, s.d_C, std::fabs(s.d_C - t.d_C) <= 0.15);
        add("alcc", t.kappa, s.alcc, std::fabs(s.alcc - t.kappa) <= 0.05);
        if (s.labels) {
            const double k = static_cast<double>(*s.labels);
            add("labels", t.labels, k, std::fabs(k - t.labels) <= 0.10 * t.labels);
        }
        add("eta2", t.eta2, s.eta2_low_bias, s.eta2_low_bias < t.eta2);
        j["comparison"] = {{"rows", cmp}, {"pass", all_pass}};
        out << (all_pass ? "PASS" : "FAIL") << " overall\n";
    }
    write_json(cfg.out_dir / "stats.json", j);
    return 0;
}

int cmd_analytics(const RunConfig& cfg, std::ostream& out) {
    const HagParams p = resolve_params(cfg);
    const auto m = lognormal_moments({p.mu_o, p.sigma_o});
    const auto q = HeightDistribution::canonical(p.depth == 1 ? 1.0 : p.q1, p.depth);
    const auto a = analytic_profile({p.mu, p.depth, p.theta, m.mean, m.variance, p.omega, -1.0}, q);

    json h = json::array();
    for (int s = 0; s <= p.depth; ++s) {
        json row = json::array();
        for (int t = 0; t <= s; ++t) row.push_back(a.h(s, t));
        h.push_back(row);
    }
    const json j = {{"params", params_json(p)},
                    {"nu", m.mean},
                    {"eta2", m.variance},
                    {"h", h},
                    {"gamma", a.decoupling.gamma},
                    {"negative_gamma_heights", a.decoupling.negative},
                    {"rho", a.rates},
                    {"A", a.coeffs.A},
                    {"C", a.coeffs.C},
                    {"M_A", a.counts.agreement},
                    {"M_C", a.counts.conflict},
                    {"M_L", a.counts.loops},
                    {"M_inadmissible", a.counts.inadmissible},
                    {"d_A_prime", a.degrees.d_A_prime},
                    {"d_C_prime", a.degrees.d_C_prime},
                    {"pi1_prime", a.degrees.pi1_prime},
                    {"d_S", a.degrees.d_S},
                    {"d_A", a.degrees.d_A},
                    {"pi1", a.degrees.pi1},
                    {"kappa", a.degrees.kappa},
                    {"expected_labels", expected_label_count(p.mu, p.depth, p.theta)}};
    write_json(cfg.out_dir / "analytics.json", j);

    out << "h(s, t)\n" << pad("s\\t", 4);
    for (int t = 0; t <= p.depth; ++t) out << pad(std::to_string(t), 14);
    out << '\n';
    for (int s = 0; s <= p.depth; ++s) {
        out << pad(std::to_string(s), 4);
        for (int t = 0; t <= s; ++t) out << pad(fixed(a.h(s, t), 8), 14);
        out << '\n';
    }
    out << '\n' << pad("t", 4) << pad("Gamma_t", 14) << pad("A_t", 14) << pad("C_t", 14) << '\n';
    for (int t = 0; t < p.depth; ++t) {
        const auto i = static_cast<std::size_t>(t);
        out << pad(std::to_string(t), 4) << pad(fixed(a.decoupling.gamma[i], 8), 14)
            << pad(fixed(a.coeffs.A[i], 8), 14) << pad(fixed(a.coeffs.C[i], 8), 14) << '\n';
    }
    out << '\n';
    const std::pair<const char*, double> scalars[] = {
        {"M_A", a.counts.agreement}, {"M_C", a.counts.conflict},   {"M_L", a.counts.loops},
        {"d_A'", a.degrees.d_A_prime}, {"d_C'", a.degrees.d_C_prime}, {"pi1'", a.degrees.pi1_prime},
        {"d_S", a.degrees.d_S},      {"d_A", a.degrees.d_A},        {"pi1", a.degrees.pi1},
        {"kappa", a.degrees.kappa}};
    for (const auto& [name, v] : scalars) out << pad(name, 8) << pad(fixed(v, 6), 20) << '\n';
    if (!a.decoupling.negative.empty()) out << "warning: negative Gamma_t outside the fitted regime\n";
    return 0;
}

int cmd_depth_one(const RunConfig& cfg, std::ostream& out) {
    if (cfg.replications < 1) throw std::invalid_argument("depth-one: replications must be positive");
    const auto& p = cfg.depth_one;
    const auto f = depth_one_formulas(p);
    const RngFactory rngs(cfg.seed);
    double sum[4] = {}, sq[4] = {};
    for (int r = 0; r < cfg.replications; ++r) {
        auto eng = rngs.stream(Stage::depth_one, static_cast<std::uint64_t>(r));
        const auto t = depth_one_generate(p, eng);
        const double v[4] = {static_cast<double>(t.distinct), static_cast<double>(t.agreement),
                             static_cast<double>(t.conflict), static_cast<double>(t.loops)};
        for (int k = 0; k < 4; ++k) {
            sum[k] += v[k];
            sq[k] += v[k] * v[k];
        }
    }
    const double n = cfg.replications;
    const char* names[4] = {"M_E", "M_A", "M_C", "loops"};
    const double formula[4] = {f.distinct, f.agreement, f.conflict, f.loops};
    out << pad("", 6) << pad("simulated", 12) << pad("std.err", 10) << pad("formula", 12) << pad("rel.diff", 10)
        << '\n';
    for (int k = 0; k < 4; ++k) {
        const double mean = sum[k] / n;
        const double se = std::sqrt(std::max(0.0, sq[k] / n - mean * mean) / n);
        out << pad(names[k], 6) << pad(fixed(mean, 3), 12) << pad(fixed(se, 3), 10) << pad(fixed(formula[k], 3), 12)
            << pad(fixed(100.0 * (mean - formula[k]) / formula[k], 2) + "%", 10) << '\n';
    }
    return 0;
}

}  // namespace hag
