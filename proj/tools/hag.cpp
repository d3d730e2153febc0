// Command-line front end: fit, generate, diagnose, analytics, depth-one.

#include <iostream>

#include "CLI11.hpp"
#include "hag/commands.hpp"

int main(int argc, char** argv) {
    using namespace hag;
    CLI::App app{"Hidden ancestor graph fitting, generation and diagnostics"};
    app.require_subcommand(1);

    RunConfig cfg;
    std::string mode = "match";
    std::uint64_t sample_alcc = 0;

    auto common = [&](CLI::App* sub) {
        sub->add_option("--seed", cfg.seed, "Master seed")->capture_default_str();
        sub->add_option("--threads", cfg.threads, "Worker threads")->capture_default_str()->check(CLI::Range(1, 1024));
        sub->add_option("-o,--out", cfg.out_dir, "Output directory")->capture_default_str();
    };
    auto param_flags = [&](CLI::App* sub) {
        sub->add_option("--params", cfg.params, "Parameter JSON (as written by fit)");
        sub->add_option("--mu", cfg.overrides.mu, "Override mu");
        sub->add_option("--depth", cfg.overrides.depth, "Override D");
        sub->add_option("--theta", cfg.overrides.theta, "Override theta");
        sub->add_option("--q1", cfg.overrides.q1, "Override q1");
        sub->add_option("--mu-o", cfg.overrides.mu_o, "Override log-normal location");
        sub->add_option("--sigma-o", cfg.overrides.sigma_o, "Override log-normal scale");
        sub->add_option("--omega", cfg.overrides.omega, "Override wildness rate");
        sub->add_option("--beta", cfg.overrides.beta, "Mark/wildness coupling");
    };

    auto* fit = app.add_subcommand("fit", "Fit generator parameters to target statistics");
    fit->add_option("targets", cfg.input, "Targets JSON")->required();
    fit->add_option("--scale", cfg.scale, "Fraction of the target vertex count to build")->check(CLI::Range(0.0, 1.0));
    fit->add_option("--beta", cfg.overrides.beta, "Mark/wildness coupling recorded in the output");
    fit->add_flag("--rescale-labels", cfg.rescale_labels, "Scale K logarithmically with the vertex budget");
    common(fit);

    auto* gen = app.add_subcommand("generate", "Generate a graph");
    param_flags(gen);
    gen->add_option("--mode", mode, "Edge construction")->check(CLI::IsMember({"match", "walk"}))->capture_default_str();
    gen->add_flag("--ceil-marks", cfg.ceil_marks, "Round leaf marks up to integers");
    gen->add_flag("--dump-tree", cfg.dump_tree, "Also write tree.tsv");
    gen->add_option("--node-budget", cfg.node_budget, "Refuse trees with more expected nodes")->capture_default_str();
    common(gen);

    auto* diag = app.add_subcommand("diagnose", "Measure a graph from its edge and vertex files");
    diag->add_option("edges", cfg.edges, "Edge TSV")->required();
    diag->add_option("vertices", cfg.vertices, "Vertex TSV")->required();
    diag->add_option("--targets", cfg.targets, "Targets JSON to compare against");
    diag->add_option("--sample-alcc", sample_alcc, "Estimate ALCC from N sampled vertices");
    diag->add_option("--components", cfg.components, "m for the component-size fit")->capture_default_str();
    diag->add_option("--bands", cfg.bands, "Label-frequency bands to report")->capture_default_str();
    common(diag);

    auto* an = app.add_subcommand("analytics", "Print closed-form expectations for a parameter set");
    param_flags(an);
    common(an);

    auto* d1 = app.add_subcommand("depth-one", "Simulate the depth-one model against its formulas");
    d1->add_option("--n", cfg.depth_one.n, "Leaves")->capture_default_str();
    d1->add_option("--alpha", cfg.depth_one.alpha, "Attempt rate")->capture_default_str();
    d1->add_option("--nu", cfg.depth_one.nu, "Mark mean")->capture_default_str();
    double ratio = 3.6;
    d1->add_option("--eta2-ratio", ratio, "Mark variance over nu^2")->capture_default_str();
    d1->add_option("--rho", cfg.depth_one.rho, "Color switch probability")->capture_default_str();
    d1->add_option("--omega", cfg.depth_one.omega, "Wildness rate")->capture_default_str();
    d1->add_option("--reps", cfg.replications, "Replications")->capture_default_str();
    common(d1);

    CLI11_PARSE(app, argc, argv);

    cfg.mode = mode == "walk" ? GenerationMode::walk : GenerationMode::match;
    if (sample_alcc > 0) cfg.sample_alcc = sample_alcc;
    cfg.depth_one.eta2 = ratio * cfg.depth_one.nu * cfg.depth_one.nu;

    return guarded(std::cerr, [&] {
        if (fit->parsed()) return cmd_fit(cfg, std::cout);
        if (gen->parsed()) return cmd_generate(cfg, std::cout);
        if (diag->parsed()) return cmd_diagnose(cfg, std::cout);
        if (an->parsed()) return cmd_analytics(cfg, std::cout);
        return cmd_depth_one(cfg, std::cout);
    });
}
