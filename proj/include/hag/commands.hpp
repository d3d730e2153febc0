#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>

#include "hag/edge_gen.hpp"
#include "hag/fitting.hpp"
#include "hag/latent_tree.hpp"
#include "hag/params.hpp"

namespace hag {

enum class GenerationMode { match, walk };

/// Parameter fields that a flag may override after the params file is read.
struct ParamOverrides {
    std::optional<double> mu, theta, q1, mu_o, sigma_o, omega, beta;
    std::optional<int> depth;
};

struct RunConfig {
    std::filesystem::path input;     // fit: targets JSON
    std::filesystem::path params;    // generate, analytics: params JSON
    std::filesystem::path edges;     // diagnose
    std::filesystem::path vertices;  // diagnose
    std::filesystem::path targets;   // diagnose: optional comparison targets
    std::filesystem::path out_dir = ".";

    std::uint64_t seed = 1;
    int threads = 1;
    GenerationMode mode = GenerationMode::match;
    std::optional<double> scale;
    bool ceil_marks = false;
    bool rescale_labels = false;
    bool dump_tree = false;
    std::optional<std::uint64_t> sample_alcc;
    double node_budget = 1.0e9;
    int components = 10;  // m for the Dirichlet component fit
    int bands = 3;        // label-frequency bands to report
    ParamOverrides overrides;

    DepthOneParams depth_one{25, 0.8, 14.0, 3.6 * 14.0 * 14.0, 0.1, 0.08};
    int replications = 10000;
};

struct StageTimings {
    double tree_ms = 0.0;
    double colors_ms = 0.0;
    double marks_ms = 0.0;
    double edges_ms = 0.0;
};

struct GenerationResult {
    LabelledMultigraph graph;
    LeafAttributes attrs;
    std::uint64_t tree_nodes = 0;
    std::uint64_t tree_labels = 0;  // colors over all tree nodes
    StageTimings timings;
};

struct GenerateOptions {
    std::uint64_t seed = 1;
    int threads = 1;
    GenerationMode mode = GenerationMode::match;
    bool ceil_marks = false;
    double node_budget = 1.0e9;
};

/// latent tree -> colors -> marks -> edges, all from one master seed.
GenerationResult generate_graph(const HagParams& p, const GenerateOptions& opts, LatentTree* tree_out = nullptr,
                                ColorAssignment* colors_out = nullptr);

/// Reads the eight generator fields; extra keys are ignored.
HagParams read_params(const std::filesystem::path& p);

struct TargetsFile {
    TargetStats stats;
    FitOptions options;
};
TargetsFile read_targets(const std::filesystem::path& p);

int cmd_fit(const RunConfig& cfg, std::ostream& out);
int cmd_generate(const RunConfig& cfg, std::ostream& out);
int cmd_diagnose(const RunConfig& cfg, std::ostream& out);
int cmd_analytics(const RunConfig& cfg, std::ostream& out);
int cmd_depth_one(const RunConfig& cfg, std::ostream& out);

/// Runs a subcommand body and maps failures to exit codes:
/// 0 success, 1 infeasible target or parameters, 2 I/O, parse or usage errors.
template <class Fn>
int guarded(std::ostream& err, Fn&& fn);

}  // namespace hag

#include <exception>
#include <ostream>

#include "hag/io.hpp"

template <class Fn>
int hag::guarded(std::ostream& err, Fn&& fn) {
    try {
        return fn();
    } catch (const InfeasibleError& e) {
        err << "error: " << e.what() << '\n';
        return 1;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return 2;
    }
}
