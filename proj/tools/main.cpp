#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "cli.hpp"

namespace {

using grafkit::cli::PhantomArgs;
using grafkit::cli::RunConfig;

void add_shared_flags(CLI::App* cmd, RunConfig& config, std::string& stdMode) {
    cmd->add_option("--manifest", config.manifest, "Input manifest (JSON lines)")
        ->required();
    cmd->add_option("--out", config.out_dir, "Output directory")->required();
    cmd->add_option("--xi", config.fit.xi, "Ridge regularization weight");
    cmd->add_option("--lambda1", config.weights.lambda1, "Weight of the backbone term");
    cmd->add_option("--lambda2", config.weights.lambda2, "Weight of the landmark term");
    cmd->add_option("--lambda3", config.weights.lambda3, "Weight of the bony-rim term");
    cmd->add_option("--lambda4", config.weights.lambda4,
                    "Weight of the shape-similarity term");
    cmd->add_option("--success-deg", config.thresholds.success_deg,
                    "Success threshold in degrees");
    cmd->add_option("--poor-deg", config.thresholds.poor_deg,
                    "Poor-estimate threshold in degrees");
    cmd->add_option("--graf-cutoff", config.graf_cutoff_deg,
                    "Alpha cutoff separating type I from type II");
    cmd->add_option("--workers", config.workers, "Worker thread count");
    cmd->add_option("--std-mode", stdMode, "population|sample standard deviation");
    cmd->add_option("--seed", config.seed, "Random seed");
}

grafkit::StdMode parse_std_mode(const std::string& s) {
    if (s == "population") return grafkit::StdMode::population;
    if (s == "sample") return grafkit::StdMode::sample;
    throw CLI::ValidationError("--std-mode must be 'population' or 'sample'");
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Graf hip measurement and evaluation engine"};
    app.require_subcommand(1);

    RunConfig config;
    std::string stdMode = "population";
    CLI::App* measure = app.add_subcommand("measure", "Measure alpha/beta per scene");
    CLI::App* evaluate =
        app.add_subcommand("evaluate", "Score predictions against ground truth");
    CLI::App* losses = app.add_subcommand("losses", "Shape/bony-rim/composite scores");
    add_shared_flags(measure, config, stdMode);
    add_shared_flags(evaluate, config, stdMode);
    add_shared_flags(losses, config, stdMode);

    PhantomArgs phantomArgs;
    CLI::App* phantom =
        app.add_subcommand("phantom", "Generate a synthetic dataset with known angles");
    phantom->add_option("--out", phantomArgs.out_dir, "Output directory")->required();
    phantom->add_option("--count", phantomArgs.count, "Number of scenes");
    phantom->add_option("--alpha-min", phantomArgs.angles.alpha_min, "Alpha range low");
    phantom->add_option("--alpha-max", phantomArgs.angles.alpha_max, "Alpha range high");
    phantom->add_option("--beta-min", phantomArgs.angles.beta_min, "Beta range low");
    phantom->add_option("--beta-max", phantomArgs.angles.beta_max, "Beta range high");
    phantom->add_option("--canvas", phantomArgs.base.canvas_width,
                        "Canvas side length in pixels");
    phantom->add_option("--jitter", phantomArgs.base.noise.edge_jitter_px,
                        "Edge jitter amplitude in pixels");
    phantom->add_option("--dropout", phantomArgs.base.noise.dropout_fraction,
                        "Boundary dropout fraction");
    phantom->add_option("--landmark-jitter", phantomArgs.base.noise.landmark_jitter_px,
                        "Predicted-landmark jitter sigma in pixels");
    phantom->add_flag("--fuse-structures", phantomArgs.base.fuse_ilium_lower_limb,
                      "Merge ilium and lower limb in the prediction masks");
    phantom->add_flag("!--no-gt", phantomArgs.include_ground_truth,
                      "Omit ground truth from the manifest");
    phantom->add_flag("!--no-gt-angles", phantomArgs.include_truth_angles,
                      "Omit true angles from the manifest ground truth");
    phantom->add_option("--seed", phantomArgs.seed, "Random seed");

    CLI11_PARSE(app, argc, argv);

    try {
        config.std_mode = parse_std_mode(stdMode);
        if (measure->parsed()) return grafkit::cli::run_measure(config);
        if (evaluate->parsed()) return grafkit::cli::run_evaluate(config);
        if (losses->parsed()) return grafkit::cli::run_losses(config);
        if (phantom->parsed()) {
            phantomArgs.base.canvas_height = phantomArgs.base.canvas_width;
            phantomArgs.base.seed = phantomArgs.seed;
            return grafkit::cli::run_phantom(phantomArgs);
        }
    } catch (const std::exception& e) {
        std::cerr << "fatal: " << e.what() << "\n";
        return grafkit::cli::kExitFatal;
    }
    return grafkit::cli::kExitFatal;
}
