#pragma once

#include <cstdint>
#include <filesystem>
#include <string>

#include <grafkit/curvefit.hpp>
#include <grafkit/measure.hpp>
#include <grafkit/metrics.hpp>
#include <grafkit/phantom.hpp>

namespace grafkit::cli {

/// Shared batch-run configuration. Outputs are byte-identical for any worker
/// count: scenes are processed in parallel but emitted in input order.
struct RunConfig {
    std::filesystem::path manifest;
    std::filesystem::path out_dir;
    FitConfig fit;
    LossWeights weights;
    SummaryThresholds thresholds;
    double graf_cutoff_deg = 60.0;
    int workers = 1;
    StdMode std_mode = StdMode::population;
    std::uint64_t seed = 0;
};

struct PhantomArgs {
    std::filesystem::path out_dir;
    int count = 10;
    AngleRange angles;
    PhantomSpec base;
    std::uint64_t seed = 0;
    bool include_ground_truth = true;
    bool include_truth_angles = true;
};

inline constexpr int kExitOk = 0;
inline constexpr int kExitSceneFailures = 1;
inline constexpr int kExitFatal = 2;

/// Measures every manifest scene into <out>/measurements.csv.
/// Returns kExitSceneFailures when any scene errored; fatal errors throw.
int run_measure(const RunConfig& config);

/// Evaluates predictions against ground truth: writes <out>/records.csv,
/// <out>/summary.txt, <out>/cdf_alpha.csv and <out>/cdf_beta.csv, plus the
/// summary returned for in-process callers.
int run_evaluate(const RunConfig& config, EvalSummary* summary_out = nullptr);

/// Computes per-scene and batch shape-similarity, bony-rim, and composite
/// scores into <out>/losses.csv.
int run_losses(const RunConfig& config);

/// Generates a phantom dataset (masks plus manifest.jsonl) under out_dir and
/// prints the ground-truth angle table.
int run_phantom(const PhantomArgs& args);

} // namespace grafkit::cli
