#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include <grafkit/manifest.hpp>
#include <grafkit/mask.hpp>
#include <grafkit/measure.hpp>

namespace grafkit {

/// Boundary degradation applied to the prediction-side masks.
struct PhantomNoise {
    double edge_jitter_px = 0.0;     // amplitude of correlated boundary noise
    double dropout_fraction = 0.0;   // fraction of each boundary removed, < 0.5
    double landmark_jitter_px = 0.0; // gaussian sigma on predicted landmarks
};

/// Recipe for one synthetic scene with analytically known angles.
struct PhantomSpec {
    double alpha_true = 60.0; // degrees, within [40, 80]
    double beta_true = 55.0;  // degrees, within [30, 90]
    int canvas_width = 512;
    int canvas_height = 512;
    double ilium_thickness = 12.0;
    /// Per-structure blob size multipliers (ilium, lower limb, labrum, CO).
    std::array<double, 4> structure_scales = {1.0, 1.0, 1.0, 1.0};
    PhantomNoise noise;
    std::uint64_t seed = 0;
    /// Merge the ilium and lower limb into one connected prediction mask, the
    /// touching-structures failure regime of clinical scans.
    bool fuse_ilium_lower_limb = false;
};

struct PhantomScene {
    std::string scene_id = "phantom";
    StructureSet structures;       // prediction-side masks (noise applied)
    StructureSet truth_structures; // clean rasterization
    LandmarkSet landmarks_truth;
    LandmarkSet predicted_landmarks; // truth plus landmark jitter
    double alpha_true = 0.0;
    double beta_true = 0.0;
    PhantomSpec provenance;
};

/// Builds the scene in continuous coordinates and rasterizes it: a vertical
/// flat-ilium band whose lateral edge carries the base line, the lower limb
/// placed so the support line from its top point meets the bony rim at exactly
/// alpha_true, and the labrum centered so the rim-to-labrum line meets the
/// base line at exactly beta_true. Deterministic for a fixed spec.
/// Throws DomainError for out-of-range spec values and InfeasibleSpecError
/// when a structure would leave the canvas.
PhantomScene generate(const PhantomSpec& spec);

struct AngleRange {
    double alpha_min = 45.0;
    double alpha_max = 75.0;
    double beta_min = 35.0;
    double beta_max = 80.0;
};

/// n scenes with angles drawn uniformly from the seeded range; scene ids are
/// "phantom-0000" style and per-scene seeds derive from `seed`.
std::vector<PhantomScene> generate_batch(int n, const AngleRange& angles,
                                         const PhantomSpec& base, std::uint64_t seed);

struct DatasetOptions {
    bool include_ground_truth = true;
    bool include_truth_angles = true;
};

/// Writes PNG masks plus a manifest.jsonl consumable by load_manifest, and
/// returns the manifest path.
std::filesystem::path write_dataset(const std::vector<PhantomScene>& scenes,
                                    const std::filesystem::path& directory,
                                    const DatasetOptions& options = {});

} // namespace grafkit
