#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <grafkit/mask.hpp>

namespace grafkit {

/// Reference annotation attached to a scene: structure masks, landmark
/// positions, and the clinically measured angles.
struct GroundTruth {
    std::array<std::optional<BinaryMask>, 4> masks;
    PartialLandmarks landmarks;
    std::optional<double> alpha;
    std::optional<double> beta;
};

/// One manifest line: predicted structure masks, predicted landmarks, and
/// optional ground truth, already canonicalized to lateral = image-left.
struct SceneRecord {
    std::string scene_id;
    int width = 0;
    int height = 0;
    StructureSet structures;
    PartialLandmarks predicted_landmarks;
    std::optional<GroundTruth> ground_truth;
    // Optional softmax output for the landmark cross-entropy score.
    std::optional<std::vector<double>> landmark_labels;
    std::optional<std::vector<double>> landmark_probs;
};

/// Loads a line-delimited manifest. Each line is a flat JSON object with keys
/// scene_id, width, height, laterality ("left"|"right"), s1..s4 (each
/// {"png": path} or {"rle": string} or absent), pk1..pk3 ([x, y] or absent)
/// and optional gt {s1..s4, p1..p3, alpha, beta}. Mask paths resolve relative
/// to the manifest's directory. Right-laterality scenes are mirrored
/// horizontally (landmark x' = width - 1 - x) so the lateral side is
/// image-left. Throws SchemaError naming the offending line and field.
std::vector<SceneRecord> load_manifest(const std::filesystem::path& path,
                                       int mask_threshold = 127);

} // namespace grafkit
