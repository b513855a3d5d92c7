#pragma once

#include <span>
#include <string>
#include <vector>

#include <grafkit/curvefit.hpp>
#include <grafkit/geometry.hpp>
#include <grafkit/mask.hpp>

namespace grafkit {

/// The three fused landmarks of a measurable scene.
struct LandmarkSet {
    LandmarkPoint p1_bony_rim;
    LandmarkPoint p2_lower_limb;
    LandmarkPoint p3_labrum_mid;

    const LandmarkPoint& operator[](int i) const {
        return i == 0 ? p1_bony_rim : i == 1 ? p2_lower_limb : p3_labrum_mid;
    }
};

/// Weights of the composite score terms. Defaults follow the reference
/// configuration (1, 0.5, 0.5, 1).
struct LossWeights {
    double lambda1 = 1.0;
    double lambda2 = 0.5;
    double lambda3 = 0.5;
    double lambda4 = 1.0;
};

enum class GrafType { type_I, type_II };

inline const char* graf_type_name(GrafType t) {
    return t == GrafType::type_I ? "type_I" : "type_II";
}

/// Threshold rule on the alpha angle; the cutoff boundary maps to type I.
inline GrafType classify_graf(double alpha_deg, double cutoff_deg = 60.0) {
    return alpha_deg >= cutoff_deg ? GrafType::type_I : GrafType::type_II;
}

struct MeasurementReport {
    Line2D base_line;           // tangential to the flat ilium's lateral edge
    Line2D bony_roof_line;      // support line from the lower limb point
    Line2D cartilage_roof_line; // bony rim through the labrum midpoint
    double alpha = 0.0;         // degrees between base and bony roof lines
    double beta = 0.0;          // degrees between base and cartilage roof lines
    GrafType graf_type = GrafType::type_II;
    bool standard_plane = false;
    LandmarkSet landmarks_used;
    std::vector<std::string> warnings;
};

struct MeasureConfig {
    FitConfig fit;
    double graf_cutoff_deg = 60.0;
};

struct StandardPlaneCheck {
    bool standard = false;
    std::vector<std::string> missing;
};

struct InferredLandmarks {
    PartialLandmarks points;
    std::vector<std::string> warnings;
};

struct FusedLandmarks {
    LandmarkSet points;
    std::vector<std::string> warnings;
};

/// Derives landmarks from the structure masks: the bony rim is the most
/// inferior point of the flat ilium's lateral edge (the leftmost foreground
/// pixel per row of its largest component), the lower limb point the most
/// superior pixel of the lower limb (ties resolved laterally), and the labrum
/// midpoint the centroid of the labrum's largest component. Absent structures
/// yield absent landmarks; a missing or empty flat ilium raises MeasureError.
InferredLandmarks infer_landmarks_from_masks(const StructureSet& structures);

/// Fuses per-landmark positions: the coordinate-wise mean when both sources
/// exist, otherwise the single available source with a warning. Raises
/// MeasureError when a landmark has no source at all.
FusedLandmarks fuse_landmarks(const PartialLandmarks& mask_derived,
                              const PartialLandmarks& predicted);

/// Euclidean distance between the mask-derived and predicted bony rim.
double bony_rim_distance(const LandmarkPoint& mask_derived,
                         const LandmarkPoint& predicted);

/// Cross-entropy of a one-hot label vector against a softmax output:
/// -log of the probability at the true index. A zero probability there yields
/// +infinity rather than an exception.
double cross_entropy(std::span<const double> labels, std::span<const double> probs);

/// Weighted sum of the four scoring terms. Negative terms raise DomainError.
double composite_score(double maskrcnn_term, double landmark_term, double br_term,
                       double ss_term, const LossWeights& weights = {});

/// A scene is a standard plane iff all four structures are present with at
/// least one foreground pixel each.
StandardPlaneCheck check_standard_plane(const StructureSet& structures);

/// Full measurement pipeline: fuse landmarks, build the three lines, measure
/// alpha and beta, classify, and check standard-plane validity. Non-standard
/// scenes are still measured, with a warning.
MeasurementReport measure_scene(const StructureSet& structures,
                                const PartialLandmarks& predicted,
                                const MeasureConfig& config = {});

} // namespace grafkit
