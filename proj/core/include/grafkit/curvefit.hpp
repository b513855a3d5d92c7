#pragma once

#include <array>
#include <optional>
#include <span>

#include <grafkit/geometry.hpp>
#include <grafkit/mask.hpp>

namespace grafkit {

/// Coefficients of the cubic y(u) = a u^3 + b u^2 + c u + d fitted in the
/// normalized abscissa frame u in [-1, 1]. The comparison vector drops the
/// constant term.
struct PolyCoeffs {
    double a = 0.0;
    double b = 0.0;
    double c = 0.0;
    double d = 0.0;

    std::array<double, 3> shape_vector() const { return {a, b, c}; }
};

struct FitConfig {
    /// Ridge regularization weight applied in the normalized frame.
    double xi = 1e-3;
    /// Minimum samples required per curve.
    int min_points = 4;
};

/// A closed boundary cut at its extreme-x points into two x-sorted curves.
/// Both extreme points belong to both curves.
struct BoundarySplit {
    std::vector<Point2D> upper;
    std::vector<Point2D> lower;
};

/// Cuts a closed contour at its minimum-x and maximum-x points (ties broken
/// by smaller y). The arc with the smaller mean y becomes the upper curve.
/// Duplicate abscissas keep the extremal ordinate (min y upper, max y lower).
/// Throws GeometryError for contours with fewer than 8 points or an x-extent
/// under 4 px.
BoundarySplit split_boundary(const Contour& contour);

/// Ridge least-squares cubic through the points. Abscissas are affinely
/// mapped onto [-1, 1] before building the Vandermonde system, and the
/// returned coefficients live in that normalized frame. Throws GeometryError
/// when fewer than min_points samples or all abscissas coincide, and a
/// singular-fit GeometryError when xi = 0 leaves the normal matrix singular.
PolyCoeffs fit_cubic(std::span<const Point2D> points, const FitConfig& config = {});

/// |<f1, f2>| / (|f1| |f2|), in [0, 1]. Throws DomainError when either vector
/// has (near-)zero norm; callers that can interpret flat curves apply their
/// own fallback.
double cosine_similarity(std::span<const double> f1, std::span<const double> f2);

/// Per-structure shape-similarity decomposition: entry j is 1 - cs_j (absent
/// when the structure is missing from both sets); total sums present entries.
struct ShapeSimilarityScore {
    std::array<std::optional<double>, 4> per_structure;
    double total = 0.0;
};

/// Scores boundary-shape agreement between a predicted and a reference
/// structure set. For each structure present in both, the largest-component
/// boundary of each mask is split into upper/lower curves, each curve is
/// cubic-fitted, and cs_j averages the upper and lower cosine similarities.
/// Structures present in only one set raise MeasureError.
ShapeSimilarityScore shape_similarity_score(const StructureSet& predicted,
                                            const StructureSet& reference,
                                            const FitConfig& config = {});

} // namespace grafkit
