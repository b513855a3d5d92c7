#include <grafkit/curvefit.hpp>

#include <algorithm>
#include <cmath>
#include <map>

namespace grafkit {

namespace {

void validate_config(const FitConfig& config) {
    if (config.xi < 0.0) throw DomainError("fit config: xi must be non-negative");
    if (config.min_points < 4) throw DomainError("fit config: min_points must be >= 4");
}

// Solves the 4x4 SPD system A x = b in place via Cholesky.
std::array<double, 4> solve_spd4(std::array<std::array<double, 4>, 4> a,
                                 std::array<double, 4> b) {
    std::array<std::array<double, 4>, 4> l{};
    for (int i = 0; i < 4; ++i) {
        for (int j = 0; j <= i; ++j) {
            double s = a[i][j];
            for (int k = 0; k < j; ++k) s -= l[i][k] * l[j][k];
            if (i == j) {
                if (s <= 1e-12) {
                    throw GeometryError("fit_cubic: singular normal matrix (xi = 0 on "
                                        "rank-deficient samples)");
                }
                l[i][i] = std::sqrt(s);
            } else {
                l[i][j] = s / l[j][j];
            }
        }
    }
    std::array<double, 4> y{};
    for (int i = 0; i < 4; ++i) {
        double s = b[i];
        for (int k = 0; k < i; ++k) s -= l[i][k] * y[k];
        y[i] = s / l[i][i];
    }
    std::array<double, 4> x{};
    for (int i = 3; i >= 0; --i) {
        double s = y[i];
        for (int k = i + 1; k < 4; ++k) s -= l[k][i] * x[k];
        x[i] = s / l[i][i];
    }
    return x;
}

double curve_mean_y(std::span<const Point2D> pts) {
    double s = 0.0;
    for (const Point2D& p : pts) s += p.y;
    return s / static_cast<double>(pts.size());
}

// Sorts by x and keeps one point per abscissa, choosing the extremal ordinate.
std::vector<Point2D> sort_dedup(std::vector<Point2D> pts, bool keepMinY) {
    std::map<double, double> byX;
    for (const Point2D& p : pts) {
        auto [it, inserted] = byX.emplace(p.x, p.y);
        if (!inserted) {
            it->second = keepMinY ? std::min(it->second, p.y) : std::max(it->second, p.y);
        }
    }
    std::vector<Point2D> out;
    out.reserve(byX.size());
    for (const auto& [x, y] : byX) out.push_back({x, y});
    return out;
}

// Cosine similarity with the flat-curve fallback: two (near-)zero shape
// vectors count as identical, a single zero vector as maximally dissimilar.
double cosine_or_flat(const std::array<double, 3>& f1, const std::array<double, 3>& f2) {
    const double n1 = std::sqrt(f1[0] * f1[0] + f1[1] * f1[1] + f1[2] * f1[2]);
    const double n2 = std::sqrt(f2[0] * f2[0] + f2[1] * f2[1] + f2[2] * f2[2]);
    const bool z1 = n1 < 1e-12;
    const bool z2 = n2 < 1e-12;
    if (z1 && z2) return 1.0;
    if (z1 || z2) return 0.0;
    return cosine_similarity(f1, f2);
}

double structure_cosine(const BinaryMask& predicted, const BinaryMask& reference,
                        const FitConfig& config) {
    const Contour predBoundary = extract_contours(predicted).front();
    const Contour refBoundary = extract_contours(reference).front();
    const BoundarySplit predSplit = split_boundary(predBoundary);
    const BoundarySplit refSplit = split_boundary(refBoundary);

    const double csUpper = cosine_or_flat(fit_cubic(predSplit.upper, config).shape_vector(),
                                          fit_cubic(refSplit.upper, config).shape_vector());
    const double csLower = cosine_or_flat(fit_cubic(predSplit.lower, config).shape_vector(),
                                          fit_cubic(refSplit.lower, config).shape_vector());
    return 0.5 * (csUpper + csLower);
}

} // namespace

BoundarySplit split_boundary(const Contour& contour) {
    const std::vector<Point2D>& pts = contour.points;
    if (!contour.closed || pts.size() < 8) {
        throw GeometryError("split_boundary: need a closed contour with at least 8 points");
    }

    std::size_t minIdx = 0, maxIdx = 0;
    for (std::size_t i = 1; i < pts.size(); ++i) {
        const Point2D& p = pts[i];
        const Point2D& lo = pts[minIdx];
        const Point2D& hi = pts[maxIdx];
        if (p.x < lo.x || (p.x == lo.x && p.y < lo.y)) minIdx = i;
        if (p.x > hi.x || (p.x == hi.x && p.y < hi.y)) maxIdx = i;
    }
    if (pts[maxIdx].x - pts[minIdx].x < 4.0) {
        throw GeometryError("split_boundary: x-extent under 4 px is too narrow to fit");
    }

    // The two arcs of the ring between the extreme-x points, both inclusive.
    std::vector<Point2D> arcA, arcB;
    for (std::size_t i = minIdx;; i = (i + 1) % pts.size()) {
        arcA.push_back(pts[i]);
        if (i == maxIdx) break;
    }
    for (std::size_t i = maxIdx;; i = (i + 1) % pts.size()) {
        arcB.push_back(pts[i]);
        if (i == minIdx) break;
    }

    const bool aIsUpper = curve_mean_y(arcA) <= curve_mean_y(arcB);
    BoundarySplit split;
    split.upper = sort_dedup(aIsUpper ? std::move(arcA) : std::move(arcB), true);
    split.lower = sort_dedup(aIsUpper ? std::move(arcB) : std::move(arcA), false);
    return split;
}

PolyCoeffs fit_cubic(std::span<const Point2D> points, const FitConfig& config) {
    validate_config(config);
    if (points.size() < static_cast<std::size_t>(config.min_points)) {
        throw GeometryError("fit_cubic: need at least " +
                            std::to_string(config.min_points) + " points, got " +
                            std::to_string(points.size()));
    }
    double xmin = points[0].x, xmax = points[0].x;
    for (const Point2D& p : points) {
        xmin = std::min(xmin, p.x);
        xmax = std::max(xmax, p.x);
    }
    if (xmax - xmin < 1e-12) {
        throw GeometryError("fit_cubic: all abscissas coincide");
    }
    const double scale = 2.0 / (xmax - xmin);

    // Normal equations for the design [u^3, u^2, u, 1] with ridge term xi*I.
    double pow_sum[7] = {};
    double rhs4[4] = {};
    for (const Point2D& p : points) {
        const double u = scale * (p.x - xmin) - 1.0;
        double uk = 1.0;
        double powers[7];
        for (int k = 0; k < 7; ++k) {
            powers[k] = uk;
            uk *= u;
        }
        for (int k = 0; k < 7; ++k) pow_sum[k] += powers[k];
        for (int i = 0; i < 4; ++i) rhs4[i] += powers[3 - i] * p.y;
    }
    std::array<std::array<double, 4>, 4> a{};
    for (int i = 0; i < 4; ++i) {
        for (int j = 0; j < 4; ++j) a[i][j] = pow_sum[6 - i - j];
        a[i][i] += config.xi;
    }
    const std::array<double, 4> theta =
        solve_spd4(a, {rhs4[0], rhs4[1], rhs4[2], rhs4[3]});
    return PolyCoeffs{theta[0], theta[1], theta[2], theta[3]};
}

double cosine_similarity(std::span<const double> f1, std::span<const double> f2) {
    if (f1.size() != f2.size() || f1.empty()) {
        throw DomainError("cosine_similarity: vectors must have equal nonzero length");
    }
    double d = 0.0, n1 = 0.0, n2 = 0.0;
    for (std::size_t i = 0; i < f1.size(); ++i) {
        d += f1[i] * f2[i];
        n1 += f1[i] * f1[i];
        n2 += f2[i] * f2[i];
    }
    if (n1 < 1e-24 || n2 < 1e-24) {
        throw DomainError("cosine_similarity: undefined for a zero vector");
    }
    return std::clamp(std::abs(d) / std::sqrt(n1 * n2), 0.0, 1.0);
}

ShapeSimilarityScore shape_similarity_score(const StructureSet& predicted,
                                            const StructureSet& reference,
                                            const FitConfig& config) {
    validate_config(config);
    ShapeSimilarityScore score;
    for (StructureId id : kAllStructures) {
        const auto& pred = predicted.mask(id);
        const auto& ref = reference.mask(id);
        if (!pred && !ref) continue; // absent in both: skipped
        if (!pred || !ref) {
            throw MeasureError(std::string("shape_similarity_score: structure '") +
                               structure_name(id) + "' present in only one set");
        }
        const double cs = structure_cosine(*pred, *ref, config);
        const double loss = 1.0 - cs;
        score.per_structure[static_cast<int>(id)] = loss;
        score.total += loss;
    }
    return score;
}

} // namespace grafkit
