#include <grafkit/measure.hpp>

#include <cmath>
#include <limits>

namespace grafkit {

namespace {

// Leftmost foreground pixel per row of the mask (expected: one component).
std::vector<Point2D> lateral_edge_chain(const BinaryMask& mask) {
    std::vector<Point2D> chain;
    for (int y = 0; y < mask.height(); ++y) {
        for (int x = 0; x < mask.width(); ++x) {
            if (mask.at(x, y)) {
                chain.push_back({static_cast<double>(x), static_cast<double>(y)});
                break;
            }
        }
    }
    return chain;
}

LandmarkPoint centroid_point(const BinaryMask& mask) {
    double sx = 0.0, sy = 0.0;
    std::size_t n = 0;
    for (int y = 0; y < mask.height(); ++y) {
        for (int x = 0; x < mask.width(); ++x) {
            if (mask.at(x, y)) {
                sx += x;
                sy += y;
                ++n;
            }
        }
    }
    return {sx / static_cast<double>(n), sy / static_cast<double>(n),
            LandmarkSource::mask_derived};
}

LandmarkPoint top_lateral_point(const BinaryMask& mask) {
    for (int y = 0; y < mask.height(); ++y) {
        for (int x = 0; x < mask.width(); ++x) {
            if (mask.at(x, y)) {
                return {static_cast<double>(x), static_cast<double>(y),
                        LandmarkSource::mask_derived};
            }
        }
    }
    throw EmptyMaskError("top_lateral_point: empty mask");
}

bool more_inferior_lateral(Point2D a, Point2D b) {
    if (a.y != b.y) return a.y > b.y;
    return a.x < b.x;
}

Point2D support_vertex(const Line2D& tangent, const std::vector<Point2D>& hull) {
    // The tangent anchors at the query point; its second defining point is the
    // hull vertex at maximal |projection| along the direction.
    Point2D best = hull.front();
    double bestAbs = -1.0;
    for (const Point2D& v : hull) {
        if (std::abs(tangent.signed_distance(v)) > 1e-6) continue;
        const double t = std::abs(dot(v - tangent.point, tangent.direction));
        if (t > bestAbs) {
            bestAbs = t;
            best = v;
        }
    }
    return best;
}

} // namespace

InferredLandmarks infer_landmarks_from_masks(const StructureSet& structures) {
    structures.validate();
    const auto& ilium = structures.flat_ilium();
    if (!ilium || ilium->empty_foreground()) {
        throw MeasureError("infer_landmarks: flat ilium is missing or empty");
    }

    InferredLandmarks out;
    auto warn_degenerate = [&out](StructureId id, const BinaryMask& component) {
        if (component.foreground_count() == 1) {
            out.warnings.push_back(std::string("degenerate 1-pixel ") + structure_name(id));
        }
    };

    const BinaryMask iliumMain = largest_component(*ilium);
    warn_degenerate(StructureId::flat_ilium, iliumMain);
    const std::vector<Point2D> chain = lateral_edge_chain(iliumMain);
    Point2D rim = chain.front();
    for (const Point2D& p : chain) {
        if (p.y > rim.y) rim = p;
    }
    out.points[0] = LandmarkPoint{rim.x, rim.y, LandmarkSource::mask_derived};

    const auto& lowerLimb = structures.lower_limb();
    if (lowerLimb && !lowerLimb->empty_foreground()) {
        const BinaryMask main = largest_component(*lowerLimb);
        warn_degenerate(StructureId::lower_limb, main);
        out.points[1] = top_lateral_point(main);
    }

    const auto& labrum = structures.labrum();
    if (labrum && !labrum->empty_foreground()) {
        const BinaryMask main = largest_component(*labrum);
        warn_degenerate(StructureId::labrum, main);
        out.points[2] = centroid_point(main);
    }
    return out;
}

FusedLandmarks fuse_landmarks(const PartialLandmarks& mask_derived,
                              const PartialLandmarks& predicted) {
    FusedLandmarks out;
    LandmarkPoint fused[3];
    for (int i = 0; i < 3; ++i) {
        const auto& m = mask_derived[i];
        const auto& k = predicted[i];
        if (m && k) {
            fused[i] = {0.5 * (m->x + k->x), 0.5 * (m->y + k->y), LandmarkSource::fused};
        } else if (m || k) {
            fused[i] = m ? *m : *k;
            out.warnings.push_back(std::string(landmark_name(i)) + ": only the " +
                                   (m ? "mask-derived" : "predicted") +
                                   " source is available; passing it through");
        } else {
            throw MeasureError(std::string("fuse_landmarks: no source for ") +
                               landmark_name(i));
        }
    }
    out.points = {fused[0], fused[1], fused[2]};
    return out;
}

double bony_rim_distance(const LandmarkPoint& mask_derived,
                         const LandmarkPoint& predicted) {
    return std::hypot(mask_derived.x - predicted.x, mask_derived.y - predicted.y);
}

double cross_entropy(std::span<const double> labels, std::span<const double> probs) {
    if (labels.size() != probs.size() || labels.empty()) {
        throw DomainError("cross_entropy: labels and probs must have equal nonzero length");
    }
    double sum = 0.0;
    int trueIdx = -1;
    for (std::size_t i = 0; i < labels.size(); ++i) {
        if (labels[i] != 0.0 && labels[i] != 1.0) {
            throw DomainError("cross_entropy: labels must be one-hot (0/1 entries)");
        }
        if (labels[i] == 1.0) {
            if (trueIdx >= 0) throw DomainError("cross_entropy: multiple hot labels");
            trueIdx = static_cast<int>(i);
        }
        if (probs[i] < 0.0 || probs[i] > 1.0) {
            throw DomainError("cross_entropy: probabilities must lie in [0, 1]");
        }
        sum += probs[i];
    }
    if (trueIdx < 0) throw DomainError("cross_entropy: labels have no hot entry");
    if (std::abs(sum - 1.0) > 1e-6) {
        throw DomainError("cross_entropy: probabilities must sum to 1 within 1e-6");
    }
    const double p = probs[trueIdx];
    if (p <= 0.0) return std::numeric_limits<double>::infinity();
    return -std::log(p);
}

double composite_score(double maskrcnn_term, double landmark_term, double br_term,
                       double ss_term, const LossWeights& weights) {
    const double terms[4] = {maskrcnn_term, landmark_term, br_term, ss_term};
    const double w[4] = {weights.lambda1, weights.lambda2, weights.lambda3,
                         weights.lambda4};
    double total = 0.0;
    for (int i = 0; i < 4; ++i) {
        if (!(terms[i] >= 0.0) || !std::isfinite(terms[i])) {
            throw DomainError("composite_score: terms must be finite and non-negative");
        }
        if (w[i] < 0.0) throw DomainError("composite_score: weights must be non-negative");
        total += w[i] * terms[i];
    }
    return total;
}

StandardPlaneCheck check_standard_plane(const StructureSet& structures) {
    StandardPlaneCheck check;
    for (StructureId id : kAllStructures) {
        const auto& m = structures.mask(id);
        if (!m || m->empty_foreground()) {
            check.missing.push_back(structure_name(id));
        }
    }
    check.standard = check.missing.empty();
    return check;
}

MeasurementReport measure_scene(const StructureSet& structures,
                                const PartialLandmarks& predicted,
                                const MeasureConfig& config) {
    MeasurementReport report;

    const InferredLandmarks inferred = infer_landmarks_from_masks(structures);
    FusedLandmarks fused = fuse_landmarks(inferred.points, predicted);
    report.landmarks_used = fused.points;
    report.warnings = std::move(inferred.warnings);
    report.warnings.insert(report.warnings.end(), fused.warnings.begin(),
                           fused.warnings.end());

    const BinaryMask iliumMain = largest_component(*structures.flat_ilium());
    const std::vector<Point2D> edge = lateral_edge_chain(iliumMain);
    report.base_line = fit_line_tls(edge);

    const Point2D p1{fused.points.p1_bony_rim.x, fused.points.p1_bony_rim.y};
    const Point2D p2{fused.points.p2_lower_limb.x, fused.points.p2_lower_limb.y};
    const Point2D p3{fused.points.p3_labrum_mid.x, fused.points.p3_labrum_mid.y};

    const Contour iliumBoundary = extract_contours(iliumMain).front();
    try {
        // Of the two supporting lines from P2, keep the one touching closer to
        // the ilium's inferior-lateral region, where the bony roof attaches.
        const std::vector<Point2D> hull = convex_hull(iliumBoundary.points);
        const Line2D cw = tangent_from_point(iliumBoundary, p2, TangentSide::clockwise);
        const Line2D ccw =
            tangent_from_point(iliumBoundary, p2, TangentSide::counterclockwise);
        const Point2D vcw = support_vertex(cw, hull);
        const Point2D vccw = support_vertex(ccw, hull);
        report.bony_roof_line = more_inferior_lateral(vcw, vccw) ? cw : ccw;
    } catch (const GeometryError&) {
        // P2 inside the hull: fall back to the line through P2 and the rim.
        report.bony_roof_line = Line2D::from_points(p2, p1);
        report.warnings.push_back("lower limb point lies inside the ilium hull; "
                                  "bony roof line falls back to the rim direction");
    }

    report.cartilage_roof_line = Line2D::from_points(p1, p3);

    report.alpha = angle_between(report.base_line, report.bony_roof_line);
    report.beta = angle_between(report.base_line, report.cartilage_roof_line);
    report.graf_type = classify_graf(report.alpha, config.graf_cutoff_deg);
    if (std::abs(report.alpha - config.graf_cutoff_deg) < 0.1) {
        report.warnings.push_back("alpha within 0.1 deg of the classification cutoff");
    }

    const StandardPlaneCheck plane = check_standard_plane(structures);
    report.standard_plane = plane.standard;
    if (!plane.standard) {
        std::string msg = "non-standard plane; missing:";
        for (const std::string& name : plane.missing) msg += " " + name;
        report.warnings.push_back(std::move(msg));
    }
    return report;
}

} // namespace grafkit
