#pragma once

#include <span>
#include <vector>

#include <grafkit/mask.hpp>

namespace grafkit {

struct Point2D {
    double x = 0.0;
    double y = 0.0;
};

inline Point2D operator+(Point2D a, Point2D b) { return {a.x + b.x, a.y + b.y}; }
inline Point2D operator-(Point2D a, Point2D b) { return {a.x - b.x, a.y - b.y}; }
inline Point2D operator*(double s, Point2D p) { return {s * p.x, s * p.y}; }
inline double dot(Point2D a, Point2D b) { return a.x * b.x + a.y * b.y; }
inline double cross(Point2D a, Point2D b) { return a.x * b.y - a.y * b.x; }
double norm(Point2D p);

/// Ordered boundary polyline traced over a raster component.
///
/// Raster-traced contours step between 8-connected pixel centers and are
/// oriented with positive shoelace area in image coordinates. Single- and
/// two-pixel components yield degenerate loops of fewer than three points.
struct Contour {
    std::vector<Point2D> points;
    bool closed = true;

    double signed_area() const;
};

/// Infinite line through `point` with unit `direction`.
struct Line2D {
    Point2D point;
    Point2D direction;

    /// Normalizes `dir`; throws GeometryError on a zero vector.
    static Line2D through(Point2D anchor, Point2D dir);
    /// Line through two distinct points.
    static Line2D from_points(Point2D a, Point2D b);

    /// Signed perpendicular distance of `p` from the line.
    double signed_distance(Point2D p) const;
};

/// Traces one closed outer-boundary contour per 8-connected foreground
/// component, ordered by descending pixel count (ties: first component in
/// row-major order). Throws EmptyMaskError on an empty mask.
std::vector<Contour> extract_contours(const BinaryMask& mask);

/// Keeps only the largest 8-connected component; ties broken by the component
/// whose first foreground pixel comes earliest in row-major order.
BinaryMask largest_component(const BinaryMask& mask);

/// Convex hull of a point set (monotone chain), positively oriented in image
/// coordinates with collinear vertices dropped.
std::vector<Point2D> convex_hull(std::span<const Point2D> points);

/// Which of the two hull-supporting lines from an external point to return.
/// Polar angles follow the image frame (x right, y down), so increasing angle
/// turns from +x toward +y; `clockwise` selects the support vertex with the
/// maximal direction angle seen from the point, `counterclockwise` the minimal.
enum class TangentSide { clockwise, counterclockwise };

/// Supporting line of the contour's convex hull through `p` on the requested
/// side. Every hull vertex lies on one closed half-plane of the result.
/// Throws GeometryError when `p` is strictly inside the hull.
Line2D tangent_from_point(const Contour& contour, Point2D p, TangentSide side);

/// Total-least-squares line: anchor at the centroid, direction along the
/// principal axis of the centered scatter matrix. Throws GeometryError when
/// all points coincide or fewer than two are given.
Line2D fit_line_tls(std::span<const Point2D> points);

/// Acute-or-right angle between two lines in degrees: acos(|d1.d2|) in [0, 90].
double angle_between(const Line2D& a, const Line2D& b);

} // namespace grafkit
