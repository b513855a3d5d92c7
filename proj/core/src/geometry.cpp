#include <grafkit/geometry.hpp>

#include <algorithm>
#include <cmath>
#include <limits>

namespace grafkit {

namespace {

// 8-neighborhood in clockwise screen order (y grows downward).
constexpr int kDx[8] = {1, 1, 0, -1, -1, -1, 0, 1};
constexpr int kDy[8] = {0, 1, 1, 1, 0, -1, -1, -1};

struct Pixel {
    int x;
    int y;
    bool operator==(const Pixel& o) const { return x == o.x && y == o.y; }
};

int direction_from(Pixel from, Pixel to) {
    for (int d = 0; d < 8; ++d) {
        if (from.x + kDx[d] == to.x && from.y + kDy[d] == to.y) return d;
    }
    return -1;
}

struct Component {
    std::size_t first_index; // row-major index of first pixel
    std::size_t area = 0;
};

// Labels 8-connected components in row-major discovery order.
std::vector<Component> label_components(const BinaryMask& mask, std::vector<int>& labels) {
    const int w = mask.width();
    const int h = mask.height();
    labels.assign(static_cast<std::size_t>(w) * h, -1);
    std::vector<Component> comps;
    std::vector<Pixel> stack;
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            const std::size_t idx = static_cast<std::size_t>(y) * w + x;
            if (!mask.at(x, y) || labels[idx] >= 0) continue;
            const int id = static_cast<int>(comps.size());
            comps.push_back({idx, 0});
            stack.push_back({x, y});
            labels[idx] = id;
            while (!stack.empty()) {
                Pixel p = stack.back();
                stack.pop_back();
                ++comps[id].area;
                for (int d = 0; d < 8; ++d) {
                    const int nx = p.x + kDx[d];
                    const int ny = p.y + kDy[d];
                    if (!mask.in_bounds(nx, ny) || !mask.at(nx, ny)) continue;
                    const std::size_t nidx = static_cast<std::size_t>(ny) * w + nx;
                    if (labels[nidx] >= 0) continue;
                    labels[nidx] = id;
                    stack.push_back({nx, ny});
                }
            }
        }
    }
    return comps;
}

// Moore-neighbor boundary trace from the component's first row-major pixel.
// Terminates when the (current, backtrack) state repeats its initial value.
std::vector<Point2D> trace_boundary(const BinaryMask& mask, Pixel start) {
    std::vector<Point2D> pts;
    pts.push_back({static_cast<double>(start.x), static_cast<double>(start.y)});

    const Pixel b0{start.x - 1, start.y}; // west neighbor is background by choice of start
    Pixel cur = start;
    Pixel back = b0;
    const std::size_t cap = 8 * mask.size() + 16;
    for (std::size_t iter = 0; iter < cap; ++iter) {
        const int d0 = direction_from(cur, back);
        Pixel next{-1, -1};
        Pixel nextBack = back;
        bool found = false;
        for (int k = 1; k <= 8; ++k) {
            const int d = (d0 + k) % 8;
            const int nx = cur.x + kDx[d];
            const int ny = cur.y + kDy[d];
            if (mask.in_bounds(nx, ny) && mask.at(nx, ny)) {
                next = {nx, ny};
                const int dPrev = (d0 + k - 1) % 8;
                nextBack = {cur.x + kDx[dPrev], cur.y + kDy[dPrev]};
                found = true;
                break;
            }
        }
        if (!found) return pts; // isolated pixel
        cur = next;
        back = nextBack;
        if (cur == start && back == b0) return pts;
        pts.push_back({static_cast<double>(cur.x), static_cast<double>(cur.y)});
    }
    throw GeometryError("boundary trace failed to close");
}

double shoelace(const std::vector<Point2D>& pts) {
    double a = 0.0;
    const std::size_t n = pts.size();
    for (std::size_t i = 0; i < n; ++i) {
        const Point2D& p = pts[i];
        const Point2D& q = pts[(i + 1) % n];
        a += p.x * q.y - q.x * p.y;
    }
    return 0.5 * a;
}

} // namespace

double norm(Point2D p) { return std::hypot(p.x, p.y); }

double Contour::signed_area() const { return shoelace(points); }

Line2D Line2D::through(Point2D anchor, Point2D dir) {
    const double n = norm(dir);
    if (n < 1e-12) throw GeometryError("line direction is a zero vector");
    return Line2D{anchor, {dir.x / n, dir.y / n}};
}

Line2D Line2D::from_points(Point2D a, Point2D b) {
    return through(a, b - a);
}

double Line2D::signed_distance(Point2D p) const {
    return cross(direction, p - point);
}

std::vector<Contour> extract_contours(const BinaryMask& mask) {
    if (mask.empty_foreground()) {
        throw EmptyMaskError("extract_contours: mask has no foreground");
    }
    std::vector<int> labels;
    std::vector<Component> comps = label_components(mask, labels);

    std::vector<std::size_t> order(comps.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        if (comps[a].area != comps[b].area) return comps[a].area > comps[b].area;
        return comps[a].first_index < comps[b].first_index;
    });

    std::vector<Contour> out;
    out.reserve(comps.size());
    for (std::size_t id : order) {
        const int w = mask.width();
        const Pixel start{static_cast<int>(comps[id].first_index % w),
                          static_cast<int>(comps[id].first_index / w)};
        Contour c;
        c.points = trace_boundary(mask, start);
        c.closed = true;
        if (c.points.size() >= 3 && shoelace(c.points) < 0.0) {
            std::reverse(c.points.begin(), c.points.end());
        }
        out.push_back(std::move(c));
    }
    return out;
}

BinaryMask largest_component(const BinaryMask& mask) {
    if (mask.empty_foreground()) {
        throw EmptyMaskError("largest_component: mask has no foreground");
    }
    std::vector<int> labels;
    std::vector<Component> comps = label_components(mask, labels);
    // Discovery order is row-major, so on equal area the earlier component wins.
    std::size_t best = 0;
    for (std::size_t i = 1; i < comps.size(); ++i) {
        if (comps[i].area > comps[best].area) best = i;
    }
    BinaryMask out(mask.width(), mask.height());
    for (int y = 0; y < mask.height(); ++y) {
        for (int x = 0; x < mask.width(); ++x) {
            const std::size_t idx = static_cast<std::size_t>(y) * mask.width() + x;
            if (labels[idx] == static_cast<int>(best)) out.set(x, y, true);
        }
    }
    return out;
}

std::vector<Point2D> convex_hull(std::span<const Point2D> points) {
    std::vector<Point2D> pts(points.begin(), points.end());
    std::sort(pts.begin(), pts.end(), [](Point2D a, Point2D b) {
        return a.x != b.x ? a.x < b.x : a.y < b.y;
    });
    pts.erase(std::unique(pts.begin(), pts.end(),
                          [](Point2D a, Point2D b) { return a.x == b.x && a.y == b.y; }),
              pts.end());
    const std::size_t n = pts.size();
    if (n <= 2) return pts;

    std::vector<Point2D> hull(2 * n);
    std::size_t k = 0;
    for (std::size_t i = 0; i < n; ++i) { // lower chain
        while (k >= 2 && cross(hull[k - 1] - hull[k - 2], pts[i] - hull[k - 2]) <= 0.0) --k;
        hull[k++] = pts[i];
    }
    const std::size_t lower = k + 1;
    for (std::size_t i = n - 1; i-- > 0;) { // upper chain
        while (k >= lower && cross(hull[k - 1] - hull[k - 2], pts[i] - hull[k - 2]) <= 0.0) --k;
        hull[k++] = pts[i];
    }
    hull.resize(k - 1);
    return hull;
}

Line2D tangent_from_point(const Contour& contour, Point2D p, TangentSide side) {
    std::vector<Point2D> hull = convex_hull(contour.points);
    if (hull.empty()) throw GeometryError("tangent_from_point: empty contour");

    if (hull.size() >= 3) {
        bool inside = true;
        for (std::size_t i = 0; i < hull.size(); ++i) {
            const Point2D a = hull[i];
            const Point2D b = hull[(i + 1) % hull.size()];
            if (cross(b - a, p - a) <= 1e-9) {
                inside = false;
                break;
            }
        }
        if (inside) {
            throw GeometryError("tangent_from_point: point lies inside the convex hull");
        }
    }

    // Extremal support vertex by polar angle around p, compared with cross
    // products so the branch cut never matters (exterior cone spans < pi).
    const bool wantMax = (side == TangentSide::clockwise);
    const Point2D* best = nullptr;
    for (const Point2D& v : hull) {
        const Point2D dv = v - p;
        if (norm(dv) < 1e-12) continue; // p coincides with this vertex
        if (!best) {
            best = &v;
            continue;
        }
        const Point2D db = *best - p;
        const double c = cross(db, dv);
        bool take = false;
        if (c != 0.0) {
            take = wantMax ? (c > 0.0) : (c < 0.0);
        } else {
            take = dot(dv, dv) > dot(db, db); // collinear support: keep the far vertex
        }
        if (take) best = &v;
    }
    if (!best) throw GeometryError("tangent_from_point: contour degenerates to the query point");
    return Line2D::from_points(p, *best);
}

Line2D fit_line_tls(std::span<const Point2D> points) {
    if (points.size() < 2) {
        throw GeometryError("fit_line_tls: need at least two points");
    }
    double mx = 0.0, my = 0.0;
    for (const Point2D& p : points) {
        mx += p.x;
        my += p.y;
    }
    mx /= static_cast<double>(points.size());
    my /= static_cast<double>(points.size());

    double sxx = 0.0, sxy = 0.0, syy = 0.0;
    for (const Point2D& p : points) {
        const double dx = p.x - mx;
        const double dy = p.y - my;
        sxx += dx * dx;
        sxy += dx * dy;
        syy += dy * dy;
    }
    if (sxx + syy < 1e-18) {
        throw GeometryError("fit_line_tls: all points coincide");
    }
    // Principal eigenvector of [[sxx, sxy], [sxy, syy]], closed form.
    const double theta = 0.5 * std::atan2(2.0 * sxy, sxx - syy);
    return Line2D{{mx, my}, {std::cos(theta), std::sin(theta)}};
}

double angle_between(const Line2D& a, const Line2D& b) {
    const double d = std::clamp(std::abs(dot(a.direction, b.direction)), 0.0, 1.0);
    return std::acos(d) * 180.0 / 3.14159265358979323846;
}

} // namespace grafkit
