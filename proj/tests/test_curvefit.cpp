#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <Eigen/Dense>

#include <cmath>
#include <random>
#include <set>

#include <grafkit/curvefit.hpp>

#include "support.hpp"

using namespace grafkit;

namespace {

double coeff_norm(const PolyCoeffs& c) {
    return std::sqrt(c.a * c.a + c.b * c.b + c.c * c.c + c.d * c.d);
}

// Independent ridge solve: Eigen builds its own Vandermonde on the same
// normalized abscissas and solves the augmented least-squares system.
PolyCoeffs eigen_ridge(const std::vector<Point2D>& pts, double xi) {
    double xmin = pts[0].x, xmax = pts[0].x;
    for (const auto& p : pts) {
        xmin = std::min(xmin, p.x);
        xmax = std::max(xmax, p.x);
    }
    const int n = static_cast<int>(pts.size());
    Eigen::MatrixXd design(n + 4, 4);
    Eigen::VectorXd rhs(n + 4);
    design.setZero();
    rhs.setZero();
    for (int i = 0; i < n; ++i) {
        const double u = 2.0 * (pts[i].x - xmin) / (xmax - xmin) - 1.0;
        design(i, 0) = u * u * u;
        design(i, 1) = u * u;
        design(i, 2) = u;
        design(i, 3) = 1.0;
        rhs(i) = pts[i].y;
    }
    for (int j = 0; j < 4; ++j) design(n + j, j) = std::sqrt(xi);
    const Eigen::VectorXd theta =
        design.bdcSvd(Eigen::ComputeThinU | Eigen::ComputeThinV).solve(rhs);
    return PolyCoeffs{theta(0), theta(1), theta(2), theta(3)};
}

std::vector<Point2D> normalized_grid_cubic(double a, double b, double c, double d, int n) {
    std::vector<Point2D> pts;
    for (int i = 0; i < n; ++i) {
        const double u = -1.0 + 2.0 * i / (n - 1.0);
        pts.push_back({u, ((a * u + b) * u + c) * u + d});
    }
    return pts;
}

std::set<std::pair<long, long>> point_key_set(const std::vector<Point2D>& pts) {
    std::set<std::pair<long, long>> keys;
    for (const Point2D& p : pts) {
        keys.insert({std::lround(p.x * 16), std::lround(p.y * 16)});
    }
    return keys;
}

} // namespace

TEST_CASE("split_boundary of a rectangle separates top and bottom edges") {
    BinaryMask m(20, 12);
    for (int y = 3; y <= 8; ++y) {
        for (int x = 2; x <= 15; ++x) m.set(x, y, true);
    }
    const Contour boundary = extract_contours(m).front();
    const BoundarySplit split = split_boundary(boundary);
    for (const Point2D& p : split.upper) CHECK(p.y == 3.0);
    for (const Point2D& p : split.lower) CHECK(p.y == 8.0);
    CHECK(split.upper.front().x == 2.0);
    CHECK(split.upper.back().x == 15.0);
    CHECK(split.lower.front().x == 2.0);
    CHECK(split.lower.back().x == 15.0);
}

TEST_CASE("split_boundary of a circle cuts at the extreme abscissas") {
    BinaryMask m(32, 32);
    for (int y = 0; y < 32; ++y) {
        for (int x = 0; x < 32; ++x) {
            if ((x - 15) * (x - 15) + (y - 15) * (y - 15) <= 100) m.set(x, y, true);
        }
    }
    const BoundarySplit split = split_boundary(extract_contours(m).front());
    CHECK(split.upper.front().x == 5.0);
    CHECK(split.upper.back().x == 25.0);
    for (const Point2D& p : split.upper) CHECK(p.y <= 15.0);
    for (const Point2D& p : split.lower) CHECK(p.y >= 15.0);
}

TEST_CASE("split_boundary covers the contour point set on random blobs") {
    std::mt19937_64 rng(4242);
    for (int trial = 0; trial < 100; ++trial) {
        const BinaryMask blob = testsupport::random_blob(rng, 48, 48);
        const Contour boundary = extract_contours(blob).front();
        if (boundary.points.size() < 8) continue;
        const BoundarySplit split = split_boundary(boundary);

        // dedup keeps extremal ordinates, so compare x-coverage and membership
        auto contourKeys = point_key_set(boundary.points);
        std::vector<Point2D> merged = split.upper;
        merged.insert(merged.end(), split.lower.begin(), split.lower.end());
        for (const Point2D& p : merged) {
            CHECK(contourKeys.count({std::lround(p.x * 16), std::lround(p.y * 16)}) == 1);
        }
        std::set<long> contourX, splitX;
        for (const Point2D& p : boundary.points) contourX.insert(std::lround(p.x * 16));
        for (const Point2D& p : merged) splitX.insert(std::lround(p.x * 16));
        CHECK(contourX == splitX);
    }
}

TEST_CASE("split_boundary rejects narrow or short contours") {
    Contour narrow;
    for (int i = 0; i < 10; ++i) {
        narrow.points.push_back({static_cast<double>(i % 2), static_cast<double>(i)});
    }
    CHECK_THROWS_AS(split_boundary(narrow), GeometryError);
    Contour tiny{{{0, 0}, {5, 0}, {5, 5}}, true};
    CHECK_THROWS_AS(split_boundary(tiny), GeometryError);
}

TEST_CASE("fit_cubic interpolates an exact cubic at xi = 0") {
    const auto pts = normalized_grid_cubic(2.0, 0.0, -1.0, 5.0, 12);
    const PolyCoeffs c = fit_cubic(pts, FitConfig{0.0, 4});
    CHECK(c.a == doctest::Approx(2.0).epsilon(1e-9));
    CHECK(c.b == doctest::Approx(0.0).epsilon(1e-9));
    CHECK(c.c == doctest::Approx(-1.0).epsilon(1e-9));
    CHECK(c.d == doctest::Approx(5.0).epsilon(1e-9));
    const auto f = c.shape_vector();
    CHECK(f[0] == c.a);
    CHECK(f[1] == c.b);
    CHECK(f[2] == c.c);
}

TEST_CASE("ridge shrinks the coefficient norm") {
    const auto pts = normalized_grid_cubic(2.0, 0.0, -1.0, 5.0, 12);
    const PolyCoeffs loose = fit_cubic(pts, FitConfig{0.0, 4});
    const PolyCoeffs tight = fit_cubic(pts, FitConfig{10.0, 4});
    CHECK(coeff_norm(tight) < coeff_norm(loose));
}

TEST_CASE("fit_cubic matches the independent Eigen solve on noisy data") {
    std::mt19937_64 rng(42);
    std::normal_distribution<double> noise(0.0, 0.5);
    std::uniform_real_distribution<double> coeff(-3.0, 3.0);
    for (int trial = 0; trial < 25; ++trial) {
        const double a = coeff(rng), b = coeff(rng), c = coeff(rng), d = coeff(rng);
        std::vector<Point2D> pts;
        for (int i = 0; i < 20; ++i) {
            const double x = 30.0 + 4.0 * i; // raw pixel abscissas
            const double u = -1.0 + 2.0 * i / 19.0;
            pts.push_back({x, ((a * u + b) * u + c) * u + d + noise(rng)});
        }
        const PolyCoeffs mine = fit_cubic(pts, FitConfig{1e-3, 4});
        const PolyCoeffs ref = eigen_ridge(pts, 1e-3);
        CHECK(mine.a == doctest::Approx(ref.a).epsilon(1e-9));
        CHECK(mine.b == doctest::Approx(ref.b).epsilon(1e-9));
        CHECK(mine.c == doctest::Approx(ref.c).epsilon(1e-9));
        CHECK(mine.d == doctest::Approx(ref.d).epsilon(1e-9));
    }
}

TEST_CASE("fit_cubic error paths") {
    CHECK_THROWS_AS(fit_cubic(std::vector<Point2D>{{0, 0}, {1, 1}, {2, 2}}, FitConfig{}),
                    GeometryError);
    const std::vector<Point2D> vertical{{3, 0}, {3, 1}, {3, 2}, {3, 3}, {3, 4}};
    CHECK_THROWS_AS(fit_cubic(vertical, FitConfig{}), GeometryError);
    // duplicated abscissas leave the xi = 0 normal matrix rank deficient
    const std::vector<Point2D> dup{{0, 0}, {0, 1}, {1, 0}, {5, 2}};
    CHECK_THROWS_AS(fit_cubic(dup, FitConfig{0.0, 4}), GeometryError);
    CHECK_THROWS_AS(fit_cubic(dup, FitConfig{-1.0, 4}), DomainError);
}

TEST_CASE("cosine_similarity analytic values") {
    const std::vector<double> v123{1, 2, 3};
    CHECK(cosine_similarity(v123, v123) == doctest::Approx(1.0));
    CHECK(cosine_similarity(std::vector<double>{1, 0, 0}, std::vector<double>{0, 1, 0}) ==
          doctest::Approx(0.0));
    CHECK(cosine_similarity(std::vector<double>{1, 1, 0}, std::vector<double>{1, 0, 0}) ==
          doctest::Approx(1.0 / std::sqrt(2.0)));
    CHECK_THROWS_AS(
        cosine_similarity(std::vector<double>{0, 0, 0}, std::vector<double>{1, 0, 0}),
        DomainError);
}

TEST_CASE("cosine_similarity invariances") {
    std::mt19937_64 rng(17);
    std::uniform_real_distribution<double> u(-4.0, 4.0);
    std::uniform_real_distribution<double> s(0.1, 30.0);
    for (int trial = 0; trial < 200; ++trial) {
        std::vector<double> f1{u(rng), u(rng), u(rng)};
        std::vector<double> f2{u(rng), u(rng), u(rng)};
        const double base = cosine_similarity(f1, f2);
        CHECK(base >= 0.0);
        CHECK(base <= 1.0);
        const double k = s(rng);
        const std::vector<double> scaled{k * f2[0], k * f2[1], k * f2[2]};
        CHECK(cosine_similarity(f1, scaled) == doctest::Approx(base).epsilon(1e-12));
        std::vector<double> negated{-f2[0], -f2[1], -f2[2]};
        CHECK(cosine_similarity(f1, negated) == doctest::Approx(base).epsilon(1e-12));
        CHECK(cosine_similarity(f2, f1) == doctest::Approx(base).epsilon(1e-12));
    }
}

TEST_CASE("opposite parabolas are cosine-identical") {
    // |cos| between the shape vectors of y = u^2 and y = -u^2
    const auto up = normalized_grid_cubic(0.0, 1.0, 0.0, 0.0, 16);
    const auto down = normalized_grid_cubic(0.0, -1.0, 0.0, 0.0, 16);
    const PolyCoeffs cu = fit_cubic(up, FitConfig{0.0, 4});
    const PolyCoeffs cd = fit_cubic(down, FitConfig{0.0, 4});
    CHECK(cosine_similarity(cu.shape_vector(), cd.shape_vector()) == doctest::Approx(1.0));
}

namespace {

StructureSet blob_structures(std::mt19937_64& rng) {
    StructureSet s;
    for (int i = 0; i < 4; ++i) s.masks[i] = testsupport::random_blob(rng, 64, 64);
    return s;
}

} // namespace

TEST_CASE("shape similarity of a set with itself is zero") {
    std::mt19937_64 rng(1);
    for (int trial = 0; trial < 20; ++trial) {
        const StructureSet s = blob_structures(rng);
        const ShapeSimilarityScore score = shape_similarity_score(s, s);
        CHECK(score.total == doctest::Approx(0.0).epsilon(1e-12));
        for (const auto& v : score.per_structure) {
            REQUIRE(v.has_value());
            CHECK(*v == doctest::Approx(0.0).epsilon(1e-12));
            CHECK(*v >= 0.0);
            CHECK(*v <= 1.0);
        }
    }
}

TEST_CASE("pure x-translation leaves the shape score at zero") {
    std::mt19937_64 rng(2);
    const StructureSet truth = blob_structures(rng);
    StructureSet pred = truth;
    for (auto& m : pred.masks) m = testsupport::translate_mask(*m, 5, 0);
    const ShapeSimilarityScore score = shape_similarity_score(pred, truth);
    CHECK(score.total == doctest::Approx(0.0).epsilon(1e-6));
}

TEST_CASE("structures present on one side only are a mismatch") {
    std::mt19937_64 rng(3);
    StructureSet truth = blob_structures(rng);
    StructureSet pred = truth;
    pred.masks[2].reset();
    CHECK_THROWS_AS(shape_similarity_score(pred, truth), MeasureError);

    // absent in both: skipped, and the skip is visible in the result
    truth.masks[2].reset();
    const ShapeSimilarityScore score = shape_similarity_score(pred, truth);
    CHECK_FALSE(score.per_structure[2].has_value());
    CHECK(score.total == doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("per-structure terms stay in [0,1] for degraded predictions") {
    std::mt19937_64 rng(9);
    for (int trial = 0; trial < 10; ++trial) {
        const StructureSet truth = blob_structures(rng);
        StructureSet pred;
        for (int i = 0; i < 4; ++i) pred.masks[i] = testsupport::random_blob(rng, 64, 64);
        const ShapeSimilarityScore score = shape_similarity_score(pred, truth);
        double total = 0.0;
        for (const auto& v : score.per_structure) {
            REQUIRE(v.has_value());
            CHECK(*v >= 0.0);
            CHECK(*v <= 1.0);
            total += *v;
        }
        CHECK(score.total == doctest::Approx(total));
        CHECK(score.total <= 4.0);
    }
}
