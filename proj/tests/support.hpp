#pragma once

// Shared helpers for the test binaries. Everything here is deliberately
// independent of the library internals it checks: flood fill instead of the
// contour tracer, pairwise scans instead of distance transforms.

#include <atomic>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <random>
#include <string>
#include <unistd.h>
#include <vector>

#include <grafkit/mask.hpp>

namespace testsupport {

inline grafkit::BinaryMask mask_from_rows(const std::vector<std::string>& rows) {
    const int h = static_cast<int>(rows.size());
    const int w = static_cast<int>(rows.front().size());
    grafkit::BinaryMask m(w, h);
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            if (rows[y][x] == '#') m.set(x, y, true);
        }
    }
    return m;
}

/// Independent 8-connected component count by flood fill.
inline int flood_component_count(const grafkit::BinaryMask& m) {
    std::vector<char> seen(m.width() * static_cast<std::size_t>(m.height()), 0);
    std::vector<std::pair<int, int>> stack;
    int count = 0;
    for (int y = 0; y < m.height(); ++y) {
        for (int x = 0; x < m.width(); ++x) {
            const std::size_t idx = static_cast<std::size_t>(y) * m.width() + x;
            if (!m.at(x, y) || seen[idx]) continue;
            ++count;
            seen[idx] = 1;
            stack.push_back({x, y});
            while (!stack.empty()) {
                auto [cx, cy] = stack.back();
                stack.pop_back();
                for (int dy = -1; dy <= 1; ++dy) {
                    for (int dx = -1; dx <= 1; ++dx) {
                        const int nx = cx + dx, ny = cy + dy;
                        if (nx < 0 || ny < 0 || nx >= m.width() || ny >= m.height())
                            continue;
                        const std::size_t nidx =
                            static_cast<std::size_t>(ny) * m.width() + nx;
                        if (m.at(nx, ny) && !seen[nidx]) {
                            seen[nidx] = 1;
                            stack.push_back({nx, ny});
                        }
                    }
                }
            }
        }
    }
    return count;
}

/// Pairwise-scan Dice coefficient.
inline double brute_dsc(const grafkit::BinaryMask& x, const grafkit::BinaryMask& y) {
    std::size_t nx = 0, ny = 0, both = 0;
    for (int r = 0; r < x.height(); ++r) {
        for (int c = 0; c < x.width(); ++c) {
            const bool a = x.at(c, r), b = y.at(c, r);
            nx += a;
            ny += b;
            both += a && b;
        }
    }
    if (nx + ny == 0) return 1.0;
    return 2.0 * static_cast<double>(both) / static_cast<double>(nx + ny);
}

/// O(n^2) exact Hausdorff distance over foreground pixel sets.
inline double brute_hausdorff(const grafkit::BinaryMask& x, const grafkit::BinaryMask& y) {
    std::vector<std::pair<int, int>> px, py;
    for (int r = 0; r < x.height(); ++r) {
        for (int c = 0; c < x.width(); ++c) {
            if (x.at(c, r)) px.push_back({c, r});
            if (y.at(c, r)) py.push_back({c, r});
        }
    }
    auto directed = [](const auto& from, const auto& to) {
        double worst = 0.0;
        for (auto [fx, fy] : from) {
            double best = 1e300;
            for (auto [tx, ty] : to) {
                const double dx = fx - tx, dy = fy - ty;
                best = std::min(best, dx * dx + dy * dy);
            }
            worst = std::max(worst, best);
        }
        return worst;
    };
    return std::sqrt(std::max(directed(px, py), directed(py, px)));
}

inline grafkit::BinaryMask random_mask(std::mt19937_64& rng, int w, int h,
                                       double density) {
    grafkit::BinaryMask m(w, h);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            if (u(rng) < density) m.set(x, y, true);
        }
    }
    return m;
}

/// Star-convex blob with a smooth random radius profile; always one component.
inline grafkit::BinaryMask random_blob(std::mt19937_64& rng, int w, int h) {
    std::uniform_real_distribution<double> u(0.0, 1.0);
    const double cx = w * (0.35 + 0.3 * u(rng));
    const double cy = h * (0.35 + 0.3 * u(rng));
    const double r0 = std::min(w, h) * (0.18 + 0.10 * u(rng));
    const double a1 = 0.25 * u(rng), p1 = 6.28318 * u(rng);
    const double a2 = 0.15 * u(rng), p2 = 6.28318 * u(rng);
    grafkit::BinaryMask m(w, h);
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            const double dx = x - cx, dy = y - cy;
            const double theta = std::atan2(dy, dx);
            const double r = r0 * (1.0 + a1 * std::sin(theta + p1) +
                                   a2 * std::sin(2.0 * theta + p2));
            if (dx * dx + dy * dy <= r * r) m.set(x, y, true);
        }
    }
    return m;
}

inline grafkit::BinaryMask translate_mask(const grafkit::BinaryMask& m, int dx, int dy) {
    grafkit::BinaryMask out(m.width(), m.height());
    for (int y = 0; y < m.height(); ++y) {
        for (int x = 0; x < m.width(); ++x) {
            if (!m.at(x, y)) continue;
            const int nx = x + dx, ny = y + dy;
            if (out.in_bounds(nx, ny)) out.set(nx, ny, true);
        }
    }
    return out;
}

namespace tdist {

// Student-t density plus an adaptive-Simpson tail integral: the independent
// numerical oracle for two-sided p-values.
inline double pdf(double x, double df) {
    const double c = std::lgamma((df + 1.0) / 2.0) - std::lgamma(df / 2.0) -
                     0.5 * std::log(df * 3.14159265358979323846);
    return std::exp(c - 0.5 * (df + 1.0) * std::log1p(x * x / df));
}

inline double simpson(double a, double b, double fa, double fm, double fb) {
    return (b - a) / 6.0 * (fa + 4.0 * fm + fb);
}

inline double adaptive(double a, double b, double fa, double fm, double fb, double eps,
                       double whole, double df, int depth) {
    const double m = 0.5 * (a + b);
    const double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
    const double flm = pdf(lm, df), frm = pdf(rm, df);
    const double left = simpson(a, m, fa, flm, fm);
    const double right = simpson(m, b, fm, frm, fb);
    if (depth <= 0 || std::abs(left + right - whole) < 15.0 * eps) {
        return left + right + (left + right - whole) / 15.0;
    }
    return adaptive(a, m, fa, flm, fm, eps / 2.0, left, df, depth - 1) +
           adaptive(m, b, fm, frm, fb, eps / 2.0, right, df, depth - 1);
}

inline double two_sided_p(double t, double df) {
    const double hi = std::abs(t);
    if (hi == 0.0) return 1.0;
    const double fa = pdf(0.0, df), fb = pdf(hi, df), fm = pdf(0.5 * hi, df);
    const double integral =
        adaptive(0.0, hi, fa, fm, fb, 1e-10, simpson(0.0, hi, fa, fm, fb), df, 40);
    return 1.0 - 2.0 * integral;
}

} // namespace tdist

/// Unique scratch directory, removed on destruction.
class TempDir {
public:
    explicit TempDir(const std::string& tag) {
        static std::atomic<unsigned> counter{0};
        path_ = std::filesystem::temp_directory_path() /
                ("grafkit_test_" + tag + "_" + std::to_string(::getpid()) + "_" +
                 std::to_string(counter.fetch_add(1)));
        std::filesystem::create_directories(path_);
    }
    ~TempDir() {
        std::error_code ec;
        std::filesystem::remove_all(path_, ec);
    }
    const std::filesystem::path& path() const { return path_; }

private:
    std::filesystem::path path_;
};

} // namespace testsupport
