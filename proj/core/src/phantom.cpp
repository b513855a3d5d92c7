#include <grafkit/phantom.hpp>

#include <algorithm>
#include <cmath>
#include <fstream>

#include <json.hpp>

#include <grafkit/geometry.hpp>
#include <grafkit/image_io.hpp>

#include "rng.hpp"

namespace grafkit {

namespace {

constexpr double kPi = 3.14159265358979323846;

struct Box {
    double x1, y1, x2, y2; // inclusive real bounds

    double sdf(double px, double py) const {
        const double cx = 0.5 * (x1 + x2), cy = 0.5 * (y1 + y2);
        const double hx = 0.5 * (x2 - x1), hy = 0.5 * (y2 - y1);
        const double qx = std::abs(px - cx) - hx;
        const double qy = std::abs(py - cy) - hy;
        const double ox = std::max(qx, 0.0), oy = std::max(qy, 0.0);
        return std::hypot(ox, oy) + std::min(std::max(qx, qy), 0.0);
    }
};

struct Disk {
    double cx, cy, r;

    double sdf(double px, double py) const { return std::hypot(px - cx, py - cy) - r; }
};

struct Capsule {
    double ax, ay, bx, by, r;

    double sdf(double px, double py) const {
        const double abx = bx - ax, aby = by - ay;
        const double apx = px - ax, apy = py - ay;
        const double t = std::clamp((apx * abx + apy * aby) / (abx * abx + aby * aby),
                                    0.0, 1.0);
        return std::hypot(apx - t * abx, apy - t * aby) - r;
    }
};

// Continuous-coordinate description of one phantom scene.
struct Layout {
    Box ilium;
    Box lower_limb;
    Disk labrum;
    Disk co_junction;
    Capsule bridge; // ilium-to-lower-limb connection in fused mode
    Point2D p1, p2, p3;
};

Layout plan_layout(const PhantomSpec& spec) {
    const double W = spec.canvas_width;
    const double H = spec.canvas_height;
    const double alpha = spec.alpha_true * kPi / 180.0;
    const double beta = spec.beta_true * kPi / 180.0;

    Layout l;
    // Integer-aligned ilium band: its raster lateral edge is an exact column
    // and the bony rim an exact pixel, so the noiseless base line is exact.
    const double x0 = std::round(0.30 * W);
    const double yTop = std::round(0.12 * H);
    const double yRim = std::round(0.50 * H);
    const double thick = std::max(2.0, std::round(spec.ilium_thickness *
                                                  spec.structure_scales[0]));
    l.ilium = Box{x0, yTop, x0 + thick, yRim};
    l.p1 = {x0, yRim};

    // Lower limb: top-left corner on the roof ray from the rim, at alpha from
    // the vertical base line.
    const double roofLen = 0.32 * H;
    l.p2 = {x0 + roofLen * std::sin(alpha), yRim + roofLen * std::cos(alpha)};
    const double llw = 0.080 * H * spec.structure_scales[1];
    const double llh = 0.055 * H * spec.structure_scales[1];
    l.lower_limb = Box{l.p2.x, l.p2.y, l.p2.x + llw, l.p2.y + llh};

    // Labrum: disk centered on the cartilage-roof ray, superior-medial of the
    // rim, at beta from the base line.
    const double labLen = 0.26 * H;
    l.p3 = {x0 + labLen * std::sin(beta), yRim - labLen * std::cos(beta)};
    l.labrum = Disk{l.p3.x, l.p3.y, 0.030 * H * spec.structure_scales[2]};

    l.co_junction = Disk{l.p2.x + 0.12 * H, l.p2.y + 0.01 * H,
                         0.025 * H * spec.structure_scales[3]};

    l.bridge = Capsule{l.p1.x, l.p1.y, l.p2.x, l.p2.y, std::max(1.5, 0.4 * thick)};
    return l;
}

void require_inside(double x1, double y1, double x2, double y2, double margin,
                    const PhantomSpec& spec, const char* what) {
    if (x1 - margin < 0.0 || y1 - margin < 0.0 ||
        x2 + margin > spec.canvas_width - 1.0 || y2 + margin > spec.canvas_height - 1.0) {
        throw InfeasibleSpecError(std::string("phantom: ") + what +
                                  " does not fit the canvas");
    }
}

void validate_spec(const PhantomSpec& spec) {
    if (spec.alpha_true < 40.0 || spec.alpha_true > 80.0) {
        throw DomainError("phantom: alpha_true must lie in [40, 80] degrees");
    }
    if (spec.beta_true < 30.0 || spec.beta_true > 90.0) {
        throw DomainError("phantom: beta_true must lie in [30, 90] degrees");
    }
    if (spec.canvas_width < 128 || spec.canvas_height < 128) {
        throw DomainError("phantom: canvas must be at least 128x128");
    }
    if (spec.noise.dropout_fraction < 0.0 || spec.noise.dropout_fraction >= 0.5) {
        throw DomainError("phantom: dropout_fraction must lie in [0, 0.5)");
    }
    if (spec.noise.edge_jitter_px < 0.0 || spec.noise.landmark_jitter_px < 0.0) {
        throw DomainError("phantom: jitter amplitudes must be non-negative");
    }
    for (double s : spec.structure_scales) {
        if (s <= 0.0) throw DomainError("phantom: structure scales must be positive");
    }
}

// Correlated boundary noise: smoothstep-interpolated value noise on a coarse
// lattice, hashed per (seed, structure, node).
double value_noise(std::uint64_t seed, int structure, double x, double y) {
    constexpr double kStep = 9.0;
    const double gx = x / kStep, gy = y / kStep;
    const auto ix = static_cast<std::int64_t>(std::floor(gx));
    const auto iy = static_cast<std::int64_t>(std::floor(gy));
    auto node = [&](std::int64_t nx, std::int64_t ny) {
        std::uint64_t h = detail::hash_combine(seed, 0x5157u + structure);
        h = detail::hash_combine(h, static_cast<std::uint64_t>(nx) * 2654435761ULL);
        h = detail::hash_combine(h, static_cast<std::uint64_t>(ny) * 40503ULL);
        return 2.0 * (static_cast<double>(h >> 11) * 0x1.0p-53) - 1.0;
    };
    auto fade = [](double t) { return t * t * (3.0 - 2.0 * t); };
    const double tx = fade(gx - ix), ty = fade(gy - iy);
    const double a = node(ix, iy), b = node(ix + 1, iy);
    const double c = node(ix, iy + 1), dd = node(ix + 1, iy + 1);
    return (a + (b - a) * tx) + ((c + (dd - c) * tx) - (a + (b - a) * tx)) * ty;
}

template <typename Sdf>
BinaryMask rasterize(const PhantomSpec& spec, int structure, const Sdf& sdf,
                     double jitter) {
    BinaryMask mask(spec.canvas_width, spec.canvas_height);
    for (int y = 0; y < spec.canvas_height; ++y) {
        for (int x = 0; x < spec.canvas_width; ++x) {
            double limit = 0.0;
            if (jitter > 0.0) {
                limit = jitter * value_noise(spec.seed, structure, x, y);
            }
            if (sdf(static_cast<double>(x), static_cast<double>(y)) <= limit) {
                mask.set(x, y, true);
            }
        }
    }
    return mask;
}

// Deletes a contiguous band along the traced boundary of the largest
// component, at most one pixel deep around each selected boundary pixel.
void apply_dropout(BinaryMask& mask, double fraction, std::uint64_t seed, int structure) {
    if (fraction <= 0.0 || mask.empty_foreground()) return;
    const Contour boundary = extract_contours(mask).front();
    const std::size_t len = boundary.points.size();
    const std::size_t count = static_cast<std::size_t>(std::ceil(fraction * len));
    if (count == 0) return;
    detail::Rng rng(detail::hash_combine(seed, 0xD307u + structure));
    const std::size_t start = rng.uniform_index(len);
    for (std::size_t k = 0; k < count; ++k) {
        const Point2D& p = boundary.points[(start + k) % len];
        const int px = static_cast<int>(p.x);
        const int py = static_cast<int>(p.y);
        for (int dy = -1; dy <= 1; ++dy) {
            for (int dx = -1; dx <= 1; ++dx) {
                if (mask.in_bounds(px + dx, py + dy)) mask.set(px + dx, py + dy, false);
            }
        }
    }
}

LandmarkPoint jittered(Point2D p, detail::Rng& rng, double sigma, const PhantomSpec& spec) {
    double x = p.x, y = p.y;
    if (sigma > 0.0) {
        x += sigma * rng.normal();
        y += sigma * rng.normal();
    }
    x = std::clamp(x, 0.0, spec.canvas_width - 1.0);
    y = std::clamp(y, 0.0, spec.canvas_height - 1.0);
    return {x, y, LandmarkSource::predicted};
}

} // namespace

PhantomScene generate(const PhantomSpec& spec) {
    validate_spec(spec);
    const Layout l = plan_layout(spec);

    const double margin = 2.0 + 3.0 * spec.noise.edge_jitter_px;
    require_inside(l.ilium.x1, l.ilium.y1, l.ilium.x2, l.ilium.y2, margin, spec, "flat ilium");
    require_inside(l.lower_limb.x1, l.lower_limb.y1, l.lower_limb.x2, l.lower_limb.y2,
                   margin, spec, "lower limb");
    require_inside(l.labrum.cx - l.labrum.r, l.labrum.cy - l.labrum.r,
                   l.labrum.cx + l.labrum.r, l.labrum.cy + l.labrum.r, margin, spec,
                   "labrum");
    require_inside(l.co_junction.cx - l.co_junction.r, l.co_junction.cy - l.co_junction.r,
                   l.co_junction.cx + l.co_junction.r, l.co_junction.cy + l.co_junction.r,
                   margin, spec, "CO junction");

    PhantomScene scene;
    scene.alpha_true = spec.alpha_true;
    scene.beta_true = spec.beta_true;
    scene.provenance = spec;

    auto iliumSdf = [&](double x, double y) { return l.ilium.sdf(x, y); };
    auto fusedSdf = [&](double x, double y) {
        return std::min({l.ilium.sdf(x, y), l.lower_limb.sdf(x, y), l.bridge.sdf(x, y)});
    };
    auto llSdf = [&](double x, double y) { return l.lower_limb.sdf(x, y); };
    auto labSdf = [&](double x, double y) { return l.labrum.sdf(x, y); };
    auto coSdf = [&](double x, double y) { return l.co_junction.sdf(x, y); };

    scene.truth_structures.masks[0] = rasterize(spec, 0, iliumSdf, 0.0);
    scene.truth_structures.masks[1] = rasterize(spec, 1, llSdf, 0.0);
    scene.truth_structures.masks[2] = rasterize(spec, 2, labSdf, 0.0);
    scene.truth_structures.masks[3] = rasterize(spec, 3, coSdf, 0.0);

    const double jit = spec.noise.edge_jitter_px;
    const bool clean = jit == 0.0 && spec.noise.dropout_fraction == 0.0;
    if (clean && !spec.fuse_ilium_lower_limb) {
        scene.structures = scene.truth_structures;
    } else {
        if (spec.fuse_ilium_lower_limb) {
            scene.structures.masks[0] = rasterize(spec, 0, fusedSdf, jit);
        } else {
            scene.structures.masks[0] = rasterize(spec, 0, iliumSdf, jit);
        }
        scene.structures.masks[1] = rasterize(spec, 1, llSdf, jit);
        scene.structures.masks[2] = rasterize(spec, 2, labSdf, jit);
        scene.structures.masks[3] = rasterize(spec, 3, coSdf, jit);
        for (int s = 0; s < 4; ++s) {
            apply_dropout(*scene.structures.masks[s], spec.noise.dropout_fraction,
                          spec.seed, s);
        }
    }

    scene.landmarks_truth = {
        LandmarkPoint{l.p1.x, l.p1.y, LandmarkSource::mask_derived},
        LandmarkPoint{l.p2.x, l.p2.y, LandmarkSource::mask_derived},
        LandmarkPoint{l.p3.x, l.p3.y, LandmarkSource::mask_derived}};

    detail::Rng rng(detail::hash_combine(spec.seed, 0x1A3Du));
    scene.predicted_landmarks = {
        jittered(l.p1, rng, spec.noise.landmark_jitter_px, spec),
        jittered(l.p2, rng, spec.noise.landmark_jitter_px, spec),
        jittered(l.p3, rng, spec.noise.landmark_jitter_px, spec)};
    return scene;
}

std::vector<PhantomScene> generate_batch(int n, const AngleRange& angles,
                                         const PhantomSpec& base, std::uint64_t seed) {
    if (n < 1) throw DomainError("generate_batch: need n >= 1");
    std::vector<PhantomScene> scenes;
    scenes.reserve(n);
    for (int i = 0; i < n; ++i) {
        detail::Rng rng(detail::hash_combine(seed, static_cast<std::uint64_t>(i)));
        PhantomSpec spec = base;
        spec.alpha_true = rng.uniform(angles.alpha_min, angles.alpha_max);
        spec.beta_true = rng.uniform(angles.beta_min, angles.beta_max);
        spec.seed = detail::hash_combine(seed, 0xABCD0000ULL + i);
        PhantomScene scene = generate(spec);
        char id[32];
        std::snprintf(id, sizeof(id), "phantom-%04d", i);
        scene.scene_id = id;
        scenes.push_back(std::move(scene));
    }
    return scenes;
}

std::filesystem::path write_dataset(const std::vector<PhantomScene>& scenes,
                                    const std::filesystem::path& directory,
                                    const DatasetOptions& options) {
    namespace fs = std::filesystem;
    using nlohmann::json;
    fs::create_directories(directory / "masks");

    auto write_mask = [&](const BinaryMask& mask, const std::string& name) {
        const std::string bytes = encode_png(mask);
        std::ofstream out(directory / "masks" / name, std::ios::binary);
        if (!out) throw Error("write_dataset: cannot write " + name);
        out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
        return std::string("masks/") + name;
    };

    std::ofstream manifest(directory / "manifest.jsonl");
    if (!manifest) throw Error("write_dataset: cannot write manifest.jsonl");

    static constexpr const char* kStructKeys[4] = {"s1", "s2", "s3", "s4"};
    static constexpr const char* kPredKeys[3] = {"pk1", "pk2", "pk3"};
    static constexpr const char* kGtPointKeys[3] = {"p1", "p2", "p3"};

    for (const PhantomScene& scene : scenes) {
        json rec;
        rec["scene_id"] = scene.scene_id;
        rec["width"] = scene.provenance.canvas_width;
        rec["height"] = scene.provenance.canvas_height;
        rec["laterality"] = "left";
        for (int s = 0; s < 4; ++s) {
            rec[kStructKeys[s]] = {
                {"png", write_mask(*scene.structures.masks[s],
                                   scene.scene_id + "_" + kStructKeys[s] + ".png")}};
        }
        for (int i = 0; i < 3; ++i) {
            const LandmarkPoint& p = scene.predicted_landmarks[i];
            rec[kPredKeys[i]] = {p.x, p.y};
        }
        if (options.include_ground_truth) {
            json gt;
            for (int s = 0; s < 4; ++s) {
                gt[kStructKeys[s]] = {
                    {"png", write_mask(*scene.truth_structures.masks[s],
                                       scene.scene_id + "_gt_" + kStructKeys[s] + ".png")}};
            }
            for (int i = 0; i < 3; ++i) {
                const LandmarkPoint& p = scene.landmarks_truth[i];
                gt[kGtPointKeys[i]] = {p.x, p.y};
            }
            if (options.include_truth_angles) {
                gt["alpha"] = scene.alpha_true;
                gt["beta"] = scene.beta_true;
            }
            rec["gt"] = std::move(gt);
        }
        manifest << rec.dump() << '\n';
    }
    return directory / "manifest.jsonl";
}

} // namespace grafkit
