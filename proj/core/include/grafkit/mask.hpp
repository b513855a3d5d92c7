#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <grafkit/errors.hpp>

namespace grafkit {

/// Row-major foreground/background raster for one anatomical structure.
///
/// Pixel (x, y) has x growing rightward and y growing downward, origin at the
/// top-left pixel. Coordinates used elsewhere in the library refer to pixel
/// centers, so pixel (x, y) is the point (x, y).
class BinaryMask {
public:
    BinaryMask(int width, int height, bool fill = false)
        : width_(width), height_(height) {
        if (width < 1 || height < 1) {
            throw DimensionError("mask dimensions must be at least 1x1, got " +
                                 std::to_string(width) + "x" + std::to_string(height));
        }
        bits_.assign(static_cast<std::size_t>(width) * height, fill ? 1 : 0);
    }

    static BinaryMask from_bits(int width, int height, std::vector<std::uint8_t> bits) {
        BinaryMask m(width, height);
        if (bits.size() != m.bits_.size()) {
            throw DimensionError("bit array size does not match mask dimensions");
        }
        m.bits_ = std::move(bits);
        for (auto& b : m.bits_) b = b ? 1 : 0;
        return m;
    }

    int width() const { return width_; }
    int height() const { return height_; }
    std::size_t size() const { return bits_.size(); }

    bool at(int x, int y) const { return bits_[index(x, y)] != 0; }
    void set(int x, int y, bool v) { bits_[index(x, y)] = v ? 1 : 0; }

    bool in_bounds(int x, int y) const {
        return x >= 0 && x < width_ && y >= 0 && y < height_;
    }

    /// Number of foreground pixels.
    std::size_t foreground_count() const {
        std::size_t n = 0;
        for (auto b : bits_) n += b;
        return n;
    }

    bool empty_foreground() const { return foreground_count() == 0; }

    bool same_size(const BinaryMask& other) const {
        return width_ == other.width_ && height_ == other.height_;
    }

    /// Horizontal mirror (x' = width - 1 - x).
    BinaryMask mirrored_x() const {
        BinaryMask out(width_, height_);
        for (int y = 0; y < height_; ++y) {
            for (int x = 0; x < width_; ++x) {
                out.bits_[out.index(width_ - 1 - x, y)] = bits_[index(x, y)];
            }
        }
        return out;
    }

    const std::vector<std::uint8_t>& bits() const { return bits_; }

    friend bool operator==(const BinaryMask& a, const BinaryMask& b) {
        return a.width_ == b.width_ && a.height_ == b.height_ && a.bits_ == b.bits_;
    }

private:
    std::size_t index(int x, int y) const {
        return static_cast<std::size_t>(y) * width_ + x;
    }

    int width_;
    int height_;
    std::vector<std::uint8_t> bits_;
};

/// The four key structures of the Graf standard plane.
enum class StructureId : int {
    flat_ilium = 0,
    lower_limb = 1,
    labrum = 2,
    co_junction = 3,
};

inline constexpr std::array<StructureId, 4> kAllStructures = {
    StructureId::flat_ilium, StructureId::lower_limb,
    StructureId::labrum, StructureId::co_junction};

const char* structure_name(StructureId id);

enum class Laterality { left, right };

/// Which pipeline produced a landmark coordinate.
enum class LandmarkSource { mask_derived, predicted, fused };

/// Sub-pixel image-frame position of one anatomical landmark.
struct LandmarkPoint {
    double x = 0.0;
    double y = 0.0;
    LandmarkSource source = LandmarkSource::predicted;
};

/// The three measurement landmarks, indexed 0 = bony rim, 1 = lower limb
/// point, 2 = labrum midpoint. Entries may be absent.
using PartialLandmarks = std::array<std::optional<LandmarkPoint>, 3>;

const char* landmark_name(int index);

/// One scene's structure masks in canonical (lateral = image-left) orientation.
///
/// All present masks share identical dimensions; `validate` enforces this.
/// `laterality` records the hip side the scene was acquired from; right-hip
/// scenes are mirrored at ingestion so geometry code sees one orientation.
struct StructureSet {
    std::array<std::optional<BinaryMask>, 4> masks;
    Laterality laterality = Laterality::left;

    const std::optional<BinaryMask>& mask(StructureId id) const {
        return masks[static_cast<int>(id)];
    }
    std::optional<BinaryMask>& mask(StructureId id) {
        return masks[static_cast<int>(id)];
    }

    const std::optional<BinaryMask>& flat_ilium() const { return masks[0]; }
    const std::optional<BinaryMask>& lower_limb() const { return masks[1]; }
    const std::optional<BinaryMask>& labrum() const { return masks[2]; }
    const std::optional<BinaryMask>& co_junction() const { return masks[3]; }

    /// Throws DimensionError if present masks disagree on size.
    void validate() const;
};

} // namespace grafkit
