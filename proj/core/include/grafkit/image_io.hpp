#pragma once

#include <cstddef>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>

#include <grafkit/mask.hpp>

namespace grafkit {

/// Decodes an encoded raster image (PNG, or PGM P5/P2) into a mask.
/// Any color type is converted to 8-bit grayscale first; a pixel is
/// foreground iff its intensity is strictly greater than `threshold`.
/// Throws DecodeError on malformed input, DimensionError on zero-size images,
/// DomainError when threshold is outside [0, 255].
BinaryMask decode_mask(std::span<const std::byte> bytes, int threshold = 127);

/// Convenience: read the file at `path` and decode it.
BinaryMask decode_mask_file(const std::filesystem::path& path, int threshold = 127);

/// Encodes a mask as an 8-bit grayscale PNG (foreground = 255, background = 0).
std::string encode_png(const BinaryMask& mask);

/// Decodes run-length text: whitespace-separated run lengths alternating
/// background/foreground in row-major order, starting with background.
/// Throws DecodeError when runs are malformed or do not sum to width*height.
BinaryMask decode_rle(std::string_view text, int width, int height);

/// Canonical run-length form: starts with the background run (possibly "0"),
/// no interior zero runs, runs sum to width*height.
std::string encode_rle(const BinaryMask& mask);

} // namespace grafkit
