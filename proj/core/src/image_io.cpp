#include <grafkit/image_io.hpp>

#include <png.h>

#include <cctype>
#include <charconv>
#include <csetjmp>
#include <cstring>
#include <fstream>
#include <memory>
#include <sstream>
#include <vector>

namespace grafkit {

namespace {

struct MemoryReader {
    const unsigned char* data;
    std::size_t size;
    std::size_t offset;
};

void png_read_from_memory(png_structp png, png_bytep out, png_size_t count) {
    auto* r = static_cast<MemoryReader*>(png_get_io_ptr(png));
    if (r->offset + count > r->size) {
        png_error(png, "read past end of buffer");
    }
    std::memcpy(out, r->data + r->offset, count);
    r->offset += count;
}

void png_write_to_string(png_structp png, png_bytep data, png_size_t count) {
    auto* s = static_cast<std::string*>(png_get_io_ptr(png));
    s->append(reinterpret_cast<const char*>(data), count);
}

void png_flush_noop(png_structp) {}

[[noreturn]] void png_error_to_exception(png_structp png, png_const_charp msg) {
    (void)png;
    throw DecodeError(std::string("png: ") + msg);
}

void png_warning_ignore(png_structp, png_const_charp) {}

// Decodes any PNG to 8-bit grayscale intensities.
std::vector<std::uint8_t> decode_png_gray(std::span<const std::byte> bytes,
                                          int& width, int& height) {
    png_structp png = png_create_read_struct(PNG_LIBPNG_VER_STRING, nullptr,
                                             png_error_to_exception, png_warning_ignore);
    if (!png) throw DecodeError("png: failed to allocate read struct");
    png_infop info = png_create_info_struct(png);
    if (!info) {
        png_destroy_read_struct(&png, nullptr, nullptr);
        throw DecodeError("png: failed to allocate info struct");
    }

    MemoryReader reader{reinterpret_cast<const unsigned char*>(bytes.data()), bytes.size(), 0};
    std::vector<std::uint8_t> pixels;
    try {
        png_set_read_fn(png, &reader, png_read_from_memory);
        png_read_info(png, info);

        width = static_cast<int>(png_get_image_width(png, info));
        height = static_cast<int>(png_get_image_height(png, info));
        const png_byte color = png_get_color_type(png, info);
        const png_byte depth = png_get_bit_depth(png, info);

        if (color == PNG_COLOR_TYPE_PALETTE) png_set_palette_to_rgb(png);
        if (color == PNG_COLOR_TYPE_GRAY && depth < 8) png_set_expand_gray_1_2_4_to_8(png);
        if (depth == 16) png_set_strip_16(png);
        if (color & PNG_COLOR_MASK_ALPHA) png_set_strip_alpha(png);
        if (color == PNG_COLOR_TYPE_RGB || color == PNG_COLOR_TYPE_RGB_ALPHA ||
            color == PNG_COLOR_TYPE_PALETTE) {
            png_set_rgb_to_gray_fixed(png, 1, -1, -1);
        }
        png_read_update_info(png, info);

        pixels.resize(static_cast<std::size_t>(width) * height);
        std::vector<png_bytep> rows(height);
        for (int y = 0; y < height; ++y) {
            rows[y] = pixels.data() + static_cast<std::size_t>(y) * width;
        }
        png_read_image(png, rows.data());
        png_read_end(png, nullptr);
    } catch (...) {
        png_destroy_read_struct(&png, &info, nullptr);
        throw;
    }
    png_destroy_read_struct(&png, &info, nullptr);
    return pixels;
}

struct PgmParser {
    std::span<const std::byte> bytes;
    std::size_t pos = 0;

    int byte_at(std::size_t i) const { return static_cast<unsigned char>(bytes[i]); }

    void skip_space_and_comments() {
        while (pos < bytes.size()) {
            const int c = byte_at(pos);
            if (c == '#') {
                while (pos < bytes.size() && byte_at(pos) != '\n') ++pos;
            } else if (std::isspace(c)) {
                ++pos;
            } else {
                break;
            }
        }
    }

    long next_int() {
        skip_space_and_comments();
        long v = 0;
        bool any = false;
        while (pos < bytes.size() && std::isdigit(byte_at(pos))) {
            v = v * 10 + (byte_at(pos) - '0');
            ++pos;
            any = true;
        }
        if (!any) throw DecodeError("pgm: expected integer in header");
        return v;
    }
};

// Decodes PGM (P5 binary / P2 ascii) to 8-bit grayscale. 16-bit samples are
// reduced by taking the high byte, matching the PNG 16-bit path.
std::vector<std::uint8_t> decode_pgm_gray(std::span<const std::byte> bytes,
                                          int& width, int& height) {
    PgmParser p{bytes};
    const bool binary = (p.byte_at(1) == '5');
    p.pos = 2;
    const long w = p.next_int();
    const long h = p.next_int();
    const long maxval = p.next_int();
    if (maxval < 1 || maxval > 65535) throw DecodeError("pgm: bad maxval");
    width = static_cast<int>(w);
    height = static_cast<int>(h);
    if (w <= 0 || h <= 0) {
        throw DimensionError("pgm: zero-dimension image");
    }

    const std::size_t count = static_cast<std::size_t>(w) * h;
    std::vector<std::uint8_t> pixels(count);
    if (binary) {
        ++p.pos; // single whitespace after maxval
        const int sampleBytes = maxval > 255 ? 2 : 1;
        if (p.pos + count * sampleBytes > bytes.size()) {
            throw DecodeError("pgm: truncated pixel data");
        }
        for (std::size_t i = 0; i < count; ++i) {
            if (sampleBytes == 1) {
                pixels[i] = static_cast<std::uint8_t>(p.byte_at(p.pos + i));
            } else {
                pixels[i] = static_cast<std::uint8_t>(p.byte_at(p.pos + 2 * i));
            }
        }
    } else {
        for (std::size_t i = 0; i < count; ++i) {
            const long v = p.next_int();
            if (v > maxval) throw DecodeError("pgm: sample exceeds maxval");
            pixels[i] = maxval > 255 ? static_cast<std::uint8_t>(v >> 8)
                                     : static_cast<std::uint8_t>(v);
        }
    }
    return pixels;
}

} // namespace

BinaryMask decode_mask(std::span<const std::byte> bytes, int threshold) {
    if (threshold < 0 || threshold > 255) {
        throw DomainError("decode_mask: threshold must lie in [0, 255]");
    }
    if (bytes.size() < 8) throw DecodeError("decode_mask: input too short");

    static const unsigned char kPngSig[8] = {0x89, 'P', 'N', 'G', 0x0D, 0x0A, 0x1A, 0x0A};
    const bool isPng = std::memcmp(bytes.data(), kPngSig, 8) == 0;
    const bool isPgm = static_cast<unsigned char>(bytes[0]) == 'P' &&
                       (static_cast<unsigned char>(bytes[1]) == '5' ||
                        static_cast<unsigned char>(bytes[1]) == '2');
    if (!isPng && !isPgm) {
        throw DecodeError("decode_mask: unrecognized image format (expected PNG or PGM)");
    }

    int width = 0, height = 0;
    std::vector<std::uint8_t> gray = isPng ? decode_png_gray(bytes, width, height)
                                           : decode_pgm_gray(bytes, width, height);
    if (width < 1 || height < 1) {
        throw DimensionError("decode_mask: zero-dimension image");
    }

    std::vector<std::uint8_t> bits(gray.size());
    for (std::size_t i = 0; i < gray.size(); ++i) {
        bits[i] = gray[i] > threshold ? 1 : 0;
    }
    return BinaryMask::from_bits(width, height, std::move(bits));
}

BinaryMask decode_mask_file(const std::filesystem::path& path, int threshold) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DecodeError("decode_mask_file: cannot open " + path.string());
    std::string data((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    return decode_mask(std::as_bytes(std::span<const char>(data.data(), data.size())),
                       threshold);
}

std::string encode_png(const BinaryMask& mask) {
    png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr,
                                              png_error_to_exception, png_warning_ignore);
    if (!png) throw DecodeError("png: failed to allocate write struct");
    png_infop info = png_create_info_struct(png);
    if (!info) {
        png_destroy_write_struct(&png, nullptr);
        throw DecodeError("png: failed to allocate info struct");
    }

    std::string out;
    try {
        png_set_write_fn(png, &out, png_write_to_string, png_flush_noop);
        png_set_IHDR(png, info, mask.width(), mask.height(), 8, PNG_COLOR_TYPE_GRAY,
                     PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT,
                     PNG_FILTER_TYPE_DEFAULT);
        png_write_info(png, info);

        std::vector<std::uint8_t> row(mask.width());
        for (int y = 0; y < mask.height(); ++y) {
            for (int x = 0; x < mask.width(); ++x) {
                row[x] = mask.at(x, y) ? 255 : 0;
            }
            png_write_row(png, row.data());
        }
        png_write_end(png, nullptr);
    } catch (...) {
        png_destroy_write_struct(&png, &info);
        throw;
    }
    png_destroy_write_struct(&png, &info);
    return out;
}

BinaryMask decode_rle(std::string_view text, int width, int height) {
    if (width < 1 || height < 1) {
        throw DimensionError("decode_rle: dimensions must be at least 1x1");
    }
    const std::size_t total = static_cast<std::size_t>(width) * height;
    std::vector<std::uint8_t> bits(total, 0);

    std::size_t cursor = 0;
    bool fg = false; // runs start with background
    std::size_t i = 0;
    while (i < text.size()) {
        while (i < text.size() && std::isspace(static_cast<unsigned char>(text[i]))) ++i;
        if (i >= text.size()) break;
        std::uint64_t run = 0;
        const char* first = text.data() + i;
        const char* last = text.data() + text.size();
        auto [ptr, ec] = std::from_chars(first, last, run);
        if (ec != std::errc() || ptr == first) {
            throw DecodeError("decode_rle: malformed run token");
        }
        i = static_cast<std::size_t>(ptr - text.data());
        if (cursor + run > total) {
            throw DecodeError("decode_rle: runs exceed width*height");
        }
        if (fg) {
            std::fill(bits.begin() + cursor, bits.begin() + cursor + run, 1);
        }
        cursor += run;
        fg = !fg;
    }
    if (cursor != total) {
        throw DecodeError("decode_rle: runs sum to " + std::to_string(cursor) +
                          ", expected " + std::to_string(total));
    }
    return BinaryMask::from_bits(width, height, std::move(bits));
}

std::string encode_rle(const BinaryMask& mask) {
    std::string out;
    bool fg = false;
    std::size_t run = 0;
    auto flush = [&]() {
        if (!out.empty()) out += ' ';
        out += std::to_string(run);
    };
    for (std::uint8_t b : mask.bits()) {
        const bool v = b != 0;
        if (v == fg) {
            ++run;
        } else {
            flush();
            fg = v;
            run = 1;
        }
    }
    flush();
    return out;
}

} // namespace grafkit
