#include "mrct/image.hpp"

#include <png.h>

#include <cmath>
#include <cstring>
#include <fstream>
#include <iterator>
#include <string>

#include "mrct/error.hpp"

namespace mrct {

ImagePlane::ImagePlane(std::size_t width, std::size_t height, std::vector<double> pixels,
                       double range)
    : width_(width), height_(height), range_(range), pixels_(std::move(pixels)) {
    if (width_ == 0 || height_ == 0) throw Error("image: zero-area image");
    if (pixels_.size() != width_ * height_)
        throw Error("image: pixel count " + std::to_string(pixels_.size()) + " does not match " +
                    std::to_string(width_) + "x" + std::to_string(height_));
    if (!(range_ > 0.0) || !std::isfinite(range_)) throw Error("image: range must be positive");
    for (double v : pixels_)
        if (!(v >= 0.0 && v <= range_))
            throw Error("image: pixel value " + std::to_string(v) + " outside [0, " +
                        std::to_string(range_) + "]");
}

ImagePlane ImagePlane::filled(std::size_t width, std::size_t height, double value, double range) {
    return ImagePlane(width, height, std::vector<double>(width * height, value), range);
}

namespace {

constexpr std::uint8_t kSignature[8] = {0x89, 'P', 'N', 'G', '\r', '\n', 0x1A, '\n'};

std::uint32_t read_be32(const std::uint8_t* p) {
    return (std::uint32_t{p[0]} << 24) | (std::uint32_t{p[1]} << 16) |
           (std::uint32_t{p[2]} << 8) | std::uint32_t{p[3]};
}

struct PngImageGuard {
    png_image* image;
    ~PngImageGuard() { png_image_free(image); }
};

}  // namespace

ImagePlane decode_png(std::span<const std::uint8_t> bytes) {
    // Signature (8) + IHDR length/type (8) + IHDR payload (13).
    if (bytes.size() < 29 || std::memcmp(bytes.data(), kSignature, 8) != 0)
        throw Error("image: not a PNG file");
    if (std::memcmp(bytes.data() + 12, "IHDR", 4) != 0)
        throw Error("image: corrupt PNG (missing IHDR)");

    const std::uint32_t width = read_be32(bytes.data() + 16);
    const std::uint32_t height = read_be32(bytes.data() + 20);
    const int bit_depth = bytes[24];
    const int color_type = bytes[25];
    if (width == 0 || height == 0) throw Error("image: zero-area image");
    if (bit_depth != 8) throw Error("image: unsupported bit depth " + std::to_string(bit_depth));
    const bool rgb = color_type == PNG_COLOR_TYPE_RGB;
    if (color_type != PNG_COLOR_TYPE_GRAY && !rgb)
        throw Error("image: unsupported color type " + std::to_string(color_type) +
                    " (expected 8-bit grayscale or RGB)");

    png_image image;
    std::memset(&image, 0, sizeof image);
    image.version = PNG_IMAGE_VERSION;
    PngImageGuard guard{&image};
    if (!png_image_begin_read_from_memory(&image, bytes.data(), bytes.size()))
        throw Error(std::string("image: unreadable PNG: ") + image.message);

    image.format = rgb ? PNG_FORMAT_RGB : PNG_FORMAT_GRAY;
    std::vector<std::uint8_t> raw(PNG_IMAGE_SIZE(image));
    if (!png_image_finish_read(&image, nullptr, raw.data(), 0, nullptr))
        throw Error(std::string("image: corrupt PNG: ") + image.message);

    const std::size_t n = std::size_t{image.width} * image.height;
    std::vector<double> pixels(n);
    if (rgb) {
        for (std::size_t i = 0; i < n; ++i)
            pixels[i] = to_luma(raw[3 * i], raw[3 * i + 1], raw[3 * i + 2]);
    } else {
        for (std::size_t i = 0; i < n; ++i) pixels[i] = raw[i];
    }
    return ImagePlane(image.width, image.height, std::move(pixels), 255.0);
}

ImagePlane load_image(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("image: cannot open '" + path.string() + "'");
    std::vector<std::uint8_t> bytes{std::istreambuf_iterator<char>(in),
                                    std::istreambuf_iterator<char>()};
    try {
        return decode_png(bytes);
    } catch (const Error& e) {
        throw Error(std::string(e.what()) + " ['" + path.string() + "']");
    }
}

std::vector<std::uint8_t> encode_png(const ImagePlane& plane) {
    if (plane.range() != 255.0) throw Error("image: only range-255 planes can be encoded as PNG");
    std::vector<std::uint8_t> raw(plane.size());
    const auto px = plane.pixels();
    for (std::size_t i = 0; i < raw.size(); ++i)
        raw[i] = static_cast<std::uint8_t>(std::lround(px[i]));

    png_image image;
    std::memset(&image, 0, sizeof image);
    image.version = PNG_IMAGE_VERSION;
    image.width = static_cast<png_uint_32>(plane.width());
    image.height = static_cast<png_uint_32>(plane.height());
    image.format = PNG_FORMAT_GRAY;

    png_alloc_size_t size = 0;
    if (!png_image_write_to_memory(&image, nullptr, &size, 0, raw.data(), 0, nullptr))
        throw Error(std::string("image: PNG encode failed: ") + image.message);
    std::vector<std::uint8_t> out(size);
    if (!png_image_write_to_memory(&image, out.data(), &size, 0, raw.data(), 0, nullptr))
        throw Error(std::string("image: PNG encode failed: ") + image.message);
    out.resize(size);
    return out;
}

void save_png(const ImagePlane& plane, const std::filesystem::path& path) {
    const auto bytes = encode_png(plane);
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("image: cannot write '" + path.string() + "'");
    out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
    if (!out) throw Error("image: write failed for '" + path.string() + "'");
}

}  // namespace mrct
