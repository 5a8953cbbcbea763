#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

namespace mrct {

/// Single-channel raster in native units. Every pixel lies in [0, range].
///
/// `range` is the maximum fluctuation of the source data type (255 for 8-bit
/// data). Metrics read it for PSNR's peak and SSIM's stabilizing constants.
class ImagePlane {
public:
    /// Throws mrct::Error if the dimensions are zero, the pixel count does not
    /// match, range is not positive, or any pixel is outside [0, range].
    ImagePlane(std::size_t width, std::size_t height, std::vector<double> pixels,
               double range = 255.0);

    /// Constant-valued plane.
    static ImagePlane filled(std::size_t width, std::size_t height, double value,
                             double range = 255.0);

    std::size_t width() const noexcept { return width_; }
    std::size_t height() const noexcept { return height_; }
    std::size_t size() const noexcept { return pixels_.size(); }
    double range() const noexcept { return range_; }

    double at(std::size_t x, std::size_t y) const noexcept { return pixels_[y * width_ + x]; }
    std::span<const double> pixels() const noexcept { return pixels_; }

    bool same_shape(const ImagePlane& other) const noexcept {
        return width_ == other.width_ && height_ == other.height_;
    }

    friend bool operator==(const ImagePlane&, const ImagePlane&) = default;

private:
    std::size_t width_;
    std::size_t height_;
    double range_;
    std::vector<double> pixels_;
};

/// ITU-R BT.601 luma.
constexpr double to_luma(double r, double g, double b) noexcept {
    return std::clamp(0.299 * r + 0.587 * g + 0.114 * b, 0.0, 255.0);
}

/// Loads an 8-bit grayscale or 8-bit RGB PNG. RGB pixels are collapsed with
/// to_luma. The returned plane has range 255.
ImagePlane load_image(const std::filesystem::path& path);

/// Decodes PNG bytes already in memory; same rules as load_image.
ImagePlane decode_png(std::span<const std::uint8_t> bytes);

/// Encodes the plane as an 8-bit grayscale PNG with no ancillary chunks.
/// Pixels are rounded to the nearest integer; the plane's range must be 255.
std::vector<std::uint8_t> encode_png(const ImagePlane& plane);

void save_png(const ImagePlane& plane, const std::filesystem::path& path);

}  // namespace mrct
