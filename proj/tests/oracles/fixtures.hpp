#pragma once

#include <stdlib.h>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <random>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "mrct/image.hpp"
#include "reference_metrics.hpp"

namespace fixtures {

/// Uniform integer pixels in [0, 255].
inline mrct::ImagePlane random_plane(std::size_t w, std::size_t h, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_int_distribution<int> dist(0, 255);
    std::vector<double> px(w * h);
    for (auto& p : px) p = dist(rng);
    return {w, h, std::move(px)};
}

/// `a` plus rounded Gaussian noise, clipped to [0, 255].
inline mrct::ImagePlane noisy(const mrct::ImagePlane& a, double sigma, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> noise(0.0, sigma);
    std::vector<double> px(a.pixels().begin(), a.pixels().end());
    for (auto& p : px) p = std::clamp(std::round(p + noise(rng)), 0.0, 255.0);
    return {a.width(), a.height(), std::move(px)};
}

/// Smooth texture: sum of a few random sinusoids, scaled into [20, 200].
inline mrct::ImagePlane texture(std::size_t w, std::size_t h, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    struct Wave { double fx, fy, phase; };
    std::vector<Wave> waves;
    for (int i = 0; i < 6; ++i) waves.push_back({u(rng) * 0.8, u(rng) * 0.8, u(rng) * 6.283});
    std::vector<double> px(w * h);
    for (std::size_t y = 0; y < h; ++y)
        for (std::size_t x = 0; x < w; ++x) {
            double s = 0.0;
            for (const auto& wv : waves)
                s += std::sin(wv.fx * static_cast<double>(x) + wv.fy * static_cast<double>(y) + wv.phase);
            px[y * w + x] = std::round(110.0 + 15.0 * s);
        }
    return {w, h, std::move(px)};
}

/// Gaussian blur with edge replication at the borders.
inline mrct::ImagePlane blur(const mrct::ImagePlane& a, double sigma) {
    const int half = static_cast<int>(std::ceil(3 * sigma));
    std::vector<double> k;
    double sum = 0.0;
    for (int i = -half; i <= half; ++i) {
        k.push_back(std::exp(-(i * i) / (2 * sigma * sigma)));
        sum += k.back();
    }
    for (double& t : k) t /= sum;
    const auto w = static_cast<long>(a.width());
    const auto h = static_cast<long>(a.height());
    auto px = [&](long x, long y) {
        return a.at(static_cast<std::size_t>(std::clamp(x, 0L, w - 1)),
                    static_cast<std::size_t>(std::clamp(y, 0L, h - 1)));
    };
    std::vector<double> out(a.size());
    for (long y = 0; y < h; ++y)
        for (long x = 0; x < w; ++x) {
            double s = 0.0;
            for (int j = -half; j <= half; ++j)
                for (int i = -half; i <= half; ++i)
                    s += k[static_cast<std::size_t>(i + half)] * k[static_cast<std::size_t>(j + half)] *
                         px(x + i, y + j);
            out[static_cast<std::size_t>(y * w + x)] = s;
        }
    return {a.width(), a.height(), std::move(out)};
}

inline mrct::ImagePlane scaled(const mrct::ImagePlane& a, double factor, double range = 255.0) {
    std::vector<double> px(a.pixels().begin(), a.pixels().end());
    for (auto& p : px) p *= factor;
    return {a.width(), a.height(), std::move(px), range};
}

inline oracle::Raster raster(const mrct::ImagePlane& p) {
    return {p.width(), p.height(), {p.pixels().begin(), p.pixels().end()}};
}

/// Fresh directory under the system temp dir, removed on destruction.
class TempDir {
public:
    TempDir() {
        std::string templ = (std::filesystem::temp_directory_path() / "mrct-test-XXXXXX").string();
        if (!mkdtemp(templ.data())) throw std::runtime_error("mkdtemp failed");
        path_ = templ;
    }
    ~TempDir() {
        std::error_code ec;
        std::filesystem::remove_all(path_, ec);
    }
    TempDir(const TempDir&) = delete;
    TempDir& operator=(const TempDir&) = delete;

    const std::filesystem::path& path() const { return path_; }
    std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

private:
    std::filesystem::path path_;
};

inline void write_file(const std::filesystem::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    out << text;
}

inline std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

/// PSNR averages of the eighteen donor models, MR to CT and CT to MR.
struct DonorPsnr {
    const char* model;
    double mr2ct;
    double ct2mr;
};

inline const std::vector<DonorPsnr>& donor_psnr() {
    static const std::vector<DonorPsnr> rows = {
        {"apple2orange", 28.63, 29.55},
        {"cityscapes_photo2label", 27.67, 27.61},
        {"cityscapes_label2photo", 27.61, 27.27},
        {"facades_label2photo", 28.36, 28.16},
        {"facades_photo2label", 27.67, 27.62},
        {"horse2zebra", 27.67, 29.30},
        {"iphone2dslr_flower", 30.98, 34.36},
        {"map2sat", 27.72, 27.77},
        {"monet2photo", 29.54, 33.49},
        {"orange2apple", 30.74, 31.02},
        {"sat2map", 26.82, 26.70},
        {"style_cezanne", 27.55, 28.22},
        {"style_monet", 27.56, 27.78},
        {"style_ukiyoe", 27.79, 27.54},
        {"style_vangogh", 27.80, 27.74},
        {"summer2winter_yosemite", 27.96, 30.16},
        {"winter2summer_yosemite", 29.22, 30.79},
        {"zebra2horse", 27.81, 27.88},
    };
    return rows;
}

}  // namespace fixtures
