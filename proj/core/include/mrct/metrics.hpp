#pragma once

#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "mrct/image.hpp"

namespace mrct::metrics {

/// Gaussian-window SSIM parameters. C1 = (k1 R)^2, C2 = (k2 R)^2.
struct SsimParams {
    int window_size = 11;
    double gaussian_sigma = 1.5;
    double k1 = 0.01;
    double k2 = 0.03;
};

/// Pixel-domain multi-scale VIF parameters.
///
/// Scale s (1-based) uses a Gaussian window of N_s = 2^(num_scales - s + 1) + 1
/// taps with sigma N_s / 5. Local statistics are taken in "same" mode with the
/// window renormalized over the in-bounds taps, so every scale of a plane of
/// side >= 2^num_scales is non-empty.
struct VifParams {
    int num_scales = 4;
    double noise_variance = 2.0;
    double eps = 1e-10;
};

/// One row of full-reference scores. Unselected metrics stay empty; an exact
/// match yields psnr_db = +infinity.
struct MetricRecord {
    std::optional<double> psnr_db;
    std::optional<double> ssim;
    std::optional<double> uqi;
    std::optional<double> vif;

    friend bool operator==(const MetricRecord&, const MetricRecord&) = default;
};

enum class Metric { PSNR, SSIM, UQI, VIF };

std::string_view to_string(Metric m);
std::optional<Metric> parse_metric(std::string_view name);

struct MetricSelection {
    bool psnr = true;
    bool ssim = true;
    bool uqi = true;
    bool vif = true;

    bool contains(Metric m) const;
    /// Comma-separated, case-insensitive list such as "psnr,ssim".
    static MetricSelection parse(std::string_view list);
};

double mse(const ImagePlane& a, const ImagePlane& b);

/// 10 log10(R^2 / MSE) in dB; +infinity when the planes are identical.
double psnr(const ImagePlane& a, const ImagePlane& b);

/// Mean SSIM over every valid (fully inside) window position, stride 1.
double ssim(const ImagePlane& a, const ImagePlane& b, const SsimParams& p = {});

/// Mean universal quality index over every valid window x window block,
/// stride 1. Windows with zero variance follow the degenerate rules:
/// both flat with equal means -> 1, both flat with different means -> the
/// luminance factor, exactly one flat -> 0.
double uqi(const ImagePlane& a, const ImagePlane& b, int window = 8);

/// Visual information fidelity of `distorted` against `reference`.
/// Throws mrct::Error if the reference carries no information.
double vif(const ImagePlane& reference, const ImagePlane& distorted, const VifParams& p = {});

/// Runs the selected metrics with `reference` as the pristine image.
MetricRecord compute(const ImagePlane& reference, const ImagePlane& distorted,
                     const MetricSelection& selection, const SsimParams& ssim_params = {},
                     const VifParams& vif_params = {});

namespace detail {

/// Normalized 1-D Gaussian taps (sum 1).
std::vector<double> gaussian_kernel(int size, double sigma);

/// Mean of the raw SSIM expression over valid windows with separable weights
/// `taps` (outer product forms the 2-D window). No degenerate-window handling.
double windowed_ssim(const ImagePlane& a, const ImagePlane& b, std::span<const double> taps,
                     double c1, double c2);

}  // namespace detail

}  // namespace mrct::metrics
