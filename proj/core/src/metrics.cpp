#include "mrct/metrics.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <limits>

#include "mrct/error.hpp"

namespace mrct::metrics {

namespace {

struct Grid {
    std::size_t w = 0;
    std::size_t h = 0;
    std::vector<double> v;

    double& operator()(std::size_t x, std::size_t y) { return v[y * w + x]; }
    double operator()(std::size_t x, std::size_t y) const { return v[y * w + x]; }
};

Grid to_grid(const ImagePlane& p) {
    return {p.width(), p.height(), std::vector<double>(p.pixels().begin(), p.pixels().end())};
}

Grid product(const Grid& a, const Grid& b) {
    Grid out{a.w, a.h, std::vector<double>(a.v.size())};
    for (std::size_t i = 0; i < a.v.size(); ++i) out.v[i] = a.v[i] * b.v[i];
    return out;
}

// Separable correlation keeping only positions where the window fits.
Grid filter_valid(const Grid& in, std::span<const double> taps) {
    const std::size_t n = taps.size();
    const std::size_t ow = in.w - n + 1;
    const std::size_t oh = in.h - n + 1;
    Grid rows{ow, in.h, std::vector<double>(ow * in.h)};
    for (std::size_t y = 0; y < in.h; ++y)
        for (std::size_t x = 0; x < ow; ++x) {
            double s = 0.0;
            for (std::size_t k = 0; k < n; ++k) s += taps[k] * in(x + k, y);
            rows(x, y) = s;
        }
    Grid out{ow, oh, std::vector<double>(ow * oh)};
    for (std::size_t y = 0; y < oh; ++y)
        for (std::size_t x = 0; x < ow; ++x) {
            double s = 0.0;
            for (std::size_t k = 0; k < n; ++k) s += taps[k] * rows(x, y + k);
            out(x, y) = s;
        }
    return out;
}

// Centered separable correlation with the same output size as the input. Taps
// falling outside the plane are dropped and the rest renormalized.
Grid filter_same(const Grid& in, std::span<const double> taps) {
    const auto n = static_cast<std::ptrdiff_t>(taps.size());
    const std::ptrdiff_t half = n / 2;
    auto pass = [&](const Grid& src, bool horizontal) {
        Grid out{src.w, src.h, std::vector<double>(src.v.size())};
        const auto extent = static_cast<std::ptrdiff_t>(horizontal ? src.w : src.h);
        for (std::size_t y = 0; y < src.h; ++y)
            for (std::size_t x = 0; x < src.w; ++x) {
                const auto centre = static_cast<std::ptrdiff_t>(horizontal ? x : y);
                double s = 0.0;
                double wsum = 0.0;
                for (std::ptrdiff_t k = 0; k < n; ++k) {
                    const std::ptrdiff_t pos = centre + k - half;
                    if (pos < 0 || pos >= extent) continue;
                    const auto p = static_cast<std::size_t>(pos);
                    s += taps[static_cast<std::size_t>(k)] * (horizontal ? src(p, y) : src(x, p));
                    wsum += taps[static_cast<std::size_t>(k)];
                }
                out(x, y) = s / wsum;
            }
        return out;
    };
    return pass(pass(in, true), false);
}

Grid downsample2(const Grid& in) {
    Grid out{(in.w + 1) / 2, (in.h + 1) / 2, {}};
    out.v.resize(out.w * out.h);
    for (std::size_t y = 0; y < out.h; ++y)
        for (std::size_t x = 0; x < out.w; ++x) out(x, y) = in(2 * x, 2 * y);
    return out;
}

void require_same_shape(const ImagePlane& a, const ImagePlane& b, const char* what) {
    if (!a.same_shape(b))
        throw Error(std::string(what) + ": dimension mismatch (" + std::to_string(a.width()) +
                    "x" + std::to_string(a.height()) + " vs " + std::to_string(b.width()) + "x" +
                    std::to_string(b.height()) + ")");
}

void require_window_fits(const ImagePlane& a, int window, const char* what) {
    if (window <= 0) throw Error(std::string(what) + ": window must be positive");
    const auto w = static_cast<std::size_t>(window);
    if (a.width() < w || a.height() < w)
        throw Error(std::string(what) + ": image smaller than window (" + std::to_string(window) +
                    ")");
}

}  // namespace

std::string_view to_string(Metric m) {
    switch (m) {
    case Metric::PSNR: return "psnr";
    case Metric::SSIM: return "ssim";
    case Metric::UQI: return "uqi";
    case Metric::VIF: return "vif";
    }
    return "";
}

std::optional<Metric> parse_metric(std::string_view name) {
    std::string lower(name);
    std::transform(lower.begin(), lower.end(), lower.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    for (Metric m : {Metric::PSNR, Metric::SSIM, Metric::UQI, Metric::VIF})
        if (to_string(m) == lower) return m;
    return std::nullopt;
}

bool MetricSelection::contains(Metric m) const {
    switch (m) {
    case Metric::PSNR: return psnr;
    case Metric::SSIM: return ssim;
    case Metric::UQI: return uqi;
    case Metric::VIF: return vif;
    }
    return false;
}

MetricSelection MetricSelection::parse(std::string_view list) {
    MetricSelection sel{false, false, false, false};
    std::size_t start = 0;
    while (start <= list.size()) {
        const std::size_t comma = std::min(list.find(',', start), list.size());
        const auto token = list.substr(start, comma - start);
        const auto m = parse_metric(token);
        if (!m) throw Error("unknown metric '" + std::string(token) + "'");
        switch (*m) {
        case Metric::PSNR: sel.psnr = true; break;
        case Metric::SSIM: sel.ssim = true; break;
        case Metric::UQI: sel.uqi = true; break;
        case Metric::VIF: sel.vif = true; break;
        }
        start = comma + 1;
    }
    return sel;
}

double mse(const ImagePlane& a, const ImagePlane& b) {
    require_same_shape(a, b, "mse");
    const auto pa = a.pixels();
    const auto pb = b.pixels();
    double sum = 0.0;
    for (std::size_t i = 0; i < pa.size(); ++i) {
        const double d = pa[i] - pb[i];
        sum += d * d;
    }
    return sum / static_cast<double>(pa.size());
}

double psnr(const ImagePlane& a, const ImagePlane& b) {
    require_same_shape(a, b, "psnr");
    if (a.range() != b.range()) throw Error("psnr: dynamic range mismatch");
    const double err = mse(a, b);
    if (err == 0.0) return std::numeric_limits<double>::infinity();
    return 10.0 * std::log10(a.range() * a.range() / err);
}

namespace detail {

std::vector<double> gaussian_kernel(int size, double sigma) {
    if (size <= 0 || size % 2 == 0) throw Error("gaussian window size must be odd and positive");
    if (!(sigma > 0.0)) throw Error("gaussian sigma must be positive");
    std::vector<double> taps(static_cast<std::size_t>(size));
    const int half = size / 2;
    double sum = 0.0;
    for (int i = 0; i < size; ++i) {
        const double d = i - half;
        taps[static_cast<std::size_t>(i)] = std::exp(-(d * d) / (2.0 * sigma * sigma));
        sum += taps[static_cast<std::size_t>(i)];
    }
    for (double& t : taps) t /= sum;
    return taps;
}

double windowed_ssim(const ImagePlane& a, const ImagePlane& b, std::span<const double> taps,
                     double c1, double c2) {
    require_same_shape(a, b, "ssim");
    require_window_fits(a, static_cast<int>(taps.size()), "ssim");
    const Grid x = to_grid(a);
    const Grid y = to_grid(b);
    const Grid mx = filter_valid(x, taps);
    const Grid my = filter_valid(y, taps);
    const Grid exx = filter_valid(product(x, x), taps);
    const Grid eyy = filter_valid(product(y, y), taps);
    const Grid exy = filter_valid(product(x, y), taps);

    double total = 0.0;
    for (std::size_t i = 0; i < mx.v.size(); ++i) {
        const double ux = mx.v[i];
        const double uy = my.v[i];
        const double vx = exx.v[i] - ux * ux;
        const double vy = eyy.v[i] - uy * uy;
        const double cxy = exy.v[i] - ux * uy;
        const double num = (2.0 * ux * uy + c1) * (2.0 * cxy + c2);
        const double den = (ux * ux + uy * uy + c1) * (vx + vy + c2);
        total += num / den;
    }
    return total / static_cast<double>(mx.v.size());
}

}  // namespace detail

double ssim(const ImagePlane& a, const ImagePlane& b, const SsimParams& p) {
    if (!(p.k1 > 0.0) || !(p.k2 > 0.0)) throw Error("ssim: k1 and k2 must be positive");
    if (a.range() != b.range()) throw Error("ssim: dynamic range mismatch");
    require_same_shape(a, b, "ssim");
    require_window_fits(a, p.window_size, "ssim");
    const auto taps = detail::gaussian_kernel(p.window_size, p.gaussian_sigma);
    const double c1 = (p.k1 * a.range()) * (p.k1 * a.range());
    const double c2 = (p.k2 * a.range()) * (p.k2 * a.range());
    return std::clamp(detail::windowed_ssim(a, b, taps, c1, c2), -1.0, 1.0);
}

double uqi(const ImagePlane& a, const ImagePlane& b, int window) {
    require_same_shape(a, b, "uqi");
    require_window_fits(a, window, "uqi");
    // Unit taps give raw window sums; for integer pixels every quantity below
    // is exact, so flat windows are detected without tolerance.
    const std::vector<double> ones(static_cast<std::size_t>(window), 1.0);
    const Grid x = to_grid(a);
    const Grid y = to_grid(b);
    const Grid sx = filter_valid(x, ones);
    const Grid sy = filter_valid(y, ones);
    const Grid sxx = filter_valid(product(x, x), ones);
    const Grid syy = filter_valid(product(y, y), ones);
    const Grid sxy = filter_valid(product(x, y), ones);
    const double n = static_cast<double>(window) * window;

    double total = 0.0;
    for (std::size_t i = 0; i < sx.v.size(); ++i) {
        // Scaled by n^2: var = n*Sxx - Sx^2, cov = n*Sxy - Sx*Sy.
        const double vx = std::max(0.0, n * sxx.v[i] - sx.v[i] * sx.v[i]);
        const double vy = std::max(0.0, n * syy.v[i] - sy.v[i] * sy.v[i]);
        const double cxy = n * sxy.v[i] - sx.v[i] * sy.v[i];
        const double lum_den = sx.v[i] * sx.v[i] + sy.v[i] * sy.v[i];
        double q;
        if (vx == 0.0 && vy == 0.0) {
            q = sx.v[i] == sy.v[i] ? 1.0 : 2.0 * sx.v[i] * sy.v[i] / lum_den;
        } else if (vx == 0.0 || vy == 0.0) {
            q = 0.0;
        } else if (lum_den == 0.0) {
            q = 0.0;
        } else {
            q = 4.0 * cxy * sx.v[i] * sy.v[i] / ((vx + vy) * lum_den);
        }
        total += q;
    }
    return std::clamp(total / static_cast<double>(sx.v.size()), -1.0, 1.0);
}

double vif(const ImagePlane& reference, const ImagePlane& distorted, const VifParams& p) {
    require_same_shape(reference, distorted, "vif");
    if (p.num_scales < 1) throw Error("vif: num_scales must be >= 1");
    if (!(p.noise_variance > 0.0)) throw Error("vif: noise variance must be positive");
    if (p.num_scales > 30) throw Error("vif: num_scales too large");
    const std::size_t min_side = std::size_t{1} << p.num_scales;
    if (reference.width() < min_side || reference.height() < min_side)
        throw Error("vif: image too small for " + std::to_string(p.num_scales) +
                    " scales (need side >= " + std::to_string(min_side) + ")");

    Grid ref = to_grid(reference);
    Grid dist = to_grid(distorted);
    double num = 0.0;
    double den = 0.0;
    for (int scale = 1; scale <= p.num_scales; ++scale) {
        const int taps_n = (1 << (p.num_scales - scale + 1)) + 1;
        const auto taps = detail::gaussian_kernel(taps_n, taps_n / 5.0);
        if (scale > 1) {
            ref = downsample2(filter_same(ref, taps));
            dist = downsample2(filter_same(dist, taps));
        }
        const Grid mu1 = filter_same(ref, taps);
        const Grid mu2 = filter_same(dist, taps);
        const Grid e11 = filter_same(product(ref, ref), taps);
        const Grid e22 = filter_same(product(dist, dist), taps);
        const Grid e12 = filter_same(product(ref, dist), taps);

        for (std::size_t i = 0; i < mu1.v.size(); ++i) {
            double s1 = std::max(0.0, e11.v[i] - mu1.v[i] * mu1.v[i]);
            const double s2 = std::max(0.0, e22.v[i] - mu2.v[i] * mu2.v[i]);
            const double s12 = e12.v[i] - mu1.v[i] * mu2.v[i];

            double g = s12 / (s1 + p.eps);
            double sv = s2 - g * s12;
            if (s1 < p.eps) {
                g = 0.0;
                sv = s2;
                s1 = 0.0;
            }
            if (s2 < p.eps) {
                g = 0.0;
                sv = 0.0;
            }
            if (g < 0.0) {
                sv = s2;
                g = 0.0;
            }
            sv = std::max(sv, p.eps);

            num += std::log2(1.0 + g * g * s1 / (sv + p.noise_variance));
            den += std::log2(1.0 + s1 / p.noise_variance);
        }
    }
    if (den == 0.0) throw Error("vif: reference carries no information");
    return num / den;
}

MetricRecord compute(const ImagePlane& reference, const ImagePlane& distorted,
                     const MetricSelection& selection, const SsimParams& ssim_params,
                     const VifParams& vif_params) {
    MetricRecord r;
    if (selection.psnr) r.psnr_db = psnr(reference, distorted);
    if (selection.ssim) r.ssim = ssim(reference, distorted, ssim_params);
    if (selection.uqi) r.uqi = uqi(reference, distorted);
    if (selection.vif) r.vif = vif(reference, distorted, vif_params);
    return r;
}

}  // namespace mrct::metrics
