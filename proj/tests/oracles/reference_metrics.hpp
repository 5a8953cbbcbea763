#pragma once

// Brute-force reference implementations used only by tests. Every statistic is
// taken directly over the window it belongs to with two-pass moments; nothing
// here shares code with the library.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <vector>

namespace oracle {

struct Raster {
    std::size_t w = 0;
    std::size_t h = 0;
    std::vector<double> v;

    double at(std::size_t x, std::size_t y) const { return v[y * w + x]; }
};

inline double mse(const Raster& a, const Raster& b) {
    double s = 0.0;
    for (std::size_t y = 0; y < a.h; ++y)
        for (std::size_t x = 0; x < a.w; ++x) {
            const double d = a.at(x, y) - b.at(x, y);
            s += d * d;
        }
    return s / static_cast<double>(a.w * a.h);
}

inline double psnr(const Raster& a, const Raster& b, double range = 255.0) {
    const double m = mse(a, b);
    if (m == 0.0) return std::numeric_limits<double>::infinity();
    return 10.0 * std::log10(range * range / m);
}

/// 2-D Gaussian weights over a size x size window, normalized to sum 1.
inline std::vector<double> gaussian_window(int size, double sigma) {
    std::vector<double> w(static_cast<std::size_t>(size * size));
    const double c = (size - 1) / 2.0;
    double sum = 0.0;
    for (int j = 0; j < size; ++j)
        for (int i = 0; i < size; ++i) {
            const double r2 = (i - c) * (i - c) + (j - c) * (j - c);
            w[static_cast<std::size_t>(j * size + i)] = std::exp(-r2 / (2.0 * sigma * sigma));
            sum += w[static_cast<std::size_t>(j * size + i)];
        }
    for (double& x : w) x /= sum;
    return w;
}

inline double ssim(const Raster& a, const Raster& b, double range = 255.0, int size = 11,
                   double sigma = 1.5) {
    const auto w = gaussian_window(size, sigma);
    const double c1 = (0.01 * range) * (0.01 * range);
    const double c2 = (0.03 * range) * (0.03 * range);
    const std::size_t n = static_cast<std::size_t>(size);
    double total = 0.0;
    std::size_t count = 0;
    for (std::size_t y0 = 0; y0 + n <= a.h; ++y0)
        for (std::size_t x0 = 0; x0 + n <= a.w; ++x0) {
            double ma = 0.0, mb = 0.0;
            for (std::size_t j = 0; j < n; ++j)
                for (std::size_t i = 0; i < n; ++i) {
                    ma += w[j * n + i] * a.at(x0 + i, y0 + j);
                    mb += w[j * n + i] * b.at(x0 + i, y0 + j);
                }
            double va = 0.0, vb = 0.0, cab = 0.0;
            for (std::size_t j = 0; j < n; ++j)
                for (std::size_t i = 0; i < n; ++i) {
                    const double da = a.at(x0 + i, y0 + j) - ma;
                    const double db = b.at(x0 + i, y0 + j) - mb;
                    va += w[j * n + i] * da * da;
                    vb += w[j * n + i] * db * db;
                    cab += w[j * n + i] * da * db;
                }
            total += ((2 * ma * mb + c1) * (2 * cab + c2)) /
                     ((ma * ma + mb * mb + c1) * (va + vb + c2));
            ++count;
        }
    return total / static_cast<double>(count);
}

/// Universal quality index of one window given its first and second moments.
inline double uqi_window(double ma, double mb, double va, double vb, double cab) {
    if (va == 0.0 && vb == 0.0) return ma == mb ? 1.0 : 2 * ma * mb / (ma * ma + mb * mb);
    if (va == 0.0 || vb == 0.0) return 0.0;
    if (ma * ma + mb * mb == 0.0) return 0.0;
    return 4 * cab * ma * mb / ((va + vb) * (ma * ma + mb * mb));
}

inline double uqi(const Raster& a, const Raster& b, std::size_t n = 8) {
    double total = 0.0;
    std::size_t count = 0;
    const double nn = static_cast<double>(n * n);
    for (std::size_t y0 = 0; y0 + n <= a.h; ++y0)
        for (std::size_t x0 = 0; x0 + n <= a.w; ++x0) {
            double ma = 0.0, mb = 0.0;
            for (std::size_t j = 0; j < n; ++j)
                for (std::size_t i = 0; i < n; ++i) {
                    ma += a.at(x0 + i, y0 + j);
                    mb += b.at(x0 + i, y0 + j);
                }
            ma /= nn;
            mb /= nn;
            double va = 0.0, vb = 0.0, cab = 0.0;
            for (std::size_t j = 0; j < n; ++j)
                for (std::size_t i = 0; i < n; ++i) {
                    const double da = a.at(x0 + i, y0 + j) - ma;
                    const double db = b.at(x0 + i, y0 + j) - mb;
                    va += da * da;
                    vb += db * db;
                    cab += da * db;
                }
            // Zero tests on exact sums: integer inputs make flat windows exact.
            if (std::abs(va) < 1e-9) va = 0.0;
            if (std::abs(vb) < 1e-9) vb = 0.0;
            total += uqi_window(ma, mb, va / nn, vb / nn, cab / nn);
            ++count;
        }
    return total / static_cast<double>(count);
}

/// Weighted mean of `r` around (cx, cy) over the in-bounds part of a 2-D
/// Gaussian window, the weights renormalized to the part that fits.
inline double local_mean(const Raster& r, const std::vector<double>& w, int size, std::size_t cx,
                         std::size_t cy) {
    const int half = size / 2;
    double s = 0.0, ws = 0.0;
    for (int j = 0; j < size; ++j)
        for (int i = 0; i < size; ++i) {
            const long x = static_cast<long>(cx) + i - half;
            const long y = static_cast<long>(cy) + j - half;
            if (x < 0 || y < 0 || x >= static_cast<long>(r.w) || y >= static_cast<long>(r.h))
                continue;
            const double wt = w[static_cast<std::size_t>(j * size + i)];
            s += wt * r.at(static_cast<std::size_t>(x), static_cast<std::size_t>(y));
            ws += wt;
        }
    return s / ws;
}

/// Pixel-domain VIF: per scale s of S, window N = 2^(S-s+1)+1 with sigma N/5;
/// from the second scale on both images are smoothed with that window and
/// every other pixel kept before statistics are taken.
inline double vif(Raster ref, Raster dist, int scales = 4, double sigma_n2 = 2.0,
                  double eps = 1e-10) {
    double num = 0.0, den = 0.0;
    for (int s = 1; s <= scales; ++s) {
        const int n = (1 << (scales - s + 1)) + 1;
        const auto w = gaussian_window(n, n / 5.0);
        if (s > 1) {
            auto shrink = [&](const Raster& in) {
                Raster out{(in.w + 1) / 2, (in.h + 1) / 2, {}};
                for (std::size_t y = 0; y < out.h; ++y)
                    for (std::size_t x = 0; x < out.w; ++x)
                        out.v.push_back(local_mean(in, w, n, 2 * x, 2 * y));
                return out;
            };
            ref = shrink(ref);
            dist = shrink(dist);
        }
        const int half = n / 2;
        for (std::size_t cy = 0; cy < ref.h; ++cy)
            for (std::size_t cx = 0; cx < ref.w; ++cx) {
                const double m1 = local_mean(ref, w, n, cx, cy);
                const double m2 = local_mean(dist, w, n, cx, cy);
                double s1 = 0.0, s2 = 0.0, s12 = 0.0, ws = 0.0;
                for (int j = 0; j < n; ++j)
                    for (int i = 0; i < n; ++i) {
                        const long x = static_cast<long>(cx) + i - half;
                        const long y = static_cast<long>(cy) + j - half;
                        if (x < 0 || y < 0 || x >= static_cast<long>(ref.w) ||
                            y >= static_cast<long>(ref.h))
                            continue;
                        const double wt = w[static_cast<std::size_t>(j * n + i)];
                        const double d1 = ref.at(static_cast<std::size_t>(x), static_cast<std::size_t>(y)) - m1;
                        const double d2 = dist.at(static_cast<std::size_t>(x), static_cast<std::size_t>(y)) - m2;
                        s1 += wt * d1 * d1;
                        s2 += wt * d2 * d2;
                        s12 += wt * d1 * d2;
                        ws += wt;
                    }
                s1 /= ws;
                s2 /= ws;
                s12 /= ws;

                double g = s12 / (s1 + eps);
                double sv = s2 - g * s12;
                if (s1 < eps) {
                    g = 0.0;
                    sv = s2;
                    s1 = 0.0;
                }
                if (s2 < eps) {
                    g = 0.0;
                    sv = 0.0;
                }
                if (g < 0.0) {
                    sv = s2;
                    g = 0.0;
                }
                if (sv < eps) sv = eps;
                num += std::log2(1.0 + g * g * s1 / (sv + sigma_n2));
                den += std::log2(1.0 + s1 / sigma_n2);
            }
    }
    return num / den;
}

}  // namespace oracle
