#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "fixtures.hpp"
#include "mrct/error.hpp"
#include "mrct/latent.hpp"

using namespace mrct;
using namespace mrct::latent;

namespace {

FeatureMatrix matrix(std::vector<std::vector<double>> rows, std::vector<Modality> labels = {}) {
    if (labels.empty())
        for (std::size_t i = 0; i < rows.size(); ++i) labels.push_back(i % 2 ? Modality::CT : Modality::MR);
    return {std::move(rows), std::move(labels)};
}

double dot(const std::vector<double>& a, const std::vector<double>& b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

FeatureMatrix random_matrix(std::size_t n, std::size_t d, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> g(0.0, 1.0);
    FeatureMatrix m;
    for (std::size_t i = 0; i < n; ++i) {
        std::vector<double> row(d);
        for (std::size_t j = 0; j < d; ++j) row[j] = g(rng) * static_cast<double>(j + 1);
        m.rows.push_back(row);
        m.labels.push_back(i % 2 ? Modality::CT : Modality::MR);
    }
    return m;
}

}  // namespace

TEST(Features, ConstantImage) {
    const auto f = extract_features(ImagePlane::filled(64, 48, 128.0));
    ASSERT_EQ(f.size(), 256u);
    for (double v : f) EXPECT_NEAR(v, 128.0 / 255.0, 1e-12);
    EXPECT_NEAR(f[0], 0.50196, 1e-5);
}

TEST(Features, NativeSizeIsIdentity) {
    const auto img = fixtures::random_plane(16, 16, 5);
    const auto f = extract_features(img);
    for (std::size_t i = 0; i < 256; ++i) EXPECT_NEAR(f[i], img.pixels()[i] / 255.0, 1e-15);
}

TEST(Features, AreaAverage) {
    // 32x32 with 2x2 blocks: each descriptor cell is one block's mean.
    const auto img = fixtures::random_plane(32, 32, 6);
    const auto f = extract_features(img);
    for (std::size_t cy = 0; cy < 16; ++cy)
        for (std::size_t cx = 0; cx < 16; ++cx) {
            const double mean = (img.at(2 * cx, 2 * cy) + img.at(2 * cx + 1, 2 * cy) +
                                 img.at(2 * cx, 2 * cy + 1) + img.at(2 * cx + 1, 2 * cy + 1)) / 4.0;
            EXPECT_NEAR(f[cy * 16 + cx], mean / 255.0, 1e-12);
        }
}

TEST(Features, TooSmall) {
    try {
        extract_features(ImagePlane::filled(15, 15, 0.0));
        FAIL();
    } catch (const Error& e) {
        EXPECT_NE(std::string(e.what()).find("below descriptor size"), std::string::npos);
    }
}

TEST(Pca, LineFixture) {
    const auto m = matrix({{1, 0}, {-1, 0}, {0, 0.1}, {0, -0.1}});
    const auto p = pca_fit(m);
    EXPECT_NEAR(p.components[0][0], 1.0, 1e-12);
    EXPECT_NEAR(p.components[0][1], 0.0, 1e-12);
    EXPECT_NEAR(p.eigenvalues[0], 2.0 / 3.0, 1e-12);
    EXPECT_NEAR(p.eigenvalues[1], 0.02 / 3.0, 1e-12);
}

TEST(Pca, CollinearRankOne) {
    const auto p = pca_fit(matrix({{0, 0}, {1, 2}, {2, 4}, {3, 6}}));
    EXPECT_NEAR(p.eigenvalues[1], 0.0, 1e-12);
    EXPECT_NEAR(p.components[0][0], 1 / std::sqrt(5.0), 1e-12);
    EXPECT_NEAR(p.components[0][1], 2 / std::sqrt(5.0), 1e-12);
}

TEST(Pca, OrthonormalAndVarianceMatchesEigenvalues) {
    const auto m = random_matrix(40, 6, 3);
    const auto p = pca_fit(m);
    EXPECT_NEAR(dot(p.components[0], p.components[0]), 1.0, 1e-9);
    EXPECT_NEAR(dot(p.components[1], p.components[1]), 1.0, 1e-9);
    EXPECT_NEAR(dot(p.components[0], p.components[1]), 0.0, 1e-9);
    EXPECT_GE(p.eigenvalues[0], p.eigenvalues[1]);

    const auto pts = project(p, m);
    double sx = 0, sy = 0, mx = 0, my = 0;
    for (const auto& q : pts) {
        mx += q.x;
        my += q.y;
    }
    mx /= static_cast<double>(pts.size());
    my /= static_cast<double>(pts.size());
    for (const auto& q : pts) {
        sx += (q.x - mx) * (q.x - mx);
        sy += (q.y - my) * (q.y - my);
    }
    EXPECT_NEAR(sx / static_cast<double>(pts.size() - 1), p.eigenvalues[0], 1e-9);
    EXPECT_NEAR(sy / static_cast<double>(pts.size() - 1), p.eigenvalues[1], 1e-9);
    EXPECT_NEAR(mx, 0.0, 1e-9);
}

TEST(Pca, SignConvention) {
    const auto a = pca_fit(matrix({{-1, 0}, {1, 0}, {0, 0.1}, {0, -0.1}}));
    for (const auto& c : a.components) {
        for (double v : c)
            if (std::abs(v) > 1e-12) {
                EXPECT_GT(v, 0.0);
                break;
            }
    }
}

TEST(Project, MeanMapsToOrigin) {
    const auto m = random_matrix(10, 3, 8);
    const auto p = pca_fit(m);
    const auto pts = project(p, {{p.mean}, {Modality::MR}});
    EXPECT_NEAR(pts[0].x, 0.0, 1e-12);
    EXPECT_NEAR(pts[0].y, 0.0, 1e-12);
    EXPECT_THROW(project(p, matrix({{1, 2}})), Error);
}

TEST(Silhouette, Fixtures) {
    std::mt19937_64 rng(2);
    std::uniform_real_distribution<double> j(-0.01, 0.01);
    std::vector<LabelledPoint> far;
    for (int i = 0; i < 10; ++i) far.push_back({Modality::MR, j(rng), j(rng)});
    for (int i = 0; i < 10; ++i) far.push_back({Modality::CT, 100 + j(rng), 100 + j(rng)});
    EXPECT_GT(separation_score(far), 0.99);

    std::vector<LabelledPoint> same;
    for (int i = 0; i < 10; ++i) same.push_back({i % 2 ? Modality::CT : Modality::MR, 1.0, 1.0});
    EXPECT_LE(separation_score(same), 0.0);

    std::vector<LabelledPoint> one(5, LabelledPoint{Modality::MR, 0, 0});
    EXPECT_THROW(separation_score(one), Error);
}

TEST(Silhouette, BruteForceOracle) {
    std::mt19937_64 rng(4);
    std::normal_distribution<double> g(0, 1);
    std::vector<LabelledPoint> pts;
    for (int i = 0; i < 25; ++i) pts.push_back({i < 12 ? Modality::MR : Modality::CT, g(rng) + (i < 12 ? 1.5 : 0), g(rng)});
    double total = 0;
    for (const auto& p : pts) {
        double a = 0, b = 0;
        int na = 0, nb = 0;
        for (const auto& q : pts) {
            if (&p == &q) continue;
            const double d = std::sqrt((p.x - q.x) * (p.x - q.x) + (p.y - q.y) * (p.y - q.y));
            if (q.label == p.label) { a += d; ++na; } else { b += d; ++nb; }
        }
        a /= na;
        b /= nb;
        total += (b - a) / std::max(a, b);
    }
    EXPECT_NEAR(separation_score(pts), total / static_cast<double>(pts.size()), 1e-12);
}

TEST(FeatureCsv, ParseAndErrors) {
    const auto m = parse_feature_csv("label,f0,f1\nMR,1,2\nCT,3.5,-4e-1\n");
    ASSERT_EQ(m.rows.size(), 2u);
    EXPECT_EQ(m.labels[1], Modality::CT);
    EXPECT_DOUBLE_EQ(m.rows[1][1], -0.4);
    EXPECT_THROW(parse_feature_csv("name,f0\nMR,1\n"), Error);
    EXPECT_THROW(parse_feature_csv("label,f0\nPET,1\n"), Error);
    EXPECT_THROW(parse_feature_csv("label,f0,f1\nMR,1\n"), Error);
    EXPECT_THROW(parse_feature_csv("label,f0\nMR,abc\n"), Error);
}

TEST(CoordinatesCsv, FullPrecision) {
    const auto text = coordinates_csv({{Modality::MR, 0.1, -2.0}});
    EXPECT_EQ(text, "label,x,y\nMR,0.10000000000000001,-2\n");
}
