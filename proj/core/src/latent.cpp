#include "mrct/latent.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "mrct/csv.hpp"
#include "mrct/error.hpp"

namespace mrct::latent {

void FeatureMatrix::validate() const {
    if (rows.size() != labels.size()) throw Error("features: label count does not match rows");
    for (const auto& r : rows)
        if (r.size() != dim()) throw Error("features: rows have differing dimensions");
}

namespace {

// Overlap of pixel [p, p+1) with output cell i of `cells` equal cells over
// [0, extent). Returned weights are per source pixel for one output cell.
std::vector<std::vector<double>> area_weights(std::size_t extent, std::size_t cells) {
    std::vector<std::vector<double>> w(cells, std::vector<double>(extent, 0.0));
    const double step = static_cast<double>(extent) / static_cast<double>(cells);
    for (std::size_t i = 0; i < cells; ++i) {
        const double lo = step * static_cast<double>(i);
        const double hi = step * static_cast<double>(i + 1);
        for (std::size_t p = static_cast<std::size_t>(lo); p < extent && static_cast<double>(p) < hi;
             ++p) {
            const double overlap = std::min(hi, static_cast<double>(p + 1)) -
                                   std::max(lo, static_cast<double>(p));
            if (overlap > 0.0) w[i][p] = overlap / step;
        }
    }
    return w;
}

}  // namespace

std::vector<double> extract_features(const ImagePlane& img) {
    if (img.width() < kDescriptorSide || img.height() < kDescriptorSide)
        throw Error("features: image " + std::to_string(img.width()) + "x" +
                    std::to_string(img.height()) + " is below descriptor size 16x16");
    const auto wx = area_weights(img.width(), kDescriptorSide);
    const auto wy = area_weights(img.height(), kDescriptorSide);
    std::vector<double> out(kDescriptorSide * kDescriptorSide);
    for (std::size_t cy = 0; cy < kDescriptorSide; ++cy)
        for (std::size_t cx = 0; cx < kDescriptorSide; ++cx) {
            double s = 0.0;
            for (std::size_t y = 0; y < img.height(); ++y) {
                if (wy[cy][y] == 0.0) continue;
                double row = 0.0;
                for (std::size_t x = 0; x < img.width(); ++x)
                    if (wx[cx][x] != 0.0) row += wx[cx][x] * img.at(x, y);
                s += wy[cy][y] * row;
            }
            out[cy * kDescriptorSide + cx] = s / img.range();
        }
    return out;
}

Projection pca_fit(const FeatureMatrix& m) {
    m.validate();
    const std::size_t n = m.rows.size();
    const std::size_t d = m.dim();
    if (n < 2) throw Error("pca: need at least 2 rows");
    if (d < 2) throw Error("pca: need at least 2 feature dimensions");

    Eigen::MatrixXd data(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(d));
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < d; ++j)
            data(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = m.rows[i][j];
    const Eigen::RowVectorXd mean = data.colwise().mean();
    const Eigen::MatrixXd centred = data.rowwise() - mean;
    const Eigen::MatrixXd cov = (centred.transpose() * centred) / static_cast<double>(n - 1);
    if (cov.trace() <= 0.0) throw Error("pca: zero total variance");

    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(cov);
    if (solver.info() != Eigen::Success) throw Error("pca: eigen-decomposition failed");
    // Eigen returns ascending eigenvalues.
    const auto& values = solver.eigenvalues();
    const auto& vectors = solver.eigenvectors();

    Projection p;
    p.mean.assign(mean.data(), mean.data() + d);
    for (int k = 0; k < 2; ++k) {
        const Eigen::Index col = static_cast<Eigen::Index>(d) - 1 - k;
        Eigen::VectorXd v = vectors.col(col).normalized();
        for (Eigen::Index j = 0; j < v.size(); ++j) {
            if (std::abs(v(j)) > 1e-12) {
                if (v(j) < 0.0) v = -v;
                break;
            }
        }
        p.components[static_cast<std::size_t>(k)].assign(v.data(), v.data() + v.size());
        p.eigenvalues[static_cast<std::size_t>(k)] = std::max(0.0, values(col));
    }
    return p;
}

std::vector<LabelledPoint> project(const Projection& p, const FeatureMatrix& m) {
    m.validate();
    if (m.dim() != p.mean.size())
        throw Error("project: feature dimension " + std::to_string(m.dim()) +
                    " does not match projection dimension " + std::to_string(p.mean.size()));
    std::vector<LabelledPoint> out;
    out.reserve(m.rows.size());
    for (std::size_t i = 0; i < m.rows.size(); ++i) {
        double c[2] = {0.0, 0.0};
        for (std::size_t k = 0; k < 2; ++k)
            for (std::size_t j = 0; j < p.mean.size(); ++j)
                c[k] += p.components[k][j] * (m.rows[i][j] - p.mean[j]);
        out.push_back({m.labels[i], c[0], c[1]});
    }
    return out;
}

double separation_score(const std::vector<LabelledPoint>& points) {
    if (points.size() < 3) throw Error("silhouette: need at least 3 points");
    const auto mr = std::count_if(points.begin(), points.end(),
                                  [](const auto& p) { return p.label == Modality::MR; });
    if (mr == 0 || static_cast<std::size_t>(mr) == points.size())
        throw Error("silhouette: both MR and CT points are required");

    double total = 0.0;
    for (std::size_t i = 0; i < points.size(); ++i) {
        double same = 0.0, other = 0.0;
        std::size_t n_same = 0, n_other = 0;
        for (std::size_t j = 0; j < points.size(); ++j) {
            if (i == j) continue;
            const double dist = std::hypot(points[i].x - points[j].x, points[i].y - points[j].y);
            if (points[j].label == points[i].label) {
                same += dist;
                ++n_same;
            } else {
                other += dist;
                ++n_other;
            }
        }
        // A point alone in its cluster scores 0.
        if (n_same == 0) continue;
        const double a = same / static_cast<double>(n_same);
        const double b = other / static_cast<double>(n_other);
        const double denom = std::max(a, b);
        if (denom > 0.0) total += (b - a) / denom;
    }
    return total / static_cast<double>(points.size());
}

FeatureMatrix parse_feature_csv(std::string_view text) {
    const auto rows = csv::parse(text);
    if (rows.empty()) throw Error("features: empty file");
    if (rows[0].empty() || rows[0][0] != "label")
        throw Error("features: header must start with 'label'");
    const std::size_t d = rows[0].size() - 1;
    FeatureMatrix m;
    for (std::size_t i = 1; i < rows.size(); ++i) {
        const auto& row = rows[i];
        if (row.size() != d + 1)
            throw Error("features: row " + std::to_string(i + 1) + " has " +
                        std::to_string(row.size()) + " fields, expected " + std::to_string(d + 1));
        const auto label = parse_modality(row[0]);
        if (!label) throw Error("features: unknown label '" + row[0] + "' (expected MR or CT)");
        std::vector<double> v(d);
        for (std::size_t j = 0; j < d; ++j) {
            const auto& f = row[j + 1];
            const auto [ptr, ec] = std::from_chars(f.data(), f.data() + f.size(), v[j]);
            if (ec != std::errc{} || ptr != f.data() + f.size() || !std::isfinite(v[j]))
                throw Error("features: bad number '" + f + "' on row " + std::to_string(i + 1));
        }
        m.rows.push_back(std::move(v));
        m.labels.push_back(*label);
    }
    return m;
}

FeatureMatrix load_feature_csv(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("features: cannot open '" + path.string() + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_feature_csv(buf.str());
}

std::string coordinates_csv(const std::vector<LabelledPoint>& points) {
    std::string out = "label,x,y\n";
    char buf[96];
    for (const auto& p : points) {
        std::snprintf(buf, sizeof buf, "%s,%.17g,%.17g\n", p.label == Modality::MR ? "MR" : "CT",
                      p.x, p.y);
        out += buf;
    }
    return out;
}

}  // namespace mrct::latent
