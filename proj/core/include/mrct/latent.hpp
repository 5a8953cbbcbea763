#pragma once

#include <array>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "mrct/domain.hpp"
#include "mrct/image.hpp"

namespace mrct::latent {

/// N feature vectors of a common dimension D, each labelled MR or CT.
struct FeatureMatrix {
    std::vector<std::vector<double>> rows;
    std::vector<Modality> labels;

    std::size_t dim() const { return rows.empty() ? 0 : rows.front().size(); }
    /// Throws mrct::Error if rows are ragged or labels do not match rows.
    void validate() const;
};

/// Top-two principal axes of a FeatureMatrix.
struct Projection {
    std::vector<double> mean;
    std::array<std::vector<double>, 2> components;  // orthonormal, descending eigenvalue
    std::array<double, 2> eigenvalues{};             // sample (N-1) covariance

    friend bool operator==(const Projection&, const Projection&) = default;
};

struct LabelledPoint {
    Modality label = Modality::MR;
    double x = 0.0;
    double y = 0.0;
};

inline constexpr std::size_t kDescriptorSide = 16;

/// 16x16 area-average downsample of the unit-range plane, row-major (256
/// values). Images smaller than 16x16 are rejected.
std::vector<double> extract_features(const ImagePlane& img);

/// PCA of the mean-centred sample covariance. Each component's first
/// coordinate with |v| > 1e-12 is made positive.
Projection pca_fit(const FeatureMatrix& m);

/// coord = components . (row - mean)
std::vector<LabelledPoint> project(const Projection& p, const FeatureMatrix& m);

/// Mean silhouette coefficient (Euclidean) with MR and CT as the clusters.
double separation_score(const std::vector<LabelledPoint>& points);

/// `label,f0,f1,...` with labels MR or CT.
FeatureMatrix parse_feature_csv(std::string_view text);
FeatureMatrix load_feature_csv(const std::filesystem::path& path);

/// `label,x,y`, full precision.
std::string coordinates_csv(const std::vector<LabelledPoint>& points);

}  // namespace mrct::latent
