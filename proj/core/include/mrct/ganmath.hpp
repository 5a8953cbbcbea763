#pragma once

#include <span>
#include <vector>

#include "mrct/domain.hpp"
#include "mrct/image.hpp"

namespace mrct::gan {

/// Discriminator outputs for one mapping: D(y) on real samples and D(G(x)) on
/// translated samples. Both lists non-empty, every entry in [0, 1].
struct DiscriminatorBatch {
    std::vector<double> d_real;
    std::vector<double> d_fake;
};

/// Images and their round-trip reconstructions F(G(x)) and G(F(y)).
struct CycleBatch {
    ImagePlane x;
    ImagePlane fgx;
    ImagePlane y;
    ImagePlane gfy;
};

/// Fine-tuning hyperparameters. The FC sizes are recorded, never executed.
struct FinetuneConfig {
    Category category = Category::Photography;
    double lambda_weight = 10.0;
    double base_learning_rate = 0.001;
    int total_epochs = 200;
    int decay_start_epoch = 100;
    int batch_size = 2;
    int fc1_units = 256;
    int fc2_units = 256;

    /// Defaults with lambda taken from the category table.
    static FinetuneConfig for_category(Category c);

    /// Throws mrct::Error when an invariant is broken.
    void validate() const;
};

/// Smallest argument passed to the logarithm in adversarial_loss.
inline constexpr double kLogFloor = 1e-12;

/// mean(ln D(y)) + mean(ln(1 - D(G(x)))), each logarithm argument floored at
/// kLogFloor. Always <= 0; exactly 0 for a perfect discriminator.
double adversarial_loss(const DiscriminatorBatch& b);

/// Per-pixel mean |F(G(x)) - x| plus per-pixel mean |G(F(y)) - y|, with pixels
/// scaled to unit range by each plane's range.
double cycle_consistency_loss(const CycleBatch& c);

/// adv_xy + adv_yx + lambda * cyc.
double total_objective(double adv_xy, double adv_yx, double cyc, const FinetuneConfig& cfg);

/// 9 for Artistic Style Transfer; 10 for Animal, Natural Landscape, and
/// Photography; 11 for Satellite and Map Images and Urban Scenes.
double lambda_for_category(Category c);
/// Throws mrct::Error("unknown category ...") for unrecognized names.
double lambda_for_category(std::string_view name);

/// Constant base rate before decay_start_epoch, then linear decay reaching
/// exactly zero at total_epochs.
double lr_at_epoch(const FinetuneConfig& cfg, int epoch);

}  // namespace mrct::gan
