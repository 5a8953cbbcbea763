#include "mrct/ganmath.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "mrct/error.hpp"

namespace mrct::gan {

namespace {

double mean_log(std::span<const double> values, bool complement, const char* name) {
    if (values.empty()) throw Error(std::string("adversarial loss: ") + name + " is empty");
    double sum = 0.0;
    for (double d : values) {
        if (!(d >= 0.0 && d <= 1.0))
            throw Error(std::string("adversarial loss: ") + name + " entry " + std::to_string(d) +
                        " outside [0, 1]");
        const double arg = complement ? 1.0 - d : d;
        sum += std::log(std::max(arg, kLogFloor));
    }
    return sum / static_cast<double>(values.size());
}

double mean_abs_error(const ImagePlane& original, const ImagePlane& reconstruction,
                      const char* which) {
    if (!original.same_shape(reconstruction))
        throw Error(std::string("cycle loss: dimension mismatch for ") + which);
    const auto a = original.pixels();
    const auto b = reconstruction.pixels();
    double sum = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i)
        sum += std::abs(b[i] / reconstruction.range() - a[i] / original.range());
    return sum / static_cast<double>(a.size());
}

}  // namespace

FinetuneConfig FinetuneConfig::for_category(Category c) {
    FinetuneConfig cfg;
    cfg.category = c;
    cfg.lambda_weight = lambda_for_category(c);
    return cfg;
}

void FinetuneConfig::validate() const {
    if (!(lambda_weight > 0.0)) throw Error("config: lambda must be positive");
    if (lambda_weight != lambda_for_category(category))
        throw Error("config: lambda " + std::to_string(lambda_weight) + " does not match the " +
                    std::string(to_string(category)) + " table value");
    if (!(base_learning_rate > 0.0)) throw Error("config: base learning rate must be positive");
    if (total_epochs <= 0) throw Error("config: total epochs must be positive");
    if (decay_start_epoch <= 0 || decay_start_epoch >= total_epochs)
        throw Error("config: decay start must lie in (0, total epochs)");
    if (batch_size <= 0 || fc1_units <= 0 || fc2_units <= 0)
        throw Error("config: batch size and FC widths must be positive");
}

double adversarial_loss(const DiscriminatorBatch& b) {
    return mean_log(b.d_real, false, "d_real") + mean_log(b.d_fake, true, "d_fake");
}

double cycle_consistency_loss(const CycleBatch& c) {
    return mean_abs_error(c.x, c.fgx, "x/F(G(x))") + mean_abs_error(c.y, c.gfy, "y/G(F(y))");
}

double total_objective(double adv_xy, double adv_yx, double cyc, const FinetuneConfig& cfg) {
    cfg.validate();
    return adv_xy + adv_yx + cfg.lambda_weight * cyc;
}

double lambda_for_category(Category c) {
    switch (c) {
    case Category::ArtisticStyleTransfer: return 9.0;
    case Category::AnimalImages:
    case Category::NaturalLandscapeImages:
    case Category::Photography: return 10.0;
    case Category::SatelliteAndMapImages:
    case Category::UrbanScenes: return 11.0;
    }
    throw Error("unknown category");
}

double lambda_for_category(std::string_view name) {
    const auto c = parse_category(name);
    if (!c) throw Error("unknown category '" + std::string(name) + "'");
    return lambda_for_category(*c);
}

double lr_at_epoch(const FinetuneConfig& cfg, int epoch) {
    if (epoch < 0 || epoch > cfg.total_epochs)
        throw Error("lr: epoch " + std::to_string(epoch) + " outside [0, " +
                    std::to_string(cfg.total_epochs) + "]");
    if (cfg.decay_start_epoch <= 0 || cfg.decay_start_epoch >= cfg.total_epochs)
        throw Error("lr: decay start must lie in (0, total epochs)");
    if (epoch < cfg.decay_start_epoch) return cfg.base_learning_rate;
    // Fraction first so the midpoint is exactly base / 2.
    const double remaining = static_cast<double>(cfg.total_epochs - epoch) /
                             static_cast<double>(cfg.total_epochs - cfg.decay_start_epoch);
    return cfg.base_learning_rate * remaining;
}

}  // namespace mrct::gan
