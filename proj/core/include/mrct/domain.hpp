#pragma once

#include <array>
#include <optional>
#include <string>
#include <string_view>

namespace mrct {

/// Translation direction of a generated image.
enum class Direction { MR2CT, CT2MR };

std::string_view to_string(Direction d);
/// Accepts exactly "MR2CT" or "CT2MR".
std::optional<Direction> parse_direction(std::string_view token);

/// Modality of an image; the target modality of a translation.
enum class Modality { MR, CT };

std::string_view to_string(Modality m);
std::optional<Modality> parse_modality(std::string_view token);
Modality target_modality(Direction d);

/// Donor-model categories used to pick the cycle-consistency weight.
enum class Category {
    ArtisticStyleTransfer,
    AnimalImages,
    NaturalLandscapeImages,
    Photography,
    SatelliteAndMapImages,
    UrbanScenes,
};

inline constexpr std::array<Category, 6> kAllCategories = {
    Category::ArtisticStyleTransfer, Category::AnimalImages,
    Category::NaturalLandscapeImages, Category::Photography,
    Category::SatelliteAndMapImages, Category::UrbanScenes,
};

/// Display name, e.g. "Artistic Style Transfer".
std::string_view to_string(Category c);
/// Exact, case-sensitive match against the display names.
std::optional<Category> parse_category(std::string_view name);

enum class ReportFormat { Markdown, Csv, Json };

/// "md" (or "markdown"), "csv", "json".
std::optional<ReportFormat> parse_report_format(std::string_view name);

}  // namespace mrct
