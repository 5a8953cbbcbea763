#include "mrct/manifest.hpp"

#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <tuple>

#include "mrct/csv.hpp"
#include "mrct/error.hpp"

namespace mrct {

std::string_view to_string(Direction d) {
    return d == Direction::MR2CT ? "MR2CT" : "CT2MR";
}

std::optional<Direction> parse_direction(std::string_view token) {
    if (token == "MR2CT") return Direction::MR2CT;
    if (token == "CT2MR") return Direction::CT2MR;
    return std::nullopt;
}

std::string_view to_string(Modality m) {
    return m == Modality::MR ? "MR" : "CT";
}

std::optional<Modality> parse_modality(std::string_view token) {
    if (token == "MR") return Modality::MR;
    if (token == "CT") return Modality::CT;
    return std::nullopt;
}

Modality target_modality(Direction d) {
    return d == Direction::MR2CT ? Modality::CT : Modality::MR;
}

std::string_view to_string(Category c) {
    switch (c) {
    case Category::ArtisticStyleTransfer: return "Artistic Style Transfer";
    case Category::AnimalImages: return "Animal Images";
    case Category::NaturalLandscapeImages: return "Natural Landscape Images";
    case Category::Photography: return "Photography";
    case Category::SatelliteAndMapImages: return "Satellite and Map Images";
    case Category::UrbanScenes: return "Urban Scenes";
    }
    return "";
}

std::optional<Category> parse_category(std::string_view name) {
    for (Category c : kAllCategories)
        if (to_string(c) == name) return c;
    return std::nullopt;
}

std::optional<ReportFormat> parse_report_format(std::string_view name) {
    if (name == "md" || name == "markdown") return ReportFormat::Markdown;
    if (name == "csv") return ReportFormat::Csv;
    if (name == "json") return ReportFormat::Json;
    return std::nullopt;
}

std::filesystem::path EvalManifest::resolve(const std::string& path) const {
    std::filesystem::path p(path);
    if (p.is_absolute() || base_dir.empty()) return p;
    return base_dir / p;
}

EvalManifest parse_manifest(const std::string& csv_text, std::filesystem::path base_dir) {
    const auto rows = csv::parse(csv_text);
    if (rows.empty()) throw Error("manifest: empty file");

    std::map<std::string, std::size_t> column;
    for (std::size_t i = 0; i < rows[0].size(); ++i) column[rows[0][i]] = i;
    for (const char* required :
         {"model_id", "category", "direction", "generated_path", "reference_path"}) {
        if (!column.contains(required))
            throw Error(std::string("manifest: missing required column '") + required + "'");
    }
    const auto subject_col = column.find("subject_id");

    EvalManifest manifest;
    manifest.base_dir = std::move(base_dir);
    std::set<std::tuple<std::string, Direction, std::string>> seen;

    for (std::size_t line = 1; line < rows.size(); ++line) {
        const auto& row = rows[line];
        auto cell = [&](const std::string& name) -> const std::string& {
            const std::size_t idx = column.at(name);
            if (idx >= row.size())
                throw Error("manifest: row " + std::to_string(line + 1) + " has too few columns");
            return row[idx];
        };
        const std::string where = " (row " + std::to_string(line + 1) + ")";

        PairRecord r;
        r.model_id = cell("model_id");
        if (r.model_id.empty()) throw Error("manifest: empty model_id" + where);

        const auto& category = cell("category");
        if (!category.empty()) {
            r.category = parse_category(category);
            if (!r.category) throw Error("manifest: unknown category '" + category + "'" + where);
        }
        const auto& direction = cell("direction");
        const auto dir = parse_direction(direction);
        if (!dir) throw Error("manifest: unknown direction '" + direction + "'" + where);
        r.direction = *dir;

        r.generated_path = cell("generated_path");
        r.reference_path = cell("reference_path");
        if (r.generated_path.empty() || r.reference_path.empty())
            throw Error("manifest: empty image path" + where);
        if (subject_col != column.end() && subject_col->second < row.size() &&
            !row[subject_col->second].empty())
            r.subject_id = row[subject_col->second];

        if (!seen.emplace(r.model_id, r.direction, r.generated_path).second)
            throw Error("manifest: duplicate pair (" + r.model_id + ", " +
                        std::string(to_string(r.direction)) + ", " + r.generated_path + ")" +
                        where);
        manifest.records.push_back(std::move(r));
    }
    if (manifest.records.empty()) throw Error("manifest: empty file (header only)");
    return manifest;
}

EvalManifest load_manifest(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("manifest: cannot open '" + path.string() + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_manifest(buf.str(), path.parent_path());
}

}  // namespace mrct
