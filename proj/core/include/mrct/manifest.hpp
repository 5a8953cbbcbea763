#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "mrct/domain.hpp"

namespace mrct {

/// One (generated, reference) image pair produced by a donor model.
struct PairRecord {
    std::string model_id;
    std::optional<Category> category;
    Direction direction = Direction::MR2CT;
    std::string generated_path;
    std::string reference_path;
    std::optional<std::string> subject_id;

    friend bool operator==(const PairRecord&, const PairRecord&) = default;
};

/// Ordered catalog of pairs. No two records share
/// (model_id, direction, generated_path).
struct EvalManifest {
    std::vector<PairRecord> records;
    /// Relative image paths are resolved against this directory.
    std::filesystem::path base_dir;

    std::filesystem::path resolve(const std::string& path) const;
};

/// Parses a CSV manifest with header
/// `model_id,category,direction,generated_path,reference_path[,subject_id]`.
/// Columns are located by header name; an empty category cell means "unknown".
/// Throws mrct::Error on a missing column, unknown direction or category,
/// duplicate pair, or an empty file.
EvalManifest parse_manifest(const std::string& csv_text,
                            std::filesystem::path base_dir = {});
EvalManifest load_manifest(const std::filesystem::path& path);

}  // namespace mrct
