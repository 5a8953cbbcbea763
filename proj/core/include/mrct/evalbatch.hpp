#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "mrct/manifest.hpp"
#include "mrct/metrics.hpp"

namespace mrct::eval {

struct PairResult {
    PairRecord record;
    metrics::MetricRecord metrics;
};

/// A pair that could not be scored. The batch keeps going.
struct PairError {
    PairRecord record;
    std::string message;
};

using PairOutcome = std::variant<PairResult, PairError>;

struct EvalOptions {
    metrics::MetricSelection selection;
    metrics::SsimParams ssim;
    metrics::VifParams vif;
    /// 0 means std::thread::hardware_concurrency().
    unsigned threads = 0;
};

/// Loads both images of `r` (paths resolved against `base_dir`) and scores the
/// generated image against the reference. Failures become PairError.
PairOutcome evaluate_pair(const PairRecord& r, const EvalOptions& opts,
                          const std::filesystem::path& base_dir = {});

struct BatchResults {
    std::vector<PairResult> results;  // manifest order
    std::vector<PairError> errors;    // manifest order
};

/// Scores every record, in parallel across pairs. The output does not depend
/// on the worker count.
BatchResults evaluate_manifest(const EvalManifest& manifest, const EvalOptions& opts);

struct Stat {
    double avg = 0.0;
    double std = 0.0;  // sample (N-1); 0 when n == 1
    std::size_t n = 0;

    friend bool operator==(const Stat&, const Stat&) = default;
};

struct AggregateRow {
    std::string model_id;
    Direction direction = Direction::MR2CT;
    std::size_t n_pairs = 0;
    std::optional<Stat> psnr;  // finite values only
    std::optional<Stat> ssim;
    std::optional<Stat> uqi;
    std::optional<Stat> vif;
    /// Pairs whose PSNR was infinite (identical images); left out of `psnr`.
    std::size_t psnr_infinite = 0;

    const std::optional<Stat>& stat(metrics::Metric m) const;

    friend bool operator==(const AggregateRow&, const AggregateRow&) = default;
};

/// Mean and sample standard deviation of `values` in the given order.
Stat summarize(const std::vector<double>& values);

/// Groups by (model_id, direction). Rows come out sorted by model_id then
/// direction, and each group is reduced in a canonical record order, so the
/// result is bit-identical for any permutation of `results`.
std::vector<AggregateRow> aggregate(std::vector<PairResult> results);

/// Model ids of rows in `direction`, best first by the metric's average. Ties,
/// and rows lacking the metric (placed last), order by ascending model_id.
std::vector<std::string> rank_models(const std::vector<AggregateRow>& rows,
                                     std::string_view metric, Direction direction);

/// One table per direction: Model | PSNR | SSIM | UQI | VIF as "avg ±std".
/// Markdown rounds PSNR/SSIM/UQI to 2 decimals and VIF to 3; CSV and JSON carry
/// full precision.
std::string render_report(const std::vector<AggregateRow>& rows, ReportFormat format);

/// Rows parsed back from render_report(..., Json).
std::vector<AggregateRow> parse_report_json(std::string_view text);

/// Results file: one JSON object per scored pair plus the error ledger.
std::string serialize_results(const BatchResults& batch);
BatchResults parse_results(std::string_view text);

}  // namespace mrct::eval
