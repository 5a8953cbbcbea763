#pragma once

#include <chrono>
#include <cstdint>
#include <filesystem>
#include <map>
#include <mutex>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "mrct/domain.hpp"
#include "mrct/error.hpp"

namespace mrct::study {

/// Whether a shown image was synthesized. Never sent to raters.
enum class Provenance { GENERATED, GROUND_TRUTH };

std::string_view to_string(Provenance p);
std::optional<Provenance> parse_provenance(std::string_view token);

using Timestamp = std::chrono::sys_time<std::chrono::milliseconds>;

/// "2026-10-16T09:28:00.123Z"
std::string format_utc(Timestamp ts);
Timestamp parse_utc(std::string_view text);

/// One image of the study source list.
struct ManifestEntry {
    std::string image_path;
    Provenance provenance = Provenance::GENERATED;
    Direction direction = Direction::MR2CT;
    std::string model_id;  // empty for ground truth
    std::string pair_id;   // links a generated image to its ground truth
};

/// CSV with header `image_path,provenance,direction[,model_id][,pair_id]`.
/// Relative paths resolve against the manifest's directory.
std::vector<ManifestEntry> parse_study_manifest(std::string_view csv_text,
                                                const std::filesystem::path& base_dir = {});
std::vector<ManifestEntry> load_study_manifest(const std::filesystem::path& path);

struct StudyItem {
    std::string token;
    ManifestEntry source;
};

struct RatingRecord {
    int realism = 0;  // 1..4
    bool judged_real = false;
    Timestamp timestamp{};

    friend bool operator==(const RatingRecord&, const RatingRecord&) = default;
};

/// A blinded, seeded presentation of the manifest to one rater.
struct StudySession {
    std::string session_id;
    std::uint64_t seed = 0;
    std::string rater_id;
    std::vector<StudyItem> items;  // presentation order
    std::map<std::string, RatingRecord> ratings;

    std::size_t total() const { return items.size(); }
    std::size_t completed() const { return ratings.size(); }
    bool complete() const { return ratings.size() == items.size(); }
    const StudyItem* find(std::string_view token) const;
    /// Index of the first unrated item in presentation order.
    std::optional<std::size_t> next_unrated() const;
};

struct BuildOptions {
    /// Decode every image before building the session.
    bool verify_images = true;
};

/// Seeded presentation order. The PRNG stream is std::mt19937_64(seed), used
/// in this order: one draw for the session id, Fisher-Yates from the last
/// index down (j uniform in [0, i] by rejection sampling on raw 64-bit draws),
/// then one draw per item, in presentation order, for its token (redrawn on
/// collision). Same manifest and seed give the same session.
StudySession build_session(const std::vector<ManifestEntry>& manifest, std::uint64_t seed,
                           std::string rater_id, const BuildOptions& opts = {});

enum class RatingErrc { UnknownToken, AlreadyRated, OutOfRange };

class RatingError : public Error {
public:
    RatingError(RatingErrc code, const std::string& message) : Error(message), code_(code) {}
    RatingErrc code() const noexcept { return code_; }

private:
    RatingErrc code_;
};

/// Throws RatingError if the rating would be rejected.
void check_rating(const StudySession& s, std::string_view token, int realism);

/// Validates then stores the rating.
void record_rating(StudySession& s, std::string_view token, int realism, bool judged_real,
                   Timestamp ts);

struct StatsFilter {
    std::optional<Provenance> provenance;
    std::optional<Direction> direction;
    std::optional<std::string> model_id;
};

struct RatingStats {
    double mean = 0.0;
    double std = 0.0;       // sample (N-1); 0 for a single rating
    double real_pct = 0.0;  // 100 * judged_real / n
    std::size_t n = 0;
};

/// Throws mrct::Error if no rating matches the filter.
RatingStats session_stats(const StudySession& s, const StatsFilter& filter = {});

struct ConcordanceResult {
    double pearson_rho = 0.0;
    double ccc_rho_c = 0.0;
    double c_beta = 0.0;  // ccc_rho_c / pearson_rho
};

/// Pearson correlation, Lin's concordance 2 s_xy / (s_x^2 + s_y^2 + (mx - my)^2),
/// and the bias-correction factor, with sample (N-1) moments throughout.
ConcordanceResult concordance(std::span<const double> x, std::span<const double> y);

/// One append-only log line.
struct RatingEvent {
    Timestamp ts{};
    std::string token;
    int realism = 0;
    bool judged_real = false;
    std::string rater_id;
};

/// `{"ts":...,"token":...,"realism":...,"judged_real":...,"rater_id":...}`
/// without a trailing newline.
std::string serialize_event(const RatingEvent& e);
RatingEvent parse_event(std::string_view line);

/// Reads a newline-delimited log. An unterminated final line that fails to
/// parse (a torn write) is ignored.
std::vector<RatingEvent> read_event_log(const std::filesystem::path& path);

/// Applies events in order to a session definition.
void replay(StudySession& s, const std::vector<RatingEvent>& events);

/// Session definition (no ratings): identical for identical seed + manifest.
std::string session_definition_json(const StudySession& s);
StudySession parse_session_definition(std::string_view text);
/// Definition plus ratings, for comparing states.
std::string session_state_json(const StudySession& s);

inline constexpr std::string_view kSessionFile = "session.json";
inline constexpr std::string_view kEventLogFile = "events.jsonl";

/// Writes session.json and an empty events.jsonl into `dir` (created if
/// needed). Refuses to overwrite an existing session.
void write_session_dir(const StudySession& s, const std::filesystem::path& dir);

/// session.json with events.jsonl replayed.
StudySession load_session_dir(const std::filesystem::path& dir);

/// Serializes rating submissions for one session: each accepted rating is
/// appended and flushed to the event log before the in-memory state changes.
class SessionStore {
public:
    explicit SessionStore(std::filesystem::path dir);

    /// Throws RatingError on rejection; the log is untouched in that case.
    void submit(std::string_view token, int realism, bool judged_real);
    void submit(std::string_view token, int realism, bool judged_real, Timestamp ts);

    StudySession snapshot() const;
    const std::filesystem::path& dir() const noexcept { return dir_; }

private:
    std::filesystem::path dir_;
    mutable std::mutex mutex_;
    StudySession session_;
};

// ---- analysis ---------------------------------------------------------------

/// Perceptual-study row: one per (direction, model) for generated images and
/// one per direction for ground truth.
struct PerceptualRow {
    Direction direction = Direction::MR2CT;
    Provenance provenance = Provenance::GENERATED;
    std::string label;  // model id, or "Ground truth"
    RatingStats stats;
};

std::vector<PerceptualRow> perceptual_table(const StudySession& s);

/// Agreement row. "generated vs ground truth" pairs a rater's realism scores
/// for items sharing a pair_id; "inter-rater" pairs two raters' scores for the
/// same image.
struct AgreementRow {
    std::string rater;
    std::string comparison;
    std::optional<Direction> direction;  // empty = both directions
    std::size_t n = 0;
    std::optional<ConcordanceResult> result;
    std::string note;  // reason when result is empty
};

std::vector<AgreementRow> agreement_table(const StudySession& s,
                                          const StudySession* second = nullptr);

std::string render_study_report(const StudySession& s, const StudySession* second,
                                ReportFormat format);

}  // namespace mrct::study
