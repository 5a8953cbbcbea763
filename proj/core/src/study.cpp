#include "mrct/study.hpp"

#include <unistd.h>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ctime>
#include <fstream>
#include <random>
#include <set>
#include <sstream>

#include <json.hpp>

#include "mrct/csv.hpp"
#include "mrct/image.hpp"

namespace mrct::study {

using nlohmann::json;
using nlohmann::ordered_json;

std::string_view to_string(Provenance p) {
    return p == Provenance::GENERATED ? "GENERATED" : "GROUND_TRUTH";
}

std::optional<Provenance> parse_provenance(std::string_view token) {
    if (token == "GENERATED" || token == "generated") return Provenance::GENERATED;
    if (token == "GROUND_TRUTH" || token == "ground_truth") return Provenance::GROUND_TRUTH;
    return std::nullopt;
}

std::string format_utc(Timestamp ts) {
    const auto secs = std::chrono::floor<std::chrono::seconds>(ts);
    const auto ms = (ts - secs).count();
    const std::time_t t = std::chrono::system_clock::to_time_t(secs);
    std::tm tm{};
    gmtime_r(&t, &tm);
    char buf[64];
    std::snprintf(buf, sizeof buf, "%04d-%02d-%02dT%02d:%02d:%02d.%03dZ", tm.tm_year + 1900,
                  tm.tm_mon + 1, tm.tm_mday, tm.tm_hour, tm.tm_min, tm.tm_sec,
                  static_cast<int>(ms));
    return buf;
}

Timestamp parse_utc(std::string_view text) {
    std::tm tm{};
    int ms = 0;
    int consumed = 0;
    const std::string s(text);
    if (std::sscanf(s.c_str(), "%4d-%2d-%2dT%2d:%2d:%2d.%3dZ%n", &tm.tm_year, &tm.tm_mon,
                    &tm.tm_mday, &tm.tm_hour, &tm.tm_min, &tm.tm_sec, &ms, &consumed) != 7 ||
        static_cast<std::size_t>(consumed) != s.size())
        throw Error("timestamp: expected YYYY-MM-DDTHH:MM:SS.mmmZ, got '" + s + "'");
    tm.tm_year -= 1900;
    tm.tm_mon -= 1;
    const std::time_t t = timegm(&tm);
    return std::chrono::time_point_cast<std::chrono::milliseconds>(
               std::chrono::system_clock::from_time_t(t)) +
           std::chrono::milliseconds(ms);
}

// ---- manifest ---------------------------------------------------------------

std::vector<ManifestEntry> parse_study_manifest(std::string_view csv_text,
                                                const std::filesystem::path& base_dir) {
    const auto rows = csv::parse(csv_text);
    if (rows.empty()) throw Error("study manifest: empty file");
    std::map<std::string, std::size_t> column;
    for (std::size_t i = 0; i < rows[0].size(); ++i) column[rows[0][i]] = i;
    for (const char* required : {"image_path", "provenance", "direction"})
        if (!column.contains(required))
            throw Error(std::string("study manifest: missing required column '") + required + "'");

    std::vector<ManifestEntry> entries;
    std::set<std::string> seen;
    for (std::size_t line = 1; line < rows.size(); ++line) {
        const auto& row = rows[line];
        const std::string where = " (row " + std::to_string(line + 1) + ")";
        auto cell = [&](const char* name) -> std::string {
            const auto it = column.find(name);
            if (it == column.end() || it->second >= row.size()) return {};
            return row[it->second];
        };
        ManifestEntry e;
        const std::string path = cell("image_path");
        if (path.empty()) throw Error("study manifest: empty image_path" + where);
        std::filesystem::path p(path);
        if (!p.is_absolute() && !base_dir.empty()) p = base_dir / p;
        e.image_path = p.lexically_normal().string();

        const auto prov = parse_provenance(cell("provenance"));
        if (!prov) throw Error("study manifest: unknown provenance '" + cell("provenance") + "'" + where);
        e.provenance = *prov;
        const auto dir = parse_direction(cell("direction"));
        if (!dir) throw Error("study manifest: unknown direction '" + cell("direction") + "'" + where);
        e.direction = *dir;
        e.model_id = cell("model_id");
        e.pair_id = cell("pair_id");
        if (!seen.insert(e.image_path).second)
            throw Error("study manifest: duplicate image '" + path + "'" + where);
        entries.push_back(std::move(e));
    }
    if (entries.empty()) throw Error("study manifest: no images");
    return entries;
}

std::vector<ManifestEntry> load_study_manifest(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("study manifest: cannot open '" + path.string() + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_study_manifest(buf.str(), std::filesystem::absolute(path).parent_path());
}

// ---- session ----------------------------------------------------------------

const StudyItem* StudySession::find(std::string_view token) const {
    for (const auto& item : items)
        if (item.token == token) return &item;
    return nullptr;
}

std::optional<std::size_t> StudySession::next_unrated() const {
    for (std::size_t i = 0; i < items.size(); ++i)
        if (!ratings.contains(items[i].token)) return i;
    return std::nullopt;
}

namespace {

// Uniform in [0, bound) from raw 64-bit draws; rejects the biased low tail.
std::uint64_t uniform_below(std::mt19937_64& rng, std::uint64_t bound) {
    const std::uint64_t threshold = (0 - bound) % bound;
    while (true) {
        const std::uint64_t x = rng();
        if (x >= threshold) return x % bound;
    }
}

std::string hex16(std::uint64_t v) {
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
    return buf;
}

}  // namespace

StudySession build_session(const std::vector<ManifestEntry>& manifest, std::uint64_t seed,
                           std::string rater_id, const BuildOptions& opts) {
    if (manifest.empty()) throw Error("study: empty manifest");
    if (rater_id.empty()) throw Error("study: rater id is required");
    if (opts.verify_images)
        for (const auto& e : manifest) load_image(e.image_path);

    std::mt19937_64 rng(seed);
    StudySession s;
    s.seed = seed;
    s.rater_id = std::move(rater_id);
    s.session_id = "s-" + hex16(rng());

    std::vector<std::size_t> order(manifest.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    for (std::size_t i = order.size() - 1; i > 0; --i) {
        const auto j = static_cast<std::size_t>(uniform_below(rng, i + 1));
        std::swap(order[i], order[j]);
    }

    std::set<std::string> tokens;
    s.items.reserve(order.size());
    for (std::size_t idx : order) {
        std::string token;
        do {
            token = hex16(rng());
        } while (!tokens.insert(token).second);
        s.items.push_back({std::move(token), manifest[idx]});
    }
    return s;
}

void check_rating(const StudySession& s, std::string_view token, int realism) {
    if (!s.find(token))
        throw RatingError(RatingErrc::UnknownToken, "unknown token '" + std::string(token) + "'");
    if (s.ratings.contains(std::string(token)))
        throw RatingError(RatingErrc::AlreadyRated, "item already rated");
    if (realism < 1 || realism > 4)
        throw RatingError(RatingErrc::OutOfRange,
                          "realism " + std::to_string(realism) + " out of range [1, 4]");
}

void record_rating(StudySession& s, std::string_view token, int realism, bool judged_real,
                   Timestamp ts) {
    check_rating(s, token, realism);
    s.ratings.emplace(std::string(token), RatingRecord{realism, judged_real, ts});
}

RatingStats session_stats(const StudySession& s, const StatsFilter& filter) {
    std::vector<double> scores;
    std::size_t judged_real = 0;
    for (const auto& item : s.items) {
        const auto it = s.ratings.find(item.token);
        if (it == s.ratings.end()) continue;
        if (filter.provenance && item.source.provenance != *filter.provenance) continue;
        if (filter.direction && item.source.direction != *filter.direction) continue;
        if (filter.model_id && item.source.model_id != *filter.model_id) continue;
        scores.push_back(it->second.realism);
        if (it->second.judged_real) ++judged_real;
    }
    if (scores.empty()) throw Error("stats: no ratings match the filter");

    RatingStats r;
    r.n = scores.size();
    double sum = 0.0;
    for (double v : scores) sum += v;
    r.mean = sum / static_cast<double>(r.n);
    if (r.n > 1) {
        double ss = 0.0;
        for (double v : scores) ss += (v - r.mean) * (v - r.mean);
        r.std = std::sqrt(ss / static_cast<double>(r.n - 1));
    }
    r.real_pct = 100.0 * static_cast<double>(judged_real) / static_cast<double>(r.n);
    return r;
}

ConcordanceResult concordance(std::span<const double> x, std::span<const double> y) {
    if (x.size() != y.size()) throw Error("concordance: length mismatch");
    if (x.size() < 3) throw Error("concordance: need at least 3 pairs");
    const double n = static_cast<double>(x.size());
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        mx += x[i];
        my += y[i];
    }
    mx /= n;
    my /= n;
    double sxx = 0.0, syy = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sxx += (x[i] - mx) * (x[i] - mx);
        syy += (y[i] - my) * (y[i] - my);
        sxy += (x[i] - mx) * (y[i] - my);
    }
    sxx /= n - 1.0;
    syy /= n - 1.0;
    sxy /= n - 1.0;
    if (sxx == 0.0 || syy == 0.0) throw Error("concordance: zero variance");

    const double shift = (mx - my) * (mx - my);
    ConcordanceResult r;
    r.pearson_rho = std::clamp(sxy / std::sqrt(sxx * syy), -1.0, 1.0);
    r.ccc_rho_c = 2.0 * sxy / (sxx + syy + shift);
    r.c_beta = 2.0 * std::sqrt(sxx) * std::sqrt(syy) / (sxx + syy + shift);
    return r;
}

// ---- event log --------------------------------------------------------------

std::string serialize_event(const RatingEvent& e) {
    ordered_json j;
    j["ts"] = format_utc(e.ts);
    j["token"] = e.token;
    j["realism"] = e.realism;
    j["judged_real"] = e.judged_real;
    j["rater_id"] = e.rater_id;
    return j.dump();
}

RatingEvent parse_event(std::string_view line) {
    try {
        const json j = json::parse(line);
        RatingEvent e;
        e.ts = parse_utc(j.at("ts").get<std::string>());
        e.token = j.at("token").get<std::string>();
        e.realism = j.at("realism").get<int>();
        e.judged_real = j.at("judged_real").get<bool>();
        e.rater_id = j.at("rater_id").get<std::string>();
        return e;
    } catch (const json::exception& ex) {
        throw Error(std::string("event log: malformed record: ") + ex.what());
    }
}

namespace {

std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("cannot open '" + path.string() + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

struct LogScan {
    std::vector<RatingEvent> events;
    std::size_t good_bytes = 0;  // prefix made of complete lines
    bool torn_tail = false;      // trailing fragment without newline that does not parse
    bool unterminated_tail = false;
};

LogScan scan_log(const std::string& text) {
    LogScan scan;
    std::size_t pos = 0;
    while (pos < text.size()) {
        const std::size_t nl = text.find('\n', pos);
        if (nl == std::string::npos) {
            const std::string_view tail(text.data() + pos, text.size() - pos);
            try {
                scan.events.push_back(parse_event(tail));
                scan.unterminated_tail = true;
            } catch (const Error&) {
                scan.torn_tail = true;
            }
            break;
        }
        const std::string_view line(text.data() + pos, nl - pos);
        if (!line.empty() && line != "\r") scan.events.push_back(parse_event(line));
        pos = nl + 1;
        scan.good_bytes = pos;
    }
    return scan;
}

}  // namespace

std::vector<RatingEvent> read_event_log(const std::filesystem::path& path) {
    return scan_log(read_file(path)).events;
}

void replay(StudySession& s, const std::vector<RatingEvent>& events) {
    for (const auto& e : events) {
        if (e.rater_id != s.rater_id)
            throw Error("event log: rater '" + e.rater_id + "' does not own session " + s.session_id);
        record_rating(s, e.token, e.realism, e.judged_real, e.ts);
    }
}

namespace {

ordered_json definition(const StudySession& s) {
    ordered_json j;
    j["format"] = "mrct-study/1";
    j["session_id"] = s.session_id;
    j["seed"] = s.seed;
    j["rater_id"] = s.rater_id;
    ordered_json items = ordered_json::array();
    for (const auto& item : s.items) {
        ordered_json it;
        it["token"] = item.token;
        it["image_path"] = item.source.image_path;
        it["provenance"] = std::string(to_string(item.source.provenance));
        it["direction"] = std::string(to_string(item.source.direction));
        it["model_id"] = item.source.model_id;
        it["pair_id"] = item.source.pair_id;
        items.push_back(std::move(it));
    }
    j["items"] = std::move(items);
    return j;
}

}  // namespace

std::string session_definition_json(const StudySession& s) {
    return definition(s).dump(2) + "\n";
}

StudySession parse_session_definition(std::string_view text) {
    try {
        const json j = json::parse(text);
        if (j.value("format", "") != "mrct-study/1") throw Error("session: unrecognized format tag");
        StudySession s;
        s.session_id = j.at("session_id").get<std::string>();
        s.seed = j.at("seed").get<std::uint64_t>();
        s.rater_id = j.at("rater_id").get<std::string>();
        for (const auto& it : j.at("items")) {
            StudyItem item;
            item.token = it.at("token").get<std::string>();
            item.source.image_path = it.at("image_path").get<std::string>();
            const auto prov = parse_provenance(it.at("provenance").get<std::string>());
            const auto dir = parse_direction(it.at("direction").get<std::string>());
            if (!prov || !dir) throw Error("session: bad item provenance or direction");
            item.source.provenance = *prov;
            item.source.direction = *dir;
            item.source.model_id = it.value("model_id", "");
            item.source.pair_id = it.value("pair_id", "");
            s.items.push_back(std::move(item));
        }
        return s;
    } catch (const json::exception& e) {
        throw Error(std::string("session: malformed JSON: ") + e.what());
    }
}

std::string session_state_json(const StudySession& s) {
    ordered_json j = definition(s);
    ordered_json ratings = ordered_json::array();
    for (const auto& item : s.items) {
        const auto it = s.ratings.find(item.token);
        if (it == s.ratings.end()) continue;
        ordered_json r;
        r["token"] = item.token;
        r["realism"] = it->second.realism;
        r["judged_real"] = it->second.judged_real;
        r["ts"] = format_utc(it->second.timestamp);
        ratings.push_back(std::move(r));
    }
    j["ratings"] = std::move(ratings);
    return j.dump(2) + "\n";
}

void write_session_dir(const StudySession& s, const std::filesystem::path& dir) {
    std::filesystem::create_directories(dir);
    const auto def = dir / kSessionFile;
    if (std::filesystem::exists(def))
        throw Error("study: '" + def.string() + "' already exists; refusing to overwrite");
    {
        std::ofstream out(def, std::ios::binary);
        out << session_definition_json(s);
        if (!out) throw Error("study: cannot write '" + def.string() + "'");
    }
    std::ofstream log(dir / kEventLogFile, std::ios::binary | std::ios::app);
    if (!log) throw Error("study: cannot create event log in '" + dir.string() + "'");
}

StudySession load_session_dir(const std::filesystem::path& dir) {
    StudySession s = parse_session_definition(read_file(dir / kSessionFile));
    const auto log = dir / kEventLogFile;
    if (std::filesystem::exists(log)) replay(s, read_event_log(log));
    return s;
}

// ---- store ------------------------------------------------------------------

SessionStore::SessionStore(std::filesystem::path dir) : dir_(std::move(dir)) {
    session_ = parse_session_definition(read_file(dir_ / kSessionFile));
    const auto log = dir_ / kEventLogFile;
    if (std::filesystem::exists(log)) {
        const std::string text = read_file(log);
        const LogScan scan = scan_log(text);
        replay(session_, scan.events);
        // Repair the tail so later appends start on a fresh line.
        if (scan.torn_tail) {
            std::filesystem::resize_file(log, scan.good_bytes);
        } else if (scan.unterminated_tail) {
            std::ofstream(log, std::ios::binary | std::ios::app) << '\n';
        }
    }
}

void SessionStore::submit(std::string_view token, int realism, bool judged_real) {
    submit(token, realism, judged_real,
           std::chrono::time_point_cast<std::chrono::milliseconds>(std::chrono::system_clock::now()));
}

void SessionStore::submit(std::string_view token, int realism, bool judged_real, Timestamp ts) {
    std::lock_guard lock(mutex_);
    check_rating(session_, token, realism);

    const std::string line =
        serialize_event({ts, std::string(token), realism, judged_real, session_.rater_id}) + "\n";
    const auto log = dir_ / kEventLogFile;
    std::FILE* f = std::fopen(log.c_str(), "ab");
    if (!f) throw Error("study: cannot open event log '" + log.string() + "'");
    const bool ok = std::fwrite(line.data(), 1, line.size(), f) == line.size() &&
                    std::fflush(f) == 0 && ::fsync(::fileno(f)) == 0;
    std::fclose(f);
    if (!ok) throw Error("study: failed to persist rating to '" + log.string() + "'");

    record_rating(session_, token, realism, judged_real, ts);
}

StudySession SessionStore::snapshot() const {
    std::lock_guard lock(mutex_);
    return session_;
}

// ---- analysis ---------------------------------------------------------------

std::vector<PerceptualRow> perceptual_table(const StudySession& s) {
    std::vector<PerceptualRow> rows;
    for (Direction d : {Direction::MR2CT, Direction::CT2MR}) {
        std::set<std::string> models;
        bool has_truth = false;
        for (const auto& item : s.items) {
            if (item.source.direction != d || !s.ratings.contains(item.token)) continue;
            if (item.source.provenance == Provenance::GENERATED) {
                models.insert(item.source.model_id);
            } else {
                has_truth = true;
            }
        }
        for (const auto& m : models)
            rows.push_back({d, Provenance::GENERATED, m.empty() ? "generated" : m,
                            session_stats(s, {Provenance::GENERATED, d, m})});
        if (has_truth)
            rows.push_back({d, Provenance::GROUND_TRUTH, "Ground truth",
                            session_stats(s, {Provenance::GROUND_TRUTH, d, std::nullopt})});
    }
    return rows;
}

namespace {

AgreementRow agreement(std::string rater, std::string comparison, std::optional<Direction> d,
                       const std::vector<double>& x, const std::vector<double>& y) {
    AgreementRow row{std::move(rater), std::move(comparison), d, x.size(), std::nullopt, {}};
    try {
        row.result = concordance(x, y);
    } catch (const Error& e) {
        row.note = e.what();
    }
    return row;
}

}  // namespace

std::vector<AgreementRow> agreement_table(const StudySession& s, const StudySession* second) {
    std::vector<AgreementRow> rows;
    const std::optional<Direction> scopes[] = {Direction::MR2CT, Direction::CT2MR, std::nullopt};

    auto gen_vs_truth = [&](const StudySession& sess) {
        for (const auto& scope : scopes) {
            // pair_id -> (ground truth score, generated score)
            std::map<std::string, std::pair<std::optional<double>, std::optional<double>>> pairs;
            for (const auto& item : sess.items) {
                if (item.source.pair_id.empty()) continue;
                if (scope && item.source.direction != *scope) continue;
                const auto it = sess.ratings.find(item.token);
                if (it == sess.ratings.end()) continue;
                auto& slot = pairs[item.source.pair_id];
                (item.source.provenance == Provenance::GROUND_TRUTH ? slot.first : slot.second) =
                    it->second.realism;
            }
            std::vector<double> x, y;
            for (const auto& [id, p] : pairs)
                if (p.first && p.second) {
                    x.push_back(*p.first);
                    y.push_back(*p.second);
                }
            if (!x.empty() || !scope)
                rows.push_back(agreement(sess.rater_id, "generated vs ground truth", scope, x, y));
        }
    };
    gen_vs_truth(s);
    if (second) {
        gen_vs_truth(*second);
        std::map<std::string, double> other;
        for (const auto& item : second->items) {
            const auto it = second->ratings.find(item.token);
            if (it != second->ratings.end()) other[item.source.image_path] = it->second.realism;
        }
        for (const auto& scope : scopes) {
            std::vector<double> x, y;
            for (const auto& item : s.items) {
                if (scope && item.source.direction != *scope) continue;
                const auto it = s.ratings.find(item.token);
                const auto jt = other.find(item.source.image_path);
                if (it == s.ratings.end() || jt == other.end()) continue;
                x.push_back(it->second.realism);
                y.push_back(jt->second);
            }
            if (!x.empty() || !scope)
                rows.push_back(agreement(s.rater_id + " vs " + second->rater_id, "inter-rater",
                                         scope, x, y));
        }
    }
    return rows;
}

namespace {

std::string fmt(double v, int decimals) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*f", decimals, v);
    return buf;
}

std::string full(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::string scope_name(const std::optional<Direction>& d) {
    return d ? std::string(to_string(*d)) : "all";
}

}  // namespace

std::string render_study_report(const StudySession& s, const StudySession* second,
                                ReportFormat format) {
    std::vector<const StudySession*> sessions{&s};
    if (second) sessions.push_back(second);
    const auto agreement = agreement_table(s, second);

    if (format == ReportFormat::Json) {
        ordered_json doc;
        ordered_json perceptual = ordered_json::array();
        for (const auto* sess : sessions)
            for (const auto& r : perceptual_table(*sess)) {
                ordered_json j;
                j["rater"] = sess->rater_id;
                j["direction"] = std::string(to_string(r.direction));
                j["provenance"] = std::string(to_string(r.provenance));
                j["label"] = r.label;
                j["n"] = r.stats.n;
                j["mean"] = r.stats.mean;
                j["std"] = r.stats.std;
                j["real_pct"] = r.stats.real_pct;
                perceptual.push_back(std::move(j));
            }
        ordered_json agree = ordered_json::array();
        for (const auto& r : agreement) {
            ordered_json j;
            j["rater"] = r.rater;
            j["comparison"] = r.comparison;
            j["direction"] = scope_name(r.direction);
            j["n"] = r.n;
            if (r.result) {
                j["pearson_rho"] = r.result->pearson_rho;
                j["ccc_rho_c"] = r.result->ccc_rho_c;
                j["c_beta"] = r.result->c_beta;
            } else {
                j["note"] = r.note;
            }
            agree.push_back(std::move(j));
        }
        doc["perceptual"] = std::move(perceptual);
        doc["agreement"] = std::move(agree);
        return doc.dump(2) + "\n";
    }

    if (format == ReportFormat::Csv) {
        std::string out = "table,rater,direction,label,n,mean,std,real_pct,pearson_rho,ccc_rho_c,c_beta,note\n";
        for (const auto* sess : sessions)
            for (const auto& r : perceptual_table(*sess))
                out += csv::join({"perceptual", sess->rater_id, std::string(to_string(r.direction)),
                                  r.label, std::to_string(r.stats.n), full(r.stats.mean),
                                  full(r.stats.std), full(r.stats.real_pct), "", "", "", ""}) +
                       "\n";
        for (const auto& r : agreement)
            out += csv::join({"agreement", r.rater, scope_name(r.direction), r.comparison,
                              std::to_string(r.n), "", "", "",
                              r.result ? full(r.result->pearson_rho) : "",
                              r.result ? full(r.result->ccc_rho_c) : "",
                              r.result ? full(r.result->c_beta) : "", r.note}) +
                   "\n";
        return out;
    }

    std::string out;
    for (const auto* sess : sessions) {
        out += "## Perceptual study (rater " + sess->rater_id + ")\n\n";
        out += "| Direction | Images | N | Mean | Std | Real% |\n|---|---|---|---|---|---|\n";
        for (const auto& r : perceptual_table(*sess))
            out += "| " + std::string(to_string(r.direction)) + " | " + r.label + " | " +
                   std::to_string(r.stats.n) + " | " + fmt(r.stats.mean, 2) + " | " +
                   fmt(r.stats.std, 2) + " | " + fmt(r.stats.real_pct, 3) + "% |\n";
        out += "\n";
    }
    out += "## Agreement\n\n";
    out += "| Rater | Comparison | Direction | N | Pearson ρ | (ρC) | (Cβ) |\n"
           "|---|---|---|---|---|---|---|\n";
    for (const auto& r : agreement) {
        out += "| " + r.rater + " | " + r.comparison + " | " + scope_name(r.direction) + " | " +
               std::to_string(r.n) + " | ";
        if (r.result) {
            out += fmt(r.result->pearson_rho, 3) + " | " + fmt(r.result->ccc_rho_c, 3) + " | " +
                   fmt(r.result->c_beta, 3) + " |\n";
        } else {
            out += "n/a | n/a | n/a |\n";
        }
    }
    return out;
}

}  // namespace mrct::study
