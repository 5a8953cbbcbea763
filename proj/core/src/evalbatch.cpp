#include "mrct/evalbatch.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <limits>
#include <thread>
#include <tuple>

#include <json.hpp>

#include "mrct/csv.hpp"
#include "mrct/error.hpp"

namespace mrct::eval {

using nlohmann::json;

PairOutcome evaluate_pair(const PairRecord& r, const EvalOptions& opts,
                          const std::filesystem::path& base_dir) {
    auto resolve = [&](const std::string& p) {
        std::filesystem::path path(p);
        return path.is_absolute() || base_dir.empty() ? path : base_dir / path;
    };
    try {
        const ImagePlane reference = load_image(resolve(r.reference_path));
        const ImagePlane generated = load_image(resolve(r.generated_path));
        if (!reference.same_shape(generated))
            throw Error("dimension mismatch: reference " + std::to_string(reference.width()) + "x" +
                        std::to_string(reference.height()) + ", generated " +
                        std::to_string(generated.width()) + "x" +
                        std::to_string(generated.height()));
        return PairResult{r, metrics::compute(reference, generated, opts.selection, opts.ssim,
                                              opts.vif)};
    } catch (const Error& e) {
        return PairError{r, e.what()};
    }
}

BatchResults evaluate_manifest(const EvalManifest& manifest, const EvalOptions& opts) {
    const std::size_t n = manifest.records.size();
    std::vector<std::optional<PairOutcome>> outcomes(n);
    unsigned threads = opts.threads ? opts.threads : std::max(1u, std::thread::hardware_concurrency());
    threads = static_cast<unsigned>(std::min<std::size_t>(threads, std::max<std::size_t>(n, 1)));

    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t i = next.fetch_add(1); i < n; i = next.fetch_add(1))
            outcomes[i] = evaluate_pair(manifest.records[i], opts, manifest.base_dir);
    };
    if (threads <= 1) {
        worker();
    } else {
        std::vector<std::jthread> pool;
        pool.reserve(threads);
        for (unsigned t = 0; t < threads; ++t) pool.emplace_back(worker);
    }

    BatchResults batch;
    for (auto& o : outcomes) {
        if (auto* ok = std::get_if<PairResult>(&*o)) {
            batch.results.push_back(std::move(*ok));
        } else {
            batch.errors.push_back(std::get<PairError>(std::move(*o)));
        }
    }
    return batch;
}

const std::optional<Stat>& AggregateRow::stat(metrics::Metric m) const {
    switch (m) {
    case metrics::Metric::PSNR: return psnr;
    case metrics::Metric::SSIM: return ssim;
    case metrics::Metric::UQI: return uqi;
    case metrics::Metric::VIF: return vif;
    }
    return psnr;
}

Stat summarize(const std::vector<double>& values) {
    if (values.empty()) throw Error("summarize: no values");
    Stat s;
    s.n = values.size();
    double sum = 0.0;
    for (double v : values) sum += v;
    s.avg = sum / static_cast<double>(s.n);
    if (s.n > 1) {
        double ss = 0.0;
        for (double v : values) ss += (v - s.avg) * (v - s.avg);
        s.std = std::sqrt(ss / static_cast<double>(s.n - 1));
    }
    return s;
}

namespace {

auto record_key(const PairRecord& r) {
    return std::tie(r.model_id, r.direction, r.generated_path, r.reference_path, r.subject_id);
}

std::optional<Stat> summarize_if_any(const std::vector<double>& values) {
    if (values.empty()) return std::nullopt;
    return summarize(values);
}

}  // namespace

std::vector<AggregateRow> aggregate(std::vector<PairResult> results) {
    if (results.empty()) throw Error("aggregate: no results");
    std::sort(results.begin(), results.end(), [](const PairResult& a, const PairResult& b) {
        return record_key(a.record) < record_key(b.record);
    });

    std::vector<AggregateRow> rows;
    std::size_t begin = 0;
    while (begin < results.size()) {
        std::size_t end = begin;
        const auto& head = results[begin].record;
        while (end < results.size() && results[end].record.model_id == head.model_id &&
               results[end].record.direction == head.direction)
            ++end;

        AggregateRow row;
        row.model_id = head.model_id;
        row.direction = head.direction;
        row.n_pairs = end - begin;
        std::vector<double> psnr, ssim, uqi, vif;
        for (std::size_t i = begin; i < end; ++i) {
            const auto& m = results[i].metrics;
            if (m.psnr_db) {
                if (std::isinf(*m.psnr_db)) {
                    ++row.psnr_infinite;
                } else {
                    psnr.push_back(*m.psnr_db);
                }
            }
            if (m.ssim) ssim.push_back(*m.ssim);
            if (m.uqi) uqi.push_back(*m.uqi);
            if (m.vif) vif.push_back(*m.vif);
        }
        row.psnr = summarize_if_any(psnr);
        row.ssim = summarize_if_any(ssim);
        row.uqi = summarize_if_any(uqi);
        row.vif = summarize_if_any(vif);
        rows.push_back(std::move(row));
        begin = end;
    }
    return rows;
}

std::vector<std::string> rank_models(const std::vector<AggregateRow>& rows,
                                     std::string_view metric, Direction direction) {
    const auto m = metrics::parse_metric(metric);
    if (!m) throw Error("rank: unknown metric '" + std::string(metric) + "'");
    std::vector<const AggregateRow*> picked;
    for (const auto& r : rows)
        if (r.direction == direction) picked.push_back(&r);
    std::sort(picked.begin(), picked.end(), [&](const AggregateRow* a, const AggregateRow* b) {
        const auto& sa = a->stat(*m);
        const auto& sb = b->stat(*m);
        if (sa.has_value() != sb.has_value()) return sa.has_value();
        if (sa && sa->avg != sb->avg) return sa->avg > sb->avg;
        return a->model_id < b->model_id;
    });
    std::vector<std::string> out;
    out.reserve(picked.size());
    for (const auto* r : picked) out.push_back(r->model_id);
    return out;
}

namespace {

std::string fixed(double v, int decimals) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*f", decimals, v);
    return buf;
}

std::string full(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::string cell(const std::optional<Stat>& s, int decimals) {
    if (!s) return "n/a";
    return fixed(s->avg, decimals) + " ±" + fixed(s->std, decimals);
}

std::vector<Direction> directions_present(const std::vector<AggregateRow>& rows) {
    std::vector<Direction> dirs;
    for (Direction d : {Direction::MR2CT, Direction::CT2MR})
        if (std::any_of(rows.begin(), rows.end(), [d](const auto& r) { return r.direction == d; }))
            dirs.push_back(d);
    return dirs;
}

json stat_json(const std::optional<Stat>& s) {
    if (!s) return nullptr;
    return json{{"avg", s->avg}, {"std", s->std}, {"n", s->n}};
}

std::optional<Stat> stat_from_json(const json& j) {
    if (j.is_null()) return std::nullopt;
    return Stat{j.at("avg").get<double>(), j.at("std").get<double>(), j.at("n").get<std::size_t>()};
}

std::string render_markdown(const std::vector<AggregateRow>& rows) {
    std::string out;
    for (Direction d : directions_present(rows)) {
        if (!out.empty()) out += "\n";
        out += "## " + std::string(to_string(d)) + "\n\n";
        out += "| Model | PSNR | SSIM | UQI | VIF |\n";
        out += "|---|---|---|---|---|\n";
        std::vector<std::string> infinite;
        for (const auto& r : rows) {
            if (r.direction != d) continue;
            out += "| " + r.model_id + " | " + cell(r.psnr, 2) + " | " + cell(r.ssim, 2) + " | " +
                   cell(r.uqi, 2) + " | " + cell(r.vif, 3) + " |\n";
            if (r.psnr_infinite)
                infinite.push_back(r.model_id + " (" + std::to_string(r.psnr_infinite) + ")");
        }
        if (!infinite.empty()) {
            out += "\nPSNR excludes identical pairs with infinite PSNR: ";
            for (std::size_t i = 0; i < infinite.size(); ++i)
                out += (i ? ", " : "") + infinite[i];
            out += "\n";
        }
    }
    return out;
}

std::string render_csv(const std::vector<AggregateRow>& rows) {
    std::string out =
        "model_id,direction,n_pairs,psnr_avg,psnr_std,ssim_avg,ssim_std,uqi_avg,uqi_std,"
        "vif_avg,vif_std,psnr_infinite\n";
    for (const auto& r : rows) {
        csv::Row line{r.model_id, std::string(to_string(r.direction)), std::to_string(r.n_pairs)};
        for (const auto* s : {&r.psnr, &r.ssim, &r.uqi, &r.vif}) {
            line.push_back(*s ? full((*s)->avg) : "");
            line.push_back(*s ? full((*s)->std) : "");
        }
        line.push_back(std::to_string(r.psnr_infinite));
        out += csv::join(line) + "\n";
    }
    return out;
}

std::string render_json(const std::vector<AggregateRow>& rows) {
    json arr = json::array();
    for (const auto& r : rows) {
        arr.push_back({{"model_id", r.model_id},
                       {"direction", std::string(to_string(r.direction))},
                       {"n_pairs", r.n_pairs},
                       {"psnr", stat_json(r.psnr)},
                       {"ssim", stat_json(r.ssim)},
                       {"uqi", stat_json(r.uqi)},
                       {"vif", stat_json(r.vif)},
                       {"psnr_infinite", r.psnr_infinite}});
    }
    return json{{"rows", arr}}.dump(2) + "\n";
}

json record_json(const PairRecord& r) {
    json j{{"model_id", r.model_id},
           {"direction", std::string(to_string(r.direction))},
           {"generated_path", r.generated_path},
           {"reference_path", r.reference_path}};
    j["category"] = r.category ? json(std::string(to_string(*r.category))) : json(nullptr);
    j["subject_id"] = r.subject_id ? json(*r.subject_id) : json(nullptr);
    return j;
}

PairRecord record_from_json(const json& j) {
    PairRecord r;
    r.model_id = j.at("model_id").get<std::string>();
    const auto dir = parse_direction(j.at("direction").get<std::string>());
    if (!dir) throw Error("results: unknown direction");
    r.direction = *dir;
    r.generated_path = j.at("generated_path").get<std::string>();
    r.reference_path = j.at("reference_path").get<std::string>();
    if (j.contains("category") && !j["category"].is_null()) {
        r.category = parse_category(j["category"].get<std::string>());
        if (!r.category) throw Error("results: unknown category");
    }
    if (j.contains("subject_id") && !j["subject_id"].is_null())
        r.subject_id = j["subject_id"].get<std::string>();
    return r;
}

}  // namespace

std::string render_report(const std::vector<AggregateRow>& rows, ReportFormat format) {
    if (rows.empty()) throw Error("report: no rows");
    switch (format) {
    case ReportFormat::Markdown: return render_markdown(rows);
    case ReportFormat::Csv: return render_csv(rows);
    case ReportFormat::Json: return render_json(rows);
    }
    throw Error("report: unknown format");
}

std::vector<AggregateRow> parse_report_json(std::string_view text) {
    try {
        const json doc = json::parse(text);
        std::vector<AggregateRow> rows;
        for (const auto& j : doc.at("rows")) {
            AggregateRow r;
            r.model_id = j.at("model_id").get<std::string>();
            const auto dir = parse_direction(j.at("direction").get<std::string>());
            if (!dir) throw Error("report: unknown direction");
            r.direction = *dir;
            r.n_pairs = j.at("n_pairs").get<std::size_t>();
            r.psnr = stat_from_json(j.at("psnr"));
            r.ssim = stat_from_json(j.at("ssim"));
            r.uqi = stat_from_json(j.at("uqi"));
            r.vif = stat_from_json(j.at("vif"));
            r.psnr_infinite = j.at("psnr_infinite").get<std::size_t>();
            rows.push_back(std::move(r));
        }
        return rows;
    } catch (const json::exception& e) {
        throw Error(std::string("report: malformed JSON: ") + e.what());
    }
}

std::string serialize_results(const BatchResults& batch) {
    json pairs = json::array();
    for (const auto& r : batch.results) {
        json j = record_json(r.record);
        json m = json::object();
        if (r.metrics.psnr_db)
            m["psnr_db"] = std::isinf(*r.metrics.psnr_db) ? json("inf") : json(*r.metrics.psnr_db);
        if (r.metrics.ssim) m["ssim"] = *r.metrics.ssim;
        if (r.metrics.uqi) m["uqi"] = *r.metrics.uqi;
        if (r.metrics.vif) m["vif"] = *r.metrics.vif;
        j["metrics"] = std::move(m);
        pairs.push_back(std::move(j));
    }
    json errors = json::array();
    for (const auto& e : batch.errors) {
        json j = record_json(e.record);
        j["error"] = e.message;
        errors.push_back(std::move(j));
    }
    return json{{"format", "mrct-results/1"}, {"pairs", pairs}, {"errors", errors}}.dump(2) + "\n";
}

BatchResults parse_results(std::string_view text) {
    try {
        const json doc = json::parse(text);
        if (doc.value("format", "") != "mrct-results/1")
            throw Error("results: unrecognized format tag");
        BatchResults batch;
        for (const auto& j : doc.at("pairs")) {
            PairResult r{record_from_json(j), {}};
            const auto& m = j.at("metrics");
            if (m.contains("psnr_db")) {
                const auto& v = m["psnr_db"];
                if (v.is_string()) {
                    if (v.get<std::string>() != "inf") throw Error("results: bad psnr marker");
                    r.metrics.psnr_db = std::numeric_limits<double>::infinity();
                } else {
                    r.metrics.psnr_db = v.get<double>();
                }
            }
            if (m.contains("ssim")) r.metrics.ssim = m["ssim"].get<double>();
            if (m.contains("uqi")) r.metrics.uqi = m["uqi"].get<double>();
            if (m.contains("vif")) r.metrics.vif = m["vif"].get<double>();
            batch.results.push_back(std::move(r));
        }
        for (const auto& j : doc.at("errors"))
            batch.errors.push_back({record_from_json(j), j.at("error").get<std::string>()});
        return batch;
    } catch (const json::exception& e) {
        throw Error(std::string("results: malformed JSON: ") + e.what());
    }
}

}  // namespace mrct::eval
