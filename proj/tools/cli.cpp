#include "cli.hpp"

#include <algorithm>
#include <charconv>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include <CLI11.hpp>

#include "mrct/archspec.hpp"
#include "mrct/evalbatch.hpp"
#include "mrct/ganmath.hpp"
#include "mrct/latent.hpp"
#include "mrct/study.hpp"
#include "mrct/study_server.hpp"

namespace mrct::cli {
namespace {

/// Semantic usage problem found after CLI11 accepted the flags.
struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Shortest rendering that reads back as the same double.
std::string num(double v) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::general);
    return {buf, res.ptr};
}

std::string read_text(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("cannot open '" + path + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

void write_text(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    out << text;
    out.close();
    if (!out) throw Error("cannot write '" + path + "'");
}

void emit(const std::string& text, const std::string& path, std::ostream& out) {
    if (path.empty()) {
        out << text;
    } else {
        write_text(path, text);
    }
}

ReportFormat format_from(const std::string& name) {
    const auto f = parse_report_format(name);
    if (!f) throw UsageError("unknown format '" + name + "' (expected md, csv, or json)");
    return *f;
}

/// Numbers separated by whitespace or commas.
std::vector<double> read_numbers(const std::string& path) {
    std::string text = read_text(path);
    std::replace(text.begin(), text.end(), ',', ' ');
    std::istringstream in(text);
    std::vector<double> values;
    std::string tok;
    while (in >> tok) {
        double v = 0.0;
        const auto res = std::from_chars(tok.data(), tok.data() + tok.size(), v);
        if (res.ec != std::errc() || res.ptr != tok.data() + tok.size())
            throw Error("'" + path + "': not a number: '" + tok + "'");
        values.push_back(v);
    }
    return values;
}

// ---- eval / report ------------------------------------------------------------

struct EvalArgs {
    std::string manifest;
    std::string metrics = "psnr,ssim,uqi,vif";
    unsigned threads = 0;
    std::string out;
};

int do_eval(const EvalArgs& a, std::ostream& err) {
    eval::EvalOptions opts;
    try {
        opts.selection = metrics::MetricSelection::parse(a.metrics);
    } catch (const Error& e) {
        throw UsageError(e.what());
    }
    opts.threads = a.threads;
    const auto batch = eval::evaluate_manifest(load_manifest(a.manifest), opts);
    write_text(a.out, eval::serialize_results(batch));
    for (const auto& e : batch.errors)
        err << "mrct eval: " << e.record.model_id << " " << to_string(e.record.direction) << " "
            << e.record.generated_path << ": " << e.message << "\n";
    err << "mrct eval: scored " << batch.results.size() << " pairs, " << batch.errors.size()
        << " failed\n";
    return batch.results.empty() ? kDomainError : kOk;
}

struct ReportArgs {
    std::string in;
    std::string format = "md";
    std::string rank_by;
    std::string out;
};

int do_report(const ReportArgs& a, std::ostream& out) {
    const ReportFormat format = format_from(a.format);
    auto rows = eval::aggregate(eval::parse_results(read_text(a.in)).results);
    if (rows.empty()) throw Error("report: results file holds no scored pairs");
    if (!a.rank_by.empty()) {
        if (!metrics::parse_metric(a.rank_by))
            throw UsageError("unknown metric '" + a.rank_by + "' for --rank-by");
        std::vector<eval::AggregateRow> ranked;
        for (Direction d : {Direction::MR2CT, Direction::CT2MR})
            for (const auto& id : eval::rank_models(rows, a.rank_by, d))
                for (const auto& r : rows)
                    if (r.direction == d && r.model_id == id) ranked.push_back(r);
        rows = std::move(ranked);
    }
    emit(eval::render_report(rows, format), a.out, out);
    return kOk;
}

// ---- arch ---------------------------------------------------------------------

struct ArchArgs {
    std::string spec;
    std::string role;
    std::string input = "3x256x256";
    int c512_stride = 2;
};

std::string layer_token(const arch::LayerSpec& l) {
    const std::string k = std::to_string(l.filters);
    switch (l.kind) {
    case arch::LayerKind::C7S1: return "c7s1-" + k;
    case arch::LayerKind::DOWN: return "d" + k;
    case arch::LayerKind::RES: return "R" + k;
    case arch::LayerKind::UP: return "u" + k;
    case arch::LayerKind::DISC_C: return "C" + k;
    case arch::LayerKind::FINAL_CONV: return "final";
    }
    return "?";
}

std::string pad(std::string s, std::size_t width) {
    if (s.size() < width) s.append(width - s.size(), ' ');
    return s;
}

int do_arch(const ArchArgs& a, std::ostream& out, std::ostream& err) {
    arch::TensorShape input;
    try {
        input = arch::parse_chw(a.input);
    } catch (const Error& e) {
        throw UsageError(e.what());
    }
    const arch::Role role = a.role.empty()             ? arch::infer_role(a.spec)
                            : a.role == "discriminator" ? arch::Role::DISCRIMINATOR
                                                        : arch::Role::GENERATOR;
    const auto spec = arch::parse_arch(a.spec, role, {a.c512_stride});
    const auto shapes = arch::trace_shapes(spec, input);
    const bool disc = role == arch::Role::DISCRIMINATOR;

    std::vector<std::vector<std::string>> table;
    table.push_back({"#", "layer", "kind", "kernel", "stride", "output", "params"});
    if (disc) table.back().push_back("rf");
    std::int64_t channels = input.channels;
    std::int64_t params = 0;
    for (std::size_t i = 0; i < spec.layers.size(); ++i) {
        const auto& l = spec.layers[i];
        params += arch::layer_param_count(l, channels);
        channels = shapes[i].channels;
        const std::string stride = l.stride.den == 1
                                       ? std::to_string(l.stride.num)
                                       : std::to_string(l.stride.num) + "/" + std::to_string(l.stride.den);
        table.push_back({std::to_string(i + 1), layer_token(l), std::string(arch::to_string(l.kind)),
                         std::to_string(l.kernel), stride, arch::to_string(shapes[i]),
                         std::to_string(params)});
        if (disc) {
            arch::ArchSpec prefix{role, {spec.layers.begin(), spec.layers.begin() + i + 1}};
            table.back().push_back(std::to_string(arch::receptive_field(prefix)));
        }
    }
    std::vector<std::size_t> width(table[0].size(), 0);
    for (const auto& row : table)
        for (std::size_t c = 0; c < row.size(); ++c) width[c] = std::max(width[c], row[c].size());
    for (const auto& row : table) {
        std::string line;
        for (std::size_t c = 0; c < row.size(); ++c)
            line += (c ? "  " : "") + (c + 1 == row.size() ? row[c] : pad(row[c], width[c]));
        out << line << "\n";
    }

    out << "\nrole: " << arch::to_string(role) << "\n";
    out << "layers: " << spec.layers.size() << "\n";
    out << "input: " << arch::to_string(input) << "\n";
    out << "output: " << arch::to_string(shapes.back()) << "\n";
    out << "parameters: " << params << "\n";
    if (disc) {
        out << "receptive field: " << arch::receptive_field(spec) << "\n";
    } else {
        const auto check = arch::validate_resolution(spec, input.height);
        out << "resolution: " << (check.ok ? "" : "flagged: ") << check.message << "\n";
        if (!check.ok) err << "mrct arch: warning: " << check.message << "\n";
    }
    return kOk;
}

// ---- loss ---------------------------------------------------------------------

struct LossArgs {
    std::string real, fake;
    std::string x, fgx, y, gfy;
    std::string category;
    double base = 0.001;
    int epoch = 0;
    int total = 200;
    int decay_start = 100;
};

// ---- latent -------------------------------------------------------------------

struct LatentArgs {
    std::string features;
    std::string images;
    std::string out;
    bool score = false;
};

int do_latent(const LatentArgs& a, std::ostream& out) {
    latent::FeatureMatrix m;
    if (!a.features.empty()) {
        m = latent::load_feature_csv(a.features);
    } else {
        const auto manifest = load_manifest(a.images);
        for (const auto& r : manifest.records) {
            m.rows.push_back(latent::extract_features(load_image(manifest.resolve(r.generated_path))));
            m.labels.push_back(target_modality(r.direction));
        }
    }
    const auto proj = latent::pca_fit(m);
    const auto points = latent::project(proj, m);
    write_text(a.out, latent::coordinates_csv(points));
    if (a.score) out << "silhouette " << num(latent::separation_score(points)) << "\n";
    return kOk;
}

// ---- study --------------------------------------------------------------------

struct StudyArgs {
    std::string manifest;
    std::uint64_t seed = 0;
    std::string rater;
    std::string out;
    std::string session;
    std::string second;
    std::string host = "127.0.0.1";
    int port = 8080;
    std::string token;
    std::string static_dir;
    std::string format = "md";
};

int do_study_init(const StudyArgs& a, std::ostream& out) {
    const auto session =
        study::build_session(study::load_study_manifest(a.manifest), a.seed, a.rater);
    study::write_session_dir(session, a.out);
    out << "session " << session.session_id << ": " << session.total() << " items in " << a.out
        << "\n";
    return kOk;
}

int do_study_serve(const StudyArgs& a, std::ostream& err) {
    study::ServerOptions opts;
    opts.host = a.host;
    opts.port = a.port;
    if (!a.token.empty()) opts.bearer_token = a.token;
    if (!a.second.empty()) opts.second_session = a.second;
    if (!a.static_dir.empty()) opts.static_dir = a.static_dir;
    study::StudyServer server(a.session, opts);
    server.bind();
    err << "mrct study: serving session " << server.store().snapshot().session_id << " on http://"
        << a.host << ":" << server.port() << "\n";
    err.flush();
    server.listen();
    return kOk;
}

int do_study_analyze(const StudyArgs& a, std::ostream& out, std::ostream& err) {
    const ReportFormat format = format_from(a.format);
    const study::StudySession first = study::load_session_dir(a.session);
    std::optional<study::StudySession> second;
    if (!a.second.empty()) second = study::load_session_dir(a.second);
    const study::StudySession* second_ptr = second ? &*second : nullptr;
    for (const study::StudySession* s : {&first, second_ptr})
        if (s && !s->complete())
            err << "mrct study: warning: session " << s->session_id << " is incomplete ("
                << s->completed() << " of " << s->total() << " rated)\n";
    emit(study::render_study_report(first, second_ptr, format), a.out, out);
    return kOk;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"MR/CT image-translation evaluation toolkit", "mrct"};
    app.require_subcommand(1);
    const std::vector<std::string> formats{"md", "markdown", "csv", "json"};

    EvalArgs ev;
    auto* eval_cmd = app.add_subcommand("eval", "Score every pair of a manifest");
    eval_cmd->add_option("--manifest", ev.manifest, "Pair manifest CSV")->required();
    eval_cmd->add_option("--metrics", ev.metrics, "Comma-separated subset of psnr,ssim,uqi,vif")
        ->capture_default_str();
    eval_cmd->add_option("--threads", ev.threads, "Worker threads (0 = logical cores)")
        ->capture_default_str();
    eval_cmd->add_option("--out", ev.out, "Results file to write")->required();

    ReportArgs rep;
    auto* report_cmd = app.add_subcommand("report", "Aggregate a results file into tables");
    report_cmd->add_option("--in", rep.in, "Results file from eval")->required();
    report_cmd->add_option("--format", rep.format, "md, csv, or json")
        ->check(CLI::IsMember(formats))
        ->capture_default_str();
    report_cmd->add_option("--rank-by", rep.rank_by, "Order models by this metric, best first");
    report_cmd->add_option("--out", rep.out, "Write here instead of stdout");

    ArchArgs ar;
    auto* arch_cmd = app.add_subcommand("arch", "Architecture notation tools");
    arch_cmd->require_subcommand(1);
    auto* arch_parse = arch_cmd->add_subcommand("parse", "Trace shapes and parameters of a spec");
    arch_parse->add_option("spec", ar.spec, "Notation, e.g. c7s1-64,d128,d256,R256x9,u128,u64,c7s1-3")
        ->required();
    arch_parse->add_option("--role", ar.role, "generator or discriminator (inferred if omitted)")
        ->check(CLI::IsMember({"generator", "discriminator"}));
    arch_parse->add_option("--input", ar.input, "Input shape CxHxW")->capture_default_str();
    arch_parse->add_option("--c512-stride", ar.c512_stride, "Stride of the last Ck layer")
        ->check(CLI::IsMember({1, 2}))
        ->capture_default_str();

    LossArgs lo;
    auto* loss_cmd = app.add_subcommand("loss", "Objective arithmetic");
    loss_cmd->require_subcommand(1);
    auto* loss_adv = loss_cmd->add_subcommand("adv", "Adversarial loss from discriminator outputs");
    loss_adv->add_option("--real", lo.real, "File of D(y) values in [0, 1]")->required();
    loss_adv->add_option("--fake", lo.fake, "File of D(G(x)) values in [0, 1]")->required();
    auto* loss_cycle = loss_cmd->add_subcommand("cycle", "Cycle-consistency loss of four images");
    loss_cycle->add_option("--x", lo.x, "Source image x")->required();
    loss_cycle->add_option("--fgx", lo.fgx, "Reconstruction F(G(x))")->required();
    loss_cycle->add_option("--y", lo.y, "Target image y")->required();
    loss_cycle->add_option("--gfy", lo.gfy, "Reconstruction G(F(y))")->required();
    auto* loss_lambda = loss_cmd->add_subcommand("lambda", "Cycle weight for a donor category");
    loss_lambda->add_option("--category", lo.category, "Category display name")->required();
    auto* loss_lr = loss_cmd->add_subcommand("lr", "Learning rate at an epoch");
    loss_lr->add_option("--base", lo.base, "Base learning rate")->required();
    loss_lr->add_option("--epoch", lo.epoch, "Epoch")->required();
    loss_lr->add_option("--total", lo.total, "Total epochs")->capture_default_str();
    loss_lr->add_option("--decay-start", lo.decay_start, "First decaying epoch")->capture_default_str();

    LatentArgs la;
    auto* latent_cmd = app.add_subcommand("latent", "Two-component PCA of MR/CT features");
    auto* latent_in = latent_cmd->add_option_group("input", "Exactly one feature source");
    latent_in->add_option("--features", la.features, "CSV with header label,f0,f1,...");
    latent_in->add_option("--images", la.images, "Pair manifest; generated images are embedded");
    latent_in->require_option(1);
    latent_cmd->add_option("--out", la.out, "Coordinates CSV to write")->required();
    latent_cmd->add_flag("--score", la.score, "Print the MR/CT silhouette score");

    StudyArgs st;
    auto* study_cmd = app.add_subcommand("study", "Blinded perceptual study");
    study_cmd->require_subcommand(1);
    auto* study_init = study_cmd->add_subcommand("init", "Create a seeded session directory");
    study_init->add_option("--manifest", st.manifest, "Study manifest CSV")->required();
    study_init->add_option("--seed", st.seed, "PRNG seed")->required();
    study_init->add_option("--rater", st.rater, "Rater id")->required();
    study_init->add_option("--out", st.out, "Session directory to create")->required();
    auto* study_serve = study_cmd->add_subcommand("serve", "Serve a session over HTTP");
    study_serve->add_option("--session", st.session, "Session directory")->required();
    study_serve->add_option("--port", st.port, "TCP port (0 = any free port)")->capture_default_str();
    study_serve->add_option("--host", st.host, "Listen address")->capture_default_str();
    study_serve->add_option("--token", st.token, "Require this bearer token on /api requests");
    study_serve->add_option("--second", st.second, "Second rater's session for agreement output");
    study_serve->add_option("--static", st.static_dir, "Directory of client files served at /");
    auto* study_analyze = study_cmd->add_subcommand("analyze", "Perceptual and agreement tables");
    study_analyze->add_option("--session", st.session, "Session directory")->required();
    study_analyze->add_option("--second", st.second, "Second rater's session directory");
    study_analyze->add_option("--format", st.format, "md, csv, or json")
        ->check(CLI::IsMember(formats))
        ->capture_default_str();
    study_analyze->add_option("--out", st.out, "Write here instead of stdout");

    std::vector<const char*> argv{"mrct"};
    for (const auto& a : args) argv.push_back(a.c_str());
    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kOk : kUsageError;
    }

    try {
        if (eval_cmd->parsed()) return do_eval(ev, err);
        if (report_cmd->parsed()) return do_report(rep, out);
        if (arch_parse->parsed()) return do_arch(ar, out, err);
        if (loss_adv->parsed()) {
            out << num(gan::adversarial_loss({read_numbers(lo.real), read_numbers(lo.fake)})) << "\n";
            return kOk;
        }
        if (loss_cycle->parsed()) {
            out << num(gan::cycle_consistency_loss({load_image(lo.x), load_image(lo.fgx),
                                                    load_image(lo.y), load_image(lo.gfy)}))
                << "\n";
            return kOk;
        }
        if (loss_lambda->parsed()) {
            out << num(gan::lambda_for_category(lo.category)) << "\n";
            return kOk;
        }
        if (loss_lr->parsed()) {
            gan::FinetuneConfig cfg;
            cfg.base_learning_rate = lo.base;
            cfg.total_epochs = lo.total;
            cfg.decay_start_epoch = lo.decay_start;
            out << num(gan::lr_at_epoch(cfg, lo.epoch)) << "\n";
            return kOk;
        }
        if (latent_cmd->parsed()) return do_latent(la, out);
        if (study_init->parsed()) return do_study_init(st, out);
        if (study_serve->parsed()) return do_study_serve(st, err);
        if (study_analyze->parsed()) return do_study_analyze(st, out, err);
    } catch (const UsageError& e) {
        err << "mrct: " << e.what() << "\nRun with --help for more information.\n";
        return kUsageError;
    } catch (const std::exception& e) {
        err << "mrct: " << e.what() << "\n";
        return kDomainError;
    }
    err << "mrct: no command given\nRun with --help for more information.\n";
    return kUsageError;
}

}  // namespace mrct::cli
