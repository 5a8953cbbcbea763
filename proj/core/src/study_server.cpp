#include "mrct/study_server.hpp"

#include <httplib.h>

#include <json.hpp>

#include "mrct/image.hpp"

namespace mrct::study {

using nlohmann::json;

struct StudyServer::Impl {
    SessionStore store;
    ServerOptions opts;
    httplib::Server http;
    int bound_port = -1;

    Impl(std::filesystem::path dir, ServerOptions o) : store(std::move(dir)), opts(std::move(o)) {}

    void routes();
};

namespace {

void send_json(httplib::Response& res, int status, const json& body) {
    res.status = status;
    res.set_content(body.dump(), "application/json");
}

void send_error(httplib::Response& res, int status, const std::string& message) {
    send_json(res, status, json{{"error", message}});
}

}  // namespace

void StudyServer::Impl::routes() {
    http.set_pre_routing_handler([this](const httplib::Request& req, httplib::Response& res) {
        if (!opts.bearer_token || req.path.rfind("/api/", 0) != 0)
            return httplib::Server::HandlerResponse::Unhandled;
        if (req.get_header_value("Authorization") == "Bearer " + *opts.bearer_token)
            return httplib::Server::HandlerResponse::Unhandled;
        send_error(res, 401, "missing or invalid bearer token");
        return httplib::Server::HandlerResponse::Handled;
    });

    http.Get("/api/session", [this](const httplib::Request&, httplib::Response& res) {
        const auto s = store.snapshot();
        send_json(res, 200,
                  json{{"session_id", s.session_id}, {"total", s.total()}, {"completed", s.completed()}});
    });

    http.Get("/api/item/next", [this](const httplib::Request&, httplib::Response& res) {
        const auto s = store.snapshot();
        const auto next = s.next_unrated();
        if (!next) {
            send_json(res, 200, json{{"done", true}});
            return;
        }
        send_json(res, 200,
                  json{{"token", s.items[*next].token}, {"index", *next + 1}, {"total", s.total()}});
    });

    http.Get(R"(/api/image/([0-9a-f]+))", [this](const httplib::Request& req, httplib::Response& res) {
        const auto s = store.snapshot();
        const StudyItem* item = s.find(req.matches[1].str());
        if (!item) {
            send_error(res, 404, "unknown token");
            return;
        }
        try {
            const auto png = encode_png(load_image(item->source.image_path));
            res.status = 200;
            res.set_header("Cache-Control", "no-store");
            res.set_content(std::string(png.begin(), png.end()), "image/png");
        } catch (const Error&) {
            // The message would name the file; keep it out of the response.
            send_error(res, 500, "image unavailable");
        }
    });

    http.Post(R"(/api/item/([0-9a-f]+)/rating)",
              [this](const httplib::Request& req, httplib::Response& res) {
                  int realism = 0;
                  bool judged_real = false;
                  try {
                      const json body = json::parse(req.body);
                      realism = body.at("realism").get<int>();
                      judged_real = body.at("judged_real").get<bool>();
                  } catch (const json::exception&) {
                      send_error(res, 400, "body must be {\"realism\": int, \"judged_real\": bool}");
                      return;
                  }
                  try {
                      store.submit(req.matches[1].str(), realism, judged_real);
                      res.status = 204;
                  } catch (const RatingError& e) {
                      switch (e.code()) {
                      case RatingErrc::UnknownToken: send_error(res, 404, e.what()); break;
                      case RatingErrc::AlreadyRated: send_error(res, 409, e.what()); break;
                      case RatingErrc::OutOfRange: send_error(res, 422, e.what()); break;
                      }
                  } catch (const Error& e) {
                      send_error(res, 500, e.what());
                  }
              });

    http.Get("/api/results", [this](const httplib::Request& req, httplib::Response& res) {
        const auto s = store.snapshot();
        const std::string partial_flag = req.get_param_value("partial");
        if (!partial_flag.empty() && partial_flag != "true" && partial_flag != "false") {
            send_error(res, 400, "partial must be true or false");
            return;
        }
        const bool partial = partial_flag == "true";
        if (!s.complete() && !partial) {
            send_error(res, 409, "session incomplete; pass partial=true for interim statistics");
            return;
        }
        try {
            std::optional<StudySession> second;
            if (opts.second_session) second = load_session_dir(*opts.second_session);
            json body = json::parse(
                render_study_report(s, second ? &*second : nullptr, ReportFormat::Json));
            body["session_id"] = s.session_id;
            body["total"] = s.total();
            body["completed"] = s.completed();
            body["partial"] = !s.complete();
            send_json(res, 200, body);
        } catch (const Error& e) {
            send_error(res, 500, e.what());
        }
    });

    if (opts.static_dir && !http.set_mount_point("/", opts.static_dir->string()))
        throw Error("study serve: static directory '" + opts.static_dir->string() + "' not found");
}

StudyServer::StudyServer(std::filesystem::path session_dir, ServerOptions opts)
    : impl_(std::make_unique<Impl>(std::move(session_dir), std::move(opts))) {
    if (impl_->opts.second_session) load_session_dir(*impl_->opts.second_session);
    impl_->routes();
}

StudyServer::~StudyServer() {
    stop();
}

void StudyServer::bind() {
    if (impl_->bound_port >= 0) return;
    auto& o = impl_->opts;
    if (o.port == 0) {
        impl_->bound_port = impl_->http.bind_to_any_port(o.host);
        if (impl_->bound_port < 0) throw Error("study serve: cannot bind " + o.host);
    } else {
        if (!impl_->http.bind_to_port(o.host, o.port))
            throw Error("study serve: cannot bind " + o.host + ":" + std::to_string(o.port));
        impl_->bound_port = o.port;
    }
}

int StudyServer::port() const {
    return impl_->bound_port;
}

void StudyServer::listen() {
    bind();
    impl_->http.listen_after_bind();
}

void StudyServer::stop() {
    if (impl_ && impl_->http.is_running()) impl_->http.stop();
}

void StudyServer::wait_until_ready() const {
    impl_->http.wait_until_ready();
}

SessionStore& StudyServer::store() {
    return impl_->store;
}

}  // namespace mrct::study
