#pragma once

#include <filesystem>
#include <memory>
#include <optional>
#include <string>

#include "mrct/study.hpp"

namespace mrct::study {

struct ServerOptions {
    std::string host = "127.0.0.1";
    /// 0 binds an ephemeral port; see StudyServer::port().
    int port = 8080;
    /// When set, every /api request must carry `Authorization: Bearer <token>`.
    std::optional<std::string> bearer_token;
    /// Second rater's session directory, loaded read-only for agreement output.
    std::optional<std::filesystem::path> second_session;
    /// Static files (the browser client) served from "/".
    std::optional<std::filesystem::path> static_dir;
};

/// HTTP front end over a SessionStore.
///
///   GET  /api/session                  {session_id, total, completed}
///   GET  /api/item/next                {token, index, total} | {done: true}
///   GET  /api/image/{token}            image/png, re-encoded without metadata
///   POST /api/item/{token}/rating      {realism, judged_real} -> 204 | 400 | 404 | 409 | 422
///   GET  /api/results?partial=true     409 while incomplete unless partial=true
class StudyServer {
public:
    StudyServer(std::filesystem::path session_dir, ServerOptions opts);
    ~StudyServer();
    StudyServer(const StudyServer&) = delete;
    StudyServer& operator=(const StudyServer&) = delete;

    /// Binds the listening socket. Throws mrct::Error if the port is taken.
    void bind();
    /// Port actually bound; valid after bind().
    int port() const;
    /// Serves until stop(). Calls bind() first if needed.
    void listen();
    void stop();
    /// Blocks until the server accepts connections (for tests running listen()
    /// on another thread).
    void wait_until_ready() const;

    SessionStore& store();

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

}  // namespace mrct::study
