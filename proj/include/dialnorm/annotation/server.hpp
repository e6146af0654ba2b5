#pragma once

#include "dialnorm/annotation/session.hpp"

#include <memory>
#include <string>

namespace dialnorm::annot {

/// JSON-over-HTTP front end for a SessionStore.
///
///   POST /sessions                       create (inline texts or file paths)
///   GET  /sessions                       list ids
///   GET  /sessions/:id/tasks/next        ?annotator=A, blinded task or {"complete":true}
///   POST /sessions/:id/ratings           one batch per (annotator, record)
///   GET  /sessions/:id/export            ?axis=form|meaning&setup=S, CSV
///   GET  /sessions/:id/progress
///   GET  /sessions/:id/best-share        ?axis=form|meaning
class AnnotationServer {
public:
    explicit AnnotationServer(SessionStore& store);
    ~AnnotationServer();
    AnnotationServer(const AnnotationServer&) = delete;
    AnnotationServer& operator=(const AnnotationServer&) = delete;

    /// Binds; port 0 picks a free port. Returns the bound port or throws.
    int bind(const std::string& host, int port);
    /// Blocks until stop().
    void serve();
    void stop();
    bool running() const;

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

/// HTTP status for a library error: 404 lookup, 409 conflict or tie
/// violation, 422 validation, 400 for other client errors, 500 otherwise.
int status_for(const std::exception& e);

}  // namespace dialnorm::annot
