#include "dialnorm/annotation/server.hpp"

#include "dialnorm/digest.hpp"
#include "dialnorm/error.hpp"
#include "dialnorm/unicode.hpp"

// After the Eigen-based headers: <resolv.h> defines a _res macro.
#include <httplib.h>
#include <json.hpp>
#include <spdlog/spdlog.h>

namespace dialnorm::annot {

namespace fs = std::filesystem;
using nlohmann::json;

int status_for(const std::exception& e) {
    if (dynamic_cast<const LookupError*>(&e)) return 404;
    if (dynamic_cast<const TieViolationError*>(&e) || dynamic_cast<const ConflictError*>(&e)) return 409;
    if (dynamic_cast<const ValidationError*>(&e) || dynamic_cast<const RangeError*>(&e)) return 422;
    if (dynamic_cast<const Error*>(&e) || dynamic_cast<const json::exception*>(&e)) return 400;
    return 500;
}

namespace {

std::string error_kind(const std::exception& e) {
    if (dynamic_cast<const TieViolationError*>(&e)) return "tie_violation";
    if (dynamic_cast<const LookupError*>(&e)) return "not_found";
    if (dynamic_cast<const ConflictError*>(&e)) return "conflict";
    if (dynamic_cast<const ValidationError*>(&e)) return "validation";
    return "bad_request";
}

void send_json(httplib::Response& res, int status, const json& body) {
    res.status = status;
    res.set_content(body.dump(), "application/json");
}

json progress_json(const Session& s) {
    json per = json::object();
    for (const auto& a : s.config().annotators) per[a] = s.done(a);
    return {{"total", s.tasks().size()}, {"annotators", per}, {"complete", s.complete()}};
}

json task_json(const Session& s, const AnnotationTask& t, const std::string& annotator) {
    json cands = json::array();
    for (std::size_t p = 0; p < t.permutation.size(); ++p) {
        json c{{"index", p}, {"text", t.shown(p).text}};
        if (!s.config().blinded) c["setup"] = t.shown(p).setup;
        cands.push_back(std::move(c));
    }
    return {{"complete", false},
            {"record_id", t.record_id},
            {"region", t.region},
            {"source_text", t.source_text},
            {"candidates", std::move(cands)},
            {"progress", {{"done", s.done(annotator)}, {"total", s.tasks().size()}}}};
}

struct CreateRequest {
    Corpus corpus;
    std::vector<NormalizedSet> sets;
    SessionConfig cfg;
    std::optional<std::string> id;
};

CreateRequest parse_create(const json& j) {
    CreateRequest req;
    if (j.contains("corpus_path")) {
        req.corpus = load_corpus(j["corpus_path"].get<std::string>());
    } else if (j.contains("corpus")) {
        for (const auto& rec : j["corpus"]) {
            ProverbRecord r;
            r.id = req.corpus.records.size();
            r.text = unicode::canonical(rec.at("text").get<std::string>());
            r.region = Region(rec.at("area").get<std::string>());
            if (r.text.empty()) throw ValidationError("record " + std::to_string(r.id) + " has empty text");
            req.corpus.records.push_back(std::move(r));
        }
        req.corpus.source_digest = sha256_hex(j["corpus"].dump());
    } else {
        throw ValidationError("request needs 'corpus' or 'corpus_path'");
    }
    if (!j.contains("normalized") || !j["normalized"].is_array()) {
        throw ValidationError("request needs a 'normalized' array");
    }
    for (const auto& n : j["normalized"]) {
        const std::string setup = n.at("setup").get<std::string>();
        if (n.contains("path")) {
            req.sets.push_back(load_normalized_set(setup, n["path"].get<std::string>()));
        } else {
            NormalizedSet set{setup, {}};
            const auto& texts = n.at("texts");
            if (texts.size() != req.corpus.size()) {
                throw ValidationError("setup '" + setup + "' supplies " + std::to_string(texts.size()) +
                                      " texts for " + std::to_string(req.corpus.size()) + " records");
            }
            for (std::size_t i = 0; i < texts.size(); ++i) {
                if (!texts[i].is_null()) set.texts[i] = unicode::canonical(texts[i].get<std::string>());
            }
            req.sets.push_back(std::move(set));
        }
    }
    req.cfg.n = j.value("n", req.cfg.n);
    req.cfg.seed = j.value("seed", req.cfg.seed);
    req.cfg.blinded = j.value("blinded", req.cfg.blinded);
    req.cfg.annotators = j.value("annotators", std::vector<std::string>{"A1", "A2", "A3"});
    if (j.contains("id")) req.id = j["id"].get<std::string>();
    return req;
}

std::vector<Rating> parse_ratings(const Session& s, const json& j) {
    const std::string annotator = j.at("annotator").get<std::string>();
    const auto record_id = j.at("record_id").get<std::size_t>();
    const auto& task = s.task(record_id);
    std::vector<Rating> batch;
    for (const auto& item : j.at("ratings")) {
        Rating r;
        r.annotator = annotator;
        r.record_id = record_id;
        if (item.contains("candidate")) {
            const auto idx = item["candidate"].get<std::size_t>();
            if (idx >= task.permutation.size()) {
                throw ValidationError("candidate index " + std::to_string(idx) + " out of range");
            }
            r.setup = task.shown(idx).setup;
        } else if (item.contains("setup") && !s.config().blinded) {
            r.setup = item["setup"].get<std::string>();
        } else {
            throw ValidationError("each rating needs a 'candidate' index");
        }
        r.form = item.at("form").get<int>();
        r.meaning = item.at("meaning").get<int>();
        r.best_form = item.value("best_form", false);
        r.best_meaning = item.value("best_meaning", false);
        batch.push_back(std::move(r));
    }
    if (batch.empty()) throw ValidationError("empty rating batch");
    return batch;
}

}  // namespace

struct AnnotationServer::Impl {
    SessionStore& store;
    httplib::Server server;

    explicit Impl(SessionStore& s) : store(s) { routes(); }

    template <typename Fn>
    static void guarded(httplib::Response& res, Fn&& fn) {
        try {
            fn();
        } catch (const std::exception& e) {
            const int status = status_for(e);
            if (status >= 500) spdlog::error("request failed: {}", e.what());
            send_json(res, status, {{"error", error_kind(e)}, {"message", e.what()}});
        }
    }

    void routes() {
        server.set_default_headers({{"Access-Control-Allow-Origin", "*"},
                                    {"Access-Control-Allow-Headers", "Content-Type"},
                                    {"Access-Control-Allow-Methods", "GET, POST, OPTIONS"}});
        server.Options(R"(.*)", [](const httplib::Request&, httplib::Response& res) { res.status = 204; });

        server.Post("/sessions", [this](const httplib::Request& req, httplib::Response& res) {
            guarded(res, [&] {
                auto create = parse_create(json::parse(req.body));
                const auto id = store.create(create.corpus, create.sets, create.cfg, create.id);
                store.read(id, [&](const Session& s) {
                    send_json(res, 201, {{"id", id}, {"tasks", s.tasks().size()}, {"setups", s.setups()},
                                         {"annotators", s.config().annotators}});
                    return 0;
                });
            });
        });

        server.Get("/sessions", [this](const httplib::Request&, httplib::Response& res) {
            guarded(res, [&] { send_json(res, 200, {{"sessions", store.ids()}}); });
        });

        server.Get("/sessions/:id/tasks/next", [this](const httplib::Request& req, httplib::Response& res) {
            guarded(res, [&] {
                const std::string annotator = req.get_param_value("annotator");
                if (annotator.empty()) throw ValidationError("query parameter 'annotator' is required");
                store.read(req.path_params.at("id"), [&](const Session& s) {
                    const auto* t = s.next_task(annotator);
                    if (!t) {
                        send_json(res, 200, {{"complete", true},
                                             {"progress", {{"done", s.done(annotator)}, {"total", s.tasks().size()}}}});
                    } else {
                        send_json(res, 200, task_json(s, *t, annotator));
                    }
                    return 0;
                });
            });
        });

        server.Post("/sessions/:id/ratings", [this](const httplib::Request& req, httplib::Response& res) {
            guarded(res, [&] {
                const std::string id = req.path_params.at("id");
                const json body = json::parse(req.body);
                auto batch = store.read(id, [&](const Session& s) { return parse_ratings(s, body); });
                const auto count = batch.size();
                store.record(id, std::move(batch));
                store.read(id, [&](const Session& s) {
                    send_json(res, 201, {{"accepted", count}, {"progress", progress_json(s)}});
                    return 0;
                });
            });
        });

        server.Get("/sessions/:id/export", [this](const httplib::Request& req, httplib::Response& res) {
            guarded(res, [&] {
                const Axis axis = parse_axis(req.get_param_value("axis"));
                const std::string setup = req.get_param_value("setup");
                const std::string csv_text =
                    store.read(req.path_params.at("id"), [&](const Session& s) { return format_matrix_csv(s, axis, setup); });
                res.status = 200;
                res.set_content(csv_text, "text/csv; charset=utf-8");
            });
        });

        server.Get("/sessions/:id/progress", [this](const httplib::Request& req, httplib::Response& res) {
            guarded(res, [&] {
                store.read(req.path_params.at("id"), [&](const Session& s) {
                    send_json(res, 200, progress_json(s));
                    return 0;
                });
            });
        });

        server.Get("/sessions/:id/best-share", [this](const httplib::Request& req, httplib::Response& res) {
            guarded(res, [&] {
                const Axis axis = parse_axis(req.get_param_value("axis"));
                store.read(req.path_params.at("id"), [&](const Session& s) {
                    json out = json::object();
                    for (const auto& [setup, share] : s.best_share(axis)) out[setup] = share;
                    send_json(res, 200, {{"axis", std::string(to_string(axis))}, {"shares", out}});
                    return 0;
                });
            });
        });
    }
};

AnnotationServer::AnnotationServer(SessionStore& store) : impl_(std::make_unique<Impl>(store)) {}
AnnotationServer::~AnnotationServer() = default;

int AnnotationServer::bind(const std::string& host, int port) {
    if (port == 0) {
        const int bound = impl_->server.bind_to_any_port(host);
        if (bound < 0) throw ConfigError("cannot bind " + host);
        return bound;
    }
    if (!impl_->server.bind_to_port(host, port)) throw ConfigError("cannot bind " + host + ":" + std::to_string(port));
    return port;
}

void AnnotationServer::serve() {
    impl_->server.listen_after_bind();
}

void AnnotationServer::stop() {
    impl_->server.stop();
}

bool AnnotationServer::running() const {
    return impl_->server.is_running();
}

}  // namespace dialnorm::annot
