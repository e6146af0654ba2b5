#include "commands.hpp"

#include "dialnorm/annotation/server.hpp"
#include "dialnorm/error.hpp"

#include <spdlog/spdlog.h>

#include <csignal>
#include <iostream>
#include <pthread.h>
#include <thread>

namespace dialnorm::cli {

namespace {

struct ServeArgs {
    std::string datadir;
    std::string host = "127.0.0.1";
    int port = 8080;
    CorpusArgs corpus;
    std::vector<std::string> normalized;
    std::size_t n = 27;
    std::vector<std::string> annotators{"A1", "A2", "A3"};
    std::string session_id;
    bool unblinded = false;
    bool create_only = false;
};

std::string create_session(const ServeArgs& a, annot::SessionStore& store, std::uint64_t seed) {
    if (a.normalized.empty()) throw ValidationError("--normalized SETUP=PATH is required with --corpus");
    std::vector<annot::NormalizedSet> sets;
    for (const auto& spec : a.normalized) {
        const auto eq = spec.find('=');
        if (eq == std::string::npos || eq == 0) throw ValidationError("--normalized expects SETUP=PATH, got '" + spec + "'");
        sets.push_back(annot::load_normalized_set(spec.substr(0, eq), spec.substr(eq + 1)));
    }
    annot::SessionConfig cfg;
    cfg.n = a.n;
    cfg.seed = seed;
    cfg.annotators = a.annotators;
    cfg.blinded = !a.unblinded;
    std::optional<std::string> id;
    if (!a.session_id.empty()) id = a.session_id;
    return store.create(a.corpus.load(), sets, cfg, id);
}

void run_serve(const ServeArgs& a, const Globals& g) {
    annot::SessionStore store(a.datadir);
    store.load_all();
    if (!a.corpus.path.empty()) {
        const auto id = create_session(a, store, g.seed);
        std::cout << id << "\n";
        std::cout.flush();
        spdlog::info("created session {}", id);
    }
    if (a.create_only) return;

    sigset_t stop_signals;
    sigemptyset(&stop_signals);
    sigaddset(&stop_signals, SIGINT);
    sigaddset(&stop_signals, SIGTERM);
    pthread_sigmask(SIG_BLOCK, &stop_signals, nullptr);

    annot::AnnotationServer server(store);
    const int port = server.bind(a.host, a.port);
    spdlog::info("annotation service on http://{}:{} ({} session(s))", a.host, port, store.ids().size());
    std::jthread worker([&] { server.serve(); });
    int sig = 0;
    sigwait(&stop_signals, &sig);
    spdlog::info("signal {} received, shutting down", sig);
    server.stop();
}

}  // namespace

void add_annotation_commands(CLI::App& app, Globals& g) {
    auto sa = std::make_shared<ServeArgs>();
    auto* sub = app.add_subcommand("serve-annotation", "run the annotation HTTP service");
    sub->add_option("--datadir", sa->datadir, "session storage directory")->required();
    sub->add_option("--host", sa->host)->capture_default_str();
    sub->add_option("--port", sa->port, "0 picks a free port")->check(CLI::Range(0, 65535))->capture_default_str();
    sa->corpus.add(sub, false);
    sub->add_option("--normalized", sa->normalized, "SETUP=PATH normalized CSV (repeatable) for session creation");
    sub->add_option("--n", sa->n, "records sampled into the session")->capture_default_str();
    sub->add_option("--annotators", sa->annotators, "annotator ids")->delimiter(',')->capture_default_str();
    sub->add_option("--session-id", sa->session_id, "id for the created session");
    sub->add_flag("--unblinded", sa->unblinded, "show setup names to annotators");
    sub->add_flag("--create-only", sa->create_only, "create the session and exit");
    sub->callback([sa, &g] {
        g.apply();
        run_serve(*sa, g);
    });
}

}  // namespace dialnorm::cli
