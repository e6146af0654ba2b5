#include "commands.hpp"

#include "dialnorm/error.hpp"
#include "dialnorm/pipeline.hpp"

#include <json.hpp>
#include <spdlog/spdlog.h>

#include <iostream>

namespace dialnorm::cli {

using nlohmann::json;

namespace {

struct ClientArgs {
    int max_attempts = 3;
    double rate = 0.0;
    int in_flight = 4;

    void add(CLI::App* sub) {
        sub->add_option("--max-attempts", max_attempts, "attempts per request")->check(CLI::PositiveNumber)->capture_default_str();
        sub->add_option("--rate", rate, "max request starts per second (0 = unlimited)")->capture_default_str();
        sub->add_option("--max-in-flight", in_flight, "concurrent requests")->check(CLI::PositiveNumber)->capture_default_str();
    }
    prompt::HttpChatClient client() const {
        prompt::RetryPolicy retry;
        retry.max_attempts = max_attempts;
        return prompt::HttpChatClient(retry, prompt::HttpChatClient::api_key_from_env(), rate, in_flight);
    }
};

struct NormalizeArgs {
    CorpusArgs corpus;
    std::string setup;
    std::string endpoint;
    std::string model_id;
    std::string shot_mode;
    bool no_rbn = false;
    std::optional<double> temperature;
    std::optional<int> max_tokens;
    std::string out;
    pipeline::NormalizeOptions opts;
    ClientArgs client;
};

void run_normalize(const NormalizeArgs& a, Globals& g) {
    prompt::Setup setup = prompt::canonical_setup(a.setup);
    if (!a.endpoint.empty()) setup.endpoint = a.endpoint;
    if (!a.model_id.empty()) setup.model_id = a.model_id;
    if (!a.shot_mode.empty()) setup.shot_mode = prompt::parse_shot_mode(a.shot_mode);
    if (a.no_rbn) setup.rbn_enabled = false;
    if (a.temperature) setup.temperature = *a.temperature;
    if (a.max_tokens) setup.max_tokens = *a.max_tokens;
    setup.validate();

    const Corpus c = a.corpus.load();
    auto cache = g.completion_cache();
    auto client = a.client.client();
    const auto result = pipeline::normalize_corpus(c, setup, cache.get(), client, g.rulebook(), a.opts);
    pipeline::write_normalized(a.out, result);
    std::cout << json{{"setup", setup.name},
                      {"records", c.size()},
                      {"normalized", result.succeeded()},
                      {"failed", result.failures.size()},
                      {"output", a.out},
                      {"errors_file", pipeline::sidecar_path(a.out).string()}}
                     .dump(2)
              << "\n";
}

struct MatrixArgs {
    std::string config;
    std::optional<int> concurrency;
    ClientArgs client;
};

void run_matrix(const MatrixArgs& a, Globals& g) {
    auto cfg = pipeline::load_matrix_config(a.config);
    if (!g.rules.empty()) cfg.rules = g.rules;
    if (!g.cache.empty()) cfg.cache = g.cache;
    if (a.concurrency) cfg.options.concurrency = *a.concurrency;

    const Corpus c = load_corpus(cfg.corpus);
    const RuleBook rules = cfg.rules.empty() ? default_rules() : load_rules(cfg.rules);
    std::unique_ptr<prompt::CompletionCache> cache;
    if (!cfg.cache.empty()) cache = std::make_unique<prompt::CompletionCache>(cfg.cache);
    auto client = a.client.client();

    const auto result = pipeline::run_matrix(c, cfg.setups, cache.get(), client, cfg.out_dir, rules, cfg.options);
    json setups = json::array();
    bool all_ok = true;
    for (const auto& o : result.outcomes) {
        json s{{"setup", o.setup.name}, {"ok", o.ok}, {"output", o.output.string()},
               {"normalized", o.normalized}, {"failed", o.failed}};
        if (!o.ok) {
            s["error"] = o.error;
            all_ok = false;
        }
        setups.push_back(std::move(s));
    }
    std::cout << json{{"manifest", result.manifest.string()}, {"setups", setups}}.dump(2) << "\n";
    if (!all_ok) throw BatchError("one or more setups failed; see " + result.manifest.string());
}

}  // namespace

void add_pipeline_commands(CLI::App& app, Globals& g) {
    auto na = std::make_shared<NormalizeArgs>();
    auto* sub = app.add_subcommand("normalize", "normalize a corpus with one LLM setup");
    na->corpus.add(sub);
    sub->add_option("--setup", na->setup, "setup name, e.g. \"GPT 3s+RBN\"")->required();
    sub->add_option("--endpoint", na->endpoint, "override the setup's endpoint");
    sub->add_option("--model-id", na->model_id, "override the setup's model id");
    sub->add_option("--shot-mode", na->shot_mode, "three|nine");
    sub->add_flag("--no-rbn", na->no_rbn, "skip the rule-based pre-pass");
    sub->add_option("--temperature", na->temperature);
    sub->add_option("--max-tokens", na->max_tokens);
    sub->add_option("--out", na->out, "normalized CSV")->required();
    sub->add_option("--concurrency", na->opts.concurrency, "worker threads")->check(CLI::PositiveNumber)->capture_default_str();
    sub->add_option("--failure-threshold", na->opts.failure_threshold, "max failed fraction")
        ->check(CLI::Range(0.0, 1.0))
        ->capture_default_str();
    na->client.add(sub);
    sub->callback([na, &g] {
        g.apply();
        run_normalize(*na, g);
    });

    auto ma = std::make_shared<MatrixArgs>();
    sub = app.add_subcommand("matrix", "run every configured setup over a corpus");
    sub->add_option("--config", ma->config, "JSON matrix config")->required()->check(CLI::ExistingFile);
    sub->add_option("--concurrency", ma->concurrency, "worker threads per setup")->check(CLI::PositiveNumber);
    ma->client.add(sub);
    sub->callback([ma, &g] {
        g.apply();
        run_matrix(*ma, g);
    });
}

}  // namespace dialnorm::cli
