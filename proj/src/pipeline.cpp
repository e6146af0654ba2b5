#include "dialnorm/pipeline.hpp"

#include "dialnorm/csv.hpp"
#include "dialnorm/error.hpp"

#include <json.hpp>
#include <spdlog/spdlog.h>

#include <algorithm>
#include <atomic>
#include <chrono>
#include <ctime>
#include <map>
#include <thread>

namespace dialnorm::pipeline {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::string utc_timestamp() {
    const auto now = std::chrono::system_clock::now();
    const std::time_t t = std::chrono::system_clock::to_time_t(now);
    std::tm tm{};
    gmtime_r(&t, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

json setup_json(const prompt::Setup& s) {
    return {{"name", s.name},
            {"endpoint", s.endpoint},
            {"model_id", s.model_id},
            {"shot_mode", std::string(prompt::to_string(s.shot_mode))},
            {"rbn", s.rbn_enabled},
            {"temperature", s.temperature},
            {"max_tokens", s.max_tokens}};
}

prompt::Setup setup_from_json(const json& j) {
    if (j.is_string()) return prompt::canonical_setup(j.get<std::string>());
    if (!j.is_object() || !j.contains("name")) throw ConfigError("each setup needs a name");
    const std::string name = j.at("name").get<std::string>();
    prompt::Setup s;
    try {
        s = prompt::canonical_setup(name);
    } catch (const LookupError&) {
        s.name = name;
    }
    if (j.contains("endpoint")) s.endpoint = j["endpoint"].get<std::string>();
    if (j.contains("model_id")) s.model_id = j["model_id"].get<std::string>();
    if (j.contains("shot_mode")) s.shot_mode = prompt::parse_shot_mode(j["shot_mode"].get<std::string>());
    if (j.contains("rbn")) s.rbn_enabled = j["rbn"].get<bool>();
    if (j.contains("temperature")) s.temperature = j["temperature"].get<double>();
    if (j.contains("max_tokens")) s.max_tokens = j["max_tokens"].get<int>();
    s.validate();
    return s;
}

std::string error_kind(const std::exception_ptr& e) {
    try {
        std::rethrow_exception(e);
    } catch (const TransportError&) {
        return "transport";
    } catch (const ContentError&) {
        return "content";
    } catch (const ValidationError&) {
        return "validation";
    } catch (const LookupError&) {
        return "lookup";
    } catch (...) {
        return "error";
    }
}

std::string error_message(const std::exception_ptr& e) {
    try {
        std::rethrow_exception(e);
    } catch (const std::exception& ex) {
        return ex.what();
    } catch (...) {
        return "unknown error";
    }
}

}  // namespace

NormalizationResult normalize_corpus(const Corpus& c, const prompt::Setup& setup, prompt::CompletionCache* cache,
                                     prompt::ChatClient& client, const RuleBook& rules, NormalizeOptions opts) {
    setup.validate();
    if (!(opts.failure_threshold >= 0.0 && opts.failure_threshold <= 1.0)) {
        throw ConfigError("failure_threshold must lie in [0, 1]");
    }
    if (setup.rbn_enabled || setup.shot_mode == prompt::ShotMode::ThreeShot) {
        for (const auto& region : c.regions()) group_for_region(region);
    }

    const std::size_t n = c.size();
    NormalizationResult result;
    result.corpus = c;
    result.normalized.assign(n, "");
    result.prompt_digests.assign(n, "");
    result.rbn_applied.assign(n, false);
    std::vector<std::exception_ptr> errors(n);
    std::vector<char> rbn(n, 0);

    std::atomic<std::size_t> next{0};
    std::atomic<std::size_t> done{0};
    auto worker = [&] {
        for (std::size_t i = next++; i < n; i = next++) {
            const auto& rec = c.records[i];
            try {
                auto out = prompt::normalize_one(setup, rec.region, rec.text, cache, client, rules);
                result.normalized[i] = std::move(out.text);
                result.prompt_digests[i] = std::move(out.prompt_digest);
                rbn[i] = out.rbn_applied;
            } catch (...) {
                errors[i] = std::current_exception();
            }
            const auto d = ++done;
            if (d % 100 == 0 || d == n) spdlog::info("[{}] {}/{} records", setup.name, d, n);
        }
    };
    const int threads = std::clamp(opts.concurrency, 1, 256);
    if (threads == 1 || n < 2) {
        worker();
    } else {
        std::vector<std::jthread> pool;
        for (int t = 0; t < std::min<int>(threads, static_cast<int>(n)); ++t) pool.emplace_back(worker);
    }

    std::map<std::string, std::size_t> by_kind;
    for (std::size_t i = 0; i < n; ++i) {
        result.rbn_applied[i] = rbn[i] != 0;
        if (!errors[i]) continue;
        RecordFailure f{c.records[i].id, error_kind(errors[i]), error_message(errors[i])};
        spdlog::warn("[{}] record {} failed ({}): {}", setup.name, f.id, f.kind, f.message);
        ++by_kind[f.kind];
        result.failures.push_back(std::move(f));
    }
    std::sort(result.failures.begin(), result.failures.end(), [](const auto& a, const auto& b) { return a.id < b.id; });

    if (n > 0 && static_cast<double>(result.failures.size()) > opts.failure_threshold * static_cast<double>(n)) {
        std::string summary;
        for (const auto& [kind, count] : by_kind) summary += (summary.empty() ? "" : ", ") + std::to_string(count) + " " + kind;
        throw BatchError("setup '" + setup.name + "': " + std::to_string(result.failures.size()) + " of " +
                         std::to_string(n) + " records failed (" + summary + "); first: " + result.failures.front().message);
    }
    return result;
}

std::string format_normalized(const NormalizationResult& r) {
    return format_corpus(r.corpus, {{"normalized", r.normalized}});
}

std::string format_failures(const NormalizationResult& r) {
    std::string out = csv::format_row({"id", "kind", "message"});
    for (const auto& f : r.failures) out += csv::format_row({std::to_string(f.id), f.kind, f.message});
    return out;
}

fs::path sidecar_path(const fs::path& out) {
    return out.parent_path() / (out.stem().string() + ".errors.csv");
}

void write_normalized(const fs::path& out, const NormalizationResult& r) {
    csv::write_file_atomic(out, format_normalized(r));
    csv::write_file_atomic(sidecar_path(out), format_failures(r));
}

std::string slugify(std::string_view name) {
    std::string out;
    bool dash = false;
    for (const unsigned char ch : name) {
        if (std::isalnum(ch)) {
            if (dash && !out.empty()) out += '-';
            out += static_cast<char>(std::tolower(ch));
            dash = false;
        } else {
            dash = true;
        }
    }
    if (out.empty()) throw ConfigError("setup name '" + std::string(name) + "' has no usable characters");
    return out;
}

MatrixConfig parse_matrix_config(const std::string& json_text, const fs::path& base_dir) {
    json j;
    try {
        j = json::parse(json_text);
    } catch (const json::exception& e) {
        throw ConfigError(std::string("matrix config is not valid JSON: ") + e.what());
    }
    auto resolve = [&](const std::string& p) -> fs::path {
        if (p.empty()) return {};
        const fs::path path(p);
        return path.is_absolute() ? path : base_dir / path;
    };
    try {
        MatrixConfig cfg;
        cfg.corpus = resolve(j.at("corpus").get<std::string>());
        cfg.rules = resolve(j.value("rules", std::string()));
        cfg.cache = resolve(j.value("cache", std::string()));
        cfg.out_dir = resolve(j.value("out_dir", std::string("out")));
        cfg.options.failure_threshold = j.value("failure_threshold", cfg.options.failure_threshold);
        cfg.options.concurrency = j.value("concurrency", cfg.options.concurrency);
        if (!j.contains("setups") || !j["setups"].is_array() || j["setups"].empty()) {
            throw ConfigError("matrix config needs a non-empty 'setups' array");
        }
        for (const auto& s : j["setups"]) cfg.setups.push_back(setup_from_json(s));
        std::map<std::string, int> seen;
        for (const auto& s : cfg.setups) {
            if (seen[slugify(s.name)]++) throw ConfigError("two setups share the file name '" + slugify(s.name) + "'");
        }
        return cfg;
    } catch (const json::exception& e) {
        throw ConfigError(std::string("matrix config: ") + e.what());
    }
}

MatrixConfig load_matrix_config(const fs::path& path) {
    return parse_matrix_config(csv::read_file(path), path.parent_path());
}

MatrixResult run_matrix(const Corpus& c, const std::vector<prompt::Setup>& setups, prompt::CompletionCache* cache,
                        prompt::ChatClient& client, const fs::path& out_dir, const RuleBook& rules,
                        NormalizeOptions opts) {
    MatrixResult result;
    json manifest;
    manifest["corpus_digest"] = c.source_digest;
    manifest["records"] = c.size();
    manifest["started_at"] = utc_timestamp();
    manifest["failure_threshold"] = opts.failure_threshold;
    manifest["setups"] = json::array();

    for (const auto& setup : setups) {
        SetupOutcome outcome;
        outcome.setup = setup;
        outcome.output = out_dir / (slugify(setup.name) + ".csv");
        json entry = setup_json(setup);
        entry["started_at"] = utc_timestamp();
        try {
            const auto r = normalize_corpus(c, setup, cache, client, rules, opts);
            write_normalized(outcome.output, r);
            outcome.ok = true;
            outcome.normalized = r.succeeded();
            outcome.failed = r.failures.size();
        } catch (const Error& e) {
            outcome.error = e.what();
            spdlog::error("setup '{}' failed: {}", setup.name, e.what());
        }
        entry["finished_at"] = utc_timestamp();
        entry["status"] = outcome.ok ? "ok" : "failed";
        entry["output"] = outcome.ok ? outcome.output.filename().string() : "";
        entry["errors_file"] = outcome.ok ? sidecar_path(outcome.output).filename().string() : "";
        entry["normalized"] = outcome.normalized;
        entry["failed"] = outcome.failed;
        if (!outcome.ok) entry["error"] = outcome.error;
        manifest["setups"].push_back(std::move(entry));
        result.outcomes.push_back(std::move(outcome));
    }
    manifest["finished_at"] = utc_timestamp();
    result.manifest = out_dir / "manifest.json";
    csv::write_file_atomic(result.manifest, manifest.dump(2) + "\n");
    return result;
}

}  // namespace dialnorm::pipeline
