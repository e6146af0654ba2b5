#pragma once

#include "dialnorm/corpus.hpp"
#include "dialnorm/prompting/completion.hpp"

#include <filesystem>
#include <string>
#include <vector>

namespace dialnorm::pipeline {

struct RecordFailure {
    std::size_t id = 0;
    std::string kind;  ///< "transport", "content", "validation", ...
    std::string message;
};

struct NormalizeOptions {
    /// Fraction of failed records above which the batch fails.
    double failure_threshold = 0.10;
    int concurrency = 4;
};

struct NormalizationResult {
    Corpus corpus;
    /// Parallel to corpus.records; empty for failed records.
    std::vector<std::string> normalized;
    std::vector<std::string> prompt_digests;
    std::vector<bool> rbn_applied;
    std::vector<RecordFailure> failures;  ///< ascending id

    std::size_t succeeded() const noexcept { return normalized.size() - failures.size(); }
};

/// Normalizes every record under `setup`, preserving order. Per-record
/// failures become empty cells plus a failure entry; BatchError when the
/// failure fraction exceeds the threshold. Regions are checked before any
/// request is made when the setup needs the group table.
NormalizationResult normalize_corpus(const Corpus& c, const prompt::Setup& setup, prompt::CompletionCache* cache,
                                     prompt::ChatClient& client, const RuleBook& rules = default_rules(),
                                     NormalizeOptions opts = {});

/// id,text,area,normalized
std::string format_normalized(const NormalizationResult& r);
/// id,kind,message
std::string format_failures(const NormalizationResult& r);

/// Writes `out` and the sidecar `<stem>.errors.csv` next to it.
void write_normalized(const std::filesystem::path& out, const NormalizationResult& r);
std::filesystem::path sidecar_path(const std::filesystem::path& out);

/// File-name-safe form of a setup name: "GPT 3s+RBN" -> "gpt-3s-rbn".
std::string slugify(std::string_view name);

struct MatrixConfig {
    std::filesystem::path corpus;
    std::filesystem::path rules;  ///< empty: built-in rules
    std::filesystem::path cache;  ///< empty: no cache
    std::filesystem::path out_dir;
    std::vector<prompt::Setup> setups;
    NormalizeOptions options;
};

/// JSON config; relative paths resolve against the config file's directory.
/// Each setup entry is either a canonical name string or an object with
/// name, endpoint, model_id, shot_mode, rbn, temperature, max_tokens
/// (missing fields fall back to the canonical setup of that name).
MatrixConfig load_matrix_config(const std::filesystem::path& path);
MatrixConfig parse_matrix_config(const std::string& json_text, const std::filesystem::path& base_dir);

struct SetupOutcome {
    prompt::Setup setup;
    std::filesystem::path output;
    bool ok = false;
    std::string error;
    std::size_t normalized = 0;
    std::size_t failed = 0;
};

struct MatrixResult {
    std::vector<SetupOutcome> outcomes;
    std::filesystem::path manifest;
};

/// Runs every setup in turn; a failing setup is recorded and the rest
/// continue. Writes <out_dir>/<slug>.csv per setup plus manifest.json.
MatrixResult run_matrix(const Corpus& c, const std::vector<prompt::Setup>& setups, prompt::CompletionCache* cache,
                        prompt::ChatClient& client, const std::filesystem::path& out_dir,
                        const RuleBook& rules = default_rules(), NormalizeOptions opts = {});

}  // namespace dialnorm::pipeline
