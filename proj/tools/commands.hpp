#pragma once

#include "dialnorm/corpus.hpp"
#include "dialnorm/prompting/completion.hpp"
#include "dialnorm/ruleset.hpp"

#include <CLI11.hpp>

#include <cstdint>
#include <filesystem>
#include <memory>
#include <optional>
#include <string>

namespace dialnorm::cli {

/// Flags accepted before or after any subcommand.
struct Globals {
    std::uint64_t seed = 0;
    std::string rules;
    std::string cache;
    std::string log_level = "info";

    /// Sets the log level; called before each subcommand runs.
    void apply() const;
    /// --rules when given, else the built-in rules.
    const RuleBook& rulebook();
    /// Null when --cache is empty.
    std::unique_ptr<prompt::CompletionCache> completion_cache() const;

private:
    std::optional<RuleBook> loaded_;
};

/// Corpus columns shared by every subcommand that reads a corpus.
struct CorpusArgs {
    std::string path;
    CorpusColumns columns;

    void add(CLI::App* sub, bool required = true);
    Corpus load() const { return load_corpus(path, columns); }
};

/// `-` writes to stdout; anything else is written atomically.
void write_output(const std::string& target, const std::string& bytes);

void add_corpus_commands(CLI::App& app, Globals& g);
void add_pipeline_commands(CLI::App& app, Globals& g);
void add_annotation_commands(CLI::App& app, Globals& g);
void add_stats_commands(CLI::App& app, Globals& g);
void add_geotask_commands(CLI::App& app, Globals& g);
void add_semantics_commands(CLI::App& app, Globals& g);

}  // namespace dialnorm::cli
