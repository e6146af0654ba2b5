#include "commands.hpp"

#include "dialnorm/csv.hpp"
#include "dialnorm/error.hpp"

#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

#include <iostream>

namespace dialnorm::cli {

void Globals::apply() const {
    spdlog::set_level(spdlog::level::from_str(log_level));
}

const RuleBook& Globals::rulebook() {
    if (rules.empty()) return default_rules();
    if (!loaded_) loaded_ = load_rules(rules);
    return *loaded_;
}

std::unique_ptr<prompt::CompletionCache> Globals::completion_cache() const {
    if (cache.empty()) return nullptr;
    return std::make_unique<prompt::CompletionCache>(cache);
}

void CorpusArgs::add(CLI::App* sub, bool required) {
    auto* opt = sub->add_option("--corpus", path, "corpus CSV");
    if (required) opt->required();
    sub->add_option("--text-col", columns.text, "text column name")->capture_default_str();
    sub->add_option("--area-col", columns.area, "area column name")->capture_default_str();
}

void write_output(const std::string& target, const std::string& bytes) {
    if (target == "-") {
        std::cout << bytes;
        std::cout.flush();
    } else {
        csv::write_file_atomic(target, bytes);
    }
}

}  // namespace dialnorm::cli

int main(int argc, char** argv) {
    using namespace dialnorm;
    spdlog::set_default_logger(spdlog::stderr_color_mt("dialnorm"));

    CLI::App app{"Dialectal Greek normalization toolkit"};
    app.fallthrough();
    app.require_subcommand(1);

    cli::Globals g;
    app.add_option("--seed", g.seed, "seed for every randomized step")->capture_default_str();
    app.add_option("--rules", g.rules, "rule file (default: built-in rules)");
    app.add_option("--cache", g.cache, "completion cache directory");
    app.add_option("--log-level", g.log_level, "trace|debug|info|warn|error|off")
        ->check(CLI::IsMember({"trace", "debug", "info", "warn", "error", "critical", "off"}))
        ->capture_default_str();

    cli::add_corpus_commands(app, g);
    cli::add_pipeline_commands(app, g);
    cli::add_annotation_commands(app, g);
    cli::add_stats_commands(app, g);
    cli::add_geotask_commands(app, g);
    cli::add_semantics_commands(app, g);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        std::cerr << "error: " << e.what() << "\n\n" << app.help();
        return 1;
    } catch (const TransportError& e) {
        spdlog::error("{}", e.what());
        return 2;
    } catch (const std::exception& e) {
        spdlog::error("{}", e.what());
        return 1;
    }
    return 0;
}
