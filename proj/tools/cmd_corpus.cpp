#include "commands.hpp"

#include "dialnorm/error.hpp"
#include "dialnorm/unicode.hpp"

#include <json.hpp>
#include <spdlog/spdlog.h>

#include <iostream>
#include <map>

namespace dialnorm::cli {

using nlohmann::json;

namespace {

struct LoadCheckArgs {
    CorpusArgs corpus;
    std::string coords;
};

void run_load_check(const LoadCheckArgs& a) {
    Corpus c = a.corpus.load();
    std::map<Region, int> counts;
    for (const auto& r : c) ++counts[r.region];

    json regions = json::array();
    json unknown = json::array();
    for (const auto& region : c.regions()) {
        json entry{{"region", region.name}, {"count", counts[region]}};
        try {
            entry["group"] = std::string(to_string(group_for_region(region)));
        } catch (const LookupError&) {
            entry["group"] = nullptr;
            unknown.push_back(region.name);
        }
        regions.push_back(std::move(entry));
    }
    json out{{"records", c.size()}, {"digest", c.source_digest}, {"regions", regions}, {"unregistered", unknown}};
    if (!unknown.empty()) spdlog::warn("{} region(s) have no dialect group; RBN and 3-shot prompts will reject them", unknown.size());
    if (!a.coords.empty()) {
        c = attach_coordinates(std::move(c), load_coordinates(a.coords));
        out["coordinates"] = "ok";
    }
    std::cout << out.dump(2) << "\n";
}

struct RbnArgs {
    std::string region;
    std::string text;
    CorpusArgs corpus;
    std::string out = "-";
};

void run_rbn(const RbnArgs& a, Globals& g) {
    const RuleBook& book = g.rulebook();
    if (!a.text.empty() || a.corpus.path.empty()) {
        if (a.region.empty()) throw ValidationError("--region is required with --text");
        std::cout << normalize_rbn(book, Region(a.region), unicode::canonical(a.text)) << "\n";
        return;
    }
    const Corpus c = a.corpus.load();
    std::vector<std::string> rewritten;
    rewritten.reserve(c.size());
    for (const auto& r : c) rewritten.push_back(normalize_rbn(book, r.region, r.text));
    write_output(a.out, format_corpus(c, {{"rbn", std::move(rewritten)}}));
}

}  // namespace

void add_corpus_commands(CLI::App& app, Globals& g) {
    auto lc = std::make_shared<LoadCheckArgs>();
    auto* sub = app.add_subcommand("load-check", "validate a corpus and optional coordinate table");
    lc->corpus.add(sub);
    sub->add_option("--coords", lc->coords, "area,lat,lon CSV");
    sub->callback([lc, &g] {
        g.apply();
        run_load_check(*lc);
    });

    auto rb = std::make_shared<RbnArgs>();
    sub = app.add_subcommand("rbn", "apply the rule-based normalizer");
    sub->add_option("--region", rb->region, "area name (single-text mode)");
    sub->add_option("--text", rb->text, "text to rewrite");
    rb->corpus.add(sub, false);
    sub->add_option("--out", rb->out, "output CSV for corpus mode ('-' for stdout)")->capture_default_str();
    sub->callback([rb, &g] {
        g.apply();
        run_rbn(*rb, g);
    });
}

}  // namespace dialnorm::cli
