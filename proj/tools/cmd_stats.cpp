#include "commands.hpp"

#include "dialnorm/annotation/session.hpp"
#include "dialnorm/error.hpp"
#include "dialnorm/rating_io.hpp"

#include <json.hpp>

#include <cmath>
#include <iostream>

namespace dialnorm::cli {

using nlohmann::json;

namespace {

double round2(double v) { return std::round(v * 100.0) / 100.0; }

/// Infinite or NaN values become null so the output stays valid JSON.
json number(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

struct StatsArgs {
    std::string matrix;
    std::string matrix_b;
    std::string datadir;
    std::string session;
    std::string axis = "both";
};

void run_icc(const StatsArgs& a) {
    const auto m = load_rating_matrix(a.matrix);
    const auto r = icc2k(m.values);
    std::cout << json{{"icc", number(r.icc)},
                      {"f", number(r.f)},
                      {"df1", r.df1},
                      {"df2", r.df2},
                      {"p", number(r.p)},
                      {"ci_low", number(r.ci_low)},
                      {"ci_high", number(r.ci_high)},
                      {"ci95", {number(round2(r.ci_low)), number(round2(r.ci_high))}},
                      {"n", m.values.rows()},
                      {"k", m.values.cols()}}
                     .dump(2)
              << "\n";
}

void run_pearson(const StatsArgs& a) {
    const auto m = load_rating_matrix(a.matrix);
    std::cout << json{{"pearson_avg", pearson_pairwise_avg(m.values)}, {"n", m.values.rows()}, {"k", m.values.cols()}}.dump(2)
              << "\n";
}

void run_ttest(const StatsArgs& a) {
    const auto ma = load_rating_matrix(a.matrix);
    const auto mb = load_rating_matrix(a.matrix_b);
    if (ma.values.rows() != mb.values.rows() || ma.values.cols() != mb.values.cols()) {
        throw ValidationError("matrices differ in shape: " + std::to_string(ma.values.rows()) + "x" +
                              std::to_string(ma.values.cols()) + " vs " + std::to_string(mb.values.rows()) + "x" +
                              std::to_string(mb.values.cols()));
    }
    const auto r = paired_ttest(ma.values, mb.values);
    std::cout << json{{"t", r.t}, {"p", r.p}, {"df", r.df}, {"pairs", ma.values.size()}}.dump(2) << "\n";
}

void run_best_share(const StatsArgs& a) {
    annot::SessionStore store(a.datadir);
    store.load_all();
    std::vector<annot::Axis> axes;
    if (a.axis == "both") {
        axes = {annot::Axis::Form, annot::Axis::Meaning};
    } else {
        axes = {annot::parse_axis(a.axis)};
    }
    json out = json::object();
    store.read(a.session, [&](const annot::Session& s) {
        for (const auto axis : axes) {
            json shares = json::object();
            for (const auto& [setup, share] : s.best_share(axis)) shares[setup] = share;
            out[std::string(annot::to_string(axis))] = std::move(shares);
        }
        return 0;
    });
    std::cout << out.dump(2) << "\n";
}

}  // namespace

void add_stats_commands(CLI::App& app, Globals& g) {
    auto* stats = app.add_subcommand("stats", "reliability and significance statistics");
    stats->require_subcommand(1);

    auto a = std::make_shared<StatsArgs>();
    auto* sub = stats->add_subcommand("icc", "ICC(2,k) with F-test and 95% CI");
    sub->add_option("--matrix", a->matrix, "subjects x raters CSV")->required()->check(CLI::ExistingFile);
    sub->callback([a, &g] {
        g.apply();
        run_icc(*a);
    });

    sub = stats->add_subcommand("pearson", "average pairwise Pearson correlation");
    sub->add_option("--matrix", a->matrix, "subjects x raters CSV")->required()->check(CLI::ExistingFile);
    sub->callback([a, &g] {
        g.apply();
        run_pearson(*a);
    });

    sub = stats->add_subcommand("ttest", "paired t-test over flattened matrices");
    sub->add_option("--matrix", a->matrix, "first CSV")->required()->check(CLI::ExistingFile);
    sub->add_option("--matrix-b", a->matrix_b, "second CSV")->required()->check(CLI::ExistingFile);
    sub->callback([a, &g] {
        g.apply();
        run_ttest(*a);
    });

    sub = stats->add_subcommand("best-share", "percentage of best flags per setup");
    sub->add_option("--datadir", a->datadir, "annotation data directory")->required()->check(CLI::ExistingDirectory);
    sub->add_option("--session", a->session, "session id")->required();
    sub->add_option("--axis", a->axis, "form|meaning|both")->capture_default_str();
    sub->callback([a, &g] {
        g.apply();
        run_best_share(*a);
    });
}

}  // namespace dialnorm::cli
