#include "commands.hpp"

#include "dialnorm/csv.hpp"
#include "dialnorm/error.hpp"
#include "dialnorm/geotasks/model_io.hpp"
#include "dialnorm/semantics/attribution.hpp"
#include "dialnorm/semantics/clustering.hpp"
#include "dialnorm/semantics/embedding.hpp"
#include "dialnorm/semantics/pca.hpp"
#include "dialnorm/semantics/plot.hpp"
#include "dialnorm/unicode.hpp"

#include <fmt/format.h>
#include <json.hpp>
#include <spdlog/spdlog.h>

#include <algorithm>
#include <iostream>

namespace dialnorm::cli {

using nlohmann::json;

namespace {

std::string num(double v) { return fmt::format("{}", v); }

struct ClusterArgs {
    CorpusArgs corpus;
    std::string provider = "bow";
    std::string endpoint;
    int dim = 256;
    int concurrency = 4;
    std::string algo = "kmeans";
    std::optional<int> k;
    std::optional<double> eps;
    int min_pts = 2;
    int k_min = 2;
    int k_max = 10;
    int restarts = 10;
    std::string out;
    bool svg = true;
};

std::unique_ptr<sem::EmbeddingProvider> make_provider(const ClusterArgs& a) {
    if (a.provider == "bow") return std::make_unique<sem::HashedBowProvider>(a.dim);
    if (a.provider == "http") {
        if (a.endpoint.empty()) throw ConfigError("--provider http needs --endpoint");
        return std::make_unique<sem::HttpEmbeddingProvider>(a.endpoint, a.dim);
    }
    throw ConfigError("unknown provider '" + a.provider + "' (expected bow or http)");
}

void run_cluster(const ClusterArgs& a, const Globals& g) {
    const Corpus c = a.corpus.load();
    auto provider = make_provider(a);
    const auto regions = sem::region_vectors(c, *provider, a.concurrency);
    const sem::Points X = sem::stack_rows(regions);
    const int n = static_cast<int>(X.rows());
    if (n < 2) throw ValidationError("clustering needs at least 2 regions, got " + std::to_string(n));
    sem::KMeansOptions kopts;
    kopts.restarts = a.restarts;

    std::vector<std::string> names;
    for (const auto& r : regions) names.push_back(r.region);

    json summary{{"regions", n}, {"algo", a.algo}};

    std::string scan_csv = csv::format_row({"k", "silhouette"});
    std::optional<sem::SilhouetteScan> scan;
    const int hi = std::min(a.k_max, n - 1);
    if (a.k_min >= 2 && hi >= a.k_min) {
        scan = sem::silhouette_scan(X, a.k_min, hi, g.seed, kopts);
        for (std::size_t i = 0; i < scan->ks.size(); ++i) {
            scan_csv += csv::format_row({std::to_string(scan->ks[i]), num(scan->scores[i])});
        }
        summary["best_k"] = scan->best_k;
    } else {
        spdlog::warn("silhouette scan skipped: no k in [{}, {}] with {} regions", a.k_min, a.k_max, n);
    }
    csv::write_file_atomic(a.out + "_silhouette.csv", scan_csv);

    sem::ClusterAssignment assignment;
    if (a.algo == "dbscan") {
        if (!a.eps) throw ConfigError("--algo dbscan needs --eps");
        assignment = sem::dbscan(X, *a.eps, a.min_pts);
        std::string kd = csv::format_row({"rank", "distance"});
        const int kk = std::clamp(a.min_pts - 1, 1, n - 1);
        const auto dists = sem::kdistance(X, kk);
        for (std::size_t i = 0; i < dists.size(); ++i) kd += csv::format_row({std::to_string(i), num(dists[i])});
        csv::write_file_atomic(a.out + "_kdistance.csv", kd);
    } else {
        int k = 0;
        if (a.k) {
            k = *a.k;
        } else if (scan) {
            k = scan->best_k;
        } else {
            throw ConfigError("--k is required when the silhouette scan cannot run");
        }
        if (a.algo == "kmeans") {
            assignment = sem::kmeans(X, k, g.seed, kopts);
        } else if (a.algo == "agglo") {
            assignment = sem::agglomerative(X, k);
        } else {
            throw ConfigError("unknown algorithm '" + a.algo + "' (expected kmeans, agglo or dbscan)");
        }
    }
    summary["k"] = assignment.k;
    summary["silhouette"] = assignment.silhouette;

    std::string assign_csv = csv::format_row({"region", "cluster", "n_proverbs"});
    for (int i = 0; i < n; ++i) {
        const auto& r = regions[static_cast<std::size_t>(i)];
        assign_csv += csv::format_row({r.region, std::to_string(assignment.labels[static_cast<std::size_t>(i)]),
                                       std::to_string(r.n_proverbs)});
    }
    csv::write_file_atomic(a.out + "_assignments.csv", assign_csv);

    std::string pca_csv = csv::format_row({"region", "pc1", "pc2", "cluster"});
    if (n >= 3) {
        const auto p = sem::pca2(X);
        for (int i = 0; i < n; ++i) {
            pca_csv += csv::format_row({names[static_cast<std::size_t>(i)], num(p.projection(i, 0)), num(p.projection(i, 1)),
                                        std::to_string(assignment.labels[static_cast<std::size_t>(i)])});
        }
        summary["explained_ratio"] = {p.explained_ratio(0), p.explained_ratio(1)};
        if (a.svg) {
            csv::write_file_atomic(a.out + "_pca.svg",
                                   sem::scatter_svg(p.projection, names, assignment.labels, "Region vectors (PCA)"));
        }
    } else {
        spdlog::warn("PCA skipped: needs at least 3 regions");
    }
    csv::write_file_atomic(a.out + "_pca.csv", pca_csv);
    if (a.svg && scan) {
        std::vector<double> ks(scan->ks.begin(), scan->ks.end());
        csv::write_file_atomic(a.out + "_silhouette.svg", sem::line_svg(ks, scan->scores, "k", "silhouette"));
    }
    std::cout << summary.dump(2) << "\n";
}

struct AttributeArgs {
    CorpusArgs corpus;
    std::string model;
    std::string out;
    int top = 20;
};

json ranking(const std::vector<sem::TokenInfluence>& list, int top, double (*score)(const sem::TokenInfluence&)) {
    json out = json::array();
    for (std::size_t i = 0; i < list.size() && static_cast<int>(i) < top; ++i) {
        out.push_back({{"token", list[i].token}, {"influence", score(list[i])}, {"count", list[i].count}});
    }
    return out;
}

void run_attribute(const AttributeArgs& a) {
    const Corpus c = a.corpus.load();
    const auto model = geo::load_linear_model(a.model);
    std::function<bool(const std::string&)> keep;
    const auto& cfg = model.vectorizer.config();
    if (cfg.analyzer == geo::Analyzer::Word && cfg.ngram_lo == 1) {
        keep = [&](const std::string& tok) {
            return model.vectorizer.index_of(cfg.lowercase ? unicode::to_lower(tok) : tok) >= 0;
        };
    }
    const auto report = sem::erase_and_attribute(
        c, [&](const std::vector<std::string>& texts) { return model.predict(texts); }, keep);

    std::string out = csv::format_row({"token", "mean_dlat", "mean_dlon", "count"});
    for (const auto& t : report.tokens) {
        out += csv::format_row({t.token, num(t.mean_dlat), num(t.mean_dlon), std::to_string(t.count)});
    }
    csv::write_file_atomic(a.out, out);

    auto north = [](const sem::TokenInfluence& t) { return t.north(); };
    auto east = [](const sem::TokenInfluence& t) { return t.east(); };
    auto south = [](const sem::TokenInfluence& t) { return -t.north(); };
    auto west = [](const sem::TokenInfluence& t) { return -t.east(); };
    std::cout << json{{"tokens", report.tokens.size()},
                      {"north", ranking(report.north, a.top, +north)},
                      {"south", ranking(report.south, a.top, +south)},
                      {"east", ranking(report.east, a.top, +east)},
                      {"west", ranking(report.west, a.top, +west)}}
                     .dump(2)
              << "\n";
}

}  // namespace

void add_semantics_commands(CLI::App& app, Globals& g) {
    auto ca = std::make_shared<ClusterArgs>();
    auto* sub = app.add_subcommand("cluster", "cluster region vectors and project them with PCA");
    ca->corpus.add(sub);
    sub->add_option("--provider", ca->provider, "bow|http")->check(CLI::IsMember({"bow", "http"}))->capture_default_str();
    sub->add_option("--endpoint", ca->endpoint, "embedding service URL for --provider http");
    sub->add_option("--dim", ca->dim, "embedding dimension")->check(CLI::PositiveNumber)->capture_default_str();
    sub->add_option("--concurrency", ca->concurrency, "parallel embedding calls")->check(CLI::PositiveNumber)->capture_default_str();
    sub->add_option("--algo", ca->algo, "kmeans|agglo|dbscan")
        ->check(CLI::IsMember({"kmeans", "agglo", "dbscan"}))
        ->capture_default_str();
    sub->add_option("--k", ca->k, "cluster count (default: best silhouette k)");
    sub->add_option("--eps", ca->eps, "DBSCAN radius");
    sub->add_option("--min-pts", ca->min_pts, "DBSCAN core threshold")->check(CLI::PositiveNumber)->capture_default_str();
    sub->add_option("--k-min", ca->k_min, "silhouette scan lower bound")->capture_default_str();
    sub->add_option("--k-max", ca->k_max, "silhouette scan upper bound")->capture_default_str();
    sub->add_option("--restarts", ca->restarts, "k-means restarts")->check(CLI::PositiveNumber)->capture_default_str();
    sub->add_option("--out", ca->out, "output prefix")->required();
    sub->add_flag("!--no-svg", ca->svg, "skip SVG plots");
    sub->callback([ca, &g] {
        g.apply();
        run_cluster(*ca, g);
    });

    auto aa = std::make_shared<AttributeArgs>();
    sub = app.add_subcommand("attribute", "token influence by input erasure");
    aa->corpus.add(sub);
    sub->add_option("--model", aa->model, "linear model JSON from `geotask regress --save-model`")
        ->required()
        ->check(CLI::ExistingFile);
    sub->add_option("--out", aa->out, "tokens CSV")->required();
    sub->add_option("--top", aa->top, "entries per ranking on stdout")->capture_default_str();
    sub->callback([aa, &g] {
        g.apply();
        run_attribute(*aa);
    });
}

}  // namespace dialnorm::cli
