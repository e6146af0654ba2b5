#include "commands.hpp"

#include "dialnorm/error.hpp"
#include "dialnorm/geotasks/compare.hpp"
#include "dialnorm/geotasks/model_io.hpp"
#include "dialnorm/geotasks/report_io.hpp"

#include <spdlog/spdlog.h>

namespace dialnorm::cli {

namespace {

struct GeoArgs {
    CorpusArgs train;
    CorpusArgs test;
    CorpusArgs corpus;
    double test_fraction = 0.1;
    std::string coords;
    std::string model;
    std::string features = "char:1-4,min_df=2";
    std::string out = "-";
    std::string table;
    std::string save_model;
    int knn_k = 5;
    double l2 = -1.0;
};

struct Split {
    Corpus train;
    Corpus test;
};

Split load_split(const GeoArgs& a, std::uint64_t seed) {
    const bool explicit_split = !a.train.path.empty() || !a.test.path.empty();
    if (explicit_split && !a.corpus.path.empty()) throw ConfigError("use either --train/--test or --corpus, not both");
    Split s;
    if (explicit_split) {
        if (a.train.path.empty() || a.test.path.empty()) throw ConfigError("--train and --test go together");
        s.train = a.train.load();
        s.test = a.test.load();
    } else if (!a.corpus.path.empty()) {
        std::tie(s.train, s.test) = split_corpus(a.corpus.load(), a.test_fraction, seed);
    } else {
        throw ConfigError("give --train and --test, or --corpus with --test-fraction");
    }
    if (!a.coords.empty()) {
        const auto table = load_coordinates(a.coords);
        s.train = attach_coordinates(std::move(s.train), table);
        s.test = attach_coordinates(std::move(s.test), table);
    }
    return s;
}

geo::GeoTaskOptions task_options(const GeoArgs& a, std::uint64_t seed) {
    geo::GeoTaskOptions o;
    o.features = geo::parse_feature_spec(a.features);
    o.seed = seed;
    o.test_fraction = a.test_fraction;
    o.knn_k = a.knn_k;
    o.logreg.seed = seed;
    if (a.l2 >= 0.0) {
        o.logreg.l2 = a.l2;
        o.ridge.l2 = a.l2;
        o.elastic_net.l2 = a.l2;
    }
    return o;
}

void run_classify(const GeoArgs& a, const Globals& g) {
    const auto s = load_split(a, g.seed);
    const auto opts = task_options(a, g.seed);
    auto model = geo::make_classifier(a.model, opts);
    const auto names = geo::class_names_of(s.train, s.test);
    const auto report = geo::evaluate_classifier(s.train, s.test, *model, opts.features, names);
    write_output(a.out, geo::to_json(report) + "\n");
    if (!a.table.empty()) write_output(a.table, geo::format_class_table(report));
    spdlog::info("{}: accuracy {:.4f}, macro-F1 {:.4f} on {} test records", a.model, report.accuracy, report.macro.f1,
                 s.test.size());
}

void run_regress(const GeoArgs& a, const Globals& g) {
    const auto s = load_split(a, g.seed);
    const auto opts = task_options(a, g.seed);
    auto model = geo::make_regressor(a.model, opts);

    geo::TfidfVectorizer vec(opts.features);
    std::vector<std::string> train_texts;
    std::vector<std::string> test_texts;
    for (const auto& r : s.train) train_texts.push_back(r.text);
    for (const auto& r : s.test) test_texts.push_back(r.text);
    const auto X = vec.fit_transform(train_texts);
    model->fit(X, geo::coordinate_targets(s.train));
    const auto report = geo::regression_report(geo::coordinate_targets(s.test), model->predict(vec.transform(test_texts)));

    write_output(a.out, geo::to_json(report) + "\n");
    if (!a.table.empty()) write_output(a.table, geo::format_regression_table({{a.model, report}}));
    if (!a.save_model.empty()) {
        geo::SavedLinearModel saved{a.model, vec, {}};
        if (const auto* lin = dynamic_cast<const geo::LinearRegression*>(model.get())) {
            saved.fit = lin->solution();
        } else if (const auto* en = dynamic_cast<const geo::ElasticNet*>(model.get())) {
            saved.fit = en->solution();
        } else {
            throw ConfigError("--save-model supports linreg and elasticnet, not '" + a.model + "'");
        }
        geo::save_linear_model(a.save_model, saved);
    }
    spdlog::info("{}: avg RMSE {:.4f} on {} test records", a.model, report.avg_rmse, s.test.size());
}

struct CompareArgs {
    CorpusArgs dialectal;
    std::string normalized;
    std::string normalized_col = "normalized";
    std::string coords;
    double test_fraction = 0.1;
    std::string features = "char:1-4,min_df=2";
    std::vector<std::string> classifiers{"logreg", "knn"};
    std::vector<std::string> regressors{"linreg", "elasticnet", "knn"};
    std::string out = "-";
};

void run_compare(const CompareArgs& a, const Globals& g) {
    Corpus dial = a.dialectal.load();
    Corpus norm = load_corpus(a.normalized, {a.normalized_col, a.dialectal.columns.area});
    if (!a.coords.empty()) {
        const auto table = load_coordinates(a.coords);
        dial = attach_coordinates(std::move(dial), table);
        norm = attach_coordinates(std::move(norm), table);
    }
    geo::GeoTaskOptions opts;
    opts.features = geo::parse_feature_spec(a.features);
    opts.test_fraction = a.test_fraction;
    opts.seed = g.seed;
    opts.logreg.seed = g.seed;
    opts.classifiers = a.classifiers;
    opts.regressors = a.regressors;
    const auto report = geo::compare_corpora(dial, norm, opts);
    write_output(a.out, geo::to_json(report) + "\n");
    for (const auto& c : report.classification) {
        spdlog::info("{}: macro-F1 {:.4f} -> {:.4f}", c.model, c.dialectal.macro.f1, c.normalized.macro.f1);
    }
    for (const auto& r : report.regression) {
        spdlog::info("{}: avg RMSE {:.4f} -> {:.4f}", r.model, r.dialectal.avg_rmse, r.normalized.avg_rmse);
    }
}

void add_split_options(CLI::App* sub, GeoArgs& a) {
    sub->add_option("--train", a.train.path, "training corpus CSV");
    sub->add_option("--test", a.test.path, "test corpus CSV");
    sub->add_option("--corpus", a.corpus.path, "single corpus, split by --test-fraction");
    sub->add_option("--test-fraction", a.test_fraction)->check(CLI::Range(0.0, 1.0))->capture_default_str();
    sub->add_option("--text-col", a.corpus.columns.text)->capture_default_str();
    sub->add_option("--area-col", a.corpus.columns.area)->capture_default_str();
    sub->add_option("--features", a.features, "char:LO-HI|word:LO-HI[,min_df=N,lowercase=BOOL,sublinear] or JSON")
        ->capture_default_str();
    sub->add_option("--out", a.out, "report JSON ('-' for stdout)")->capture_default_str();
    sub->add_option("--table", a.table, "also write the CSV table");
    sub->add_option("--knn-k", a.knn_k)->check(CLI::PositiveNumber)->capture_default_str();
    sub->add_option("--l2", a.l2, "override the model's L2 penalty");
    sub->parse_complete_callback([&a] { a.train.columns = a.test.columns = a.corpus.columns; });
}

}  // namespace

void add_geotask_commands(CLI::App& app, Globals& g) {
    auto* geo_cmd = app.add_subcommand("geotask", "location classification and coordinate regression");
    geo_cmd->require_subcommand(1);

    auto ca = std::make_shared<GeoArgs>();
    auto* sub = geo_cmd->add_subcommand("classify", "region classification report");
    add_split_options(sub, *ca);
    sub->add_option("--model", ca->model, "logreg|knn")->required();
    sub->callback([ca, &g] {
        g.apply();
        run_classify(*ca, g);
    });

    auto ra = std::make_shared<GeoArgs>();
    sub = geo_cmd->add_subcommand("regress", "coordinate regression report");
    add_split_options(sub, *ra);
    sub->add_option("--model", ra->model, "linreg|elasticnet|knn")->required();
    sub->add_option("--coords", ra->coords, "area,lat,lon CSV")->required()->check(CLI::ExistingFile);
    sub->add_option("--save-model", ra->save_model, "write the fitted linear model as JSON");
    sub->callback([ra, &g] {
        g.apply();
        run_regress(*ra, g);
    });

    auto cm = std::make_shared<CompareArgs>();
    sub = geo_cmd->add_subcommand("compare", "dialectal vs normalized on one shared split");
    cm->dialectal.add(sub);
    sub->add_option("--normalized", cm->normalized, "normalized CSV from `normalize`")->required();
    sub->add_option("--normalized-col", cm->normalized_col)->capture_default_str();
    sub->add_option("--coords", cm->coords, "area,lat,lon CSV (enables regression)");
    sub->add_option("--test-fraction", cm->test_fraction)->check(CLI::Range(0.0, 1.0))->capture_default_str();
    sub->add_option("--features", cm->features)->capture_default_str();
    sub->add_option("--classifiers", cm->classifiers)->delimiter(',')->capture_default_str();
    sub->add_option("--regressors", cm->regressors)->delimiter(',')->capture_default_str();
    sub->add_option("--out", cm->out, "report JSON ('-' for stdout)")->capture_default_str();
    sub->callback([cm, &g] {
        g.apply();
        run_compare(*cm, g);
    });
}

}  // namespace dialnorm::cli
