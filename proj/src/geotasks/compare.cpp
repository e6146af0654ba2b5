#include "dialnorm/geotasks/compare.hpp"

#include "dialnorm/error.hpp"

#include <algorithm>
#include <set>

namespace dialnorm::geo {

namespace {

std::vector<std::string> texts_of(const Corpus& c) {
    std::vector<std::string> out;
    out.reserve(c.size());
    for (const auto& r : c) out.push_back(r.text);
    return out;
}

}  // namespace

std::unique_ptr<Classifier> make_classifier(const std::string& name, const GeoTaskOptions& opts) {
    if (name == "logreg") return std::make_unique<LogisticRegression>(opts.logreg);
    if (name == "knn") return std::make_unique<KnnClassifier>(opts.knn_k);
    throw ConfigError("unknown classifier '" + name + "' (available: logreg, knn)");
}

std::unique_ptr<Regressor> make_regressor(const std::string& name, const GeoTaskOptions& opts) {
    if (name == "linreg") return std::make_unique<LinearRegression>(opts.ridge);
    if (name == "elasticnet") return std::make_unique<ElasticNet>(opts.elastic_net);
    if (name == "knn") return std::make_unique<KnnRegressor>(opts.knn_k);
    throw ConfigError("unknown regressor '" + name + "' (available: linreg, elasticnet, knn)");
}

std::vector<std::string> class_names_of(const Corpus& a, const Corpus& b) {
    std::set<std::string> names;
    for (const auto& r : a) names.insert(r.region.name);
    for (const auto& r : b) names.insert(r.region.name);
    return {names.begin(), names.end()};
}

Labels encode_labels(const Corpus& c, const std::vector<std::string>& class_names) {
    Labels out;
    out.reserve(c.size());
    for (const auto& r : c) {
        const auto it = std::lower_bound(class_names.begin(), class_names.end(), r.region.name);
        if (it == class_names.end() || *it != r.region.name) {
            throw ValidationError("region '" + r.region.name + "' outside the class set");
        }
        out.push_back(static_cast<int>(it - class_names.begin()));
    }
    return out;
}

Targets coordinate_targets(const Corpus& c) {
    Targets Y(static_cast<Eigen::Index>(c.size()), 2);
    for (std::size_t i = 0; i < c.size(); ++i) {
        const auto& r = c.records[i];
        if (!r.coords) throw ValidationError("record " + std::to_string(r.id) + " has no coordinates");
        Y(static_cast<Eigen::Index>(i), 0) = r.coords->lat;
        Y(static_cast<Eigen::Index>(i), 1) = r.coords->lon;
    }
    return Y;
}

ClassReport evaluate_classifier(const Corpus& train, const Corpus& test, Classifier& model,
                                const VectorizerConfig& features, const std::vector<std::string>& class_names) {
    TfidfVectorizer vectorizer(features);
    const FeatureMatrix X_train = vectorizer.fit_transform(texts_of(train));
    const FeatureMatrix X_test = vectorizer.transform(texts_of(test));
    model.fit(X_train, encode_labels(train, class_names), static_cast<int>(class_names.size()));
    return classification_report(encode_labels(test, class_names), model.predict(X_test), class_names);
}

RegReport evaluate_regressor(const Corpus& train, const Corpus& test, Regressor& model,
                             const VectorizerConfig& features) {
    TfidfVectorizer vectorizer(features);
    const FeatureMatrix X_train = vectorizer.fit_transform(texts_of(train));
    const FeatureMatrix X_test = vectorizer.transform(texts_of(test));
    model.fit(X_train, coordinate_targets(train));
    return regression_report(coordinate_targets(test), model.predict(X_test));
}

ComparisonReport compare_corpora(const Corpus& dialectal, const Corpus& normalized, const GeoTaskOptions& opts) {
    if (dialectal.size() != normalized.size()) {
        throw AlignmentError("corpora differ in size: " + std::to_string(dialectal.size()) + " vs " +
                             std::to_string(normalized.size()));
    }
    for (std::size_t i = 0; i < dialectal.size(); ++i) {
        const auto& a = dialectal.records[i];
        const auto& b = normalized.records[i];
        if (a.id != b.id || a.region != b.region) {
            throw AlignmentError("record " + std::to_string(i) + " does not align (id " + std::to_string(a.id) +
                                 "/" + std::to_string(b.id) + ", region '" + a.region.name + "'/'" +
                                 b.region.name + "')");
        }
    }

    ComparisonReport report;
    report.test_ids = split_test_ids(dialectal, opts.test_fraction, opts.seed);
    const auto [dial_train, dial_test] = split_corpus(dialectal, opts.test_fraction, opts.seed);
    const Corpus norm_test = select_ids(normalized, report.test_ids);
    Corpus norm_train;
    {
        std::vector<std::size_t> train_ids;
        for (const auto& r : dial_train) train_ids.push_back(r.id);
        norm_train = select_ids(normalized, train_ids);
    }
    const auto names = class_names_of(dialectal, normalized);

    for (const auto& name : opts.classifiers) {
        PairedClassification pc;
        pc.model = name;
        pc.dialectal = evaluate_classifier(dial_train, dial_test, *make_classifier(name, opts), opts.features, names);
        pc.normalized = evaluate_classifier(norm_train, norm_test, *make_classifier(name, opts), opts.features, names);
        pc.delta_macro_f1 = pc.normalized.macro.f1 - pc.dialectal.macro.f1;
        pc.delta_accuracy = pc.normalized.accuracy - pc.dialectal.accuracy;
        report.classification.push_back(std::move(pc));
    }

    const bool has_coords = std::all_of(dialectal.begin(), dialectal.end(), [](const auto& r) { return r.coords.has_value(); }) &&
                            std::all_of(normalized.begin(), normalized.end(), [](const auto& r) { return r.coords.has_value(); });
    if (has_coords) {
        for (const auto& name : opts.regressors) {
            PairedRegression pr;
            pr.model = name;
            pr.dialectal = evaluate_regressor(dial_train, dial_test, *make_regressor(name, opts), opts.features);
            pr.normalized = evaluate_regressor(norm_train, norm_test, *make_regressor(name, opts), opts.features);
            pr.delta_avg_rmse = pr.normalized.avg_rmse - pr.dialectal.avg_rmse;
            report.regression.push_back(std::move(pr));
        }
    }
    return report;
}

}  // namespace dialnorm::geo
