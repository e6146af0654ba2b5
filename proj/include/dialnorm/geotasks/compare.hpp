#pragma once

#include "dialnorm/corpus.hpp"
#include "dialnorm/geotasks/knn.hpp"
#include "dialnorm/geotasks/linreg.hpp"
#include "dialnorm/geotasks/logreg.hpp"
#include "dialnorm/geotasks/metrics.hpp"

#include <memory>

namespace dialnorm::geo {

struct GeoTaskOptions {
    VectorizerConfig features;
    double test_fraction = 0.1;
    std::uint64_t seed = 0;
    std::vector<std::string> classifiers{"logreg", "knn"};
    std::vector<std::string> regressors{"linreg", "elasticnet", "knn"};
    LogRegOptions logreg;
    int knn_k = 5;
    RidgeOptions ridge{.l2 = 1e-3};
    ElasticNetOptions elastic_net;
};

/// Model registry: "logreg", "knn" for classification; "linreg",
/// "elasticnet", "knn" for regression. Unknown names raise ConfigError.
std::unique_ptr<Classifier> make_classifier(const std::string& name, const GeoTaskOptions& opts);
std::unique_ptr<Regressor> make_regressor(const std::string& name, const GeoTaskOptions& opts);

/// Sorted distinct region names of both corpora; class index = position.
std::vector<std::string> class_names_of(const Corpus& a, const Corpus& b);

Labels encode_labels(const Corpus& c, const std::vector<std::string>& class_names);
/// Throws ValidationError when a record has no coordinates.
Targets coordinate_targets(const Corpus& c);

/// Fits TF-IDF on `train`, trains the model, and reports on `test`.
ClassReport evaluate_classifier(const Corpus& train, const Corpus& test, Classifier& model,
                                const VectorizerConfig& features, const std::vector<std::string>& class_names);
RegReport evaluate_regressor(const Corpus& train, const Corpus& test, Regressor& model,
                             const VectorizerConfig& features);

struct PairedClassification {
    std::string model;
    ClassReport dialectal;
    ClassReport normalized;
    double delta_macro_f1 = 0.0;  ///< normalized - dialectal
    double delta_accuracy = 0.0;
};

struct PairedRegression {
    std::string model;
    RegReport dialectal;
    RegReport normalized;
    double delta_avg_rmse = 0.0;  ///< normalized - dialectal
};

struct ComparisonReport {
    std::vector<std::size_t> test_ids;
    std::vector<PairedClassification> classification;
    std::vector<PairedRegression> regression;
};

/// Trains every configured model on both corpus versions using one shared
/// stratified split. Records must align by id and region. Regression runs
/// only when every record carries coordinates.
ComparisonReport compare_corpora(const Corpus& dialectal, const Corpus& normalized, const GeoTaskOptions& opts);

}  // namespace dialnorm::geo
