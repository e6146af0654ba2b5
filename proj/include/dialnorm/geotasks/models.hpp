#pragma once

#include "dialnorm/geotasks/tfidf.hpp"

#include <Eigen/Dense>

#include <string>
#include <vector>

namespace dialnorm::geo {

/// Class indices in [0, n_classes).
using Labels = std::vector<int>;

/// One row per document: (lat, lon).
using Targets = Eigen::Matrix<double, Eigen::Dynamic, 2>;

/// Region classifier over TF-IDF rows. Additional model families plug in by
/// implementing this interface.
class Classifier {
public:
    virtual ~Classifier() = default;
    virtual std::string name() const = 0;
    virtual void fit(const FeatureMatrix& X, const Labels& y, int n_classes) = 0;
    virtual Labels predict(const FeatureMatrix& X) const = 0;
};

/// Coordinate regressor over TF-IDF rows, one output column per axis.
class Regressor {
public:
    virtual ~Regressor() = default;
    virtual std::string name() const = 0;
    virtual void fit(const FeatureMatrix& X, const Targets& Y) = 0;
    virtual Targets predict(const FeatureMatrix& X) const = 0;
};

}  // namespace dialnorm::geo
