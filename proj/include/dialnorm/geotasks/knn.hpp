#pragma once

#include "dialnorm/geotasks/models.hpp"

namespace dialnorm::geo {

/// Brute-force cosine-distance neighbour index. Distances that agree to
/// 1e-12 are ties, and ties go to the lower training index.
class NeighborIndex {
public:
    NeighborIndex() = default;
    NeighborIndex(FeatureMatrix train, int k);

    /// k nearest training rows for every query row, nearest first.
    std::vector<std::vector<Eigen::Index>> query(const FeatureMatrix& Q) const;

    int k() const noexcept { return k_; }
    Eigen::Index size() const noexcept { return train_.rows(); }

private:
    FeatureMatrix train_;
    Eigen::VectorXd train_norms_;
    int k_ = 1;
};

/// Majority vote; a tie in votes goes to the tied label whose member is nearest.
class KnnClassifier final : public Classifier {
public:
    explicit KnnClassifier(int k = 5);
    std::string name() const override { return "knn"; }
    void fit(const FeatureMatrix& X, const Labels& y, int n_classes) override;
    Labels predict(const FeatureMatrix& X) const override;

private:
    int k_;
    int n_classes_ = 0;
    NeighborIndex index_;
    Labels labels_;
};

/// Mean of the neighbours' targets.
class KnnRegressor final : public Regressor {
public:
    explicit KnnRegressor(int k = 5);
    std::string name() const override { return "knn"; }
    void fit(const FeatureMatrix& X, const Targets& Y) override;
    Targets predict(const FeatureMatrix& X) const override;

private:
    int k_;
    NeighborIndex index_;
    Targets targets_;
};

}  // namespace dialnorm::geo
