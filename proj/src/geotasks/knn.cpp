#include "dialnorm/geotasks/knn.hpp"

#include "dialnorm/error.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace dialnorm::geo {

namespace {

constexpr Eigen::Index kQueryChunk = 256;

Eigen::VectorXd row_norms(const FeatureMatrix& X) {
    Eigen::VectorXd norms(X.rows());
    for (Eigen::Index i = 0; i < X.rows(); ++i) norms(i) = X.row(i).norm();
    return norms;
}

void check_k(int k) {
    if (k < 1) throw ConfigError("k must be >= 1, got " + std::to_string(k));
}

}  // namespace

NeighborIndex::NeighborIndex(FeatureMatrix train, int k) : train_(std::move(train)), k_(k) {
    check_k(k);
    if (k > train_.rows()) {
        throw ConfigError("k=" + std::to_string(k) + " exceeds training size " + std::to_string(train_.rows()));
    }
    train_norms_ = row_norms(train_);
}

constexpr double kTieScale = 1e12;

std::vector<std::vector<Eigen::Index>> NeighborIndex::query(const FeatureMatrix& Q) const {
    if (Q.cols() != train_.cols()) throw ValidationError("feature dimension mismatch");
    const Eigen::VectorXd q_norms = row_norms(Q);
    const FeatureMatrix train_t = train_.transpose();
    std::vector<std::vector<Eigen::Index>> out(static_cast<std::size_t>(Q.rows()));

    std::vector<Eigen::Index> order(static_cast<std::size_t>(train_.rows()));
    Eigen::VectorXd dist(train_.rows());
    for (Eigen::Index start = 0; start < Q.rows(); start += kQueryChunk) {
        const Eigen::Index len = std::min(kQueryChunk, Q.rows() - start);
        const FeatureMatrix block = Q.middleRows(start, len);
        const Eigen::MatrixXd dots = Eigen::MatrixXd(block * train_t);
        for (Eigen::Index r = 0; r < len; ++r) {
            const double qn = q_norms(start + r);
            for (Eigen::Index j = 0; j < train_.rows(); ++j) {
                const double denom = qn * train_norms_(j);
                const double sim = denom > 0.0 ? dots(r, j) / denom : 0.0;
                dist(j) = std::nearbyint((1.0 - sim) * kTieScale);
            }
            std::iota(order.begin(), order.end(), Eigen::Index{0});
            const auto kk = static_cast<std::ptrdiff_t>(k_);
            std::partial_sort(order.begin(), order.begin() + kk, order.end(), [&](Eigen::Index a, Eigen::Index b) {
                return dist(a) < dist(b) || (dist(a) == dist(b) && a < b);
            });
            out[static_cast<std::size_t>(start + r)].assign(order.begin(), order.begin() + kk);
        }
    }
    return out;
}

KnnClassifier::KnnClassifier(int k) : k_(k) { check_k(k); }

void KnnClassifier::fit(const FeatureMatrix& X, const Labels& y, int n_classes) {
    if (static_cast<Eigen::Index>(y.size()) != X.rows()) throw ValidationError("label count does not match rows");
    index_ = NeighborIndex(X, k_);
    labels_ = y;
    n_classes_ = n_classes;
}

Labels KnnClassifier::predict(const FeatureMatrix& X) const {
    const auto neighbours = index_.query(X);
    Labels out;
    out.reserve(neighbours.size());
    std::vector<int> votes(static_cast<std::size_t>(n_classes_));
    for (const auto& nn : neighbours) {
        std::fill(votes.begin(), votes.end(), 0);
        for (Eigen::Index j : nn) ++votes[static_cast<std::size_t>(labels_[static_cast<std::size_t>(j)])];
        const int top = *std::max_element(votes.begin(), votes.end());
        // Neighbours are nearest-first, so the first one carrying a top label wins.
        int chosen = -1;
        for (Eigen::Index j : nn) {
            const int label = labels_[static_cast<std::size_t>(j)];
            if (votes[static_cast<std::size_t>(label)] == top) {
                chosen = label;
                break;
            }
        }
        out.push_back(chosen);
    }
    return out;
}

KnnRegressor::KnnRegressor(int k) : k_(k) { check_k(k); }

void KnnRegressor::fit(const FeatureMatrix& X, const Targets& Y) {
    if (Y.rows() != X.rows()) throw ValidationError("target count does not match rows");
    index_ = NeighborIndex(X, k_);
    targets_ = Y;
}

Targets KnnRegressor::predict(const FeatureMatrix& X) const {
    const auto neighbours = index_.query(X);
    Targets out(X.rows(), 2);
    for (std::size_t i = 0; i < neighbours.size(); ++i) {
        Eigen::RowVector2d sum = Eigen::RowVector2d::Zero();
        for (Eigen::Index j : neighbours[i]) sum += targets_.row(j);
        out.row(static_cast<Eigen::Index>(i)) = sum / static_cast<double>(neighbours[i].size());
    }
    return out;
}

}  // namespace dialnorm::geo
