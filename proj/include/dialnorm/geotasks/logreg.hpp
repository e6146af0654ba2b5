#pragma once

#include "dialnorm/geotasks/models.hpp"

#include <cstdint>

namespace dialnorm::geo {

struct LogRegOptions {
    double l2 = 1e-4;
    int epochs = 500;
    /// Safe for L2-normalized rows: the loss is 1-smooth (plus l2) there.
    double lr = 1.0;
    /// Reserved for shuffled variants; full-batch descent from zero weights
    /// does not consume randomness.
    std::uint64_t seed = 0;
};

struct LossAndGradient {
    double loss = 0.0;
    Eigen::MatrixXd grad_weights;   ///< features x classes
    Eigen::RowVectorXd grad_bias;   ///< 1 x classes
};

/// Mean multinomial cross-entropy plus l2/2 * ||W||^2 and its gradient.
LossAndGradient logreg_loss_and_gradient(const FeatureMatrix& X, const Labels& y,
                                         const Eigen::MatrixXd& weights, const Eigen::RowVectorXd& bias,
                                         double l2);

/// Multinomial logistic regression trained by full-batch gradient descent.
class LogisticRegression final : public Classifier {
public:
    LogisticRegression() = default;
    explicit LogisticRegression(LogRegOptions opts) : opts_(opts) {}

    std::string name() const override { return "logreg"; }
    void fit(const FeatureMatrix& X, const Labels& y, int n_classes) override;
    Labels predict(const FeatureMatrix& X) const override;

    /// Class scores (logits), documents x classes.
    Eigen::MatrixXd decision_function(const FeatureMatrix& X) const;

    const Eigen::MatrixXd& weights() const noexcept { return weights_; }
    const Eigen::RowVectorXd& bias() const noexcept { return bias_; }
    /// Loss before each step plus the final loss.
    const std::vector<double>& loss_trace() const noexcept { return loss_trace_; }

private:
    LogRegOptions opts_;
    Eigen::MatrixXd weights_;
    Eigen::RowVectorXd bias_;
    std::vector<double> loss_trace_;
};

/// Row-wise argmax; ties go to the lowest class index.
Labels argmax_rows(const Eigen::MatrixXd& scores);

}  // namespace dialnorm::geo
