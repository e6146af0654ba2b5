#include "dialnorm/geotasks/logreg.hpp"

#include "dialnorm/error.hpp"

#include <cmath>

namespace dialnorm::geo {

namespace {

void check_labels(const FeatureMatrix& X, const Labels& y, int n_classes) {
    if (static_cast<Eigen::Index>(y.size()) != X.rows()) {
        throw ValidationError("label count does not match feature rows");
    }
    for (int label : y) {
        if (label < 0 || label >= n_classes) throw ValidationError("label out of range");
    }
}

}  // namespace

Labels argmax_rows(const Eigen::MatrixXd& scores) {
    Labels out(static_cast<std::size_t>(scores.rows()));
    for (Eigen::Index i = 0; i < scores.rows(); ++i) {
        Eigen::Index best = 0;
        scores.row(i).maxCoeff(&best);
        out[static_cast<std::size_t>(i)] = static_cast<int>(best);
    }
    return out;
}

LossAndGradient logreg_loss_and_gradient(const FeatureMatrix& X, const Labels& y,
                                         const Eigen::MatrixXd& weights, const Eigen::RowVectorXd& bias,
                                         double l2) {
    const Eigen::Index n = X.rows();
    const Eigen::Index classes = weights.cols();
    check_labels(X, y, static_cast<int>(classes));

    Eigen::MatrixXd scores = X * weights;
    scores.rowwise() += bias;
    const Eigen::VectorXd row_max = scores.rowwise().maxCoeff();
    const Eigen::MatrixXd shifted = scores.colwise() - row_max;
    const Eigen::VectorXd log_norm = shifted.array().exp().rowwise().sum().log();

    double nll = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) {
        nll -= shifted(i, y[static_cast<std::size_t>(i)]) - log_norm(i);
    }

    Eigen::MatrixXd residual = (shifted.colwise() - log_norm).array().exp();  // probabilities
    for (Eigen::Index i = 0; i < n; ++i) residual(i, y[static_cast<std::size_t>(i)]) -= 1.0;
    residual /= static_cast<double>(n);

    LossAndGradient out;
    out.loss = nll / static_cast<double>(n) + 0.5 * l2 * weights.squaredNorm();
    out.grad_weights = X.transpose() * residual + l2 * weights;
    out.grad_bias = residual.colwise().sum();
    return out;
}

void LogisticRegression::fit(const FeatureMatrix& X, const Labels& y, int n_classes) {
    if (n_classes < 2) throw ValidationError("logistic regression needs at least 2 classes");
    if (X.rows() == 0) throw ValidationError("empty training set");
    check_labels(X, y, n_classes);

    weights_ = Eigen::MatrixXd::Zero(X.cols(), n_classes);
    bias_ = Eigen::RowVectorXd::Zero(n_classes);
    loss_trace_.clear();
    loss_trace_.reserve(static_cast<std::size_t>(opts_.epochs) + 1);

    for (int epoch = 0; epoch <= opts_.epochs; ++epoch) {
        const auto lg = logreg_loss_and_gradient(X, y, weights_, bias_, opts_.l2);
        if (!std::isfinite(lg.loss)) {
            throw DivergenceError("logistic regression loss became non-finite at epoch " + std::to_string(epoch) +
                                  "; try a smaller learning rate than " + std::to_string(opts_.lr));
        }
        loss_trace_.push_back(lg.loss);
        if (epoch == opts_.epochs) break;
        weights_ -= opts_.lr * lg.grad_weights;
        bias_ -= opts_.lr * lg.grad_bias;
    }
}

Eigen::MatrixXd LogisticRegression::decision_function(const FeatureMatrix& X) const {
    if (weights_.size() == 0) throw ConfigError("model is not fitted");
    if (X.cols() != weights_.rows()) throw ValidationError("feature dimension mismatch");
    Eigen::MatrixXd scores = X * weights_;
    scores.rowwise() += bias_;
    return scores;
}

Labels LogisticRegression::predict(const FeatureMatrix& X) const { return argmax_rows(decision_function(X)); }

}  // namespace dialnorm::geo
