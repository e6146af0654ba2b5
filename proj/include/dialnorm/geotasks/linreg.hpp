#pragma once

#include "dialnorm/geotasks/models.hpp"

namespace dialnorm::geo {

/// Fitted affine model per output axis: y = X * coef.col(axis) + intercept(axis).
struct LinearFit {
    Eigen::MatrixXd coef;          ///< features x 2
    Eigen::RowVector2d intercept = Eigen::RowVector2d::Zero();
    bool converged = true;
    double achieved_tolerance = 0.0;

    Targets predict(const FeatureMatrix& X) const;
};

struct RidgeOptions {
    double l2 = 0.0;
    /// Stop when the gradient norm of the objective drops below this.
    double tolerance = 1e-8;
    int max_iterations = 10000;
};

/// Least squares with optional ridge penalty:
///   min 1/2 ||y - Xw - b||^2 + l2/2 ||w||^2
/// The intercept is unpenalized; centring is applied implicitly so sparse
/// inputs stay sparse. Solved by conjugate gradients on the normal
/// equations, which from a zero start yields the minimum-norm solution
/// when l2 = 0 and the system is rank deficient.
class LinearRegression final : public Regressor {
public:
    LinearRegression() = default;
    explicit LinearRegression(RidgeOptions opts) : opts_(opts) {}

    std::string name() const override { return "linreg"; }
    void fit(const FeatureMatrix& X, const Targets& Y) override;
    Targets predict(const FeatureMatrix& X) const override { return fit_.predict(X); }
    const LinearFit& solution() const noexcept { return fit_; }

private:
    RidgeOptions opts_;
    LinearFit fit_;
};

struct ElasticNetOptions {
    double l1 = 1e-4;
    double l2 = 1e-4;
    double tolerance = 1e-8;
    int max_sweeps = 10000;
};

/// 1/(2n) ||y - Xw - b||^2 + l1 ||w||_1 + l2/2 ||w||^2 for one output axis.
double elastic_net_objective(const FeatureMatrix& X, const Eigen::VectorXd& y, const Eigen::VectorXd& w, double b,
                             double l1, double l2);

/// Cyclic coordinate descent, one independent model per axis. Stops when the
/// largest coefficient change in a sweep is at most `tolerance`.
class ElasticNet final : public Regressor {
public:
    ElasticNet() = default;
    explicit ElasticNet(ElasticNetOptions opts) : opts_(opts) {}

    std::string name() const override { return "elasticnet"; }
    void fit(const FeatureMatrix& X, const Targets& Y) override;
    Targets predict(const FeatureMatrix& X) const override { return fit_.predict(X); }
    const LinearFit& solution() const noexcept { return fit_; }

private:
    ElasticNetOptions opts_;
    LinearFit fit_;
};

}  // namespace dialnorm::geo
