#include "dialnorm/geotasks/linreg.hpp"

#include "dialnorm/error.hpp"

#include <spdlog/spdlog.h>

#include <algorithm>
#include <cmath>

namespace dialnorm::geo {

namespace {

Eigen::RowVectorXd column_means(const FeatureMatrix& X) {
    Eigen::RowVectorXd sums = Eigen::RowVectorXd::Zero(X.cols());
    for (Eigen::Index i = 0; i < X.outerSize(); ++i) {
        for (FeatureMatrix::InnerIterator it(X, i); it; ++it) sums(it.col()) += it.value();
    }
    return sums / static_cast<double>(X.rows());
}

void check_shapes(const FeatureMatrix& X, const Targets& Y) {
    if (X.rows() < 2) throw ValidationError("linear models need at least 2 training rows");
    if (Y.rows() != X.rows()) throw ValidationError("target count does not match rows");
    if (!Y.allFinite()) throw ValidationError("targets contain NaN or infinite values");
}

double soft_threshold(double x, double t) {
    if (x > t) return x - t;
    if (x < -t) return x + t;
    return 0.0;
}

}  // namespace

Targets LinearFit::predict(const FeatureMatrix& X) const {
    if (X.cols() != coef.rows()) throw ValidationError("feature dimension mismatch");
    Targets out = X * coef;
    out.rowwise() += intercept;
    return out;
}

void LinearRegression::fit(const FeatureMatrix& X, const Targets& Y) {
    check_shapes(X, Y);
    const Eigen::RowVectorXd mu = column_means(X);
    const Eigen::Index d = X.cols();

    // Centred operator A = X - 1 mu, applied without materialising it.
    auto apply = [&](const Eigen::VectorXd& v) -> Eigen::VectorXd {
        Eigen::VectorXd out = X * v;
        out.array() -= mu.dot(v);
        return out;
    };
    auto apply_t = [&](const Eigen::VectorXd& u) -> Eigen::VectorXd {
        Eigen::VectorXd out = X.transpose() * u;
        out -= mu.transpose() * u.sum();
        return out;
    };

    fit_ = LinearFit{};
    fit_.coef = Eigen::MatrixXd::Zero(d, 2);
    for (int axis = 0; axis < 2; ++axis) {
        const Eigen::VectorXd y = Y.col(axis);
        const double y_mean = y.mean();
        const Eigen::VectorXd yc = y.array() - y_mean;

        Eigen::VectorXd w = Eigen::VectorXd::Zero(d);
        Eigen::VectorXd r = apply_t(yc);  // negative gradient
        Eigen::VectorXd p = r;
        double rs = r.squaredNorm();
        int iter = 0;
        while (std::sqrt(rs) > opts_.tolerance && iter < opts_.max_iterations) {
            const Eigen::VectorXd q = apply_t(apply(p)) + opts_.l2 * p;
            const double pq = p.dot(q);
            if (!(pq > 0.0)) break;
            const double alpha = rs / pq;
            w += alpha * p;
            // Recompute the true residual periodically to curb drift.
            if (++iter % 50 == 0) {
                r = apply_t(yc - apply(w)) - opts_.l2 * w;
            } else {
                r -= alpha * q;
            }
            const double rs_new = r.squaredNorm();
            p = r + (rs_new / rs) * p;
            rs = rs_new;
        }
        const double grad_norm = (apply_t(yc - apply(w)) - opts_.l2 * w).norm();
        if (grad_norm > opts_.tolerance) {
            fit_.converged = false;
            spdlog::warn("linear regression axis {} stopped at gradient norm {:.3e} (target {:.1e})", axis,
                         grad_norm, opts_.tolerance);
        }
        fit_.achieved_tolerance = std::max(fit_.achieved_tolerance, grad_norm);
        fit_.coef.col(axis) = w;
        fit_.intercept(axis) = y_mean - mu.dot(w);
    }
}

double elastic_net_objective(const FeatureMatrix& X, const Eigen::VectorXd& y, const Eigen::VectorXd& w, double b,
                             double l1, double l2) {
    const Eigen::VectorXd r = y - (X * w).eval() - Eigen::VectorXd::Constant(y.size(), b);
    return r.squaredNorm() / (2.0 * static_cast<double>(y.size())) + l1 * w.lpNorm<1>() + 0.5 * l2 * w.squaredNorm();
}

void ElasticNet::fit(const FeatureMatrix& X, const Targets& Y) {
    check_shapes(X, Y);
    if (opts_.l1 < 0.0 || opts_.l2 < 0.0) throw ConfigError("penalties must be non-negative");
    const Eigen::SparseMatrix<double, Eigen::ColMajor> Xc = X;
    const Eigen::Index n = X.rows();
    const Eigen::Index d = X.cols();
    const double nd = static_cast<double>(n);

    const Eigen::RowVectorXd mu = column_means(X);
    Eigen::VectorXd col_sum(d);
    Eigen::VectorXd centred_sq(d);
    for (Eigen::Index j = 0; j < d; ++j) {
        double sum = 0.0;
        double sq = 0.0;
        for (decltype(Xc)::InnerIterator it(Xc, j); it; ++it) {
            sum += it.value();
            sq += it.value() * it.value();
        }
        col_sum(j) = sum;
        centred_sq(j) = std::max(0.0, sq - nd * mu(j) * mu(j));
    }

    fit_ = LinearFit{};
    fit_.coef = Eigen::MatrixXd::Zero(d, 2);
    for (int axis = 0; axis < 2; ++axis) {
        const Eigen::VectorXd y = Y.col(axis);
        const double y_mean = y.mean();
        // True residual = r_raw + shift, where r_raw tracks y_c - X w.
        Eigen::VectorXd r_raw = y.array() - y_mean;
        double shift = 0.0;
        double raw_sum = r_raw.sum();
        Eigen::VectorXd w = Eigen::VectorXd::Zero(d);

        double max_delta = 0.0;
        int sweep = 0;
        for (; sweep < opts_.max_sweeps; ++sweep) {
            max_delta = 0.0;
            for (Eigen::Index j = 0; j < d; ++j) {
                if (centred_sq(j) <= 0.0) continue;
                double dot_raw = 0.0;
                for (decltype(Xc)::InnerIterator it(Xc, j); it; ++it) dot_raw += it.value() * r_raw(it.row());
                const double centred_dot = dot_raw + shift * col_sum(j) - mu(j) * (raw_sum + nd * shift);
                const double rho = centred_dot / nd + w(j) * centred_sq(j) / nd;
                const double updated = soft_threshold(rho, opts_.l1) / (centred_sq(j) / nd + opts_.l2);
                const double delta = updated - w(j);
                if (delta == 0.0) continue;
                for (decltype(Xc)::InnerIterator it(Xc, j); it; ++it) r_raw(it.row()) -= delta * it.value();
                raw_sum -= delta * col_sum(j);
                shift += delta * mu(j);
                w(j) = updated;
                max_delta = std::max(max_delta, std::fabs(delta));
            }
            if (max_delta <= opts_.tolerance) break;
        }
        if (max_delta > opts_.tolerance) {
            fit_.converged = false;
            spdlog::warn("elastic net axis {} hit {} sweeps with max coefficient change {:.3e}", axis,
                         opts_.max_sweeps, max_delta);
        }
        fit_.achieved_tolerance = std::max(fit_.achieved_tolerance, max_delta);
        fit_.coef.col(axis) = w;
        fit_.intercept(axis) = y_mean - mu.dot(w);
    }
}

}  // namespace dialnorm::geo
