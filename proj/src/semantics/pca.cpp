#include "dialnorm/semantics/pca.hpp"

#include "dialnorm/error.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace dialnorm::sem {

SymmetricEigen jacobi_eigen(const Eigen::MatrixXd& A_in, double tolerance, int max_sweeps) {
    if (A_in.rows() != A_in.cols()) throw ValidationError("jacobi_eigen needs a square matrix");
    const Eigen::Index n = A_in.rows();
    Eigen::MatrixXd A = 0.5 * (A_in + A_in.transpose());
    Eigen::MatrixXd V = Eigen::MatrixXd::Identity(n, n);
    const double scale = A.norm();

    auto off_norm = [&] {
        double s = 0.0;
        for (Eigen::Index i = 0; i < n; ++i) {
            for (Eigen::Index j = i + 1; j < n; ++j) s += 2.0 * A(i, j) * A(i, j);
        }
        return std::sqrt(s);
    };

    for (int sweep = 0; sweep < max_sweeps && scale > 0.0 && off_norm() > tolerance * scale; ++sweep) {
        for (Eigen::Index p = 0; p < n - 1; ++p) {
            for (Eigen::Index q = p + 1; q < n; ++q) {
                const double apq = A(p, q);
                if (apq == 0.0) continue;
                const double theta = (A(q, q) - A(p, p)) / (2.0 * apq);
                const double t = (theta >= 0.0 ? 1.0 : -1.0) / (std::fabs(theta) + std::sqrt(theta * theta + 1.0));
                const double c = 1.0 / std::sqrt(t * t + 1.0);
                const double s = t * c;
                for (Eigen::Index k = 0; k < n; ++k) {
                    const double akp = A(k, p);
                    const double akq = A(k, q);
                    A(k, p) = c * akp - s * akq;
                    A(k, q) = s * akp + c * akq;
                }
                for (Eigen::Index k = 0; k < n; ++k) {
                    const double apk = A(p, k);
                    const double aqk = A(q, k);
                    A(p, k) = c * apk - s * aqk;
                    A(q, k) = s * apk + c * aqk;
                }
                for (Eigen::Index k = 0; k < n; ++k) {
                    const double vkp = V(k, p);
                    const double vkq = V(k, q);
                    V(k, p) = c * vkp - s * vkq;
                    V(k, q) = s * vkp + c * vkq;
                }
            }
        }
    }

    std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
    std::iota(order.begin(), order.end(), Eigen::Index{0});
    std::stable_sort(order.begin(), order.end(), [&](auto a, auto b) { return A(a, a) > A(b, b); });
    SymmetricEigen out;
    out.values.resize(n);
    out.vectors.resize(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
        out.values(i) = A(order[static_cast<std::size_t>(i)], order[static_cast<std::size_t>(i)]);
        out.vectors.col(i) = V.col(order[static_cast<std::size_t>(i)]);
    }
    return out;
}

namespace {

void fix_sign(Eigen::Ref<Eigen::VectorXd> v) {
    Eigen::Index arg = 0;
    v.cwiseAbs().maxCoeff(&arg);
    if (v(arg) < 0.0) v = -v;
}

/// Unit vector orthogonal to `u`, taken from the standard basis.
Eigen::VectorXd orthogonal_to(const Eigen::VectorXd& u) {
    Eigen::Index best = 0;
    u.cwiseAbs().minCoeff(&best);
    Eigen::VectorXd e = Eigen::VectorXd::Unit(u.size(), best);
    e -= u.dot(e) * u;
    return e.normalized();
}

}  // namespace

Pca2 pca2(const Eigen::MatrixXd& X) {
    const Eigen::Index n = X.rows();
    const Eigen::Index d = X.cols();
    if (n < 3) throw ValidationError("pca2 needs at least 3 points, got " + std::to_string(n));
    if (d < 2) throw ValidationError("pca2 needs at least 2 dimensions");
    if (!X.allFinite()) throw ValidationError("points contain NaN or infinite values");

    Pca2 out;
    out.mean = X.colwise().mean();
    const Eigen::MatrixXd Xc = X.rowwise() - out.mean;
    const double denom = static_cast<double>(n - 1);
    const double total = Xc.squaredNorm() / denom;
    if (!(total > 1e-300)) throw DegenerateError("data has zero variance");

    out.components.resize(d, 2);
    if (d <= n) {
        const auto eig = jacobi_eigen(Xc.transpose() * Xc / denom);
        out.components = eig.vectors.leftCols(2);
        out.explained_variance = eig.values.head(2).cwiseMax(0.0);
    } else {
        // Work in the n x n Gram space; components are Xc^T u scaled to unit length.
        const auto eig = jacobi_eigen(Xc * Xc.transpose() / denom);
        out.explained_variance = eig.values.head(2).cwiseMax(0.0);
        for (int c = 0; c < 2; ++c) {
            Eigen::VectorXd v = Xc.transpose() * eig.vectors.col(c);
            if (c == 1) v -= out.components.col(0).dot(v) * out.components.col(0);
            const double norm = v.norm();
            if (norm > 1e-12 * std::sqrt(total * denom)) {
                out.components.col(c) = v / norm;
            } else {
                out.components.col(c) = orthogonal_to(out.components.col(0));
                out.explained_variance(c) = 0.0;
            }
        }
    }
    for (int c = 0; c < 2; ++c) fix_sign(out.components.col(c));
    out.projection = Xc * out.components;
    out.explained_ratio = out.explained_variance / total;
    return out;
}

}  // namespace dialnorm::sem
