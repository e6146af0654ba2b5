#pragma once

#include <Eigen/Dense>

namespace dialnorm::sem {

struct SymmetricEigen {
    Eigen::VectorXd values;   ///< descending
    Eigen::MatrixXd vectors;  ///< column i pairs with values(i)
};

/// Cyclic Jacobi rotations until the off-diagonal Frobenius norm is at most
/// tolerance times the matrix norm.
SymmetricEigen jacobi_eigen(const Eigen::MatrixXd& A, double tolerance = 1e-14, int max_sweeps = 100);

struct Pca2 {
    Eigen::RowVectorXd mean;
    Eigen::Matrix<double, Eigen::Dynamic, 2> components;  ///< d x 2, orthonormal
    Eigen::Matrix<double, Eigen::Dynamic, 2> projection;  ///< n x 2
    Eigen::Vector2d explained_variance;                   ///< eigenvalues / (n - 1)
    Eigen::Vector2d explained_ratio;
};

/// Top two principal axes of the row points. Each component's largest
/// magnitude loading is made positive. Throws ValidationError for n < 3 and
/// DegenerateError for zero total variance.
Pca2 pca2(const Eigen::MatrixXd& X);

}  // namespace dialnorm::sem
