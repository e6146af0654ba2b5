#pragma once

#include "dialnorm/error.hpp"
#include "dialnorm/special_functions.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <string>
#include <utility>

namespace dialnorm {

/// Subjects x raters. Rows are rated items, columns are annotators.
template <typename Scalar>
using RatingMatrixT = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
using RatingMatrix = RatingMatrixT<double>;

struct IccResult {
    double icc = 0.0;
    double f = 0.0;
    int df1 = 0;
    int df2 = 0;
    double p = 1.0;
    double ci_low = 0.0;
    double ci_high = 0.0;
};

/// Mean squares of the two-way ANOVA without replication.
struct TwoWayAnova {
    double ms_rows = 0.0;     ///< between subjects
    double ms_cols = 0.0;     ///< between raters
    double ms_error = 0.0;    ///< residual
    Eigen::Index n = 0;
    Eigen::Index k = 0;
};

namespace detail {

template <typename Derived>
void check_rating_matrix(const Eigen::MatrixBase<Derived>& m) {
    if (m.rows() < 2 || m.cols() < 2) {
        throw ValidationError("rating matrix needs at least 2 subjects and 2 raters, got " +
                              std::to_string(m.rows()) + "x" + std::to_string(m.cols()));
    }
    if (!m.allFinite()) throw ValidationError("rating matrix contains NaN or infinite cells");
}

IccResult icc2k_from_anova(const TwoWayAnova& anova);

}  // namespace detail

template <typename Derived>
TwoWayAnova two_way_anova(const Eigen::MatrixBase<Derived>& ratings) {
    detail::check_rating_matrix(ratings);
    const Eigen::MatrixXd x = ratings.template cast<double>();
    const Eigen::Index n = x.rows();
    const Eigen::Index k = x.cols();
    const double grand = x.mean();
    const Eigen::VectorXd row_means = x.rowwise().mean();
    const Eigen::RowVectorXd col_means = x.colwise().mean();

    const double ss_rows = static_cast<double>(k) * (row_means.array() - grand).square().sum();
    const double ss_cols = static_cast<double>(n) * (col_means.array() - grand).square().sum();
    const Eigen::MatrixXd residual =
        (x.colwise() - row_means).rowwise() - (col_means.array() - grand).matrix();
    const double ss_error = residual.squaredNorm();

    TwoWayAnova a;
    a.n = n;
    a.k = k;
    a.ms_rows = ss_rows / static_cast<double>(n - 1);
    a.ms_cols = ss_cols / static_cast<double>(k - 1);
    a.ms_error = ss_error / static_cast<double>((n - 1) * (k - 1));
    return a;
}

/// ICC(2,k): two-way random effects, absolute agreement, average of k raters,
/// with the F test against ICC = 0 and a 95% confidence interval.
template <typename Derived>
IccResult icc2k(const Eigen::MatrixBase<Derived>& ratings) {
    return detail::icc2k_from_anova(two_way_anova(ratings));
}

/// Mean of the Pearson correlations over all unordered rater pairs.
template <typename Derived>
double pearson_pairwise_avg(const Eigen::MatrixBase<Derived>& ratings) {
    detail::check_rating_matrix(ratings);
    const Eigen::MatrixXd x = ratings.template cast<double>();
    const Eigen::MatrixXd centered = x.rowwise() - x.colwise().mean();
    const Eigen::VectorXd norms = centered.colwise().norm();
    for (Eigen::Index j = 0; j < x.cols(); ++j) {
        if (!(norms(j) > 0.0)) {
            throw DegenerateError("rater column " + std::to_string(j) + " has zero variance");
        }
    }
    double total = 0.0;
    int pairs = 0;
    for (Eigen::Index i = 0; i < x.cols(); ++i) {
        for (Eigen::Index j = i + 1; j < x.cols(); ++j) {
            const double r = centered.col(i).dot(centered.col(j)) / (norms(i) * norms(j));
            total += std::clamp(r, -1.0, 1.0);
            ++pairs;
        }
    }
    return total / pairs;
}

struct TTestResult {
    double t = 0.0;
    double p = 1.0;
    int df = 0;
};

/// Paired two-sided t-test on d = a - b.
template <typename DerivedA, typename DerivedB>
TTestResult paired_ttest(const Eigen::MatrixBase<DerivedA>& a, const Eigen::MatrixBase<DerivedB>& b) {
    if (a.size() != b.size()) {
        throw ValidationError("paired samples differ in length: " + std::to_string(a.size()) + " vs " +
                              std::to_string(b.size()));
    }
    if (a.size() < 2) throw ValidationError("paired t-test needs at least 2 pairs");
    const Eigen::VectorXd d =
        a.template cast<double>().reshaped() - b.template cast<double>().reshaped();
    if (!d.allFinite()) throw ValidationError("paired samples contain NaN or infinite values");
    const auto n = static_cast<double>(d.size());
    const double mean = d.mean();
    const double sd = std::sqrt((d.array() - mean).square().sum() / (n - 1.0));
    if (!(sd > 0.0)) throw DegenerateError("paired differences have zero variance");
    TTestResult r;
    r.t = mean / (sd / std::sqrt(n));
    r.df = static_cast<int>(d.size() - 1);
    r.p = special::t_two_sided_p(r.t, r.df);
    return r;
}

}  // namespace dialnorm
