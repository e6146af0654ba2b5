#include "dialnorm/reliability.hpp"

#include <algorithm>
#include <limits>

namespace dialnorm::detail {

IccResult icc2k_from_anova(const TwoWayAnova& a) {
    const double n = static_cast<double>(a.n);
    const double k = static_cast<double>(a.k);
    const double msr = a.ms_rows;
    const double msc = a.ms_cols;
    const double mse = a.ms_error;

    // Mean squares this small relative to the largest are round-off zeros.
    const double scale = std::max({msr, msc, mse});
    const double eps = 1e-14 * scale;
    const bool mse_zero = mse <= eps;
    if (mse_zero && msr <= eps) throw DegenerateError("all ratings identical; ICC is undefined");

    IccResult r;
    r.df1 = static_cast<int>(a.n - 1);
    r.df2 = static_cast<int>((a.n - 1) * (a.k - 1));
    r.icc = (msr - mse) / (msr + (msc - mse) / n);

    if (mse_zero) {
        r.icc = msr / (msr + msc / n);
        r.f = std::numeric_limits<double>::infinity();
        r.p = 0.0;
        if (msc <= eps) {
            r.ci_low = r.ci_high = r.icc;
            return r;
        }
    } else {
        r.f = msr / mse;
        r.p = special::f_sf(r.f, r.df1, r.df2);
    }

    // Confidence interval for the single-rater ICC(2,1) with Satterthwaite
    // degrees of freedom, then stepped up to k raters (Spearman-Brown).
    const double icc1 = (msr - mse) / (msr + (k - 1.0) * mse + k * (msc - mse) / n);
    const double aa = k * icc1 / (n * (1.0 - icc1));
    const double bb = 1.0 + k * icc1 * (n - 1.0) / (n * (1.0 - icc1));
    const double v = std::pow(aa * msc + bb * mse, 2.0) /
                     (std::pow(aa * msc, 2.0) / (k - 1.0) + std::pow(bb * mse, 2.0) / ((n - 1.0) * (k - 1.0)));
    const double fs = special::f_isf(0.025, n - 1.0, v);
    const double fi = special::f_isf(0.025, v, n - 1.0);
    const double denom = k * msc + (k * n - k - n) * mse;
    const double lb1 = n * (msr - fs * mse) / (fs * denom + n * msr);
    const double ub1 = n * (fi * msr - mse) / (denom + n * fi * msr);
    r.ci_low = lb1 * k / (1.0 + lb1 * (k - 1.0));
    r.ci_high = ub1 * k / (1.0 + ub1 * (k - 1.0));
    return r;
}

}  // namespace dialnorm::detail
