#pragma once

namespace dialnorm::special {

/// Regularized incomplete beta I_x(a, b) for a, b > 0 and x in [0, 1].
/// Evaluated with the modified Lentz continued fraction (relative
/// convergence 1e-12, at most 500 iterations), using the reflection
/// I_x(a,b) = 1 - I_{1-x}(b,a) on the slowly-converging side.
double incomplete_beta(double a, double b, double x);

/// Survival function P(F > x) of the F(df1, df2) distribution.
/// Degrees of freedom may be non-integer. Throws DomainError for x < 0.
double f_sf(double x, double df1, double df2);

/// Inverse survival function: the x with f_sf(x) = p, found by bisection
/// to an absolute tolerance of 1e-9.
double f_isf(double p, double df1, double df2);

/// Two-sided p-value of a t statistic with `df` degrees of freedom,
/// computed as f_sf(t^2, 1, df).
double t_two_sided_p(double t, double df);

}  // namespace dialnorm::special
