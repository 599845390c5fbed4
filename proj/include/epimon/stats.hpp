#pragma once

namespace epimon::stats {

/// Regularized incomplete beta I_x(a, b), continued-fraction evaluation.
double incomplete_beta(double a, double b, double x);

double normal_cdf(double x);
/// Standard normal quantile (Acklam's rational approximation, one Newton polish).
double normal_quantile(double p);

/// CDF of Student's t with df degrees of freedom.
double student_cdf(double t, double df);

/// gamma-quantile of Student's t; bracketed root-finding on student_cdf.
double student_quantile(double gamma, double df);

}  // namespace epimon::stats
