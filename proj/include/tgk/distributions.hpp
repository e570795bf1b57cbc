#pragma once

namespace tgk {

// Standard normal CDF and its inverse. The quantile is accurate to full
// double precision (rational approximation plus one Halley step).
double normal_cdf(double x);
double normal_quantile(double p);

// Regularized incomplete beta I_x(a, b), continued-fraction evaluation.
double regularized_incomplete_beta(double a, double b, double x);

// Upper tail P(T > x) of the standard Student t with dof >= 1 degrees of
// freedom. Exact (incomplete beta) for every dof; callers that want the
// large-dof normal approximation must opt in explicitly at their level.
double student_t_survival(double dof, double x);

// Inverse of the lower tail: returns q with P(T <= q) = p, p in (0,1).
double student_t_quantile(double dof, double p);

}  // namespace tgk
