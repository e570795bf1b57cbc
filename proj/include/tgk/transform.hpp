#pragma once

#include <Eigen/Core>

namespace tgk {

// Monotone output-space transformations indexed by alpha >= 0.
//
// sinh_log is (1/alpha) * sinh(alpha * log t), a strictly increasing bijection
// from (0,inf) onto the whole real line for every alpha; alpha = 0 is the
// plain logarithm and alpha = 1 behaves like t/2 for large t. box_cox is the
// classical power transform; for alpha > 0 its range stops at -1/alpha, so it
// is kept for family comparisons only and never enters the model path.
enum class TransformFamily { SinhLog, BoxCox };

double sinh_log(double alpha, double t);
double sinh_log_deriv(double alpha, double t);
double sinh_log_inverse(double alpha, double y);
double box_cox(double alpha, double t);

struct TransformedObs {
    Eigen::VectorXd values;
    double log_jacobian;  // sum over observations of log d/dt sinh_log
};

// Componentwise sinh_log with the accumulated log-Jacobian. Every entry of z
// must be strictly positive; the error message names the offending index.
TransformedObs transform_observations(double alpha, const Eigen::VectorXd& z);

}  // namespace tgk
