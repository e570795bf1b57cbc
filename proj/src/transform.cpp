#include "tgk/transform.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace tgk {

namespace {

void check_alpha(double alpha) {
    if (!(alpha >= 0.0)) {
        throw std::domain_error("transform: alpha must be nonnegative, got " +
                                std::to_string(alpha));
    }
}

void check_positive(double t) {
    if (!(t > 0.0)) {
        throw std::domain_error("transform: argument must be positive, got " +
                                std::to_string(t));
    }
}

// log(cosh(x)) without overflow for large |x|.
double log_cosh(double x) {
    const double ax = std::fabs(x);
    return ax + std::log1p(std::exp(-2.0 * ax)) - M_LN2;
}

}  // namespace

double sinh_log(double alpha, double t) {
    check_alpha(alpha);
    check_positive(t);
    const double u = std::log(t);
    const double x = alpha * u;
    if (std::fabs(x) < 1e-4) {
        // sinh(x)/alpha by series in x = alpha*log(t); the leading term is the
        // alpha = 0 branch, so the seam across alpha -> 0 stays continuous.
        const double x2 = x * x;
        return u * (1.0 + x2 / 6.0 * (1.0 + x2 / 20.0));
    }
    return std::sinh(x) / alpha;
}

double sinh_log_deriv(double alpha, double t) {
    check_alpha(alpha);
    check_positive(t);
    return std::cosh(alpha * std::log(t)) / t;
}

double sinh_log_inverse(double alpha, double y) {
    check_alpha(alpha);
    const double x = alpha * y;
    if (std::fabs(x) < 1e-4) {
        // asinh(x)/alpha by series in x = alpha*y.
        const double x2 = x * x;
        return std::exp(y * (1.0 - x2 / 6.0 * (1.0 - 9.0 * x2 / 20.0)));
    }
    return std::exp(std::asinh(x) / alpha);
}

double box_cox(double alpha, double t) {
    check_alpha(alpha);
    check_positive(t);
    if (alpha == 0.0) return std::log(t);
    return std::expm1(alpha * std::log(t)) / alpha;
}

TransformedObs transform_observations(double alpha, const Eigen::VectorXd& z) {
    check_alpha(alpha);
    TransformedObs out;
    out.values.resize(z.size());
    out.log_jacobian = 0.0;
    for (Eigen::Index i = 0; i < z.size(); ++i) {
        if (!(z[i] > 0.0)) {
            throw std::domain_error("transform_observations: entry " + std::to_string(i) +
                                    " is not positive (" + std::to_string(z[i]) + ")");
        }
        const double u = std::log(z[i]);
        out.values[i] = sinh_log(alpha, z[i]);
        out.log_jacobian += log_cosh(alpha * u) - u;
    }
    return out;
}

}  // namespace tgk
