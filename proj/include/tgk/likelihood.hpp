#pragma once

#include <Eigen/Core>
#include <vector>

#include "tgk/design.hpp"

namespace tgk {

struct GaussianHyper {
    Eigen::VectorXd beta;  // trend coefficients, transformed-output units
    double sigma2;         // process variance, transformed-output units squared
};

// Log of the full Gaussian likelihood of (beta, sigma2, theta) given y:
// -(n/2) log(2 pi sigma2) - (1/2) log|Sigma| - (1/2 sigma2) (y-Hb)' Sigma^{-1} (y-Hb).
double log_likelihood(const Eigen::VectorXd& y, const GaussianHyper& hyper,
                      const Eigen::VectorXd& theta, const TrendModel& model,
                      double jitter = 0.0);

// Log integrated likelihood with beta and sigma2 marginalized under the
// reference prior 1/sigma2. Depends on y only through W'y:
//
//   log Gamma(m/2) - log 2 - (m/2) log pi
//     - (1/2) log|W'Sigma W| - (m/2) log( y' W (W'Sigma W)^{-1} W' y ),
//
// with m = n - p. One Cholesky of W'Sigma W serves both the determinant and
// the quadratic form. Note on the leading constant: direct integration of the
// full likelihood times 1/sigma2 gives Gamma(m/2) pi^{-m/2} |H'H|^{-1/2}
// rather than Gamma(m/2) pi^{-m/2} / 2 as implemented; the two differ by the
// theta- and alpha-independent factor sqrt(|H'H|)/2, so maximizers and
// posterior shapes are unaffected. The quadrature suite pins the offset.
double integrated_log_likelihood(const Eigen::VectorXd& y, const Eigen::VectorXd& theta,
                                 const TrendModel& model, double jitter = 0.0);

// Same surfaces for observations that are positive raw outputs: apply the
// sinh_log transform at `alpha` and add the log-Jacobian.
double transformed_log_likelihood(const Eigen::VectorXd& z, const GaussianHyper& hyper,
                                  const Eigen::VectorXd& theta, double alpha,
                                  const TrendModel& model, double jitter = 0.0);

double transformed_integrated_log_likelihood(const Eigen::VectorXd& z,
                                             const Eigen::VectorXd& theta, double alpha,
                                             const TrendModel& model, double jitter = 0.0);

// log L^LOG(z|alpha): mean of the transformed integrated log-likelihood over
// posterior draws of theta. Draws whose correlation matrix fails to factor
// are skipped and counted; more than `skip_limit` of them is an error.
double log_l_log(const Eigen::VectorXd& z, double alpha,
                 const std::vector<Eigen::VectorXd>& draws, const TrendModel& model,
                 double jitter = 0.0, int* skipped = nullptr, double skip_limit = 0.2);

}  // namespace tgk
