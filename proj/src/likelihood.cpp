#include "tgk/likelihood.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "tgk/errors.hpp"
#include "tgk/kernel.hpp"
#include "tgk/linalg.hpp"
#include "tgk/transform.hpp"

namespace tgk {

namespace {

Eigen::MatrixXd correlation_with_jitter(const TrendModel& model, const Eigen::VectorXd& theta,
                                        double jitter) {
    Eigen::MatrixXd corr = correlation_matrix(model.design.points(), theta, Exec::Serial);
    if (jitter > 0.0) corr.diagonal().array() += jitter;
    return corr;
}

}  // namespace

double log_likelihood(const Eigen::VectorXd& y, const GaussianHyper& hyper,
                      const Eigen::VectorXd& theta, const TrendModel& model, double jitter) {
    const int n = model.n();
    if (y.size() != n) throw std::invalid_argument("log_likelihood: observation size mismatch");
    if (hyper.beta.size() != model.p()) {
        throw std::invalid_argument("log_likelihood: beta size mismatch");
    }
    if (!(hyper.sigma2 > 0.0)) {
        throw std::invalid_argument("log_likelihood: sigma2 must be positive");
    }
    const CholeskyFactor chol = cholesky(correlation_with_jitter(model, theta, jitter),
                                         "correlation matrix");
    const Eigen::VectorXd half = chol.half_solve(Eigen::VectorXd(y - model.H * hyper.beta));
    return -0.5 * n * std::log(2.0 * M_PI * hyper.sigma2) - 0.5 * chol.log_det() -
           0.5 * half.squaredNorm() / hyper.sigma2;
}

double integrated_log_likelihood(const Eigen::VectorXd& y, const Eigen::VectorXd& theta,
                                 const TrendModel& model, double jitter) {
    const int n = model.n();
    const int p = model.p();
    const int m = n - p;
    if (y.size() != n) {
        throw std::invalid_argument("integrated_log_likelihood: observation size mismatch");
    }
    if (m < 1) throw std::invalid_argument("integrated_log_likelihood: needs n > p");

    const Eigen::MatrixXd corr = correlation_with_jitter(model, theta, jitter);
    Eigen::MatrixXd projected(m, m);
    projected.noalias() = model.W.transpose() * corr * model.W;
    const CholeskyFactor chol = cholesky(projected, "projected correlation matrix");

    const Eigen::VectorXd half = chol.half_solve(Eigen::VectorXd(model.W.transpose() * y));
    const double quad = half.squaredNorm();
    if (!(quad > 0.0)) {
        throw std::runtime_error("integrated_log_likelihood: projected quadratic form is not "
                                 "positive (degenerate observations)");
    }
    return std::lgamma(0.5 * m) - M_LN2 - 0.5 * m * std::log(M_PI) - 0.5 * chol.log_det() -
           0.5 * m * std::log(quad);
}

double transformed_log_likelihood(const Eigen::VectorXd& z, const GaussianHyper& hyper,
                                  const Eigen::VectorXd& theta, double alpha,
                                  const TrendModel& model, double jitter) {
    const TransformedObs t = transform_observations(alpha, z);
    return log_likelihood(t.values, hyper, theta, model, jitter) + t.log_jacobian;
}

double transformed_integrated_log_likelihood(const Eigen::VectorXd& z,
                                             const Eigen::VectorXd& theta, double alpha,
                                             const TrendModel& model, double jitter) {
    const TransformedObs t = transform_observations(alpha, z);
    return integrated_log_likelihood(t.values, theta, model, jitter) + t.log_jacobian;
}

double log_l_log(const Eigen::VectorXd& z, double alpha,
                 const std::vector<Eigen::VectorXd>& draws, const TrendModel& model,
                 double jitter, int* skipped, double skip_limit) {
    if (draws.empty()) throw std::invalid_argument("log_l_log: needs at least one theta draw");
    const TransformedObs t = transform_observations(alpha, z);
    double sum = 0.0;
    int kept = 0;
    int dropped = 0;
    for (const Eigen::VectorXd& theta : draws) {
        try {
            sum += integrated_log_likelihood(t.values, theta, model, jitter);
            ++kept;
        } catch (const IllConditionedError&) {
            ++dropped;
        }
    }
    if (skipped != nullptr) *skipped = dropped;
    if (dropped > skip_limit * static_cast<double>(draws.size())) {
        throw std::runtime_error("log_l_log: " + std::to_string(dropped) + " of " +
                                 std::to_string(draws.size()) +
                                 " draws were ill-conditioned (limit " +
                                 std::to_string(skip_limit) + ")");
    }
    return sum / static_cast<double>(kept) + t.log_jacobian;
}

}  // namespace tgk
