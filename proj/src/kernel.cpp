#include "tgk/kernel.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace tgk {

namespace {
const double kSqrt5 = std::sqrt(5.0);
}

void check_theta(const Eigen::VectorXd& theta, int expected_dim) {
    if (theta.size() != expected_dim) {
        throw std::invalid_argument("correlation lengths: expected dimension " +
                                    std::to_string(expected_dim) + ", got " +
                                    std::to_string(theta.size()));
    }
    for (Eigen::Index k = 0; k < theta.size(); ++k) {
        if (!(theta[k] > 0.0) || !std::isfinite(theta[k])) {
            throw std::invalid_argument("correlation lengths: component " + std::to_string(k) +
                                        " must be positive and finite");
        }
    }
}

double matern52(double d) {
    if (!(d >= 0.0)) {
        throw std::domain_error("matern52: distance must be nonnegative");
    }
    const double s = kSqrt5 * d;
    return (1.0 + s + s * s / 3.0) * std::exp(-s);
}

double anisotropic_distance(const Eigen::VectorXd& u, const Eigen::VectorXd& v,
                            const Eigen::VectorXd& theta) {
    if (u.size() != v.size() || u.size() != theta.size()) {
        throw std::invalid_argument("anisotropic_distance: dimension mismatch");
    }
    double s = 0.0;
    for (Eigen::Index k = 0; k < u.size(); ++k) {
        const double t = (u[k] - v[k]) / theta[k];
        s += t * t;
    }
    return std::sqrt(s);
}

Eigen::MatrixXd correlation_matrix(const Eigen::MatrixXd& points, const Eigen::VectorXd& theta,
                                   Exec mode) {
    check_theta(theta, static_cast<int>(points.cols()));
    const int n = static_cast<int>(points.rows());
    Eigen::MatrixXd corr(n, n);
    parallel_for(static_cast<std::size_t>(n), [&](std::size_t i) {
        corr(i, i) = 1.0;
        for (std::size_t j = 0; j < i; ++j) {
            double d2 = 0.0;
            for (Eigen::Index k = 0; k < points.cols(); ++k) {
                const double t = (points(i, k) - points(j, k)) / theta[k];
                d2 += t * t;
            }
            const double s = kSqrt5 * std::sqrt(d2);
            const double value = (1.0 + s + s * s / 3.0) * std::exp(-s);
            corr(i, j) = value;
            corr(j, i) = value;
        }
    }, mode);
    return corr;
}

Eigen::VectorXd cross_correlation(const Eigen::MatrixXd& points, const Eigen::VectorXd& x0,
                                  const Eigen::VectorXd& theta) {
    if (x0.size() != points.cols()) {
        throw std::invalid_argument("cross_correlation: point dimension mismatch");
    }
    check_theta(theta, static_cast<int>(points.cols()));
    Eigen::VectorXd row(points.rows());
    for (Eigen::Index i = 0; i < points.rows(); ++i) {
        row[i] = matern52(anisotropic_distance(points.row(i).transpose(), x0, theta));
    }
    return row;
}

Eigen::MatrixXd correlation_matrix_grad(const Eigen::MatrixXd& points,
                                        const Eigen::VectorXd& theta, int k) {
    check_theta(theta, static_cast<int>(points.cols()));
    if (k < 0 || k >= points.cols()) {
        throw std::invalid_argument("correlation_matrix_grad: coordinate index out of range");
    }
    const int n = static_cast<int>(points.rows());
    const double inv_t3 = 1.0 / (theta[k] * theta[k] * theta[k]);
    Eigen::MatrixXd grad = Eigen::MatrixXd::Zero(n, n);
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < i; ++j) {
            double d2 = 0.0;
            for (Eigen::Index c = 0; c < points.cols(); ++c) {
                const double t = (points(i, c) - points(j, c)) / theta[c];
                d2 += t * t;
            }
            const double d = std::sqrt(d2);
            const double dk = points(i, k) - points(j, k);
            // d k(d)/d theta_k = (5/3) (1 + sqrt5 d) exp(-sqrt5 d) * dk^2 / theta_k^3
            const double value = (5.0 / 3.0) * (1.0 + kSqrt5 * d) * std::exp(-kSqrt5 * d) *
                                 dk * dk * inv_t3;
            grad(i, j) = value;
            grad(j, i) = value;
        }
    }
    return grad;
}

PairwiseDistances::PairwiseDistances(const Eigen::MatrixXd& points)
    : n_(static_cast<int>(points.rows())) {
    coord_sq_.reserve(static_cast<size_t>(points.cols()));
    for (Eigen::Index k = 0; k < points.cols(); ++k) {
        Eigen::MatrixXd m(n_, n_);
        for (int i = 0; i < n_; ++i) {
            for (int j = 0; j < n_; ++j) {
                const double d = points(i, k) - points(j, k);
                m(i, j) = d * d;
            }
        }
        coord_sq_.push_back(std::move(m));
    }
}

Eigen::MatrixXd PairwiseDistances::scaled_sq(const Eigen::VectorXd& theta) const {
    check_theta(theta, dim());
    Eigen::MatrixXd d2 = Eigen::MatrixXd::Zero(n_, n_);
    for (int k = 0; k < dim(); ++k) {
        d2 += coord_sq_[static_cast<size_t>(k)] / (theta[k] * theta[k]);
    }
    return d2;
}

void matern52_from_scaled_sq(const Eigen::MatrixXd& d2, Eigen::MatrixXd& corr,
                             Eigen::MatrixXd* grad_factor) {
    const Eigen::ArrayXXd d = d2.array().sqrt();
    const Eigen::ArrayXXd e = (-kSqrt5 * d).exp();
    corr = ((1.0 + kSqrt5 * d + (5.0 / 3.0) * d2.array()) * e).matrix();
    if (grad_factor != nullptr) {
        *grad_factor = ((5.0 / 3.0) * (1.0 + kSqrt5 * d) * e).matrix();
    }
}

}  // namespace tgk
