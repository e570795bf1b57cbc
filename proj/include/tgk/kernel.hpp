#pragma once

#include <Eigen/Core>
#include <vector>

#include "tgk/parallel.hpp"

namespace tgk {

// Matern correlation of smoothness 5/2 as a function of scaled distance:
// k(d) = (1 + sqrt(5) d + 5 d^2 / 3) exp(-sqrt(5) d).
double matern52(double d);

// Geometric anisotropy: sqrt(sum_k ((u_k - v_k) / theta_k)^2).
double anisotropic_distance(const Eigen::VectorXd& u, const Eigen::VectorXd& v,
                            const Eigen::VectorXd& theta);

// n x n correlation matrix of the design points (rows of `points`).
// Symmetric, unit diagonal. The Parallel policy splits over rows.
Eigen::MatrixXd correlation_matrix(const Eigen::MatrixXd& points, const Eigen::VectorXd& theta,
                                   Exec mode = Exec::Parallel);

// Correlation row between a new point and every design point.
Eigen::VectorXd cross_correlation(const Eigen::MatrixXd& points, const Eigen::VectorXd& x0,
                                  const Eigen::VectorXd& theta);

// Analytic d(correlation_matrix)/d(theta_k); symmetric with zero diagonal.
Eigen::MatrixXd correlation_matrix_grad(const Eigen::MatrixXd& points,
                                        const Eigen::VectorXd& theta, int k);

// Per-coordinate squared differences cached once per design. A change to a
// single theta_k then costs O(n^2) instead of O(r n^2), which is what the
// component-at-a-time sampler leans on.
class PairwiseDistances {
public:
    explicit PairwiseDistances(const Eigen::MatrixXd& points);

    int count() const { return n_; }
    int dim() const { return static_cast<int>(coord_sq_.size()); }
    const Eigen::MatrixXd& coord_sq(int k) const { return coord_sq_[static_cast<size_t>(k)]; }

    // Squared scaled distances for the given correlation lengths.
    Eigen::MatrixXd scaled_sq(const Eigen::VectorXd& theta) const;

private:
    int n_;
    std::vector<Eigen::MatrixXd> coord_sq_;
};

// Elementwise Matern 5/2 on sqrt of the squared-distance matrix, plus the
// shared gradient factor G with d(Sigma)/d(theta_k) = G .* coord_sq(k) / theta_k^3.
void matern52_from_scaled_sq(const Eigen::MatrixXd& d2, Eigen::MatrixXd& corr,
                             Eigen::MatrixXd* grad_factor = nullptr);

void check_theta(const Eigen::VectorXd& theta, int expected_dim);

}  // namespace tgk
