#pragma once

#include <Eigen/Core>

namespace tgk {

// Lower-triangular Cholesky factor, kept together with the smallest pivot so
// callers can report conditioning. One factorization serves determinant,
// quadratic forms and solves.
struct CholeskyFactor {
    Eigen::MatrixXd L;
    double min_pivot;

    double log_det() const;  // of the factored matrix, 2 * sum log diag(L)

    // L^{-1} b (half solve; squared norm of the result is the quadratic form).
    Eigen::VectorXd half_solve(const Eigen::VectorXd& b) const;
    Eigen::MatrixXd half_solve(const Eigen::MatrixXd& B) const;

    // Full solve A^{-1} b.
    Eigen::VectorXd solve(const Eigen::VectorXd& b) const;
    Eigen::MatrixXd solve(const Eigen::MatrixXd& B) const;
};

// Throws IllConditionedError (with the failing pivot) when the matrix is not
// numerically positive definite. `context` names the matrix in the message.
CholeskyFactor cholesky(const Eigen::MatrixXd& a, const char* context);

}  // namespace tgk
