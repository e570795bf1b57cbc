#include "tgk/linalg.hpp"

#include <Eigen/Cholesky>
#include <cmath>
#include <string>

#include "tgk/errors.hpp"

namespace tgk {

double CholeskyFactor::log_det() const {
    return 2.0 * L.diagonal().array().log().sum();
}

Eigen::VectorXd CholeskyFactor::half_solve(const Eigen::VectorXd& b) const {
    return L.triangularView<Eigen::Lower>().solve(b);
}

Eigen::MatrixXd CholeskyFactor::half_solve(const Eigen::MatrixXd& B) const {
    return L.triangularView<Eigen::Lower>().solve(B);
}

Eigen::VectorXd CholeskyFactor::solve(const Eigen::VectorXd& b) const {
    Eigen::VectorXd x = L.triangularView<Eigen::Lower>().solve(b);
    return L.transpose().triangularView<Eigen::Upper>().solve(x);
}

Eigen::MatrixXd CholeskyFactor::solve(const Eigen::MatrixXd& B) const {
    Eigen::MatrixXd X = L.triangularView<Eigen::Lower>().solve(B);
    return L.transpose().triangularView<Eigen::Upper>().solve(X);
}

namespace {

// Unblocked factorization used only on the failure path, to recover the
// first nonpositive pivot for the error report.
double failing_pivot(Eigen::MatrixXd a) {
    const Eigen::Index n = a.rows();
    double worst = a(0, 0);
    for (Eigen::Index j = 0; j < n; ++j) {
        double pivot = a(j, j);
        for (Eigen::Index k = 0; k < j; ++k) pivot -= a(j, k) * a(j, k);
        if (!(pivot > 0.0) || !std::isfinite(pivot)) return pivot;
        worst = std::min(worst, pivot);
        const double l = std::sqrt(pivot);
        a(j, j) = l;
        for (Eigen::Index i = j + 1; i < n; ++i) {
            double v = a(i, j);
            for (Eigen::Index k = 0; k < j; ++k) v -= a(i, k) * a(j, k);
            a(i, j) = v / l;
        }
    }
    return worst;
}

}  // namespace

CholeskyFactor cholesky(const Eigen::MatrixXd& a, const char* context) {
    Eigen::LLT<Eigen::MatrixXd> llt(a);
    if (llt.info() != Eigen::Success) {
        throw IllConditionedError(std::string(context) + ": Cholesky factorization failed",
                                  failing_pivot(a));
    }
    CholeskyFactor f;
    f.L = llt.matrixL();
    f.min_pivot = f.L.diagonal().minCoeff();
    return f;
}

}  // namespace tgk
