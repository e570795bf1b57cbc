#include "tgk/design.hpp"

#include <Eigen/SVD>
#include <cmath>
#include <stdexcept>
#include <string>
#include <utility>

namespace tgk {

DesignSet::DesignSet(Eigen::MatrixXd points) : points_(std::move(points)) {
    if (points_.rows() < 1 || points_.cols() < 1) {
        throw std::invalid_argument("DesignSet: needs at least one point and one dimension");
    }
    for (Eigen::Index i = 0; i < points_.rows(); ++i) {
        for (Eigen::Index k = 0; k < points_.cols(); ++k) {
            const double v = points_(i, k);
            if (!(v >= 0.0 && v <= 1.0)) {
                throw std::invalid_argument("DesignSet: coordinate (" + std::to_string(i) + "," +
                                            std::to_string(k) + ") outside [0,1]");
            }
        }
    }
    for (Eigen::Index i = 0; i < points_.rows(); ++i) {
        for (Eigen::Index j = i + 1; j < points_.rows(); ++j) {
            if ((points_.row(i) - points_.row(j)).cwiseAbs().maxCoeff() == 0.0) {
                throw std::invalid_argument("DesignSet: rows " + std::to_string(i) + " and " +
                                            std::to_string(j) + " are duplicates");
            }
        }
    }
}

int basis_size(TrendBasis basis, int r) {
    switch (basis) {
        case TrendBasis::Constant: return 1;
        case TrendBasis::AffineInA: return 2;
        case TrendBasis::FullAffine: return r + 1;
    }
    throw std::logic_error("basis_size: unknown basis");
}

Eigen::RowVectorXd basis_row(TrendBasis basis, const Eigen::VectorXd& x) {
    const int r = static_cast<int>(x.size());
    Eigen::RowVectorXd row(basis_size(basis, r));
    row[0] = 1.0;
    switch (basis) {
        case TrendBasis::Constant: break;
        case TrendBasis::AffineInA:
            row[1] = x[0];
            break;
        case TrendBasis::FullAffine:
            row.tail(r) = x.transpose();
            break;
    }
    return row;
}

Eigen::MatrixXd trend_matrix(const DesignSet& design, TrendBasis basis) {
    const int n = design.count();
    const int p = basis_size(basis, design.dim());
    if (p >= n) {
        throw std::invalid_argument("trend_matrix: basis size " + std::to_string(p) +
                                    " must be smaller than the design size " + std::to_string(n) +
                                    " for identifiability");
    }
    Eigen::MatrixXd H(n, p);
    for (int i = 0; i < n; ++i) {
        H.row(i) = basis_row(basis, design.points().row(i).transpose());
    }
    const Eigen::JacobiSVD<Eigen::MatrixXd> svd(H);
    const auto& sv = svd.singularValues();
    if (sv[sv.size() - 1] <= 1e-10 * sv[0]) {
        throw std::invalid_argument("trend_matrix: basis is rank deficient on this design");
    }
    return H;
}

namespace {

void fix_column_sign(Eigen::Ref<Eigen::MatrixXd> m) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
        const double norm = m.col(j).norm();
        for (Eigen::Index i = 0; i < m.rows(); ++i) {
            if (std::fabs(m(i, j)) > 1e-12 * norm) {
                if (m(i, j) < 0.0) m.col(j) = -m.col(j);
                break;
            }
        }
    }
}

}  // namespace

Eigen::MatrixXd orthonormal_basis(const Eigen::MatrixXd& H) {
    const Eigen::Index n = H.rows();
    const Eigen::Index p = H.cols();
    Eigen::MatrixXd P(n, p);
    for (Eigen::Index j = 0; j < p; ++j) {
        Eigen::VectorXd v = H.col(j);
        const double original = v.norm();
        if (j > 0) {
            const auto prev = P.leftCols(j);
            v -= prev * (prev.transpose() * v);
            v -= prev * (prev.transpose() * v);  // reorthogonalization pass
        }
        if (v.norm() <= 1e-10 * (original > 0.0 ? original : 1.0)) {
            throw std::invalid_argument("orthonormal_basis: column " + std::to_string(j) +
                                        " is linearly dependent on earlier columns");
        }
        P.col(j) = v / v.norm();
    }
    fix_column_sign(P);
    return P;
}

Eigen::MatrixXd null_space_basis(const Eigen::MatrixXd& H) {
    const Eigen::Index n = H.rows();
    const Eigen::Index p = H.cols();
    const Eigen::JacobiSVD<Eigen::MatrixXd> svd(H, Eigen::ComputeFullU);
    const auto& sv = svd.singularValues();
    if (sv[sv.size() - 1] <= 1e-10 * sv[0]) {
        throw std::invalid_argument("null_space_basis: H is rank deficient");
    }
    Eigen::MatrixXd W = svd.matrixU().rightCols(n - p);
    fix_column_sign(W);
    return W;
}

TrendModel make_trend_model(DesignSet design, TrendBasis basis) {
    Eigen::MatrixXd H = trend_matrix(design, basis);
    Eigen::MatrixXd P = orthonormal_basis(H);
    Eigen::MatrixXd W = null_space_basis(H);
    return TrendModel{std::move(design), basis, std::move(H), std::move(P), std::move(W)};
}

}  // namespace tgk
