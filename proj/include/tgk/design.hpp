#pragma once

#include <Eigen/Core>

namespace tgk {

// Design points in the unit cube [0,1]^r, one row per point. The first
// coordinate is the parameter of interest. Duplicate rows are rejected at
// construction: with no nugget they make the correlation matrix exactly
// singular.
class DesignSet {
public:
    explicit DesignSet(Eigen::MatrixXd points);

    const Eigen::MatrixXd& points() const { return points_; }
    int count() const { return static_cast<int>(points_.rows()); }
    int dim() const { return static_cast<int>(points_.cols()); }

private:
    Eigen::MatrixXd points_;
};

// Trend function space. AffineInA (constant plus the first coordinate) is the
// default; FullAffine adds every coordinate.
enum class TrendBasis { Constant, AffineInA, FullAffine };

int basis_size(TrendBasis basis, int r);
Eigen::RowVectorXd basis_row(TrendBasis basis, const Eigen::VectorXd& x);

// n x p matrix of basis values at the design points. Throws if p >= n or if
// the matrix is rank deficient (min singular value <= 1e-10 * max).
Eigen::MatrixXd trend_matrix(const DesignSet& design, TrendBasis basis);

// Orthonormalized trend basis P: classical Gram-Schmidt with one
// reorthogonalization pass. Columns are sign-fixed (first nonzero entry
// positive); every consumer is gauge-invariant so the convention is cosmetic.
Eigen::MatrixXd orthonormal_basis(const Eigen::MatrixXd& H);

// n x (n-p) matrix W with W^T H = 0 and W^T W = I, from the SVD of H
// (left singular vectors of the zero singular values), sign-fixed like P.
Eigen::MatrixXd null_space_basis(const Eigen::MatrixXd& H);

struct ProjectionPair {
    Eigen::MatrixXd P;
    Eigen::MatrixXd W;
};

// Design plus trend machinery; the immutable input bundle of every
// likelihood, posterior and prediction call.
struct TrendModel {
    DesignSet design;
    TrendBasis basis;
    Eigen::MatrixXd H;
    Eigen::MatrixXd P;
    Eigen::MatrixXd W;

    int n() const { return design.count(); }
    int r() const { return design.dim(); }
    int p() const { return static_cast<int>(H.cols()); }
};

TrendModel make_trend_model(DesignSet design, TrendBasis basis);

}  // namespace tgk
