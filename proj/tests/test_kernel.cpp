#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <Eigen/Eigenvalues>
#include <cmath>

#include "test_helpers.hpp"
#include "tgk/kernel.hpp"
#include "tgk/rng.hpp"

using tgk::anisotropic_distance;
using tgk::correlation_matrix;
using tgk::correlation_matrix_grad;
using tgk::cross_correlation;
using tgk::matern52;

TEST_CASE("matern52 values") {
    CHECK(matern52(0.0) == doctest::Approx(1.0));
    CHECK(matern52(20.0) < 1e-12);
    // high-precision (1 + sqrt5 + 5/3) exp(-sqrt5)
    CHECK(matern52(1.0) == doctest::Approx(0.52399410883182031059).epsilon(1e-14));
    CHECK_THROWS_AS(matern52(-0.1), std::domain_error);
    // strictly decreasing
    double prev = matern52(0.0);
    for (double d = 0.05; d < 5.0; d += 0.05) {
        const double v = matern52(d);
        CHECK(v < prev);
        prev = v;
    }
}

TEST_CASE("anisotropic distance") {
    Eigen::VectorXd u(2), v(2), theta(2);
    u << 0.0, 0.0;
    v << 0.6, 0.8;
    theta << 1.0, 1.0;
    CHECK(anisotropic_distance(u, v, theta) == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(anisotropic_distance(u, u, theta) == doctest::Approx(0.0));
    // doubling every length halves the distance
    const double d1 = anisotropic_distance(u, v, theta);
    CHECK(anisotropic_distance(u, v, Eigen::VectorXd(2.0 * theta)) ==
          doctest::Approx(0.5 * d1).epsilon(1e-14));
    Eigen::VectorXd w(3);
    CHECK_THROWS_AS(anisotropic_distance(u, w, theta), std::invalid_argument);
}

TEST_CASE("correlation matrix basics") {
    tgk::Rng rng(5);
    {
        const tgk::DesignSet one = tgk_test::random_design(1, 3, rng);
        const Eigen::MatrixXd corr =
            correlation_matrix(one.points(), Eigen::VectorXd::Ones(3));
        CHECK(corr.rows() == 1);
        CHECK(corr(0, 0) == doctest::Approx(1.0));
    }
    {
        Eigen::MatrixXd pts(2, 2);
        pts << 0.1, 0.2, 0.7, 0.9;
        Eigen::VectorXd theta(2);
        theta << 0.5, 0.25;
        const Eigen::MatrixXd corr = correlation_matrix(pts, theta);
        const double d = anisotropic_distance(pts.row(0).transpose(), pts.row(1).transpose(),
                                              theta);
        CHECK(corr(0, 1) == doctest::Approx(matern52(d)).epsilon(1e-15));
        CHECK(corr(1, 0) == corr(0, 1));
        CHECK(corr(0, 0) == 1.0);
    }
    {
        // tiny lengths on separated points: numerically the identity
        const tgk::DesignSet design = tgk_test::random_design(8, 2, rng);
        const Eigen::MatrixXd corr =
            correlation_matrix(design.points(), Eigen::VectorXd::Constant(2, 1e-4));
        CHECK((corr - Eigen::MatrixXd::Identity(8, 8)).cwiseAbs().maxCoeff() < 1e-12);
    }
}

TEST_CASE("correlation matrix invariants over random draws") {
    tgk::Rng rng(17);
    for (int rep = 0; rep < 100; ++rep) {
        const int n = 2 + static_cast<int>(rng.below(49));
        const int r = 1 + static_cast<int>(rng.below(4));
        const tgk::DesignSet design = tgk_test::random_design(n, r, rng);
        const Eigen::VectorXd theta = tgk_test::random_theta(r, rng, 0.1, 3.0);
        const Eigen::MatrixXd corr = correlation_matrix(design.points(), theta);
        CHECK((corr - corr.transpose()).cwiseAbs().maxCoeff() == 0.0);
        CHECK((corr.diagonal().array() == 1.0).all());
        CHECK(corr.minCoeff() > 0.0);
        CHECK(corr.maxCoeff() <= 1.0);
        const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(corr);
        CHECK(eig.eigenvalues().minCoeff() >= -1e-8);
    }
}

TEST_CASE("permutation equivariance") {
    tgk::Rng rng(23);
    const int n = 12;
    const tgk::DesignSet design = tgk_test::random_design(n, 3, rng);
    const Eigen::VectorXd theta = tgk_test::random_theta(3, rng);
    const Eigen::MatrixXd corr = correlation_matrix(design.points(), theta);

    std::vector<int> perm{4, 2, 9, 0, 11, 7, 1, 3, 10, 5, 8, 6};
    Eigen::MatrixXd permuted(n, 3);
    for (int i = 0; i < n; ++i) permuted.row(i) = design.points().row(perm[i]);
    const Eigen::MatrixXd corr2 = correlation_matrix(permuted, theta);
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
            CHECK(corr2(i, j) == corr(perm[i], perm[j]));
        }
    }
}

TEST_CASE("cross correlation consistency") {
    tgk::Rng rng(31);
    const tgk::DesignSet design = tgk_test::random_design(10, 2, rng);
    const Eigen::VectorXd theta = tgk_test::random_theta(2, rng);
    const Eigen::MatrixXd corr = correlation_matrix(design.points(), theta);
    // row at a design point equals the matrix row
    const Eigen::VectorXd row =
        cross_correlation(design.points(), design.points().row(4).transpose(), theta);
    CHECK((row - corr.row(4).transpose()).cwiseAbs().maxCoeff() < 1e-15);
    // far point with tiny lengths: vanishing correlation
    const Eigen::VectorXd far =
        cross_correlation(design.points(), Eigen::VectorXd::Ones(2),
                          Eigen::VectorXd::Constant(2, 1e-4));
    // (design points are random in the cube; the corner is far from almost all)
    int tiny = 0;
    for (int i = 0; i < far.size(); ++i) tiny += far[i] < 1e-12 ? 1 : 0;
    CHECK(tiny >= far.size() - 1);
    // arbitrary point matches scalar evaluations
    Eigen::VectorXd x0(2);
    x0 << 0.33, 0.66;
    const Eigen::VectorXd r0 = cross_correlation(design.points(), x0, theta);
    for (int i = 0; i < 10; ++i) {
        CHECK(r0[i] == doctest::Approx(matern52(anisotropic_distance(
                           design.points().row(i).transpose(), x0, theta))));
    }
}

TEST_CASE("gradient matches finite differences") {
    tgk::Rng rng(37);
    for (int rep = 0; rep < 10; ++rep) {
        const int n = 6;
        const int r = 3;
        const tgk::DesignSet design = tgk_test::random_design(n, r, rng);
        const Eigen::VectorXd theta = tgk_test::random_theta(r, rng, 0.3, 1.5);
        for (int k = 0; k < r; ++k) {
            const Eigen::MatrixXd grad = correlation_matrix_grad(design.points(), theta, k);
            CHECK((grad - grad.transpose()).cwiseAbs().maxCoeff() == 0.0);
            CHECK(grad.diagonal().cwiseAbs().maxCoeff() == 0.0);
            const double h = 1e-6 * theta[k];
            Eigen::VectorXd tp = theta, tm = theta;
            tp[k] += h;
            tm[k] -= h;
            const Eigen::MatrixXd fd = (correlation_matrix(design.points(), tp) -
                                        correlation_matrix(design.points(), tm)) /
                                       (2.0 * h);
            CHECK((grad - fd).cwiseAbs().maxCoeff() < 1e-6);
        }
    }
}

TEST_CASE("gradient edge cases") {
    // n = 1: zero matrix
    Eigen::MatrixXd single(1, 2);
    single << 0.5, 0.5;
    const Eigen::MatrixXd g0 = correlation_matrix_grad(single, Eigen::VectorXd::Ones(2), 0);
    CHECK(g0.cwiseAbs().maxCoeff() == 0.0);
    // shared coordinate k: gradient w.r.t. theta_k vanishes
    Eigen::MatrixXd pts(3, 2);
    pts << 0.4, 0.1, 0.4, 0.5, 0.4, 0.9;
    const Eigen::MatrixXd g = correlation_matrix_grad(pts, Eigen::VectorXd::Ones(2), 0);
    CHECK(g.cwiseAbs().maxCoeff() == 0.0);
    CHECK_THROWS_AS(correlation_matrix_grad(pts, Eigen::VectorXd::Ones(2), 2),
                    std::invalid_argument);
}

TEST_CASE("cached distances agree with direct assembly") {
    tgk::Rng rng(41);
    const tgk::DesignSet design = tgk_test::random_design(15, 3, rng);
    const Eigen::VectorXd theta = tgk_test::random_theta(3, rng);
    const tgk::PairwiseDistances pd(design.points());
    Eigen::MatrixXd corr;
    Eigen::MatrixXd grad_factor;
    tgk::matern52_from_scaled_sq(pd.scaled_sq(theta), corr, &grad_factor);
    CHECK((corr - correlation_matrix(design.points(), theta)).cwiseAbs().maxCoeff() < 1e-14);
    for (int k = 0; k < 3; ++k) {
        const Eigen::MatrixXd grad =
            grad_factor.cwiseProduct(pd.coord_sq(k)) / (theta[k] * theta[k] * theta[k]);
        CHECK((grad - correlation_matrix_grad(design.points(), theta, k)).cwiseAbs().maxCoeff() <
              1e-14);
    }
}
