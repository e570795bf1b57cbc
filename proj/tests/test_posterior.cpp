#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <Eigen/Dense>
#include <cmath>

#include "test_helpers.hpp"
#include "tgk/errors.hpp"
#include "tgk/kernel.hpp"
#include "tgk/likelihood.hpp"
#include "tgk/linalg.hpp"
#include "tgk/posterior.hpp"
#include "tgk/rng.hpp"
#include "tgk/transform.hpp"

using tgk::FisherVariant;
using tgk::fisher_information;
using tgk::log_jeffreys_prior;
using tgk::log_posterior;
using tgk::make_trend_model;
using tgk::PosteriorEvaluator;
using tgk::PosteriorOptions;
using tgk::sample_posterior;
using tgk::TrendBasis;

namespace {

Eigen::VectorXd simulate(const tgk::TrendModel& model, const Eigen::VectorXd& beta,
                         double sigma2, const Eigen::VectorXd& theta, double alpha,
                         std::uint64_t seed) {
    const Eigen::MatrixXd corr = tgk::correlation_matrix(model.design.points(), theta);
    tgk::Rng rng(seed);
    Eigen::VectorXd eps(model.n());
    for (int i = 0; i < model.n(); ++i) eps[i] = rng.normal();
    const Eigen::VectorXd y =
        model.H * beta + std::sqrt(sigma2) * (Eigen::MatrixXd(corr.llt().matrixL()) * eps);
    Eigen::VectorXd z(model.n());
    for (int i = 0; i < model.n(); ++i) z[i] = tgk::sinh_log_inverse(alpha, y[i]);
    return z;
}

}  // namespace

TEST_CASE("fisher information: two-point closed form") {
    // n = 2, r = 1, constant trend: W = (1,-1)/sqrt(2), W'SW = 1 - rho,
    // W' dS W = -drho, so the information is (drho / (1 - rho))^2 / 2.
    Eigen::MatrixXd pts(2, 1);
    pts << 0.2, 0.8;
    const tgk::TrendModel model = make_trend_model(tgk::DesignSet(pts), TrendBasis::Constant);
    const double theta = 0.7;
    const double d = 0.6 / theta;
    const double s5 = std::sqrt(5.0);
    const double drho = (5.0 / 3.0) * (1.0 + s5 * d) * std::exp(-s5 * d) * 0.36 /
                        (theta * theta * theta);
    const double rho = tgk::matern52(d);
    const double expected = 0.5 * drho * drho / ((1.0 - rho) * (1.0 - rho));

    const Eigen::MatrixXd info =
        fisher_information(Eigen::VectorXd::Constant(1, theta), model);
    CHECK(info(0, 0) == doctest::Approx(expected).epsilon(1e-10));
}

TEST_CASE("fisher information: symmetry and the zero-information direction") {
    // all points share coordinate 1: no information about theta_2
    Eigen::MatrixXd pts(5, 2);
    pts << 0.1, 0.4, 0.3, 0.4, 0.5, 0.4, 0.7, 0.4, 0.9, 0.4;
    const tgk::TrendModel model = make_trend_model(tgk::DesignSet(pts), TrendBasis::AffineInA);
    const Eigen::MatrixXd info = fisher_information(Eigen::VectorXd::Ones(2), model);
    CHECK(info(0, 1) == info(1, 0));
    CHECK(info.row(1).cwiseAbs().maxCoeff() == 0.0);
    CHECK(info.col(1).cwiseAbs().maxCoeff() == 0.0);
    CHECK_THROWS_AS(log_jeffreys_prior(Eigen::VectorXd::Ones(2), model),
                    tgk::SingularPriorError);
}

TEST_CASE("jeffreys prior: scalar case and two-path determinant") {
    tgk::Rng rng(3);
    const tgk::DesignSet design = tgk_test::random_design(10, 1, rng);
    const tgk::TrendModel model = make_trend_model(design, TrendBasis::Constant);
    const Eigen::VectorXd theta = Eigen::VectorXd::Constant(1, 0.5);
    const Eigen::MatrixXd info = fisher_information(theta, model);
    CHECK(log_jeffreys_prior(theta, model) ==
          doctest::Approx(0.5 * std::log(info(0, 0))).epsilon(1e-12));

    // r = 3: half log det via eigenvalues (implementation) vs via Cholesky
    const tgk::DesignSet d3 = tgk_test::random_design(12, 3, rng);
    const tgk::TrendModel m3 = make_trend_model(d3, TrendBasis::AffineInA);
    const Eigen::VectorXd t3 = tgk_test::random_theta(3, rng, 0.3, 1.0);
    const Eigen::MatrixXd i3 = fisher_information(t3, m3);
    const Eigen::MatrixXd l = i3.llt().matrixL();
    const double via_chol = l.diagonal().array().log().sum();
    CHECK(log_jeffreys_prior(t3, m3) == doctest::Approx(via_chol).epsilon(1e-9));
}

TEST_CASE("fisher gauge invariance under W rotation") {
    tgk::Rng rng(7);
    const int n = 12;
    const tgk::DesignSet design = tgk_test::random_design(n, 2, rng);
    tgk::TrendModel model = make_trend_model(design, TrendBasis::AffineInA);
    const Eigen::VectorXd theta = tgk_test::random_theta(2, rng, 0.3, 1.0);
    const Eigen::MatrixXd base = fisher_information(theta, model);
    for (int rep = 0; rep < 3; ++rep) {
        tgk::TrendModel rotated = model;
        rotated.W = model.W * tgk_test::random_orthogonal(n - 2, rng);
        const Eigen::MatrixXd alt = fisher_information(theta, rotated);
        CHECK((alt - base).cwiseAbs().maxCoeff() < 1e-8 * base.cwiseAbs().maxCoeff());
    }
}

TEST_CASE("log posterior definitional sum and flat-prior toggle") {
    tgk::Rng rng(11);
    const tgk::DesignSet design = tgk_test::random_design(10, 2, rng);
    const tgk::TrendModel model = make_trend_model(design, TrendBasis::AffineInA);
    const Eigen::VectorXd z = simulate(model, Eigen::Vector2d(0.0, 2.0), 1.0,
                                       Eigen::VectorXd::Constant(2, 0.5), 0.4, 13);
    const Eigen::VectorXd theta = tgk_test::random_theta(2, rng, 0.3, 1.0);

    const double lp = log_posterior(z, theta, 0.4, model);
    const double expected = tgk::transformed_integrated_log_likelihood(z, theta, 0.4, model) +
                            log_jeffreys_prior(theta, model);
    CHECK(lp == doctest::Approx(expected).epsilon(1e-12));

    PosteriorOptions flat;
    flat.flat_prior = true;
    CHECK(log_posterior(z, theta, 0.4, model, flat) ==
          doctest::Approx(tgk::transformed_integrated_log_likelihood(z, theta, 0.4, model))
              .epsilon(1e-12));
}

TEST_CASE("fused evaluator agrees with the reference path") {
    tgk::Rng rng(17);
    for (const auto variant : {FisherVariant::Projected, FisherVariant::Sigma2Integrated}) {
        for (int rep = 0; rep < 8; ++rep) {
            const int n = 8 + static_cast<int>(rng.below(10));
            const int r = 1 + static_cast<int>(rng.below(3));
            const tgk::DesignSet design = tgk_test::random_design(n, r, rng);
            const tgk::TrendModel model = make_trend_model(design, TrendBasis::AffineInA);
            const Eigen::VectorXd z =
                simulate(model, Eigen::Vector2d(0.5, 2.0), 0.8,
                         Eigen::VectorXd::Constant(r, 0.5), 0.3, 100 + rep);
            PosteriorOptions opt;
            opt.fisher = variant;
            const PosteriorEvaluator ev(z, 0.3, model, opt);
            for (int t = 0; t < 3; ++t) {
                const Eigen::VectorXd theta = tgk_test::random_theta(r, rng, 0.2, 1.5);
                // route agreement is only meaningful away from the
                // ill-conditioned fringe where both paths lose digits
                const Eigen::MatrixXd corr =
                    tgk::correlation_matrix(design.points(), theta);
                if (tgk::cholesky(corr, "corr").min_pivot < 1e-4) continue;
                const double ref_lik =
                    tgk::transformed_integrated_log_likelihood(z, theta, 0.3, model);
                const double ref_post = log_posterior(z, theta, 0.3, model, opt);
                CHECK(ev.log_lik(theta) ==
                      doctest::Approx(ref_lik).epsilon(1e-8));
                CHECK(ev.log_post(theta) ==
                      doctest::Approx(ref_post).epsilon(1e-8));
            }
        }
    }
}

TEST_CASE("grid-normalized posterior integrates to one (r = 1)") {
    tgk::Rng rng(19);
    const tgk::DesignSet design = tgk_test::random_design(12, 1, rng);
    const tgk::TrendModel model = make_trend_model(design, TrendBasis::AffineInA);
    const Eigen::VectorXd z = simulate(model, Eigen::Vector2d(0.0, 2.0), 0.6,
                                       Eigen::VectorXd::Constant(1, 0.4), 0.3, 23);
    const PosteriorEvaluator ev(z, 0.3, model);

    // trapezoid normalization over a wide theta grid, then re-integration of
    // the normalized density must give 1
    const int grid = 4000;
    const double lo = 0.02, hi = 25.0;
    std::vector<double> ts(grid), lps(grid);
    double peak = -1e300;
    for (int i = 0; i < grid; ++i) {
        ts[i] = lo * std::pow(hi / lo, i / double(grid - 1));
        try {
            lps[i] = ev.log_post(Eigen::VectorXd::Constant(1, ts[i]));
        } catch (const std::exception&) {
            lps[i] = -1e300;
        }
        peak = std::max(peak, lps[i]);
    }
    double mass = 0.0;
    for (int i = 0; i + 1 < grid; ++i) {
        mass += 0.5 * (std::exp(lps[i] - peak) + std::exp(lps[i + 1] - peak)) *
                (ts[i + 1] - ts[i]);
    }
    double renorm = 0.0;
    for (int i = 0; i + 1 < grid; ++i) {
        renorm += 0.5 * (std::exp(lps[i] - peak) + std::exp(lps[i + 1] - peak)) *
                  (ts[i + 1] - ts[i]) / mass;
    }
    CHECK(std::fabs(renorm - 1.0) < 1e-3);
}

TEST_CASE("find_map: grid oracle, mode property and degenerate case") {
    tgk::Rng rng(29);
    const tgk::DesignSet design = tgk_test::random_design(14, 1, rng);
    const tgk::TrendModel model = make_trend_model(design, TrendBasis::AffineInA);
    const Eigen::VectorXd z = simulate(model, Eigen::Vector2d(0.0, 2.5), 0.4,
                                       Eigen::VectorXd::Constant(1, 0.4), 0.3, 31);
    const PosteriorEvaluator ev(z, 0.3, model);

    const auto map = tgk::find_map(z, 0.3, model, 6, 41);
    REQUIRE(map.has_value());
    CHECK(map->log_lik ==
          doctest::Approx(tgk::transformed_integrated_log_likelihood(z, map->theta, 0.3, model))
              .epsilon(1e-12));

    // grid search in log theta with step 0.01
    double best_log_theta = 0.0;
    double best = -1e300;
    for (double lt = std::log(0.05); lt <= std::log(20.0); lt += 0.01) {
        try {
            const double v = ev.log_post(Eigen::VectorXd::Constant(1, std::exp(lt)));
            if (v > best) {
                best = v;
                best_log_theta = lt;
            }
        } catch (const std::exception&) {
        }
    }
    CHECK(std::fabs(std::log(map->theta[0]) - best_log_theta) <= 0.01 + 1e-9);

    // mode property: no random perturbation of relative size 1e-2 improves it
    for (int rep = 0; rep < 100; ++rep) {
        Eigen::VectorXd perturbed = map->theta;
        perturbed[0] *= 1.0 + 0.01 * (rng.uniform() < 0.5 ? -1.0 : 1.0) * rng.uniform();
        CHECK(ev.log_post(perturbed) <= map->log_post + 1e-9);
    }

    // different seeds agree when both converge
    const auto map2 = tgk::find_map(z, 0.3, model, 6, 4242);
    REQUIRE(map2.has_value());
    CHECK(std::fabs(map2->log_post - map->log_post) < 1e-6);

    // n = p + 1: nothing to estimate the correlation from
    Eigen::MatrixXd tiny(3, 1);
    tiny << 0.1, 0.5, 0.9;
    const tgk::TrendModel degen = make_trend_model(tgk::DesignSet(tiny), TrendBasis::AffineInA);
    Eigen::VectorXd z3(3);
    z3 << 1.0, 2.0, 3.0;
    CHECK_FALSE(tgk::find_map(z3, 0.3, degen, 6, 1).has_value());

    CHECK_THROWS_AS(tgk::find_map(z, 0.3, model, 3, 1), std::invalid_argument);
}

TEST_CASE("sampler: schedule, determinism and acceptance bookkeeping") {
    tgk::Rng rng(37);
    const tgk::DesignSet design = tgk_test::random_design(12, 2, rng);
    const tgk::TrendModel model = make_trend_model(design, TrendBasis::AffineInA);
    const Eigen::VectorXd z = simulate(model, Eigen::Vector2d(0.0, 2.0), 0.7,
                                       Eigen::VectorXd::Constant(2, 0.5), 0.3, 43);

    tgk::McmcConfig cfg;
    cfg.n_iterations = 9000;
    cfg.thin = 90;
    cfg.burn_in = 300;
    cfg.seed = 11;
    const tgk::ThetaDraws a = sample_posterior(z, 0.3, model, cfg);
    CHECK(a.draws.size() == 100);
    for (const auto& d : a.draws) CHECK(d.minCoeff() > 0.0);
    CHECK(a.acceptance_rates.size() == 2);

    const tgk::ThetaDraws b = sample_posterior(z, 0.3, model, cfg);
    REQUIRE(b.draws.size() == a.draws.size());
    for (size_t i = 0; i < a.draws.size(); ++i) {
        CHECK((a.draws[i] - b.draws[i]).cwiseAbs().maxCoeff() == 0.0);
    }

    tgk::McmcConfig bad = cfg;
    bad.n_iterations = 100;
    bad.thin = 33;
    CHECK_THROWS_AS(sample_posterior(z, 0.3, model, bad), std::invalid_argument);
}

TEST_CASE("random-walk kernel reproduces a standard normal") {
    const auto target = [](const Eigen::VectorXd& u) { return -0.5 * u.squaredNorm(); };
    const tgk::ChainResult chain =
        tgk::run_random_walk(target, Eigen::VectorXd::Zero(1), 10000, 1, 2000, 99);
    REQUIRE(chain.draws.size() == 10000);
    std::vector<double> xs;
    xs.reserve(chain.draws.size());
    for (const auto& d : chain.draws) xs.push_back(d[0]);
    const auto ms = tgk_test::mean_sd(xs);
    CHECK(std::fabs(ms.mean) < 0.05);
    CHECK(std::fabs(ms.sd * ms.sd - 1.0) < 0.1);
}

TEST_CASE("sampler matches the grid-quadrature posterior (r = 1)") {
    tgk::Rng rng(41);
    const tgk::DesignSet design = tgk_test::random_design(12, 1, rng);
    const tgk::TrendModel model = make_trend_model(design, TrendBasis::AffineInA);
    const Eigen::VectorXd z = simulate(model, Eigen::Vector2d(0.0, 2.0), 0.5,
                                       Eigen::VectorXd::Constant(1, 0.4), 0.3, 47);
    const PosteriorEvaluator ev(z, 0.3, model);

    tgk::McmcConfig cfg;
    cfg.n_iterations = 100000;
    cfg.thin = 10;
    cfg.burn_in = 2000;
    cfg.seed = 53;
    const tgk::ThetaDraws draws = sample_posterior(z, 0.3, model, cfg);
    REQUIRE(draws.draws.size() == 10000);

    // quadrature CDF on a fine log grid
    const int grid = 6000;
    const double lo = 0.01, hi = 40.0;
    std::vector<double> ts(grid), dens(grid);
    double peak = -1e300;
    std::vector<double> lps(grid);
    for (int i = 0; i < grid; ++i) {
        ts[i] = lo * std::pow(hi / lo, i / double(grid - 1));
        try {
            lps[i] = ev.log_post(Eigen::VectorXd::Constant(1, ts[i]));
        } catch (const std::exception&) {
            lps[i] = -1e300;
        }
        peak = std::max(peak, lps[i]);
    }
    for (int i = 0; i < grid; ++i) dens[i] = std::exp(lps[i] - peak);
    std::vector<double> cdf(grid, 0.0);
    for (int i = 1; i < grid; ++i) {
        cdf[i] = cdf[i - 1] + 0.5 * (dens[i] + dens[i - 1]) * (ts[i] - ts[i - 1]);
    }
    const double total = cdf.back();
    const auto cdf_at = [&](double x) {
        if (x <= ts.front()) return 0.0;
        if (x >= ts.back()) return 1.0;
        const auto it = std::upper_bound(ts.begin(), ts.end(), x);
        const size_t j = static_cast<size_t>(it - ts.begin());
        const double f = (x - ts[j - 1]) / (ts[j] - ts[j - 1]);
        return (cdf[j - 1] * (1.0 - f) + cdf[j] * f) / total;
    };

    std::vector<double> sample;
    sample.reserve(draws.draws.size());
    for (const auto& d : draws.draws) sample.push_back(d[0]);
    CHECK(tgk_test::ks_distance(sample, cdf_at) < 0.05);
}
