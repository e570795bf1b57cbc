#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "test_helpers.hpp"
#include "tgk/kernel.hpp"
#include "tgk/pod.hpp"
#include "tgk/rng.hpp"
#include "tgk/transform.hpp"

using tgk::from_unit;
using tgk::Marginal;
using tgk::NormalMarginal;
using tgk::NuisanceDistribution;
using tgk::PodCurve;
using tgk::PodOptions;
using tgk::to_unit;
using tgk::TruncatedNormalAtZeroMarginal;
using tgk::UniformMarginal;

TEST_CASE("marginal CDFs") {
    CHECK(to_unit(UniformMarginal{0.0, 2.0}, 0.5) == doctest::Approx(0.25).epsilon(1e-15));
    CHECK(to_unit(NormalMarginal{3.0, 4.0}, 3.0) == doctest::Approx(0.5).epsilon(1e-14));
    // (Phi(0) - Phi(-1)) / (1 - Phi(-1)), frozen from quadrature of the
    // truncated density
    CHECK(to_unit(TruncatedNormalAtZeroMarginal{1.0, 1.0}, 1.0) ==
          doctest::Approx(0.405713291327469897).epsilon(1e-12));
    CHECK_THROWS_AS(to_unit(UniformMarginal{0.0, 2.0}, 2.5), std::domain_error);
    CHECK_THROWS_AS(to_unit(TruncatedNormalAtZeroMarginal{1.0, 1.0}, -0.1),
                    std::domain_error);
}

TEST_CASE("marginal quantiles") {
    CHECK(from_unit(UniformMarginal{-1.0, 3.0}, 0.5) == doctest::Approx(1.0).epsilon(1e-14));
    // standard-normal quantile at 0.975
    CHECK(from_unit(NormalMarginal{2.0, 9.0}, 0.975) ==
          doctest::Approx(2.0 + 3.0 * 1.9599639845400542355).epsilon(1e-10));
    CHECK_THROWS_AS(from_unit(NormalMarginal{0.0, 1.0}, 0.0), std::domain_error);
    CHECK_THROWS_AS(from_unit(NormalMarginal{0.0, 1.0}, 1.0), std::domain_error);

    tgk::Rng rng(3);
    const Marginal marginals[] = {UniformMarginal{0.2, 4.0}, NormalMarginal{-1.0, 2.5},
                                  TruncatedNormalAtZeroMarginal{0.5, 2.0}};
    for (const Marginal& m : marginals) {
        for (int i = 0; i < 1000; ++i) {
            const double u = rng.uniform();
            const double x = from_unit(m, u);
            CHECK(std::fabs(to_unit(m, x) - u) < 1e-9 * (1.0 + std::fabs(u)));
        }
    }
}

TEST_CASE("nuisance sampling") {
    NuisanceDistribution dist;
    dist.marginals = {Marginal(UniformMarginal{0.0, 1.0}), Marginal(NormalMarginal{0.0, 1.0})};

    CHECK(tgk::sample_nuisance(dist, 0, 1).rows() == 0);

    const int n = 20000;
    const Eigen::MatrixXd pts = tgk::sample_nuisance(dist, n, 17);
    REQUIRE(pts.rows() == n);
    REQUIRE(pts.cols() == 2);
    for (int k = 0; k < 2; ++k) {
        CHECK(std::fabs(pts.col(k).mean() - 0.5) < 3.0 / std::sqrt(12.0 * n));
    }
    const Eigen::MatrixXd again = tgk::sample_nuisance(dist, n, 17);
    CHECK((pts - again).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("pushing unit draws through the quantile reproduces the marginals") {
    const Marginal marginals[] = {Marginal(UniformMarginal{1.0, 5.0}),
                                  Marginal(NormalMarginal{2.0, 4.0}),
                                  Marginal(TruncatedNormalAtZeroMarginal{1.5, 1.0})};
    NuisanceDistribution dist;
    dist.marginals.assign(marginals, marginals + 3);
    const Eigen::MatrixXd unit = tgk::sample_nuisance(dist, 10000, 23);
    for (int k = 0; k < 3; ++k) {
        std::vector<double> physical;
        physical.reserve(10000);
        for (int i = 0; i < 10000; ++i) {
            physical.push_back(from_unit(dist.marginals[static_cast<size_t>(k)], unit(i, k)));
        }
        const auto& m = dist.marginals[static_cast<size_t>(k)];
        const double ks =
            tgk_test::ks_distance(physical, [&](double x) { return to_unit(m, x); });
        CHECK(ks < 0.03);
    }
}

namespace {

struct SmallFit {
    tgk::TrendModel model;
    Eigen::VectorXd z;
    double alpha;
    std::vector<Eigen::VectorXd> draws;
};

SmallFit make_small_fit(std::uint64_t seed) {
    tgk::Rng rng(seed);
    const int n = 12;
    const tgk::DesignSet design = tgk_test::random_design(n, 2, rng);
    tgk::TrendModel model = tgk::make_trend_model(design, tgk::TrendBasis::AffineInA);

    // monotone-in-a synthetic outputs with a bit of noise
    Eigen::VectorXd y(n);
    for (int i = 0; i < n; ++i) {
        y[i] = 0.5 + 2.5 * design.points()(i, 0) + 0.3 * rng.normal();
    }
    const double alpha = 0.4;
    Eigen::VectorXd z(n);
    for (int i = 0; i < n; ++i) z[i] = tgk::sinh_log_inverse(alpha, y[i]);

    std::vector<Eigen::VectorXd> draws;
    for (int j = 0; j < 6; ++j) draws.push_back(tgk_test::random_theta(2, rng, 0.3, 0.9));
    return SmallFit{std::move(model), std::move(z), alpha, std::move(draws)};
}

}  // namespace

TEST_CASE("pod curves: trivial threshold, monotone gamma, determinism") {
    const SmallFit fit = make_small_fit(31);
    PodOptions opt;
    opt.a_step = 0.05;
    opt.n_mc = 150;
    opt.seed = 7;

    // a threshold below every reachable output: every probability is one
    {
        const PodCurve c = tgk::pod_curves(fit.model, fit.z, fit.alpha, fit.draws, 1e-8,
                                           {0.5, 0.95}, opt);
        CHECK((c.pod_mean.array() == 1.0).all());
        for (const auto& pg : c.pod_gamma) CHECK((pg.array() == 1.0).all());
    }

    const std::vector<double> gammas{0.5, 0.8, 0.95, 0.99};
    const PodCurve c = tgk::pod_curves(fit.model, fit.z, fit.alpha, fit.draws,
                                       std::exp(1.5), gammas, opt);
    CHECK(c.a_grid.size() == 21);
    CHECK((c.pod_mean.array() >= 0.0).all());
    CHECK((c.pod_mean.array() <= 1.0).all());
    // pointwise nonincreasing in gamma
    for (size_t g = 1; g < gammas.size(); ++g) {
        CHECK(((c.pod_gamma[g - 1] - c.pod_gamma[g]).array() >= 0.0).all());
    }
    // bitwise deterministic rerun
    const PodCurve c2 = tgk::pod_curves(fit.model, fit.z, fit.alpha, fit.draws,
                                        std::exp(1.5), gammas, opt);
    CHECK((c.pod_mean - c2.pod_mean).cwiseAbs().maxCoeff() == 0.0);
    for (size_t g = 0; g < gammas.size(); ++g) {
        CHECK((c.pod_gamma[g] - c2.pod_gamma[g]).cwiseAbs().maxCoeff() == 0.0);
    }
}

TEST_CASE("pod monte carlo convergence") {
    const SmallFit fit = make_small_fit(37);
    PodOptions opt;
    opt.a_step = 0.05;
    opt.seed = 11;
    opt.n_mc = 250;
    const PodCurve base = tgk::pod_curves(fit.model, fit.z, fit.alpha, fit.draws,
                                          std::exp(1.5), {0.9}, opt);
    opt.n_mc = 500;
    opt.seed = 12;
    const PodCurve fine = tgk::pod_curves(fit.model, fit.z, fit.alpha, fit.draws,
                                          std::exp(1.5), {0.9}, opt);
    const double bound = 3.0 * std::sqrt(0.25 / 250.0);
    int ok = 0;
    for (int i = 0; i < base.pod_mean.size(); ++i) {
        if (std::fabs(base.pod_mean[i] - fine.pod_mean[i]) < bound) ++ok;
    }
    CHECK(ok >= static_cast<int>(0.95 * base.pod_mean.size()));
}

namespace {

tgk::AlphaProfile profile_from(const SmallFit& fit, const std::vector<double>& alphas,
                               const std::vector<double>& log_l) {
    tgk::AlphaProfile profile;
    for (size_t i = 0; i < alphas.size(); ++i) {
        tgk::AlphaProfileEntry e;
        e.alpha = alphas[i];
        e.log_l_log = log_l[i];
        e.draws.alpha = alphas[i];
        e.draws.draws = fit.draws;
        profile.entries.push_back(std::move(e));
    }
    return profile;
}

}  // namespace

TEST_CASE("integrated alpha: all mass on one entry reduces to the fixed curve") {
    const SmallFit fit = make_small_fit(41);
    PodOptions opt;
    opt.a_step = 0.1;
    opt.n_mc = 120;
    opt.seed = 13;

    const tgk::AlphaProfile profile =
        profile_from(fit, {0.3, 0.4, 0.5}, {-1000.0, 50.0, -1000.0});
    bool degenerate = false;
    const PodCurve avg = tgk::pod_integrated_alpha(fit.model, fit.z, profile, std::exp(1.5),
                                                   {0.95}, 0.999, opt, &degenerate);
    CHECK(degenerate);  // one grid point holds all the mass
    const PodCurve fixed =
        tgk::pod_curves(fit.model, fit.z, 0.4, fit.draws, std::exp(1.5), {0.95}, opt);
    CHECK((avg.pod_mean - fixed.pod_mean).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("integrated alpha: equal two-point profile averages the SAFE values") {
    const SmallFit fit = make_small_fit(43);
    PodOptions opt;
    opt.a_step = 0.1;
    opt.n_mc = 150;
    opt.seed = 17;

    const tgk::AlphaProfile profile = profile_from(fit, {0.35, 0.45}, {10.0, 10.0});
    bool degenerate = true;
    const PodCurve avg = tgk::pod_integrated_alpha(fit.model, fit.z, profile, std::exp(1.5),
                                                   {0.95}, 0.999, opt, &degenerate);
    CHECK_FALSE(degenerate);

    const PodCurve a = tgk::pod_curves(fit.model, fit.z, 0.35, fit.draws, std::exp(1.5),
                                       {0.95}, opt);
    const PodCurve b = tgk::pod_curves(fit.model, fit.z, 0.45, fit.draws, std::exp(1.5),
                                       {0.95}, opt);
    // SAFE averages linearly, so the mean curve is the average of the means
    // (the same nuisance substreams are shared across alpha)
    CHECK((avg.pod_mean - 0.5 * (a.pod_mean + b.pod_mean)).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("pod rejects bad arguments") {
    const SmallFit fit = make_small_fit(47);
    PodOptions opt;
    opt.a_step = 0.25;
    opt.n_mc = 50;
    CHECK_THROWS_AS(
        tgk::pod_curves(fit.model, fit.z, fit.alpha, fit.draws, -2.0, {0.95}, opt),
        std::invalid_argument);
    CHECK_THROWS_AS(
        tgk::pod_curves(fit.model, fit.z, fit.alpha, fit.draws, 2.0, {1.5}, opt),
        std::invalid_argument);
}
