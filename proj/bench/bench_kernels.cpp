// Timing comparison of the serial reference loops against the OpenMP
// parallel paths: correlation-matrix assembly, the alpha-grid scan and the
// POD grid. Run with no arguments for the default sizes.

#include <Eigen/Core>
#include <chrono>
#include <cstdio>
#include <vector>

#include "tgk/kernel.hpp"
#include "tgk/parallel.hpp"
#include "tgk/pipeline.hpp"
#include "tgk/pod.hpp"
#include "tgk/posterior.hpp"
#include "tgk/profile.hpp"

namespace {

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

template <typename F>
double time_once(F&& f) {
    const auto t0 = std::chrono::steady_clock::now();
    f();
    return seconds_since(t0);
}

void report(const char* name, double serial, double parallel) {
    std::printf("%-28s serial %8.3fs   parallel %8.3fs   speedup %5.2fx\n", name, serial,
                parallel, serial / parallel);
}

}  // namespace

int main() {
    std::printf("threads available: %d\n\n", tgk::max_threads());

    {
        const tgk::DesignSet design = tgk::generate_design(1200, 6, 11);
        const Eigen::VectorXd theta = Eigen::VectorXd::Constant(6, 0.4);
        Eigen::MatrixXd out;
        const double ts = time_once([&] {
            out = tgk::correlation_matrix(design.points(), theta, tgk::Exec::Serial);
        });
        const double tp = time_once([&] {
            out = tgk::correlation_matrix(design.points(), theta, tgk::Exec::Parallel);
        });
        report("correlation_matrix n=1200", ts, tp);
    }

    {
        const tgk::DesignSet design = tgk::generate_design(40, 2, 5);
        const tgk::TrendModel model = tgk::make_trend_model(design, tgk::TrendBasis::AffineInA);
        tgk::SyntheticTruth truth;
        truth.beta = Eigen::Vector2d(0.0, 3.0);
        truth.sigma2 = 1.0;
        truth.theta = Eigen::Vector2d(0.4, 0.4);
        truth.alpha = 0.4;
        truth.seed = 7;
        const Eigen::VectorXd z = tgk::simulate_truth(design, tgk::TrendBasis::AffineInA, truth);

        tgk::ProfileConfig pc;
        pc.mcmc.n_iterations = 900;
        pc.mcmc.thin = 90;
        pc.mcmc.burn_in = 200;
        pc.mcmc.seed = 3;
        pc.map_starts = 0;
        const std::vector<double> grid = tgk::make_alpha_grid(0.1, 0.9, 0.1);

        tgk::AlphaProfile prof;
        pc.exec = tgk::Exec::Serial;
        const double ts = time_once([&] { prof = tgk::alpha_profile(z, grid, model, pc); });
        pc.exec = tgk::Exec::Parallel;
        const double tp = time_once([&] { prof = tgk::alpha_profile(z, grid, model, pc); });
        report("alpha_profile 9 points", ts, tp);

        const tgk::AlphaProfileEntry* e = prof.find(0.4);
        if (e != nullptr && !e->draws.draws.empty()) {
            tgk::PodOptions opt;
            opt.a_step = 0.02;
            opt.n_mc = 400;
            opt.seed = 17;
            opt.exec = tgk::Exec::Serial;
            tgk::PodCurve curve;
            const double ps = time_once([&] {
                curve = tgk::pod_curves(model, z, e->alpha, e->draws.draws, 5.0, {0.95}, opt);
            });
            opt.exec = tgk::Exec::Parallel;
            const double pp = time_once([&] {
                curve = tgk::pod_curves(model, z, e->alpha, e->draws.draws, 5.0, {0.95}, opt);
            });
            report("pod_curves 51x400", ps, pp);
        }
    }

    return 0;
}
