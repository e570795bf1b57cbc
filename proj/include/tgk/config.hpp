#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <optional>
#include <string>

#include "tgk/pod.hpp"
#include "tgk/posterior.hpp"
#include "tgk/profile.hpp"

namespace tgk {

struct AlphaGridSpec {
    double start = 0.0;
    double stop = 1.0;
    double step = 0.01;
};

struct DesignSpec {
    int n = 100;
    int maximin_candidates = 50;
};

struct SyntheticTruth {
    Eigen::VectorXd beta;
    double sigma2 = 1.0;
    Eigen::VectorXd theta;
    double alpha = 0.5;
    std::uint64_t seed = 0;
};

// Everything a run needs, read from one JSON document. Every default the
// pipeline relies on (grid step 0.01, 9000/90 schedule, 1000 Monte Carlo
// points, gammas 0.95/0.99, threshold 200) lives here, not in code.
struct RunConfig {
    int r = 0;
    TrendBasis basis = TrendBasis::AffineInA;
    AlphaGridSpec alpha_grid;
    McmcConfig mcmc;
    std::uint64_t seed = 0;
    double threshold = 200.0;
    std::vector<double> gammas{0.95, 0.99};
    double a_step = 0.01;
    int n_mc = 1000;
    bool common_random_numbers = false;
    double mass_cutoff = 0.999;
    double jitter = 0.0;
    PosteriorOptions posterior;
    TailOptions tail;
    int map_starts = 6;
    std::optional<Marginal> a_marginal;
    NuisanceDistribution nuisance;
    std::optional<SyntheticTruth> truth;
    DesignSpec design;
    int threads = 0;  // 0 = library default
};

RunConfig load_config(const std::string& path);
TrendBasis parse_basis(const std::string& name);

}  // namespace tgk
